//! Normalized U(1)-valued group cochains in the inhomogeneous bar
//! description, with coboundary, pullback and transgression to centralizers.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{centralizer, make_cyclic, FiniteGroup, GroupElement, GroupError, GroupHom};
use crate::phase::{conductor_of, Phase};

/// Tables with at most this many entries are stored densely.
pub const DENSE_LIMIT: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CochainError {
    #[error("cochain degree must be at least {min}, got {got}")]
    Degree { min: usize, got: usize },
    #[error("cochain is not normalized: value {value} at {args:?} has an identity argument")]
    NotNormalized { args: Vec<GroupElement>, value: Phase },
    #[error("not a cocycle: coboundary is {value} at {args:?}")]
    NotCocycle { args: Vec<GroupElement>, value: Phase },
    #[error("argument tuple {0:?} is out of range for the group")]
    BadArguments(Vec<GroupElement>),
    #[error("homomorphism target {target} does not match the cochain's group {group}")]
    GroupMismatch { target: String, group: String },
    #[error("cyclic cocycle needs the standard table of Z{k}, got {group}")]
    NotCyclic { k: usize, group: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("malformed cocycle file: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Dense(Vec<Phase>),
    /// Non-zero entries only.
    Sparse(HashMap<Vec<u32>, Phase>),
}

/// A normalized cochain `G^d → U(1)`.
#[derive(Clone, Debug)]
pub struct Cochain {
    group: Arc<FiniteGroup>,
    degree: usize,
    storage: Storage,
}

/// Iterates `{0..n}^d` in lexicographic order.
pub(crate) fn for_each_tuple(n: usize, d: usize, mut f: impl FnMut(&[GroupElement])) {
    let mut t = vec![0usize; d];
    loop {
        f(&t);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

impl Cochain {
    /// Tabulates `f`, rejecting values that violate normalization.
    pub fn from_fn(
        group: Arc<FiniteGroup>,
        degree: usize,
        mut f: impl FnMut(&[GroupElement]) -> Phase,
    ) -> Result<Cochain, CochainError> {
        if degree == 0 {
            return Err(CochainError::Degree { min: 1, got: 0 });
        }
        let n = group.order();
        let e = group.identity();
        let dense = n.checked_pow(degree as u32).is_some_and(|s| s <= DENSE_LIMIT);
        let mut violation = None;
        let mut dense_values = Vec::new();
        let mut sparse_values = HashMap::new();
        for_each_tuple(n, degree, |args| {
            let value = f(args);
            if violation.is_none() && !value.is_zero() && args.contains(&e) {
                violation = Some(CochainError::NotNormalized { args: args.to_vec(), value });
            }
            if dense {
                dense_values.push(value);
            } else if !value.is_zero() {
                sparse_values.insert(args.iter().map(|&a| a as u32).collect(), value);
            }
        });
        if let Some(err) = violation {
            return Err(err);
        }
        let storage = if dense { Storage::Dense(dense_values) } else { Storage::Sparse(sparse_values) };
        Ok(Cochain { group, degree, storage })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    #[inline]
    fn dense_index(&self, args: &[GroupElement]) -> usize {
        let n = self.group.order();
        args.iter().fold(0, |acc, &a| acc * n + a)
    }

    /// Value at `(g1, …, gd)`.
    #[inline]
    pub fn eval(&self, args: &[GroupElement]) -> Phase {
        debug_assert_eq!(args.len(), self.degree);
        match &self.storage {
            Storage::Dense(v) => v[self.dense_index(args)],
            Storage::Sparse(m) => {
                let key: Vec<u32> = args.iter().map(|&a| a as u32).collect();
                m.get(&key).copied().unwrap_or(Phase::ZERO)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.storage {
            Storage::Dense(v) => v.iter().all(Phase::is_zero),
            Storage::Sparse(m) => m.is_empty(),
        }
    }

    /// Non-zero entries, in no particular order for sparse storage.
    pub fn nonzero_entries(&self) -> Vec<(Vec<GroupElement>, Phase)> {
        match &self.storage {
            Storage::Dense(_) => {
                let mut out = Vec::new();
                for_each_tuple(self.group.order(), self.degree, |args| {
                    let v = self.eval(args);
                    if !v.is_zero() {
                        out.push((args.to_vec(), v));
                    }
                });
                out
            }
            Storage::Sparse(m) => m
                .iter()
                .map(|(k, &v)| (k.iter().map(|&a| a as usize).collect(), v))
                .collect(),
        }
    }

    /// Lcm of value denominators; exponents of all evaluations live in
    /// `ζ_conductor`.
    pub fn conductor(&self) -> u64 {
        match &self.storage {
            Storage::Dense(v) => conductor_of(v),
            Storage::Sparse(m) => conductor_of(m.values()),
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        if *self.group != *other.group || self.degree != other.degree {
            return Err(CochainError::GroupMismatch {
                target: other.group.name().into(),
                group: self.group.name().into(),
            });
        }
        Cochain::from_fn(self.group.clone(), self.degree, |a| self.eval(a) + other.eval(a))
    }

    /// First argument tuple where the coboundary is non-zero, if any.
    pub fn cocycle_violation(&self) -> Option<(Vec<GroupElement>, Phase)> {
        if self.is_zero() {
            return None;
        }
        let mut found = None;
        let n = self.group.order();
        let d = self.degree;
        let mut scratch = vec![0; d];
        for_each_tuple(n, d + 1, |args| {
            if found.is_none() {
                let v = coboundary_at(self, args, &mut scratch);
                if !v.is_zero() {
                    found = Some((args.to_vec(), v));
                }
            }
        });
        found
    }

    pub fn require_cocycle(&self) -> Result<(), CochainError> {
        match self.cocycle_violation() {
            None => Ok(()),
            Some((args, value)) => Err(CochainError::NotCocycle { args, value }),
        }
    }
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Cochain) -> bool {
        if *self.group != *other.group || self.degree != other.degree {
            return false;
        }
        let mut a = self.nonzero_entries();
        let mut b = other.nonzero_entries();
        a.sort();
        b.sort();
        a == b
    }
}

pub fn zero_cochain(group: Arc<FiniteGroup>, degree: usize) -> Result<Cochain, CochainError> {
    Cochain::from_fn(group, degree, |_| Phase::ZERO)
}

/// `(δc)(g1..g_{d+1})` evaluated at one tuple.
fn coboundary_at(c: &Cochain, args: &[GroupElement], scratch: &mut [GroupElement]) -> Phase {
    let d = c.degree;
    let g = &c.group;
    let mut total = c.eval(&args[1..]);
    for i in 1..=d {
        // merge positions i-1 and i (1-based i, i+1)
        let mut k = 0;
        for (j, &a) in args.iter().enumerate() {
            if j == i {
                continue;
            }
            scratch[k] = if j == i - 1 { g.mul(a, args[i]) } else { a };
            k += 1;
        }
        let term = c.eval(scratch);
        total = if i % 2 == 1 { total - term } else { total + term };
    }
    let last = c.eval(&args[..d]);
    if (d + 1) % 2 == 1 {
        total - last
    } else {
        total + last
    }
}

/// Bar-resolution coboundary with trivial coefficients.
pub fn coboundary(c: &Cochain) -> Cochain {
    let mut scratch = vec![0; c.degree];
    Cochain::from_fn(c.group.clone(), c.degree + 1, |args| coboundary_at(c, args, &mut scratch))
        .expect("coboundary of a normalized cochain is normalized")
}

pub fn is_cocycle(c: &Cochain) -> bool {
    c.cocycle_violation().is_none()
}

/// `ω(a,b,c) = p·a·(b + c − ((b+c) mod k)) / k²` on `Z_k`.
pub fn cyclic_cocycle(k: usize, p: i64) -> Result<Cochain, CochainError> {
    let group = Arc::new(make_cyclic(k)?);
    cyclic_cocycle_on(group, k, p)
}

/// Same formula on a caller-supplied copy of the standard `Z_k` table.
pub fn cyclic_cocycle_on(group: Arc<FiniteGroup>, k: usize, p: i64) -> Result<Cochain, CochainError> {
    if group.table() != make_cyclic(k)?.table() {
        return Err(CochainError::NotCyclic { k, group: group.name().into() });
    }
    let k2 = (k * k) as i64;
    Cochain::from_fn(group, 3, |args| {
        let (a, b, c) = (args[0], args[1], args[2]);
        let carry = (b + c - (b + c) % k) as i64;
        Phase::new(p * a as i64 * carry, k2)
    })
}

/// Pullback along `h: H → G`.
pub fn restrict(c: &Cochain, h: &GroupHom) -> Result<Cochain, CochainError> {
    if **h.target() != *c.group {
        return Err(CochainError::GroupMismatch {
            target: h.target().name().into(),
            group: c.group.name().into(),
        });
    }
    let mut image = vec![0; c.degree];
    Cochain::from_fn(h.source().clone(), c.degree, |args| {
        for (slot, &a) in image.iter_mut().zip(args) {
            *slot = h.apply(a);
        }
        c.eval(&image)
    })
}

/// Transgression to the centralizer of `x`:
/// `τ_x c(h1..h_{d-1}) = Σ_i (−1)^i c(h1..h_i, x, h_{i+1}..h_{d-1})`.
///
/// The result lives on `centralizer(x).as_group()`. The sign matches the
/// prism orientation used by `product_with_circle`.
pub fn transgress(c: &Cochain, x: GroupElement) -> Result<Cochain, CochainError> {
    if c.degree < 2 {
        return Err(CochainError::Degree { min: 2, got: c.degree });
    }
    if x >= c.group.order() {
        return Err(CochainError::BadArguments(vec![x]));
    }
    let cent = centralizer(&c.group, x);
    let embed = cent.embedding();
    let d = c.degree;
    let mut slots = vec![0; d];
    Cochain::from_fn(cent.as_group().clone(), d - 1, |args| {
        let mut total = Phase::ZERO;
        for i in 0..d {
            for j in 0..d {
                slots[j] = match j.cmp(&i) {
                    std::cmp::Ordering::Less => embed.apply(args[j]),
                    std::cmp::Ordering::Equal => x,
                    std::cmp::Ordering::Greater => embed.apply(args[j - 1]),
                };
            }
            let term = c.eval(&slots);
            total = if i % 2 == 0 { total + term } else { total - term };
        }
        total
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct CocycleFile {
    group: String,
    degree: usize,
    /// `[g1, …, gd, num, den]`
    entries: Vec<Vec<i64>>,
}

/// Reads the JSON cocycle format; omitted entries are zero.
pub fn cochain_from_json(
    text: &str,
    group: Arc<FiniteGroup>,
    check_cocycle: bool,
) -> Result<Cochain, CochainError> {
    let file: CocycleFile =
        serde_json::from_str(text).map_err(|e| CochainError::Parse(e.to_string()))?;
    let d = file.degree;
    let n = group.order() as i64;
    let mut values: HashMap<Vec<usize>, Phase> = HashMap::new();
    for entry in &file.entries {
        if entry.len() != d + 2 {
            return Err(CochainError::Parse(format!(
                "entry {entry:?} should have {} numbers",
                d + 2
            )));
        }
        let args = &entry[..d];
        if args.iter().any(|&a| a < 0 || a >= n) {
            return Err(CochainError::BadArguments(args.iter().map(|&a| a as usize).collect()));
        }
        let (num, den) = (entry[d], entry[d + 1]);
        if den <= 0 {
            return Err(CochainError::Parse(format!("non-positive denominator in {entry:?}")));
        }
        values.insert(args.iter().map(|&a| a as usize).collect(), Phase::new(num, den));
    }
    let cochain = Cochain::from_fn(group, d, |args| values.get(args).copied().unwrap_or_default())?;
    if check_cocycle {
        cochain.require_cocycle()?;
    }
    Ok(cochain)
}

pub fn cochain_to_json(c: &Cochain) -> String {
    let mut entries: Vec<Vec<i64>> = c
        .nonzero_entries()
        .into_iter()
        .map(|(args, v)| {
            let mut e: Vec<i64> = args.into_iter().map(|a| a as i64).collect();
            e.push(v.numer());
            e.push(v.denom());
            e
        })
        .collect();
    entries.sort();
    let file = CocycleFile { group: c.group.name().into(), degree: c.degree, entries };
    serde_json::to_string(&file).expect("cocycle file serializes")
}
