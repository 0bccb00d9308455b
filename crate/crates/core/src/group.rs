//! Finite groups given by multiplication tables.
//!
//! Elements are dense indices `0..order`. Everything downstream (cochains,
//! colorings, gauge transformations) stores indices, so multiplication in
//! the enumeration loops is a single table lookup.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an element in its parent group's table.
pub type GroupElement = usize;

/// Largest order accepted by constructors and loaders.
pub const MAX_ORDER: usize = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order must be between 1 and {MAX_ORDER}, got {0}")]
    BadOrder(usize),
    #[error("multiplication table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("closure: entry mult[{a}][{b}] = {value} is outside 0..{order}")]
    EntryOutOfRange { a: usize, b: usize, value: usize, order: usize },
    #[error("identity: no element is a two-sided unit")]
    NoIdentity,
    #[error("inverses: element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("associativity: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("symmetric groups are only built for n <= 5, got {0}")]
    SymmetricTooLarge(usize),
    #[error("cyclic and dihedral parameters must be >= 1")]
    ZeroParameter,
    #[error("order {order} is declared but the table has {rows} rows")]
    OrderMismatch { order: usize, rows: usize },
    #[error("unknown group name {0:?}")]
    UnknownName(String),
    #[error("homomorphism: {0}")]
    BadHomomorphism(String),
    #[error("subgroup: {0}")]
    BadSubgroup(String),
    #[error("malformed group file: {0}")]
    Parse(String),
}

/// A finite group as a multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    identity: GroupElement,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

/// One conjugacy class: minimal-index representative plus sorted members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: GroupElement,
    pub members: Vec<GroupElement>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

impl FiniteGroup {
    /// Validates a table against the group axioms and derives inverses.
    pub fn from_table(name: impl Into<String>, rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 || order > MAX_ORDER {
            return Err(GroupError::BadOrder(order));
        }
        let mut mult = Vec::with_capacity(order * order);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::NotSquare { row: a, len: row.len(), order });
            }
            for (b, &value) in row.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange { a, b, value, order });
                }
                mult.push(value as u32);
            }
        }
        Self::from_flat(name.into(), order, mult)
    }

    fn from_flat(name: String, order: usize, mult: Vec<u32>) -> Result<Self, GroupError> {
        let at = |a: usize, b: usize| mult[a * order + b] as usize;
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![0u32; order];
        for x in 0..order {
            let y = (0..order)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or(GroupError::NoInverse(x))?;
            inv[x] = y as u32;
        }
        let group = FiniteGroup { name, order, mult, inv, identity };
        group.check_associative()?;
        Ok(group)
    }

    /// Builds a group from a multiplication closure that is trusted to
    /// satisfy the axioms (used by the built-in constructors).
    fn from_fn(name: String, order: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut mult = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                mult.push(f(a, b) as u32);
            }
        }
        let group = Self::from_flat(name, order, mult);
        group.expect("built-in group tables satisfy the axioms")
    }

    fn check_associative(&self) -> Result<(), GroupError> {
        let n = self.order;
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(GroupError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
            return Ok(());
        }
        // Light's test: the elements s with (xs)y = x(sy) for all x, y are
        // closed under products, so checking a generating set suffices.
        for s in self.generators() {
            for x in 0..n {
                let xs = self.mul(x, s);
                for y in 0..n {
                    if self.mul(xs, y) != self.mul(x, self.mul(s, y)) {
                        return Err(GroupError::NotAssociative { a: x, b: s, c: y });
                    }
                }
            }
        }
        Ok(())
    }

    /// A generating set, found greedily by closure under multiplication.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut reached = vec![false; self.order];
        reached[self.identity] = true;
        let mut members = vec![self.identity];
        let mut gens = Vec::new();
        for candidate in 0..self.order {
            if reached[candidate] {
                continue;
            }
            gens.push(candidate);
            // Re-close: multiply everything reached by every generator.
            let mut frontier = members.clone();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    for y in [self.mul(x, g), self.mul(g, x)] {
                        if !reached[y] {
                            reached[y] = true;
                            members.push(y);
                            frontier.push(y);
                        }
                    }
                }
            }
        }
        gens
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: GroupElement) -> GroupElement {
        self.inv[a] as usize
    }

    /// `g⁻¹ x g`.
    #[inline]
    pub fn conjugate(&self, x: GroupElement, g: GroupElement) -> GroupElement {
        self.mul(self.inv(g), self.mul(x, g))
    }

    #[inline]
    pub fn commutes(&self, a: GroupElement, b: GroupElement) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn elements(&self) -> std::ops::Range<GroupElement> {
        0..self.order
    }

    pub fn element_order(&self, x: GroupElement) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| (a..self.order).all(|b| self.commutes(a, b)))
    }

    /// Table rows, for serialization.
    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    /// Conjugacy classes in order of their (minimal) representative.
    pub fn conjugacy_classes(&self) -> Vec<ConjugacyClass> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in self.elements() {
            if seen[x] {
                continue;
            }
            let mut members: Vec<_> = self.elements().map(|g| self.conjugate(x, g)).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                seen[m] = true;
            }
            classes.push(ConjugacyClass { representative: x, members });
        }
        classes
    }

    /// Index into `conjugacy_classes()` of the class containing `x`.
    pub fn class_index(&self, classes: &[ConjugacyClass], x: GroupElement) -> usize {
        classes
            .iter()
            .position(|c| c.members.binary_search(&x).is_ok())
            .expect("classes partition the group")
    }

    /// Orbit-stabilizer self-test.
    pub fn class_equation_check(&self) -> bool {
        let classes = self.conjugacy_classes();
        let total: usize = classes.iter().map(ConjugacyClass::size).sum();
        total == self.order
            && classes.iter().all(|c| {
                let cent = self.elements().filter(|&h| self.commutes(h, c.representative)).count();
                c.size() * cent == self.order
            })
    }
}

/// Z_k with `i·j = (i + j) mod k`.
pub fn make_cyclic(k: usize) -> Result<FiniteGroup, GroupError> {
    if k == 0 {
        return Err(GroupError::ZeroParameter);
    }
    if k > MAX_ORDER {
        return Err(GroupError::BadOrder(k));
    }
    Ok(FiniteGroup::from_fn(format!("Z{k}"), k, |a, b| (a + b) % k))
}

/// Dihedral group of order 2k. Element `r^i s^j` has index `i + k·j`.
pub fn make_dihedral(k: usize) -> Result<FiniteGroup, GroupError> {
    if k == 0 {
        return Err(GroupError::ZeroParameter);
    }
    if 2 * k > MAX_ORDER {
        return Err(GroupError::BadOrder(2 * k));
    }
    Ok(FiniteGroup::from_fn(format!("D{k}"), 2 * k, |x, y| {
        let (a, b) = (x % k, x / k);
        let (c, d) = (y % k, y / k);
        // r^a s^b r^c s^d = r^(a ± c) s^(b+d)
        let rot = if b == 0 { (a + c) % k } else { (a + k - c) % k };
        rot + k * ((b + d) % 2)
    }))
}

/// All permutations of `0..n` in lexicographic order; index 0 is the identity.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Symmetric group on n ≤ 5 letters; `(στ)(i) = σ(τ(i))`.
pub fn make_symmetric(n: usize) -> Result<FiniteGroup, GroupError> {
    if n == 0 {
        return Err(GroupError::ZeroParameter);
    }
    if n > 5 {
        return Err(GroupError::SymmetricTooLarge(n));
    }
    let perms = permutations(n);
    let index: HashMap<Vec<usize>, usize> =
        perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(FiniteGroup::from_fn(format!("S{n}"), perms.len(), |a, b| {
        let composed: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
        index[&composed]
    }))
}

/// Quaternion group. Index `2·u + s` stands for `(-1)^s · u` with
/// `u ∈ {1, i, j, k}`.
pub fn make_quaternion8() -> FiniteGroup {
    // unit products: (unit, sign flip)
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    FiniteGroup::from_fn("Q8".into(), 8, |x, y| {
        let (u, s) = (x / 2, x % 2);
        let (v, t) = (y / 2, y % 2);
        let (w, flip) = UNIT[u][v];
        2 * w + (s + t + flip) % 2
    })
}

/// Componentwise product; `(a, b)` has index `a·|B| + b`.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    let (na, nb) = (a.order, b.order);
    if na * nb > MAX_ORDER {
        return Err(GroupError::BadOrder(na * nb));
    }
    Ok(FiniteGroup::from_fn(format!("{}x{}", a.name, b.name), na * nb, |x, y| {
        a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
    }))
}

/// Resolves names like `Z4`, `D4`, `S3`, `Q8`, `Z2xZ2`.
pub fn builtin_group(name: &str) -> Result<FiniteGroup, GroupError> {
    let unknown = || GroupError::UnknownName(name.to_string());
    if name.contains('x') {
        let mut factors = name.split('x').map(builtin_group);
        let first = factors.next().ok_or_else(unknown)??;
        return factors.try_fold(first, |acc, f| direct_product(&acc, &f?));
    }
    if name == "Q8" {
        return Ok(make_quaternion8());
    }
    let (kind, digits) = name.split_at(1.min(name.len()));
    let n: usize = digits.parse().map_err(|_| unknown())?;
    match kind {
        "Z" => make_cyclic(n),
        "D" => make_dihedral(n),
        "S" => make_symmetric(n),
        _ => Err(unknown()),
    }
}

/// All homomorphisms `source → target`, found by assigning images to a
/// generating set and extending along the Cayley graph.
pub fn homomorphisms(source: &Arc<FiniteGroup>, target: &Arc<FiniteGroup>) -> Vec<GroupHom> {
    let gens = source.generators();
    let n = target.order();
    let mut found = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        if let Some(images) = extend_from_generators(source, target, &gens, &choice) {
            found.push(GroupHom { source: source.clone(), target: target.clone(), images });
        }
        let mut i = 0;
        while i < choice.len() && choice[i] + 1 == n {
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            return found;
        }
        choice[i] += 1;
    }
}

fn extend_from_generators(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[GroupElement],
    images: &[GroupElement],
) -> Option<Vec<GroupElement>> {
    let mut map = vec![usize::MAX; source.order()];
    map[source.identity()] = target.identity();
    let mut queue = std::collections::VecDeque::from([source.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let (y, image) = (source.mul(x, s), target.mul(map[x], t));
            if map[y] == usize::MAX {
                map[y] = image;
                queue.push_back(y);
            } else if map[y] != image {
                return None;
            }
        }
    }
    Some(map)
}

/// A homomorphism between two tabulated groups.
#[derive(Debug, Clone)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    images: Vec<GroupElement>,
}

impl GroupHom {
    pub fn new(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        images: Vec<GroupElement>,
    ) -> Result<Self, GroupError> {
        if images.len() != source.order() {
            return Err(GroupError::BadHomomorphism(format!(
                "{} images given for a source of order {}",
                images.len(),
                source.order()
            )));
        }
        if let Some(&bad) = images.iter().find(|&&x| x >= target.order()) {
            return Err(GroupError::BadHomomorphism(format!("image {bad} out of range")));
        }
        if images[source.identity()] != target.identity() {
            return Err(GroupError::BadHomomorphism("identity not preserved".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if images[source.mul(a, b)] != target.mul(images[a], images[b]) {
                    return Err(GroupError::BadHomomorphism(format!(
                        "image of {a}*{b} is not the product of images"
                    )));
                }
            }
        }
        Ok(GroupHom { source, target, images })
    }

    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        let images = group.elements().collect();
        GroupHom { source: group.clone(), target: group, images }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn apply(&self, x: GroupElement) -> GroupElement {
        self.images[x]
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }
}

/// A subgroup with its own table and the embedding back into the parent.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<GroupElement>,
    embedding: GroupHom,
}

impl Subgroup {
    /// `elements` are parent indices; they are sorted and checked for closure.
    pub fn from_elements(
        parent: Arc<FiniteGroup>,
        mut elements: Vec<GroupElement>,
        name: impl Into<String>,
    ) -> Result<Self, GroupError> {
        elements.sort_unstable();
        elements.dedup();
        if elements.binary_search(&parent.identity()).is_err() {
            return Err(GroupError::BadSubgroup("identity missing".into()));
        }
        let local: HashMap<GroupElement, usize> =
            elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut rows = Vec::with_capacity(elements.len());
        for &a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for &b in &elements {
                let p = parent.mul(a, b);
                let &i = local
                    .get(&p)
                    .ok_or_else(|| GroupError::BadSubgroup(format!("{a}*{b} leaves the set")))?;
                row.push(i);
            }
            rows.push(row);
        }
        // Closed under products in a finite group implies closed under inverses.
        let as_group = Arc::new(FiniteGroup::from_table(name, &rows)?);
        let embedding = GroupHom {
            source: as_group,
            target: parent.clone(),
            images: elements.clone(),
        };
        Ok(Subgroup { parent, elements, embedding })
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    /// Sorted parent indices.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn as_group(&self) -> &Arc<FiniteGroup> {
        self.embedding.source()
    }

    pub fn embedding(&self) -> &GroupHom {
        &self.embedding
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: GroupElement) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Local index of a parent element.
    pub fn local_index(&self, x: GroupElement) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }
}

/// `C(x) = {h : hx = xh}`.
pub fn centralizer(group: &Arc<FiniteGroup>, x: GroupElement) -> Subgroup {
    let elements = group.elements().filter(|&h| group.commutes(h, x)).collect();
    Subgroup::from_elements(group.clone(), elements, format!("C_{}({x})", group.name()))
        .expect("centralizers are subgroups")
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupFile {
    name: String,
    order: usize,
    mult: Vec<Vec<usize>>,
}

/// Parses the JSON group format `{ "name", "order", "mult" }`.
pub fn group_from_json(text: &str) -> Result<FiniteGroup, GroupError> {
    let file: GroupFile = serde_json::from_str(text).map_err(|e| GroupError::Parse(e.to_string()))?;
    if file.order != file.mult.len() {
        return Err(GroupError::OrderMismatch { order: file.order, rows: file.mult.len() });
    }
    FiniteGroup::from_table(file.name, &file.mult)
}

pub fn group_to_json(group: &FiniteGroup) -> String {
    let file = GroupFile { name: group.name.clone(), order: group.order, mult: group.table() };
    serde_json::to_string(&file).expect("group file serializes")
}
