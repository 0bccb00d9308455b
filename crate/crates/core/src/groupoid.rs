//! Essentially finite groupoids and integration against groupoid cardinality.
//!
//! A groupoid is a disjoint union of blocks. The usual block is an action
//! groupoid (a group acting on a set); bundle groupoids from
//! [`crate::bundles`] plug in through the same [`GroupoidBlock`] trait.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::cyclotomic::CyclotomicSum;
use crate::group::{FiniteGroup, GroupElement, GroupError, Subgroup};

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("function is not invariant: values differ at {a:?} and the isomorphic object {b:?}")]
    NotInvariant { a: Object, b: Object },
    #[error("object {0:?} does not belong to the groupoid")]
    UnknownObject(Object),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// An object, addressed by its block and a block-specific key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Object {
    pub block: usize,
    pub key: Vec<u32>,
}

/// A connected component: a representative and the number of objects in it.
#[derive(Clone, Debug)]
pub struct IsoClass {
    pub representative: Object,
    pub size: u128,
}

/// `Aut(x)` as a standalone group; `embedding[i]` describes element `i` in
/// the ambient data (a group element, a gauge tuple, a morphism id).
#[derive(Clone, Debug)]
pub struct Automorphisms {
    pub group: Arc<FiniteGroup>,
    pub embedding: Vec<Vec<u32>>,
}

impl Automorphisms {
    pub fn order(&self) -> usize {
        self.group.order()
    }
}

pub trait GroupoidBlock: Send + Sync + fmt::Debug {
    /// Representatives and component sizes.
    fn iso_classes(&self) -> Vec<(Vec<u32>, u128)>;
    fn automorphisms(&self, key: &[u32]) -> Result<Automorphisms, GroupoidError>;
    fn automorphism_order(&self, key: &[u32]) -> Result<u128, GroupoidError> {
        Ok(self.automorphisms(key)?.order() as u128)
    }
    fn contains(&self, key: &[u32]) -> bool;
    /// Some other object isomorphic to `key`, when one exists.
    fn isomorphic_neighbor(&self, key: &[u32]) -> Option<Vec<u32>>;
}

/// A finite group acting on `0..points` from the left.
#[derive(Clone)]
pub struct ActionGroupoid {
    group: Arc<FiniteGroup>,
    points: usize,
    table: Vec<u32>,
}

impl fmt::Debug for ActionGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}//{} points", self.group.name(), self.points)
    }
}

impl ActionGroupoid {
    pub fn new(
        group: Arc<FiniteGroup>,
        points: usize,
        act: impl Fn(GroupElement, usize) -> usize,
    ) -> Result<Self, GroupoidError> {
        let mut table = Vec::with_capacity(group.order() * points);
        for h in group.elements() {
            for x in 0..points {
                let y = act(h, x);
                if y >= points {
                    return Err(GroupoidError::InvalidAction(format!("{h}·{x} = {y} out of range")));
                }
                table.push(y as u32);
            }
        }
        let a = ActionGroupoid { group, points, table };
        for x in 0..points {
            if a.act(a.group.identity(), x) != x {
                return Err(GroupoidError::InvalidAction(format!("identity moves {x}")));
            }
            for g in a.group.elements() {
                for h in a.group.elements() {
                    if a.act(a.group.mul(g, h), x) != a.act(g, a.act(h, x)) {
                        return Err(GroupoidError::InvalidAction(format!(
                            "({g}{h})·{x} != {g}·({h}·{x})"
                        )));
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn act(&self, h: GroupElement, x: usize) -> usize {
        self.table[h * self.points + x] as usize
    }

    fn orbit(&self, x: usize) -> Vec<usize> {
        let mut orbit: Vec<usize> = self.group.elements().map(|h| self.act(h, x)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        orbit
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        let elements = self.group.elements().filter(|&h| self.act(h, x) == x).collect();
        Subgroup::from_elements(self.group.clone(), elements, format!("Stab({x})"))
            .expect("stabilizers are subgroups")
    }
}

impl GroupoidBlock for ActionGroupoid {
    fn iso_classes(&self) -> Vec<(Vec<u32>, u128)> {
        let mut seen = vec![false; self.points];
        let mut out = Vec::new();
        for x in 0..self.points {
            if seen[x] {
                continue;
            }
            let orbit = self.orbit(x);
            for &y in &orbit {
                seen[y] = true;
            }
            out.push((vec![x as u32], orbit.len() as u128));
        }
        out
    }

    fn automorphisms(&self, key: &[u32]) -> Result<Automorphisms, GroupoidError> {
        let x = key[0] as usize;
        let stab = self.stabilizer(x);
        let embedding = stab.elements().iter().map(|&h| vec![h as u32]).collect();
        Ok(Automorphisms { group: stab.as_group().clone(), embedding })
    }

    fn contains(&self, key: &[u32]) -> bool {
        key.len() == 1 && (key[0] as usize) < self.points
    }

    fn isomorphic_neighbor(&self, key: &[u32]) -> Option<Vec<u32>> {
        let x = key[0] as usize;
        self.group.elements().map(|h| self.act(h, x)).find(|&y| y != x).map(|y| vec![y as u32])
    }
}

/// A groupoid given by explicit hom-sets, for small hand-built examples.
#[derive(Clone, Debug)]
pub struct ExplicitGroupoid {
    objects: usize,
    /// `(source, target)` of each morphism
    morphisms: Vec<(usize, usize)>,
    /// `compose[(f, g)] = g ∘ f` for `f: x → y`, `g: y → z`
    compose: HashMap<(usize, usize), usize>,
    identities: Vec<usize>,
}

impl ExplicitGroupoid {
    pub fn new(
        objects: usize,
        morphisms: Vec<(usize, usize)>,
        compose: HashMap<(usize, usize), usize>,
        identities: Vec<usize>,
    ) -> Result<Self, GroupoidError> {
        let bad = |m: String| Err(GroupoidError::InvalidGroupoid(m));
        if identities.len() != objects {
            return bad("one identity per object required".into());
        }
        let g = ExplicitGroupoid { objects, morphisms, compose, identities };
        for (f, &(s, t)) in g.morphisms.iter().enumerate() {
            if s >= objects || t >= objects {
                return bad(format!("morphism {f} has endpoints out of range"));
            }
            if g.comp(g.identities[s], f) != Some(f) || g.comp(f, g.identities[t]) != Some(f) {
                return bad(format!("identities do not act trivially on {f}"));
            }
            let has_inverse = g.morphisms.iter().enumerate().any(|(h, &(hs, ht))| {
                hs == t && ht == s && g.comp(f, h) == Some(g.identities[s])
            });
            if !has_inverse {
                return bad(format!("morphism {f} is not invertible"));
            }
        }
        // associativity on all composable triples
        for (f, &(_, y)) in g.morphisms.iter().enumerate() {
            for (h, &(hs, z)) in g.morphisms.iter().enumerate() {
                if hs != y {
                    continue;
                }
                for (k, &(ks, _)) in g.morphisms.iter().enumerate() {
                    if ks != z {
                        continue;
                    }
                    let left = g.comp(f, h).and_then(|fh| g.comp(fh, k));
                    let right = g.comp(h, k).and_then(|hk| g.comp(f, hk));
                    if left.is_none() || left != right {
                        return bad(format!("composition not associative on ({f}, {h}, {k})"));
                    }
                }
            }
        }
        Ok(g)
    }

    /// `g ∘ f`, first `f` then `g`.
    fn comp(&self, f: usize, g: usize) -> Option<usize> {
        self.compose.get(&(f, g)).copied()
    }

    fn component_members(&self, x: usize) -> Vec<usize> {
        let mut seen = HashSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(a) = queue.pop_front() {
            for &(s, t) in &self.morphisms {
                if s == a && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        let mut v: Vec<_> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }
}

impl GroupoidBlock for ExplicitGroupoid {
    fn iso_classes(&self) -> Vec<(Vec<u32>, u128)> {
        let mut seen = vec![false; self.objects];
        let mut out = Vec::new();
        for x in 0..self.objects {
            if seen[x] {
                continue;
            }
            let members = self.component_members(x);
            for &m in &members {
                seen[m] = true;
            }
            out.push((vec![x as u32], members.len() as u128));
        }
        out
    }

    fn automorphisms(&self, key: &[u32]) -> Result<Automorphisms, GroupoidError> {
        let x = key[0] as usize;
        let mut loops: Vec<usize> =
            self.morphisms.iter().enumerate().filter(|(_, &st)| st == (x, x)).map(|(i, _)| i).collect();
        loops.sort_unstable();
        // put the identity first so it gets local index 0
        let id = self.identities[x];
        loops.retain(|&m| m != id);
        loops.insert(0, id);
        let local: HashMap<usize, usize> = loops.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let rows: Vec<Vec<usize>> = loops
            .iter()
            .map(|&f| loops.iter().map(|&g| local[&self.comp(f, g).expect("loops compose")]).collect())
            .collect();
        let group = Arc::new(FiniteGroup::from_table(format!("Aut({x})"), &rows)?);
        Ok(Automorphisms { group, embedding: loops.iter().map(|&m| vec![m as u32]).collect() })
    }

    fn contains(&self, key: &[u32]) -> bool {
        key.len() == 1 && (key[0] as usize) < self.objects
    }

    fn isomorphic_neighbor(&self, key: &[u32]) -> Option<Vec<u32>> {
        let x = key[0] as usize;
        self.morphisms.iter().find(|&&(s, t)| s == x && t != x).map(|&(_, t)| vec![t as u32])
    }
}

/// An essentially finite groupoid: a disjoint union of blocks.
#[derive(Clone, Debug, Default)]
pub struct EFGroupoid {
    blocks: Vec<Arc<dyn GroupoidBlock>>,
}

/// Values that can be integrated against groupoid cardinality.
pub trait Integrand: Clone + PartialEq {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, q: &BigRational) -> Self;
}

impl Integrand for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
}

impl Integrand for CyclotomicSum {
    fn zero() -> Self {
        CyclotomicSum::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, q: &BigRational) -> Self {
        CyclotomicSum::scale(self, q)
    }
}

/// An invariant function on the objects of a groupoid.
pub struct GroupoidFunction<'a, V> {
    domain: &'a EFGroupoid,
    eval: Box<dyn Fn(&Object) -> V + 'a>,
}

impl<'a, V> GroupoidFunction<'a, V> {
    pub fn new(domain: &'a EFGroupoid, eval: impl Fn(&Object) -> V + 'a) -> Self {
        GroupoidFunction { domain, eval: Box::new(eval) }
    }

    pub fn domain(&self) -> &EFGroupoid {
        self.domain
    }

    pub fn value(&self, x: &Object) -> V {
        (self.eval)(x)
    }
}

impl EFGroupoid {
    pub fn from_block(block: Arc<dyn GroupoidBlock>) -> Self {
        EFGroupoid { blocks: vec![block] }
    }

    pub fn empty() -> Self {
        EFGroupoid::default()
    }

    pub fn from_action(action: ActionGroupoid) -> Self {
        Self::from_block(Arc::new(action))
    }

    /// `n` objects, identities only.
    pub fn discrete(n: usize) -> Self {
        let trivial = Arc::new(crate::group::make_cyclic(1).expect("Z1"));
        Self::from_action(ActionGroupoid::new(trivial, n, |_, x| x).expect("trivial action"))
    }

    /// `BG`: one object with automorphism group `G`.
    pub fn one_object(group: Arc<FiniteGroup>) -> Self {
        Self::from_action(ActionGroupoid::new(group, 1, |_, _| 0).expect("action on a point"))
    }

    /// The loop groupoid `G//G` of the conjugation action `g·x = g x g⁻¹`.
    pub fn loop_groupoid(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let g2 = group.clone();
        let action = ActionGroupoid::new(group, n, move |g, x| g2.conjugate(x, g2.inv(g)))
            .expect("conjugation is an action");
        Self::from_action(action)
    }

    pub fn blocks(&self) -> &[Arc<dyn GroupoidBlock>] {
        &self.blocks
    }

    fn block_of(&self, x: &Object) -> Result<&Arc<dyn GroupoidBlock>, GroupoidError> {
        self.blocks
            .get(x.block)
            .filter(|b| b.contains(&x.key))
            .ok_or_else(|| GroupoidError::UnknownObject(x.clone()))
    }

    /// Connected components, block by block.
    pub fn pi0(&self) -> Vec<IsoClass> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(block, b)| {
                b.iso_classes().into_iter().map(move |(key, size)| IsoClass {
                    representative: Object { block, key },
                    size,
                })
            })
            .collect()
    }

    pub fn automorphism_group(&self, x: &Object) -> Result<Automorphisms, GroupoidError> {
        self.block_of(x)?.automorphisms(&x.key)
    }

    /// `Σ_{[x]} 1/|Aut(x)|`.
    pub fn cardinality(&self) -> BigRational {
        let one = GroupoidFunction::new(self, |_| BigRational::from_integer(1.into()));
        self.integrate(&one).expect("constants are invariant")
    }

    /// `∫ f = Σ_{[x]} f(x)/|Aut(x)|`. Each representative is compared against
    /// an isomorphic neighbor to reject non-invariant functions.
    pub fn integrate<V: Integrand>(&self, f: &GroupoidFunction<'_, V>) -> Result<V, GroupoidError> {
        let mut total = V::zero();
        for class in self.pi0() {
            let x = &class.representative;
            let block = self.block_of(x)?;
            let value = f.value(x);
            if let Some(key) = block.isomorphic_neighbor(&x.key) {
                let y = Object { block: x.block, key };
                if f.value(&y) != value {
                    return Err(GroupoidError::NotInvariant { a: x.clone(), b: y });
                }
            }
            let aut = block.automorphism_order(&x.key)?;
            let weight = BigRational::new(BigInt::from(1), BigInt::from(aut));
            total = total.add(&value.scale(&weight));
        }
        Ok(total)
    }

    /// Coproduct; objects of `b` are renumbered into later blocks.
    pub fn disjoint_union(a: &EFGroupoid, b: &EFGroupoid) -> EFGroupoid {
        EFGroupoid { blocks: a.blocks.iter().chain(&b.blocks).cloned().collect() }
    }

    /// Offset to apply to block indices of the second summand of a union.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}
