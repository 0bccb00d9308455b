//! Partition functions of twisted finite gauge theories: the primitive phase
//! of a bundle, the state sum, the orbifold integral, reduction along `S¹`
//! and the decomposition checks built on top of them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::bundles::{bundle_groupoid, BundleError, ColoringSearch, FlatColoring};
use crate::cochain::{for_each_tuple, transgress, zero_cochain, Cochain, CochainError};
use crate::complex::{product_with_circle, DeltaComplex, Violation};
use crate::cyclotomic::CyclotomicSum;
use crate::group::{FiniteGroup, GroupElement};
use crate::groupoid::{GroupoidError, GroupoidFunction};
use crate::phase::Phase;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("dimension mismatch: theory of dimension {theory}, complex of dimension {complex}")]
    Dimension { theory: usize, complex: usize },
    #[error("state sum {state_sum} and groupoid integral {integral} disagree")]
    OrbifoldMismatch { state_sum: CyclotomicSum, integral: CyclotomicSum },
    #[error("coloring belongs to a different group or complex")]
    ForeignColoring,
    #[error("twisted cocycles are not supported here")]
    Twisted,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Complex(#[from] Violation),
}

/// A finite group with a normalized cocycle; the degree is the dimension of
/// the manifolds the theory evaluates.
#[derive(Clone, Debug)]
pub struct TheorySpec {
    cocycle: Cochain,
    label: String,
}

impl TheorySpec {
    pub fn new(cocycle: Cochain, label: impl Into<String>) -> Result<Self, EngineError> {
        cocycle.require_cocycle()?;
        Ok(TheorySpec { cocycle, label: label.into() })
    }

    pub fn untwisted(group: Arc<FiniteGroup>, dimension: usize) -> Self {
        let label = format!("{} untwisted", group.name());
        let cocycle = zero_cochain(group, dimension).expect("zero cochains exist in every degree");
        TheorySpec { cocycle, label }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.cocycle.group()
    }

    pub fn cocycle(&self) -> &Cochain {
        &self.cocycle
    }

    pub fn dimension(&self) -> usize {
        self.cocycle.degree()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_dimension(&self, x: &DeltaComplex) -> Result<(), EngineError> {
        if x.dim() != self.dimension() {
            return Err(EngineError::Dimension { theory: self.dimension(), complex: x.dim() });
        }
        Ok(())
    }
}

/// `⟨ψ*ω, σ_X⟩ = Σ_σ ε_σ ω(g₁, …, g_n)` over the consecutive-edge colors.
pub fn evaluate_primitive(t: &TheorySpec, c: &FlatColoring) -> Result<Phase, EngineError> {
    let x = c.complex();
    t.check_dimension(x)?;
    if !Arc::ptr_eq(c.group(), t.group()) && **c.group() != **t.group() {
        return Err(EngineError::ForeignColoring);
    }
    let mut total = Phase::ZERO;
    let mut args = vec![0; x.dim()];
    for top in 0..x.top_count() {
        for (slot, e) in args.iter_mut().zip(x.edge_path(top)) {
            *slot = c.color(e);
        }
        let value = t.cocycle.eval(&args);
        total = if x.signs()[top] > 0 { total + value } else { total - value };
    }
    Ok(total)
}

/// Precomputed edge paths and cocycle exponents for fast evaluation.
struct PhaseKernel<'a> {
    cocycle: &'a Cochain,
    conductor: u64,
    paths: Vec<(Vec<usize>, bool)>,
    table: Option<Vec<u32>>,
}

impl<'a> PhaseKernel<'a> {
    const TABLE_LIMIT: usize = 1 << 22;

    fn new(cocycle: &'a Cochain, x: &DeltaComplex) -> Self {
        let conductor = cocycle.conductor();
        let paths = (0..x.top_count()).map(|s| (x.edge_path(s), x.signs()[s] > 0)).collect();
        let n = cocycle.group().order();
        let d = cocycle.degree();
        let table = n.checked_pow(d as u32).filter(|&size| size <= Self::TABLE_LIMIT).map(|size| {
            let mut table = Vec::with_capacity(size);
            for_each_tuple(n, d, |args| table.push(cocycle.eval(args).exponent(conductor) as u32));
            table
        });
        PhaseKernel { cocycle, conductor, paths, table }
    }

    fn exponent(&self, colors: &[u32]) -> u64 {
        let n = self.conductor;
        let order = self.cocycle.group().order();
        let mut total = 0u64;
        for (path, positive) in &self.paths {
            let value = match &self.table {
                Some(table) => table[path.iter().fold(0, |acc, &e| acc * order + colors[e] as usize)] as u64,
                None => {
                    let args: Vec<GroupElement> = path.iter().map(|&e| colors[e] as usize).collect();
                    self.cocycle.eval(&args).exponent(n)
                }
            };
            total += if *positive { value } else { n - value };
        }
        total % n
    }
}

fn gauge_volume(group: &FiniteGroup, x: &DeltaComplex) -> BigRational {
    BigRational::from_integer(BigInt::from(group.order()).pow(x.vertex_count() as u32))
}

/// `(1/|G|^V) Σ_c exp(2πi E_ω(c))` over all flat colorings.
pub fn state_sum(t: &TheorySpec, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
    t.check_dimension(x)?;
    let kernel = PhaseKernel::new(&t.cocycle, x);
    let n = kernel.conductor as usize;
    let search = ColoringSearch::new(Arc::new(x.clone()), t.group().clone());
    let counts = search.par_fold(
        || vec![0u64; n],
        |acc, c| acc[kernel.exponent(c) as usize] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let total = CyclotomicSum::from_exponent_counts(kernel.conductor, &counts);
    Ok(total.scale(&gauge_volume(t.group(), x).recip()))
}

/// `∫_{PBun_G(X)} exp(2πi E_ω(P)) dP`.
pub fn groupoid_integral(t: &TheorySpec, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
    t.check_dimension(x)?;
    let kernel = PhaseKernel::new(&t.cocycle, x);
    let bundles = bundle_groupoid(&Arc::new(x.clone()), t.group());
    let f = GroupoidFunction::new(&bundles, |p| CyclotomicSum::root_of_unity(kernel.conductor, kernel.exponent(&p.key)));
    Ok(bundles.integrate(&f)?)
}

/// The Dijkgraaf-Witten invariant, computed as a state sum and as an orbifold
/// integral; the two must agree exactly.
pub fn dw_partition(t: &TheorySpec, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
    let (a, b) = rayon::join(|| state_sum(t, x), || groupoid_integral(t, x));
    let (a, b) = (a?, b?);
    if a != b {
        return Err(EngineError::OrbifoldMismatch { state_sum: a, integral: b });
    }
    Ok(a.simplified())
}

/// Anything with closed-manifold values. Values on disconnected complexes are
/// products over components.
pub trait Theory: Send + Sync {
    fn dimension(&self) -> usize;
    fn evaluate_connected(&self, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError>;

    fn evaluate(&self, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
        if x.dim() != self.dimension() {
            return Err(EngineError::Dimension { theory: self.dimension(), complex: x.dim() });
        }
        x.components().iter().try_fold(CyclotomicSum::one(), |acc, part| Ok(&acc * &self.evaluate_connected(part)?))
    }
}

impl Theory for TheorySpec {
    fn dimension(&self) -> usize {
        TheorySpec::dimension(self)
    }

    fn evaluate_connected(&self, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
        dw_partition(self, x)
    }
}

/// Product of `dw_partition` over connected components; `1` on the empty complex.
pub fn theory_value_multiplicative(t: &TheorySpec, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
    t.evaluate(x)
}

/// Summands add on connected inputs.
pub struct DirectSum {
    dimension: usize,
    summands: Vec<Box<dyn Theory>>,
}

impl DirectSum {
    pub fn new(summands: Vec<Box<dyn Theory>>) -> Result<Self, EngineError> {
        let Some(first) = summands.first() else {
            return Err(EngineError::Unsupported("empty direct sum".into()));
        };
        let dimension = first.dimension();
        if let Some(other) = summands.iter().find(|t| t.dimension() != dimension) {
            return Err(EngineError::Dimension { theory: dimension, complex: other.dimension() });
        }
        Ok(DirectSum { dimension, summands })
    }
}

impl Theory for DirectSum {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate_connected(&self, x: &DeltaComplex) -> Result<CyclotomicSum, EngineError> {
        self.summands.iter().try_fold(CyclotomicSum::zero(), |acc, t| Ok(&acc + &t.evaluate_connected(x)?))
    }
}

pub fn direct_sum(summands: Vec<Box<dyn Theory>>) -> Result<DirectSum, EngineError> {
    DirectSum::new(summands)
}

#[derive(Clone, Debug)]
pub struct ReducedEntry {
    pub representative: GroupElement,
    pub centralizer: Arc<FiniteGroup>,
    pub theory: TheorySpec,
}

/// One theory per conjugacy class: `(C(g), τ_g ω)`.
#[derive(Clone, Debug)]
pub struct ReducedFamily {
    pub entries: Vec<ReducedEntry>,
}

pub fn reduce_circle(t: &TheorySpec) -> Result<ReducedFamily, EngineError> {
    if t.dimension() < 2 {
        return Err(CochainError::Degree { min: 2, got: t.dimension() }.into());
    }
    let g = t.group();
    let entries = g
        .conjugacy_classes()
        .into_iter()
        .map(|class| {
            let g = class.representative;
            let beta = transgress(&t.cocycle, g)?;
            let centralizer = beta.group().clone();
            let theory = TheorySpec::new(beta, format!("{} reduced at {g}", t.label))?;
            Ok(ReducedEntry { representative: g, centralizer, theory })
        })
        .collect::<Result<_, EngineError>>()?;
    Ok(ReducedFamily { entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ClassLabel {
    Element(GroupElement),
    Coloring(Vec<u32>),
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassValue {
    pub rep: ClassLabel,
    pub centralizer_order: usize,
    pub value: CyclotomicSum,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub lhs: CyclotomicSum,
    pub rhs: CyclotomicSum,
    pub equal: bool,
    pub per_class: Vec<ClassValue>,
}

impl DecompositionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// `Z(X × S¹)` against `Σ_{[g]} Z_{C(g), τ_g ω}(X)`.
pub fn verify_decomposition_circle(t: &TheorySpec, base: &DeltaComplex) -> Result<DecompositionReport, EngineError> {
    if base.dim() + 1 != t.dimension() {
        return Err(EngineError::Dimension { theory: t.dimension(), complex: base.dim() + 1 });
    }
    let lhs = dw_partition(t, &product_with_circle(base)?)?;
    let per_class = reduce_circle(t)?
        .entries
        .into_iter()
        .map(|entry| {
            Ok(ClassValue {
                rep: ClassLabel::Element(entry.representative),
                centralizer_order: entry.centralizer.order(),
                value: dw_partition(&entry.theory, base)?,
            })
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(report(lhs, per_class))
}

fn report(lhs: CyclotomicSum, per_class: Vec<ClassValue>) -> DecompositionReport {
    let rhs = per_class.iter().map(|c| c.value.clone()).sum::<CyclotomicSum>().simplified();
    DecompositionReport { equal: lhs == rhs, lhs, rhs, per_class }
}

/// Disjoint union of the given complexes (all of one dimension).
fn union_all(parts: &[DeltaComplex], dim: usize) -> Result<DeltaComplex, EngineError> {
    let mut acc = DeltaComplex::empty(dim);
    for p in parts {
        acc = DeltaComplex::disjoint_union(&acc, p)?;
    }
    Ok(acc)
}

/// Untwisted `Z_G(X × T)` against `Σ_{[P] ∈ π₀ PBun_G(T)} Z_{Aut(P)}(X)`.
///
/// `X × T` is built with the circle product, so one of the two factors must
/// be a union of circles.
pub fn verify_decomposition_general(
    g: &Arc<FiniteGroup>,
    base: &DeltaComplex,
    t_complex: &DeltaComplex,
) -> Result<DecompositionReport, EngineError> {
    let dim = base.dim() + t_complex.dim();
    let product = if t_complex.dim() == 1 {
        let parts: Vec<_> = t_complex.components().iter().map(|_| product_with_circle(base)).collect::<Result<_, _>>()?;
        union_all(&parts, dim)?
    } else if base.dim() == 1 {
        let parts: Vec<_> = base.components().iter().map(|_| product_with_circle(t_complex)).collect::<Result<_, _>>()?;
        union_all(&parts, dim)?
    } else {
        return Err(EngineError::Unsupported("one factor must be a union of circles".into()));
    };
    let lhs = dw_partition(&TheorySpec::untwisted(g.clone(), dim), &product)?;
    let bundles = bundle_groupoid(&Arc::new(t_complex.clone()), g);
    let per_class = bundles
        .pi0()
        .into_iter()
        .map(|class| {
            let aut = bundles.automorphism_group(&class.representative)?;
            let value = dw_partition(&TheorySpec::untwisted(aut.group.clone(), base.dim()), base)?;
            Ok(ClassValue {
                rep: ClassLabel::Coloring(class.representative.key),
                centralizer_order: aut.order(),
                value,
            })
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(report(lhs, per_class))
}

/// As [`verify_decomposition_general`], rejecting twisted theories up front.
pub fn verify_decomposition_general_for(
    t: &TheorySpec,
    base: &DeltaComplex,
    t_complex: &DeltaComplex,
) -> Result<DecompositionReport, EngineError> {
    if !t.cocycle.is_zero() {
        return Err(EngineError::Twisted);
    }
    if base.dim() + t_complex.dim() != t.dimension() {
        return Err(EngineError::Dimension { theory: t.dimension(), complex: base.dim() + t_complex.dim() });
    }
    verify_decomposition_general(t.group(), base, t_complex)
}

/// Number of `β`-regular conjugacy classes: `h` with `β(h,k) = β(k,h)` for
/// every `k` commuting with `h`.
pub fn regular_class_count(beta: &Cochain) -> usize {
    assert_eq!(beta.degree(), 2, "regularity is defined for 2-cocycles");
    let g = beta.group();
    g.conjugacy_classes()
        .iter()
        .filter(|class| {
            let h = class.representative;
            g.elements().filter(|&k| g.commutes(h, k)).all(|k| beta.eval(&[h, k]) == beta.eval(&[k, h]))
        })
        .count()
}

/// `Σ_{[g]}` of the `τ_g ω`-regular class counts of `C(g)`.
pub fn count_simples(t: &TheorySpec) -> Result<u64, EngineError> {
    if t.dimension() != 3 {
        return Err(CochainError::Degree { min: 3, got: t.dimension() }.into());
    }
    let family = reduce_circle(t)?;
    Ok(family.entries.iter().map(|e| regular_class_count(e.theory.cocycle()) as u64).sum())
}
