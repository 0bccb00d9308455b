//! Built-in groups and cocycles used by the CLI and the test grids.

use std::sync::Arc;

use crate::cochain::{coboundary, cyclic_cocycle, restrict, transgress, zero_cochain, Cochain};
use crate::engine::TheorySpec;
use crate::group::{builtin_group, homomorphisms, make_cyclic, FiniteGroup, GroupHom};
use crate::phase::Phase;

pub const GROUP_NAMES: [&str; 11] = ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z6", "S3", "D4", "Q8", "Z2xZ2xZ2", "S4"];

pub fn group(name: &str) -> Arc<FiniteGroup> {
    Arc::new(builtin_group(name).expect("catalog names are valid"))
}

pub fn groups() -> Vec<Arc<FiniteGroup>> {
    GROUP_NAMES.iter().map(|n| group(n)).collect()
}

/// The first surjection onto `Z2`, if any.
pub fn sign_character(g: &Arc<FiniteGroup>, z2: &Arc<FiniteGroup>) -> Option<GroupHom> {
    homomorphisms(g, z2).into_iter().find(|h| h.images().iter().any(|&x| x != z2.identity()))
}

/// Coordinate `i` of an element of `Z2^r`, indexed as `Σ x_i 2^{r−1−i}`.
fn bit(x: usize, i: usize, rank: usize) -> i64 {
    ((x >> (rank - 1 - i)) & 1) as i64
}

fn spec(c: Cochain, label: impl Into<String>) -> TheorySpec {
    TheorySpec::new(c, label).expect("catalog cochains are cocycles")
}

/// Degree-3 theories: every group untwisted, the cyclic family, pullbacks of
/// the `Z2` class and the type-III class on `Z2^3`.
pub fn theories3() -> Vec<TheorySpec> {
    let mut out: Vec<TheorySpec> = groups().into_iter().map(|g| TheorySpec::untwisted(g, 3)).collect();
    for (k, p) in [(2, 1), (3, 1), (4, 1), (4, 2), (6, 1)] {
        out.push(spec(cyclic_cocycle(k, p).expect("k ≥ 1"), format!("Z{k} cyclic:{k}:{p}")));
    }
    let w = cyclic_cocycle(2, 1).expect("k = 2");
    for name in ["S3", "D4", "Q8", "Z2xZ2"] {
        let g = group(name);
        let h = sign_character(&g, w.group()).expect("has a Z2 quotient");
        out.push(spec(restrict(&w, &h).expect("hom lands in Z2"), format!("{name} inflate:Z2:cyclic:2:1")));
    }
    let z2c = group("Z2xZ2xZ2");
    let type3 = Cochain::from_fn(z2c.clone(), 3, |a| Phase::new(bit(a[0], 0, 3) * bit(a[1], 1, 3) * bit(a[2], 2, 3), 2))
        .expect("normalized");
    out.push(spec(type3, "Z2xZ2xZ2 type-III"));
    out
}

/// Degree-2 theories on groups of order at most 4.
pub fn theories2() -> Vec<TheorySpec> {
    let mut out: Vec<TheorySpec> =
        ["Z2", "Z3", "Z4", "Z2xZ2"].iter().map(|n| TheorySpec::untwisted(group(n), 2)).collect();
    let klein = group("Z2xZ2");
    let torsion = Cochain::from_fn(klein, 2, |a| Phase::new(bit(a[0], 0, 2) * bit(a[1], 1, 2), 2)).expect("normalized");
    out.push(spec(torsion, "Z2xZ2 discrete-torsion"));
    let z4 = Arc::new(make_cyclic(4).expect("k = 4"));
    let f = Cochain::from_fn(z4, 1, |a| Phase::new(a[0] as i64, 8)).expect("normalized");
    out.push(spec(coboundary(&f), "Z4 coboundary"));
    let tau = transgress(&cyclic_cocycle(4, 1).expect("k = 4"), 1).expect("degree 3");
    out.push(spec(tau, "Z4 transgressed cyclic:4:1 at 1"));
    out
}

/// A zero cochain, for callers building their own specs.
pub fn trivial(g: &Arc<FiniteGroup>, degree: usize) -> Cochain {
    zero_cochain(g.clone(), degree).expect("every degree has a zero cochain")
}
