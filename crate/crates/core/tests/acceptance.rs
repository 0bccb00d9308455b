//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::sync::Arc;
use std::time::Instant;

use dwtft::bundles::{bundle_groupoid, enumerate_flat_colorings, GaugeTransformation};
use dwtft::catalog::{self, group};
use dwtft::cochain::{cyclic_cocycle, transgress, Cochain};
use dwtft::complex::{circle, product_with_circle, sphere2, surface, torus_grid, DeltaComplex};
use dwtft::cyclotomic::CyclotomicSum;
use dwtft::engine::{
    count_simples, direct_sum, dw_partition, evaluate_primitive, groupoid_integral, reduce_circle, state_sum,
    theory_value_multiplicative, verify_decomposition_circle, verify_decomposition_general, Theory, TheorySpec,
};
use dwtft::group::FiniteGroup;
use dwtft::groupoid::{EFGroupoid, GroupoidFunction};
use dwtft::phase::Phase;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;
const TOLERANCE: f64 = 1e-9;

type Outcome = Result<String, String>;

fn int(n: i64) -> CyclotomicSum {
    CyclotomicSum::from_integer(n)
}

fn rational(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: &CyclotomicSum, b: &CyclotomicSum) -> bool {
    let ((ar, ai), (br, bi)) = (a.to_complex(), b.to_complex());
    (ar - br).abs() < TOLERANCE && (ai - bi).abs() < TOLERANCE
}

// ---- independent oracles -------------------------------------------------

/// `#{(a, b, c) pairwise commuting}`.
fn commuting_triples(g: &FiniteGroup) -> u64 {
    let mut n = 0;
    for a in g.elements() {
        for b in g.elements().filter(|&b| g.commutes(a, b)) {
            n += g.elements().filter(|&c| g.commutes(a, c) && g.commutes(b, c)).count() as u64;
        }
    }
    n
}

/// `|Hom(π₁(Σ₂ × S¹), G)|`: a central `z` with `[a1,b1][a2,b2] = e` in `C(z)`.
fn genus_two_circle_homs(g: &FiniteGroup) -> u64 {
    let commutator = |a: usize, b: usize| g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b)));
    let mut total = 0;
    for z in g.elements() {
        let cz: Vec<usize> = g.elements().filter(|&h| g.commutes(h, z)).collect();
        let mut tally = vec![0u64; g.order()];
        for &a in &cz {
            for &b in &cz {
                tally[commutator(a, b)] += 1;
            }
        }
        // [a1,b1][a2,b2] = e  ⇔  [a2,b2] = [a1,b1]⁻¹
        total += (0..g.order()).map(|c| tally[c] * tally[g.inv(c)]).sum::<u64>();
    }
    total
}

fn class_count(g: &FiniteGroup) -> usize {
    let mut seen = vec![false; g.order()];
    let mut n = 0;
    for x in g.elements() {
        if !seen[x] {
            n += 1;
            for h in g.elements() {
                seen[g.mul(g.mul(g.inv(h), x), h)] = true;
            }
        }
    }
    n
}

/// Vertex-ordered edge `(i−1, i)` of a top simplex, by deleting the other
/// vertices from the highest position down.
fn consecutive_edge(x: &DeltaComplex, top: usize, i: usize) -> usize {
    let n = x.dim();
    let mut s = top;
    let mut level = n;
    for pos in (0..=n).rev() {
        if pos != i && pos + 1 != i {
            s = x.faces_of(level, s)[pos];
            level -= 1;
        }
    }
    s
}

/// `Σ_c exp(2πi Σ ε ω(...)) / |G|^V` over all `|G|^E` edge labelings.
fn naive_state_sum(x: &DeltaComplex, omega: &Cochain) -> CyclotomicSum {
    let g = omega.group();
    let n = g.order();
    let edges = x.edge_count();
    let conductor = omega.conductor();
    let mut counts = vec![0u64; conductor as usize];
    let mut colors = vec![0usize; edges];
    let paths: Vec<Vec<usize>> = (0..x.top_count()).map(|t| (1..=x.dim()).map(|i| consecutive_edge(x, t, i)).collect()).collect();
    let total = n.pow(edges as u32);
    for code in 0..total {
        let mut c = code;
        for slot in colors.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let flat = (0..x.count(2)).all(|t| {
            let f = x.faces_of(2, t);
            g.mul(colors[f[2]], colors[f[0]]) == colors[f[1]]
        });
        if !flat {
            continue;
        }
        let mut phase = Phase::ZERO;
        for (t, path) in paths.iter().enumerate() {
            let args: Vec<usize> = path.iter().map(|&e| colors[e]).collect();
            let v = omega.eval(&args);
            phase = if x.signs()[t] > 0 { phase + v } else { phase - v };
        }
        counts[phase.exponent(conductor) as usize] += 1;
    }
    let volume = BigRational::from_integer(BigInt::from(n).pow(x.vertex_count() as u32));
    CyclotomicSum::from_exponent_counts(conductor, &counts).scale(&volume.recip())
}

/// Exhaustive `δβ = 0`, written out from the bar differential.
fn coboundary_vanishes(c: &Cochain) -> bool {
    let g = c.group();
    let d = c.degree();
    let n = g.order();
    let mut args = vec![0usize; d + 1];
    for code in 0..n.pow(d as u32 + 1) {
        let mut k = code;
        for slot in args.iter_mut() {
            *slot = k % n;
            k /= n;
        }
        let mut total = c.eval(&args[1..]);
        for i in 1..=d {
            let mut merged: Vec<usize> = args[..i - 1].to_vec();
            merged.push(g.mul(args[i - 1], args[i]));
            merged.extend_from_slice(&args[i + 1..]);
            let v = c.eval(&merged);
            total = if i % 2 == 0 { total + v } else { total - v };
        }
        let last = c.eval(&args[..d]);
        total = if (d + 1) % 2 == 0 { total + last } else { total - last };
        if !total.is_zero() {
            return false;
        }
    }
    true
}

// ---- criteria --------------------------------------------------------------

fn untwisted_decomposition() -> Outcome {
    let mut notes = Vec::new();
    for name in ["Z2", "Z3", "Z4", "S3", "D4", "Q8"] {
        let g = group(name);
        let t = TheorySpec::untwisted(g.clone(), 3);
        for h in [1, 2] {
            let start = Instant::now();
            let r = verify_decomposition_circle(&t, &surface(h)).map_err(|e| e.to_string())?;
            let secs = start.elapsed().as_secs_f64();
            ensure(r.equal, || format!("{name} genus {h}: {} != {}", r.lhs, r.rhs))?;
            let homs = if h == 1 { commuting_triples(&g) } else { genus_two_circle_homs(&g) };
            let oracle = CyclotomicSum::from_rational(rational(homs, g.order() as u64));
            ensure(r.lhs == oracle, || format!("{name} genus {h}: lhs {} vs oracle {oracle}", r.lhs))?;
            ensure(secs < 60.0, || format!("{name} genus {h} took {secs:.1}s"))?;
            notes.push(format!("{name}/{h}={}", r.lhs));
        }
    }
    let s3 = verify_decomposition_circle(&TheorySpec::untwisted(group("S3"), 3), &surface(1)).map_err(|e| e.to_string())?;
    let mut parts: Vec<String> = s3.per_class.iter().map(|c| c.value.to_string()).collect();
    parts.sort();
    ensure(s3.lhs == int(8) && parts == ["2", "3", "3"], || format!("S3 spot value {} = {parts:?}", s3.lhs))?;
    let z2 = verify_decomposition_circle(&TheorySpec::untwisted(group("Z2"), 3), &surface(1)).map_err(|e| e.to_string())?;
    ensure(z2.lhs == int(4), || format!("Z2 spot value {}", z2.lhs))?;
    Ok(notes.join(" "))
}

fn twisted_decomposition() -> Outcome {
    let mut notes = Vec::new();
    for (k, p) in [(2, 1), (3, 1), (4, 1), (4, 2)] {
        let omega = cyclic_cocycle(k, p).map_err(|e| e.to_string())?;
        let t = TheorySpec::new(omega.clone(), format!("cyclic:{k}:{p}")).map_err(|e| e.to_string())?;
        for h in [1, 2] {
            let r = verify_decomposition_circle(&t, &surface(h)).map_err(|e| e.to_string())?;
            ensure(r.equal, || format!("({k},{p}) genus {h}: {} != {}", r.lhs, r.rhs))?;
            if h == 1 {
                let naive = naive_state_sum(&product_with_circle(&surface(1)).unwrap(), &omega);
                ensure(naive == r.lhs && close(&naive, &r.lhs), || format!("({k},{p}): naive {naive} vs {}", r.lhs))?;
            }
            notes.push(format!("({k},{p})/{h}={}", r.lhs));
        }
    }
    Ok(notes.join(" "))
}

fn orbifold_identity() -> Outcome {
    let mut cases: Vec<(TheorySpec, DeltaComplex)> = Vec::new();
    let t3 = product_with_circle(&surface(1)).unwrap();
    for t in catalog::theories3() {
        cases.push((t, t3.clone()));
    }
    for t in catalog::theories2() {
        for x in [surface(1), surface(2), sphere2(), torus_grid(2, 2)] {
            cases.push((t.clone(), x));
        }
    }
    for name in ["S3", "Q8"] {
        cases.push((TheorySpec::untwisted(group(name), 1), circle(3)));
        cases.push((TheorySpec::untwisted(group(name), 2), surface(2)));
    }
    for (t, x) in &cases {
        let a = state_sum(t, x).map_err(|e| e.to_string())?;
        let b = groupoid_integral(t, x).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{}: state sum {a} vs integral {b}", t.label()))?;
    }
    Ok(format!("{} cases", cases.len()))
}

fn loop_groupoid_cardinality() -> Outcome {
    for g in catalog::groups() {
        for m in [1, 3] {
            let bg = bundle_groupoid(&Arc::new(circle(m)), &g);
            ensure(bg.cardinality() == rational(1, 1), || format!("{} m={m}: {}", g.name(), bg.cardinality()))?;
            let pi0 = bg.pi0();
            ensure(pi0.len() == class_count(&g), || format!("{} m={m}: {} classes", g.name(), pi0.len()))?;
            let mut auts: Vec<usize> = pi0.iter().map(|c| bg.automorphism_group(&c.representative).unwrap().order()).collect();
            let mut cents: Vec<usize> = g
                .conjugacy_classes()
                .iter()
                .map(|c| g.elements().filter(|&h| g.commutes(h, c.representative)).count())
                .collect();
            auts.sort_unstable();
            cents.sort_unstable();
            ensure(auts == cents, || format!("{} m={m}: Aut orders {auts:?} vs centralizers {cents:?}", g.name()))?;
        }
    }
    Ok(format!("{} groups, m = 1, 3", catalog::groups().len()))
}

fn transgression_cocycles() -> Outcome {
    let mut checked = 0;
    for t in catalog::theories3().into_iter().chain(catalog::theories2()) {
        for g in t.group().elements() {
            let tau = transgress(t.cocycle(), g).map_err(|e| e.to_string())?;
            ensure(coboundary_vanishes(&tau), || format!("{} at {g}", t.label()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} transgressions"))
}

fn mednykh() -> Outcome {
    let s3 = group("S3");
    // irreducible degrees of S3 (1, 1, 2): Σ d² = |G|, one per class
    let degrees = [1u64, 1, 2];
    assert_eq!(degrees.iter().map(|d| d * d).sum::<u64>(), 6);
    assert_eq!(degrees.len(), class_count(&s3));
    let oracle: u64 = degrees.iter().map(|d| (6 / d).pow(2)).sum();
    let z = dw_partition(&TheorySpec::untwisted(s3, 2), &surface(2)).map_err(|e| e.to_string())?;
    ensure(oracle == 81 && z == int(81), || format!("Z = {z}, oracle {oracle}"))?;
    Ok(format!("Z = {z} = 36+36+9"))
}

fn triangulation_and_gauge() -> Outcome {
    for t in catalog::theories2() {
        let reference = dw_partition(&t, &surface(1)).map_err(|e| e.to_string())?;
        for (p, q) in [(2, 2), (3, 3)] {
            let z = dw_partition(&t, &torus_grid(p, q)).map_err(|e| e.to_string())?;
            ensure(z == reference, || format!("{}: grid {p}x{q} gives {z}, surface(1) gives {reference}", t.label()))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut cases: Vec<(TheorySpec, DeltaComplex)> =
        catalog::theories2().into_iter().map(|t| (t, torus_grid(2, 2))).collect();
    let t3 = product_with_circle(&torus_grid(1, 2)).unwrap();
    cases.extend(catalog::theories3().into_iter().filter(|t| t.group().order() <= 8).map(|t| (t, t3.clone())));
    for (t, x) in &cases {
        let x = Arc::new(x.clone());
        let all = enumerate_flat_colorings(&x, t.group());
        let g = t.group();
        for _ in 0..100 {
            let c = &all[rng.gen_range(0..all.len())];
            let lambda = GaugeTransformation::new((0..x.vertex_count()).map(|_| rng.gen_range(0..g.order())).collect());
            let before = evaluate_primitive(t, c).map_err(|e| e.to_string())?;
            let after = evaluate_primitive(t, &lambda.apply(c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(before == after, || format!("{}: {before} -> {after} under {:?}", t.label(), lambda.values()))?;
        }
    }
    Ok(format!("{} twists x 2 grids; 100 gauges x {} cases", catalog::theories2().len(), cases.len()))
}

fn unions_and_sums() -> Outcome {
    // integration is additive over disjoint unions
    let a = bundle_groupoid(&Arc::new(surface(1)), &group("S3"));
    let b = EFGroupoid::loop_groupoid(group("D4"));
    let u = EFGroupoid::disjoint_union(&a, &b);
    let weight = |o: &dwtft::groupoid::Object| BigRational::from_integer(BigInt::from(o.block as i64 + 2));
    let whole = u.integrate(&GroupoidFunction::new(&u, weight)).map_err(|e| e.to_string())?;
    let left = a.integrate(&GroupoidFunction::new(&a, |_| rational(2, 1))).map_err(|e| e.to_string())?;
    let right = b.integrate(&GroupoidFunction::new(&b, |_| rational(3, 1))).map_err(|e| e.to_string())?;
    ensure(whole == &left + &right, || format!("{whole} vs {left} + {right}"))?;

    // values multiply over components, and agree with the direct computation
    for t in catalog::theories2() {
        let x = DeltaComplex::disjoint_union(&surface(1), &DeltaComplex::disjoint_union(&sphere2(), &surface(1)).unwrap()).unwrap();
        let product = theory_value_multiplicative(&t, &x).map_err(|e| e.to_string())?;
        let direct = dw_partition(&t, &x).map_err(|e| e.to_string())?;
        let torus = dw_partition(&t, &surface(1)).map_err(|e| e.to_string())?;
        let sphere = dw_partition(&t, &sphere2()).map_err(|e| e.to_string())?;
        let expected = &(&torus * &torus) * &sphere;
        ensure(product == direct && direct == expected, || format!("{}: {product}, {direct}, {expected}", t.label()))?;
    }

    // general decomposition over T = S¹ ⊔ S¹
    let z2 = group("Z2");
    let two = DeltaComplex::disjoint_union(&circle(1), &circle(1)).unwrap();
    let r = verify_decomposition_general(&z2, &circle(1), &two).map_err(|e| e.to_string())?;
    ensure(r.equal, || format!("S¹ ⊔ S¹: {} != {}", r.lhs, r.rhs))?;
    let family = reduce_circle(&TheorySpec::untwisted(z2, 2)).map_err(|e| e.to_string())?;
    let summands: Vec<Box<dyn Theory>> = family.entries.into_iter().map(|e| Box::new(e.theory) as Box<dyn Theory>).collect();
    let composed = direct_sum(summands).map_err(|e| e.to_string())?.evaluate(&two).map_err(|e| e.to_string())?;
    ensure(composed == r.lhs && r.lhs == int(4), || format!("direct sum {composed}, lhs {}", r.lhs))?;
    Ok(format!("S¹ ⊔ S¹: {} = {}", r.lhs, r.rhs))
}

fn simple_counts() -> Outcome {
    let t3 = product_with_circle(&surface(1)).unwrap();
    let mut notes = Vec::new();
    for t in catalog::theories3() {
        let count = count_simples(&t).map_err(|e| e.to_string())?;
        let z = state_sum(&t, &t3).map_err(|e| e.to_string())?;
        ensure(z == int(count as i64), || format!("{}: {count} simples, Z(T³) = {z}", t.label()))?;
        if t.cocycle().is_zero() {
            let oracle = commuting_triples(t.group()) / t.group().order() as u64;
            ensure(count == oracle, || format!("{}: {count} vs commuting-triple oracle {oracle}", t.label()))?;
        }
        notes.push(format!("{}={count}", t.label()));
    }
    let z2 = count_simples(&TheorySpec::untwisted(group("Z2"), 3)).map_err(|e| e.to_string())?;
    let w = TheorySpec::new(cyclic_cocycle(2, 1).unwrap(), "w").unwrap();
    let z2w = count_simples(&w).map_err(|e| e.to_string())?;
    ensure(z2 == 4 && z2w == 4, || format!("Z2: {z2} untwisted, {z2w} twisted"))?;
    Ok(notes.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("untwisted circle decomposition", untwisted_decomposition),
        ("twisted circle decomposition", twisted_decomposition),
        ("state sum equals groupoid integral", orbifold_identity),
        ("loop groupoid cardinality", loop_groupoid_cardinality),
        ("transgressions are cocycles", transgression_cocycles),
        ("Mednykh count for S3 genus 2", mednykh),
        ("triangulation and gauge invariance", triangulation_and_gauge),
        ("disjoint unions and direct sums", unions_and_sums),
        ("simple-object count equals Z(T^3)", simple_counts),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
