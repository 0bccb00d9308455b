//! The built-in verification grid behind `dwtft suite`.

use std::sync::Arc;

use anyhow::Result;
use dwtft::bundles::{bundle_groupoid, enumerate_flat_colorings, GaugeTransformation};
use dwtft::catalog::{self, group};
use dwtft::cochain::{cyclic_cocycle, is_cocycle, transgress};
use dwtft::complex::{circle, product_with_circle, sphere2, surface, torus_grid, DeltaComplex};
use dwtft::cyclotomic::CyclotomicSum;
use dwtft::engine::{
    count_simples, direct_sum, dw_partition, evaluate_primitive, groupoid_integral, reduce_circle, state_sum,
    theory_value_multiplicative, verify_decomposition_circle, verify_decomposition_general, Theory, TheorySpec,
};
use dwtft::group::FiniteGroup;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Row {
    pub criterion: u8,
    pub case: String,
    pub passed: bool,
    pub detail: String,
}

pub struct Grid {
    pub max_order: usize,
    pub seed: u64,
}

fn row(criterion: u8, case: impl Into<String>, check: Result<(bool, String)>) -> Row {
    let (passed, detail) = check.unwrap_or_else(|e| (false, format!("error: {e:#}")));
    Row { criterion, case: case.into(), passed, detail }
}

fn commuting_pairs(g: &FiniteGroup) -> u64 {
    g.elements().map(|a| g.elements().filter(|&b| g.commutes(a, b)).count() as u64).sum()
}

impl Grid {
    fn small(&self, g: &FiniteGroup) -> bool {
        g.order() <= self.max_order
    }

    pub fn run(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        let t3 = product_with_circle(&surface(1)).expect("torus is closed");

        for name in ["Z2", "Z3", "Z4", "S3", "D4", "Q8"] {
            let g = group(name);
            if !self.small(&g) {
                continue;
            }
            for h in [1, 2] {
                let t = TheorySpec::untwisted(g.clone(), 3);
                rows.push(row(1, format!("{name} genus {h}"), (|| {
                    let r = verify_decomposition_circle(&t, &surface(h))?;
                    Ok((r.equal, format!("{} = {}", r.lhs, r.rhs)))
                })()));
            }
        }

        for (k, p) in [(2, 1), (3, 1), (4, 1), (4, 2)] {
            if k > self.max_order {
                continue;
            }
            for h in [1, 2] {
                rows.push(row(2, format!("cyclic:{k}:{p} genus {h}"), (|| {
                    let t = TheorySpec::new(cyclic_cocycle(k, p)?, "")?;
                    let r = verify_decomposition_circle(&t, &surface(h))?;
                    Ok((r.equal, format!("{} = {}", r.lhs, r.rhs)))
                })()));
            }
        }

        let mut orbifold: Vec<(TheorySpec, DeltaComplex)> = Vec::new();
        orbifold.extend(catalog::theories3().into_iter().map(|t| (t, t3.clone())));
        for t in catalog::theories2() {
            for x in [surface(1), surface(2), sphere2(), torus_grid(2, 2)] {
                orbifold.push((t.clone(), x));
            }
        }
        for (t, x) in orbifold.iter().filter(|(t, _)| self.small(t.group())) {
            rows.push(row(3, format!("{} on {}-complex with {} top simplices", t.label(), x.dim(), x.top_count()), (|| {
                let (a, b) = (state_sum(t, x)?, groupoid_integral(t, x)?);
                Ok((a == b, format!("{a} vs {b}")))
            })()));
        }

        for g in catalog::groups().into_iter().filter(|g| self.small(g)) {
            for m in [1, 3] {
                rows.push(row(4, format!("{} circle:{m}", g.name()), (|| {
                    let bg = bundle_groupoid(&Arc::new(circle(m)), &g);
                    let card = bg.cardinality();
                    let classes = bg.pi0().len() == g.conjugacy_classes().len();
                    Ok((classes && card == BigRational::from_integer(1.into()), format!("cardinality {card}")))
                })()));
            }
        }

        for t in catalog::theories3().into_iter().chain(catalog::theories2()).filter(|t| self.small(t.group())) {
            rows.push(row(5, t.label().to_string(), (|| {
                for g in t.group().elements() {
                    if !is_cocycle(&transgress(t.cocycle(), g)?) {
                        return Ok((false, format!("fails at {g}")));
                    }
                }
                Ok((true, format!("{} elements", t.group().order())))
            })()));
        }

        if self.max_order >= 6 {
            rows.push(row(6, "S3 genus 2", (|| {
                let z = dw_partition(&TheorySpec::untwisted(group("S3"), 2), &surface(2))?;
                Ok((z == CyclotomicSum::from_integer(81), format!("{z}")))
            })()));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for t in catalog::theories2().into_iter().filter(|t| self.small(t.group())) {
            rows.push(row(7, format!("{} triangulations", t.label()), (|| {
                let a = dw_partition(&t, &surface(1))?;
                let b = dw_partition(&t, &torus_grid(2, 2))?;
                let c = dw_partition(&t, &torus_grid(3, 3))?;
                Ok((a == b && b == c, format!("{a}, {b}, {c}")))
            })()));
            rows.push(row(7, format!("{} gauges", t.label()), (|| {
                let x = Arc::new(torus_grid(2, 2));
                let g = t.group();
                let all = enumerate_flat_colorings(&x, g);
                for _ in 0..100 {
                    let c = &all[rng.gen_range(0..all.len())];
                    let lambda = GaugeTransformation::new((0..x.vertex_count()).map(|_| rng.gen_range(0..g.order())).collect());
                    if evaluate_primitive(&t, c)? != evaluate_primitive(&t, &lambda.apply(c)?)? {
                        return Ok((false, format!("gauge {:?} changes the phase", lambda.values())));
                    }
                }
                Ok((true, "100 random gauges".into()))
            })()));
        }

        rows.push(row(8, "Z2, T = S1 + S1, base S1", (|| {
            let z2 = group("Z2");
            let two = DeltaComplex::disjoint_union(&circle(1), &circle(1))?;
            let r = verify_decomposition_general(&z2, &circle(1), &two)?;
            let family = reduce_circle(&TheorySpec::untwisted(z2.clone(), 2))?;
            let summands: Vec<Box<dyn Theory>> = family.entries.into_iter().map(|e| Box::new(e.theory) as Box<dyn Theory>).collect();
            let composed = direct_sum(summands)?.evaluate(&two)?;
            Ok((r.equal && composed == r.lhs, format!("{} = {} = {composed}", r.lhs, r.rhs)))
        })()));
        rows.push(row(8, "Z2 multiplicative over torus + torus", (|| {
            let t = TheorySpec::untwisted(group("Z2"), 2);
            let x = DeltaComplex::disjoint_union(&surface(1), &surface(1))?;
            let z = theory_value_multiplicative(&t, &x)?;
            let expected = commuting_pairs(&group("Z2")) / 2;
            Ok((z == CyclotomicSum::from_integer((expected * expected) as i64), format!("{z}")))
        })()));

        for t in catalog::theories3().into_iter().filter(|t| self.small(t.group())) {
            rows.push(row(9, t.label().to_string(), (|| {
                let n = count_simples(&t)?;
                let z = state_sum(&t, &t3)?;
                Ok((z == CyclotomicSum::from_integer(n as i64), format!("{n} simples, Z(T^3) = {z}")))
            })()));
        }
        rows
    }
}
