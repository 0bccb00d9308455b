//! Flat G-colorings of Δ-complexes, gauge transformations, and the bundle
//! groupoid whose objects are the colorings and whose morphisms are gauges.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::DeltaComplex;
use crate::group::{ConjugacyClass, FiniteGroup, GroupElement, MAX_ORDER};
use crate::groupoid::{Automorphisms, EFGroupoid, GroupoidBlock, GroupoidError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BundleError {
    #[error("expected {expected} entries, got {got}")]
    Length { expected: usize, got: usize },
    #[error("entry {index} = {value} is not an element of a group of order {order}")]
    NotAnElement { index: usize, value: usize, order: usize },
    #[error("coloring is not flat on triangle {0}")]
    NotFlat(usize),
    #[error("edge path is not closed: step {step} leaves from vertex {found}, expected {expected}")]
    OpenPath { step: usize, expected: usize, found: usize },
    #[error("edge {0} out of range")]
    NoSuchEdge(usize),
    #[error("empty loop")]
    EmptyLoop,
}

/// An assignment of group elements to the edges of a complex, flat on every
/// triangle: `c(01)·c(12) = c(02)`.
#[derive(Clone, PartialEq, Eq)]
pub struct FlatColoring {
    complex: Arc<DeltaComplex>,
    group: Arc<FiniteGroup>,
    colors: Vec<GroupElement>,
}

impl fmt::Debug for FlatColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlatColoring({:?})", self.colors)
    }
}

fn is_flat_on(x: &DeltaComplex, g: &FiniteGroup, colors: &[u32], t: usize) -> bool {
    let f = x.faces_of(2, t);
    let c = |e: usize| colors[e] as usize;
    g.mul(c(f[2]), c(f[0])) == c(f[1])
}

impl FlatColoring {
    pub fn new(
        complex: Arc<DeltaComplex>,
        group: Arc<FiniteGroup>,
        colors: Vec<GroupElement>,
    ) -> Result<Self, BundleError> {
        if colors.len() != complex.edge_count() {
            return Err(BundleError::Length { expected: complex.edge_count(), got: colors.len() });
        }
        if let Some((index, &value)) = colors.iter().enumerate().find(|(_, &c)| c >= group.order()) {
            return Err(BundleError::NotAnElement { index, value, order: group.order() });
        }
        let packed: Vec<u32> = colors.iter().map(|&c| c as u32).collect();
        if complex.dim() >= 2 {
            if let Some(t) = (0..complex.count(2)).find(|&t| !is_flat_on(&complex, &group, &packed, t)) {
                return Err(BundleError::NotFlat(t));
            }
        }
        Ok(FlatColoring { complex, group, colors })
    }

    /// The trivial bundle.
    pub fn trivial(complex: Arc<DeltaComplex>, group: Arc<FiniteGroup>) -> Self {
        let colors = vec![group.identity(); complex.edge_count()];
        FlatColoring { complex, group, colors }
    }

    pub fn complex(&self) -> &Arc<DeltaComplex> {
        &self.complex
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn color(&self, edge: usize) -> GroupElement {
        self.colors[edge]
    }

    pub fn colors(&self) -> &[GroupElement] {
        &self.colors
    }

    pub fn key(&self) -> Vec<u32> {
        self.colors.iter().map(|&c| c as u32).collect()
    }
}

/// A vertex-indexed tuple `λ ∈ G^V`, acting on the right by
/// `c'(e: u → v) = λ(u)⁻¹·c(e)·λ(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeTransformation {
    values: Vec<GroupElement>,
}

impl GaugeTransformation {
    pub fn new(values: Vec<GroupElement>) -> Self {
        GaugeTransformation { values }
    }

    pub fn identity(group: &FiniteGroup, vertices: usize) -> Self {
        GaugeTransformation { values: vec![group.identity(); vertices] }
    }

    /// `g` at one vertex, the identity elsewhere.
    pub fn at_vertex(group: &FiniteGroup, vertices: usize, v: usize, g: GroupElement) -> Self {
        let mut values = vec![group.identity(); vertices];
        values[v] = g;
        GaugeTransformation { values }
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    /// Vertexwise product; `c.gauge(λ).gauge(μ) = c.gauge(λ·μ)`.
    pub fn compose(&self, other: &GaugeTransformation, group: &FiniteGroup) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| group.mul(a, b)).collect();
        GaugeTransformation { values }
    }

    fn act_on(&self, x: &DeltaComplex, g: &FiniteGroup, colors: &[u32]) -> Vec<u32> {
        (0..colors.len())
            .map(|e| {
                let (u, v) = x.edge_endpoints(e);
                g.mul(g.mul(g.inv(self.values[u]), colors[e] as usize), self.values[v]) as u32
            })
            .collect()
    }

    pub fn apply(&self, c: &FlatColoring) -> Result<FlatColoring, BundleError> {
        let v = c.complex.vertex_count();
        if self.values.len() != v {
            return Err(BundleError::Length { expected: v, got: self.values.len() });
        }
        if let Some((index, &value)) = self.values.iter().enumerate().find(|(_, &x)| x >= c.group.order()) {
            return Err(BundleError::NotAnElement { index, value, order: c.group.order() });
        }
        let colors = self.act_on(&c.complex, &c.group, &c.key()).into_iter().map(|x| x as usize).collect();
        Ok(FlatColoring { complex: c.complex.clone(), group: c.group.clone(), colors })
    }
}

/// Conjugacy class of the product of colors along a closed path; each step
/// is an edge and whether it is traversed along its orientation.
pub fn holonomy_class(c: &FlatColoring, path: &[(usize, bool)]) -> Result<ConjugacyClass, BundleError> {
    let x = &c.complex;
    let g = &c.group;
    let Some(&(first, forward)) = path.first() else {
        return Err(BundleError::EmptyLoop);
    };
    if let Some(&(e, _)) = path.iter().find(|(e, _)| *e >= x.edge_count()) {
        return Err(BundleError::NoSuchEdge(e));
    }
    let start = {
        let (s, t) = x.edge_endpoints(first);
        if forward { s } else { t }
    };
    let mut at = start;
    let mut product = g.identity();
    for (step, &(e, forward)) in path.iter().enumerate() {
        let (s, t) = x.edge_endpoints(e);
        let (from, to) = if forward { (s, t) } else { (t, s) };
        if from != at {
            return Err(BundleError::OpenPath { step, expected: at, found: from });
        }
        let color = if forward { c.colors[e] } else { g.inv(c.colors[e]) };
        product = g.mul(product, color);
        at = to;
    }
    if at != start {
        return Err(BundleError::OpenPath { step: path.len(), expected: start, found: at });
    }
    let classes = g.conjugacy_classes();
    let index = g.class_index(&classes, product);
    Ok(classes.into_iter().nth(index).expect("class index in range"))
}

#[derive(Clone, Copy, Debug)]
enum Rule {
    /// `c(a)·c(b)`
    Product,
    /// `c(a)⁻¹·c(b)`
    LeftQuotient,
    /// `c(a)·c(b)⁻¹`
    RightQuotient,
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Branch(usize),
    Fixed(usize, u32),
    Force { edge: usize, rule: Rule, a: usize, b: usize },
    Check(usize),
}

/// A static backtracking plan: edges determined by an already-known pair of
/// triangle edges are computed, only the rest are branched on.
#[derive(Clone, Debug)]
pub struct ColoringSearch {
    complex: Arc<DeltaComplex>,
    group: Arc<FiniteGroup>,
    steps: Vec<Step>,
}

impl ColoringSearch {
    pub fn new(complex: Arc<DeltaComplex>, group: Arc<FiniteGroup>) -> Self {
        Self::with_fixed(complex, group, &[])
    }

    /// A search in which the listed edges carry prescribed colors.
    pub fn with_fixed(complex: Arc<DeltaComplex>, group: Arc<FiniteGroup>, fixed: &[(usize, u32)]) -> Self {
        let steps = plan(&complex, fixed);
        ColoringSearch { complex, group, steps }
    }

    pub fn branch_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Branch(_))).count()
    }

    fn pinned(&self, values: &[u32]) -> Option<ColoringSearch> {
        let mut steps = self.steps.clone();
        let mut it = values.iter();
        for step in steps.iter_mut() {
            if let Step::Branch(e) = *step {
                match it.next() {
                    Some(&v) => *step = Step::Fixed(e, v),
                    None => break,
                }
            }
        }
        it.next().is_none().then(|| ColoringSearch { complex: self.complex.clone(), group: self.group.clone(), steps })
    }

    fn machine(&self) -> Machine<'_> {
        Machine {
            search: self,
            colors: vec![0; self.complex.edge_count()],
            pos: 0,
            stack: Vec::new(),
            resume: false,
            done: false,
        }
    }

    /// Calls `f` on every flat coloring (as packed edge colors).
    pub fn for_each(&self, mut f: impl FnMut(&[u32])) {
        let mut m = self.machine();
        while let Some(c) = m.advance() {
            f(c);
        }
    }

    /// Parallel fold, partitioned on the first two branching edges. The
    /// result is schedule-independent whenever `merge` is associative and
    /// commutative.
    pub fn par_fold<A: Send>(
        &self,
        init: impl Fn() -> A + Sync + Send,
        fold: impl Fn(&mut A, &[u32]) + Sync + Send,
        merge: impl Fn(A, A) -> A + Sync + Send,
    ) -> A {
        let n = self.group.order() as u32;
        let depth = self.branch_count().min(2);
        if depth == 0 {
            let mut acc = init();
            self.for_each(|c| fold(&mut acc, c));
            return acc;
        }
        let tasks = (n as usize).pow(depth as u32);
        (0..tasks)
            .into_par_iter()
            .map(|t| {
                let prefix: Vec<u32> = (0..depth).map(|i| (t / (n as usize).pow(i as u32)) as u32 % n).collect();
                let mut acc = init();
                if let Some(sub) = self.pinned(&prefix) {
                    sub.for_each(|c| fold(&mut acc, c));
                }
                acc
            })
            .reduce(&init, &merge)
    }

    pub fn count(&self) -> u64 {
        self.par_fold(|| 0u64, |n, _| *n += 1, |a, b| a + b)
    }

    pub fn iter(&self) -> FlatColorings<'_> {
        FlatColorings { machine: self.machine() }
    }
}

fn plan(x: &DeltaComplex, fixed: &[(usize, u32)]) -> Vec<Step> {
    let edges = x.edge_count();
    let triangles = if x.dim() >= 2 { x.count(2) } else { 0 };
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); edges];
    for t in 0..triangles {
        let mut f = x.faces_of(2, t).to_vec();
        f.sort_unstable();
        f.dedup();
        for e in f {
            incident[e].push(t);
        }
    }
    let mut known = vec![false; edges];
    let mut settled = vec![false; triangles];
    let mut steps = Vec::new();
    let mut queue = VecDeque::new();

    fn settle(
        x: &DeltaComplex,
        e: usize,
        step: Step,
        known: &mut [bool],
        settled: &mut [bool],
        incident: &[Vec<usize>],
        steps: &mut Vec<Step>,
        queue: &mut VecDeque<usize>,
    ) {
        steps.push(step);
        known[e] = true;
        for &t in &incident[e] {
            if settled[t] {
                continue;
            }
            if x.faces_of(2, t).iter().all(|&f| known[f]) {
                settled[t] = true;
                steps.push(Step::Check(t));
            } else {
                queue.push_back(t);
            }
        }
    }

    for &(e, v) in fixed {
        if !known[e] {
            settle(x, e, Step::Fixed(e, v), &mut known, &mut settled, &incident, &mut steps, &mut queue);
        }
    }
    loop {
        while let Some(t) = queue.pop_front() {
            if settled[t] {
                continue;
            }
            let f = x.faces_of(2, t);
            let unknown: Vec<usize> = (0..3).filter(|&i| !known[f[i]]).collect();
            // only a single, non-repeated unknown edge can be solved for
            if unknown.len() != 1 {
                continue;
            }
            let i = unknown[0];
            let (rule, a, b) = match i {
                1 => (Rule::Product, f[2], f[0]),
                0 => (Rule::LeftQuotient, f[2], f[1]),
                _ => (Rule::RightQuotient, f[1], f[0]),
            };
            settled[t] = true;
            let e = f[i];
            settle(x, e, Step::Force { edge: e, rule, a, b }, &mut known, &mut settled, &incident, &mut steps, &mut queue);
        }
        let pick = (0..edges).filter(|&e| !known[e]).max_by_key(|&e| {
            let touching = incident[e]
                .iter()
                .filter(|&&t| !settled[t] && x.faces_of(2, t).iter().any(|&f| known[f]))
                .count();
            (touching, std::cmp::Reverse(e))
        });
        match pick {
            Some(e) => settle(x, e, Step::Branch(e), &mut known, &mut settled, &incident, &mut steps, &mut queue),
            None => break,
        }
    }
    debug_assert!(settled.iter().all(|&s| s));
    steps
}

struct Machine<'a> {
    search: &'a ColoringSearch,
    colors: Vec<u32>,
    pos: usize,
    /// positions of branch steps currently open
    stack: Vec<usize>,
    resume: bool,
    done: bool,
}

impl Machine<'_> {
    fn advance(&mut self) -> Option<&[u32]> {
        let g = &self.search.group;
        let n = g.order() as u32;
        let steps = &self.search.steps;
        loop {
            if self.done {
                return None;
            }
            if self.resume {
                self.resume = false;
                loop {
                    let Some(&at) = self.stack.last() else {
                        self.done = true;
                        return None;
                    };
                    let Step::Branch(e) = steps[at] else { unreachable!("stack holds branch steps") };
                    if self.colors[e] + 1 < n {
                        self.colors[e] += 1;
                        self.pos = at + 1;
                        break;
                    }
                    self.stack.pop();
                }
            }
            let mut failed = false;
            while self.pos < steps.len() {
                match steps[self.pos] {
                    Step::Branch(e) => {
                        self.colors[e] = 0;
                        self.stack.push(self.pos);
                    }
                    Step::Fixed(e, v) => self.colors[e] = v,
                    Step::Force { edge, rule, a, b } => {
                        let (ca, cb) = (self.colors[a] as usize, self.colors[b] as usize);
                        self.colors[edge] = match rule {
                            Rule::Product => g.mul(ca, cb),
                            Rule::LeftQuotient => g.mul(g.inv(ca), cb),
                            Rule::RightQuotient => g.mul(ca, g.inv(cb)),
                        } as u32;
                    }
                    Step::Check(t) => {
                        if !is_flat_on(&self.search.complex, g, &self.colors, t) {
                            failed = true;
                            break;
                        }
                    }
                }
                self.pos += 1;
            }
            self.resume = true;
            if !failed {
                return Some(&self.colors);
            }
        }
    }
}

/// Lazy iterator over flat colorings.
pub struct FlatColorings<'a> {
    machine: Machine<'a>,
}

impl Iterator for FlatColorings<'_> {
    type Item = FlatColoring;

    fn next(&mut self) -> Option<FlatColoring> {
        let search = self.machine.search;
        let colors = self.machine.advance()?.iter().map(|&c| c as usize).collect();
        Some(FlatColoring { complex: search.complex.clone(), group: search.group.clone(), colors })
    }
}

/// Every flat coloring, each exactly once.
pub fn enumerate_flat_colorings(x: &Arc<DeltaComplex>, g: &Arc<FiniteGroup>) -> Vec<FlatColoring> {
    ColoringSearch::new(x.clone(), g.clone()).iter().collect()
}

pub fn count_flat_colorings(x: &Arc<DeltaComplex>, g: &Arc<FiniteGroup>) -> u64 {
    ColoringSearch::new(x.clone(), g.clone()).count()
}

/// A spanning forest: for each non-root vertex in BFS order, the edge to its
/// parent and whether that edge points away from the parent.
#[derive(Clone, Debug)]
struct Forest {
    component: Vec<usize>,
    roots: Vec<usize>,
    order: Vec<(usize, usize, usize, bool)>,
    component_edges: Vec<Vec<usize>>,
}

impl Forest {
    fn new(x: &DeltaComplex) -> Self {
        let v = x.vertex_count();
        let mut adjacent: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); v];
        for e in 0..x.edge_count() {
            let (s, t) = x.edge_endpoints(e);
            adjacent[s].push((e, t, true));
            adjacent[t].push((e, s, false));
        }
        let mut component = vec![usize::MAX; v];
        let mut roots = Vec::new();
        let mut order = Vec::new();
        for r in 0..v {
            if component[r] != usize::MAX {
                continue;
            }
            let id = roots.len();
            roots.push(r);
            component[r] = id;
            let mut queue = VecDeque::from([r]);
            while let Some(u) = queue.pop_front() {
                for &(e, w, away) in &adjacent[u] {
                    if component[w] == usize::MAX {
                        component[w] = id;
                        order.push((u, w, e, away));
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut component_edges = vec![Vec::new(); roots.len()];
        for e in 0..x.edge_count() {
            component_edges[component[x.edge_endpoints(e).0]].push(e);
        }
        Forest { component, roots, order, component_edges }
    }
}

/// `PBun_G(X)`: flat colorings of `X` with `G^V` acting by gauge
/// transformations. Objects are keyed by their packed edge colors.
pub struct BundleGroupoid {
    complex: Arc<DeltaComplex>,
    group: Arc<FiniteGroup>,
    forest: Forest,
    classes: Vec<(Vec<u32>, u128)>,
}

impl fmt::Debug for BundleGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BundleGroupoid({} over {} vertices, {} classes)", self.group.name(), self.complex.vertex_count(), self.classes.len())
    }
}

impl BundleGroupoid {
    pub fn new(complex: Arc<DeltaComplex>, group: Arc<FiniteGroup>) -> Self {
        let forest = Forest::new(&complex);
        let mut bg = BundleGroupoid { complex, group, forest, classes: Vec::new() };
        bg.classes = bg.compute_classes();
        bg
    }

    pub fn complex(&self) -> &Arc<DeltaComplex> {
        &self.complex
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Orbits of `G^V`: colorings trivial on the forest, up to the residual
    /// constant gauge on each component (simultaneous conjugation).
    fn compute_classes(&self) -> Vec<(Vec<u32>, u128)> {
        let identity = self.group.identity() as u32;
        let fixed: Vec<(usize, u32)> = self.forest.order.iter().map(|&(_, _, e, _)| (e, identity)).collect();
        let search = ColoringSearch::with_fixed(self.complex.clone(), self.group.clone(), &fixed);
        let reps = search.par_fold(
            HashSet::new,
            |seen: &mut HashSet<Vec<u32>>, c| {
                seen.insert(self.canonical(c));
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        let mut reps: Vec<Vec<u32>> = reps.into_iter().collect();
        reps.sort_unstable();
        let total = (self.group.order() as u128)
            .checked_pow(self.complex.vertex_count() as u32)
            .expect("|G|^V fits in u128");
        reps.into_iter()
            .map(|key| {
                let aut = self.stabilizer_order(&key);
                (key, total / aut)
            })
            .collect()
    }

    /// Componentwise lexicographically least simultaneous conjugate.
    fn canonical(&self, colors: &[u32]) -> Vec<u32> {
        let g = &self.group;
        let mut out = colors.to_vec();
        for edges in &self.forest.component_edges {
            let mut best: Option<Vec<u32>> = None;
            for h in g.elements() {
                let candidate: Vec<u32> = edges.iter().map(|&e| g.conjugate(colors[e] as usize, h) as u32).collect();
                if best.as_ref().map_or(true, |b| candidate < *b) {
                    best = Some(candidate);
                }
            }
            for (&e, c) in edges.iter().zip(best.unwrap_or_default()) {
                out[e] = c;
            }
        }
        out
    }

    /// Per component, the gauges fixing `colors`, pinned by their root value.
    fn stabilizer_parts(&self, colors: &[u32]) -> Vec<Vec<Vec<(usize, GroupElement)>>> {
        let g = &self.group;
        let x = &self.complex;
        self.forest
            .roots
            .iter()
            .enumerate()
            .map(|(id, &root)| {
                let mut found = Vec::new();
                let mut lambda = vec![g.identity(); x.vertex_count()];
                for r in g.elements() {
                    lambda[root] = r;
                    for &(parent, child, e, away) in &self.forest.order {
                        if self.forest.component[child] != id {
                            continue;
                        }
                        let c = colors[e] as usize;
                        lambda[child] = if away {
                            g.conjugate(lambda[parent], c)
                        } else {
                            g.mul(g.mul(c, lambda[parent]), g.inv(c))
                        };
                    }
                    let fixes = self.forest.component_edges[id].iter().all(|&e| {
                        let (u, v) = x.edge_endpoints(e);
                        g.mul(colors[e] as usize, lambda[v]) == g.mul(lambda[u], colors[e] as usize)
                    });
                    if fixes {
                        let members = (0..x.vertex_count()).filter(|&v| self.forest.component[v] == id);
                        found.push(members.map(|v| (v, lambda[v])).collect());
                    }
                }
                found
            })
            .collect()
    }

    fn stabilizer_order(&self, colors: &[u32]) -> u128 {
        self.stabilizer_parts(colors).iter().map(|p| p.len() as u128).product()
    }

    fn neighbor(&self, colors: &[u32]) -> Option<Vec<u32>> {
        let g = &self.group;
        let v = self.complex.vertex_count();
        for vertex in 0..v {
            for h in g.elements().filter(|&h| h != g.identity()) {
                let gauge = GaugeTransformation::at_vertex(g, v, vertex, h);
                let moved = gauge.act_on(&self.complex, g, colors);
                if moved != colors {
                    return Some(moved);
                }
            }
        }
        None
    }
}

impl GroupoidBlock for BundleGroupoid {
    fn iso_classes(&self) -> Vec<(Vec<u32>, u128)> {
        self.classes.clone()
    }

    /// The stabilizer in `G^V`; `embedding[i]` is the gauge tuple of element `i`.
    fn automorphisms(&self, key: &[u32]) -> Result<Automorphisms, GroupoidError> {
        if !self.contains(key) {
            return Err(GroupoidError::InvalidAction(format!("{key:?} is not a flat coloring")));
        }
        let parts = self.stabilizer_parts(key);
        let order: u128 = parts.iter().map(|p| p.len() as u128).product();
        if order > MAX_ORDER as u128 {
            return Err(GroupoidError::InvalidGroupoid(format!(
                "automorphism group of order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        let v = self.complex.vertex_count();
        let mut tuples: Vec<Vec<u32>> = vec![vec![0; v]];
        for part in &parts {
            tuples = tuples
                .iter()
                .flat_map(|t| {
                    part.iter().map(move |assignment| {
                        let mut t = t.clone();
                        for &(vertex, value) in assignment {
                            t[vertex] = value as u32;
                        }
                        t
                    })
                })
                .collect();
        }
        let g = &self.group;
        let index: HashMap<&[u32], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let rows: Vec<Vec<usize>> = tuples
            .iter()
            .map(|a| {
                tuples
                    .iter()
                    .map(|b| {
                        let ab: Vec<u32> =
                            a.iter().zip(b).map(|(&x, &y)| g.mul(x as usize, y as usize) as u32).collect();
                        index[ab.as_slice()]
                    })
                    .collect()
            })
            .collect();
        let group = FiniteGroup::from_table("Aut", &rows)?;
        Ok(Automorphisms { group: Arc::new(group), embedding: tuples })
    }

    fn automorphism_order(&self, key: &[u32]) -> Result<u128, GroupoidError> {
        if !self.contains(key) {
            return Err(GroupoidError::InvalidAction(format!("{key:?} is not a flat coloring")));
        }
        Ok(self.stabilizer_order(key))
    }

    fn contains(&self, key: &[u32]) -> bool {
        let colors: Vec<usize> = key.iter().map(|&c| c as usize).collect();
        FlatColoring::new(self.complex.clone(), self.group.clone(), colors).is_ok()
    }

    fn isomorphic_neighbor(&self, key: &[u32]) -> Option<Vec<u32>> {
        self.neighbor(key)
    }
}

pub fn bundle_groupoid(x: &Arc<DeltaComplex>, g: &Arc<FiniteGroup>) -> EFGroupoid {
    EFGroupoid::from_block(Arc::new(BundleGroupoid::new(x.clone(), g.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{circle, product_with_circle, sphere2, surface, torus_grid};
    use crate::group::{builtin_group, make_cyclic, make_symmetric};
    use crate::groupoid::GroupoidFunction;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn arc<T>(t: T) -> Arc<T> {
        Arc::new(t)
    }

    fn commuting_pairs(g: &FiniteGroup) -> u64 {
        let mut n = 0;
        for a in g.elements() {
            for b in g.elements() {
                if g.commutes(a, b) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn circle_counts() {
        for name in ["Z1", "Z2", "S3", "Q8"] {
            let g = arc(builtin_group(name).unwrap());
            for m in [1, 3] {
                let x = arc(circle(m));
                assert_eq!(count_flat_colorings(&x, &g), (g.order() as u64).pow(m as u32));
            }
        }
    }

    #[test]
    fn torus_counts_are_commuting_pairs() {
        let s3 = arc(make_symmetric(3).unwrap());
        assert_eq!(count_flat_colorings(&arc(surface(1)), &s3), 18);
        for name in ["Z2", "Z2xZ2", "S3"] {
            let g = arc(builtin_group(name).unwrap());
            let grid = arc(torus_grid(3, 3));
            let expected = commuting_pairs(&g) * (g.order() as u64).pow(8);
            assert_eq!(count_flat_colorings(&grid, &g), expected, "{name}");
        }
    }

    #[test]
    fn sphere_counts() {
        for name in ["Z2", "S3"] {
            let g = arc(builtin_group(name).unwrap());
            assert_eq!(count_flat_colorings(&arc(sphere2()), &g), (g.order() as u64).pow(3));
        }
        // brute force over all 2^6 assignments for Z2
        let z2 = make_cyclic(2).unwrap();
        let x = sphere2();
        let brute = (0..64u32)
            .filter(|bits| {
                let colors: Vec<u32> = (0..6).map(|e| (bits >> e) & 1).collect();
                (0..4).all(|t| is_flat_on(&x, &z2, &colors, t))
            })
            .count();
        assert_eq!(brute, 8);
    }

    #[test]
    fn iterator_matches_count_and_is_flat() {
        let g = arc(builtin_group("D4").unwrap());
        let x = arc(product_with_circle(&circle(1)).unwrap());
        let all = enumerate_flat_colorings(&x, &g);
        assert_eq!(all.len() as u64, commuting_pairs(&g));
        let distinct: HashSet<_> = all.iter().map(FlatColoring::key).collect();
        assert_eq!(distinct.len(), all.len());
        for c in &all {
            assert!(FlatColoring::new(x.clone(), g.clone(), c.colors().to_vec()).is_ok());
        }
    }

    #[test]
    fn searching_is_far_smaller_than_brute_force() {
        let x = arc(product_with_circle(&surface(2)).unwrap());
        let g = arc(builtin_group("D4").unwrap());
        let search = ColoringSearch::new(x.clone(), g.clone());
        assert!(search.branch_count() <= 5, "branches {}", search.branch_count());
        assert_eq!(search.count(), 5888);
    }

    #[test]
    fn groupoid_on_circles_is_the_loop_groupoid() {
        for name in ["Z3", "S3", "D4", "Q8"] {
            let g = arc(builtin_group(name).unwrap());
            let classes = g.conjugacy_classes();
            for m in [1, 3] {
                let x = arc(circle(m));
                let bg = bundle_groupoid(&x, &g);
                let pi0 = bg.pi0();
                assert_eq!(pi0.len(), classes.len());
                assert_eq!(bg.cardinality(), BigRational::from_integer(1.into()));
                let mut seen = HashSet::new();
                for class in &pi0 {
                    let c = FlatColoring::new(
                        x.clone(),
                        g.clone(),
                        class.representative.key.iter().map(|&k| k as usize).collect(),
                    )
                    .unwrap();
                    let loop_path: Vec<(usize, bool)> = (0..m).map(|e| (e, true)).collect();
                    let hol = holonomy_class(&c, &loop_path).unwrap();
                    assert!(seen.insert(hol.representative));
                    let aut = bg.automorphism_group(&class.representative).unwrap();
                    let cent = g.elements().filter(|&h| g.commutes(h, hol.representative)).count();
                    assert_eq!(aut.order(), cent);
                    assert_eq!(aut.group.conjugacy_classes().len(), crate::group::centralizer(&g, hol.representative).as_group().conjugacy_classes().len());
                }
            }
        }
    }

    #[test]
    fn sphere_groupoid() {
        let z2 = arc(make_cyclic(2).unwrap());
        let bg = bundle_groupoid(&arc(sphere2()), &z2);
        let pi0 = bg.pi0();
        assert_eq!(pi0.len(), 1);
        assert_eq!(pi0[0].size, 8);
        assert_eq!(bg.automorphism_group(&pi0[0].representative).unwrap().order(), 2);
    }

    #[test]
    fn cardinality_matches_colorings_over_gauges() {
        for (x, name) in [(surface(1), "S3"), (surface(2), "Z2"), (torus_grid(2, 2), "Z2xZ2"), (sphere2(), "Z3")] {
            let x = arc(x);
            let g = arc(builtin_group(name).unwrap());
            let bg = bundle_groupoid(&x, &g);
            let count = count_flat_colorings(&x, &g);
            let total = BigRational::from_integer((g.order() as u64).pow(x.vertex_count() as u32).into());
            assert_eq!(bg.cardinality(), BigRational::from_integer(count.into()) / total);
            let sizes: u128 = bg.pi0().iter().map(|c| c.size).sum();
            assert_eq!(sizes, count as u128);
        }
    }

    #[test]
    fn disconnected_groupoid() {
        let x = arc(DeltaComplex::disjoint_union(&circle(1), &circle(2)).unwrap());
        let g = arc(make_symmetric(3).unwrap());
        let bg = bundle_groupoid(&x, &g);
        assert_eq!(bg.pi0().len(), 9);
        assert_eq!(bg.cardinality(), BigRational::from_integer(1.into()));
        let rep = &bg.pi0()[0].representative;
        let aut = bg.automorphism_group(rep).unwrap();
        assert_eq!(aut.order(), 36);
        assert!(!aut.group.is_abelian());
    }

    #[test]
    fn holonomy_errors() {
        let x = arc(circle(3));
        let g = arc(make_cyclic(3).unwrap());
        let c = FlatColoring::new(x.clone(), g.clone(), vec![1, 0, 0]).unwrap();
        assert_eq!(holonomy_class(&c, &[(0, true), (1, true), (2, true)]).unwrap().representative, 1);
        assert_eq!(holonomy_class(&c, &[(2, false), (1, false), (0, false)]).unwrap().representative, 2);
        assert!(matches!(holonomy_class(&c, &[(0, true), (1, true)]), Err(BundleError::OpenPath { .. })));
        assert!(matches!(holonomy_class(&c, &[(0, true), (2, true)]), Err(BundleError::OpenPath { .. })));
        assert_eq!(holonomy_class(&c, &[]).unwrap_err(), BundleError::EmptyLoop);
        let trivial = FlatColoring::trivial(x, g);
        assert_eq!(holonomy_class(&trivial, &[(0, true), (1, true), (2, true)]).unwrap().representative, 0);
    }

    #[test]
    fn non_flat_rejected() {
        let x = arc(surface(1));
        let g = arc(make_cyclic(2).unwrap());
        assert_eq!(FlatColoring::new(x.clone(), g.clone(), vec![1, 0, 0]).unwrap_err(), BundleError::NotFlat(0));
        assert!(FlatColoring::new(x, g, vec![0, 2, 0]).is_err());
    }

    #[test]
    fn gauge_invariant_function_integrates() {
        let x = arc(surface(1));
        let g = arc(make_symmetric(3).unwrap());
        let bg = bundle_groupoid(&x, &g);
        let f = GroupoidFunction::new(&bg, |o| BigRational::from_integer(i64::from(o.key[0]).into()));
        assert!(bg.integrate(&f).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gauges_preserve_flatness_and_holonomy(pick in 0usize..3888, gauge in proptest::collection::vec(0usize..6, 4)) {
            let x = arc(torus_grid(2, 2));
            let g = arc(make_symmetric(3).unwrap());
            let c = ColoringSearch::new(x.clone(), g.clone()).iter().nth(pick).unwrap();
            let lambda = GaugeTransformation::new(gauge);
            let d = lambda.apply(&c).unwrap();
            prop_assert!(FlatColoring::new(x.clone(), g.clone(), d.colors().to_vec()).is_ok());
            // horizontal loop through vertex (0,0)
            let path = [(0, true), (1, true)];
            prop_assert_eq!(holonomy_class(&c, &path).unwrap().representative, holonomy_class(&d, &path).unwrap().representative);
            let inverse = GaugeTransformation::new(lambda.values().iter().map(|&v| g.inv(v)).collect());
            prop_assert_eq!(inverse.apply(&d).unwrap(), c);
        }

        #[test]
        fn gauge_action_is_a_right_action(a in proptest::collection::vec(0usize..8, 1), b in proptest::collection::vec(0usize..8, 1), pick in 0usize..22) {
            let x = arc(surface(1));
            let g = arc(builtin_group("D4").unwrap());
            let all = enumerate_flat_colorings(&x, &g);
            let c = &all[pick % all.len()];
            let (la, lb) = (GaugeTransformation::new(a), GaugeTransformation::new(b));
            let stepwise = lb.apply(&la.apply(c).unwrap()).unwrap();
            prop_assert_eq!(stepwise, la.compose(&lb, &g).apply(c).unwrap());
        }
    }
}
