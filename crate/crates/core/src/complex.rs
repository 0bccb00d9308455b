//! Closed oriented Δ-complexes.
//!
//! Simplices have ordered vertices and explicit face maps: `faces[k][s][i]`
//! is the `(k−1)`-simplex obtained by deleting vertex `i` of the k-simplex
//! `s`. Identifications (one-vertex surfaces, the glued prism over `X × S¹`)
//! are therefore just repeated face ids.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Violation {
    #[error("level {level} simplex {simplex}: {detail}")]
    Malformed { level: usize, simplex: usize, detail: String },
    #[error("simplicial identity d{i} d{j} = d{} d{i} fails on {level}-simplex {simplex}", j - 1)]
    SimplicialIdentity { level: usize, simplex: usize, i: usize, j: usize },
    #[error("not closed: codimension-1 simplex {face} occurs in {occurrences} top-simplex slots")]
    NotClosed { face: usize, occurrences: usize },
    #[error("fundamental chain is not a cycle: boundary coefficient {coefficient} on face {face}")]
    NotACycle { face: usize, coefficient: i64 },
    #[error("expected {expected} top-simplex signs in {{+1, -1}}, got {got:?}")]
    BadSigns { expected: usize, got: Vec<i8> },
    #[error("complex is not orientable (conflict at face {face})")]
    NonOrientable { face: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("malformed complex file: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaComplex {
    dim: usize,
    vertex_count: usize,
    /// `faces[k]` lists the k-simplices (index 0 is unused).
    faces: Vec<Vec<Vec<usize>>>,
    signs: Vec<i8>,
}

impl DeltaComplex {
    /// Assembles and validates a complex.
    pub fn new(
        dim: usize,
        vertex_count: usize,
        faces: Vec<Vec<Vec<usize>>>,
        signs: Vec<i8>,
    ) -> Result<Self, Violation> {
        let x = DeltaComplex { dim, vertex_count, faces, signs };
        x.validate()?;
        Ok(x)
    }

    /// Like `new`, but computes the signs by propagation across shared
    /// faces (first top simplex of each component gets `+1`).
    pub fn oriented(dim: usize, vertex_count: usize, faces: Vec<Vec<Vec<usize>>>) -> Result<Self, Violation> {
        let mut x = DeltaComplex { dim, vertex_count, faces, signs: Vec::new() };
        x.check_structure()?;
        x.signs = x.propagate_signs()?;
        x.validate()?;
        Ok(x)
    }

    pub fn empty(dim: usize) -> Self {
        DeltaComplex { dim, vertex_count: 0, faces: vec![Vec::new(); dim + 1], signs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn count(&self, level: usize) -> usize {
        if level == 0 {
            self.vertex_count
        } else {
            self.faces[level].len()
        }
    }

    pub fn edge_count(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.count(1)
        }
    }

    pub fn top_count(&self) -> usize {
        self.count(self.dim)
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count == 0
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn face(&self, level: usize, simplex: usize, i: usize) -> usize {
        self.faces[level][simplex][i]
    }

    pub fn faces_of(&self, level: usize, simplex: usize) -> &[usize] {
        &self.faces[level][simplex]
    }

    /// Source and target vertex of an edge.
    pub fn edge_endpoints(&self, edge: usize) -> (usize, usize) {
        (self.faces[1][edge][1], self.faces[1][edge][0])
    }

    /// The sub-simplex spanned by the given (sorted) vertex positions.
    pub fn sub_simplex(&self, level: usize, simplex: usize, keep: &[usize]) -> usize {
        let mut current = simplex;
        let mut lvl = level;
        for pos in (0..=level).rev() {
            if !keep.contains(&pos) {
                current = self.faces[lvl][current][pos];
                lvl -= 1;
            }
        }
        current
    }

    pub fn vertex_of(&self, level: usize, simplex: usize, i: usize) -> usize {
        self.sub_simplex(level, simplex, &[i])
    }

    /// The consecutive edges `(i−1, i)`, `i = 1..=n`, of a top simplex.
    pub fn edge_path(&self, top: usize) -> Vec<usize> {
        (1..=self.dim).map(|i| self.sub_simplex(self.dim, top, &[i - 1, i])).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim).map(|k| if k % 2 == 0 { 1 } else { -1 } * self.count(k) as i64).sum()
    }

    fn check_structure(&self) -> Result<(), Violation> {
        if self.faces.len() != self.dim + 1 {
            return Err(Violation::Malformed {
                level: self.faces.len(),
                simplex: 0,
                detail: format!("expected face lists for levels 1..={}", self.dim),
            });
        }
        for k in 1..=self.dim {
            for (s, f) in self.faces[k].iter().enumerate() {
                if f.len() != k + 1 {
                    return Err(Violation::Malformed {
                        level: k,
                        simplex: s,
                        detail: format!("has {} faces, expected {}", f.len(), k + 1),
                    });
                }
                if let Some(&bad) = f.iter().find(|&&id| id >= self.count(k - 1)) {
                    return Err(Violation::Malformed {
                        level: k,
                        simplex: s,
                        detail: format!("face id {bad} out of range"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks face-map identities, closedness and the fundamental cycle.
    pub fn validate(&self) -> Result<(), Violation> {
        self.check_structure()?;
        for k in 2..=self.dim {
            for s in 0..self.count(k) {
                for j in 1..=k {
                    for i in 0..j {
                        let left = self.faces[k - 1][self.faces[k][s][j]][i];
                        let right = self.faces[k - 1][self.faces[k][s][i]][j - 1];
                        if left != right {
                            return Err(Violation::SimplicialIdentity { level: k, simplex: s, i, j });
                        }
                    }
                }
            }
        }
        if self.is_empty() && self.top_count() == 0 {
            return Ok(());
        }
        if self.signs.len() != self.top_count() || self.signs.iter().any(|&e| e != 1 && e != -1) {
            return Err(Violation::BadSigns { expected: self.top_count(), got: self.signs.clone() });
        }
        let codim = self.count(self.dim - 1);
        let mut occurrences = vec![0usize; codim];
        let mut boundary = vec![0i64; codim];
        for (s, f) in self.faces[self.dim].iter().enumerate() {
            for (i, &face) in f.iter().enumerate() {
                occurrences[face] += 1;
                let sign = if i % 2 == 0 { 1 } else { -1 };
                boundary[face] += sign * self.signs[s] as i64;
            }
        }
        if let Some((face, &n)) = occurrences.iter().enumerate().find(|(_, &n)| n != 2) {
            return Err(Violation::NotClosed { face, occurrences: n });
        }
        if let Some((face, &c)) = boundary.iter().enumerate().find(|(_, &c)| c != 0) {
            return Err(Violation::NotACycle { face, coefficient: c });
        }
        Ok(())
    }

    fn propagate_signs(&self) -> Result<Vec<i8>, Violation> {
        let n = self.dim;
        let tops = self.top_count();
        let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.count(n - 1)];
        for (s, f) in self.faces[n].iter().enumerate() {
            for (i, &face) in f.iter().enumerate() {
                slots[face].push((s, i));
            }
        }
        if let Some((face, v)) = slots.iter().enumerate().find(|(_, v)| v.len() != 2) {
            return Err(Violation::NotClosed { face, occurrences: v.len() });
        }
        let mut signs = vec![0i8; tops];
        for start in 0..tops {
            if signs[start] != 0 {
                continue;
            }
            signs[start] = 1;
            let mut stack = vec![start];
            while let Some(s) = stack.pop() {
                for (i, &face) in self.faces[n][s].iter().enumerate() {
                    let (t, j) = if slots[face][0] == (s, i) { slots[face][1] } else { slots[face][0] };
                    // ε_s (−1)^i + ε_t (−1)^j = 0
                    let parity = if (i + j) % 2 == 0 { 1 } else { -1 };
                    let wanted = -signs[s] * parity;
                    if signs[t] == 0 {
                        signs[t] = wanted;
                        stack.push(t);
                    } else if signs[t] != wanted {
                        return Err(Violation::NonOrientable { face });
                    }
                }
            }
        }
        Ok(signs)
    }

    /// Side-by-side union; ids of `b` are shifted past those of `a`.
    pub fn disjoint_union(a: &DeltaComplex, b: &DeltaComplex) -> Result<DeltaComplex, Violation> {
        if a.dim != b.dim {
            return Err(Violation::DimensionMismatch(a.dim, b.dim));
        }
        let mut faces = a.faces.clone();
        for k in 1..=a.dim {
            let offset = a.count(k - 1);
            faces[k].extend(b.faces[k].iter().map(|f| f.iter().map(|&id| id + offset).collect()));
        }
        let signs = a.signs.iter().chain(&b.signs).copied().collect();
        DeltaComplex::new(a.dim, a.vertex_count + b.vertex_count, faces, signs)
    }

    /// Connected components, ordered by their smallest vertex.
    pub fn components(&self) -> Vec<DeltaComplex> {
        if self.is_empty() {
            return Vec::new();
        }
        // union-find over vertices; every simplex is attached through its vertices
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        if self.dim >= 1 {
            for e in 0..self.count(1) {
                let (u, v) = self.edge_endpoints(e);
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
        let roots: Vec<usize> = (0..self.vertex_count).map(|v| find(&mut parent, v)).collect();
        let mut order: Vec<usize> = roots.clone();
        order.sort_unstable();
        order.dedup();
        if order.len() == 1 {
            return vec![self.clone()];
        }
        order
            .iter()
            .map(|&root| {
                // component membership of each simplex, level by level
                let mut member: Vec<Vec<bool>> = vec![roots.iter().map(|&r| r == root).collect()];
                for k in 1..=self.dim {
                    member.push(self.faces[k].iter().map(|f| member[k - 1][f[0]]).collect());
                }
                let new_ids: Vec<Vec<usize>> = member
                    .iter()
                    .map(|m| {
                        let mut next = 0;
                        m.iter()
                            .map(|&inside| {
                                let id = next;
                                if inside {
                                    next += 1;
                                }
                                id
                            })
                            .collect()
                    })
                    .collect();
                let mut faces = vec![Vec::new(); self.dim + 1];
                for k in 1..=self.dim {
                    for (s, f) in self.faces[k].iter().enumerate() {
                        if member[k][s] {
                            faces[k].push(f.iter().map(|&id| new_ids[k - 1][id]).collect());
                        }
                    }
                }
                let signs = self.signs.iter().zip(&member[self.dim]).filter(|(_, &m)| m).map(|(&e, _)| e).collect();
                let vertex_count = member[0].iter().filter(|&&m| m).count();
                DeltaComplex { dim: self.dim, vertex_count, faces, signs }
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = ComplexFile {
            dimension: self.dim,
            vertices: self.vertex_count,
            faces: self.faces[1..].to_vec(),
            signs: self.signs.clone(),
        };
        serde_json::to_string(&file).expect("complex file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, Violation> {
        let file: ComplexFile = serde_json::from_str(text).map_err(|e| Violation::Parse(e.to_string()))?;
        if file.faces.len() != file.dimension {
            return Err(Violation::Parse(format!(
                "dimension {} needs {} face levels, got {}",
                file.dimension,
                file.dimension,
                file.faces.len()
            )));
        }
        let mut faces = vec![Vec::new()];
        faces.extend(file.faces);
        DeltaComplex::new(file.dimension, file.vertices, faces, file.signs)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    dimension: usize,
    vertices: usize,
    /// `faces[k−1]` lists the k-simplices as arrays of face ids.
    faces: Vec<Vec<Vec<usize>>>,
    signs: Vec<i8>,
}

/// `m` vertices and `m` edges `i → i+1 mod m`.
pub fn circle(m: usize) -> DeltaComplex {
    assert!(m >= 1, "a circle needs at least one vertex");
    let edges = (0..m).map(|i| vec![(i + 1) % m, i]).collect();
    DeltaComplex::new(1, m, vec![Vec::new(), edges], vec![1; m]).expect("circle is closed")
}

/// Boundary of the 3-simplex.
pub fn sphere2() -> DeltaComplex {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let edge = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).unwrap();
    let edges = pairs.iter().map(|&(a, b)| vec![b, a]).collect();
    let mut triangles = Vec::new();
    let mut signs = Vec::new();
    for omit in 0..4 {
        let v: Vec<usize> = (0..4).filter(|&x| x != omit).collect();
        triangles.push(vec![edge(v[1], v[2]), edge(v[0], v[2]), edge(v[0], v[1])]);
        signs.push(if omit % 2 == 0 { 1 } else { -1 });
    }
    DeltaComplex::new(2, 4, vec![Vec::new(), edges, triangles], signs).expect("sphere is closed")
}

/// Genus-h surface: the 4h-gon with word `Π [a_j, b_j]`, fan-triangulated
/// from one corner; all corners become the single vertex.
pub fn surface(h: usize) -> DeltaComplex {
    assert!(h >= 1, "genus must be at least 1");
    let sides = 4 * h;
    // letters a_j = 2j, b_j = 2j + 1; diagonal P0 → P_i for i in 2..=4h−2
    let diagonal = |i: usize| 2 * h + (i - 2);
    let side = |i: usize| -> (usize, bool) {
        let j = i / 4;
        match i % 4 {
            0 => (2 * j, true),
            1 => (2 * j + 1, true),
            2 => (2 * j, false),
            _ => (2 * j + 1, false),
        }
    };
    // the edge running P0 → P_i
    let from_corner = |i: usize| -> usize {
        if i == 1 {
            side(0).0
        } else if i == sides - 1 {
            side(sides - 1).0
        } else {
            diagonal(i)
        }
    };
    let edge_count = 2 * h + (sides - 3);
    let edges = vec![vec![0, 0]; edge_count];
    let triangles = (1..=sides - 2)
        .map(|i| {
            let (s, forward) = side(i);
            let (near, far) = (from_corner(i), from_corner(i + 1));
            if forward {
                vec![s, far, near]
            } else {
                vec![s, near, far]
            }
        })
        .collect();
    DeltaComplex::oriented(2, 1, vec![Vec::new(), edges, triangles]).expect("surface word is orientable")
}

/// The `p × q` grid torus, each square cut along its `(i,j) → (i+1,j+1)` diagonal.
pub fn torus_grid(p: usize, q: usize) -> DeltaComplex {
    assert!(p >= 1 && q >= 1, "grid sides must be positive");
    let vid = |i: usize, j: usize| (i % p) + p * (j % q);
    let n = p * q;
    let (h, v, d) = (|i, j| vid(i, j), |i, j| n + vid(i, j), |i, j| 2 * n + vid(i, j));
    let mut edges = vec![Vec::new(); 3 * n];
    let mut triangles = Vec::new();
    for j in 0..q {
        for i in 0..p {
            edges[h(i, j)] = vec![vid(i + 1, j), vid(i, j)];
            edges[v(i, j)] = vec![vid(i, j + 1), vid(i, j)];
            edges[d(i, j)] = vec![vid(i + 1, j + 1), vid(i, j)];
            triangles.push(vec![v(i + 1, j), d(i, j), h(i, j)]);
            triangles.push(vec![h(i, j + 1), d(i, j), v(i, j)]);
        }
    }
    DeltaComplex::oriented(2, n, vec![Vec::new(), edges, triangles]).expect("grid torus is orientable")
}

/// Simplices of `X × [0,1]` with the ends glued, keyed by the simplex `σ` of
/// `X` they sit over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Prism {
    /// `σ` itself (levels 0 and 1 identified)
    Base(usize),
    /// `[(0,0)…(j−1,0),(j,1)…(m,1)]`, `1 ≤ j ≤ m`
    Shifted(usize, usize),
    /// `[(0,0)…(j,0),(j,1)…(m,1)]`, `0 ≤ j ≤ m`, one dimension up
    Staircase(usize, usize),
}

/// `X × S¹` via the staircase subdivision of each prism `σ × [0,1]`, with
/// `X × {0}` glued to `X × {1}` so the vertex set is unchanged. The j-th
/// staircase simplex over a top simplex `σ` gets sign `ε_σ·(−1)^j`.
pub fn product_with_circle(x: &DeltaComplex) -> Result<DeltaComplex, Violation> {
    x.validate()?;
    let n = x.dim;
    if x.is_empty() {
        return Ok(DeltaComplex::empty(n + 1));
    }
    // keys per output level, and their ids
    let mut keys: Vec<Vec<(usize, Prism)>> = vec![Vec::new(); n + 2];
    for m in 0..=n {
        for s in 0..x.count(m) {
            keys[m].push((m, Prism::Base(s)));
            for j in 1..=m {
                keys[m].push((m, Prism::Shifted(s, j)));
            }
            for j in 0..=m {
                keys[m + 1].push((m, Prism::Staircase(s, j)));
            }
        }
    }
    let ids: Vec<HashMap<(usize, Prism), usize>> =
        keys.iter().map(|level| level.iter().enumerate().map(|(i, &k)| (k, i)).collect()).collect();
    let face_of_x = |m: usize, s: usize, i: usize| x.faces[m][s][i];
    let mut faces = vec![Vec::new(); n + 2];
    for level in 1..=n + 1 {
        for &(m, key) in &keys[level] {
            let lower = &ids[level - 1];
            let id = |mm: usize, k: Prism| lower[&(mm, k)];
            let f: Vec<usize> = match key {
                Prism::Base(s) => (0..=m).map(|i| id(m - 1, Prism::Base(face_of_x(m, s, i)))).collect(),
                Prism::Staircase(s, j) => (0..=m + 1)
                    .map(|i| {
                        if i < j {
                            id(m - 1, Prism::Staircase(face_of_x(m, s, i), j - 1))
                        } else if i == j {
                            if j == 0 { id(m, Prism::Base(s)) } else { id(m, Prism::Shifted(s, j)) }
                        } else if i == j + 1 {
                            if j == m { id(m, Prism::Base(s)) } else { id(m, Prism::Shifted(s, j + 1)) }
                        } else {
                            id(m - 1, Prism::Staircase(face_of_x(m, s, i - 1), j))
                        }
                    })
                    .collect(),
                Prism::Shifted(s, j) => (0..=m)
                    .map(|i| {
                        if i + 1 < j {
                            id(m - 1, Prism::Shifted(face_of_x(m, s, i), j - 1))
                        } else if i + 1 == j {
                            if j == 1 {
                                id(m - 1, Prism::Base(face_of_x(m, s, 0)))
                            } else {
                                id(m - 1, Prism::Shifted(face_of_x(m, s, j - 1), j - 1))
                            }
                        } else if i == j {
                            if j == m {
                                id(m - 1, Prism::Base(face_of_x(m, s, m)))
                            } else {
                                id(m - 1, Prism::Shifted(face_of_x(m, s, j), j))
                            }
                        } else {
                            id(m - 1, Prism::Shifted(face_of_x(m, s, i), j))
                        }
                    })
                    .collect(),
            };
            faces[level].push(f);
        }
    }
    let signs = keys[n + 1]
        .iter()
        .map(|&(_, key)| match key {
            Prism::Staircase(s, j) => x.signs[s] * if j % 2 == 0 { 1 } else { -1 },
            _ => unreachable!("top level holds staircase simplices only"),
        })
        .collect();
    DeltaComplex::new(n + 1, x.vertex_count, faces, signs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circles() {
        let c1 = circle(1);
        assert_eq!((c1.vertex_count(), c1.edge_count()), (1, 1));
        let c3 = circle(3);
        assert_eq!((c3.vertex_count(), c3.edge_count()), (3, 3));
        for m in 1..=5 {
            assert_eq!(circle(m).validate(), Ok(()));
            assert_eq!(circle(m).euler_characteristic(), 0);
        }
    }

    #[test]
    fn sphere() {
        let s = sphere2();
        assert_eq!((s.vertex_count(), s.count(1), s.count(2)), (4, 6, 4));
        assert_eq!(s.euler_characteristic(), 2);
        assert_eq!(s.validate(), Ok(()));
    }

    #[test]
    fn surfaces() {
        let t = surface(1);
        assert_eq!((t.vertex_count(), t.count(1), t.count(2)), (1, 3, 2));
        let s2 = surface(2);
        assert_eq!((s2.vertex_count(), s2.count(1), s2.count(2)), (1, 9, 6));
        for h in 1..=4 {
            let s = surface(h);
            assert_eq!(s.validate(), Ok(()));
            assert_eq!(s.euler_characteristic(), 2 - 2 * h as i64);
        }
    }

    #[test]
    fn grid_tori() {
        let t = torus_grid(3, 3);
        assert_eq!((t.vertex_count(), t.count(1), t.count(2)), (9, 27, 18));
        assert_eq!(t.euler_characteristic(), 0);
        for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3), (4, 1)] {
            assert_eq!(torus_grid(p, q).validate(), Ok(()), "{p}x{q}");
        }
    }

    #[test]
    fn products_with_circle() {
        let t = product_with_circle(&circle(1)).unwrap();
        assert_eq!((t.dim(), t.vertex_count(), t.count(1), t.count(2)), (2, 1, 3, 2));
        let t3 = product_with_circle(&surface(1)).unwrap();
        assert_eq!(t3.top_count(), 6);
        for x in [circle(1), circle(3), sphere2(), surface(1), surface(2), torus_grid(2, 2)] {
            let p = product_with_circle(&x).unwrap();
            assert_eq!(p.validate(), Ok(()));
            assert_eq!(p.euler_characteristic(), 0);
            assert_eq!(p.vertex_count(), x.vertex_count());
        }
        // iterate: T^3 × S^1
        let t4 = product_with_circle(&t3).unwrap();
        assert_eq!(t4.top_count(), 24);
        assert_eq!(t4.validate(), Ok(()));
    }

    #[test]
    fn product_respects_disjoint_union() {
        let a = surface(1);
        let b = sphere2();
        let u = DeltaComplex::disjoint_union(&a, &b).unwrap();
        let left = product_with_circle(&u).unwrap();
        let right = DeltaComplex::disjoint_union(
            &product_with_circle(&a).unwrap(),
            &product_with_circle(&b).unwrap(),
        )
        .unwrap();
        // same simplex counts level by level, same components up to order
        for k in 0..=3 {
            assert_eq!(left.count(k), right.count(k));
        }
        let lc = left.components();
        let rc = right.components();
        assert_eq!(lc.len(), 2);
        assert_eq!(lc, rc);
    }

    #[test]
    fn components_split() {
        let u = DeltaComplex::disjoint_union(&surface(1), &sphere2()).unwrap();
        let parts = u.components();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], surface(1));
        assert_eq!(parts[1], sphere2());
        assert_eq!(surface(2).components(), vec![surface(2)]);
        let three = DeltaComplex::disjoint_union(
            &DeltaComplex::disjoint_union(&circle(1), &circle(2)).unwrap(),
            &circle(3),
        )
        .unwrap();
        assert_eq!(three.components().len(), 3);
        assert!(DeltaComplex::empty(2).components().is_empty());
    }

    #[test]
    fn validator_catches_defects() {
        let t = surface(1);
        let mut faces = t.faces.clone();
        faces[2].pop();
        let err = DeltaComplex::new(2, 1, faces, vec![1]).unwrap_err();
        assert!(matches!(err, Violation::NotClosed { .. }), "{err}");
        let flipped = DeltaComplex::new(2, 1, t.faces.clone(), vec![1, 1]);
        assert!(matches!(flipped, Err(Violation::NotACycle { .. })));
        // break a simplicial identity on the sphere by rewiring one triangle
        let s = sphere2();
        let mut faces = s.faces.clone();
        faces[2][0].swap(0, 1);
        assert!(matches!(
            DeltaComplex::new(2, 4, faces, s.signs.clone()),
            Err(Violation::SimplicialIdentity { .. })
        ));
        let mut bad_top = circle(2);
        bad_top.faces[1][0] = vec![0, 0];
        assert!(product_with_circle(&bad_top).is_err());
    }

    #[test]
    fn edge_paths_follow_face_maps() {
        let x = product_with_circle(&surface(1)).unwrap();
        for top in 0..x.top_count() {
            let path = x.edge_path(top);
            assert_eq!(path.len(), 3);
            for (i, &e) in path.iter().enumerate() {
                let (src, tgt) = x.edge_endpoints(e);
                assert_eq!(src, x.vertex_of(3, top, i));
                assert_eq!(tgt, x.vertex_of(3, top, i + 1));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let x = product_with_circle(&surface(1)).unwrap();
        assert_eq!(DeltaComplex::from_json(&x.to_json()).unwrap(), x);
        assert!(DeltaComplex::from_json(r#"{"dimension":1,"vertices":1,"faces":[[[0,0]]],"signs":[-1,1]}"#).is_err());
    }
}
