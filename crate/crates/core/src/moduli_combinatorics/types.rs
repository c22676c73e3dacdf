use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::geometry::{c1_subvariety, ClassRef, GeometrySpec, KSet};
use crate::error::{Error, Result};

/// Largest vertex count accepted by the enumerator.
pub const MAX_TREE_VERTICES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub class: ClassRef,
    pub k: KSet,
}

/// A stable decorated tree: vertices with a class and a divisor set, tree
/// edges, and the vertex carrying each marked point `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CombinatorialType {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    pub markings: Vec<usize>,
}

impl CombinatorialType {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>, markings: Vec<usize>) -> Self {
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort();
        CombinatorialType { vertices, edges, markings }
    }

    pub fn k(&self) -> usize {
        self.markings.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn special_points(&self, v: usize) -> usize {
        self.degree(v) + self.markings.iter().filter(|&&m| m == v).count()
    }

    pub fn max_k(&self) -> u32 {
        self.vertices.iter().map(|v| v.k.len()).max().unwrap_or(0)
    }

    /// Number of copies of each class used by the vertices.
    pub fn class_counts(&self, classes: usize) -> Vec<u32> {
        let mut out = vec![0; classes];
        for v in &self.vertices {
            if let Some(c) = v.class {
                if c < classes {
                    out[c] += 1;
                }
            }
        }
        out
    }

    pub fn c1x(&self, geom: &GeometrySpec) -> Result<i64> {
        self.vertices.iter().map(|v| geom.c1x(v.class)).sum()
    }

    /// Intersection numbers of the total class with each divisor.
    pub fn intersections(&self, geom: &GeometrySpec) -> Result<Vec<i64>> {
        let mut out = vec![0; geom.q()];
        for v in &self.vertices {
            for (o, x) in out.iter_mut().zip(geom.intersections(v.class)?) {
                *o += x;
            }
        }
        Ok(out)
    }

    fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &self.edges {
            if a >= n || b >= n || a == b {
                return false;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    pub fn validate(&self, geom: &GeometrySpec) -> Result<()> {
        if !self.is_tree() {
            return Err(Error::invariant("the vertex and edge data do not form a tree"));
        }
        if self.markings.iter().any(|&m| m >= self.vertices.len()) {
            return Err(Error::invariant("a marked point sits on an unknown vertex"));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if !geom.admissible(v.class)?.contains(&v.k) {
                return Err(Error::invariant(format!("vertex {i}: class is not admissible for its divisor set")));
            }
            if v.class.is_none() && self.special_points(i) < 3 {
                return Err(Error::invariant(format!("vertex {i}: zero-class vertex with fewer than three special points")));
            }
        }
        Ok(())
    }

    /// Image under a vertex permutation `v -> perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut vertices = self.vertices.clone();
        for (v, &p) in perm.iter().enumerate() {
            vertices[p] = self.vertices[v];
        }
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let markings = self.markings.iter().map(|&m| perm[m]).collect();
        CombinatorialType::new(vertices, edges, markings)
    }
}

/// Real dimension of the stratum of type `gamma`, from the two equivalent
/// forms of the half-dimension count. Disagreement means the data is not a
/// tree.
pub fn dim_gamma(gamma: &CombinatorialType, k: usize, geom: &GeometrySpec) -> Result<i64> {
    if gamma.k() != k {
        return Err(Error::invariant(format!("type carries {} marked points, expected {k}", gamma.k())));
    }
    let n = geom.n;
    let k = k as i64;
    let mut per_vertex = 0;
    let mut per_vertex2 = 0;
    for v in &gamma.vertices {
        let c1v = c1_subvariety(v.class, v.k, geom)?;
        let kk = v.k.len() as i64;
        per_vertex += n - kk - 3 + c1v;
        per_vertex2 += c1v - kk - 1;
    }
    let mut per_edge = 0;
    let mut per_edge2 = 0;
    for &(a, b) in &gamma.edges {
        let (va, vb) = (gamma.vertices.get(a), gamma.vertices.get(b));
        let (Some(va), Some(vb)) = (va, vb) else {
            return Err(Error::invariant("edge refers to an unknown vertex"));
        };
        let common = va.k.intersect(vb.k).len() as i64;
        per_edge += common - n + 2;
        per_edge2 += common;
    }
    let first = k + per_vertex + per_edge;
    let second = k + n - 2 + per_vertex2 + per_edge2;
    if first != second {
        return Err(Error::invariant(format!("dimension forms disagree ({first} vs {second}): not a tree")));
    }
    Ok(2 * first)
}

/// `2(k + n + c1(TX)(A) - 3 - |E| - max |K|)`.
pub fn dim_upper_bound(gamma: &CombinatorialType, k: usize, geom: &GeometrySpec) -> Result<i64> {
    let c1 = gamma.c1x(geom)?;
    Ok(2 * (k as i64 + geom.n + c1 - 3 - gamma.edges.len() as i64 - gamma.max_k() as i64))
}

/// Decomposition of `dim_upper_bound - dim_gamma` into the Chern loss
/// `sum_alpha sum_{q in K_alpha} A_alpha.V_q` and the combinatorial excess
/// `sum|K_alpha| - sum_edges |K_alpha cap K_beta| - max|K_alpha|`; both are
/// nonnegative and the gap is twice their sum.
pub fn bound_gap_parts(gamma: &CombinatorialType, geom: &GeometrySpec) -> Result<(i64, i64)> {
    let mut chern = 0;
    for v in &gamma.vertices {
        chern += geom.c1x(v.class)? - c1_subvariety(v.class, v.k, geom)?;
    }
    let sum_k: i64 = gamma.vertices.iter().map(|v| v.k.len() as i64).sum();
    let sum_e: i64 = gamma.edges.iter().map(|&(a, b)| gamma.vertices[a].k.intersect(gamma.vertices[b].k).len() as i64).sum();
    Ok((chern, sum_k - sum_e - gamma.max_k() as i64))
}

/// Edge list of a tree and its automorphisms as vertex permutations.
type Shape = (Vec<(usize, usize)>, Vec<Vec<usize>>);

/// Unlabelled trees on `v` vertices as sorted edge lists, one per
/// isomorphism class, each with its automorphism group.
pub(crate) fn tree_shapes(v: usize) -> Vec<Shape> {
    if v == 1 {
        return vec![(Vec::new(), vec![vec![0]])];
    }
    let perms = permutations(v);
    let mut seen = BTreeSet::new();
    let mut shapes = Vec::new();
    let total = v.pow(v as u32 - 2);
    for code_idx in 0..total {
        let mut code = Vec::with_capacity(v - 2);
        let mut c = code_idx;
        for _ in 0..v - 2 {
            code.push(c % v);
            c /= v;
        }
        let edges = prufer_decode(&code, v);
        let canon = perms.iter().map(|p| relabel_edges(&edges, p)).min().expect("nonempty");
        if seen.insert(canon.clone()) {
            let autos = perms.iter().filter(|p| relabel_edges(&canon, p) == canon).cloned().collect();
            shapes.push((canon, autos));
        }
    }
    shapes.sort();
    shapes
}

fn relabel_edges(edges: &[(usize, usize)], p: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<_> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
    out.sort();
    out
}

fn prufer_decode(code: &[usize], v: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; v];
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(v - 1);
    for &c in code {
        let leaf = (0..v).find(|&i| degree[i] == 1).expect("a leaf exists");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..v).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for j in i..cur.len() {
            cur.swap(i, j);
            rec(i + 1, cur, out);
            cur.swap(i, j);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

/// Every stable type with `k` marked points, at most `max_vertices`
/// vertices and at most `budget[c]` vertices of class `c`, each exactly once
/// up to isomorphism, in a canonical order.
pub fn enumerate_types(geom: &GeometrySpec, k: usize, budget: &[u32], max_vertices: usize) -> Result<Vec<CombinatorialType>> {
    geom.validate()?;
    if budget.len() != geom.classes.len() {
        return Err(Error::invariant("budget needs one entry per class"));
    }
    if max_vertices > MAX_TREE_VERTICES {
        return Err(Error::invariant(format!("max_vertices is limited to {MAX_TREE_VERTICES}")));
    }
    let mut options: Vec<Vertex> = Vec::new();
    for class in std::iter::once(None).chain((0..geom.classes.len()).map(Some)) {
        for kset in geom.admissible(class)? {
            options.push(Vertex { class, k: kset });
        }
    }
    let mut out = Vec::new();
    for v in 1..=max_vertices {
        for (edges, autos) in tree_shapes(v) {
            let degree: Vec<usize> = (0..v).map(|i| edges.iter().filter(|&&(a, b)| a == i || b == i).count()).collect();
            let mut marks = vec![0usize; k];
            loop {
                let mut special = degree.clone();
                for &m in &marks {
                    special[m] += 1;
                }
                let mut dec = Vec::with_capacity(v);
                let mut left = budget.to_vec();
                decorate(&options, &special, &mut left, &mut dec, &mut |dec| {
                    if is_orbit_min(dec, &marks, &autos) {
                        let vertices = dec.iter().map(|&i| options[i]).collect();
                        out.push(CombinatorialType::new(vertices, edges.clone(), marks.clone()));
                    }
                });
                if !advance(&mut marks, v) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn decorate(options: &[Vertex], special: &[usize], left: &mut [u32], dec: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    let i = dec.len();
    if i == special.len() {
        emit(dec);
        return;
    }
    for (o, opt) in options.iter().enumerate() {
        match opt.class {
            None if special[i] < 3 => continue,
            Some(c) if left[c] == 0 => continue,
            _ => {}
        }
        if let Some(c) = opt.class {
            left[c] -= 1;
        }
        dec.push(o);
        decorate(options, special, left, dec, emit);
        dec.pop();
        if let Some(c) = opt.class {
            left[c] += 1;
        }
    }
}

fn is_orbit_min(dec: &[usize], marks: &[usize], autos: &[Vec<usize>]) -> bool {
    let mut img_dec = vec![0; dec.len()];
    autos.iter().all(|p| {
        for (v, &d) in dec.iter().enumerate() {
            img_dec[p[v]] = d;
        }
        let img_marks: Vec<usize> = marks.iter().map(|&m| p[m]).collect();
        (dec, marks) <= (&img_dec[..], &img_marks[..])
    })
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli_combinatorics::geometry::SphereClass;
    use proptest::prelude::*;

    fn geom(n: i64, q: usize, classes: &[(i64, Vec<i64>)]) -> GeometrySpec {
        GeometrySpec {
            n,
            divisors: (0..q).map(|i| format!("V{i}")).collect(),
            classes: classes
                .iter()
                .enumerate()
                .map(|(i, (c1, av))| SphereClass { name: format!("A{i}"), c1: *c1, intersections: av.clone(), admissible: None })
                .collect(),
            q0: None,
            divisor_weights: None,
        }
    }

    fn vtx(class: ClassRef, k: &[usize]) -> Vertex {
        Vertex { class, k: KSet::from_indices(k.iter().copied()) }
    }

    #[test]
    fn single_vertex_examples() {
        let g = geom(2, 0, &[(0, vec![])]);
        let t = CombinatorialType::new(vec![vtx(Some(0), &[])], vec![], vec![0, 0, 0]);
        assert_eq!(dim_gamma(&t, 3, &g).unwrap(), 4);
        assert_eq!(dim_upper_bound(&t, 3, &g).unwrap(), 4);
        assert!(dim_gamma(&t, 2, &g).is_err());
    }

    #[test]
    fn two_vertex_example() {
        let g = geom(3, 0, &[(1, vec![])]);
        let t = CombinatorialType::new(vec![vtx(Some(0), &[]), vtx(Some(0), &[])], vec![(0, 1)], vec![]);
        assert_eq!(dim_gamma(&t, 0, &g).unwrap(), 2);
        assert!(dim_gamma(&t, 0, &g).unwrap() <= dim_upper_bound(&t, 0, &g).unwrap());
    }

    #[test]
    fn non_tree_is_detected() {
        let g = geom(3, 0, &[(1, vec![])]);
        let t = CombinatorialType::new(vec![vtx(Some(0), &[]), vtx(Some(0), &[])], vec![], vec![]);
        assert!(dim_gamma(&t, 0, &g).is_err());
        assert!(t.validate(&g).is_err());
    }

    #[test]
    fn shape_counts() {
        let counts: Vec<usize> = (1..=7).map(|v| tree_shapes(v).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11]);
        let star = &tree_shapes(4)[0];
        assert_eq!(star.1.len() + tree_shapes(4)[1].1.len(), 6 + 2);
    }

    #[test]
    fn single_class_single_vertex() {
        let mut g = geom(2, 2, &[(1, vec![1, 0])]);
        g.classes[0].admissible = Some(vec![vec![], vec!["V1".into()]]);
        let ts = enumerate_types(&g, 0, &[1], 1).unwrap();
        assert_eq!(ts.len(), 2);
        let g = geom(2, 0, &[]);
        assert_eq!(enumerate_types(&g, 3, &[], 1).unwrap().len(), 1);
        let g = geom(2, 2, &[]);
        assert_eq!(enumerate_types(&g, 3, &[], 1).unwrap().len(), 4);
    }

    /// Independent enumeration: every edge subset that forms a tree, every
    /// decoration, deduplicated by brute-force isomorphism testing.
    fn brute_force(g: &GeometrySpec, k: usize, budget: &[u32], max_v: usize) -> Vec<CombinatorialType> {
        let mut reps: Vec<CombinatorialType> = Vec::new();
        let mut vopts = vec![];
        for class in std::iter::once(None).chain((0..g.classes.len()).map(Some)) {
            for kk in g.admissible(class).unwrap() {
                vopts.push(Vertex { class, k: kk });
            }
        }
        for v in 1..=max_v {
            let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
            let perms = permutations(v);
            for mask in 0u32..1 << pairs.len() {
                let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
                let n_dec = vopts.len().pow(v as u32);
                for d in 0..n_dec {
                    let mut dd = d;
                    let vertices: Vec<Vertex> = (0..v)
                        .map(|_| {
                            let o = vopts[dd % vopts.len()];
                            dd /= vopts.len();
                            o
                        })
                        .collect();
                    for m in 0..v.pow(k as u32) {
                        let mut mm = m;
                        let markings: Vec<usize> = (0..k)
                            .map(|_| {
                                let x = mm % v;
                                mm /= v;
                                x
                            })
                            .collect();
                        let t = CombinatorialType::new(vertices.clone(), edges.clone(), markings);
                        if t.validate(g).is_err() || t.class_counts(budget.len()).iter().zip(budget).any(|(c, b)| c > b) {
                            continue;
                        }
                        if !reps.iter().any(|r| r.vertices.len() == v && perms.iter().any(|p| &t.permuted(p) == r)) {
                            reps.push(t);
                        }
                    }
                }
            }
        }
        reps
    }

    fn canonical(t: &CombinatorialType) -> CombinatorialType {
        permutations(t.vertices.len()).iter().map(|p| t.permuted(p)).min().unwrap()
    }

    #[test]
    fn matches_brute_force() {
        let mut g = geom(3, 2, &[(1, vec![1, 0]), (2, vec![0, 1])]);
        g.classes[1].admissible = Some(vec![vec![], vec!["V0".into()]]);
        for (k, budget, max_v) in [(0, vec![2, 1], 3), (1, vec![1, 1], 3), (2, vec![1, 0], 3), (3, vec![1, 0], 2), (1, vec![2, 0], 4)] {
            let fast = enumerate_types(&g, k, &budget, max_v).unwrap();
            let slow = brute_force(&g, k, &budget, max_v);
            assert_eq!(fast.len(), slow.len(), "k={k} budget={budget:?}");
            let a: BTreeSet<_> = fast.iter().map(canonical).collect();
            let b: BTreeSet<_> = slow.iter().map(canonical).collect();
            assert_eq!(a, b);
            assert_eq!(a.len(), fast.len(), "duplicates in the enumeration");
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let g = geom(2, 1, &[(1, vec![1])]);
        let a = enumerate_types(&g, 2, &[2], 3).unwrap();
        let b = enumerate_types(&g, 2, &[2], 3).unwrap();
        assert_eq!(a, b);
        for t in &a {
            t.validate(&g).unwrap();
        }
    }

    proptest! {
        #[test]
        fn bound_holds_with_gap_decomposition(
            n in 1i64..4,
            c1s in proptest::collection::vec(0i64..3, 1..3),
            avs in proptest::collection::vec(0i64..3, 4),
            k in 0usize..3,
        ) {
            let classes: Vec<(i64, Vec<i64>)> = c1s.iter().enumerate().map(|(i, &c)| (c, vec![avs[i], avs[i + 2]])).collect();
            let g = geom(n, 2, &classes);
            let budget = vec![2; classes.len()];
            for t in enumerate_types(&g, k, &budget, 3).unwrap() {
                let d = dim_gamma(&t, k, &g).unwrap();
                let b = dim_upper_bound(&t, k, &g).unwrap();
                let (chern, comb) = bound_gap_parts(&t, &g).unwrap();
                prop_assert!(d <= b);
                prop_assert!(chern >= 0 && comb >= 0);
                prop_assert_eq!(b - d, 2 * (chern + comb));
            }
        }
    }
}
