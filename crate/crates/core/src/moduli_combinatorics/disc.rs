use serde::{Deserialize, Serialize};

use super::geometry::{GeometrySpec, KSet, TangencyData};
use super::types::{dim_gamma, enumerate_types, CombinatorialType};
use crate::error::{Error, Result};

/// Expected dimension `i(A) + k - 2` of the main disc moduli space.
pub fn disc_dim(maslov: i64, k: usize) -> i64 {
    maslov + k as i64 - 2
}

/// A sphere bubble tree attached at interior point `point`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Attachment {
    pub point: usize,
    pub tree: CombinatorialType,
}

/// Pieces of the dimension of a disc with sphere bubbles at interior points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BubbleDim {
    pub disc: i64,
    pub bubbles: Vec<i64>,
    /// `2n - 2|K_i cap K'_i|` per attachment: the incidence condition.
    pub incidence: Vec<i64>,
    pub total: i64,
}

/// Dimension of the configuration `(A_0, t, I, {Gamma_i})`: the disc with
/// Maslov index `maslov0` and tangency `t`, with `k` boundary points, plus
/// one bubble tree with a single marked point per element of `I`.
pub fn bubble_config_dim(maslov0: i64, k: usize, t: &TangencyData, bubbles: &[Attachment], geom: &GeometrySpec) -> Result<BubbleDim> {
    let ell = t.ell();
    if t.t.iter().any(|row| row.len() != geom.q()) {
        return Err(Error::invariant("tangency rows need one entry per divisor"));
    }
    let mut used = vec![false; ell];
    for b in bubbles {
        if b.point >= ell {
            return Err(Error::invariant("bubble attached at an unknown point"));
        }
        if std::mem::replace(&mut used[b.point], true) {
            return Err(Error::invariant("two bubble trees attached at the same point"));
        }
        if b.tree.k() != 1 {
            return Err(Error::invariant("a bubble tree carries exactly one marked point"));
        }
        b.tree.validate(geom)?;
    }
    if let Some(i) = (0..ell).find(|&i| t.norm(i) == 0 && !used[i]) {
        return Err(Error::invariant(format!("point {i} has zero tangency but no bubble")));
    }
    let sum_t: i64 = (0..ell).map(|i| t.norm(i) as i64).sum();
    let disc = maslov0 + k as i64 - 2 + 2 * ell as i64 - 2 * sum_t;
    let mut dims = Vec::new();
    let mut incidence = Vec::new();
    for b in bubbles {
        let ki = t.support(b.point);
        let kp = b.tree.vertices[b.tree.markings[0]].k;
        dims.push(dim_gamma(&b.tree, 1, geom)?);
        incidence.push(2 * geom.n - 2 * ki.intersect(kp).len() as i64);
    }
    let total = disc + dims.iter().sum::<i64>() - incidence.iter().sum::<i64>();

    // Same count through the fibre product over the domain parameter space
    // `S_{k,l}` of dimension `k - 2 + 2l`: each bubble adds its own
    // dimension and a copy of `S`, and the matching condition removes
    // `2n - 2|K cap K'|` together with that copy.
    let s = k as i64 - 2 + 2 * ell as i64;
    let fibred = dims.iter().zip(&incidence).fold(disc, |acc, (d, c)| acc + (d + s) - (c + s));
    if fibred != total {
        return Err(Error::invariant("the two dimension counts disagree"));
    }
    Ok(BubbleDim { disc, bubbles: dims, incidence, total })
}

/// One configuration examined by the exclusion search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BubbleConfig {
    pub maslov0: i64,
    pub tangency: TangencyData,
    pub bubbles: Vec<Attachment>,
    pub dim: i64,
}

impl BubbleConfig {
    /// No bubbles and every point of contact order one.
    pub fn is_canonical(&self) -> bool {
        self.bubbles.is_empty() && self.tangency.is_canonical()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub disc_dim: i64,
    pub ell: usize,
    pub bubble_trees: usize,
    pub configs_examined: usize,
    pub survivors: Vec<BubbleConfig>,
    pub failures: Vec<String>,
}

impl ExclusionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Enumerates every way the disc class `A` (Maslov index `maslov`, with
/// intersection numbers `disc_av`) splits into a disc class `A_0` with
/// tangency data and sphere bubble trees at interior points, within the
/// class budget and vertex bound, and checks that the configurations of
/// nonnegative dimension are exactly those with canonical tangency and no
/// bubbles. Points are unlabelled: configurations are listed up to
/// reordering of the `l = A.V` interior points.
pub fn sphere_exclusion(
    geom: &GeometrySpec,
    maslov: i64,
    k: usize,
    disc_av: &[u32],
    budget: &[u32],
    max_vertices: usize,
) -> Result<ExclusionReport> {
    geom.validate()?;
    if disc_av.len() != geom.q() {
        return Err(Error::invariant("disc intersections need one entry per divisor"));
    }
    let dd = disc_dim(maslov, k);
    if dd > 1 {
        return Err(Error::invariant(format!("expected dimension {dd} exceeds one")));
    }
    let ell: usize = disc_av.iter().map(|&x| x as usize).sum();
    let target: Vec<i64> = disc_av.iter().map(|&x| x as i64).collect();
    let mut trees = Vec::new();
    for tree in enumerate_types(geom, 1, budget, max_vertices)? {
        let av = tree.intersections(geom)?;
        if av.iter().zip(&target).all(|(a, b)| a <= b) {
            let c1 = tree.c1x(geom)?;
            let counts = tree.class_counts(geom.classes.len());
            trees.push((tree, av, c1, counts));
        }
    }

    // slots are (t(i), bubble index) pairs, generated in nonincreasing order
    type Slot = (Vec<u32>, Option<usize>);
    let mut configs: Vec<Vec<Slot>> = Vec::new();
    let tvecs = vectors_below(disc_av);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        remaining: &mut Vec<i64>,
        left: &mut Vec<u32>,
        slots: &mut Vec<Slot>,
        ell: usize,
        tvecs: &[Vec<u32>],
        trees: &[(CombinatorialType, Vec<i64>, i64, Vec<u32>)],
        out: &mut Vec<Vec<Slot>>,
    ) {
        if slots.len() == ell {
            if remaining.iter().all(|&x| x == 0) {
                out.push(slots.clone());
            }
            return;
        }
        for t in tvecs {
            if t.iter().zip(remaining.iter()).any(|(&a, &b)| a as i64 > b) {
                continue;
            }
            let bubble_choices = std::iter::once(None).chain((0..trees.len()).map(Some));
            for b in bubble_choices {
                if b.is_none() && t.iter().all(|&x| x == 0) {
                    continue;
                }
                let slot = (t.clone(), b);
                if slots.last().is_some_and(|last| *last < slot) {
                    continue;
                }
                if let Some(bi) = b {
                    let (_, av, _, counts) = &trees[bi];
                    let fits = counts.iter().zip(left.iter()).all(|(c, l)| c <= l)
                        && av.iter().zip(t).zip(remaining.iter()).all(|((a, &x), &r)| a + x as i64 <= r);
                    if !fits {
                        continue;
                    }
                }
                for (r, &x) in remaining.iter_mut().zip(t) {
                    *r -= x as i64;
                }
                if let Some(bi) = b {
                    for (r, a) in remaining.iter_mut().zip(&trees[bi].1) {
                        *r -= a;
                    }
                    for (l, c) in left.iter_mut().zip(&trees[bi].3) {
                        *l -= c;
                    }
                }
                slots.push(slot);
                rec(remaining, left, slots, ell, tvecs, trees, out);
                slots.pop();
                for (r, &x) in remaining.iter_mut().zip(t) {
                    *r += x as i64;
                }
                if let Some(bi) = b {
                    for (r, a) in remaining.iter_mut().zip(&trees[bi].1) {
                        *r += a;
                    }
                    for (l, c) in left.iter_mut().zip(&trees[bi].3) {
                        *l += c;
                    }
                }
            }
        }
    }
    let mut remaining = target.clone();
    let mut left = budget.to_vec();
    rec(&mut remaining, &mut left, &mut Vec::new(), ell, &tvecs, &trees, &mut configs);

    let mut survivors = Vec::new();
    let mut failures = Vec::new();
    for slots in &configs {
        let tangency = TangencyData { t: slots.iter().map(|s| s.0.clone()).collect() };
        let mut bubbles = Vec::new();
        let mut c1_bubbles = 0;
        for (i, (_, b)) in slots.iter().enumerate() {
            if let Some(bi) = b {
                bubbles.push(Attachment { point: i, tree: trees[*bi].0.clone() });
                c1_bubbles += trees[*bi].2;
            }
        }
        let maslov0 = maslov - 2 * c1_bubbles;
        let d = bubble_config_dim(maslov0, k, &tangency, &bubbles, geom)?;

        // chain of estimates: each bubble loses at least four dimensions
        // against its Chern number, each point with higher tangency two
        let mut estimate = dd;
        for (i, (t, b)) in slots.iter().enumerate() {
            let norm: i64 = t.iter().map(|&x| x as i64).sum();
            estimate += 2 * (1 - norm);
            if let Some(bi) = b {
                let tree = &trees[*bi].0;
                let kp = tree.vertices[tree.markings[0]].k;
                let common = tangency.support(i).intersect(kp).len() as i64;
                estimate += 2 * (common - tree.max_k() as i64 - 2);
            }
        }
        if d.total > estimate {
            failures.push(format!("dimension {} exceeds its estimate {estimate}", d.total));
        }
        let cfg = BubbleConfig { maslov0, tangency, bubbles, dim: d.total };
        if cfg.dim >= 0 {
            if !cfg.is_canonical() {
                failures.push(format!("non-canonical survivor of dimension {}: {:?}", cfg.dim, cfg.tangency.t));
            }
            survivors.push(cfg);
        }
    }
    let expect_canonical = usize::from(dd >= 0);
    let canonical = survivors.iter().filter(|c| c.is_canonical()).count();
    if canonical != expect_canonical {
        failures.push(format!("{canonical} canonical survivors, expected {expect_canonical}"));
    }
    Ok(ExclusionReport { disc_dim: dd, ell, bubble_trees: trees.len(), configs_examined: configs.len(), survivors, failures })
}

fn vectors_below(bound: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Change of dimension when the last `ell_for` interior points are
/// forgotten: the first space imposes tangency along every divisor, the
/// second only along `Q_0`.
pub fn forgetful_dim_diff(ell_for: usize, t: &TangencyData, geom: &GeometrySpec) -> Result<i64> {
    let q0 = geom.q0_set()?.ok_or_else(|| Error::invariant("geometry has no Q0"))?;
    let ell = t.ell();
    if ell_for > ell {
        return Err(Error::invariant("cannot forget more points than there are"));
    }
    if t.t.iter().any(|row| row.len() != geom.q()) {
        return Err(Error::invariant("tangency rows need one entry per divisor"));
    }
    let kept = ell - ell_for;
    for i in kept..ell {
        if t.t[i].iter().enumerate().any(|(q, &x)| x > 0 && q0.contains(q)) {
            return Err(Error::invariant(format!("point {i} is not forgettable: it has tangency along Q0")));
        }
    }
    let on = |i: usize, set: KSet| -> i64 { t.t[i].iter().enumerate().filter(|(q, _)| set.contains(*q)).map(|(_, &x)| x as i64).sum() };
    let all = KSet((1u32 << geom.q()) - 1);
    // both expected dimensions with the shared i(A) + k - 2 left out
    let dim1 = 2 * ell as i64 - 2 * (0..ell).map(|i| on(i, all)).sum::<i64>();
    let dim2 = 2 * kept as i64 - 2 * (0..kept).map(|i| on(i, q0)).sum::<i64>();
    let direct = 2 * ell_for as i64 - 2 * (0..ell).map(|i| on(i, KSet(all.0 & !q0.0))).sum::<i64>();
    if dim1 - dim2 != direct {
        return Err(Error::invariant("the two dimension differences disagree"));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli_combinatorics::geometry::SphereClass;
    use crate::moduli_combinatorics::types::Vertex;

    fn geom() -> GeometrySpec {
        GeometrySpec {
            n: 2,
            divisors: vec!["V0".into(), "V1".into()],
            classes: vec![
                SphereClass { name: "L".into(), c1: 2, intersections: vec![1, 0], admissible: None },
                SphereClass { name: "E".into(), c1: 1, intersections: vec![0, 1], admissible: None },
            ],
            q0: Some(vec!["V0".into()]),
            divisor_weights: None,
        }
    }

    #[test]
    fn canonical_config_has_disc_dimension() {
        let g = geom();
        let t = TangencyData { t: vec![vec![1, 0], vec![0, 1]] };
        let d = bubble_config_dim(3, 0, &t, &[], &g).unwrap();
        assert_eq!(d.total, disc_dim(3, 0));
    }

    #[test]
    fn bubble_costs_dimension() {
        let g = geom();
        let tree = CombinatorialType::new(vec![Vertex { class: Some(1), k: KSet::EMPTY }], vec![], vec![0]);
        let t = TangencyData { t: vec![vec![1, 0], vec![0, 0]] };
        let b = [Attachment { point: 1, tree }];
        let d = bubble_config_dim(3 - 2, 0, &t, &b, &g).unwrap();
        // disc part 1 + 0 - 2 + 4 - 2 = 1, sphere 2(1 + 2 - 2 + 1 - 1) = 2, incidence 4
        assert_eq!(d.disc, 1);
        assert_eq!(d.bubbles, vec![2]);
        assert_eq!(d.total, -1);
        assert!(bubble_config_dim(1, 0, &t, &[], &g).is_err());
    }

    #[test]
    fn exclusion_small() {
        let g = geom();
        for (maslov, k) in [(2, 0), (3, 0), (1, 1), (0, 1), (1, 0)] {
            let rep = sphere_exclusion(&g, maslov, k, &[1, 1], &[1, 1], 2).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures);
            assert_eq!(rep.survivors.len(), usize::from(disc_dim(maslov, k) >= 0));
            assert!(rep.configs_examined > 1);
        }
        assert!(sphere_exclusion(&g, 4, 0, &[1, 1], &[1, 1], 2).is_err());
    }

    #[test]
    fn forgetting_points() {
        let g = geom();
        let t = TangencyData { t: vec![vec![1, 0], vec![0, 1], vec![0, 1]] };
        assert_eq!(forgetful_dim_diff(0, &t, &g).unwrap(), -4);
        assert_eq!(forgetful_dim_diff(2, &t, &g).unwrap(), 0);
        assert!(forgetful_dim_diff(3, &t, &g).is_err());
        let t = TangencyData { t: vec![vec![1, 0], vec![0, 0]] };
        assert_eq!(forgetful_dim_diff(1, &t, &g).unwrap(), 2);
    }
}
