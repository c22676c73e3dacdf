use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cone_ring::{Cone, EffectiveClass};
use crate::error::{Error, Result};

/// Subset of the divisor index set, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KSet(pub u32);

impl KSet {
    pub const EMPTY: KSet = KSet(0);

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        KSet(idx.into_iter().fold(0, |m, i| m | 1 << i))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, q: usize) -> bool {
        self.0 >> q & 1 == 1
    }

    pub fn intersect(self, other: KSet) -> KSet {
        KSet(self.0 & other.0)
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&q| self.contains(q))
    }

    /// All subsets of `{0, .., q-1}`.
    pub fn all(q: usize) -> impl Iterator<Item = KSet> {
        (0..1u32 << q).map(KSet)
    }
}

impl Serialize for KSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.indices())
    }
}

impl<'de> Deserialize<'de> for KSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.iter().any(|&q| q >= 32) {
            return Err(serde::de::Error::custom("divisor index too large"));
        }
        Ok(KSet::from_indices(v))
    }
}

/// Abstract spherical class: first Chern number and intersections with
/// each divisor component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereClass {
    pub name: String,
    pub c1: i64,
    pub intersections: Vec<i64>,
    /// Divisor sets `K` with the class in `H_2(V_K)`, by divisor name. All
    /// subsets when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissible: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub n: i64,
    pub divisors: Vec<String>,
    pub classes: Vec<SphereClass>,
    #[serde(default, rename = "Q0", skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<String>>,
    /// One weight vector per divisor, giving `[u].D = sum_q (u.V_q) w_q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor_weights: Option<Vec<Vec<i64>>>,
}

/// Class label on a tree vertex; `None` is the zero class.
pub type ClassRef = Option<usize>;

impl GeometrySpec {
    pub fn q(&self) -> usize {
        self.divisors.len()
    }

    pub fn divisor_index(&self, name: &str) -> Result<usize> {
        self.divisors.iter().position(|d| d == name).ok_or_else(|| Error::invariant(format!("unknown divisor '{name}'")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invariant("complex dimension n must be positive"));
        }
        if self.q() > 31 {
            return Err(Error::invariant("at most 31 divisor components are supported"));
        }
        let names: BTreeSet<&String> = self.divisors.iter().collect();
        if names.len() != self.q() {
            return Err(Error::invariant("divisor names must be distinct"));
        }
        let class_names: BTreeSet<&String> = self.classes.iter().map(|c| &c.name).collect();
        if class_names.len() != self.classes.len() {
            return Err(Error::invariant("class names must be distinct"));
        }
        for c in &self.classes {
            if c.intersections.len() != self.q() {
                return Err(Error::invariant(format!("class {} needs one intersection number per divisor", c.name)));
            }
            if c.intersections.iter().any(|&x| x < 0) {
                return Err(Error::invariant(format!("positivity of intersections: class {} has a negative intersection number", c.name)));
            }
            if c.c1 < 0 {
                return Err(Error::invariant(format!("semipositivity: class {} has c1 < 0", c.name)));
            }
            for k in c.admissible.iter().flatten() {
                for d in k {
                    self.divisor_index(d)?;
                }
            }
        }
        for d in self.q0.iter().flatten() {
            self.divisor_index(d)?;
        }
        if let Some(w) = &self.divisor_weights {
            if w.len() != self.q() {
                return Err(Error::invariant("divisor_weights needs one vector per divisor"));
            }
            if w.windows(2).any(|p| p[0].len() != p[1].len()) {
                return Err(Error::invariant("divisor weight vectors differ in length"));
            }
        }
        Ok(())
    }

    pub fn class(&self, a: usize) -> Result<&SphereClass> {
        self.classes.get(a).ok_or_else(|| Error::invariant(format!("unknown class index {a}")))
    }

    pub fn class_index(&self, name: &str) -> Result<usize> {
        self.classes.iter().position(|c| c.name == name).ok_or_else(|| Error::invariant(format!("unknown class '{name}'")))
    }

    pub fn c1x(&self, a: ClassRef) -> Result<i64> {
        Ok(match a {
            None => 0,
            Some(i) => self.class(i)?.c1,
        })
    }

    pub fn intersections(&self, a: ClassRef) -> Result<Vec<i64>> {
        Ok(match a {
            None => vec![0; self.q()],
            Some(i) => self.class(i)?.intersections.clone(),
        })
    }

    /// Admissible `K` sets for a class; the zero class lies in every `V_K`.
    pub fn admissible(&self, a: ClassRef) -> Result<Vec<KSet>> {
        let all = || KSet::all(self.q()).collect::<Vec<_>>();
        let Some(i) = a else {
            return Ok(all());
        };
        match &self.class(i)?.admissible {
            None => Ok(all()),
            Some(list) => {
                let mut out = BTreeSet::new();
                for k in list {
                    let idx = k.iter().map(|d| self.divisor_index(d)).collect::<Result<Vec<_>>>()?;
                    out.insert(KSet::from_indices(idx));
                }
                Ok(out.into_iter().collect())
            }
        }
    }

    pub fn q0_set(&self) -> Result<Option<KSet>> {
        match &self.q0 {
            None => Ok(None),
            Some(v) => Ok(Some(KSet::from_indices(v.iter().map(|d| self.divisor_index(d)).collect::<Result<Vec<_>>>()?))),
        }
    }
}

/// Adjunction: `c_1(TV_K)(A) = c_1(TX)(A) - sum_{q in K} A.V_q`.
pub fn c1_subvariety(a: ClassRef, k: KSet, geom: &GeometrySpec) -> Result<i64> {
    let c1 = geom.c1x(a)?;
    let av = geom.intersections(a)?;
    if k.indices().any(|q| q >= geom.q()) {
        return Err(Error::invariant("K refers to an unknown divisor"));
    }
    Ok(c1 - k.indices().map(|q| av[q]).sum::<i64>())
}

/// Interior tangency orders `t(i)` in `Z_{>=0}^Q`, one row per point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TangencyData {
    pub t: Vec<Vec<u32>>,
}

impl TangencyData {
    pub fn ell(&self) -> usize {
        self.t.len()
    }

    pub fn norm(&self, i: usize) -> u32 {
        self.t[i].iter().sum()
    }

    /// `K_i`: the nonzero coordinates of `t(i)`.
    pub fn support(&self, i: usize) -> KSet {
        KSet::from_indices(self.t[i].iter().enumerate().filter(|(_, &x)| x > 0).map(|(q, _)| q))
    }

    /// Column sums `sum_i t(i)_q`.
    pub fn totals(&self, q: usize) -> Vec<u32> {
        let mut out = vec![0; q];
        for row in &self.t {
            for (o, x) in out.iter_mut().zip(row) {
                *o += x;
            }
        }
        out
    }

    pub fn is_canonical(&self) -> bool {
        (0..self.ell()).all(|i| self.norm(i) == 1)
    }

    /// Rows as a sorted multiset, for comparison up to relabelling points.
    pub fn multiset(&self) -> Vec<Vec<u32>> {
        let mut v = self.t.clone();
        v.sort();
        v
    }
}

/// `t^can(i)_q = 1` iff `q(i) = q`; requires `|q^{-1}(q)| = A.V_q`.
pub fn canonical_tangency(a: ClassRef, q_assignment: &[usize], geom: &GeometrySpec) -> Result<TangencyData> {
    let av = geom.intersections(a)?;
    let mut counts = vec![0i64; geom.q()];
    for &q in q_assignment {
        if q >= geom.q() {
            return Err(Error::invariant("assignment refers to an unknown divisor"));
        }
        counts[q] += 1;
    }
    if counts != av {
        return Err(Error::invariant("multiplicity mismatch: |q^-1(q)| must equal A.V_q"));
    }
    let t = q_assignment.iter().map(|&q| (0..geom.q()).map(|j| u32::from(j == q)).collect()).collect();
    Ok(TangencyData { t })
}

/// Order of the subgroup of `Sym(l)` preserving `q`: `prod_q (A.V_q)!`.
pub fn sym_q_order(a: ClassRef, geom: &GeometrySpec) -> Result<BigInt> {
    let mut out = BigInt::from(1);
    for x in geom.intersections(a)? {
        for j in 2..=x {
            out *= j;
        }
    }
    Ok(out)
}

/// `[u].D = sum_q (u.V_q) w_q` as an effective class of the cone.
pub fn monomial_weight(cone: &Arc<Cone>, a: ClassRef, geom: &GeometrySpec) -> Result<EffectiveClass> {
    monomial_weight_of(cone, &geom.intersections(a)?, geom)
}

/// The weight of an arbitrary intersection vector, e.g. of a sum of classes.
pub fn monomial_weight_of(cone: &Arc<Cone>, intersections: &[i64], geom: &GeometrySpec) -> Result<EffectiveClass> {
    let w = geom.divisor_weights.as_ref().ok_or_else(|| Error::invariant("geometry has no divisor_weights"))?;
    if intersections.len() != w.len() {
        return Err(Error::invariant("intersection vector has the wrong length"));
    }
    let dim = cone.dim();
    let mut v = vec![0i64; dim];
    for (x, row) in intersections.iter().zip(w) {
        if row.len() != dim {
            return Err(Error::invariant("divisor weights do not match the cone dimension"));
        }
        for (vi, wi) in v.iter_mut().zip(row) {
            *vi += x * wi;
        }
    }
    if !cone.is_member(&v)? {
        return Err(Error::invariant(format!("[u].D = {v:?} is not in NE: the geometry is inconsistent")));
    }
    cone.class(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_ring::ConeSpec;

    pub(crate) fn geom(n: i64, classes: &[(i64, &[i64])]) -> GeometrySpec {
        let q = classes.first().map_or(0, |c| c.1.len());
        GeometrySpec {
            n,
            divisors: (0..q).map(|i| format!("V{i}")).collect(),
            classes: classes
                .iter()
                .enumerate()
                .map(|(i, (c1, av))| SphereClass { name: format!("A{i}"), c1: *c1, intersections: av.to_vec(), admissible: None })
                .collect(),
            q0: None,
            divisor_weights: None,
        }
    }

    #[test]
    fn adjunction_examples() {
        let g = geom(3, &[(3, &[1]), (2, &[1, 1][..1])]);
        assert_eq!(c1_subvariety(Some(0), KSet::EMPTY, &g).unwrap(), 3);
        assert_eq!(c1_subvariety(Some(0), KSet(1), &g).unwrap(), 2);
        let g = geom(3, &[(2, &[1, 1])]);
        assert_eq!(c1_subvariety(Some(0), KSet(0b11), &g).unwrap(), 0);
        assert!(c1_subvariety(Some(4), KSet::EMPTY, &g).is_err());
    }

    #[test]
    fn tangency_and_symmetry() {
        let g = geom(2, &[(1, &[2, 1]), (0, &[0, 0]), (1, &[3, 2])]);
        let t = canonical_tangency(Some(0), &[0, 1, 0], &g).unwrap();
        assert_eq!(t.ell(), 3);
        assert!(t.is_canonical());
        assert_eq!(t.totals(2), vec![2, 1]);
        let t2 = canonical_tangency(Some(0), &[1, 0, 0], &g).unwrap();
        assert_eq!(t.multiset(), t2.multiset());
        assert!(canonical_tangency(Some(0), &[0, 1], &g).is_err());
        assert_eq!(canonical_tangency(Some(1), &[], &g).unwrap().ell(), 0);
        assert_eq!(sym_q_order(Some(1), &g).unwrap(), 1.into());
        assert_eq!(sym_q_order(Some(0), &g).unwrap(), 2.into());
        assert_eq!(sym_q_order(Some(2), &g).unwrap(), 12.into());
    }

    #[test]
    fn weights() {
        let mut g = geom(2, &[(1, &[1, 0]), (1, &[0, 2])]);
        g.divisor_weights = Some(vec![vec![1, 0], vec![0, 1]]);
        let cone = Cone::new(ConeSpec::orthant(2)).unwrap();
        assert!(monomial_weight(&cone, None, &g).unwrap().is_zero());
        assert_eq!(monomial_weight(&cone, Some(0), &g).unwrap().coords(), &[1, 0]);
        let sum = monomial_weight_of(&cone, &[1, 2], &g).unwrap();
        let parts = cone.add(&monomial_weight(&cone, Some(0), &g).unwrap(), &monomial_weight(&cone, Some(1), &g).unwrap());
        assert_eq!(sum, parts);
        g.divisor_weights = Some(vec![vec![1, 0], vec![0, -1]]);
        assert!(monomial_weight(&cone, Some(1), &g).is_err());
    }

    #[test]
    fn validation() {
        let mut g = geom(2, &[(1, &[1, 0])]);
        g.validate().unwrap();
        g.classes[0].intersections[1] = -1;
        assert!(g.validate().is_err());
        let mut g = geom(2, &[(-1, &[1, 0])]);
        assert!(g.validate().is_err());
        g.classes[0].c1 = 0;
        g.classes[0].admissible = Some(vec![vec!["V9".into()]]);
        assert!(g.validate().is_err());
    }
}
