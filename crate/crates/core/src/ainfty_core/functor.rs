use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::algebra::{CurvedAlgebra, Element, Generator};
use crate::cone_ring::BaseRing;
use crate::error::{Error, Result};

/// Components `G^k` of a curved filtered functor between one-object
/// algebras, stored like operations: input tuple in the source basis to an
/// element of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvedFunctor {
    ring: BaseRing,
    source_rank: usize,
    target_rank: usize,
    components: BTreeMap<Vec<usize>, Element>,
}

impl CurvedFunctor {
    pub fn new(ring: BaseRing, source_rank: usize, target_rank: usize) -> Self {
        CurvedFunctor { ring, source_rank, target_rank, components: BTreeMap::new() }
    }

    /// The identity functor: `G^1 = id`, all other components zero.
    pub fn identity(alg: &CurvedAlgebra) -> Self {
        let mut g = Self::new(alg.ring().clone(), alg.rank(), alg.rank());
        for i in 0..alg.rank() {
            g.components.insert(vec![i], alg.basis_element(i));
        }
        g
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Element)> {
        self.components.iter()
    }

    pub fn component(&self, key: &[usize]) -> Option<&Element> {
        self.components.get(key)
    }

    /// Adds `out` to `G(key)`.
    pub fn add_component(&mut self, key: Vec<usize>, out: Element) -> Result<()> {
        if out.rank() != self.target_rank {
            return Err(Error::invariant("functor component has the wrong target rank"));
        }
        if key.iter().any(|&i| i >= self.source_rank) {
            return Err(Error::invariant("functor input index out of range"));
        }
        let cur = self.components.remove(&key).map(|c| c.add(&out)).unwrap_or(out);
        if !cur.is_zero() {
            self.components.insert(key, cur);
        }
        Ok(())
    }

    pub fn curvature(&self) -> Option<&Element> {
        self.components.get(&Vec::new())
    }

    /// Checks the curvature condition and, given both algebras, the degree
    /// rule `|G^k(x)| = sum |x_i| + k + 1`.
    pub fn validate(&self, source: &CurvedAlgebra, target: &CurvedAlgebra) -> Result<()> {
        if source.rank() != self.source_rank || target.rank() != self.target_rank {
            return Err(Error::invariant("functor ranks do not match the algebras"));
        }
        if let Some(v) = self.curvature().and_then(|c| c.valuation()) {
            if v < 1 {
                return Err(Error::invariant("curvature condition: G^0 must lie in the maximal ideal"));
            }
        }
        for (key, out) in &self.components {
            let want = (key.iter().map(|&i| source.basis()[i].parity as usize).sum::<usize>() + key.len() + 1) % 2;
            if out.support().any(|j| target.basis()[j].parity as usize != want) {
                return Err(Error::invariant(format!("degree rule violated by G^{}({})", key.len(), source.names(key))));
            }
        }
        Ok(())
    }
}

/// `sum_k G^k(x, ..., x)`; finite because every stored component has a
/// fixed arity and higher powers of `x` die in the truncation.
pub fn pushforward_mc(g: &CurvedFunctor, x: &Element) -> Result<Element> {
    if let Some(v) = g.curvature().and_then(|c| c.valuation()) {
        if v < 1 {
            return Err(Error::invariant("curvature condition: G^0 must lie in the maximal ideal"));
        }
    }
    if x.rank() != g.source_rank {
        return Err(Error::invariant("element rank does not match the functor source"));
    }
    let mut out = Element::zero(&g.ring, g.target_rank);
    for (key, val) in &g.components {
        let mut c = g.ring.one();
        for &i in key {
            c = &c * x.coeff(i);
            if c.is_zero() {
                break;
            }
        }
        if !c.is_zero() {
            out.add_assign_scaled(val, &c);
        }
    }
    Ok(out)
}

/// Transports `alg` along the signed permutation `e_i -> signs[i] e_perm[i]`,
/// returning the relabelled algebra and the strict isomorphism onto it.
pub fn relabel(alg: &CurvedAlgebra, perm: &[usize], signs: &[i64]) -> Result<(CurvedAlgebra, CurvedFunctor)> {
    let n = alg.rank();
    let mut seen = vec![false; n];
    if perm.len() != n || signs.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::invariant("relabelling needs a permutation of the basis"));
    }
    if signs.iter().any(|s| s.abs() != 1) {
        return Err(Error::invariant("relabelling signs must be +1 or -1"));
    }
    if alg.objects().len() != 1 {
        return Err(Error::invariant("relabelling takes one-object algebras"));
    }
    let ring = alg.ring();
    let mut basis = vec![Generator::new("", 0); n];
    for i in 0..n {
        basis[perm[i]] = alg.basis()[i].clone();
    }
    let phi = |e: &Element| {
        let mut out = Element::zero(ring, n);
        for i in e.support() {
            *out.coeff_mut(perm[i]) = e.coeff(i).scale(&BigInt::from(signs[i]));
        }
        out
    };
    let mut target = CurvedAlgebra::new(ring.clone(), basis);
    for (key, val) in alg.all_ops() {
        let sign: i64 = key.iter().map(|&i| signs[i]).product();
        let new_key = key.iter().map(|&i| perm[i]).collect();
        target.add_op(new_key, phi(val).scale_int(&BigInt::from(sign)))?;
    }
    let mut g = CurvedFunctor::new(ring.clone(), n, n);
    for i in 0..n {
        g.add_component(vec![i], phi(&alg.basis_element(i)))?;
    }
    Ok((target, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty_core::deform::check_mc;
    use crate::ainfty_core::fixtures;
    use crate::ainfty_core::relations::check_curved_ainfty;
    use crate::cone_ring::{Cone, ConeSpec};

    fn ring() -> BaseRing {
        BaseRing::new(Cone::new(ConeSpec::orthant(1)).unwrap(), 4)
    }

    #[test]
    fn identity_pushforward() {
        let r = ring();
        let t = r.monomial(&[1], 1).unwrap();
        let c = fixtures::clifford(&r, &[t.neg(), r.one()]);
        let x = fixtures::scaled(&c, 1, t);
        assert_eq!(pushforward_mc(&CurvedFunctor::identity(&c), &x).unwrap(), x);
    }

    #[test]
    fn strict_isomorphism_preserves_mc() {
        let r = ring();
        let t = r.monomial(&[1], 1).unwrap();
        let c = fixtures::clifford(&r, &[t.neg(), r.one(), r.zero(), t.clone()]);
        let x = fixtures::scaled(&c, 1, t.clone());
        assert!(check_mc(&c, &x).unwrap());
        let (target, g) = relabel(&c, &[1, 0], &[1, -1]).unwrap();
        g.validate(&c, &target).unwrap();
        assert!(check_curved_ainfty(&target, 4).passed());
        let y = pushforward_mc(&g, &x).unwrap();
        assert_eq!(y.coeff(0), &t.neg());
        assert!(check_mc(&target, &y).unwrap());
    }

    #[test]
    fn curvature_of_functor() {
        let r = ring();
        let c = fixtures::clifford(&r, &[r.zero(), r.one()]);
        let mut g = CurvedFunctor::identity(&c);
        let g0 = fixtures::scaled(&c, 1, r.monomial(&[1], 2).unwrap());
        g.add_component(vec![], g0.clone()).unwrap();
        assert_eq!(pushforward_mc(&g, &c.zero()).unwrap(), g0);
        let mut bad = CurvedFunctor::identity(&c);
        bad.add_component(vec![], fixtures::scaled(&c, 1, r.one())).unwrap();
        assert!(pushforward_mc(&bad, &c.zero()).is_err());
    }
}
