use std::collections::BTreeMap;

use super::algebra::{sign_series, CurvedAlgebra, Element, Generator};
use super::fixtures::endomorphism_algebra;
use crate::error::{Error, Result};

/// Input pattern `(a_1, ..., a_i; m; b_1, ..., b_j)` of `mu^{i|1|j}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BimoduleKey {
    pub left: Vec<usize>,
    pub module: usize,
    pub right: Vec<usize>,
}

/// A curved `A`-`B` bimodule with free basis. Parities are in the module's
/// own grading; `mu^{i|1|j}` has output parity `sum|a| + |m| + sum|b| + i + j + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    left: CurvedAlgebra,
    right: CurvedAlgebra,
    basis: Vec<Generator>,
    ops: BTreeMap<BimoduleKey, Element>,
}

impl Bimodule {
    pub fn new(left: CurvedAlgebra, right: CurvedAlgebra, basis: Vec<Generator>) -> Result<Self> {
        if left.ring() != right.ring() {
            return Err(Error::invariant("bimodule algebras live over different rings"));
        }
        if left.objects().len() != 1 || right.objects().len() != 1 {
            return Err(Error::invariant("bimodules are taken over one-object algebras"));
        }
        Ok(Bimodule { left, right, basis, ops: BTreeMap::new() })
    }

    pub fn left(&self) -> &CurvedAlgebra {
        &self.left
    }

    pub fn right(&self) -> &CurvedAlgebra {
        &self.right
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ops(&self) -> impl Iterator<Item = (&BimoduleKey, &Element)> {
        self.ops.iter()
    }

    pub fn op(&self, key: &BimoduleKey) -> Option<&Element> {
        self.ops.get(key)
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.left.ring(), self.rank())
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element::basis(self.left.ring(), self.rank(), i)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|g| g.name == name)
    }

    /// Largest total arity `i + j + 1` with a stored operation.
    pub fn k_max(&self) -> usize {
        self.ops.keys().map(|k| k.left.len() + k.right.len() + 1).max().unwrap_or(0)
    }

    fn check_op(&self, key: &BimoduleKey, out: &Element) -> Result<()> {
        if out.rank() != self.rank() {
            return Err(Error::invariant("bimodule output has the wrong rank"));
        }
        if out.coeffs().iter().any(|c| c.ring() != *self.left.ring()) {
            return Err(Error::invariant("bimodule output lives over a different ring"));
        }
        if key.module >= self.rank() || key.left.iter().any(|&i| i >= self.left.rank()) || key.right.iter().any(|&i| i >= self.right.rank())
        {
            return Err(Error::invariant("bimodule input index out of range"));
        }
        let sum = key.left.iter().map(|&i| self.left.basis()[i].parity as usize).sum::<usize>()
            + self.basis[key.module].parity as usize
            + key.right.iter().map(|&i| self.right.basis()[i].parity as usize).sum::<usize>();
        let want = (sum + key.left.len() + key.right.len() + 1) % 2;
        if out.support().any(|j| self.basis[j].parity as usize != want) {
            return Err(Error::invariant(format!("degree rule violated by mu^{{{}|1|{}}}", key.left.len(), key.right.len())));
        }
        Ok(())
    }

    /// Adds `out` to the stored value of `mu^{i|1|j}(key)`.
    pub fn add_op(&mut self, key: BimoduleKey, out: Element) -> Result<()> {
        self.check_op(&key, &out)?;
        let cur = self.ops.remove(&key).map(|c| c.add(&out)).unwrap_or(out);
        if !cur.is_zero() {
            self.ops.insert(key, cur);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()?;
        for (k, v) in &self.ops {
            self.check_op(k, v)?;
        }
        Ok(())
    }

    /// Multilinear evaluation of `mu^{i|1|j}`.
    pub fn apply(&self, a: &[&Element], m: &Element, b: &[&Element]) -> Element {
        let mut out = self.zero();
        for (key, val) in &self.ops {
            if key.left.len() != a.len() || key.right.len() != b.len() {
                continue;
            }
            let mut c = m.coeff(key.module).clone();
            for (s, &i) in key.left.iter().enumerate() {
                if c.is_zero() {
                    break;
                }
                c = &c * a[s].coeff(i);
            }
            for (s, &i) in key.right.iter().enumerate() {
                if c.is_zero() {
                    break;
                }
                c = &c * b[s].coeff(i);
            }
            if !c.is_zero() {
                out.add_assign_scaled(val, &c);
            }
        }
        out
    }

    /// The bimodule `hom(X, Y)` over `End(X)` and `End(Y)` of a category,
    /// `mu_M(a; m; b) = (-1)^(sum of reduced degrees of b) mu(a, m, b)`.
    /// The sign makes the triangle algebra on `End(X) + hom(X,Y)[-1] + End(Y)`
    /// satisfy the relations whenever the category does.
    pub fn from_category(cat: &CurvedAlgebra, x: usize, y: usize) -> Result<Self> {
        if x >= cat.objects().len() || y >= cat.objects().len() {
            return Err(Error::invariant("unknown object"));
        }
        let (left, lidx) = endomorphism_algebra(cat, x);
        let (right, ridx) = endomorphism_algebra(cat, y);
        let midx = cat.hom_indices(x, y);
        let basis = midx.iter().map(|&i| cat.basis()[i].clone()).collect();
        let mut out = Bimodule::new(left, right, basis)?;
        let ring = cat.ring().clone();
        for (key, val) in cat.all_ops() {
            for p in 0..key.len() {
                let Some(module) = midx.iter().position(|&i| i == key[p]) else {
                    continue;
                };
                let Some(l) = key[..p].iter().map(|i| lidx.iter().position(|j| j == i)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let Some(r) = key[p + 1..].iter().map(|i| ridx.iter().position(|j| j == i)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let neg = key[p + 1..].iter().map(|&i| cat.basis()[i].reduced() as usize).sum::<usize>() % 2 == 1;
                let coeffs = midx.iter().map(|&i| val.coeff(i).clone()).collect();
                let e = Element::from_coeffs(coeffs).scale(&sign_series(&ring, neg));
                out.add_op(BimoduleKey { left: l, module, right: r }, e)?;
            }
        }
        Ok(out)
    }

    /// The diagonal bimodule of a one-object algebra.
    pub fn diagonal(alg: &CurvedAlgebra) -> Result<Self> {
        if alg.objects().len() != 1 {
            return Err(Error::invariant("the diagonal bimodule needs a one-object algebra"));
        }
        Self::from_category(alg, 0, 0)
    }

    /// Same algebras, no generators.
    pub fn zero_module(left: CurvedAlgebra, right: CurvedAlgebra) -> Result<Self> {
        Self::new(left, right, Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty_core::fixtures;
    use crate::cone_ring::{BaseRing, Cone, ConeSpec};

    fn ring() -> BaseRing {
        BaseRing::new(Cone::new(ConeSpec::orthant(1)).unwrap(), 3)
    }

    #[test]
    fn diagonal_of_ring() {
        let r = ring();
        let a = fixtures::quadratic_ring(&r, 2);
        let m = Bimodule::diagonal(&a).unwrap();
        m.validate().unwrap();
        assert_eq!(m.rank(), 2);
        // every mu^2 entry appears once as left action and once as right action
        assert_eq!(m.ops().count(), 8);
        let x = m.basis_element(1);
        let ax = m.apply(&[&a.basis_element(1)], &x, &[]);
        assert_eq!(ax.coeff(0), &crate::ainfty_core::int(&r, 2));
    }

    #[test]
    fn right_action_sign() {
        let r = ring();
        let c = fixtures::clifford(&r, &[r.zero(), r.zero(), r.one()]);
        let m = Bimodule::diagonal(&c).unwrap();
        let one = m.basis_element(0);
        let xi = c.basis_element(1);
        // xi is odd, so its reduced degree is 0 and no sign appears
        assert_eq!(m.apply(&[], &one, &[&xi]), m.basis_element(1));
        // the unit has reduced degree 1: mu_M(; xi; 1) = -mu^2(xi, 1) = xi
        let unit = c.basis_element(0);
        assert_eq!(m.apply(&[], &m.basis_element(1), &[&unit]), m.basis_element(1));
    }

    #[test]
    fn degree_rule_enforced() {
        let r = ring();
        let a = fixtures::quadratic_ring(&r, 1);
        let mut m = Bimodule::new(a.clone(), a, vec![Generator::new("m", 0)]).unwrap();
        let bad = BimoduleKey { left: vec![], module: 0, right: vec![] };
        assert!(m.add_op(bad, Element::basis(&r, 1, 0)).is_err());
    }
}
