use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::cone::{rational_pairing, Cone};
use super::series::{same_cone, PowerSeries};
use crate::error::{Error, Result};

/// Finite Novikov series `sum n_l t^l` with all exponents below `trunc_level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NovikovSeries {
    exponents: BTreeMap<BigRational, BigInt>,
    trunc_level: BigRational,
}

impl NovikovSeries {
    pub fn zero(trunc_level: BigRational) -> Self {
        NovikovSeries { exponents: BTreeMap::new(), trunc_level }
    }

    pub fn exponents(&self) -> &BTreeMap<BigRational, BigInt> {
        &self.exponents
    }

    pub fn trunc_level(&self) -> &BigRational {
        &self.trunc_level
    }

    pub fn add_term(&mut self, exp: BigRational, coeff: BigInt) {
        if coeff.is_zero() || exp >= self.trunc_level {
            return;
        }
        let e = self.exponents.entry(exp.clone()).or_default();
        *e += coeff;
        if e.is_zero() {
            self.exponents.remove(&exp);
        }
    }

    /// Smallest exponent present; `None` for zero.
    pub fn min_exponent(&self) -> Option<&BigRational> {
        self.exponents.keys().next()
    }

    pub fn add(&self, other: &NovikovSeries) -> NovikovSeries {
        let level = self.trunc_level.clone().min(other.trunc_level.clone());
        let mut out = NovikovSeries::zero(level);
        for (e, c) in self.exponents.iter().chain(&other.exponents) {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &NovikovSeries) -> NovikovSeries {
        let level = self.trunc_level.clone().min(other.trunc_level.clone());
        let mut out = NovikovSeries::zero(level);
        for (e1, c1) in &self.exponents {
            for (e2, c2) in &other.exponents {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.exponents.iter().map(|(e, c)| format!("{c}*t^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The specialization `T^b -> t^{kappa(b)}` for an interior `kappa`.
#[derive(Clone, Debug)]
pub struct Specializer {
    cone: Arc<Cone>,
    kappa: Vec<BigRational>,
    scale: BigRational,
}

impl Specializer {
    pub fn new(cone: Arc<Cone>, kappa: Vec<BigRational>) -> Result<Self> {
        if kappa.len() != cone.dim() {
            return Err(Error::invariant(format!("kappa has length {} but the cone lives in dimension {}", kappa.len(), cone.dim())));
        }
        for r in cone.extreme_rays() {
            if !rational_pairing(&kappa, r).is_positive() {
                return Err(Error::invariant(format!("kappa is not interior: ray {r:?} maps to exponent {}", rational_pairing(&kappa, r))));
            }
        }
        let scale = cone
            .hilbert_basis()
            .iter()
            .map(|h| rational_pairing(&kappa, h.coords()))
            .min()
            .ok_or_else(|| Error::invariant("effective monoid has no nonzero classes"))?;
        Ok(Specializer { cone, kappa, scale })
    }

    /// Minimum of `kappa` over nonzero effective classes.
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn kappa(&self) -> &[BigRational] {
        &self.kappa
    }

    pub fn specialize(&self, a: &PowerSeries) -> Result<NovikovSeries> {
        if !same_cone(a.cone(), &self.cone) {
            return Err(Error::invariant("series and specializer use different cones"));
        }
        let level = &self.scale * BigInt::from(a.trunc_order());
        let mut out = NovikovSeries::zero(level);
        for (c, v) in a.terms() {
            out.add_term(rational_pairing(&self.kappa, c.coords()), v.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_ring::{BaseRing, ConeSpec};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn exponent_collision() {
        let cone = Cone::new(ConeSpec::orthant(2)).unwrap();
        let r = BaseRing::new(cone.clone(), 4);
        let s = Specializer::new(cone, vec![q(1), q(1)]).unwrap();
        assert_eq!(s.scale(), &q(1));
        let x = r.monomial(&[1, 0], 1).unwrap();
        let n = s.specialize(&x).unwrap();
        assert_eq!(n.exponents().get(&q(1)), Some(&BigInt::from(1)));
        let y = &x + &r.monomial(&[0, 1], 1).unwrap();
        let n = s.specialize(&y).unwrap();
        assert_eq!(n.exponents().len(), 1);
        assert_eq!(n.exponents().get(&q(1)), Some(&BigInt::from(2)));
        assert_eq!(n.trunc_level(), &q(4));
    }

    #[test]
    fn boundary_kappa_rejected() {
        let cone = Cone::new(ConeSpec::orthant(2)).unwrap();
        assert!(Specializer::new(cone.clone(), vec![q(1), q(0)]).is_err());
        assert!(Specializer::new(cone, vec![q(1)]).is_err());
    }

    #[test]
    fn scale_on_skew_cone() {
        // NE = {x >= 0, x + 2y >= 0}; Hilbert basis (0,1), (1,0), (2,-1)
        let cone = Cone::new(ConeSpec::new(2, vec![vec![1, 0], vec![1, 2]])).unwrap();
        let s = Specializer::new(cone, vec![q(1), BigRational::new(3.into(), 2.into())]).unwrap();
        assert_eq!(s.scale(), &BigRational::new(1.into(), 2.into()));
    }
}
