use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cone::{Cone, EffectiveClass};
use crate::error::{Error, Result};

/// Element of the completed monoid ring modulo the `trunc_order`-th power of
/// the maximal ideal. Only classes of order below `trunc_order` are stored.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    cone: Arc<Cone>,
    trunc_order: u32,
    terms: BTreeMap<EffectiveClass, BigInt>,
}

impl PartialEq for PowerSeries {
    fn eq(&self, other: &Self) -> bool {
        same_cone(&self.cone, &other.cone) && self.trunc_order == other.trunc_order && self.terms == other.terms
    }
}

impl Eq for PowerSeries {}

pub(crate) fn same_cone(a: &Arc<Cone>, b: &Arc<Cone>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// The ring `Z[[NE]] / m^N` that series live in.
#[derive(Clone, Debug)]
pub struct BaseRing {
    pub cone: Arc<Cone>,
    pub trunc_order: u32,
}

impl PartialEq for BaseRing {
    fn eq(&self, other: &Self) -> bool {
        same_cone(&self.cone, &other.cone) && self.trunc_order == other.trunc_order
    }
}

impl Eq for BaseRing {}

impl BaseRing {
    pub fn new(cone: Arc<Cone>, trunc_order: u32) -> Self {
        BaseRing { cone, trunc_order }
    }

    pub fn zero(&self) -> PowerSeries {
        PowerSeries::zero(self.cone.clone(), self.trunc_order)
    }

    pub fn one(&self) -> PowerSeries {
        self.constant(BigInt::one())
    }

    pub fn constant(&self, c: impl Into<BigInt>) -> PowerSeries {
        PowerSeries::monomial(self.cone.clone(), self.trunc_order, self.cone.zero_class(), c.into())
    }

    pub fn monomial(&self, coords: &[i64], c: impl Into<BigInt>) -> Result<PowerSeries> {
        let class = self.cone.class(coords)?;
        Ok(PowerSeries::monomial(self.cone.clone(), self.trunc_order, class, c.into()))
    }

    /// Same cone, different truncation.
    pub fn with_trunc(&self, trunc_order: u32) -> BaseRing {
        BaseRing { cone: self.cone.clone(), trunc_order }
    }
}

impl PowerSeries {
    pub fn zero(cone: Arc<Cone>, trunc_order: u32) -> Self {
        PowerSeries { cone, trunc_order, terms: BTreeMap::new() }
    }

    pub fn monomial(cone: Arc<Cone>, trunc_order: u32, class: EffectiveClass, coeff: BigInt) -> Self {
        let mut s = Self::zero(cone, trunc_order);
        s.add_term(class, coeff);
        s
    }

    /// Builds from arbitrary terms; classes at or past the truncation are dropped.
    pub fn from_terms(cone: Arc<Cone>, trunc_order: u32, terms: impl IntoIterator<Item = (EffectiveClass, BigInt)>) -> Self {
        let mut s = Self::zero(cone, trunc_order);
        for (c, v) in terms {
            s.add_term(c, v);
        }
        s
    }

    pub fn cone(&self) -> &Arc<Cone> {
        &self.cone
    }

    pub fn trunc_order(&self) -> u32 {
        self.trunc_order
    }

    pub fn ring(&self) -> BaseRing {
        BaseRing { cone: self.cone.clone(), trunc_order: self.trunc_order }
    }

    pub fn terms(&self) -> &BTreeMap<EffectiveClass, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, class: &EffectiveClass) -> BigInt {
        self.terms.get(class).cloned().unwrap_or_default()
    }

    /// Coefficient of the zero class.
    pub fn constant_term(&self) -> BigInt {
        self.coeff(&self.cone.zero_class())
    }

    pub fn add_term(&mut self, class: EffectiveClass, coeff: BigInt) {
        if coeff.is_zero() || class.ord() >= self.trunc_order {
            return;
        }
        match self.terms.entry(class) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_cone(&self, other: &PowerSeries) -> Result<()> {
        if !same_cone(&self.cone, &other.cone) {
            return Err(Error::invariant("series over different cones cannot be combined"));
        }
        Ok(())
    }

    /// Minimum 𝔪-adic order of the support; `None` for the zero series.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(EffectiveClass::ord).min()
    }

    pub fn truncate(&self, n: u32) -> PowerSeries {
        let n = n.min(self.trunc_order);
        PowerSeries {
            cone: self.cone.clone(),
            trunc_order: n,
            terms: self.terms.iter().filter(|(c, _)| c.ord() < n).map(|(c, v)| (c.clone(), v.clone())).collect(),
        }
    }

    /// Terms of order exactly `k`.
    pub fn graded_part(&self, k: u32) -> PowerSeries {
        PowerSeries {
            cone: self.cone.clone(),
            trunc_order: self.trunc_order,
            terms: self.terms.iter().filter(|(c, _)| c.ord() == k).map(|(c, v)| (c.clone(), v.clone())).collect(),
        }
    }

    pub fn try_add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_cone(other)?;
        let mut out = self.truncate(other.trunc_order);
        for (c, v) in &other.terms {
            out.add_term(c.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> PowerSeries {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> PowerSeries {
        if k.is_zero() {
            return Self::zero(self.cone.clone(), self.trunc_order);
        }
        PowerSeries {
            cone: self.cone.clone(),
            trunc_order: self.trunc_order,
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v * k)).collect(),
        }
    }

    /// Convolution restricted to classes of order below the smaller truncation.
    pub fn try_mul(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_cone(other)?;
        let n = self.trunc_order.min(other.trunc_order);
        let mut acc: BTreeMap<EffectiveClass, BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            if a.ord() >= n {
                continue;
            }
            for (b, y) in &other.terms {
                if a.ord() + b.ord() >= n {
                    continue;
                }
                let c = self.cone.add(a, b);
                if c.ord() < n {
                    *acc.entry(c).or_default() += x * y;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(PowerSeries { cone: self.cone.clone(), trunc_order: n, terms: acc })
    }

    /// In-place `self += k * other` (same ring assumed).
    pub fn add_scaled(&mut self, other: &PowerSeries, k: &BigInt) {
        for (c, v) in &other.terms {
            self.add_term(c.clone(), v * k);
        }
    }

    pub fn pow(&self, e: u32) -> PowerSeries {
        let mut out = PowerSeries::monomial(self.cone.clone(), self.trunc_order, self.cone.zero_class(), BigInt::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl std::ops::Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        self.try_add(rhs).expect("series over different cones")
    }
}

impl std::ops::Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        self.try_sub(rhs).expect("series over different cones")
    }
}

impl std::ops::Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        self.try_mul(rhs).expect("series over different cones")
    }
}

impl std::ops::Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries::neg(self)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(c, v)| if c.is_zero() { v.to_string() } else { format!("{v}*T^{c}") }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_ring::ConeSpec;

    fn ring(spec: ConeSpec, n: u32) -> BaseRing {
        BaseRing::new(Cone::new(spec).unwrap(), n)
    }

    #[test]
    fn difference_of_squares() {
        let r = ring(ConeSpec::orthant(2), 4);
        let t = r.monomial(&[1, 0], 1).unwrap();
        let lhs = &(&r.one() + &t) * &(&r.one() - &t);
        let rhs = &r.one() - &r.monomial(&[2, 0], 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn geometric_inverse_one_generator() {
        let r = ring(ConeSpec::orthant(1), 3);
        let t = r.monomial(&[1], 1).unwrap();
        let g = &(&r.one() + &t) + &r.monomial(&[2], 1).unwrap();
        assert_eq!(&(&r.one() - &t) * &g, r.one());
    }

    #[test]
    fn monomials_multiply() {
        let r = ring(ConeSpec::orthant(2), 6);
        let a = r.monomial(&[1, 2], 1).unwrap();
        let b = r.monomial(&[0, 1], 1).unwrap();
        assert_eq!(&a * &b, r.monomial(&[1, 3], 1).unwrap());
        // order 5 + 1 reaches the truncation
        let c = r.monomial(&[1, 4], 1).unwrap();
        assert!((&c * &b).is_zero());
    }

    #[test]
    fn valuations() {
        let r = ring(ConeSpec::orthant(2), 6);
        assert_eq!(r.zero().valuation(), None);
        assert_eq!((&r.one() + &r.monomial(&[1, 0], 1).unwrap()).valuation(), Some(0));
        assert_eq!(r.monomial(&[2, 1], 3).unwrap().valuation(), Some(3));
    }

    #[test]
    fn truncation_is_min() {
        let c = Cone::new(ConeSpec::orthant(1)).unwrap();
        let a = BaseRing::new(c.clone(), 5).monomial(&[2], 1).unwrap();
        let b = BaseRing::new(c, 3).one();
        assert_eq!((&a + &b).trunc_order(), 3);
        assert_eq!((&a * &b).trunc_order(), 3);
        assert_eq!(&a * &b, BaseRing::new(a.cone().clone(), 3).monomial(&[2], 1).unwrap());
    }

    #[test]
    fn cone_mismatch_is_an_error() {
        let a = ring(ConeSpec::orthant(1), 3).one();
        let b = ring(ConeSpec::new(1, vec![vec![2]]), 3).one();
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
    }
}
