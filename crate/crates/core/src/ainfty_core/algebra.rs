use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cone_ring::{BaseRing, PowerSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub parity: u8,
}

impl Generator {
    pub fn new(name: impl Into<String>, parity: u8) -> Self {
        Generator { name: name.into(), parity: parity % 2 }
    }

    /// Parity of the reduced degree `|x| - 1`.
    pub fn reduced(&self) -> u8 {
        (self.parity + 1) % 2
    }
}

/// Coefficient vector over a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    coeffs: Vec<PowerSeries>,
}

impl Element {
    pub fn zero(ring: &BaseRing, rank: usize) -> Self {
        Element { coeffs: vec![ring.zero(); rank] }
    }

    pub fn basis(ring: &BaseRing, rank: usize, i: usize) -> Self {
        Self::single(ring, rank, i, ring.one())
    }

    pub fn single(ring: &BaseRing, rank: usize, i: usize, c: PowerSeries) -> Self {
        let mut e = Self::zero(ring, rank);
        e.coeffs[i] = c;
        e
    }

    pub fn from_coeffs(coeffs: Vec<PowerSeries>) -> Self {
        Element { coeffs }
    }

    pub fn coeffs(&self) -> &[PowerSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &PowerSeries {
        &self.coeffs[i]
    }

    pub fn coeff_mut(&mut self, i: usize) -> &mut PowerSeries {
        &mut self.coeffs[i]
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(PowerSeries::is_zero)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i)
    }

    /// Minimum valuation over the coefficients; `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(PowerSeries::valuation).min()
    }

    /// Common parity of the support; `Ok(None)` for zero, error if mixed.
    pub fn parity(&self, basis: &[Generator]) -> Result<Option<u8>> {
        let mut found = None;
        for i in self.support() {
            match found {
                None => found = Some(basis[i].parity),
                Some(p) if p != basis[i].parity => {
                    return Err(Error::invariant("element is not homogeneous"));
                }
                _ => {}
            }
        }
        Ok(found)
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(self.rank(), other.rank(), "element ranks differ");
        Element { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Element) -> Element {
        assert_eq!(self.rank(), other.rank(), "element ranks differ");
        Element { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Element {
        Element { coeffs: self.coeffs.iter().map(PowerSeries::neg).collect() }
    }

    pub fn scale(&self, c: &PowerSeries) -> Element {
        Element { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn scale_int(&self, k: &BigInt) -> Element {
        Element { coeffs: self.coeffs.iter().map(|a| a.scale(k)).collect() }
    }

    /// `self += c * other`.
    pub fn add_assign_scaled(&mut self, other: &Element, c: &PowerSeries) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a = &*a + &(b * c);
            }
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&PowerSeries) -> PowerSeries) -> Element {
        Element { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Terms of order exactly `k` in every coefficient.
    pub fn graded_part(&self, k: u32) -> Element {
        self.map_coeffs(|c| c.graded_part(k))
    }

    pub fn truncate(&self, n: u32) -> Element {
        self.map_coeffs(|c| c.truncate(n))
    }

    /// Human-readable `name: series` pairs for reports.
    pub fn describe(&self, basis: &[Generator]) -> Vec<(String, String)> {
        self.support().map(|i| (basis[i].name.clone(), self.coeffs[i].to_string())).collect()
    }
}

pub type OpTable = BTreeMap<Vec<usize>, Element>;

/// Curved filtered A-infinity category with finitely many objects; a curved
/// algebra is the one-object case. Morphism modules are free over the base
/// ring on `basis`, each basis element carrying source and target objects.
///
/// Operations are stored sparsely: `ops[k]` maps a k-tuple of basis indices
/// to `mu^k` of those basis elements. Argument order is composition order:
/// `mu(x_1, ..., x_k)` with `x_1` leaving the source object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvedAlgebra {
    ring: BaseRing,
    basis: Vec<Generator>,
    objects: Vec<String>,
    ends: Vec<(usize, usize)>,
    ops: Vec<OpTable>,
}

pub type CurvedCategory = CurvedAlgebra;

impl CurvedAlgebra {
    pub fn new(ring: BaseRing, basis: Vec<Generator>) -> Self {
        let n = basis.len();
        CurvedAlgebra { ring, basis, objects: vec!["*".into()], ends: vec![(0, 0); n], ops: Vec::new() }
    }

    pub fn new_category(ring: BaseRing, basis: Vec<Generator>, objects: Vec<String>, ends: Vec<(usize, usize)>) -> Result<Self> {
        if ends.len() != basis.len() {
            return Err(Error::invariant("every basis element needs source and target objects"));
        }
        if ends.iter().any(|&(s, t)| s >= objects.len() || t >= objects.len()) {
            return Err(Error::invariant("basis element refers to an unknown object"));
        }
        Ok(CurvedAlgebra { ring, basis, objects, ends, ops: Vec::new() })
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|g| g.name == name)
    }

    /// Largest arity with a stored operation.
    pub fn k_max(&self) -> usize {
        self.ops.iter().rposition(|t| !t.is_empty()).unwrap_or(0)
    }

    pub fn ops(&self, k: usize) -> Option<&OpTable> {
        self.ops.get(k)
    }

    pub fn all_ops(&self) -> impl Iterator<Item = (&Vec<usize>, &Element)> {
        self.ops.iter().flat_map(|t| t.iter())
    }

    pub fn op(&self, key: &[usize]) -> Option<&Element> {
        self.ops.get(key.len()).and_then(|t| t.get(key))
    }

    pub fn zero(&self) -> Element {
        Element::zero(&self.ring, self.rank())
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element::basis(&self.ring, self.rank(), i)
    }

    pub fn curvature(&self) -> Element {
        self.op(&[]).cloned().unwrap_or_else(|| self.zero())
    }

    pub fn is_composable(&self, key: &[usize]) -> bool {
        key.windows(2).all(|w| self.ends[w[0]].1 == self.ends[w[1]].0)
    }

    fn check_op(&self, key: &[usize], out: &Element) -> Result<()> {
        let n = self.rank();
        if out.rank() != n {
            return Err(Error::invariant("operation output has the wrong rank"));
        }
        if out.coeffs().iter().any(|c| c.ring() != self.ring) {
            return Err(Error::invariant("operation output lives over a different ring"));
        }
        if key.iter().any(|&i| i >= n) {
            return Err(Error::invariant("operation input index out of range"));
        }
        if !self.is_composable(key) {
            return Err(Error::invariant(format!("inputs {} are not composable", self.names(key))));
        }
        let want = (key.iter().map(|&i| self.basis[i].parity as usize).sum::<usize>() + key.len()) % 2;
        for j in out.support() {
            if self.basis[j].parity as usize != want {
                return Err(Error::invariant(format!(
                    "degree rule: mu^{}({}) has a component on {} of the wrong parity",
                    key.len(),
                    self.names(key),
                    self.basis[j].name
                )));
            }
            let expect = match key.first() {
                Some(&f) => (self.ends[f].0, self.ends[*key.last().expect("nonempty")].1),
                None => (self.ends[j].0, self.ends[j].0),
            };
            if self.ends[j] != expect {
                return Err(Error::invariant(format!(
                    "mu^{}({}) has a component on {} outside the expected morphism space",
                    key.len(),
                    self.names(key),
                    self.basis[j].name
                )));
            }
        }
        Ok(())
    }

    /// Adds `out` to the stored value of `mu(key)`.
    pub fn add_op(&mut self, key: Vec<usize>, out: Element) -> Result<()> {
        self.check_op(&key, &out)?;
        if out.is_zero() {
            return Ok(());
        }
        let k = key.len();
        if self.ops.len() <= k {
            self.ops.resize_with(k + 1, BTreeMap::new);
        }
        let table = &mut self.ops[k];
        match table.get_mut(&key) {
            Some(cur) => {
                *cur = cur.add(&out);
                if cur.is_zero() {
                    table.remove(&key);
                }
            }
            None => {
                table.insert(key, out);
            }
        }
        Ok(())
    }

    /// Adds `c * e_out` to `mu(inputs)`, with every name looked up in the basis.
    pub fn add_op_named(&mut self, inputs: &[&str], out: &str, c: PowerSeries) -> Result<()> {
        let key = inputs
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| Error::invariant(format!("unknown generator '{n}'"))))
            .collect::<Result<Vec<_>>>()?;
        let j = self.index_of(out).ok_or_else(|| Error::invariant(format!("unknown generator '{out}'")))?;
        let e = Element::single(&self.ring, self.rank(), j, c);
        self.add_op(key, e)
    }

    /// Full invariant check, including the curvature filtration condition.
    pub fn validate(&self) -> Result<()> {
        for (key, out) in self.all_ops() {
            self.check_op(key, out)?;
        }
        if let Some(v) = self.curvature().valuation() {
            if v < 1 {
                return Err(Error::invariant("curvature condition: mu^0 must lie in the maximal ideal (valuation >= 1)"));
            }
        }
        Ok(())
    }

    pub fn names(&self, key: &[usize]) -> String {
        key.iter().map(|&i| self.basis[i].name.as_str()).collect::<Vec<_>>().join(",")
    }

    /// Multilinear evaluation of `mu^k` on arbitrary elements.
    pub fn apply(&self, inputs: &[&Element]) -> Element {
        let mut out = self.zero();
        let Some(table) = self.ops.get(inputs.len()) else {
            return out;
        };
        for (key, val) in table {
            let mut c = self.ring.one();
            for (s, &i) in key.iter().enumerate() {
                let x = inputs[s].coeff(i);
                if x.is_zero() {
                    c = self.ring.zero();
                    break;
                }
                c = &c * x;
            }
            if !c.is_zero() {
                out.add_assign_scaled(val, &c);
            }
        }
        out
    }

    /// `sum_k mu^k(x, ..., x)` over all stored arities.
    pub fn mc_sum(&self, x: &Element) -> Element {
        let mut out = self.zero();
        for (key, val) in self.all_ops() {
            let mut c = self.ring.one();
            for &i in key {
                let xi = x.coeff(i);
                if xi.is_zero() {
                    c = self.ring.zero();
                    break;
                }
                c = &c * xi;
            }
            if !c.is_zero() {
                out.add_assign_scaled(val, &c);
            }
        }
        out
    }

    /// Reduction modulo the maximal ideal: keep constant terms only.
    pub fn gr0(&self) -> CurvedAlgebra {
        let ring = self.ring.with_trunc(1);
        let mut out =
            CurvedAlgebra { ring, basis: self.basis.clone(), objects: self.objects.clone(), ends: self.ends.clone(), ops: Vec::new() };
        for (key, val) in self.all_ops() {
            let v = val.truncate(1);
            out.add_op(key.clone(), v).expect("reduction preserves structure");
        }
        out
    }

    /// Same structure over a smaller truncation.
    pub fn truncate(&self, n: u32) -> CurvedAlgebra {
        let ring = self.ring.with_trunc(n.min(self.ring.trunc_order));
        let mut out =
            CurvedAlgebra { ring, basis: self.basis.clone(), objects: self.objects.clone(), ends: self.ends.clone(), ops: Vec::new() };
        for (key, val) in self.all_ops() {
            out.add_op(key.clone(), val.truncate(n)).expect("truncation preserves structure");
        }
        out
    }

    /// Element from `(name, coefficient)` pairs.
    pub fn element(&self, terms: &[(&str, PowerSeries)]) -> Result<Element> {
        let mut e = self.zero();
        for (n, c) in terms {
            let i = self.index_of(n).ok_or_else(|| Error::invariant(format!("unknown generator '{n}'")))?;
            *e.coeff_mut(i) = e.coeff(i) + c;
        }
        Ok(e)
    }

    pub(crate) fn empty_like(&self) -> CurvedAlgebra {
        CurvedAlgebra {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            objects: self.objects.clone(),
            ends: self.ends.clone(),
            ops: Vec::new(),
        }
    }

    /// Basis indices of the endomorphism space of `object`.
    pub fn endomorphism_indices(&self, object: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.ends[i] == (object, object)).collect()
    }

    pub fn hom_indices(&self, src: usize, tgt: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.ends[i] == (src, tgt)).collect()
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }
}

/// Integer-literal series helper used by fixtures and tests.
pub fn int(ring: &BaseRing, k: i64) -> PowerSeries {
    ring.constant(BigInt::from(k))
}

pub(crate) fn sign_series(ring: &BaseRing, negative: bool) -> PowerSeries {
    if negative {
        ring.constant(-BigInt::one())
    } else {
        ring.one()
    }
}

impl fmt::Display for CurvedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, val) in self.all_ops() {
            let outs: Vec<String> = val.describe(&self.basis).into_iter().map(|(n, c)| format!("({c})*{n}")).collect();
            writeln!(f, "mu^{}({}) = {}", key.len(), self.names(key), outs.join(" + "))?;
        }
        Ok(())
    }
}
