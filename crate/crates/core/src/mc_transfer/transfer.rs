use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::triangle::{deform_by_f, is_quasi_iso, TriangleAlgebra};
use crate::ainfty_core::{check_mc, gr0_complex, verify_cunit, Bimodule, Element};
use crate::cone_ring::EffectiveClass;
use crate::error::{Error, Result};
use crate::homalg::smith_normal_form;

/// One order of the inductive solve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderLog {
    pub order: u32,
    /// Monomials of this order carrying a nonzero obstruction.
    pub monomials: usize,
    /// Largest absolute integer entry of the obstruction.
    pub max_entry: String,
    /// Number of nonzero integer entries in the correction.
    pub correction_terms: usize,
}

/// Outcome of lifting the c-unit of `B^b` to a candidate for `A^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CunitLift {
    pub candidate: Option<Element>,
    pub verified: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferResult {
    pub a: Element,
    pub m: Element,
    pub order_achieved: u32,
    pub log: Vec<OrderLog>,
    /// Whether `m0` passed the integral quasi-isomorphism test. The solve
    /// runs regardless; a failure shows up as an obstruction or not at all.
    pub quasi_iso: bool,
    pub cunit: Option<CunitLift>,
}

/// Solves for `a` in `A` and `m` in `M` with `sum mu^k(t, ..., t) = 0` in
/// the triangle algebra, `t = a + m[-1] + b`, one filtration order at a time.
/// `unit_b` is an optional c-unit representative of `B^b` to lift.
pub fn transfer_mc(module: &Bimodule, m0: &Element, b: &Element, trunc_order: u32, unit_b: Option<&Element>) -> Result<TransferResult> {
    let ring = module.left().ring().clone();
    if trunc_order == 0 || trunc_order > ring.trunc_order {
        return Err(Error::invariant(format!("truncation order must lie in 1..={}", ring.trunc_order)));
    }
    if m0.rank() != module.rank() || b.rank() != module.right().rank() {
        return Err(Error::invariant("m0 or b has the wrong rank"));
    }
    if m0.parity(module.basis())? == Some(1) {
        return Err(Error::invariant("m0 must be even in the bimodule"));
    }
    let module = truncate_module(module, trunc_order)?;
    let m0 = m0.truncate(trunc_order);
    let b = b.truncate(trunc_order);
    let right = module.right();
    if !check_mc(right, &b)? {
        return Err(Error::invariant("b fails the Maurer-Cartan equation to the requested order"));
    }

    let tri = TriangleAlgebra::from_bimodule(&module)?;
    let quasi_iso = is_quasi_iso(&module, &m0.graded_part(0))?;
    let lead = deform_by_f(&tri, &m0.graded_part(0), true)?.gr0();
    let cx = gr0_complex(&lead, Some(&tri.a_m_indices()))?;
    let solver = smith_normal_form(cx.d(1));

    let mut t = tri.embed_m(&m0).add(&tri.embed_b(&b));
    let mut log = Vec::new();
    for k in 1..trunc_order {
        let obstruction = tri.algebra().mc_sum(&t).graded_part(k);
        if !tri.project_b(&obstruction).is_zero() {
            return Err(Error::invariant(format!("B-component of the obstruction is nonzero at order {k}: b is not Maurer-Cartan")));
        }
        let mut by_class: std::collections::BTreeMap<EffectiveClass, Vec<BigInt>> = Default::default();
        for (pos, &i) in cx.even.iter().enumerate() {
            for (cls, c) in obstruction.coeff(i).terms() {
                by_class.entry(cls.clone()).or_insert_with(|| vec![BigInt::zero(); cx.even.len()])[pos] = c.clone();
            }
        }
        if cx.odd.iter().any(|&i| !obstruction.coeff(i).is_zero()) {
            return Err(Error::invariant(format!("obstruction at order {k} has odd components")));
        }
        let max_entry = by_class.values().flatten().map(|c| c.magnitude().clone()).max().unwrap_or_default();
        let systems: Vec<(EffectiveClass, Vec<BigInt>)> = by_class.into_iter().collect();
        let solved: Vec<Result<(EffectiveClass, Vec<BigInt>)>> = systems
            .par_iter()
            .map(|(cls, v)| {
                let image = cx.d(0).mul_vec(v)?;
                if image.iter().any(|c| !c.is_zero()) {
                    return Err(Error::invariant(format!("obstruction at order {k} is not closed at T^{cls}: the input relations fail")));
                }
                let rhs: Vec<BigInt> = v.iter().map(|c| -c).collect();
                match solver.solve(&rhs)? {
                    Some(x) => Ok((cls.clone(), x)),
                    None => Err(Error::Obstruction {
                        order: k as usize,
                        detail: format!("no integral correction kills the obstruction at T^{cls}"),
                    }),
                }
            })
            .collect();
        let mut correction_terms = 0;
        let mut correction = tri.algebra().zero();
        for r in solved {
            let (cls, x) = r?;
            for (pos, c) in x.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                correction_terms += 1;
                let i = cx.odd[pos];
                correction.coeff_mut(i).add_term(cls.clone(), c.clone());
            }
        }
        log.push(OrderLog { order: k, monomials: systems.len(), max_entry: max_entry.to_string(), correction_terms });
        t = t.add(&correction);
    }
    let residual = tri.algebra().mc_sum(&t);
    if !residual.is_zero() {
        return Err(Error::Property("transfer finished with a nonzero residual".into()));
    }
    let a = tri.project_a(&t);
    let m = tri.project_m(&t);
    let cunit = match unit_b {
        Some(e) => Some(lift_unit(&tri, &m0.graded_part(0), e)?),
        None => None,
    };
    Ok(TransferResult { a, m, order_achieved: trunc_order, log, quasi_iso, cunit })
}

fn truncate_module(module: &Bimodule, n: u32) -> Result<Bimodule> {
    let left = module.left().truncate(n);
    let right = module.right().truncate(n);
    let mut out = Bimodule::new(left, right, module.basis().to_vec())?;
    for (k, v) in module.ops() {
        out.add_op(k.clone(), v.truncate(n))?;
    }
    Ok(out)
}

/// Solves `D(x_A + x_M) = -mu^{0|1|1}(m0; e_b)` at leading order and checks
/// that `x_A` is a c-unit of `A`.
fn lift_unit(tri: &TriangleAlgebra, m0: &Element, e_b: &Element) -> Result<CunitLift> {
    let module = tri.module();
    if e_b.rank() != module.right().rank() {
        return Err(Error::invariant("unit candidate has the wrong rank"));
    }
    if !verify_cunit(module.right(), e_b)? {
        return Ok(CunitLift { candidate: None, verified: false, detail: "supplied element is not a c-unit of B".into() });
    }
    let lead = deform_by_f(tri, m0, true)?.gr0();
    let cx = gr0_complex(&lead, Some(&tri.a_m_indices()))?;
    let rhs_m = module.apply(&[], m0, &[e_b]).neg();
    let rhs = cx.vector(&tri.embed_m(&rhs_m), 1);
    match smith_normal_form(cx.d(0)).solve(&rhs)? {
        None => Ok(CunitLift { candidate: None, verified: false, detail: "unit does not lift integrally".into() }),
        Some(x) => {
            let lifted = tri.project_a(&cx.element(tri.algebra(), &x, 0));
            let ok = verify_cunit(module.left(), &lifted)?;
            let detail = if ok { "lifted unit verified" } else { "lifted element is not a c-unit of A" };
            Ok(CunitLift { candidate: Some(lifted), verified: ok, detail: detail.into() })
        }
    }
}

/// Independent check of a transfer result: the Maurer-Cartan equation for
/// `a` in `A` and closedness of `m` in the bimodule twisted by `a` and `b`,
/// both evaluated directly from the input structures.
pub fn verify_transfer(module: &Bimodule, m0: &Element, b: &Element, res: &TransferResult) -> Result<Vec<String>> {
    let n = res.order_achieved;
    let module = truncate_module(module, n)?;
    let (a, m, b, m0) = (res.a.truncate(n), res.m.truncate(n), b.truncate(n), m0.truncate(n));
    let left = module.left();
    let mut failures = Vec::new();
    if !left.mc_sum(&a).is_zero() {
        failures.push("a fails the Maurer-Cartan equation".into());
    }
    if a.valuation() == Some(0) {
        failures.push("a is not in the maximal ideal".into());
    }
    if m.graded_part(0) != m0.graded_part(0) {
        failures.push("m differs from m0 at leading order".into());
    }
    let mut d = module.zero();
    for (key, val) in module.ops() {
        let mut c = m.coeff(key.module).clone();
        for &i in &key.left {
            c = &c * a.coeff(i);
        }
        for &i in &key.right {
            c = &c * b.coeff(i);
        }
        if !c.is_zero() {
            d.add_assign_scaled(val, &c);
        }
    }
    if !d.is_zero() {
        failures.push("m is not closed in the twisted bimodule".into());
    }
    Ok(failures)
}
