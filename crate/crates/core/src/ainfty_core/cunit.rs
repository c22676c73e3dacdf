use num_bigint::BigInt;
use num_traits::Zero;

use super::algebra::{CurvedAlgebra, Element};
use crate::error::{Error, Result};
use crate::homalg::{smith_normal_form, IntComplex, IntMatrix};

/// The leading-order complex `(Gr_0, mu^1)` on a subset of the basis,
/// split by parity. `even[i]` / `odd[i]` give the basis index of each row.
#[derive(Clone, Debug)]
pub struct Gr0Complex {
    pub complex: IntComplex,
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
}

impl Gr0Complex {
    /// Integer vector of constant terms on one parity part.
    pub fn vector(&self, x: &Element, parity: u8) -> Vec<BigInt> {
        let idx = if parity == 0 { &self.even } else { &self.odd };
        idx.iter().map(|&i| x.coeff(i).constant_term()).collect()
    }

    pub fn element(&self, alg: &CurvedAlgebra, v: &[BigInt], parity: u8) -> Element {
        let idx = if parity == 0 { &self.even } else { &self.odd };
        let mut e = alg.zero();
        for (&i, c) in idx.iter().zip(v) {
            *e.coeff_mut(i) = alg.ring().constant(c.clone());
        }
        e
    }

    /// Differential leaving the given parity.
    pub fn d(&self, parity: u8) -> &IntMatrix {
        if parity == 0 {
            self.complex.d_even()
        } else {
            self.complex.d_odd()
        }
    }
}

/// Builds the `Gr_0` complex on `subset` (all of the basis when `None`).
/// Fails if `mu^1` leaves the subset at leading order or `d^2 != 0`.
pub fn gr0_complex(alg: &CurvedAlgebra, subset: Option<&[usize]>) -> Result<Gr0Complex> {
    let all: Vec<usize> = (0..alg.rank()).collect();
    let sub = subset.unwrap_or(&all);
    let even: Vec<usize> = sub.iter().copied().filter(|&i| alg.basis()[i].parity == 0).collect();
    let odd: Vec<usize> = sub.iter().copied().filter(|&i| alg.basis()[i].parity == 1).collect();
    let mut d_even = IntMatrix::zeros(odd.len(), even.len());
    let mut d_odd = IntMatrix::zeros(even.len(), odd.len());
    for (src_list, dst_list, mat) in [(&even, &odd, &mut d_even), (&odd, &even, &mut d_odd)] {
        for (col, &j) in src_list.iter().enumerate() {
            let Some(img) = alg.op(&[j]) else {
                continue;
            };
            for t in img.support() {
                let c = img.coeff(t).constant_term();
                if c.is_zero() {
                    continue;
                }
                let row = dst_list.iter().position(|&x| x == t).ok_or_else(|| {
                    Error::invariant(format!("mu^1({}) leaves the chosen subcomplex at leading order", alg.basis()[j].name))
                })?;
                mat.set(row, col, c);
            }
        }
    }
    Ok(Gr0Complex { complex: IntComplex::new(d_even, d_odd)?, even, odd })
}

/// Whether `e` represents a two-sided unit on the cohomology of the leading-
/// order complex, all exactness questions answered over the integers.
pub fn verify_cunit(alg: &CurvedAlgebra, e: &Element) -> Result<bool> {
    if e.parity(alg.basis())? == Some(1) {
        return Err(Error::invariant("c-unit candidates must be even"));
    }
    let g = alg.gr0();
    let e0 = e.truncate(1);
    let e0 = Element::from_coeffs(e0.coeffs().iter().map(|c| g.ring().constant(c.constant_term())).collect());
    let cx = gr0_complex(&g, None)?;
    if !g.apply(&[&e0]).is_zero() {
        return Ok(false);
    }
    for parity in [0u8, 1] {
        let other = 1 - parity;
        let boundary = smith_normal_form(cx.d(other));
        for z in smith_normal_form(cx.d(parity)).kernel_basis() {
            let x = cx.element(&g, &z, parity);
            let left = g.apply(&[&e0, &x]).sub(&x);
            let right = g.apply(&[&x, &e0]);
            let right = if parity == 1 { right.neg() } else { right };
            let right = right.sub(&x);
            for y in [left, right] {
                if boundary.solve(&cx.vector(&y, parity))?.is_none() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
