//! Small explicit A-infinity structures used as test fixtures and by the
//! transfer problem generator.

use num_bigint::BigInt;

use super::algebra::{int, CurvedAlgebra, Element, Generator};
use crate::cone_ring::{BaseRing, PowerSeries};
use crate::error::{Error, Result};

pub fn scaled(alg: &CurvedAlgebra, i: usize, c: PowerSeries) -> Element {
    Element::single(alg.ring(), alg.rank(), i, c)
}

/// Ungraded ring `Z[x]/(x^2 - c)` as an A-infinity algebra with only `mu^2`.
pub fn quadratic_ring(ring: &BaseRing, c: i64) -> CurvedAlgebra {
    let mut a = CurvedAlgebra::new(ring.clone(), vec![Generator::new("1", 0), Generator::new("x", 0)]);
    let one = ring.one();
    a.add_op_named(&["1", "1"], "1", one.clone()).unwrap();
    a.add_op_named(&["1", "x"], "x", one.clone()).unwrap();
    a.add_op_named(&["x", "1"], "x", one).unwrap();
    a.add_op_named(&["x", "x"], "1", int(ring, c)).unwrap();
    a
}

/// Converts a differential graded algebra into A-infinity form:
/// `mu^1 = d`, `mu^2(x, y) = (-1)^|x| x y`.
///
/// `products[(i, j)]` is the product `e_i e_j` and `differential[i]` is `d e_i`,
/// both as integer coefficient vectors.
pub fn from_dga(
    ring: &BaseRing,
    basis: Vec<Generator>,
    products: &[((usize, usize), Vec<i64>)],
    differential: &[Vec<i64>],
) -> Result<CurvedAlgebra> {
    let n = basis.len();
    let mut a = CurvedAlgebra::new(ring.clone(), basis);
    let vec_elem = |v: &[i64], sign: i64| -> Element { Element::from_coeffs(v.iter().map(|&c| int(ring, sign * c)).collect()) };
    for ((i, j), v) in products {
        if v.len() != n {
            return Err(Error::invariant("product vector has the wrong length"));
        }
        let sign = if a.basis()[*i].parity == 1 { -1 } else { 1 };
        a.add_op(vec![*i, *j], vec_elem(v, sign))?;
    }
    for (i, v) in differential.iter().enumerate() {
        if v.len() != n {
            return Err(Error::invariant("differential vector has the wrong length"));
        }
        a.add_op(vec![i], vec_elem(v, 1))?;
    }
    Ok(a)
}

/// `Z<1, x, y>` with `d x = y`, unit `1`, all other products zero: a unit
/// plus an acyclic summand.
pub fn unit_plus_acyclic(ring: &BaseRing) -> CurvedAlgebra {
    let basis = vec![Generator::new("1", 0), Generator::new("x", 1), Generator::new("y", 0)];
    let products =
        [((0, 0), vec![1, 0, 0]), ((0, 1), vec![0, 1, 0]), ((1, 0), vec![0, 1, 0]), ((0, 2), vec![0, 0, 1]), ((2, 0), vec![0, 0, 1])];
    let d = [vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 0]];
    from_dga(ring, basis, &products, &d).expect("valid dga")
}

/// Curved algebra on `1` (even) and `xi` (odd): strict unit `1` and
/// `mu^k(xi, ..., xi) = cs[k] * 1`. Requires `cs[0]` in the maximal ideal.
pub fn clifford(ring: &BaseRing, cs: &[PowerSeries]) -> CurvedAlgebra {
    let mut a = CurvedAlgebra::new(ring.clone(), vec![Generator::new("1", 0), Generator::new("xi", 1)]);
    let one = ring.one();
    a.add_op_named(&["1", "1"], "1", one.clone()).unwrap();
    a.add_op_named(&["1", "xi"], "xi", one.clone()).unwrap();
    a.add_op_named(&["xi", "1"], "xi", one.neg()).unwrap();
    for (k, c) in cs.iter().enumerate() {
        let inputs = vec!["xi"; k];
        a.add_op_named(&inputs, "1", c.clone()).unwrap();
    }
    a
}

/// Acyclic pair `mu^1(x) = y`, no other operations.
pub fn acyclic_pair(ring: &BaseRing) -> CurvedAlgebra {
    let mut a = CurvedAlgebra::new(ring.clone(), vec![Generator::new("x", 0), Generator::new("y", 1)]);
    a.add_op_named(&["x"], "y", ring.one()).unwrap();
    a
}

/// Three even generators whose `mu^2` is not associative.
pub fn non_associative(ring: &BaseRing) -> CurvedAlgebra {
    let mut a = CurvedAlgebra::new(ring.clone(), vec![Generator::new("a", 0), Generator::new("b", 0), Generator::new("c", 0)]);
    a.add_op_named(&["a", "b"], "c", ring.one()).unwrap();
    a.add_op_named(&["c", "a"], "a", ring.one()).unwrap();
    a
}

/// Direct sum of one-object algebras; generator names get a `prefix.` tag.
pub fn direct_sum(parts: &[(&str, &CurvedAlgebra)]) -> Result<CurvedAlgebra> {
    let ring = parts.first().ok_or_else(|| Error::invariant("empty direct sum"))?.1.ring().clone();
    let mut basis = Vec::new();
    let mut offsets = Vec::new();
    for (p, a) in parts {
        if *a.ring() != ring {
            return Err(Error::invariant("direct summands live over different rings"));
        }
        if a.objects().len() != 1 {
            return Err(Error::invariant("direct sums take one-object algebras"));
        }
        offsets.push(basis.len());
        basis.extend(a.basis().iter().map(|g| Generator::new(format!("{p}.{}", g.name), g.parity)));
    }
    let n = basis.len();
    let mut out = CurvedAlgebra::new(ring.clone(), basis);
    for ((_, a), &off) in parts.iter().zip(&offsets) {
        for (key, val) in a.all_ops() {
            let mut e = Element::zero(&ring, n);
            for j in val.support() {
                *e.coeff_mut(off + j) = val.coeff(j).clone();
            }
            out.add_op(key.iter().map(|i| i + off).collect(), e)?;
        }
    }
    Ok(out)
}

/// Category with `n` objects, every hom space a copy of `alg`, composition
/// given by the operations of `alg`.
pub fn matrix_category(alg: &CurvedAlgebra, n: usize) -> Result<CurvedAlgebra> {
    if alg.objects().len() != 1 {
        return Err(Error::invariant("matrix categories take one-object algebras"));
    }
    let r = alg.rank();
    let objects: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let mut basis = Vec::new();
    let mut ends = Vec::new();
    for s in 0..n {
        for t in 0..n {
            for g in alg.basis() {
                basis.push(Generator::new(format!("{}[{s}{t}]", g.name), g.parity));
                ends.push((s, t));
            }
        }
    }
    let idx = |s: usize, t: usize, i: usize| (s * n + t) * r + i;
    let mut out = CurvedAlgebra::new_category(alg.ring().clone(), basis, objects, ends)?;
    let total = out.rank();
    for (key, val) in alg.all_ops() {
        let k = key.len();
        let chains = (k + 1) as u32;
        for code in 0..n.pow(chains) {
            let mut objs = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..=k {
                objs.push(c % n);
                c /= n;
            }
            if k == 0 {
                objs.push(objs[0]);
            }
            let new_key: Vec<usize> = key.iter().enumerate().map(|(s, &i)| idx(objs[s], objs[s + 1], i)).collect();
            let (src, tgt) = (objs[0], objs[k]);
            let mut e = Element::zero(alg.ring(), total);
            for j in val.support() {
                *e.coeff_mut(idx(src, tgt, j)) = val.coeff(j).clone();
            }
            out.add_op(new_key, e)?;
        }
    }
    Ok(out)
}

/// The endomorphism algebra of one object, as a one-object algebra.
/// Returns the algebra and the map from its indices to category indices.
pub fn endomorphism_algebra(cat: &CurvedAlgebra, object: usize) -> (CurvedAlgebra, Vec<usize>) {
    let idx = cat.endomorphism_indices(object);
    let basis = idx.iter().map(|&i| cat.basis()[i].clone()).collect();
    let mut out = CurvedAlgebra::new(cat.ring().clone(), basis);
    let local = |i: usize| idx.iter().position(|&j| j == i);
    for (key, val) in cat.all_ops() {
        let Some(new_key) = key.iter().map(|&i| local(i)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let coeffs = idx.iter().map(|&i| val.coeff(i).clone()).collect();
        out.add_op(new_key, Element::from_coeffs(coeffs)).expect("restriction preserves structure");
    }
    (out, idx)
}

/// Element of a category supported on one object's endomorphisms, built from
/// an element of the endomorphism algebra.
pub fn lift_endomorphism(cat: &CurvedAlgebra, idx: &[usize], x: &Element) -> Element {
    let mut e = cat.zero();
    for (l, &i) in idx.iter().enumerate() {
        *e.coeff_mut(i) = x.coeff(l).clone();
    }
    e
}

/// The element `sum_i c_i e_i` with integer coefficients.
pub fn int_element(alg: &CurvedAlgebra, coeffs: &[i64]) -> Element {
    Element::from_coeffs(coeffs.iter().map(|&c| alg.ring().constant(BigInt::from(c))).collect())
}
