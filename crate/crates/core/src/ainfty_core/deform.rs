use super::algebra::{CurvedAlgebra, CurvedCategory, Element};
use crate::error::{Error, Result};

/// Checks that `x` is odd with positive valuation.
fn check_mc_shape(alg: &CurvedAlgebra, x: &Element) -> Result<()> {
    if x.rank() != alg.rank() {
        return Err(Error::invariant("element rank does not match the algebra"));
    }
    if x.coeffs().iter().any(|c| c.ring() != *alg.ring()) {
        return Err(Error::invariant("element lives over a different ring"));
    }
    if x.parity(alg.basis())? == Some(0) {
        return Err(Error::invariant("Maurer-Cartan candidates must be odd"));
    }
    if x.valuation() == Some(0) {
        return Err(Error::invariant("Maurer-Cartan candidates must have valuation >= 1"));
    }
    Ok(())
}

/// Inserts `x` into every subset of slots of every stored operation. Finite
/// because only stored arities contribute; converges whenever `x` lies in the
/// maximal ideal or can occupy at most one slot of any nonzero operation.
pub(crate) fn deform_unchecked(alg: &CurvedAlgebra, x: &Element) -> CurvedAlgebra {
    let mut out = alg.empty_like();
    let ring = alg.ring();
    for (key, val) in alg.all_ops() {
        let n = key.len();
        for mask in 0u64..(1u64 << n) {
            let mut c = ring.one();
            let mut kept = Vec::with_capacity(n);
            for (s, &i) in key.iter().enumerate() {
                if mask >> s & 1 == 1 {
                    kept.push(i);
                } else {
                    let xi = x.coeff(i);
                    if xi.is_zero() {
                        c = ring.zero();
                        break;
                    }
                    c = &c * xi;
                }
            }
            if c.is_zero() {
                continue;
            }
            out.add_op(kept, val.scale(&c)).expect("deformation preserves degrees and composability");
        }
    }
    out
}

/// The deformed structure `A^x`: every gap of every operation receives any
/// number of copies of `x`.
pub fn deform(alg: &CurvedAlgebra, x: &Element) -> Result<CurvedAlgebra> {
    check_mc_shape(alg, x)?;
    for i in x.support() {
        let (s, t) = alg.ends()[i];
        if s != t {
            return Err(Error::invariant("deformation elements must be endomorphisms"));
        }
    }
    Ok(deform_unchecked(alg, x))
}

/// Maurer-Cartan equation `sum_k mu^k(x, ..., x) = 0` modulo the truncation.
pub fn check_mc(alg: &CurvedAlgebra, x: &Element) -> Result<bool> {
    check_mc_shape(alg, x)?;
    Ok(alg.mc_sum(x).is_zero())
}

/// Structure maps of the bounding-cochain category: hom spaces unchanged,
/// operations deformed by the Maurer-Cartan element assigned to each object.
pub fn bc_structure_maps(cat: &CurvedCategory, assignment: &[(usize, Element)]) -> Result<CurvedCategory> {
    let mut total = cat.zero();
    let mut seen = vec![false; cat.objects().len()];
    for (obj, x) in assignment {
        if *obj >= seen.len() || std::mem::replace(&mut seen[*obj], true) {
            return Err(Error::invariant("each object may be assigned at most one element"));
        }
        for i in x.support() {
            if cat.ends()[i] != (*obj, *obj) {
                return Err(Error::invariant(format!(
                    "element for object {} has a component outside its endomorphisms",
                    cat.objects()[*obj]
                )));
            }
        }
        check_mc_shape(cat, x)?;
        let sum = cat.mc_sum(x);
        if cat.endomorphism_indices(*obj).iter().any(|&i| !sum.coeff(i).is_zero()) {
            return Err(Error::invariant(format!("element assigned to object {} fails the Maurer-Cartan equation", cat.objects()[*obj])));
        }
        total = total.add(x);
    }
    let out = deform(cat, &total)?;
    if !out.curvature().is_zero() {
        return Err(Error::invariant("deformed category is still curved"));
    }
    Ok(out)
}
