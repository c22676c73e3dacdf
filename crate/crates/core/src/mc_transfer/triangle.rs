use serde::{Deserialize, Serialize};

use crate::ainfty_core::{deform_unchecked, gr0_complex, Bimodule, CurvedAlgebra, Element, Generator};
use crate::error::{Error, Result};
use crate::homalg::Homology;

/// The one-object algebra on `A + M[-1] + B`. Basis order is `A`, then the
/// shifted generators of `M`, then `B`; names carry `a.`, `m.`, `b.` tags.
#[derive(Clone, Debug)]
pub struct TriangleAlgebra {
    module: Bimodule,
    alg: CurvedAlgebra,
}

impl TriangleAlgebra {
    pub fn build(left: &CurvedAlgebra, right: &CurvedAlgebra, module: &Bimodule) -> Result<Self> {
        if left.ring() != module.left().ring() || right.ring() != module.right().ring() || left.ring() != right.ring() {
            return Err(Error::invariant("ring mismatch between the algebras and the bimodule"));
        }
        if left != module.left() || right != module.right() {
            return Err(Error::invariant("bimodule is not over the given algebras"));
        }
        Self::from_bimodule(module)
    }

    pub fn from_bimodule(module: &Bimodule) -> Result<Self> {
        let (a, b) = (module.left(), module.right());
        let mut basis: Vec<Generator> = a.basis().iter().map(|g| Generator::new(format!("a.{}", g.name), g.parity)).collect();
        basis.extend(module.basis().iter().map(|g| Generator::new(format!("m.{}", g.name), 1 - g.parity)));
        basis.extend(b.basis().iter().map(|g| Generator::new(format!("b.{}", g.name), g.parity)));
        let ring = a.ring().clone();
        let mut tri = TriangleAlgebra { module: module.clone(), alg: CurvedAlgebra::new(ring, basis) };
        let mut ops = Vec::new();
        for (key, val) in a.all_ops() {
            ops.push((key.iter().map(|&i| tri.a_index(i)).collect(), tri.embed_a(val)));
        }
        for (key, val) in b.all_ops() {
            ops.push((key.iter().map(|&i| tri.b_index(i)).collect(), tri.embed_b(val)));
        }
        for (key, val) in module.ops() {
            let mut k: Vec<usize> = key.left.iter().map(|&i| tri.a_index(i)).collect();
            k.push(tri.m_index(key.module));
            k.extend(key.right.iter().map(|&i| tri.b_index(i)));
            ops.push((k, tri.embed_m(val)));
        }
        for (k, v) in ops {
            tri.alg.add_op(k, v)?;
        }
        Ok(tri)
    }

    pub fn algebra(&self) -> &CurvedAlgebra {
        &self.alg
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn left(&self) -> &CurvedAlgebra {
        self.module.left()
    }

    pub fn right(&self) -> &CurvedAlgebra {
        self.module.right()
    }

    pub fn a_index(&self, i: usize) -> usize {
        i
    }

    pub fn m_index(&self, i: usize) -> usize {
        self.left().rank() + i
    }

    pub fn b_index(&self, i: usize) -> usize {
        self.left().rank() + self.module.rank() + i
    }

    /// Basis indices of `A` and `M[-1]`: the kernel of the projection to `B`.
    pub fn a_m_indices(&self) -> Vec<usize> {
        (0..self.left().rank() + self.module.rank()).collect()
    }

    /// Basis indices of `M[-1]` and `B`: the kernel of the projection to `A`.
    pub fn m_b_indices(&self) -> Vec<usize> {
        (self.left().rank()..self.alg.rank()).collect()
    }

    fn embed(&self, x: &Element, offset: usize) -> Element {
        let mut out = self.alg.zero();
        for i in x.support() {
            *out.coeff_mut(offset + i) = x.coeff(i).clone();
        }
        out
    }

    fn project(&self, x: &Element, offset: usize, rank: usize) -> Element {
        Element::from_coeffs(x.coeffs()[offset..offset + rank].to_vec())
    }

    pub fn embed_a(&self, x: &Element) -> Element {
        self.embed(x, self.a_index(0))
    }

    pub fn embed_m(&self, x: &Element) -> Element {
        self.embed(x, self.m_index(0))
    }

    pub fn embed_b(&self, x: &Element) -> Element {
        self.embed(x, self.b_index(0))
    }

    pub fn project_a(&self, x: &Element) -> Element {
        self.project(x, self.a_index(0), self.left().rank())
    }

    pub fn project_m(&self, x: &Element) -> Element {
        self.project(x, self.m_index(0), self.module.rank())
    }

    pub fn project_b(&self, x: &Element) -> Element {
        self.project(x, self.b_index(0), self.right().rank())
    }
}

/// The deformation of the triangle algebra by a closed bimodule element.
/// With `gr0_closed_only`, closedness of `f` is required at leading order
/// only and the deformed structure may carry curvature in the `M` slot.
pub fn deform_by_f(tri: &TriangleAlgebra, f: &Element, gr0_closed_only: bool) -> Result<CurvedAlgebra> {
    let m = tri.module();
    if f.rank() != m.rank() || f.coeffs().iter().any(|c| c.ring() != *m.left().ring()) {
        return Err(Error::invariant("element does not belong to the bimodule"));
    }
    if f.parity(m.basis())? == Some(1) {
        return Err(Error::invariant("the deforming element must be even in the bimodule"));
    }
    let d = m.apply(&[], f, &[]);
    let residual = if gr0_closed_only { d.truncate(1) } else { d };
    if !residual.is_zero() {
        return Err(Error::invariant("the deforming element is not closed"));
    }
    Ok(deform_unchecked(tri.algebra(), &tri.embed_m(f)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionReport {
    /// Leading-order homology of `ker(pi_B)`, the cone of `A -> M`.
    pub kernel_pi_b: Homology,
    /// Leading-order homology of `ker(pi_A)`, the cone of `B -> M`.
    pub kernel_pi_a: Homology,
    pub failures: Vec<String>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that both projections out of `T(M)^f` are quasi-isomorphisms by
/// computing the leading-order homology of their kernels over the integers.
pub fn verify_projections(tri: &TriangleAlgebra, f: &Element) -> Result<ProjectionReport> {
    let deformed = deform_by_f(tri, f, true)?.gr0();
    let kb = gr0_complex(&deformed, Some(&tri.a_m_indices()))?.complex.homology();
    let ka = gr0_complex(&deformed, Some(&tri.m_b_indices()))?.complex.homology();
    let mut failures = Vec::new();
    if !kb.is_zero() {
        failures.push(format!("kernel of pi_B has homology {}", describe(&kb)));
    }
    if !ka.is_zero() {
        failures.push(format!("kernel of pi_A has homology {}", describe(&ka)));
    }
    Ok(ProjectionReport { kernel_pi_b: kb, kernel_pi_a: ka, failures })
}

fn describe(h: &Homology) -> String {
    serde_json::to_string(h).unwrap_or_default()
}

/// Whether `mu^{1|1|0}(-; f)` and `mu^{0|1|1}(f; -)` are integral
/// quasi-isomorphisms at leading order.
pub fn is_quasi_iso(m: &Bimodule, f: &Element) -> Result<bool> {
    let tri = TriangleAlgebra::from_bimodule(m)?;
    Ok(verify_projections(&tri, f)?.passed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty_core::{check_curved_ainfty, fixtures, int};
    use crate::cone_ring::{BaseRing, Cone, ConeSpec};

    fn ring() -> BaseRing {
        BaseRing::new(Cone::new(ConeSpec::orthant(1)).unwrap(), 3)
    }

    fn unit_ring(r: &BaseRing) -> CurvedAlgebra {
        let mut a = CurvedAlgebra::new(r.clone(), vec![Generator::new("e", 0)]);
        a.add_op_named(&["e", "e"], "e", r.one()).unwrap();
        a
    }

    #[test]
    fn rank_one_diagonal_triangle() {
        let r = ring();
        let a = unit_ring(&r);
        let m = Bimodule::diagonal(&a).unwrap();
        let tri = TriangleAlgebra::build(&a, &a, &m).unwrap();
        assert_eq!(tri.algebra().rank(), 3);
        assert!(check_curved_ainfty(tri.algebra(), 4).passed());
        assert!(is_quasi_iso(&m, &m.basis_element(0)).unwrap());
        assert!(!is_quasi_iso(&m, &m.zero()).unwrap());
        let two = m.basis_element(0).scale_int(&2.into());
        let rep = verify_projections(&tri, &two).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.kernel_pi_b.odd.torsion, vec![2.into()]);
    }

    #[test]
    fn zero_bimodule_is_direct_sum() {
        let r = ring();
        let a = fixtures::quadratic_ring(&r, 3);
        let b = fixtures::unit_plus_acyclic(&r);
        let m = Bimodule::zero_module(a.clone(), b.clone()).unwrap();
        let tri = TriangleAlgebra::build(&a, &b, &m).unwrap();
        let sum = fixtures::direct_sum(&[("a", &a), ("b", &b)]).unwrap();
        assert_eq!(tri.algebra().all_ops().count(), sum.all_ops().count());
        assert!(check_curved_ainfty(tri.algebra(), 4).passed());
    }

    #[test]
    fn category_bimodule_triangle_passes() {
        let r = ring();
        let t = r.monomial(&[1], 1).unwrap();
        let c = fixtures::clifford(&r, &[t.clone(), int(&r, 2), r.zero(), t]);
        let d = fixtures::direct_sum(&[("c", &c), ("p", &fixtures::acyclic_pair(&r))]).unwrap();
        let cat = fixtures::matrix_category(&d, 2).unwrap();
        let m = Bimodule::from_category(&cat, 0, 1).unwrap();
        let tri = TriangleAlgebra::from_bimodule(&m).unwrap();
        assert!(check_curved_ainfty(tri.algebra(), 4).passed());
        let unit = m.index_of("c.1[01]").unwrap();
        let f = m.basis_element(unit);
        let deformed = deform_by_f(&tri, &f, false).unwrap();
        assert!(check_curved_ainfty(&deformed, 4).passed());
        assert!(is_quasi_iso(&m, &f).unwrap());
    }

    #[test]
    fn rejects_non_closed() {
        let r = ring();
        let p = fixtures::acyclic_pair(&r);
        let m = Bimodule::diagonal(&p).unwrap();
        let tri = TriangleAlgebra::from_bimodule(&m).unwrap();
        let x = m.basis_element(m.index_of("x").unwrap());
        assert!(deform_by_f(&tri, &x, false).is_err());
        assert_eq!(deform_by_f(&tri, &m.zero(), false).unwrap(), *tri.algebra());
    }
}
