//! Transfer problems with a known solution, and inputs that must obstruct.
//!
//! Solvable problems start from an uncurved algebra `D` and the two-object
//! category with every hom space a copy of `D`. Deforming by `-c` at `X0`
//! and `-c'` at `X1` curves both endomorphism algebras; `c` solves the
//! Maurer-Cartan equation of `A = End(X0)`, `c'` that of `B = End(X1)`, and
//! the unit of `hom(X0, X1)` is a quasi-isomorphism. The solver does not
//! see `c`, only `b = c'` and `m0 = unit`.

use crate::ainfty_core::{deform_unchecked, fixtures, int, Bimodule, CurvedAlgebra, Element};
use crate::cone_ring::{BaseRing, Cone, ConeSpec, PowerSeries};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct TransferProblem {
    pub name: String,
    pub module: Bimodule,
    pub m0: Element,
    pub b: Element,
    pub trunc_order: u32,
    pub unit_b: Option<Element>,
    /// Order of the first obstruction, for inputs that must halt.
    pub obstructed_at: Option<usize>,
}

/// Builds the two-object problem from an uncurved `d`, elements `c`, `c2`
/// of `d` and the unit of `d` (or zero when `d` has no unit summand).
pub fn category_problem(name: &str, d: &CurvedAlgebra, c: &Element, c2: &Element, unit: &Element) -> Result<TransferProblem> {
    let cat = fixtures::matrix_category(d, 2)?;
    let lift0 = fixtures::lift_endomorphism(&cat, &cat.endomorphism_indices(0), c);
    let lift1 = fixtures::lift_endomorphism(&cat, &cat.endomorphism_indices(1), c2);
    let deformed = deform_unchecked(&cat, &lift0.add(&lift1).neg());
    let module = Bimodule::from_category(&deformed, 0, 1)?;
    Ok(TransferProblem {
        name: name.into(),
        m0: unit.clone(),
        b: c2.clone(),
        trunc_order: d.ring().trunc_order,
        unit_b: (!unit.is_zero()).then(|| unit.clone()),
        module,
        obstructed_at: None,
    })
}

fn cones() -> Vec<(&'static str, ConeSpec, Vec<Vec<i64>>)> {
    // name, cone, two small nonzero effective classes
    vec![
        ("line", ConeSpec::orthant(1), vec![vec![1], vec![2]]),
        ("plane", ConeSpec::orthant(2), vec![vec![1, 0], vec![1, 1]]),
        ("skew", ConeSpec::new(2, vec![vec![1, 0], vec![1, 2]]), vec![vec![0, 1], vec![2, -1]]),
    ]
}

fn mono(r: &BaseRing, coords: &[i64], c: i64) -> PowerSeries {
    r.monomial(coords, c).expect("class lies in the cone")
}

/// At least twenty solvable problems over three cones, ranks 2 to 4.
pub fn oracle_problems() -> Vec<TransferProblem> {
    let mut out = Vec::new();
    for (cname, spec, cls) in cones() {
        let cone = Cone::new(spec).expect("valid cone");
        for (ni, n) in [3u32, 4, 5].into_iter().enumerate() {
            let r = BaseRing::new(cone.clone(), n);
            let p = &cls[0];
            let q = &cls[1];
            // single Clifford algebra
            let cl = fixtures::clifford(&r, &[r.zero(), mono(&r, p, 1), int(&r, 2), mono(&r, q, -1)]);
            let c = fixtures::scaled(&cl, 1, mono(&r, p, 1 + ni as i64));
            let c2 = fixtures::scaled(&cl, 1, &mono(&r, q, 1) - &mono(&r, p, 1));
            out.push(category_problem(&format!("{cname}-clifford-n{n}"), &cl, &c, &c2, &cl.basis_element(0)).expect("fixture"));

            // two Clifford summands
            let cl2 = fixtures::clifford(&r, &[r.zero(), int(&r, 1), mono(&r, q, 3)]);
            let d = fixtures::direct_sum(&[("u", &cl), ("v", &cl2)]).expect("fixture");
            let c = fixtures::scaled(&d, 1, mono(&r, p, 2)).add(&fixtures::scaled(&d, 3, mono(&r, q, -1)));
            let c2 = fixtures::scaled(&d, 3, mono(&r, p, 1));
            let unit = fixtures::int_element(&d, &[1, 0, 1, 0]);
            out.push(category_problem(&format!("{cname}-two-clifford-n{n}"), &d, &c, &c2, &unit).expect("fixture"));

            // Clifford plus an acyclic pair
            let d = fixtures::direct_sum(&[("u", &cl), ("p", &fixtures::acyclic_pair(&r))]).expect("fixture");
            let c = fixtures::scaled(&d, 1, mono(&r, p, 1)).add(&fixtures::scaled(&d, 3, mono(&r, q, 2)));
            let c2 = fixtures::scaled(&d, 3, mono(&r, p, -1));
            let unit = fixtures::int_element(&d, &[1, 0, 0, 0]);
            out.push(category_problem(&format!("{cname}-clifford-acyclic-n{n}"), &d, &c, &c2, &unit).expect("fixture"));
        }
        // a dga with a unit and an acyclic summand; trivial b
        let r = BaseRing::new(cone.clone(), 4);
        let d = fixtures::unit_plus_acyclic(&r);
        let c = fixtures::scaled(&d, 1, mono(&r, &cls[0], 1));
        out.push(category_problem(&format!("{cname}-dga"), &d, &c, &d.zero(), &d.basis_element(0)).expect("fixture"));
    }
    out
}

/// Inputs where `m0` is not a quasi-isomorphism and the first obstruction
/// sits at the valuation of the curvature of `A`.
pub fn halting_problems() -> Vec<TransferProblem> {
    let mut out = Vec::new();
    let line = Cone::new(ConeSpec::orthant(1)).expect("valid cone");
    let r = BaseRing::new(line, 5);
    for (v, w) in [(1i64, 1i64), (1, 2), (2, 1), (1, 3), (2, 2)] {
        let cl = fixtures::clifford(&r, &[r.zero(), mono(&r, &[w], 1)]);
        let c = fixtures::scaled(&cl, 1, mono(&r, &[v], 1));
        let mut p = category_problem(&format!("zero-m0-v{v}-w{w}"), &cl, &c, &cl.zero(), &cl.zero()).expect("fixture");
        p.obstructed_at = Some((v + w) as usize);
        out.push(p);
    }
    let plane = Cone::new(ConeSpec::orthant(2)).expect("valid cone");
    let r = BaseRing::new(plane, 4);
    let cl = fixtures::clifford(&r, &[r.zero(), mono(&r, &[0, 1], 1)]);
    let c = fixtures::scaled(&cl, 1, mono(&r, &[1, 1], 1));
    let base = category_problem("zero-bimodule-plane", &cl, &c, &cl.zero(), &cl.zero()).expect("fixture");
    let module = Bimodule::zero_module(base.module.left().clone(), base.module.right().clone()).expect("fixture");
    out.push(TransferProblem { module, m0: Element::zero(&r, 0), unit_b: None, obstructed_at: Some(3), ..base });
    out
}
