use relfuk_core::ainfty_core::{check_mc, verify_cunit, Bimodule, CurvedAlgebra, Generator};
use relfuk_core::cone_ring::{BaseRing, Cone, ConeSpec};
use relfuk_core::mc_transfer::problems::{halting_problems, oracle_problems};
use relfuk_core::mc_transfer::{is_quasi_iso, transfer_mc, verify_transfer};
use relfuk_core::Error;

#[test]
fn oracle_problems_transfer_and_verify() {
    for p in oracle_problems() {
        assert!(is_quasi_iso(&p.module, &p.m0).unwrap(), "{}", p.name);
        let res = transfer_mc(&p.module, &p.m0, &p.b, p.trunc_order, p.unit_b.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        assert!(res.quasi_iso);
        let failures = verify_transfer(&p.module, &p.m0, &p.b, &res).unwrap();
        assert!(failures.is_empty(), "{}: {failures:?}", p.name);
        assert!(check_mc(p.module.left(), &res.a).unwrap(), "{}", p.name);
        if let Some(lift) = &res.cunit {
            assert!(lift.verified, "{}: {}", p.name, lift.detail);
        }
    }
}

#[test]
fn halting_problems_obstruct_at_expected_order() {
    for p in halting_problems() {
        assert!(!is_quasi_iso(&p.module, &p.m0).unwrap(), "{}", p.name);
        match transfer_mc(&p.module, &p.m0, &p.b, p.trunc_order, None) {
            Err(Error::Obstruction { order, .. }) => assert_eq!(Some(order), p.obstructed_at, "{}", p.name),
            other => panic!("{}: expected an obstruction, got {other:?}", p.name),
        }
    }
}

#[test]
fn trivial_diagonal_problem() {
    let r = BaseRing::new(Cone::new(ConeSpec::orthant(2)).unwrap(), 4);
    let mut a = CurvedAlgebra::new(r.clone(), vec![Generator::new("e", 0)]);
    a.add_op_named(&["e", "e"], "e", r.one()).unwrap();
    let m = Bimodule::diagonal(&a).unwrap();
    let unit = m.basis_element(0);
    let res = transfer_mc(&m, &unit, &a.zero(), 4, Some(&a.basis_element(0))).unwrap();
    assert!(res.a.is_zero());
    assert_eq!(res.m, unit);
    assert!(res.log.iter().all(|l| l.monomials == 0));
    let lift = res.cunit.unwrap();
    assert_eq!(lift.candidate, Some(a.basis_element(0)));
    assert!(verify_cunit(&a, &a.basis_element(0)).unwrap());
}

#[test]
fn doubled_unit_is_not_quasi_iso_but_solves() {
    // the correction equation for m is linear in m, so 2e does not obstruct
    // when A and B are uncurved
    let r = BaseRing::new(Cone::new(ConeSpec::orthant(1)).unwrap(), 3);
    let mut a = CurvedAlgebra::new(r.clone(), vec![Generator::new("e", 0)]);
    a.add_op_named(&["e", "e"], "e", r.one()).unwrap();
    let m = Bimodule::diagonal(&a).unwrap();
    let two = m.basis_element(0).scale_int(&2.into());
    assert!(!is_quasi_iso(&m, &two).unwrap());
    let res = transfer_mc(&m, &two, &a.zero(), 3, None).unwrap();
    assert!(!res.quasi_iso);
    assert!(res.a.is_zero());
}
