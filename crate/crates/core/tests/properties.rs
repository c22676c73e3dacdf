use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use relfuk_core::ainfty_core::{check_curved_ainfty, deform, fixtures};
use relfuk_core::cone_ring::{BaseRing, Cone, ConeSpec, PowerSeries};
use relfuk_core::homalg::{smith_normal_form, solve_integer, verify_snf, IntMatrix};
use relfuk_core::io::{element_from_doc, element_to_doc, series_from_terms, series_to_terms};
use relfuk_core::moduli_combinatorics::KSet;

const N: u32 = 5;

fn skew() -> Arc<Cone> {
    Cone::new(ConeSpec::new(2, vec![vec![1, 0], vec![1, 2]])).unwrap()
}

fn series(cone: Arc<Cone>) -> impl Strategy<Value = PowerSeries> {
    let classes = cone.classes_below(N);
    let n = classes.len();
    prop::collection::vec((0..n, -6i64..=6), 0..6).prop_map(move |terms| {
        PowerSeries::from_terms(cone.clone(), N, terms.into_iter().map(|(i, c)| (classes[i].clone(), BigInt::from(c))))
    })
}

fn positive_series(cone: Arc<Cone>) -> impl Strategy<Value = PowerSeries> {
    series(cone).prop_map(|s| {
        let c0 = s.graded_part(0);
        s.try_sub(&c0).unwrap()
    })
}

fn matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-12i64..=12, c), r).prop_map(move |rows| {
            IntMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect(), c).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_form_a_commutative_ring(x in series(skew()), y in series(skew()), z in series(skew())) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert!((&x + &x.neg()).is_zero());
    }

    #[test]
    fn valuation_is_superadditive_on_monomials(a in 0usize..8, b in 0usize..8) {
        let cone = skew();
        let classes = cone.classes_below(N);
        let (ca, cb) = (&classes[a % classes.len()], &classes[b % classes.len()]);
        let x = PowerSeries::monomial(cone.clone(), 2 * N, ca.clone(), BigInt::from(1));
        let y = PowerSeries::monomial(cone.clone(), 2 * N, cb.clone(), BigInt::from(1));
        prop_assert!((&x * &y).valuation().unwrap() >= ca.ord() + cb.ord());
    }

    #[test]
    fn truncation_is_a_ring_map(x in series(skew()), y in series(skew()), k in 1u32..=N) {
        prop_assert_eq!((&x * &y).truncate(k), &x.truncate(k) * &y.truncate(k));
        prop_assert_eq!((&x + &y).truncate(k), &x.truncate(k) + &y.truncate(k));
    }

    #[test]
    fn positive_part_is_nilpotent(x in positive_series(skew())) {
        prop_assert!(x.pow(N).is_zero());
    }

    #[test]
    fn smith_form_certificate(m in matrix(6)) {
        let s = smith_normal_form(&m);
        prop_assert!(verify_snf(&m, &s).is_ok());
        prop_assert_eq!(s.rank(), s.invariant_factors().len());
        for v in s.kernel_basis() {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|e| e == &BigInt::from(0)));
        }
    }

    #[test]
    fn integer_solutions_solve(m in matrix(5), seed in prop::collection::vec(-4i64..=4, 5)) {
        let x: Vec<BigInt> = seed.iter().take(m.cols()).cycle().take(m.cols()).map(|&v| BigInt::from(v)).collect();
        let b = m.mul_vec(&x).unwrap();
        let sol = solve_integer(&m, &b).unwrap().expect("b lies in the image");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
    }

    #[test]
    fn deformations_compose(c1 in positive_series(skew()), c2 in positive_series(skew()), x in positive_series(skew()), y in positive_series(skew())) {
        let ring = BaseRing::new(skew(), N);
        let d = fixtures::clifford(&ring, &[ring.zero(), c1, c2]);
        let xi = d.index_of("xi").unwrap();
        prop_assume!(!x.is_zero() && !y.is_zero() && !(&x + &y).is_zero());
        let ex = fixtures::scaled(&d, xi, x);
        let ey = fixtures::scaled(&d, xi, y);
        let twice = deform(&deform(&d, &ex).unwrap(), &ey).unwrap();
        let once = deform(&d, &ex.add(&ey)).unwrap();
        prop_assert_eq!(&twice, &once);
        prop_assert!(check_curved_ainfty(&once, 4).passed());
    }

    #[test]
    fn series_documents_round_trip(x in series(skew())) {
        let ring = BaseRing::new(skew(), N);
        prop_assert_eq!(series_from_terms(&ring, &series_to_terms(&x)).unwrap(), x);
    }

    #[test]
    fn element_documents_round_trip(a in series(skew()), b in series(skew())) {
        let ring = BaseRing::new(skew(), N);
        let d = fixtures::clifford(&ring, &[ring.zero()]);
        let mut e = d.zero();
        *e.coeff_mut(0) = a;
        *e.coeff_mut(1) = b;
        let doc = element_to_doc(&e, d.basis());
        prop_assert_eq!(element_from_doc(&ring, d.basis(), &doc).unwrap(), e);
    }

    #[test]
    fn kset_matches_index_sets(idx in prop::collection::btree_set(0usize..31, 0..8), other in prop::collection::btree_set(0usize..31, 0..8)) {
        let k = KSet::from_indices(idx.iter().copied());
        let l = KSet::from_indices(other.iter().copied());
        prop_assert_eq!(k.indices().collect::<Vec<_>>(), idx.iter().copied().collect::<Vec<_>>());
        prop_assert_eq!(k.len() as usize, idx.len());
        prop_assert_eq!(k.intersect(l).len() as usize, idx.intersection(&other).count());
    }
}
