use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// Two-periodic complex of free abelian groups
/// `even --d_even--> odd --d_odd--> even`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntComplex {
    even_rank: usize,
    odd_rank: usize,
    d_even: IntMatrix,
    d_odd: IntMatrix,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyPiece {
    pub free_rank: usize,
    #[serde(with = "crate::io::bigint_vec")]
    pub torsion: Vec<BigInt>,
}

impl HomologyPiece {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homology {
    pub even: HomologyPiece,
    pub odd: HomologyPiece,
}

impl Homology {
    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }
}

impl IntComplex {
    /// `d_even` is `odd_rank x even_rank`, `d_odd` is `even_rank x odd_rank`.
    pub fn new(d_even: IntMatrix, d_odd: IntMatrix) -> Result<Self> {
        let (even_rank, odd_rank) = (d_even.cols(), d_even.rows());
        if d_odd.rows() != even_rank || d_odd.cols() != odd_rank {
            return Err(Error::invariant(format!(
                "differential shapes {}x{} and {}x{} do not form a two-periodic complex",
                d_even.rows(),
                d_even.cols(),
                d_odd.rows(),
                d_odd.cols()
            )));
        }
        if !d_odd.mul(&d_even)?.is_zero() || !d_even.mul(&d_odd)?.is_zero() {
            return Err(Error::invariant("d o d is not zero"));
        }
        Ok(IntComplex { even_rank, odd_rank, d_even, d_odd })
    }

    pub fn even_rank(&self) -> usize {
        self.even_rank
    }

    pub fn odd_rank(&self) -> usize {
        self.odd_rank
    }

    pub fn d_even(&self) -> &IntMatrix {
        &self.d_even
    }

    pub fn d_odd(&self) -> &IntMatrix {
        &self.d_odd
    }

    pub fn homology(&self) -> Homology {
        let se = smith_normal_form(&self.d_even);
        let so = smith_normal_form(&self.d_odd);
        let torsion = |s: &super::snf::Snf| -> Vec<BigInt> { s.invariant_factors().into_iter().filter(|f| !f.is_one()).collect() };
        Homology {
            even: HomologyPiece { free_rank: self.even_rank - se.rank() - so.rank(), torsion: torsion(&so) },
            odd: HomologyPiece { free_rank: self.odd_rank - so.rank() - se.rank(), torsion: torsion(&se) },
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_zero()
    }
}

/// Mapping cone of a chain map `f` between two-periodic complexes:
/// `Cone(f)^even = A^odd + B^even`, `Cone(f)^odd = A^even + B^odd`,
/// `d(a, b) = (-d_A a, f a + d_B b)`.
pub fn mapping_cone(a: &IntComplex, b: &IntComplex, f_even: &IntMatrix, f_odd: &IntMatrix) -> Result<IntComplex> {
    let (a0, a1, b0, b1) = (a.even_rank, a.odd_rank, b.even_rank, b.odd_rank);
    if f_even.rows() != b0 || f_even.cols() != a0 || f_odd.rows() != b1 || f_odd.cols() != a1 {
        return Err(Error::invariant("chain map has the wrong shape"));
    }
    // even part (a odd, b even) -> odd part (a even, b odd)
    let mut de = IntMatrix::zeros(a0 + b1, a1 + b0);
    for i in 0..a0 {
        for j in 0..a1 {
            de.set(i, j, -a.d_odd.get(i, j));
        }
    }
    for i in 0..b1 {
        for j in 0..a1 {
            de.set(a0 + i, j, f_odd.get(i, j).clone());
        }
        for j in 0..b0 {
            de.set(a0 + i, a1 + j, b.d_even.get(i, j).clone());
        }
    }
    let mut dd = IntMatrix::zeros(a1 + b0, a0 + b1);
    for i in 0..a1 {
        for j in 0..a0 {
            dd.set(i, j, -a.d_even.get(i, j));
        }
    }
    for i in 0..b0 {
        for j in 0..a0 {
            dd.set(a1 + i, j, f_even.get(i, j).clone());
        }
        for j in 0..b1 {
            dd.set(a1 + i, a0 + j, b.d_odd.get(i, j).clone());
        }
    }
    IntComplex::new(de, dd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_differentials() {
        let c = IntComplex::new(IntMatrix::zeros(3, 2), IntMatrix::zeros(2, 3)).unwrap();
        let h = c.homology();
        assert_eq!((h.even.free_rank, h.odd.free_rank), (2, 3));
        assert!(h.even.torsion.is_empty() && h.odd.torsion.is_empty());
    }

    #[test]
    fn multiplication_by_two() {
        let c = IntComplex::new(IntMatrix::from_i64(&[&[2]]), IntMatrix::zeros(1, 1)).unwrap();
        let h = c.homology();
        assert!(h.even.is_zero());
        assert_eq!(h.odd.free_rank, 0);
        assert_eq!(h.odd.torsion, vec![BigInt::from(2)]);
        assert!(!c.is_acyclic());
    }

    #[test]
    fn identity_is_acyclic() {
        let c = IntComplex::new(IntMatrix::identity(1), IntMatrix::zeros(1, 1)).unwrap();
        assert!(c.is_acyclic());
        let empty = IntComplex::new(IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0)).unwrap();
        assert!(empty.is_acyclic());
    }

    #[test]
    fn rejects_non_complex() {
        let d = IntMatrix::identity(1);
        assert!(IntComplex::new(d.clone(), d).is_err());
    }

    #[test]
    fn cone_of_identity_map() {
        let a = IntComplex::new(IntMatrix::zeros(1, 2), IntMatrix::zeros(2, 1)).unwrap();
        let c = mapping_cone(&a, &a, &IntMatrix::identity(2), &IntMatrix::identity(1)).unwrap();
        assert!(c.is_acyclic());
        let c = mapping_cone(&a, &a, &IntMatrix::zeros(2, 2), &IntMatrix::zeros(1, 1)).unwrap();
        assert!(!c.is_acyclic());
    }
}
