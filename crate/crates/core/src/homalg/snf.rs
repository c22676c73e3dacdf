use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Smith normal form `u * m * v = d`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    rank: usize,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Nonzero diagonal entries, each dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Columns of `v` past the rank: a basis of the integer kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.v.cols()).map(|j| self.v.column(j)).collect()
    }

    /// Particular solution of `m x = b` with free parameters set to zero.
    pub fn solve(&self, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let c = self.u.mul_vec(b)?;
        let mut y = vec![BigInt::zero(); self.v.rows()];
        for (i, ci) in c.iter().enumerate() {
            if i < self.rank {
                let (q, r) = ci.div_rem(self.d.get(i, i));
                if !r.is_zero() {
                    return Ok(None);
                }
                y[i] = q;
            } else if !ci.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(self.v.mul_vec(&y)?))
    }
}

/// Pivot: smallest absolute value in the trailing block, ties to the lowest
/// (row, column) index.
fn find_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut d = m.clone();
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        while let Some((pi, pj)) = find_pivot(&d, t) {
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = d.get(i, t) / &p;
                let q = -q;
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = d.get(t, j) / &p;
                let q = -q;
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_zero() {
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        rank = t + 1;
    }
    let snf = Snf { u, d, v, rank };
    debug_assert!(verify_snf(m, &snf).is_ok(), "Smith form identity failed");
    snf
}

/// Exact re-check of `u m v = d`, diagonality, divisibility and unimodularity.
pub fn verify_snf(m: &IntMatrix, s: &Snf) -> Result<()> {
    let prod = s.u.mul(m)?.mul(&s.v)?;
    if prod != s.d {
        return Err(Error::Property("U*M*V differs from D".into()));
    }
    for i in 0..s.d.rows() {
        for j in 0..s.d.cols() {
            if i != j && !s.d.get(i, j).is_zero() {
                return Err(Error::Property(format!("D has off-diagonal entry at ({i},{j})")));
            }
        }
    }
    let diag: Vec<BigInt> = (0..s.d.rows().min(s.d.cols())).map(|i| s.d.get(i, i).clone()).collect();
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
        if !ok || w[0].is_negative() {
            return Err(Error::Property(format!("divisibility chain broken: {} then {}", w[0], w[1])));
        }
    }
    for (name, x) in [("U", &s.u), ("V", &s.v)] {
        if x.determinant()?.abs() != BigInt::one() {
            return Err(Error::Property(format!("{name} is not unimodular")));
        }
    }
    Ok(())
}

/// Some integer `x` with `m x = b`, or `None` when no integer solution exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.rows() {
        return Err(Error::invariant(format!("right-hand side has length {} but matrix has {} rows", b.len(), m.rows())));
    }
    let x = smith_normal_form(m).solve(b)?;
    if let Some(x) = &x {
        debug_assert_eq!(&m.mul_vec(x)?, b);
    }
    Ok(x)
}

pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    smith_normal_form(m).kernel_basis()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn zero_and_identity() {
        let z = IntMatrix::zeros(2, 3);
        let s = smith_normal_form(&z);
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(3));
        assert!(s.d.is_zero());
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    #[test]
    fn two_by_two_example() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.invariant_factors(), bi(&[2, 4]));
        verify_snf(&m, &s).unwrap();
    }

    #[test]
    fn divisibility_repair() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.invariant_factors(), bi(&[1, 6]));
        verify_snf(&m, &s).unwrap();
    }

    #[test]
    fn solving() {
        let m = IntMatrix::identity(3);
        assert_eq!(solve_integer(&m, &bi(&[4, -1, 7])).unwrap(), Some(bi(&[4, -1, 7])));
        assert_eq!(solve_integer(&IntMatrix::from_i64(&[&[2]]), &bi(&[3])).unwrap(), None);
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        assert_eq!(solve_integer(&m, &bi(&[2, 6])).unwrap(), Some(bi(&[1, 0])));
        assert!(solve_integer(&m, &bi(&[1])).is_err());
    }

    #[test]
    fn kernel_of_row() {
        let m = IntMatrix::from_i64(&[&[2, 3]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(m.mul_vec(&k[0]).unwrap(), bi(&[0]));
        let g = k[0][0].gcd(&k[0][1]);
        assert!(g.is_one());
    }
}
