use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::algebra::{sign_series, CurvedAlgebra, Element};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub arity: usize,
    pub inputs: Vec<String>,
    /// Nonzero residual as `(generator, series)` pairs.
    pub residual: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub arity_bound: usize,
    pub tuples_checked: usize,
    pub violations: Vec<Violation>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Composable basis tuples of length `k`, in lexicographic order.
pub fn composable_tuples(alg: &CurvedAlgebra, k: usize) -> Vec<Vec<usize>> {
    let n = alg.rank();
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut cur = Vec::with_capacity(k);
    fn rec(alg: &CurvedAlgebra, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if let Some(&last) = cur.last() {
                if alg.ends()[last].1 != alg.ends()[i].0 {
                    continue;
                }
            }
            cur.push(i);
            rec(alg, n, k, cur, out);
            cur.pop();
        }
    }
    rec(alg, n, k, &mut cur, &mut out);
    out
}

/// Left-hand side of the curved A-infinity relation on a basis tuple:
/// `sum (-1)^(reduced degrees left of the inner op) mu(x.., mu^j(..), ..x)`,
/// including `j = 0` curvature insertions.
pub fn relation_residual(alg: &CurvedAlgebra, x: &[usize]) -> Element {
    let k = x.len();
    let ring = alg.ring();
    let mut total = alg.zero();
    let mut key = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let sign_neg = x[..i].iter().map(|&l| alg.basis()[l].reduced() as usize).sum::<usize>() % 2 == 1;
        let sign = sign_series(ring, sign_neg);
        for j in 0..=(k - i) {
            let Some(inner) = alg.op(&x[i..i + j]) else {
                continue;
            };
            for b in inner.support() {
                key.clear();
                key.extend_from_slice(&x[..i]);
                key.push(b);
                key.extend_from_slice(&x[i + j..]);
                if let Some(outer) = alg.op(&key) {
                    let c = &sign * inner.coeff(b);
                    total.add_assign_scaled(outer, &c);
                }
            }
        }
    }
    total
}

/// Checks every relation of arity `0..=arity_bound` on composable basis
/// tuples modulo the truncation. Violations are data, not errors.
pub fn check_curved_ainfty(alg: &CurvedAlgebra, arity_bound: usize) -> RelationReport {
    let mut tuples_checked = 0;
    let mut violations = Vec::new();
    for k in 0..=arity_bound {
        let tuples = composable_tuples(alg, k);
        tuples_checked += tuples.len();
        let found: Vec<Violation> = tuples
            .par_iter()
            .filter_map(|t| {
                let r = relation_residual(alg, t);
                (!r.is_zero()).then(|| Violation {
                    arity: k,
                    inputs: t.iter().map(|&i| alg.basis()[i].name.clone()).collect(),
                    residual: r.describe(alg.basis()),
                })
            })
            .collect();
        violations.extend(found);
    }
    RelationReport { arity_bound, tuples_checked, violations }
}
