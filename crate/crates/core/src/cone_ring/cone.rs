use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homalg::{kernel_basis, rank, IntMatrix};

/// Generators of the cone and optional metadata. Dual-monoid membership is
/// decided by pairing against the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConeSpec")]
pub struct ConeSpec {
    pub p_count: usize,
    pub generators: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ample: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anticanonical: Option<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct RawConeSpec {
    p_count: usize,
    generators: Vec<Vec<Coord>>,
    #[serde(default)]
    ample: Option<Vec<i64>>,
    #[serde(default)]
    anticanonical: Option<Vec<i64>>,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational entry '{s}'")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational entry '{s}'")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(n, d))
}

impl TryFrom<RawConeSpec> for ConeSpec {
    type Error = Error;

    fn try_from(raw: RawConeSpec) -> Result<Self> {
        let rows = raw
            .generators
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| match c {
                        Coord::Int(i) => Ok(BigRational::from_integer(i.into())),
                        Coord::Text(s) => parse_rational(&s),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConeSpec { generators: clear_denominators(&rows)?, p_count: raw.p_count, ample: raw.ample, anticanonical: raw.anticanonical })
    }
}

/// Scales each rational generator by the positive lcm of its denominators.
pub fn clear_denominators(rows: &[Vec<BigRational>]) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| {
                    let v = x.numer() * (&l / x.denom());
                    v.to_i64().ok_or_else(|| Error::Parse("generator entry out of range".into()))
                })
                .collect()
        })
        .collect()
}

impl ConeSpec {
    pub fn new(p_count: usize, generators: Vec<Vec<i64>>) -> Self {
        ConeSpec { p_count, generators, ample: None, anticanonical: None }
    }

    /// Standard generators `e_1..e_m`, whose dual monoid is the orthant.
    pub fn orthant(m: usize) -> Self {
        let gens = (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(m, gens)
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::invariant("cone needs at least one generator"));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != self.p_count {
                return Err(Error::invariant(format!("generator {i} has length {} but p_count is {}", g.len(), self.p_count)));
            }
            if g.iter().all(|&x| x == 0) {
                return Err(Error::invariant(format!("generator {i} is zero")));
            }
        }
        let r = rank(&self.generator_matrix());
        if r != self.p_count {
            return Err(Error::invariant(format!("rank condition: generator matrix has rank {r}, expected p_count = {}", self.p_count)));
        }
        for (name, v) in [("ample", &self.ample), ("anticanonical", &self.anticanonical)] {
            if let Some(v) = v {
                if v.len() != self.generators.len() || v.iter().any(|&c| c < 0) {
                    return Err(Error::invariant(format!("{name} must list one nonnegative coefficient per generator")));
                }
            }
        }
        Ok(())
    }

    pub fn generator_matrix(&self) -> IntMatrix {
        let rows = self.generators.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMatrix::from_rows(rows, self.p_count).expect("validated shape")
    }
}

/// A lattice point of the dual monoid, with its pairings and order cached.
/// Equality and ordering look at coordinates only.
#[derive(Clone, Debug, Serialize)]
#[serde(into = "Vec<i64>")]
pub struct EffectiveClass {
    coords: Vec<i64>,
    pairings: Vec<i64>,
    ord: u32,
}

impl From<EffectiveClass> for Vec<i64> {
    fn from(c: EffectiveClass) -> Self {
        c.coords
    }
}

impl EffectiveClass {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn pairings(&self) -> &[i64] {
        &self.pairings
    }

    pub fn ord(&self) -> u32 {
        self.ord
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }
}

impl PartialEq for EffectiveClass {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for EffectiveClass {}

impl Hash for EffectiveClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl PartialOrd for EffectiveClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EffectiveClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl fmt::Display for EffectiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Validated cone with the lookup structures needed for order computations.
#[derive(Debug)]
pub struct Cone {
    spec: ConeSpec,
    /// Indices of `p_count` linearly independent generators.
    frame: Vec<usize>,
    /// `det * frame^{-1}`.
    frame_adj: Vec<Vec<i64>>,
    frame_det: i64,
    ord_cache: RwLock<HashMap<Vec<i64>, u32>>,
    rays: OnceLock<Vec<Vec<i64>>>,
    hilbert: OnceLock<Vec<EffectiveClass>>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Cone {}

fn minor(m: &[Vec<i64>], skip_r: usize, skip_c: usize) -> IntMatrix {
    let n = m.len();
    let rows = (0..n).filter(|&i| i != skip_r).map(|i| (0..n).filter(|&j| j != skip_c).map(|j| BigInt::from(m[i][j])).collect()).collect();
    IntMatrix::from_rows(rows, n - 1).expect("square minor")
}

impl Cone {
    pub fn new(spec: ConeSpec) -> Result<Arc<Cone>> {
        spec.validate()?;
        let p = spec.p_count;
        let mut frame = Vec::new();
        for i in 0..spec.generators.len() {
            let mut trial = frame.clone();
            trial.push(i);
            let rows = trial.iter().map(|&k| spec.generators[k].iter().map(|&x| BigInt::from(x)).collect()).collect();
            if rank(&IntMatrix::from_rows(rows, p)?) == trial.len() {
                frame = trial;
            }
            if frame.len() == p {
                break;
            }
        }
        let b: Vec<Vec<i64>> = frame.iter().map(|&k| spec.generators[k].clone()).collect();
        let bm = IntMatrix::from_rows(b.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), p)?;
        let det = bm.determinant()?;
        let mut adj = vec![vec![0i64; p]; p];
        for (i, row) in adj.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let c = if p == 1 { BigInt::one() } else { minor(&b, j, i).determinant()? };
                let c = if (i + j) % 2 == 0 { c } else { -c };
                *entry = c.to_i64().ok_or_else(|| Error::invariant("cone generators too large"))?;
            }
        }
        Ok(Arc::new(Cone {
            spec,
            frame,
            frame_adj: adj,
            frame_det: det.to_i64().ok_or_else(|| Error::invariant("cone generators too large"))?,
            ord_cache: RwLock::new(HashMap::new()),
            rays: OnceLock::new(),
            hilbert: OnceLock::new(),
        }))
    }

    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.p_count
    }

    pub fn pairings(&self, v: &[i64]) -> Vec<i64> {
        self.spec.generators.iter().map(|g| g.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_member(&self, v: &[i64]) -> Result<bool> {
        if v.len() != self.dim() {
            return Err(Error::invariant(format!("vector has length {} but the cone lives in dimension {}", v.len(), self.dim())));
        }
        Ok(self.pairings(v).iter().all(|&x| x >= 0))
    }

    pub fn class(&self, coords: &[i64]) -> Result<EffectiveClass> {
        if !self.is_member(coords)? {
            return Err(Error::invariant(format!("{coords:?} is not in the effective monoid")));
        }
        Ok(self.class_unchecked(coords.to_vec(), self.pairings(coords)))
    }

    pub fn zero_class(&self) -> EffectiveClass {
        EffectiveClass { coords: vec![0; self.dim()], pairings: vec![0; self.spec.generators.len()], ord: 0 }
    }

    fn class_unchecked(&self, coords: Vec<i64>, pairings: Vec<i64>) -> EffectiveClass {
        let ord = self.ord_coords(&coords, &pairings);
        EffectiveClass { coords, pairings, ord }
    }

    pub fn add(&self, a: &EffectiveClass, b: &EffectiveClass) -> EffectiveClass {
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        let pairings = a.pairings.iter().zip(&b.pairings).map(|(x, y)| x + y).collect();
        self.class_unchecked(coords, pairings)
    }

    /// `a - b` when it is effective.
    pub fn sub(&self, a: &EffectiveClass, b: &EffectiveClass) -> Option<EffectiveClass> {
        let pairings: Vec<i64> = a.pairings.iter().zip(&b.pairings).map(|(x, y)| x - y).collect();
        if pairings.iter().any(|&x| x < 0) {
            return None;
        }
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect();
        Some(self.class_unchecked(coords, pairings))
    }

    /// All `g` with `g` and `coords - g` effective, sorted lexicographically.
    fn sub_points(&self, pairings: &[i64]) -> Vec<Vec<i64>> {
        let p = self.dim();
        let bounds: Vec<i64> = self.frame.iter().map(|&k| pairings[k]).collect();
        let mut out = Vec::new();
        let mut y = vec![0i64; p];
        'outer: loop {
            let mut g = vec![0i64; p];
            let mut ok = true;
            for (i, gi) in g.iter_mut().enumerate() {
                let s: i64 = self.frame_adj[i].iter().zip(&y).map(|(a, b)| a * b).sum();
                if s % self.frame_det != 0 {
                    ok = false;
                    break;
                }
                *gi = s / self.frame_det;
            }
            if ok {
                let pg = self.pairings(&g);
                if pg.iter().zip(pairings).all(|(&x, &a)| x >= 0 && x <= a) {
                    out.push(g);
                }
            }
            for i in 0..p {
                if y[i] < bounds[i] {
                    y[i] += 1;
                    continue 'outer;
                }
                y[i] = 0;
            }
            break;
        }
        out.sort();
        out
    }

    fn ord_coords(&self, coords: &[i64], pairings: &[i64]) -> u32 {
        if coords.iter().all(|&x| x == 0) {
            return 0;
        }
        if let Some(&v) = self.ord_cache.read().expect("ord cache poisoned").get(coords) {
            return v;
        }
        let mut best = 1;
        for g in self.sub_points(pairings) {
            if g.iter().all(|&x| x == 0) || g == coords {
                continue;
            }
            let pg = self.pairings(&g);
            let rest: Vec<i64> = coords.iter().zip(&g).map(|(a, b)| a - b).collect();
            let pr: Vec<i64> = pairings.iter().zip(&pg).map(|(a, b)| a - b).collect();
            best = best.max(self.ord_coords(&g, &pg) + self.ord_coords(&rest, &pr));
        }
        self.ord_cache.write().expect("ord cache poisoned").insert(coords.to_vec(), best);
        best
    }

    /// Largest `k` with `T^alpha` in the k-th power of the maximal ideal.
    pub fn ord(&self, alpha: &EffectiveClass) -> u32 {
        alpha.ord
    }

    /// Ordered tuples of effective classes summing to `alpha`, lexicographic.
    pub fn decompositions(&self, alpha: &EffectiveClass, parts: usize) -> Vec<Vec<EffectiveClass>> {
        assert!(parts >= 1, "decompositions needs at least one part");
        if parts == 1 {
            return vec![vec![alpha.clone()]];
        }
        let mut out = Vec::new();
        for g in self.sub_points(&alpha.pairings) {
            let first = self.class_unchecked(g.clone(), self.pairings(&g));
            let rest = self.sub(alpha, &first).expect("sub point is below alpha");
            for mut tail in self.decompositions(&rest, parts - 1) {
                tail.insert(0, first.clone());
                out.push(tail);
            }
        }
        out
    }

    /// Primitive extreme rays of the effective monoid's real cone.
    pub fn extreme_rays(&self) -> &[Vec<i64>] {
        self.rays.get_or_init(|| {
            let p = self.dim();
            let s = self.spec.generators.len();
            let mut found = BTreeSet::new();
            for subset in subsets_of_size(s, p.saturating_sub(1)) {
                let rows: Vec<Vec<BigInt>> =
                    subset.iter().map(|&k| self.spec.generators[k].iter().map(|&x| BigInt::from(x)).collect()).collect();
                let m = IntMatrix::from_rows(rows, p).expect("shape");
                let ker = kernel_basis(&m);
                if ker.len() != 1 {
                    continue;
                }
                let r: Vec<i64> = ker[0].iter().map(|x| x.to_i64().expect("small ray")).collect();
                let pr = self.pairings(&r);
                if pr.iter().all(|&x| x >= 0) {
                    found.insert(r);
                } else if pr.iter().all(|&x| x <= 0) {
                    found.insert(r.iter().map(|x| -x).collect());
                }
            }
            found.into_iter().collect()
        })
    }

    /// Irreducible nonzero classes (order exactly one).
    pub fn hilbert_basis(&self) -> &[EffectiveClass] {
        self.hilbert.get_or_init(|| {
            let p = self.dim();
            let rays = self.extreme_rays();
            let lo: Vec<i64> = (0..p).map(|c| rays.iter().map(|r| r[c].min(0)).sum()).collect();
            let hi: Vec<i64> = (0..p).map(|c| rays.iter().map(|r| r[c].max(0)).sum()).collect();
            let mut out = Vec::new();
            let mut v = lo.clone();
            'outer: loop {
                if v.iter().any(|&x| x != 0) && self.is_member(&v).unwrap_or(false) {
                    let c = self.class_unchecked(v.clone(), self.pairings(&v));
                    if c.ord == 1 {
                        out.push(c);
                    }
                }
                for i in 0..p {
                    if v[i] < hi[i] {
                        v[i] += 1;
                        continue 'outer;
                    }
                    v[i] = lo[i];
                }
                break;
            }
            out.sort();
            out
        })
    }

    /// Every class of order below `n`, sorted.
    pub fn classes_below(&self, n: u32) -> Vec<EffectiveClass> {
        let mut all: BTreeSet<EffectiveClass> = BTreeSet::new();
        if n == 0 {
            return Vec::new();
        }
        let mut frontier = vec![self.zero_class()];
        all.insert(self.zero_class());
        for _ in 1..n {
            let mut next = Vec::new();
            for f in &frontier {
                for h in self.hilbert_basis() {
                    let c = self.add(f, h);
                    if c.ord < n && all.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            frontier = next;
        }
        all.into_iter().collect()
    }
}

pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Rational linear functional evaluated on a class.
pub fn rational_pairing(kappa: &[BigRational], v: &[i64]) -> BigRational {
    kappa.iter().zip(v).map(|(k, &x)| k * BigInt::from(x)).fold(BigRational::zero(), |a, b| a + b)
}
