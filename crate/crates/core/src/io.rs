//! JSON schemas for cones, series, algebras, bimodules, geometries and
//! transfer problems, plus their conversions to and from the runtime types.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ainfty_core::{Bimodule, BimoduleKey, CurvedAlgebra, Element, Generator};
use crate::cone_ring::{BaseRing, Cone, ConeSpec, NovikovSeries, PowerSeries, Specializer};
use crate::error::{Error, Result};
use crate::mc_transfer::problems::TransferProblem;
use crate::mc_transfer::{OrderLog, TransferResult};

pub(crate) fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::Parse(format!("'{s}' is not an integer")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n = parse_bigint(n)?;
    let d = parse_bigint(d)?;
    if d == BigInt::from(0) {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(n, d))
}

/// Serde adapter writing integer lists as decimal strings.
pub mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|x| super::parse_bigint(x).map_err(serde::de::Error::custom)).collect()
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON with a trailing newline; stable because every map is ordered.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub class: Vec<i64>,
    pub coeff: String,
}

/// Coefficients keyed by generator name.
pub type ElementDoc = BTreeMap<String, Vec<TermDoc>>;

pub fn series_to_terms(s: &PowerSeries) -> Vec<TermDoc> {
    s.terms().iter().map(|(c, v)| TermDoc { class: c.coords().to_vec(), coeff: v.to_string() }).collect()
}

pub fn series_from_terms(ring: &BaseRing, terms: &[TermDoc]) -> Result<PowerSeries> {
    let mut out = ring.zero();
    for t in terms {
        let class = ring.cone.class(&t.class)?;
        out.add_term(class, parse_bigint(&t.coeff)?);
    }
    Ok(out)
}

/// A series file: the cone, the truncation order and the terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub cone: ConeSpec,
    pub trunc_order: u32,
    pub terms: Vec<TermDoc>,
}

impl SeriesDoc {
    pub fn from_series(s: &PowerSeries) -> Self {
        SeriesDoc { cone: s.cone().spec().clone(), trunc_order: s.trunc_order(), terms: series_to_terms(s) }
    }

    pub fn to_series(&self) -> Result<PowerSeries> {
        series_from_terms(&ring(&self.cone, self.trunc_order)?, &self.terms)
    }
}

pub fn ring(cone: &ConeSpec, trunc_order: u32) -> Result<BaseRing> {
    Ok(BaseRing::new(Cone::new(cone.clone())?, trunc_order))
}

pub fn element_to_doc(x: &Element, basis: &[Generator]) -> ElementDoc {
    x.support().map(|i| (basis[i].name.clone(), series_to_terms(x.coeff(i)))).collect()
}

pub fn element_from_doc(ring: &BaseRing, basis: &[Generator], doc: &ElementDoc) -> Result<Element> {
    let mut out = Element::zero(ring, basis.len());
    for (name, terms) in doc {
        let i = basis.iter().position(|g| &g.name == name).ok_or_else(|| Error::invariant(format!("unknown generator '{name}'")))?;
        *out.coeff_mut(i) = &out.coeff(i).clone() + &series_from_terms(ring, terms)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub name: String,
    pub parity: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpDoc {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub output: ElementDoc,
}

/// Basis, objects and operations, without the ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraBody {
    pub basis: Vec<GeneratorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects: Option<Vec<String>>,
    pub operations: Vec<OpDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub cone: ConeSpec,
    pub trunc_order: u32,
    #[serde(flatten)]
    pub body: AlgebraBody,
}

fn check_parity(p: u8, name: &str) -> Result<()> {
    if p > 1 {
        return Err(Error::Parse(format!("generator '{name}' has parity {p}; expected 0 or 1")));
    }
    Ok(())
}

impl AlgebraBody {
    pub fn from_algebra(alg: &CurvedAlgebra) -> Self {
        let category = alg.objects().len() > 1;
        let basis = alg
            .basis()
            .iter()
            .zip(alg.ends())
            .map(|(g, &(s, t))| GeneratorDoc {
                name: g.name.clone(),
                parity: g.parity,
                source: category.then(|| alg.objects()[s].clone()),
                target: category.then(|| alg.objects()[t].clone()),
            })
            .collect();
        let operations = alg
            .all_ops()
            .map(|(key, val)| OpDoc {
                arity: key.len(),
                inputs: key.iter().map(|&i| alg.basis()[i].name.clone()).collect(),
                output: element_to_doc(val, alg.basis()),
            })
            .collect();
        AlgebraBody { basis, objects: category.then(|| alg.objects().to_vec()), operations }
    }

    pub fn to_algebra(&self, ring: &BaseRing) -> Result<CurvedAlgebra> {
        let basis: Vec<Generator> = self
            .basis
            .iter()
            .map(|g| check_parity(g.parity, &g.name).map(|_| Generator::new(g.name.clone(), g.parity)))
            .collect::<Result<_>>()?;
        let mut names = std::collections::BTreeSet::new();
        if let Some(g) = basis.iter().find(|g| !names.insert(g.name.clone())) {
            return Err(Error::invariant(format!("generator '{}' is listed twice", g.name)));
        }
        let mut alg = match &self.objects {
            None => CurvedAlgebra::new(ring.clone(), basis.clone()),
            Some(objects) => {
                let find = |o: &Option<String>, g: &str| -> Result<usize> {
                    let o = o.as_ref().ok_or_else(|| Error::Parse(format!("generator '{g}' needs source and target")))?;
                    objects.iter().position(|x| x == o).ok_or_else(|| Error::invariant(format!("unknown object '{o}'")))
                };
                let ends =
                    self.basis.iter().map(|g| Ok((find(&g.source, &g.name)?, find(&g.target, &g.name)?))).collect::<Result<Vec<_>>>()?;
                CurvedAlgebra::new_category(ring.clone(), basis.clone(), objects.clone(), ends)?
            }
        };
        for op in &self.operations {
            if op.arity != op.inputs.len() {
                return Err(Error::Parse(format!("operation on ({}) declares arity {}", op.inputs.join(","), op.arity)));
            }
            let key = op
                .inputs
                .iter()
                .map(|n| alg.index_of(n).ok_or_else(|| Error::invariant(format!("unknown generator '{n}'"))))
                .collect::<Result<Vec<_>>>()?;
            let out = element_from_doc(ring, &basis, &op.output)?;
            alg.add_op(key, out)?;
        }
        Ok(alg)
    }
}

impl AlgebraDoc {
    pub fn from_algebra(alg: &CurvedAlgebra) -> Self {
        AlgebraDoc { cone: alg.ring().cone.spec().clone(), trunc_order: alg.ring().trunc_order, body: AlgebraBody::from_algebra(alg) }
    }

    /// Builds and fully validates, including the curvature condition.
    pub fn to_algebra(&self) -> Result<CurvedAlgebra> {
        let alg = self.body.to_algebra(&ring(&self.cone, self.trunc_order)?)?;
        alg.validate()?;
        Ok(alg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleOpDoc {
    pub left: Vec<String>,
    pub module: String,
    pub right: Vec<String>,
    pub output: ElementDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleBody {
    pub basis: Vec<GeneratorDoc>,
    pub operations: Vec<BimoduleOpDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleDoc {
    pub cone: ConeSpec,
    pub trunc_order: u32,
    pub left: AlgebraBody,
    pub right: AlgebraBody,
    pub module: BimoduleBody,
}

fn names(gens: &[Generator], key: &[usize]) -> Vec<String> {
    key.iter().map(|&i| gens[i].name.clone()).collect()
}

fn lookup(gens: &[Generator], names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| gens.iter().position(|g| &g.name == n).ok_or_else(|| Error::invariant(format!("unknown generator '{n}'"))))
        .collect()
}

impl BimoduleBody {
    pub fn from_bimodule(m: &Bimodule) -> Self {
        let basis = m.basis().iter().map(|g| GeneratorDoc { name: g.name.clone(), parity: g.parity, source: None, target: None }).collect();
        let operations = m
            .ops()
            .map(|(k, v)| BimoduleOpDoc {
                left: names(m.left().basis(), &k.left),
                module: m.basis()[k.module].name.clone(),
                right: names(m.right().basis(), &k.right),
                output: element_to_doc(v, m.basis()),
            })
            .collect();
        BimoduleBody { basis, operations }
    }

    pub fn to_bimodule(&self, left: CurvedAlgebra, right: CurvedAlgebra) -> Result<Bimodule> {
        let ring = left.ring().clone();
        let basis: Vec<Generator> = self
            .basis
            .iter()
            .map(|g| check_parity(g.parity, &g.name).map(|_| Generator::new(g.name.clone(), g.parity)))
            .collect::<Result<_>>()?;
        let mut m = Bimodule::new(left, right, basis.clone())?;
        for op in &self.operations {
            let key = BimoduleKey {
                left: lookup(m.left().basis(), &op.left)?,
                module: lookup(&basis, std::slice::from_ref(&op.module))?[0],
                right: lookup(m.right().basis(), &op.right)?,
            };
            m.add_op(key, element_from_doc(&ring, &basis, &op.output)?)?;
        }
        m.validate()?;
        Ok(m)
    }
}

impl BimoduleDoc {
    pub fn from_bimodule(m: &Bimodule) -> Self {
        let ring = m.left().ring();
        BimoduleDoc {
            cone: ring.cone.spec().clone(),
            trunc_order: ring.trunc_order,
            left: AlgebraBody::from_algebra(m.left()),
            right: AlgebraBody::from_algebra(m.right()),
            module: BimoduleBody::from_bimodule(m),
        }
    }

    pub fn to_bimodule(&self) -> Result<Bimodule> {
        let r = ring(&self.cone, self.trunc_order)?;
        self.module.to_bimodule(self.left.to_algebra(&r)?, self.right.to_algebra(&r)?)
    }
}

/// A transfer problem: the bimodule, `m0`, the Maurer-Cartan element `b`
/// of the right algebra and an optional c-unit of the right algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferProblemDoc {
    pub name: String,
    #[serde(flatten)]
    pub bimodule: BimoduleDoc,
    pub m0: ElementDoc,
    pub b: ElementDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_b: Option<ElementDoc>,
    /// Order of the first obstruction when the input is known to halt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_obstruction: Option<usize>,
}

impl TransferProblemDoc {
    pub fn from_problem(p: &TransferProblem) -> Self {
        let m = &p.module;
        TransferProblemDoc {
            name: p.name.clone(),
            bimodule: BimoduleDoc::from_bimodule(m),
            m0: element_to_doc(&p.m0, m.basis()),
            b: element_to_doc(&p.b, m.right().basis()),
            unit_b: p.unit_b.as_ref().map(|e| element_to_doc(e, m.right().basis())),
            expected_obstruction: p.obstructed_at,
        }
    }

    pub fn to_problem(&self) -> Result<TransferProblem> {
        let module = self.bimodule.to_bimodule()?;
        let ring = module.left().ring().clone();
        let right = module.right().basis().to_vec();
        Ok(TransferProblem {
            name: self.name.clone(),
            m0: element_from_doc(&ring, module.basis(), &self.m0)?,
            b: element_from_doc(&ring, &right, &self.b)?,
            unit_b: self.unit_b.as_ref().map(|e| element_from_doc(&ring, &right, e)).transpose()?,
            trunc_order: self.bimodule.trunc_order,
            obstructed_at: self.expected_obstruction,
            module,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CunitDoc {
    pub verified: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<ElementDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferResultDoc {
    pub name: String,
    pub order_achieved: u32,
    pub quasi_iso: bool,
    pub a: ElementDoc,
    pub m: ElementDoc,
    pub log: Vec<OrderLog>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cunit: Option<CunitDoc>,
}

impl TransferResultDoc {
    pub fn from_result(name: &str, module: &Bimodule, res: &TransferResult) -> Self {
        TransferResultDoc {
            name: name.into(),
            order_achieved: res.order_achieved,
            quasi_iso: res.quasi_iso,
            a: element_to_doc(&res.a, module.left().basis()),
            m: element_to_doc(&res.m, module.basis()),
            log: res.log.clone(),
            cunit: res.cunit.as_ref().map(|c| CunitDoc {
                verified: c.verified,
                detail: c.detail.clone(),
                candidate: c.candidate.as_ref().map(|e| element_to_doc(e, module.left().basis())),
            }),
        }
    }
}

/// Arithmetic expression over series of one ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Series(Vec<TermDoc>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Pow { base: Box<Expr>, exp: u32 },
    Truncate { expr: Box<Expr>, order: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExprDoc {
    pub cone: ConeSpec,
    pub trunc_order: u32,
    pub expr: Expr,
    /// Interior functional for the Novikov specialization, as rational strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovTermDoc {
    pub exponent: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovDoc {
    pub scale: String,
    pub level: String,
    pub terms: Vec<NovikovTermDoc>,
}

/// Result of evaluating an expression: a series file plus the optional
/// Novikov specialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesResultDoc {
    #[serde(flatten)]
    pub series: SeriesDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novikov: Option<NovikovDoc>,
}

pub fn eval_expr(ring: &BaseRing, e: &Expr) -> Result<PowerSeries> {
    Ok(match e {
        Expr::Series(t) => series_from_terms(ring, t)?,
        Expr::Add(xs) => xs.iter().try_fold(ring.zero(), |acc, x| Ok::<_, Error>(&acc + &eval_expr(ring, x)?))?,
        Expr::Mul(xs) => xs.iter().try_fold(ring.one(), |acc, x| Ok::<_, Error>(&acc * &eval_expr(ring, x)?))?,
        Expr::Neg(x) => -&eval_expr(ring, x)?,
        Expr::Pow { base, exp } => eval_expr(ring, base)?.pow(*exp),
        Expr::Truncate { expr, order } => {
            let s = eval_expr(ring, expr)?.truncate(*order);
            // back in the ambient ring so it combines with other terms
            PowerSeries::from_terms(ring.cone.clone(), ring.trunc_order, s.terms().clone())
        }
    })
}

impl ExprDoc {
    pub fn evaluate(&self) -> Result<SeriesResultDoc> {
        let r = ring(&self.cone, self.trunc_order)?;
        let s = eval_expr(&r, &self.expr)?;
        let novikov = match &self.kappa {
            None => None,
            Some(k) => {
                let kappa = k.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()?;
                let sp = Specializer::new(r.cone.clone(), kappa)?;
                Some(novikov_doc(sp.scale(), &sp.specialize(&s)?))
            }
        };
        Ok(SeriesResultDoc { series: SeriesDoc::from_series(&s), novikov })
    }
}

fn novikov_doc(scale: &BigRational, n: &NovikovSeries) -> NovikovDoc {
    NovikovDoc {
        scale: scale.to_string(),
        level: n.trunc_level().to_string(),
        terms: n.exponents().iter().map(|(e, c)| NovikovTermDoc { exponent: e.to_string(), coeff: c.to_string() }).collect(),
    }
}

/// Shared handle for callers that build several rings on one cone.
pub fn cone(spec: &ConeSpec) -> Result<Arc<Cone>> {
    Cone::new(spec.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty_core::fixtures;
    use crate::mc_transfer::problems::{halting_problems, oracle_problems};
    use crate::moduli_combinatorics::GeometrySpec;

    fn r() -> BaseRing {
        BaseRing::new(Cone::new(ConeSpec::orthant(2)).unwrap(), 4)
    }

    #[test]
    fn series_round_trip() {
        let r = r();
        let s = &r.monomial(&[1, 0], 3).unwrap() + &r.monomial(&[0, 2], -7).unwrap();
        let doc = SeriesDoc::from_series(&s);
        let text = to_json(&doc);
        let back: SeriesDoc = from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_series().unwrap(), s);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn algebra_round_trip() {
        let r = r();
        for alg in [
            fixtures::quadratic_ring(&r, 3),
            fixtures::unit_plus_acyclic(&r),
            fixtures::matrix_category(&fixtures::quadratic_ring(&r, 1), 2).unwrap(),
        ] {
            let doc = AlgebraDoc::from_algebra(&alg);
            let back: AlgebraDoc = from_json(&to_json(&doc)).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_algebra().unwrap(), alg);
        }
    }

    #[test]
    fn curvature_condition_is_reported() {
        let r = r();
        let mut alg = CurvedAlgebra::new(r.clone(), vec![Generator::new("e", 0), Generator::new("x", 1)]);
        alg.add_op_named(&[], "e", r.one()).unwrap();
        let err = AlgebraDoc::from_algebra(&alg).to_algebra().unwrap_err();
        assert!(err.to_string().contains("curvature condition"));
    }

    #[test]
    fn arity_mismatch_is_a_parse_error() {
        let r = r();
        let mut doc = AlgebraDoc::from_algebra(&fixtures::quadratic_ring(&r, 2));
        doc.body.operations[0].arity = 3;
        assert_eq!(doc.to_algebra().unwrap_err().exit_code(), 1);
    }

    #[test]
    fn problem_round_trip() {
        for p in oracle_problems().iter().take(3).chain(halting_problems().iter().take(2)) {
            let doc = TransferProblemDoc::from_problem(p);
            let text = to_json(&doc);
            let back: TransferProblemDoc = from_json(&text).unwrap();
            assert_eq!(back, doc);
            let q = back.to_problem().unwrap();
            assert_eq!(q.module, p.module);
            assert_eq!(q.m0, p.m0);
            assert_eq!(q.b, p.b);
            assert_eq!(q.unit_b, p.unit_b);
            assert_eq!(to_json(&TransferProblemDoc::from_problem(&q)), text);
        }
    }

    #[test]
    fn expression_evaluation() {
        let text = r#"{
            "cone": {"p_count": 1, "generators": [[1]]},
            "trunc_order": 4,
            "expr": {"pow": {"base": {"add": [{"series": [{"class": [0], "coeff": "1"}]},
                                              {"series": [{"class": [1], "coeff": "1"}]}]}, "exp": 5}},
            "kappa": ["1/2"]
        }"#;
        let doc: ExprDoc = from_json(text).unwrap();
        let out = doc.evaluate().unwrap();
        let coeffs: Vec<&str> = out.series.terms.iter().map(|t| t.coeff.as_str()).collect();
        assert_eq!(coeffs, vec!["1", "5", "10", "10"]);
        let nov = out.novikov.clone().unwrap();
        assert_eq!(nov.scale, "1/2");
        assert_eq!(nov.level, "2");
        let back: SeriesResultDoc = from_json(&to_json(&out)).unwrap();
        assert_eq!(back.series, out.series);
    }

    #[test]
    fn geometry_round_trip() {
        let text = r#"{"n": 2, "divisors": ["D1", "D2"], "Q0": ["D1"],
            "classes": [{"name": "L", "c1": 3, "intersections": [1, 1], "admissible": [[], ["D2"]]}],
            "divisor_weights": [[1], [1]]}"#;
        let g: GeometrySpec = from_json(text).unwrap();
        g.validate().unwrap();
        let back: GeometrySpec = from_json(&to_json(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn bad_integer_is_a_parse_error() {
        let r = r();
        let err = series_from_terms(&r, &[TermDoc { class: vec![1, 0], coeff: "1.5".into() }]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = series_from_terms(&r, &[TermDoc { class: vec![-1, 0], coeff: "1".into() }]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
