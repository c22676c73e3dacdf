use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relfuk_core::ainfty_core::check_curved_ainfty;
use relfuk_core::io::{self, AlgebraDoc, BimoduleDoc, ExprDoc, TransferProblemDoc, TransferResultDoc};
use relfuk_core::mc_transfer::{transfer_mc, verify_transfer};
use relfuk_core::moduli_combinatorics::{
    dim_gamma, dim_upper_bound, disc_dim, enumerate_dm_strata, enumerate_types, sphere_exclusion, CombinatorialType, GeometrySpec,
};
use relfuk_core::{Error, Result};
use serde::Serialize;

mod table;

use table::Table;

#[derive(Parser)]
#[command(name = "relfuk", version, about = "Curved A-infinity algebra, Maurer-Cartan transfer and bubble-tree dimension tools")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Truncation order N (defaults to the one in the input file).
    #[arg(long, global = true)]
    trunc_order: Option<u32>,
    /// Largest arity for relation checks.
    #[arg(long, global = true, default_value_t = 4)]
    arity_bound: usize,
    /// Largest number of tree vertices for enumerations.
    #[arg(long, global = true, default_value_t = 3)]
    max_vertices: usize,
    /// Seed for randomized runs. Every subcommand is deterministic, so it is
    /// accepted for interface stability and otherwise unused.
    #[allow(dead_code)]
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a cone, algebra, bimodule, transfer problem or geometry file.
    Validate { file: PathBuf },
    /// Check the curved A-infinity relations of an algebra file.
    Check { file: PathBuf },
    /// Solve the Maurer-Cartan transfer problem in a problem file.
    Transfer { file: PathBuf },
    /// Enumerate combinatorial types or disc strata.
    Enumerate {
        #[command(subcommand)]
        what: Enumerate,
    },
    /// Enumerate bubbled disc configurations and list the survivors.
    Exclude {
        file: PathBuf,
        /// Maslov index of the disc class.
        #[arg(long, allow_hyphen_values = true)]
        maslov: i64,
        /// Number of boundary marked points.
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Intersection numbers of the disc class with each divisor (default zero).
        #[arg(long, value_delimiter = ',')]
        disc_av: Option<Vec<u32>>,
        /// Copies allowed of each class (default one each).
        #[arg(long, value_delimiter = ',')]
        budget: Option<Vec<u32>>,
    },
    /// Evaluate a series expression file.
    Series { file: PathBuf },
}

#[derive(Subcommand)]
enum Enumerate {
    /// Stable decorated trees for a geometry.
    Types {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        budget: Option<Vec<u32>>,
    },
    /// Strata of the compactified disc moduli with k+1 boundary and l interior points.
    Strata {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.global.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit<T: Serialize>(g: &Global, doc: &T, table: Option<&Table>) -> Result<()> {
    let json = io::to_json(doc);
    match &g.output {
        Some(p) => {
            std::fs::write(p, json).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            if let Some(t) = table {
                say(&t.to_string());
            }
        }
        None => match table {
            Some(t) => say(&t.to_string()),
            None => say(&json),
        },
    }
    Ok(())
}

/// Writes to standard output, ignoring a closed pipe.
fn say(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(s.as_bytes());
}

fn sayln(s: &str) {
    say(s);
    say("\n");
}

fn read_value(path: &Path) -> Result<serde_json::Value> {
    io::read_json(path)
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Check { file } => {
            let mut doc: AlgebraDoc = io::read_json(file)?;
            if let Some(n) = g.trunc_order {
                doc.trunc_order = n;
            }
            let alg = doc.to_algebra()?;
            let report = check_curved_ainfty(&alg, g.arity_bound);
            let mut t = Table::new(&["arity", "inputs", "residual"]);
            for v in &report.violations {
                let res = v.residual.iter().map(|(n, s)| format!("{n}: {s}")).collect::<Vec<_>>().join("; ");
                t.row(vec![v.arity.to_string(), v.inputs.join(","), res]);
            }
            sayln(&format!(
                "checked {} tuples up to arity {}, {} violations",
                report.tuples_checked,
                report.arity_bound,
                report.violations.len()
            ));
            emit(g, &report, (!report.passed()).then_some(&t))?;
            Ok(if report.passed() { 0 } else { 4 })
        }
        Command::Transfer { file } => {
            let doc: TransferProblemDoc = io::read_json(file)?;
            let p = doc.to_problem()?;
            let n = g.trunc_order.unwrap_or(p.trunc_order);
            let res = transfer_mc(&p.module, &p.m0, &p.b, n, p.unit_b.as_ref())?;
            let failures = verify_transfer(&p.module, &p.m0, &p.b, &res)?;
            let out = TransferResultDoc::from_result(&p.name, &p.module, &res);
            let mut t = Table::new(&["order", "monomials", "max entry", "correction terms"]);
            for l in &res.log {
                t.row(vec![l.order.to_string(), l.monomials.to_string(), l.max_entry.clone(), l.correction_terms.to_string()]);
            }
            emit(g, &out, g.output.is_some().then_some(&t))?;
            if !failures.is_empty() {
                return Err(Error::Property(failures.join("; ")));
            }
            Ok(0)
        }
        Command::Enumerate { what: Enumerate::Types { file, k, budget } } => {
            let geom: GeometrySpec = io::read_json(file)?;
            geom.validate()?;
            let budget = budget.clone().unwrap_or_else(|| vec![1; geom.classes.len()]);
            let types = enumerate_types(&geom, *k, &budget, g.max_vertices)?;
            let mut t = Table::new(&["#", "vertices", "edges", "markings", "dim", "bound"]);
            let mut rows = Vec::new();
            for (i, ty) in types.iter().enumerate() {
                let d = dim_gamma(ty, *k, &geom)?;
                let b = dim_upper_bound(ty, *k, &geom)?;
                t.row(vec![
                    i.to_string(),
                    describe_vertices(ty, &geom),
                    format!("{:?}", ty.edges),
                    format!("{:?}", ty.markings),
                    d.to_string(),
                    b.to_string(),
                ]);
                rows.push(TypeRow { gamma: ty.clone(), dim: d, bound: b });
            }
            emit(g, &rows, Some(&t))?;
            Ok(0)
        }
        Command::Enumerate { what: Enumerate::Strata { k, ell } } => {
            let strata = enumerate_dm_strata(*k, *ell);
            let mut t = Table::new(&["#", "codim", "dim", "discs", "spheres", "tree"]);
            for (i, s) in strata.iter().enumerate() {
                t.row(vec![
                    i.to_string(),
                    s.codim.to_string(),
                    s.dim.to_string(),
                    s.disc_vertices.to_string(),
                    s.sphere_vertices.to_string(),
                    s.root.to_string(),
                ]);
            }
            emit(g, &strata, Some(&t))?;
            Ok(0)
        }
        Command::Exclude { file, maslov, k, disc_av, budget } => {
            let geom: GeometrySpec = io::read_json(file)?;
            geom.validate()?;
            let av = disc_av.clone().unwrap_or_else(|| vec![0; geom.q()]);
            let budget = budget.clone().unwrap_or_else(|| vec![1; geom.classes.len()]);
            let rep = sphere_exclusion(&geom, *maslov, *k, &av, &budget, g.max_vertices)?;
            let mut t = Table::new(&["#", "maslov0", "tangency", "bubbles", "dim", "canonical"]);
            for (i, c) in rep.survivors.iter().enumerate() {
                t.row(vec![
                    i.to_string(),
                    c.maslov0.to_string(),
                    format!("{:?}", c.tangency.t),
                    c.bubbles.len().to_string(),
                    c.dim.to_string(),
                    c.is_canonical().to_string(),
                ]);
            }
            sayln(&format!(
                "disc dim {}, l = {}, {} bubble trees, {} configurations, {} survivors",
                disc_dim(*maslov, *k),
                rep.ell,
                rep.bubble_trees,
                rep.configs_examined,
                rep.survivors.len()
            ));
            emit(g, &rep, Some(&t))?;
            if !rep.passed() {
                return Err(Error::Property(rep.failures.join("; ")));
            }
            Ok(0)
        }
        Command::Series { file } => {
            let mut doc: ExprDoc = io::read_json(file)?;
            if let Some(n) = g.trunc_order {
                doc.trunc_order = n;
            }
            emit(g, &doc.evaluate()?, None)?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct TypeRow {
    gamma: CombinatorialType,
    dim: i64,
    bound: i64,
}

fn describe_vertices(t: &CombinatorialType, geom: &GeometrySpec) -> String {
    t.vertices
        .iter()
        .map(|v| {
            let c = v.class.map_or("0".to_string(), |i| geom.classes[i].name.clone());
            let k: Vec<&str> = v.k.indices().map(|q| geom.divisors[q].as_str()).collect();
            format!("{c}{{{}}}", k.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn validate(file: &Path) -> Result<u8> {
    let v = read_value(file)?;
    let obj = v.as_object().ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    let kind = if obj.contains_key("m0") {
        let p: TransferProblemDoc = serde_json::from_value(v)?;
        p.to_problem()?;
        "transfer problem"
    } else if obj.contains_key("module") {
        let m: BimoduleDoc = serde_json::from_value(v)?;
        m.to_bimodule()?;
        "bimodule"
    } else if obj.contains_key("operations") {
        let a: AlgebraDoc = serde_json::from_value(v)?;
        a.to_algebra()?;
        "algebra"
    } else if obj.contains_key("divisors") {
        let gs: GeometrySpec = serde_json::from_value(v)?;
        gs.validate()?;
        "geometry"
    } else if obj.contains_key("expr") {
        let e: ExprDoc = serde_json::from_value(v)?;
        e.evaluate()?;
        "series expression"
    } else if obj.contains_key("generators") {
        let c: relfuk_core::cone_ring::ConeSpec = serde_json::from_value(v)?;
        relfuk_core::cone_ring::Cone::new(c)?;
        "cone"
    } else {
        return Err(Error::Parse("unrecognized document".into()));
    };
    sayln(&format!("{}: valid {kind}", file.display()));
    Ok(0)
}
