//! Command-line front end for the `ratcurve` library.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ratcurve::arith::Rational;
use ratcurve::curve::{classify, AffinePoint, PlaneCurve};
use ratcurve::elliptic::{cubic_to_weierstrass, nagell_lutz_torsion, order_of_point, Order};
use ratcurve::excise::{build_excision_system, find_projection_center, ExcisionRecord};
use ratcurve::genus0::{find_conic_point, sweep_enumerate, Conic};
use ratcurve::oracle::{
    conic_solvable, load_corpus_file, BoundedSearchOracle, ConicOracle, ExistenceOracle, QueryLog, TableOracle,
};
use ratcurve::poly::parse_polynomial;
use ratcurve::relative::{decide_finiteness_genus1, dispatch, Finiteness, Outcome, RunLimits, SolutionReport};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "ratcurve", version, about = "Rational points on plane curves relative to an existence oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Genus and the possible shapes of the solution set.
    Classify { curve: String },
    /// Rational points up to `--height-bound`.
    Points { curve: String },
    /// Decide `a x^2 + b y^2 = c` and sweep its points.
    Conic { curve: String },
    /// Weierstrass model and torsion of a cubic.
    Torsion { curve: String },
    /// Remove the fibers over `--at` and project back to the plane.
    Excise {
        curve: String,
        /// Comma-separated x-values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Run the algorithm matching the genus.
    Solve { curve: String },
    /// Decide finiteness of a genus-1 curve.
    DecideFiniteness { curve: String },
}

#[derive(Debug, Clone, Copy, Default, ValueEnum, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, clap::Args)]
pub struct Options {
    /// `search:<B>`, `table:<PATH>`, `conic` or `curated`.
    #[arg(long, global = true)]
    pub oracle: Option<String>,
    /// Height bound for `points` and `conic`.
    #[arg(long, global = true, default_value_t = 10)]
    pub height_bound: u64,
    /// Use this genus instead of the smooth-curve formula.
    #[arg(long, global = true)]
    pub genus: Option<u32>,
    /// Excision rounds before giving up.
    #[arg(long, global = true, default_value_t = RunLimits::default().max_rounds)]
    pub max_rounds: u32,
    /// Largest degree allowed for an excised curve.
    #[arg(long, global = true, default_value_t = RunLimits::default().max_degree)]
    pub max_degree: u32,
    /// Height bound when searching for a point after a yes.
    #[arg(long, global = true, default_value_t = RunLimits::default().max_search_height)]
    pub search_height: u64,
    /// Largest projection center height tried.
    #[arg(long, global = true, default_value_t = RunLimits::default().center_height)]
    pub center_height: u64,
    /// Height up to which each projection is checked.
    #[arg(long, global = true, default_value_t = RunLimits::default().check_height)]
    pub check_height: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("bad oracle spec `{0}`; expected search:<B>, table:<PATH>, conic or curated")]
    OracleSpec(String),
    #[error("command needs --oracle")]
    MissingOracle,
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

pub fn parse_oracle(spec: &str) -> Result<Box<dyn ExistenceOracle>, CliError> {
    let bad = || CliError::OracleSpec(spec.to_string());
    match spec.split_once(':') {
        Some(("search", b)) => {
            let bound = b.parse::<u64>().map_err(|_| bad())?;
            Ok(Box::new(BoundedSearchOracle { bound }))
        }
        Some(("table", path)) => {
            let corpus = load_corpus_file(&PathBuf::from(path)).map_err(input)?;
            Ok(Box::new(TableOracle { corpus, source: path.to_string() }))
        }
        None if spec == "conic" => Ok(Box::new(ConicOracle)),
        None if spec == "curated" => Ok(Box::new(TableOracle::curated())),
        _ => Err(bad()),
    }
}

/// What a command produced: a document, a text rendering and an exit code.
pub struct Report {
    pub doc: Value,
    pub text: String,
    pub code: i32,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.doc).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn point_list(points: &[AffinePoint]) -> Vec<String> {
    points.iter().map(|p| p.to_string()).collect()
}

fn load_curve(text: &str, genus: Option<u32>) -> Result<PlaneCurve, CliError> {
    let f = parse_polynomial(text).map_err(input)?;
    Ok(PlaneCurve::new(f).map_err(input)?.with_genus(genus))
}

fn chain_summary(chain: &[ExcisionRecord]) -> Vec<Value> {
    chain
        .iter()
        .map(|r| {
            json!({
                "center": r.center.to_string(),
                "excised_x": r.source.excised_x.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "degree_of_h": r.certificate.degree_of_h,
                "check_height": r.certificate.check_height,
                "points_projected": r.certificate.points_projected,
                "points_pulled_back": r.certificate.points_pulled_back,
                "h": r.h.to_string(),
            })
        })
        .collect()
}

fn log_doc(log: &QueryLog) -> Value {
    serde_json::to_value(log).expect("log serializes")["entries"].clone()
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let o = &cli.opts;
    let limits = RunLimits {
        max_rounds: o.max_rounds,
        max_search_height: o.search_height,
        max_degree: o.max_degree,
        center_height: o.center_height,
        check_height: o.check_height,
    };
    limits.validate().map_err(input)?;
    match &cli.command {
        Command::Classify { curve } => classify_cmd(&load_curve(curve, o.genus)?),
        Command::Points { curve } => {
            let c = load_curve(curve, o.genus)?;
            let pts = c.enumerate_points(o.height_bound);
            let mut text = format!("{} points of height at most {}\n", pts.len(), o.height_bound);
            for p in &pts {
                writeln!(text, "{p}").unwrap();
            }
            let doc = json!({
                "command": "points",
                "input": c.f.to_string(),
                "height_bound": o.height_bound,
                "points": point_list(&pts),
            });
            Ok(Report { doc, text, code: 0 })
        }
        Command::Conic { curve } => conic_cmd(&load_curve(curve, o.genus)?, o.height_bound),
        Command::Torsion { curve } => torsion_cmd(&load_curve(curve, o.genus)?, limits.max_search_height),
        Command::Excise { curve, at } => {
            let c = load_curve(curve, o.genus)?;
            let xs: Vec<Rational> = at
                .iter()
                .map(|s| s.trim().parse::<Rational>().map_err(|_| input(format!("bad rational `{s}`"))))
                .collect::<Result<_, _>>()?;
            let s = build_excision_system(&c, &xs).map_err(input)?;
            let rec = find_projection_center(&s, limits.center_height, limits.check_height).map_err(input)?;
            let text = format!(
                "space system: {} = 0, {} = 0\ncenter: {}\nh = {} = 0 (degree {})\ncertified to height {}: {} points projected, {} pulled back\n",
                s.f,
                s.aux(),
                rec.center,
                rec.h,
                rec.certificate.degree_of_h,
                rec.certificate.check_height,
                rec.certificate.points_projected,
                rec.certificate.points_pulled_back
            );
            let doc = json!({
                "command": "excise",
                "input": c.f.to_string(),
                "excision": serde_json::to_value(&rec).expect("record serializes"),
            });
            Ok(Report { doc, text, code: 0 })
        }
        Command::Solve { curve } | Command::DecideFiniteness { curve } => {
            let c = load_curve(curve, o.genus)?;
            let oracle = parse_oracle(o.oracle.as_deref().ok_or(CliError::MissingOracle)?)?;
            let report = if matches!(cli.command, Command::Solve { .. }) {
                dispatch(&c, oracle.as_ref(), &limits)
            } else {
                decide_finiteness_genus1(&c, oracle.as_ref(), &limits)
            }
            .map_err(input)?;
            let name = if matches!(cli.command, Command::Solve { .. }) { "solve" } else { "decide-finiteness" };
            Ok(solution_report(name, &report, &oracle.describe(), &limits))
        }
    }
}

fn classify_cmd(c: &PlaneCurve) -> Result<Report, CliError> {
    let genus = c.genus().map_err(input)?;
    let t = classify(genus);
    let text = format!("{c}\ndegree {}, genus {genus}\npossibilities: {}\n", c.degree(), t.describe());
    let doc = json!({
        "command": "classify",
        "input": c.f.to_string(),
        "degree": c.degree(),
        "genus": genus,
        "genus_override": c.genus_override,
        "trichotomy": t.describe(),
    });
    Ok(Report { doc, text, code: 0 })
}

fn conic_cmd(c: &PlaneCurve, bound: u64) -> Result<Report, CliError> {
    let q = Conic::from_curve(c).map_err(input)?;
    let exists = conic_solvable(&q.a, &q.b, &q.c);
    let mut text =
        format!("{} x^2 + {} y^2 = {}: {}\n", q.a, q.b, q.c, if exists { "solvable" } else { "no rational points" });
    let (base, pts) = match find_conic_point(&q) {
        Some(p) => {
            let pts = sweep_enumerate(&q, &p, bound).map_err(input)?;
            writeln!(text, "base point {p}; {} points of height at most {bound}", pts.len()).unwrap();
            for r in &pts {
                writeln!(text, "{r}").unwrap();
            }
            (Some(p.to_string()), pts)
        }
        None => (None, Vec::new()),
    };
    let doc = json!({
        "command": "conic",
        "input": c.f.to_string(),
        "coefficients": [q.a.to_string(), q.b.to_string(), q.c.to_string()],
        "solvable": exists,
        "base_point": base,
        "height_bound": bound,
        "points": point_list(&pts),
    });
    Ok(Report { doc, text, code: 0 })
}

fn torsion_cmd(c: &PlaneCurve, search: u64) -> Result<Report, CliError> {
    let p = c.first_point(search).ok_or_else(|| input(format!("no point of height at most {search} to start from")))?;
    let (w, maps) = cubic_to_weierstrass(c, &p).map_err(input)?;
    let torsion = nagell_lutz_torsion(&w);
    let mut text = format!("base point {p}\nmodel {w}\n{} affine torsion points\n", torsion.len());
    let mut entries = Vec::new();
    for t in &torsion {
        let n = match order_of_point(&w, t) {
            Order::Finite(n) => n,
            Order::Infinite => unreachable!("torsion points have finite order"),
        };
        writeln!(text, "{t} order {n}").unwrap();
        entries.push(json!({ "point": t.to_string(), "order": n }));
    }
    let doc = json!({
        "command": "torsion",
        "input": c.f.to_string(),
        "base_point": p.to_string(),
        "model": w,
        "maps": maps,
        "torsion": entries,
    });
    Ok(Report { doc, text, code: 0 })
}

fn solution_report(name: &str, r: &SolutionReport, oracle: &str, limits: &RunLimits) -> Report {
    let mut text = format!("{}\ngenus {}: {}\n", r.original_curve, r.genus, classify(r.genus).describe());
    let (code, outcome, points) = match &r.outcome {
        Outcome::FullSet { points } => {
            writeln!(text, "full solution set: {} points", points.len()).unwrap();
            (0, json!({ "kind": "FullSet" }), points.clone())
        }
        Outcome::Finiteness { verdict, model } => {
            let v = match verdict {
                Finiteness::Finite => "Finite",
                Finiteness::Infinite => "Infinite",
            };
            writeln!(text, "finiteness: {v}").unwrap();
            if let Some(m) = model {
                writeln!(text, "model {} from base point {}", m.model, m.base_point).unwrap();
            }
            (0, json!({ "kind": "Finiteness", "verdict": v, "model": model }), Vec::new())
        }
        Outcome::Genus0 { exists, parametrization } => {
            writeln!(text, "rational point exists: {exists}").unwrap();
            if let Some(p) = parametrization {
                writeln!(text, "lines through {}", p.base_point).unwrap();
            }
            let base = parametrization.as_ref().map(|p| p.base_point.to_string());
            (0, json!({ "kind": "Genus0", "exists": exists, "base_point": base }), Vec::new())
        }
        Outcome::Aborted { reason, partial } => {
            writeln!(text, "aborted: {reason}").unwrap();
            (2, json!({ "kind": "Aborted", "reason": reason }), partial.clone())
        }
    };
    for p in &points {
        writeln!(text, "{p}").unwrap();
    }
    for rec in &r.excision_chain {
        writeln!(
            text,
            "excised x in {{{}}} via center {}: degree {}, certified to height {}",
            rec.source.excised_x.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
            rec.center,
            rec.certificate.degree_of_h,
            rec.certificate.check_height
        )
        .unwrap();
    }
    writeln!(text, "{} oracle queries ({oracle})", r.log.len()).unwrap();
    for e in &r.log.entries {
        writeln!(text, "  round {}: {:?}", e.round, e.verdict).unwrap();
    }
    let doc = json!({
        "command": name,
        "input": r.original_curve.f.to_string(),
        "genus": r.genus,
        "trichotomy": classify(r.genus).describe(),
        "oracle": oracle,
        "limits": limits,
        "outcome": outcome,
        "points": point_list(&points),
        "excision_chain": chain_summary(&r.excision_chain),
        "log": log_doc(&r.log),
        "exit_code": code,
    });
    Report { doc, text, code }
}
