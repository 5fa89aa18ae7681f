//! Batch command line: load a scenario, run one operation, write CSV/JSON
//! artifacts and a run manifest to an output directory.
//!
//! Exit codes: 0 success, 1 a verify suite failed, 2 bad input (parse,
//! validation, unknown name), 3 budget exceeded (partial artifacts kept).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::{Budget, BUDGET_ENV};
use crate::counting::count_profile;
use crate::covers::{RandomCover, RandomPartition, SigmaAlgebra};
use crate::error::{Error, Result};
use crate::invariant::{
    cesaro_limit, diagonal_measure, invariance_defect, lift_invariant, separated_empirical,
    vertex_enumeration,
};
use crate::measures::{conditional_entropy, relative_entropy_sequence, FiberedMeasure};
use crate::model::BundleRds;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::scenario::{load_scenario, Scenario, ScenarioFile, SCHEMA_VERSION};
use crate::symbolic::{sft_tail_sequence, CylinderCoverSpec};
use crate::tail_entropy::{tail_entropy_estimate, tail_entropy_total, EntropyEstimate};
use crate::verify::run_suite;

#[derive(Debug, Parser)]
#[command(name = "reltail", version, about = "Exact relative tail entropy on finite bundle random dynamical systems")]
pub struct Cli {
    /// Directory receiving CSV/JSON artifacts and manifest.json.
    #[arg(long, global = true, default_value = "reltail-out")]
    pub out: PathBuf,
    /// Budget overrides `key=value[,key=value…]`, applied after the
    /// RELTAIL_BUDGET environment variable.
    #[arg(long, global = true)]
    pub budget: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a scenario.
    Validate(ScenarioArg),
    /// Per-ω counts N(R^(n)|Q^(n))(ω).
    Count {
        #[command(flatten)]
        input: ScenarioArg,
        #[arg(long)]
        r: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        n: usize,
    },
    /// The sequence a_n(R|Q) with ratios and running infimum.
    Tail {
        #[command(flatten)]
        input: ScenarioArg,
        #[arg(long)]
        r: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        nmax: usize,
    },
    /// min over Q of max over R of the tail-entropy bracket.
    TailTotal {
        #[command(flatten)]
        input: ScenarioArg,
        #[arg(long, value_delimiter = ',', required = true)]
        qfamily: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        rfamily: Vec<String>,
        #[arg(long)]
        nmax: usize,
    },
    /// Tail entropy of cylinder covers on a product of subshifts.
    SftTail {
        #[command(flatten)]
        input: ScenarioArg,
        #[arg(long)]
        sft: String,
        /// `COMPONENTS[:DEPTH]`, e.g. `0,1:2`, or `trivial`.
        #[arg(long)]
        rspec: String,
        #[arg(long)]
        qspec: String,
        #[arg(long)]
        nmax: usize,
    },
    /// Conditional entropy H_μ(R|S) and, with --nmax, b_n = H_μ(R^(n)|S).
    Entropy {
        #[command(flatten)]
        input: ScenarioArg,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        r: String,
        /// A partition name, `trivial`, `fibers`, or `factor:MAP`.
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Invariant measures: polytope vertices, Cesàro limits or lifts.
    Invariant {
        #[command(flatten)]
        input: ScenarioArg,
        /// System for --vertices.
        #[arg(long)]
        system: Option<String>,
        #[arg(long, group = "mode", requires = "system")]
        vertices: bool,
        #[arg(long, group = "mode", value_name = "MU")]
        cesaro: Option<String>,
        #[arg(long, group = "mode", num_args = 2, value_names = ["MAP", "MU"])]
        lift: Option<Vec<String>>,
    },
    /// Measure constructions from maximal separated sets.
    Construct {
        #[command(flatten)]
        input: ScenarioArg,
        /// Empirical measures of one separated-set step.
        #[arg(long, group = "kind", required = true)]
        separated: bool,
        /// Diagonal measure along a refining chain of covers.
        #[arg(long, group = "kind")]
        diagonal: bool,
        #[arg(long)]
        system: String,
        /// Cover measuring separation (--separated).
        #[arg(long)]
        p: Option<String>,
        /// Cover whose elements host the separated sets (--separated).
        #[arg(long)]
        q: Option<String>,
        /// Refining chain of Q covers (--diagonal).
        #[arg(long, value_delimiter = ',')]
        chain: Vec<String>,
        /// Matching chain of P covers (--diagonal).
        #[arg(long, value_delimiter = ',')]
        pchain: Vec<String>,
        #[arg(long)]
        n: usize,
        /// One rational radius, or one per base point separated by commas.
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Run a verification suite.
    Verify {
        /// cover, entropy, theorem or principal.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Count { .. } => "count",
            Command::Tail { .. } => "tail",
            Command::TailTotal { .. } => "tail-total",
            Command::SftTail { .. } => "sft-tail",
            Command::Entropy { .. } => "entropy",
            Command::Invariant { .. } => "invariant",
            Command::Construct { .. } => "construct",
            Command::Verify { .. } => "verify",
        }
    }

    fn scenario(&self) -> Option<&Path> {
        match self {
            Command::Validate(s) => Some(&s.scenario),
            Command::Count { input, .. }
            | Command::Tail { input, .. }
            | Command::TailTotal { input, .. }
            | Command::SftTail { input, .. }
            | Command::Entropy { input, .. }
            | Command::Invariant { input, .. }
            | Command::Construct { input, .. } => Some(&input.scenario),
            Command::Verify { .. } => None,
        }
    }
}

/// Written files plus the meaning of every CSV column.
struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    columns: IndexMap<String, String>,
    summary: IndexMap<String, Value>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            columns: IndexMap::new(),
            summary: IndexMap::new(),
        })
    }

    fn describe(&mut self, cols: &[(&str, &str)]) {
        for (c, d) in cols {
            self.columns.insert(c.to_string(), d.to_string());
        }
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(e.to_string()))?;
        w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        self.text(name, &text)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), format!("{text}\n"))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }
}

const COMMON_COLUMNS: [(&str, &str); 2] = [
    ("scenario", "scenario name, or the file stem when unnamed"),
    ("op", "library operation that produced the value"),
];

fn f(v: f64) -> String {
    format!("{v}")
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let shown: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    run(&cli, &shown)
}

/// Runs a parsed command line and returns the exit code; `argv` is
/// recorded in the manifest.
pub fn run(cli: &Cli, argv: &[String]) -> i32 {
    let budget = match resolve_budget(&cli.budget) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut art = match Artifacts::new(&cli.out) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    art.describe(&COMMON_COLUMNS);
    let mut seed = None;
    let mut digest = None;
    let outcome = (|| -> Result<i32> {
        if let Command::Verify { seed: s, .. } = &cli.command {
            seed = Some(*s);
        }
        let scenario = match cli.command.scenario() {
            Some(p) => {
                let sc = load_scenario(p)?;
                digest = Some(sc.file.digest());
                Some((scenario_label(&sc.file, p), sc))
            }
            None => None,
        };
        dispatch(&cli.command, scenario.as_ref().map(|(l, s)| (l.as_str(), s)), &budget, &mut art)
    })();
    let (code, error) = match outcome {
        Ok(c) => (c, None),
        Err(e) => {
            eprintln!("error: {e}");
            (if e.is_budget() { 3 } else { 2 }, Some(e.to_string()))
        }
    };
    let manifest = json!({
        "command": cli.command.name(),
        "arguments": argv,
        "scenario": cli.command.scenario().map(|p| p.display().to_string()),
        "scenario_sha256": digest,
        "seed": seed,
        "budget": budget,
        "budget_env": BUDGET_ENV,
        "versions": {
            "reltail": env!("CARGO_PKG_VERSION"),
            "scenario_schema": SCHEMA_VERSION,
        },
        "files": art.files,
        "columns": art.columns,
        "summary": art.summary,
        "exit_code": code,
        "error": error,
    });
    if let Err(e) = std::fs::write(
        art.dir.join("manifest.json"),
        format!("{}\n", serde_json::to_string_pretty(&manifest).expect("json values serialize")),
    ) {
        eprintln!("error: cannot write manifest: {e}");
        return 2;
    }
    code
}

fn resolve_budget(flags: &[String]) -> Result<Budget> {
    let mut b = Budget::from_env()?;
    for spec in flags {
        b.apply_overrides(spec)?;
    }
    Ok(b)
}

fn scenario_label(file: &ScenarioFile, path: &Path) -> String {
    file.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into())
    })
}

fn dispatch(
    cmd: &Command,
    scenario: Option<(&str, &Scenario)>,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    if let Command::Verify { suite, seed, trials } = cmd {
        return verify(suite, *seed, *trials, budget, art);
    }
    let (label, sc) = scenario.expect("every other command reads a scenario");
    match cmd {
        Command::Validate(_) => validate(label, sc, art),
        Command::Count { r, q, n, .. } => count(label, sc, r, q, *n, budget, art),
        Command::Tail { r, q, nmax, .. } => tail(label, sc, r, q, *nmax, budget, art),
        Command::TailTotal {
            qfamily,
            rfamily,
            nmax,
            ..
        } => tail_total(label, sc, qfamily, rfamily, *nmax, budget, art),
        Command::SftTail {
            sft,
            rspec,
            qspec,
            nmax,
            ..
        } => sft_tail(label, sc, sft, rspec, qspec, *nmax, budget, art),
        Command::Entropy {
            mu, r, sigma, nmax, ..
        } => entropy(label, sc, mu, r, sigma, *nmax, budget, art),
        Command::Invariant {
            system,
            vertices,
            cesaro,
            lift,
            ..
        } => {
            if *vertices {
                invariant_vertices(label, sc, system.as_deref().expect("required by clap"), budget, art)
            } else if let Some(mu) = cesaro {
                invariant_cesaro(label, sc, mu, art)
            } else if let Some(v) = lift {
                invariant_lift(label, sc, &v[0], &v[1], art)
            } else {
                Err(Error::Domain("choose one of --vertices, --cesaro or --lift".into()))
            }
        }
        Command::Construct {
            separated,
            system,
            p,
            q,
            chain,
            pchain,
            n,
            delta,
            nmax,
            ..
        } => {
            let rds = sc.system(system)?;
            let radii = parse_radii(delta, rds)?;
            if *separated {
                let (Some(p), Some(q)) = (p, q) else {
                    return Err(Error::Domain("--separated needs --p and --q".into()));
                };
                construct_separated(label, sc, system, p, q, *n, &radii, budget, art)
            } else {
                construct_diagonal(label, sc, system, chain, pchain, *n, &radii, *nmax, budget, art)
            }
        }
        Command::Verify { .. } => unreachable!("handled above"),
    }
}

fn validate(label: &str, sc: &Scenario, art: &mut Artifacts) -> Result<i32> {
    art.describe(&[
        ("object", "name in the scenario"),
        ("kind", "driving, system, cover, measure, factor_map or sft"),
        ("size", "points for systems, elements for covers, base points otherwise"),
    ]);
    let mut rows = Vec::new();
    let mut push = |object: &str, kind: &str, size: usize| {
        rows.push(vec![
            label.to_string(),
            object.to_string(),
            kind.to_string(),
            size.to_string(),
            "load_scenario".to_string(),
        ]);
    };
    for (n, d) in &sc.driving {
        push(n, "driving", d.size());
    }
    for (n, s) in &sc.systems {
        push(n, "system", s.rds.total_points());
    }
    for (n, c) in &sc.covers {
        push(n, "cover", c.cover.len());
    }
    for (n, m) in &sc.measures {
        push(n, "measure", m.measure.weights().len());
    }
    for (n, m) in &sc.factor_maps {
        push(n, "factor_map", m.map.source().n_fibers());
    }
    for (n, s) in &sc.sfts {
        push(n, "sft", s.base().size());
    }
    println!("{label}: valid ({} objects)", rows.len());
    art.csv("validate.csv", &["scenario", "object", "kind", "size", "op"], &rows)?;
    art.note("valid", true);
    Ok(0)
}

fn cover_on<'a>(sc: &'a Scenario, name: &str) -> Result<(&'a str, &'a RandomCover)> {
    let c = sc.cover(name)?;
    Ok((c.system.as_str(), &c.cover))
}

fn pair_on<'a>(sc: &'a Scenario, r: &str, q: &str) -> Result<(&'a BundleRds, &'a RandomCover, &'a RandomCover)> {
    let (rs, rc) = cover_on(sc, r)?;
    let (qs, qc) = cover_on(sc, q)?;
    if rs != qs {
        return Err(Error::Incompatible(format!(
            "`{r}` lives on `{rs}`, `{q}` on `{qs}`"
        )));
    }
    Ok((sc.system(rs)?, rc, qc))
}

fn count(
    label: &str,
    sc: &Scenario,
    r: &str,
    q: &str,
    n: usize,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let (rds, rc, qc) = pair_on(sc, r, q)?;
    let prof = count_profile(rc, qc, rds, n, budget)?;
    art.describe(&[
        ("r", "cover R"),
        ("q", "cover Q"),
        ("n", "iteration depth"),
        ("omega", "base point index"),
        ("value", "N(R^(n)|Q^(n))(ω)"),
    ]);
    let rows: Vec<Vec<String>> = prof
        .counts
        .iter()
        .enumerate()
        .map(|(w, c)| {
            vec![
                label.into(),
                r.into(),
                q.into(),
                n.to_string(),
                w.to_string(),
                c.to_string(),
                "relative_count".into(),
            ]
        })
        .collect();
    art.csv("count.csv", &["scenario", "r", "q", "n", "omega", "value", "op"], &rows)?;
    let integral = prof.integrated_log(rds);
    art.note("integrated_log_count", integral);
    println!("N({r}^({n})|{q}^({n})) = {:?}, ∫ log N dP = {integral}", prof.counts);
    Ok(0)
}

fn sequence_rows(label: &str, names: &[&str], est: &EntropyEstimate, op: &str) -> Vec<Vec<String>> {
    (0..est.a.len())
        .map(|i| {
            let mut row = vec![label.to_string()];
            row.extend(names.iter().map(|s| s.to_string()));
            row.extend([
                (i + 1).to_string(),
                f(est.a[i]),
                f(est.ratios[i]),
                f(est.running_inf[i]),
                op.to_string(),
            ]);
            row
        })
        .collect()
}

const SEQUENCE_COLUMNS: [(&str, &str); 4] = [
    ("n", "iteration depth"),
    ("a_n", "n-th term of the subadditive sequence"),
    ("ratio", "a_n / n"),
    ("running_inf", "min over k ≤ n of a_k / k, the certified upper bracket of the limit"),
];

/// Writes the estimate and returns 3 when a budget cut the sequence short.
fn finish_sequence(art: &mut Artifacts, est: &EntropyEstimate, what: &str) -> Result<i32> {
    art.note("depth_reached", est.depth_reached());
    art.note("value", est.value());
    art.note("subadditive", est.subadditive);
    art.json(&format!("{what}.json"), est)?;
    println!(
        "{what}: depth {} of {}, bracket {}",
        est.depth_reached(),
        est.n_max,
        est.value()
    );
    match &est.budget_stop {
        Some(reason) => {
            eprintln!("error: budget exceeded: {reason} (partial artifacts written)");
            art.note("budget_stop", reason.clone());
            Ok(3)
        }
        None => Ok(0),
    }
}

fn tail(
    label: &str,
    sc: &Scenario,
    r: &str,
    q: &str,
    nmax: usize,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let (rds, rc, qc) = pair_on(sc, r, q)?;
    let est = tail_entropy_estimate(rc, qc, rds, nmax, budget)?;
    art.describe(&[("r", "cover R"), ("q", "cover Q")]);
    art.describe(&SEQUENCE_COLUMNS);
    let rows = sequence_rows(label, &[r, q], &est, "tail_entropy_estimate");
    art.csv(
        "tail.csv",
        &["scenario", "r", "q", "n", "a_n", "ratio", "running_inf", "op"],
        &rows,
    )?;
    finish_sequence(art, &est, "tail")
}

fn tail_total(
    label: &str,
    sc: &Scenario,
    qfamily: &[String],
    rfamily: &[String],
    nmax: usize,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let mut system = None;
    let mut pick = |names: &[String]| -> Result<Vec<RandomCover>> {
        names
            .iter()
            .map(|n| {
                let (s, c) = cover_on(sc, n)?;
                match system {
                    None => system = Some(s),
                    Some(t) if t != s => {
                        return Err(Error::Incompatible(format!("`{n}` lives on `{s}`, not `{t}`")))
                    }
                    _ => {}
                }
                Ok(c.clone())
            })
            .collect()
    };
    let qs = pick(qfamily)?;
    let rs = pick(rfamily)?;
    let rds = sc.system(system.expect("families are nonempty"))?;
    let mut rows = Vec::new();
    for (qn, qc) in qfamily.iter().zip(&qs) {
        for (rn, rc) in rfamily.iter().zip(&rs) {
            let est = tail_entropy_estimate(rc, qc, rds, nmax, budget)?;
            if let Some(reason) = &est.budget_stop {
                return Err(Error::Budget {
                    what: format!("{rn}|{qn}: {reason}"),
                    limit: est.depth_reached(),
                    reached: nmax,
                });
            }
            rows.push(vec![
                label.into(),
                qn.clone(),
                rn.clone(),
                nmax.to_string(),
                f(est.value()),
                "tail_entropy_estimate".into(),
            ]);
        }
    }
    let total = tail_entropy_total(&qs, &rs, rds, nmax, budget)?;
    rows.push(vec![
        label.into(),
        "*".into(),
        "*".into(),
        nmax.to_string(),
        f(total),
        "tail_entropy_total".into(),
    ]);
    art.describe(&[
        ("q", "cover Q, `*` for the min-max row"),
        ("r", "cover R, `*` for the min-max row"),
        ("n", "depth of the brackets"),
        ("value", "running-infimum bracket of h(R|Q), or min_Q max_R of them"),
    ]);
    art.csv("tail_total.csv", &["scenario", "q", "r", "n", "value", "op"], &rows)?;
    art.note("tail_entropy_total", total);
    println!("min over Q of max over R at depth {nmax}: {total}");
    Ok(0)
}

fn parse_cylinder(spec: &str) -> Result<CylinderCoverSpec> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "trivial" {
        return Ok(CylinderCoverSpec::trivial());
    }
    let bad = |m: &str| Error::Parse {
        at: format!("cylinder spec `{spec}`"),
        msg: m.to_string(),
    };
    let (comps, depth) = match spec.split_once(':') {
        Some((c, d)) => (c, d.trim().parse::<usize>().map_err(|_| bad("depth is not an integer"))?),
        None => (spec, 1),
    };
    let comps = comps
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| bad("component is not an integer")))
        .collect::<Result<Vec<_>>>()?;
    CylinderCoverSpec::new(comps, depth)
}

#[allow(clippy::too_many_arguments)]
fn sft_tail(
    label: &str,
    sc: &Scenario,
    sft: &str,
    rspec: &str,
    qspec: &str,
    nmax: usize,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let s = sc.sft(sft)?;
    let r = parse_cylinder(rspec)?;
    let q = parse_cylinder(qspec)?;
    let est = sft_tail_sequence(s, &r, &q, nmax, budget)?;
    art.describe(&[("sft", "random subshift"), ("r", "cylinder spec of R"), ("q", "cylinder spec of Q")]);
    art.describe(&SEQUENCE_COLUMNS);
    let rows = sequence_rows(label, &[sft, rspec, qspec], &est, "sft_tail_sequence");
    art.csv(
        "sft_tail.csv",
        &["scenario", "sft", "r", "q", "n", "a_n", "ratio", "running_inf", "op"],
        &rows,
    )?;
    finish_sequence(art, &est, "sft_tail")
}

fn sigma_on(sc: &Scenario, system: &str, rds: &BundleRds, spec: &str) -> Result<SigmaAlgebra> {
    match spec {
        "trivial" => Ok(SigmaAlgebra::trivial(rds)),
        "fibers" => Ok(SigmaAlgebra::fibers(rds)),
        s => {
            if let Some(name) = s.strip_prefix("factor:") {
                let m = sc.factor_map(name)?;
                if m.source != system {
                    return Err(Error::Incompatible(format!(
                        "factor map `{name}` starts at `{}`, not `{system}`",
                        m.source
                    )));
                }
                return Ok(SigmaAlgebra::of_factor(&m.map));
            }
            let (cs, c) = cover_on(sc, s)?;
            if cs != system {
                return Err(Error::Incompatible(format!("`{s}` lives on `{cs}`, not `{system}`")));
            }
            Ok(SigmaAlgebra::generated_by(RandomPartition::new(c.clone())?))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn entropy(
    label: &str,
    sc: &Scenario,
    mu: &str,
    r: &str,
    sigma: &str,
    nmax: Option<usize>,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let m = sc.measure(mu)?;
    let rds = sc.system(&m.system)?;
    let (rs, rc) = cover_on(sc, r)?;
    if rs != m.system {
        return Err(Error::Incompatible(format!("`{r}` lives on `{rs}`, `{mu}` on `{}`", m.system)));
    }
    let rp = RandomPartition::new(rc.clone())?;
    let s = sigma_on(sc, &m.system, rds, sigma)?;
    let Some(nmax) = nmax else {
        // a single conditional entropy needs no invariance
        let h = conditional_entropy(&m.measure, &rp, &s)?;
        art.describe(&[
            ("mu", "measure"),
            ("r", "partition R"),
            ("sigma", "conditioning σ-algebra"),
            ("value", "H_μ(R|S) in nats"),
        ]);
        let row = vec![label.into(), mu.into(), r.into(), sigma.into(), f(h), "conditional_entropy".into()];
        art.csv("entropy.csv", &["scenario", "mu", "r", "sigma", "value", "op"], &[row])?;
        art.note("conditional_entropy", h);
        println!("H_{mu}({r}|{sigma}) = {h}");
        return Ok(0);
    };
    let est = relative_entropy_sequence(&m.measure, &rp, &s, rds, nmax, budget)?;
    art.describe(&[
        ("mu", "measure"),
        ("r", "partition R"),
        ("sigma", "conditioning σ-algebra"),
        ("n", "iteration depth"),
        ("a_n", "H_μ(R^(n)|S); n = 1 is the conditional entropy H_μ(R|S)"),
        ("ratio", "a_n / n"),
        ("running_inf", "min over k ≤ n of a_k / k"),
    ]);
    let rows = sequence_rows(label, &[mu, r, sigma], &est, "relative_entropy_sequence");
    art.csv(
        "entropy.csv",
        &["scenario", "mu", "r", "sigma", "n", "a_n", "ratio", "running_inf", "op"],
        &rows,
    )?;
    art.note("conditional_entropy", est.a.first().copied());
    finish_sequence(art, &est, "entropy")
}

const MEASURE_COLUMNS: [(&str, &str); 4] = [
    ("measure", "measure name"),
    ("omega", "base point index"),
    ("point", "point id"),
    ("weight", "exact mass μ({(ω, x)}) as p/q"),
];

fn measure_rows(label: &str, name: &str, rds: &BundleRds, mu: &FiberedMeasure, op: &str) -> Vec<Vec<String>> {
    mu.to_names(rds)
        .into_iter()
        .enumerate()
        .flat_map(|(w, pts)| {
            pts.into_iter().map(move |(p, v)| {
                vec![label.to_string(), name.to_string(), w.to_string(), p, v, op.to_string()]
            })
        })
        .collect()
}

fn write_measures(
    art: &mut Artifacts,
    file: &str,
    label: &str,
    rds: &BundleRds,
    named: &[(String, &FiberedMeasure, &str)],
) -> Result<()> {
    art.describe(&MEASURE_COLUMNS);
    let rows: Vec<Vec<String>> = named
        .iter()
        .flat_map(|(n, m, op)| measure_rows(label, n, rds, m, op))
        .collect();
    art.csv(file, &["scenario", "measure", "omega", "point", "weight", "op"], &rows)
}

/// A loadable scenario holding `rds` and the given measures.
fn measure_scenario(
    art: &mut Artifacts,
    file: &str,
    system: &str,
    rds: &BundleRds,
    named: &[(String, &FiberedMeasure)],
) -> Result<()> {
    let mut sf = ScenarioFile::new(Some(format!("{system} measures")));
    sf.add_system(system, rds);
    for (n, m) in named {
        sf.add_measure(n, system, rds, m);
    }
    art.text(file, &sf.to_json())
}

fn invariant_vertices(label: &str, sc: &Scenario, system: &str, budget: &Budget, art: &mut Artifacts) -> Result<i32> {
    let rds = sc.system(system)?;
    let poly = vertex_enumeration(rds, budget)?;
    let names: Vec<String> = (0..poly.vertices().len()).map(|i| format!("vertex{i}")).collect();
    let named: Vec<(String, &FiberedMeasure, &str)> = names
        .iter()
        .zip(poly.vertices())
        .map(|(n, v)| (n.clone(), v, "vertex_enumeration"))
        .collect();
    write_measures(art, "vertices.csv", label, rds, &named)?;
    let plain: Vec<(String, &FiberedMeasure)> = named.iter().map(|(n, m, _)| (n.clone(), *m)).collect();
    measure_scenario(art, "vertices.scenario.json", system, rds, &plain)?;
    art.note("vertices", poly.vertices().len());
    art.note("dimension", poly.dimension);
    println!("{system}: {} vertices, dimension {}", poly.vertices().len(), poly.dimension);
    Ok(0)
}

fn invariant_cesaro(label: &str, sc: &Scenario, mu: &str, art: &mut Artifacts) -> Result<i32> {
    let m = sc.measure(mu)?;
    let rds = sc.system(&m.system)?;
    let before = invariance_defect(&m.measure, rds)?;
    let c = cesaro_limit(&m.measure, rds)?;
    let after = invariance_defect(&c, rds)?;
    let name = format!("cesaro({mu})");
    write_measures(art, "cesaro.csv", label, rds, &[(name.clone(), &c, "cesaro_limit")])?;
    measure_scenario(art, "cesaro.scenario.json", &m.system, rds, &[(name, &c)])?;
    art.note("input_defect", format_rational(&before));
    art.note("output_defect", format_rational(&after));
    println!(
        "invariance defect {} → {}",
        format_rational(&before),
        format_rational(&after)
    );
    Ok(0)
}

fn invariant_lift(label: &str, sc: &Scenario, map: &str, mu: &str, art: &mut Artifacts) -> Result<i32> {
    let fm = sc.factor_map(map)?;
    let m = sc.measure(mu)?;
    if m.system != fm.target {
        return Err(Error::Incompatible(format!(
            "`{mu}` lives on `{}`, `{map}` maps onto `{}`",
            m.system, fm.target
        )));
    }
    let lift = lift_invariant(&fm.map, &m.measure)?;
    let rds = fm.map.source();
    let name = format!("lift({mu})");
    write_measures(art, "lift.csv", label, rds, &[(name.clone(), &lift.measure, "lift_invariant")])?;
    measure_scenario(art, "lift.scenario.json", &fm.source, rds, &[(name, &lift.measure)])?;
    art.note("defect", format_rational(&lift.defect));
    art.note("projects_exactly", lift.projects_exactly);
    art.note("certified", lift.certified());
    println!(
        "lift of {mu} along {map}: defect {}, projects exactly {}",
        format_rational(&lift.defect),
        lift.projects_exactly
    );
    Ok(0)
}

fn parse_radii(spec: &str, rds: &BundleRds) -> Result<Vec<Rational>> {
    let vals = spec
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<Vec<_>>>()?;
    match vals.len() {
        1 => Ok(vec![vals[0].clone(); rds.n_fibers()]),
        k if k == rds.n_fibers() => Ok(vals),
        k => Err(Error::Incompatible(format!(
            "{k} radii for {} base points",
            rds.n_fibers()
        ))),
    }
}

fn system_cover<'a>(sc: &'a Scenario, system: &str, name: &str) -> Result<&'a RandomCover> {
    let (s, c) = cover_on(sc, name)?;
    if s != system {
        return Err(Error::Incompatible(format!("`{name}` lives on `{s}`, not `{system}`")));
    }
    Ok(c)
}

#[allow(clippy::too_many_arguments)]
fn construct_separated(
    label: &str,
    sc: &Scenario,
    system: &str,
    p: &str,
    q: &str,
    n: usize,
    radii: &[Rational],
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let rds = sc.system(system)?;
    let pc = system_cover(sc, system, p)?;
    let qc = system_cover(sc, system, q)?;
    let se = separated_empirical(rds, pc, qc, n, radii, budget)?;
    art.describe(&[
        ("omega", "base point index"),
        ("chosen", "element of Q^(n)(ω) needing the most elements of P^(n)(ω)"),
        ("cover_count", "N(Q, P^(n))(ω) for the chosen element"),
        ("anchor", "first coordinate of the empirical measure"),
        ("separated", "maximal (n, δ)-separated subset of the chosen element"),
        ("lebesgue_gate", "δ is below the Lebesgue number of P along the orbit"),
        ("card_claim", "card of the separated set ≥ cover_count; empty when the gate is closed"),
        ("maximal", "every point of the element is within Bowen distance < 1 of the set"),
    ]);
    let rows: Vec<Vec<String>> = se
        .fibers
        .iter()
        .map(|fc| {
            vec![
                label.into(),
                fc.omega.to_string(),
                fc.chosen.join(" "),
                fc.cover_count.to_string(),
                fc.anchor.clone(),
                fc.separated.join(" "),
                fc.lebesgue_gate.to_string(),
                fc.card_claim.map_or(String::new(), |b| b.to_string()),
                fc.maximal.to_string(),
                "separated_empirical".into(),
            ]
        })
        .collect();
    art.csv(
        "separated.csv",
        &[
            "scenario", "omega", "chosen", "cover_count", "anchor", "separated", "lebesgue_gate",
            "card_claim", "maximal", "op",
        ],
        &rows,
    )?;
    let pr = se.pair.system();
    write_measures(
        art,
        "separated_measures.csv",
        label,
        pr,
        &[
            ("sigma".into(), &se.sigma, "separated_empirical"),
            ("mu_n".into(), &se.mu_n, "separated_empirical"),
            ("mu_q".into(), &se.mu_q, "cesaro_limit"),
        ],
    )?;
    art.note("mu_n_defect", format_rational(&se.mu_n_defect));
    art.note("mu_n_supported", se.mu_n_supported);
    art.note("mu_q_supported", se.mu_q_supported);
    art.note("card_claims_hold", se.card_claims_hold());
    println!(
        "separated sets at n = {n}: card claims hold {}, μ^(n) supported {}",
        se.card_claims_hold(),
        se.mu_n_supported
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn construct_diagonal(
    label: &str,
    sc: &Scenario,
    system: &str,
    chain: &[String],
    pchain: &[String],
    n: usize,
    radii: &[Rational],
    nmax: usize,
    budget: &Budget,
    art: &mut Artifacts,
) -> Result<i32> {
    let rds = sc.system(system)?;
    let qs = chain
        .iter()
        .map(|c| system_cover(sc, system, c).cloned())
        .collect::<Result<Vec<_>>>()?;
    let ps = pchain
        .iter()
        .map(|c| system_cover(sc, system, c).cloned())
        .collect::<Result<Vec<_>>>()?;
    let d = diagonal_measure(rds, &qs, &ps, n, radii, nmax, budget)?;
    let pr = d.steps.last().expect("nonempty chain").pair.system();
    write_measures(art, "diagonal.csv", label, pr, &[("m".into(), &d.measure, "diagonal_measure")])?;
    art.describe(&SEQUENCE_COLUMNS);
    let rows = sequence_rows(label, &[], &d.relative_entropy, "transformation_relative_entropy");
    art.csv(
        "diagonal_entropy.csv",
        &["scenario", "n", "a_n", "ratio", "running_inf", "op"],
        &rows,
    )?;
    art.note("defect", format_rational(&d.defect));
    art.note("on_diagonal", d.on_diagonal);
    art.note("diagonal_required", d.diagonal_required);
    art.note("certified", d.certified());
    println!(
        "diagonal measure: defect {}, on diagonal {}, b_n all zero {}",
        format_rational(&d.defect),
        d.on_diagonal,
        d.relative_entropy.a.iter().all(|&b| b == 0.0)
    );
    Ok(0)
}

fn verify(suite: &str, seed: u64, trials: usize, budget: &Budget, art: &mut Artifacts) -> Result<i32> {
    let report = run_suite(suite, seed, trials, budget)?;
    art.text("report.json", &report.to_json())?;
    art.text("report.txt", &report.to_string())?;
    art.note("passed", report.passed());
    art.note("failures", report.failures.len());
    art.note("skips", report.skips.len());
    art.note("max_violation", report.max_violation());
    println!("{report}");
    Ok(if report.passed() { 0 } else { 1 })
}
