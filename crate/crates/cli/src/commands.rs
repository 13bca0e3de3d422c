use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fsing_core::absolute::{absolute_report, is_f_pure, sigma_absolute, tau_chain_absolute};
use fsing_core::relative::{
    absolutize_and_compare, chain, hsl_uniform_bound, min_t_power, relative_flags, restrict_fiber, restrict_map,
    verify_restriction_theorem, ChainMode, ChainReport, FiberPoint, Stabilization, StabilizationKind,
};
use fsing_core::{Field, FieldElement, Ideal, PolyRing};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{ideal_json, Report, Table};
use crate::spec::{BuildOptions, Problem, SeedChoice, SpecFile};

#[derive(Parser, Debug)]
#[command(name = "fsing", version, about = "Frobenius singularity invariants of families over F_q[t]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Family spec (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_max: Option<u32>,
    /// Depth of the base root tower; defaults to e * n_max.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Base point: an integer or a polynomial in the field generator `g`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// `jacobian` or `g1;g2;...`.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Power of the Jacobian seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub power: u32,
    #[arg(long, global = true, value_enum, default_value_t = ChainKind::Sigma)]
    pub chain: ChainKind,
    /// Add wall-clock timing to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChainKind {
    Sigma,
    Tau,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Non-F-pure ideal chain.
    Sigma,
    /// Test ideal chain.
    Tau,
    /// HSL numbers of the fibers against the restriction index.
    Hsl,
    /// Fedder's criterion, per fiber when the family has a base.
    Fedder,
    /// Invariants of one fiber (needs --lambda).
    Fiber,
    /// Every fiber against the restricted chain.
    Scan,
    /// Global or generic stabilization of the chain.
    Stabilize,
    /// F-purity, F-regularity, F-injectivity and F-rationality flags.
    Flags,
    /// Compare the relative chain with the absolute map on the total space.
    CompareAbsolute {
        #[arg(long)]
        n: Option<u32>,
    },
    /// Least power of t in each chain member.
    MinTPower {
        #[arg(long)]
        n: Option<u32>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sigma => "sigma",
            Command::Tau => "tau",
            Command::Hsl => "hsl",
            Command::Fedder => "fedder",
            Command::Fiber => "fiber",
            Command::Scan => "scan",
            Command::Stabilize => "stabilize",
            Command::Flags => "flags",
            Command::CompareAbsolute { .. } => "compare-absolute",
            Command::MinTPower { .. } => "min-t-power",
        }
    }
}

fn needs_base(spec: &SpecFile, command: &str) -> Result<(), CliError> {
    if spec.has_base() {
        Ok(())
    } else {
        Err(fsing_core::Error::precondition(format!("`{command}` needs a family with base t")).into())
    }
}

/// Field element from an integer or a polynomial in `g`.
pub fn parse_lambda(field: &Field, src: &str) -> Result<FieldElement, CliError> {
    if let Ok(n) = src.trim().parse::<i64>() {
        return Ok(field.from_int(n));
    }
    let prime = Field::prime(field.characteristic())?;
    let ring = PolyRing::new(prime, vec!["g".into()], None)?;
    let f = ring.parse(src)?;
    let mut coords = vec![0u64; f.degree_in(0) as usize + 1];
    for (m, c) in f.terms() {
        coords[m.exponents()[0] as usize] = c.encoding();
    }
    Ok(field.from_coordinates(&coords))
}

fn lambda_text(field: &Field, a: FieldElement) -> String {
    field.display(a).to_string()
}

fn chain_mode(kind: ChainKind) -> ChainMode {
    match kind {
        ChainKind::Sigma => ChainMode::Sigma,
        ChainKind::Tau => ChainMode::Tau,
    }
}

fn stabilization_json(problem: &Problem, st: &Stabilization) -> Value {
    let kind = match st.kind {
        StabilizationKind::Global => "global",
        StabilizationKind::Generic => "generic",
        StabilizationKind::NoneWithinCap => "none",
    };
    json!({
        "kind": kind,
        "index": st.index,
        "witness": st.witness.as_ref().map(|w| problem.ring.print(w)),
    })
}

fn stabilization_text(st: &Stabilization, problem: &Problem) -> String {
    match (st.kind, st.index) {
        (StabilizationKind::Global, Some(n)) => format!("global from n = {n}"),
        (StabilizationKind::Generic, Some(n)) => format!(
            "generic from n = {n} off {}",
            st.witness.as_ref().map(|w| problem.ring.print(w)).unwrap_or_default()
        ),
        _ => "none within n_max".into(),
    }
}

fn levels_json(levels: &[(u32, Ideal)], rel: &Ideal) -> Value {
    Value::Array(levels.iter().map(|(_, a)| ideal_json(a, Some(rel))).collect())
}

fn levels_table(levels: &[(u32, Ideal)], rel: &Ideal) -> Table {
    let mut t = Table::new(&["n", "generators"]);
    for (n, a) in levels {
        t.row(vec![n.to_string(), a.display_generators(Some(rel)).join(", ")]);
    }
    t
}

fn chain_report(problem: &Problem, mode: ChainMode) -> Result<ChainReport, CliError> {
    let family = problem.seeded_family(mode)?;
    Ok(chain(&family, problem.n_max)?)
}

/// Relative chain or, without a base, the absolute chain as levels `1..`.
fn chain_output(report: &mut Report, problem: &Problem, spec: &SpecFile, mode: ChainMode) -> Result<(), CliError> {
    let rel = &problem.relations;
    if spec.has_base() {
        let rep = chain_report(problem, mode)?;
        report.set("levels", levels_json(&rep.levels, rel));
        report.set("stabilization", stabilization_json(problem, &rep.stabilization));
        report.table(levels_table(&rep.levels, rel));
        report.line("stabilization", stabilization_text(&rep.stabilization, problem));
        return Ok(());
    }
    let map = problem.absolute_map()?;
    let (levels, stable_at): (Vec<Ideal>, usize) = if mode.is_tau() {
        let c = tau_chain_absolute(&map, &problem.absolute_seed()?)?;
        let n = c.len() - 1;
        (c, n)
    } else {
        let c = sigma_absolute(&map)?;
        (c.chain[1..].to_vec(), c.hsl)
    };
    let levels: Vec<(u32, Ideal)> = levels.into_iter().enumerate().map(|(i, a)| (i as u32 + 1, a)).collect();
    report.set("levels", levels_json(&levels, rel));
    report.set("stable_index", json!(stable_at));
    report.table(levels_table(&levels, rel));
    report.line("stable from", stable_at.to_string());
    Ok(())
}

fn fedder(report: &mut Report, problem: &Problem, spec: &SpecFile) -> Result<(), CliError> {
    if !spec.has_base() {
        let pure = is_f_pure(&problem.relations, problem.e, None)?;
        report.set("f_pure", json!(pure));
        report.line("f_pure", pure.to_string());
        return Ok(());
    }
    let field = problem.ring.field().clone();
    let mut fibers = Vec::new();
    let mut t = Table::new(&["lambda", "f_pure"]);
    for lambda in field.elements() {
        let rel = restrict_fiber(&problem.relations, FiberPoint::Value(lambda))?;
        let pure = is_f_pure(&rel, problem.e, None)?;
        fibers.push(json!({ "lambda": lambda_text(&field, lambda), "f_pure": pure }));
        t.row(vec![lambda_text(&field, lambda), pure.to_string()]);
    }
    report.set("fibers", Value::Array(fibers));
    report.table(t);
    Ok(())
}

fn fiber(report: &mut Report, problem: &Problem, lambda: FieldElement) -> Result<(), CliError> {
    let field = problem.ring.field().clone();
    let family = problem.family(ChainMode::Sigma)?;
    let map = restrict_map(family.map(), lambda)?;
    let rel = map.relations().clone();
    let seed = match &problem.seed {
        Some(s) => Some(s.clone()),
        None => problem.seeded_family(ChainMode::Tau)?.seed().cloned(),
    };
    let seed = seed
        .map(|s| restrict_fiber(&s, FiberPoint::Value(lambda)).and_then(|s| s.sum(&rel)))
        .transpose()?;
    let live_seed = seed.filter(|s| !rel.contains(s));
    let abs = absolute_report(&map, live_seed.as_ref())?;
    let tau = abs.tau.clone().unwrap_or_else(|| rel.clone());
    report.set("lambda", json!(lambda_text(&field, lambda)));
    report.set("sigma", ideal_json(&abs.sigma, Some(&rel)));
    report.set("hsl", json!(abs.hsl));
    report.set("tau", ideal_json(&tau, Some(&rel)));
    report.set(
        "flags",
        json!({
            "f_pure": abs.flags.f_pure,
            "strongly_f_regular": tau.is_unit(),
            "f_injective": abs.flags.f_injective,
            "f_rational": abs.flags.f_rational,
        }),
    );
    report.line("lambda", lambda_text(&field, lambda));
    report.line("sigma", abs.sigma.display_generators(Some(&rel)).join(", "));
    report.line("hsl", abs.hsl.to_string());
    report.line("tau", tau.display_generators(Some(&rel)).join(", "));
    report.line("f_pure", abs.flags.f_pure.to_string());
    Ok(())
}

fn scan(report: &mut Report, problem: &Problem, mode: ChainMode) -> Result<(), CliError> {
    let family = problem.seeded_family(mode)?;
    let v = verify_restriction_theorem(&family, problem.n_max)?;
    let field = problem.ring.field().clone();
    let mut t = Table::new(&["lambda", "fiber ideal", "hsl", "n_lambda"]);
    let mut fibers = Vec::new();
    for f in &v.fibers {
        let rel = restrict_fiber(&problem.relations, FiberPoint::Value(f.lambda))?;
        fibers.push(json!({
            "lambda": lambda_text(&field, f.lambda),
            "fiber_ideal": ideal_json(&f.fiber_ideal, Some(&rel)),
            "hsl": f.hsl,
            "n_lambda": f.n_lambda,
        }));
        t.row(vec![
            lambda_text(&field, f.lambda),
            f.fiber_ideal.display_generators(Some(&rel)).join(", "),
            f.hsl.to_string(),
            f.n_lambda.map_or("-".into(), |n| n.to_string()),
        ]);
    }
    report.set("fibers", Value::Array(fibers));
    report.set("restriction_n", json!(v.restriction_n));
    report.table(t);
    report.line("restriction N", v.restriction_n.map_or("not reached".into(), |n| n.to_string()));
    Ok(())
}

fn flags(report: &mut Report, problem: &Problem, spec: &SpecFile) -> Result<(), CliError> {
    let (prefix, pure, sfr, inj, rat) = if spec.has_base() {
        let f = relative_flags(&problem.family(ChainMode::Sigma)?, problem.n_max)?;
        (
            "relatively_",
            f.relatively_sharply_f_pure,
            f.relatively_strongly_f_regular,
            f.relatively_f_injective,
            f.relatively_f_rational,
        )
    } else {
        let map = problem.absolute_map()?;
        let seed = problem.absolute_seed().ok();
        let f = absolute_report(&map, seed.as_ref())?.flags;
        ("", f.f_pure, f.strongly_f_regular, f.f_injective, f.f_rational)
    };
    let pure_key = if spec.has_base() { "relatively_sharply_f_pure" } else { "f_pure" };
    let entries = [
        (pure_key.to_string(), Some(pure)),
        (format!("{prefix}strongly_f_regular"), sfr),
        (format!("{prefix}f_injective"), inj),
        (format!("{prefix}f_rational"), rat),
    ];
    let mut t = Table::new(&["flag", "value"]);
    for (k, v) in entries {
        report.set(&k, json!(v));
        t.row(vec![k, v.map_or("unknown".into(), |b| b.to_string())]);
    }
    report.table(t);
    Ok(())
}

fn levels_to_check(problem: &Problem, n: Option<u32>) -> Vec<u32> {
    match n {
        Some(n) => vec![n],
        None => (1..=problem.n_max).collect(),
    }
}

fn min_t(report: &mut Report, problem: &Problem, mode: ChainMode, n: Option<u32>) -> Result<(), CliError> {
    let rep = chain_report(problem, mode)?;
    let mut rows = Vec::new();
    let mut t = Table::new(&["n", "units", "t-power"]);
    for level in levels_to_check(problem, n) {
        let a = &rep.levels[level as usize - 1].1;
        let d = min_t_power(a, level)?;
        let power = d.map(|d| format!("t^({}/{})", d.numerator, d.denominator));
        rows.push(json!({ "n": level, "units": d.map(|d| d.units), "t_power": power }));
        t.row(vec![
            level.to_string(),
            d.map_or("none".into(), |d| d.units.to_string()),
            power.unwrap_or_else(|| "none".into()),
        ]);
    }
    report.set("levels", Value::Array(rows));
    report.table(t);
    Ok(())
}

fn compare(report: &mut Report, problem: &Problem, n: Option<u32>) -> Result<(), CliError> {
    let family = problem.family(ChainMode::Sigma)?;
    let rel = &problem.relations;
    let mut rows = Vec::new();
    let mut t = Table::new(&["n", "equal", "theta", "absolute image"]);
    for level in levels_to_check(problem, n) {
        let c = absolutize_and_compare(&family, level)?;
        rows.push(json!({
            "n": level,
            "equal": c.equal,
            "theta_contains": c.theta_contains,
            "absolute_image": ideal_json(&c.absolute_image, Some(rel)),
            "relative_image": ideal_json(&c.relative_image, Some(rel)),
        }));
        t.row(vec![
            level.to_string(),
            c.equal.to_string(),
            c.theta_contains.to_string(),
            c.absolute_image.display_generators(Some(rel)).join(", "),
        ]);
    }
    report.set("levels", Value::Array(rows));
    report.table(t);
    Ok(())
}

/// Run one command. I/O and spec errors come back as [`CliError`].
pub fn run(command: &Command, opts: &Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let path = opts.spec.as_ref().ok_or_else(|| CliError::Usage("--spec PATH is required".into()))?;
    let spec = SpecFile::load(path)?;
    if let Command::MinTPower { n: Some(0) } | Command::CompareAbsolute { n: Some(0) } = command {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let n_max = match command {
        Command::MinTPower { n: Some(n) } | Command::CompareAbsolute { n: Some(n) } => {
            Some(opts.n_max.map_or(*n, |m| m.max(*n)))
        }
        _ => opts.n_max,
    };
    let build = BuildOptions {
        n_max,
        depth: opts.depth,
        seed: opts.seed.as_deref().map(SeedChoice::parse),
        power: opts.power,
    };
    let problem = spec.build(&build)?;
    let mut report = Report::new(command.name(), &spec);
    report.option("n_max", json!(problem.n_max));
    report.option("depth", json!(problem.ring.depth()));
    let mode = chain_mode(opts.chain);
    match command {
        Command::Sigma => chain_output(&mut report, &problem, &spec, ChainMode::Sigma)?,
        Command::Tau => chain_output(&mut report, &problem, &spec, ChainMode::Tau)?,
        Command::Stabilize => {
            needs_base(&spec, "stabilize")?;
            report.option("chain", json!(format!("{:?}", opts.chain).to_lowercase()));
            let rep = chain_report(&problem, mode)?;
            report.set("stabilization", stabilization_json(&problem, &rep.stabilization));
            report.line("stabilization", stabilization_text(&rep.stabilization, &problem));
        }
        Command::Hsl => {
            needs_base(&spec, "hsl")?;
            let b = hsl_uniform_bound(&problem.family(ChainMode::Sigma)?, problem.n_max)?;
            let field = problem.ring.field().clone();
            let mut t = Table::new(&["lambda", "hsl"]);
            let per: Vec<Value> = b
                .per_fiber
                .iter()
                .map(|&(l, h)| {
                    t.row(vec![lambda_text(&field, l), h.to_string()]);
                    json!({ "lambda": lambda_text(&field, l), "hsl": h })
                })
                .collect();
            report.set("per_fiber", Value::Array(per));
            report.set("hsl", json!(b.hsl));
            report.set("restriction_n", json!(b.restriction_n));
            report.set("within_bound", json!(b.within_bound));
            report.table(t);
            report.line("max hsl", b.hsl.to_string());
            report.line("restriction N", b.restriction_n.map_or("not reached".into(), |n| n.to_string()));
            report.line("within bound", b.within_bound.to_string());
        }
        Command::Fedder => fedder(&mut report, &problem, &spec)?,
        Command::Fiber => {
            needs_base(&spec, "fiber")?;
            let src = opts.lambda.as_deref().ok_or_else(|| CliError::Usage("fiber needs --lambda".into()))?;
            let lambda = parse_lambda(problem.ring.field(), src)?;
            fiber(&mut report, &problem, lambda)?;
        }
        Command::Scan => {
            needs_base(&spec, "scan")?;
            report.option("chain", json!(format!("{:?}", opts.chain).to_lowercase()));
            scan(&mut report, &problem, mode)?;
        }
        Command::Flags => flags(&mut report, &problem, &spec)?,
        Command::CompareAbsolute { n } => {
            needs_base(&spec, "compare-absolute")?;
            compare(&mut report, &problem, *n)?;
        }
        Command::MinTPower { n } => {
            needs_base(&spec, "min-t-power")?;
            report.option("chain", json!(format!("{:?}", opts.chain).to_lowercase()));
            min_t(&mut report, &problem, mode, *n)?;
        }
    }
    if opts.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
    }
    Ok(report)
}
