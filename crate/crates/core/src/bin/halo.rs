#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use halo::cli::{magnitude_json, parse_list, parse_range, parse_rule, tag_exactness, SlopeSpec};
use halo::flat::{
    assemble_exotic_ray, build_leaf_approx, classify_cesag, compare_ray_tails, crofton_estimate, growth_series,
    leaf_schedule, schedule_csv, sublinear_ray, Foliation, Goodness, Separation, SublinearFn, Verdict,
};
use halo::io::{chain_from_radii, circle_chain_svg, cutting_sequence_svg};
use halo::numeric::{is_in_se_d, se_density_truncate, well_approximated, QuadraticNumber};
use halo::roof::{run_roof, BendingSchedule, BetaMode, RoofState, RoofVerdict, Selector};
use halo::words::{
    cutting_sequence, inadmissible_word, is_admissible, is_block_word_admissible, rational_word_any, theta_prefix,
    BlockWord, Word,
};
use halo::{Error, Result};

#[derive(Parser)]
#[command(name = "halo", version, about = "Cutting sequences, exotic rays and roof recursions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; each command has its own default.
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance quoted in the float exactness tags.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Write the artifact to this directory instead of stdout.
    #[arg(long, global = true, env = "HALO_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct Slope {
    /// `p/q`, `sqrt2`, `golden`, `(a+b√D)/c`, `cf:1,2,2`, or a rule name.
    #[arg(long)]
    slope: Option<String>,
    /// `paper`, `desk`, `exp:P` or `const:C`.
    #[arg(long)]
    rule: Option<String>,
}

impl Slope {
    fn spec(&self) -> Result<SlopeSpec> {
        match (&self.slope, &self.rule) {
            (Some(s), _) => s.parse(),
            (_, Some(r)) => rule_spec(r),
            _ => unreachable!("clap enforces one slope"),
        }
    }

    fn text(&self) -> String {
        self.slope.clone().or_else(|| self.rule.clone()).unwrap_or_default()
    }

    fn exact(&self) -> Result<QuadraticNumber> {
        self.spec()?.quadratic()
    }
}

fn rule_spec(s: &str) -> Result<SlopeSpec> {
    parse_rule(s)
        .unwrap_or_else(|| Err(Error::Parse { line: None, msg: format!("unknown rule {s:?}") }))
        .map(SlopeSpec::Rule)
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction digits, convergents, well-approximation and SE_d checks.
    Cf {
        #[command(flatten)]
        slope: Slope,
        /// Convergents to list.
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Constants C for the well-approximation test.
        #[arg(long = "check-C", value_name = "LIST")]
        check_c: Option<String>,
        /// Selection sizes d for the SE_d test.
        #[arg(long = "se-d", value_name = "LIST")]
        se_d: Option<String>,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        /// Density truncation depth.
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// Rational words, θ-prefixes, or raw cutting sequences.
    Word {
        #[command(flatten)]
        slope: Slope,
        #[arg(long, default_value_t = 1)]
        l1: u64,
        /// Convergent index for the θ-prefix of an irrational slope.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Start height; switches to the raw cutting sequence.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Whether a word occurs in some leaf of the slope.
    Admissible {
        #[command(flatten)]
        slope: Slope,
        #[arg(long, conflicts_with = "word")]
        blocks: Option<String>,
        #[arg(long, required_unless_present = "blocks")]
        word: Option<String>,
    },
    /// The flipped-block word for convergent index k.
    Inadmissible {
        #[command(flatten)]
        slope: Slope,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Assemble an exotic ray and optionally compare its tail with others.
    ExoticRay {
        #[command(flatten)]
        slope: Slope,
        /// Use indices 1..=N.
        #[arg(long, default_value_t = 20, conflicts_with = "indices")]
        segments: usize,
        #[arg(long)]
        indices: Option<String>,
        #[arg(long, default_value = "1")]
        kappa: String,
        #[arg(long, default_value_t = 4000)]
        word_cap: usize,
        /// Index lists separated by `;` to compare against.
        #[arg(long)]
        compare: Option<String>,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        /// Include every segment with exact endpoints.
        #[arg(long)]
        full: bool,
    },
    /// Transverse-measure growth: Crofton averages, sublinear rays, exotic rays.
    Growth {
        #[command(flatten)]
        slope: Slope,
        #[arg(long, value_enum, default_value_t = GrowthMode::Crofton)]
        mode: GrowthMode,
        #[arg(long, default_value = "1")]
        kappa: String,
        #[arg(long, default_value_t = 10_000)]
        rays: usize,
        #[arg(long, default_value_t = 100)]
        length: u32,
        /// `sqrt`, `log1p`, `power:P`.
        #[arg(long, default_value = "sqrt")]
        f: String,
        #[arg(long, default_value_t = 1e5)]
        t_max: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        segments: usize,
    },
    /// Leaf approximations, with optional CESAG classification.
    LeafApprox {
        #[command(flatten)]
        slope: Slope,
        /// Indices: `2,4,6` or `2..40:2`.
        #[arg(long, default_value = "1..8")]
        ks: String,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        classify: bool,
        /// Separation `exp:C`, `power:P` or `one`.
        #[arg(long, default_value = "exp:0.5")]
        sep: String,
        /// Goodness `alpha-bound` or `exp:c`.
        #[arg(long, default_value = "alpha-bound")]
        good: String,
    },
    /// Run the bent support-plane radius recursion.
    Roof {
        /// CSV schedule `n,d,alpha,epsilon`.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Digit rule for a schedule built from leaf approximations.
        #[arg(long, conflicts_with = "schedule")]
        rule: Option<String>,
        #[arg(long, default_value = "2..2198:2")]
        ks: String,
        /// Exponent c in the separation e^{cd}.
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, conflicts_with_all = ["schedule", "rule"])]
        constant_alpha: Option<f64>,
        #[arg(long, default_value = "equal")]
        beta_mode: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Offsets probed per step; 0 walks the schedule in order.
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        /// Also write the schedule CSV here.
        #[arg(long)]
        schedule_out: Option<PathBuf>,
        #[arg(long)]
        full: bool,
    },
    /// Static SVG figures.
    Render {
        #[command(subcommand)]
        figure: Figure,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GrowthMode {
    Crofton,
    Sublinear,
    Exotic,
}

#[derive(Subcommand)]
enum Figure {
    /// A leaf folded into the unit square.
    Cutting {
        #[command(flatten)]
        slope: Slope,
        #[arg(long, default_value_t = 0.1)]
        start: f64,
        #[arg(long, default_value_t = 30)]
        count: usize,
    },
    /// Tangent circles with the given radii, or the radii of a constant-α roof run.
    Chain {
        #[arg(long)]
        radii: Option<String>,
        #[arg(long, conflicts_with = "radii", default_value_t = 0.05)]
        constant_alpha: f64,
        #[arg(long, default_value_t = 40)]
        steps: usize,
    },
}

enum Artifact {
    Json(Value),
    Text(String),
}

struct Outcome {
    artifact: Artifact,
    format: Format,
    inconclusive: Option<String>,
}

impl Outcome {
    fn json(v: Value) -> Self {
        Outcome { artifact: Artifact::Json(v), format: Format::Json, inconclusive: None }
    }

    fn text(s: String, format: Format) -> Self {
        Outcome { artifact: Artifact::Text(s), format, inconclusive: None }
    }

    fn inconclusive_if(mut self, cond: bool, why: impl Into<String>) -> Self {
        if cond {
            self.inconclusive = Some(why.into());
        }
        self
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn only(format: Format, allowed: &[Format], cmd: &str) -> Result<Format> {
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(Error::Precondition(format!("{cmd} does not emit {}", format.ext())))
    }
}

fn parse_kappa(s: &str) -> Result<BigRational> {
    let q: QuadraticNumber = s.parse()?;
    q.as_rational().cloned().ok_or_else(|| Error::Precondition("κ must be rational".into()))
}

fn cf_cmd(
    slope: &Slope,
    k: usize,
    check_c: Option<&str>,
    se_d: Option<&str>,
    k_max: usize,
    t: Option<usize>,
) -> Result<Outcome> {
    let cf = slope.spec()?.continued_fraction()?;
    let wire = cf.to_wire(k + 1);
    let convergents: Vec<Value> = cf
        .convergents(k)?
        .iter()
        .map(|c| json!({"k": c.k, "p": magnitude_json(&c.p), "q": magnitude_json(&c.q)}))
        .collect();
    let mut out = json!({"slope": slope.text(), "cf": wire, "convergents": convergents});
    let mut inconclusive = Vec::new();
    if let Some(cs) = check_c {
        let report = well_approximated(&cf, &parse_list::<f64>(cs)?, k_max)?;
        out["well_approximated"] = to_json(&report);
    }
    if let Some(ds) = se_d {
        let mut verdicts = Vec::new();
        for d in parse_list::<usize>(ds)? {
            let v = is_in_se_d(&cf, d, k_max);
            if !v.member && v.inconclusive_at_k_max {
                inconclusive.push(format!("SE_{d} undecided at k_max = {k_max}"));
            }
            verdicts.push(json!({"d": d, "verdict": v}));
        }
        out["se"] = Value::Array(verdicts);
    }
    if let Some(t) = t {
        let tr = se_density_truncate(&cf, t)?;
        let cylinder = cf.cylinder(t).ok().map(|(lo, hi)| [lo.to_string(), hi.to_string()]);
        out["truncated"] = json!({"t": t, "cf": tr.to_wire(t + 3), "input_cylinder": cylinder});
    }
    Ok(Outcome::json(out).inconclusive_if(!inconclusive.is_empty(), inconclusive.join("; ")))
}

fn word_cmd(slope: &Slope, l1: u64, k: usize, start: Option<&str>, count: usize) -> Result<Outcome> {
    let theta = slope.exact()?;
    if let Some(s) = start {
        let s: QuadraticNumber = s.parse()?;
        let w = cutting_sequence(&theta, &s, count)?;
        return Ok(Outcome::json(json!({"slope": slope.text(), "start": s.to_string(), "word": w})));
    }
    if let Some(r) = theta.as_rational() {
        let bw = rational_word_any(r, l1)?;
        let mut v = to_json(&bw);
        v["word"] = Value::String(bw.to_word().to_string());
        v["slope"] = Value::String(r.to_string());
        v["l1"] = json!(l1);
        return Ok(Outcome::json(v));
    }
    let mut v = to_json(&theta_prefix(&theta, k)?);
    v["k"] = json!(k);
    Ok(Outcome::json(v))
}

fn admissible_cmd(slope: &Slope, blocks: Option<&str>, word: Option<&str>) -> Result<Outcome> {
    let theta = slope.exact()?;
    let (verdict, w) = match (blocks, word) {
        (Some(b), _) => {
            let n = theta.floor();
            let n = u64::try_from(n).ok().filter(|&n| n > 0).ok_or_else(|| {
                Error::Precondition("block words need slope > 1; pass --word for the swapped case".into())
            })?;
            let bw = BlockWord::new(n, parse_list(b)?)?;
            (is_block_word_admissible(&bw, &theta)?, bw.to_word())
        }
        (_, Some(w)) => {
            let w: Word = w.parse()?;
            (is_admissible(&w, &theta)?, w)
        }
        _ => unreachable!("clap requires one of them"),
    };
    let mut v = to_json(&verdict);
    v["word"] = Value::String(w.to_string());
    Ok(Outcome::json(v))
}

fn exotic_cmd(
    slope: &Slope,
    indices: Vec<usize>,
    kappa: &str,
    word_cap: usize,
    compare: Option<&str>,
    horizon: usize,
    full: bool,
) -> Result<Outcome> {
    let fol = Foliation::new(slope.exact()?, parse_kappa(kappa)?)?;
    let ray = assemble_exotic_ray(&fol, &indices, word_cap)?;
    // 2 Σ 2^{-n}, exactly
    let bound: BigRational = indices
        .iter()
        .map(|&n| BigRational::new(BigInt::from(2), BigInt::one() << n))
        .fold(BigRational::zero(), |a, b| a + b);
    let below = ray.total_measure.lt(&QuadraticNumber::rational(bound.clone()));
    let crossings: Vec<Value> = ray
        .ray
        .segments
        .iter()
        .map(|s| {
            let (a, b) = s.crossing_counts();
            json!([a.to_string(), b.to_string()])
        })
        .collect();
    let mut out = json!({
        "indices": ray.indices,
        "ks": ray.ks,
        "total_measure": ray.total_measure,
        "bound": bound.to_string(),
        "below_bound": below,
        "crossings": crossings,
        "markers": ray.ray.markers.len(),
        "verified_markers": ray.verified_markers,
    });
    if full {
        out["ray"] = to_json(&ray.ray);
    }
    let mut undecided = false;
    if let Some(c) = compare {
        let mut reports = Vec::new();
        for list in c.split(';').filter(|s| !s.trim().is_empty()) {
            let other = assemble_exotic_ray(&fol, &parse_list(list)?, word_cap)?;
            let r = compare_ray_tails(&ray, &other, &fol, horizon)?;
            undecided |= matches!(r.verdict, halo::words::TailVerdict::Inconclusive);
            reports.push(json!({"indices": other.indices, "report": r}));
        }
        out["comparisons"] = Value::Array(reports);
    }
    Ok(Outcome::json(out).inconclusive_if(undecided, "a tail comparison was inconclusive"))
}

#[allow(clippy::too_many_arguments)]
fn growth_cmd(
    slope: &Slope,
    mode: GrowthMode,
    kappa: &str,
    rays: usize,
    length: u32,
    f: &str,
    t_max: f64,
    samples: usize,
    segments: usize,
    seed: u64,
    format: Format,
) -> Result<Outcome> {
    let fol = Foliation::new(slope.exact()?, parse_kappa(kappa)?)?;
    match mode {
        GrowthMode::Crofton => {
            only(format, &[Format::Json], "growth --mode crofton")?;
            Ok(Outcome::json(to_json(&crofton_estimate(&fol, rays, length, seed)?)))
        }
        GrowthMode::Sublinear => {
            let r = sublinear_ray(&fol, SublinearFn::parse(f)?, t_max, samples)?;
            if format == Format::Csv {
                return Ok(Outcome::text(r.growth.to_csv(), Format::Csv));
            }
            only(format, &[Format::Json], "growth")?;
            Ok(Outcome::json(json!({
                "f": r.f, "a": r.a, "b": r.b, "t0": r.t0, "t_max": r.t_max,
                "segments": r.runs.len(), "within_quarter_to_four": r.a >= 0.25 && r.b <= 4.0,
            })))
        }
        GrowthMode::Exotic => {
            let indices: Vec<usize> = (1..=segments).collect();
            let ray = assemble_exotic_ray(&fol, &indices, 0)?;
            let g = growth_series(&ray.ray, &fol, ray.ray.total_length(), samples);
            if format == Format::Csv {
                return Ok(Outcome::text(g.to_csv(), Format::Csv));
            }
            only(format, &[Format::Json], "growth")?;
            Ok(Outcome::json(to_json(&g)))
        }
    }
}

fn leaf_cmd(
    slope: &Slope,
    ks: &str,
    kappa: f64,
    classify: bool,
    sep: &str,
    good: &str,
    format: Format,
) -> Result<Outcome> {
    let ks = parse_range(ks)?;
    let spec = slope.spec()?;
    let theta = spec.quadratic().ok();
    let leaves = match &theta {
        Some(t) => {
            let k = parse_kappa(&kappa.to_string())?;
            let fol = Foliation::new(t.clone(), k)?;
            ks.iter().map(|&k| build_leaf_approx(&fol, k)).collect::<Result<Vec<_>>>()?
        }
        None => leaf_schedule(&spec.continued_fraction()?, &ks, kappa)?,
    };
    if format == Format::Csv {
        return Ok(Outcome::text(schedule_csv(&leaves), Format::Csv));
    }
    only(format, &[Format::Json], "leaf-approx")?;
    let mut out = json!({"slope": slope.text(), "leaves": leaves});
    if !classify {
        return Ok(Outcome::json(out));
    }
    let report = classify_cesag(&leaves, theta.as_ref(), Separation::parse(sep)?, Goodness::parse(good)?);
    let undecided = report.verdict == Verdict::Inconclusive;
    out["cesag"] = to_json(&report);
    Ok(Outcome::json(out).inconclusive_if(undecided, "CESAG classification inconclusive"))
}

#[allow(clippy::too_many_arguments)]
fn roof_cmd(
    schedule: Option<&PathBuf>,
    rule: Option<&str>,
    ks: &str,
    c: f64,
    constant_alpha: Option<f64>,
    beta_mode: &str,
    steps: usize,
    budget: usize,
    r1: f64,
    schedule_out: Option<&PathBuf>,
    full: bool,
    format: Format,
) -> Result<Outcome> {
    let mode = BetaMode::parse(beta_mode)?;
    let mut fitted = None;
    let sched = if let Some(path) = schedule {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
        BendingSchedule::from_csv(&text, mode)?
    } else if let Some(a) = constant_alpha {
        BendingSchedule::constant(steps.max(1), a, mode)?
    } else {
        let spec = rule_spec(rule.unwrap_or("desk"))?;
        let (s, big_c) = BendingSchedule::from_rule(&spec.continued_fraction()?, &parse_range(ks)?, c, mode)?;
        fitted = Some(big_c);
        s
    };
    if let Some(p) = schedule_out {
        write_file(p, &sched.to_csv())?;
    }
    let selector = if budget == 0 { Selector::Sequential } else { Selector::Doubling { budget } };
    let trace = run_roof(&sched, selector, steps, RoofState::new(r1, r1)?);
    let undecided = trace.verdict == RoofVerdict::Inconclusive;
    let why = trace.reason.clone().unwrap_or_else(|| "roof recursion inconclusive".into());
    if format == Format::Csv {
        return Ok(Outcome::text(trace.to_csv(), Format::Csv).inconclusive_if(undecided, why));
    }
    only(format, &[Format::Json], "roof")?;
    let last = trace.steps.last();
    let mut out = json!({
        "verdict": trace.verdict,
        "r1": trace.r1,
        "floor": trace.floor,
        "min_bound": trace.min_bound,
        "reason": trace.reason,
        "steps": trace.steps.len(),
        "final_r": last.map(|s| s.r),
        "final_bound": last.map(|s| s.bound),
        "fitted_C": fitted,
    });
    if full {
        out["trace"] = to_json(&trace.steps);
    }
    Ok(Outcome::json(out).inconclusive_if(undecided, why))
}

fn render_cmd(figure: &Figure) -> Result<Outcome> {
    let svg = match figure {
        Figure::Cutting { slope, start, count } => cutting_sequence_svg(slope.exact()?.to_f64(), *start, *count)?,
        Figure::Chain { radii, constant_alpha, steps } => {
            let radii = match radii {
                Some(r) => parse_list::<f64>(r)?,
                None => {
                    let s = BendingSchedule::constant(*steps, *constant_alpha, BetaMode::Equal)?;
                    let t = run_roof(&s, Selector::Sequential, *steps, RoofState::new(1.0, 1.0)?);
                    t.radii()
                }
            };
            circle_chain_svg(&chain_from_radii(&radii))?
        }
    };
    Ok(Outcome::text(svg, Format::Svg))
}

fn write_file(path: &PathBuf, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Cf { .. } => "cf",
        Command::Word { .. } => "word",
        Command::Admissible { .. } => "admissible",
        Command::Inadmissible { .. } => "inadmissible",
        Command::ExoticRay { .. } => "exotic-ray",
        Command::Growth { .. } => "growth",
        Command::LeafApprox { .. } => "leaf-approx",
        Command::Roof { .. } => "roof",
        Command::Render { .. } => "render",
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    if !(cli.tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let default = if matches!(cli.command, Command::Render { .. }) { Format::Svg } else { Format::Json };
    let format = cli.format.unwrap_or(default);
    let json_only =
        |o: Result<Outcome>| o.and_then(|o| only(format, &[Format::Json], command_name(&cli.command)).map(|_| o));
    match &cli.command {
        Command::Cf { slope, k, check_c, se_d, k_max, truncate } => {
            json_only(cf_cmd(slope, *k, check_c.as_deref(), se_d.as_deref(), *k_max, *truncate))
        }
        Command::Word { slope, l1, k, start, count } => json_only(word_cmd(slope, *l1, *k, start.as_deref(), *count)),
        Command::Admissible { slope, blocks, word } => {
            json_only(admissible_cmd(slope, blocks.as_deref(), word.as_deref()))
        }
        Command::Inadmissible { slope, k } => {
            json_only(slope.exact().and_then(|t| inadmissible_word(&t, *k)).map(|w| Outcome::json(to_json(&w))))
        }
        Command::ExoticRay { slope, segments, indices, kappa, word_cap, compare, horizon, full } => {
            let idx = match indices {
                Some(s) => parse_list(s)?,
                None => (1..=*segments).collect(),
            };
            json_only(exotic_cmd(slope, idx, kappa, *word_cap, compare.as_deref(), *horizon, *full))
        }
        Command::Growth { slope, mode, kappa, rays, length, f, t_max, samples, segments } => {
            growth_cmd(slope, *mode, kappa, *rays, *length, f, *t_max, *samples, *segments, cli.seed, format)
        }
        Command::LeafApprox { slope, ks, kappa, classify, sep, good } => {
            leaf_cmd(slope, ks, *kappa, *classify, sep, good, format)
        }
        Command::Roof { schedule, rule, ks, c, constant_alpha, beta_mode, steps, budget, r1, schedule_out, full } => {
            roof_cmd(
                schedule.as_ref(),
                rule.as_deref(),
                ks,
                *c,
                *constant_alpha,
                beta_mode,
                *steps,
                *budget,
                *r1,
                schedule_out.as_ref(),
                *full,
                format,
            )
        }
        Command::Render { figure } => {
            only(format, &[Format::Svg], "render")?;
            render_cmd(figure)
        }
    }
}

fn emit(cli: &Cli, outcome: &Outcome, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let body = match &outcome.artifact {
        Artifact::Json(v) => {
            let mut s = serde_json::to_string_pretty(&tag_exactness(v.clone(), cli.tol)).expect("json");
            s.push('\n');
            s
        }
        Artifact::Text(s) => s.clone(),
    };
    match &cli.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Precondition(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.{}", command_name(&cli.command), outcome.format.ext()));
            write_file(&path, &body)?;
            let _ = writeln!(err, "wrote {}", path.display());
        }
        None => out.write_all(body.as_bytes()).map_err(|e| Error::Precondition(format!("stdout: {e}")))?,
    }
    Ok(())
}

/// Runs one command, returning the process exit code.
fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match dispatch(cli).and_then(|o| emit(cli, &o, out, err).map(|_| o)) {
        Ok(Outcome { inconclusive: Some(why), .. }) => {
            let _ = writeln!(err, "inconclusive: {why}");
            3
        }
        Ok(_) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(execute(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    struct Run {
        code: u8,
        out: String,
        err: String,
    }

    fn run(args: &[&str]) -> Run {
        let cli = Cli::try_parse_from(std::iter::once("halo").chain(args.iter().copied())).expect("arguments parse");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(&cli, &mut out, &mut err);
        Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
    }

    fn json(args: &[&str]) -> Value {
        let r = run(args);
        assert_eq!(r.code, 0, "{}", r.err);
        serde_json::from_str(&r.out).unwrap()
    }

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("halo-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    /// Every numeric leaf must sit under a key with an `_exactness` sibling,
    /// or inside log-domain bounds.
    fn assert_tagged(v: &Value, path: &str) {
        match v {
            Value::Object(m) if m.contains_key("ln_lower") => {}
            Value::Object(m) => {
                for (k, x) in m {
                    let numeric = match x {
                        Value::Number(_) => true,
                        Value::Array(a) => a.iter().any(Value::is_number),
                        Value::Object(o) => o.contains_key("ln_lower"),
                        _ => false,
                    };
                    if numeric && !k.ends_with("_exactness") {
                        assert!(m.contains_key(&format!("{k}_exactness")), "{path}.{k} untagged");
                    }
                    assert_tagged(x, &format!("{path}.{k}"));
                }
            }
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| assert_tagged(x, &format!("{path}[{i}]"))),
            _ => {}
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
        let out_dir = Cli::command().get_arguments().find(|a| a.get_id() == "out_dir").cloned().unwrap();
        assert_eq!(out_dir.get_env().unwrap(), "HALO_OUT_DIR");
    }

    #[test]
    fn rational_word_example() {
        let v = json(&["word", "--slope", "5/3", "--l1", "1"]);
        assert_eq!(v["blocks"], json!([2, 2, 1]));
        assert_eq!(v["n"], 1);
        assert_eq!(v["swapped"], false);
        assert_tagged(&v, "");
    }

    #[test]
    fn two_long_blocks_rejected() {
        let v = json(&["admissible", "--slope", "sqrt2", "--blocks", "2,2"]);
        assert_eq!(v["admissible"], false);
        let v = json(&["admissible", "--slope", "sqrt2", "--blocks", "2,1,2"]);
        assert_eq!(v["admissible"], true);
        assert_tagged(&v, "");
    }

    #[test]
    fn paper_rule_is_well_approximated() {
        let v = json(&["cf", "--rule", "paper", "--check-C", "1,5,10"]);
        assert_eq!(v["well_approximated"]["well_approximated"], true);
        assert_eq!(v["cf"]["digits_exactness"], "log-domain");
        assert_tagged(&v, "");
    }

    #[test]
    fn one_slope_only() {
        assert!(Cli::try_parse_from(["halo", "word", "--slope", "5/3", "--rule", "desk"]).is_err());
        assert!(Cli::try_parse_from(["halo", "word"]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["word", "--slope", "nonsense"]).code, 2);
        assert_eq!(run(&["admissible", "--slope", "sqrt2", "--blocks", "2,7"]).code, 2);
        assert_eq!(run(&["word", "--slope", "paper"]).code, 2);
        assert_eq!(run(&["render", "cutting", "--slope", "sqrt2", "--format", "json"]).code, 2);
        assert_eq!(run(&["word", "--slope", "5/3", "--tol", "0"]).code, 2);
        // the certificate dips but never crosses the floor
        let r = run(&["roof", "--constant-alpha", "0.01", "--steps", "5", "--budget", "0"]);
        assert_eq!(r.code, 3, "{}", r.err);
        assert!(!r.out.is_empty(), "inconclusive runs still emit their artifact");
        assert_eq!(run(&["cf", "--rule", "desk", "--se-d", "2"]).code, 3);
    }

    #[test]
    fn malformed_schedule_reports_line() {
        let path = scratch("bad").join("bad.csv");
        std::fs::write(&path, "n,d,alpha,epsilon\n1,2,0.1,0.1\n2,oops,0.1,0.1\n").unwrap();
        let r = run(&["roof", "--schedule", path.to_str().unwrap()]);
        assert_eq!(r.code, 2);
        assert!(r.err.contains("line 3"), "{}", r.err);
    }

    #[test]
    fn deterministic_output() {
        for args in [
            &["growth", "--slope", "sqrt2", "--rays", "200", "--length", "20", "--seed", "5"][..],
            &["roof", "--constant-alpha", "0.05", "--steps", "50", "--format", "csv"],
            &["leaf-approx", "--slope", "golden", "--ks", "1..5", "--classify"],
        ] {
            let (a, b) = (run(args), run(args));
            assert_eq!(a.out, b.out, "{args:?}");
            assert!(!a.out.is_empty());
        }
    }

    #[test]
    fn every_command_tags_its_numbers() {
        for args in [
            &["cf", "--slope", "sqrt2", "--se-d", "1", "--k", "5", "--truncate", "2"][..],
            &["word", "--slope", "sqrt2", "--k", "3"],
            &["word", "--slope", "sqrt2", "--start", "1/10", "--count", "12"],
            &["inadmissible", "--slope", "sqrt2", "--k", "2"],
            &["exotic-ray", "--slope", "sqrt2", "--segments", "4", "--compare", "1,2,4"],
            &["growth", "--slope", "sqrt3", "--mode", "sublinear", "--t-max", "1000"],
            &["growth", "--slope", "sqrt2", "--mode", "exotic", "--segments", "3", "--samples", "10"],
            &["leaf-approx", "--rule", "desk", "--ks", "2..10:2", "--classify"],
            &["roof", "--constant-alpha", "0", "--steps", "3", "--full"],
        ] {
            assert_tagged(&json(args), args[0]);
        }
    }

    #[test]
    fn csv_outputs() {
        let r = run(&["growth", "--slope", "sqrt3", "--mode", "sublinear", "--t-max", "100", "--format", "csv"]);
        assert!(r.out.starts_with("t,I\n"));
        let r = run(&["leaf-approx", "--rule", "desk", "--ks", "2..6:2", "--format", "csv"]);
        assert!(r.out.starts_with("n,d,alpha,epsilon\n"));
        let r = run(&["roof", "--constant-alpha", "0.05", "--steps", "3", "--format", "csv"]);
        assert!(r.out.starts_with("k,n,r,bound,beta\n"));
    }

    #[test]
    fn out_dir_receives_the_artifact() {
        let dir = scratch("out");
        let r = run(&["render", "chain", "--radii", "1,0.5,0.25", "--out-dir", dir.to_str().unwrap()]);
        assert_eq!(r.code, 0);
        assert!(r.out.is_empty());
        let svg = std::fs::read_to_string(dir.join("render.svg")).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn schedule_csv_round_trip() {
        let path = scratch("sched").join("desk.csv");
        let p = path.to_str().unwrap();
        let a = json(&["roof", "--rule", "desk", "--ks", "2..60:2", "--steps", "10", "--schedule-out", p]);
        let b = json(&["roof", "--schedule", p, "--steps", "10"]);
        assert_eq!(a["verdict"], "bounded-below");
        assert_eq!(b["verdict"], "bounded-below");
    }
}
