//! The `mcv` command line: argument model and dispatch.

pub mod diagram;

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use middleconv::enumerate::DEFAULT_MAX_ORDER;
use middleconv::rational::fmt_q;
use middleconv::{
    classify, connection_formula, count_table, enumerate_basic_with, enumerate_rigid_with,
    hypergeometric_shape, hypergeometric_substitution, middle_convolution, orbit_dims,
    predict_mc, reduce, rigid_decompositions, alpha_of, construct_rigid_random, EnumerateOptions,
    EnumerationReport, Error, RiemannScheme, SpectralData, SpectralType, Verdict, Q,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::diagram::Diagram;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mcv", version, about = "Spectral types of Fuchsian systems")]
pub struct Command {
    #[command(subcommand)]
    pub verb: Verb,
    /// Emit JSON (one document per input tuple).
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Classification, index of rigidity and reduction chain.
    Analyze(Tuples),
    /// Reduction chain only.
    Reduce(Tuples),
    /// Rigid tuples of a given order.
    EnumerateRigid(Enumerate),
    /// Basic tuples of a given index of rigidity.
    EnumerateBasic(Enumerate),
    /// Rigid decompositions of a rigid triple.
    Decompose(Tuples),
    /// Gamma-product connection coefficient of a rigid triple.
    Connect(Tuples),
    /// Realize a rigid tuple by matrices and apply a middle convolution.
    McDemo(McDemo),
    /// Star diagram of the root of a tuple.
    Diagram(DiagramArgs),
    /// Counts of rigid and basic tuples.
    Counts(Enumerate),
}

#[derive(Debug, Args)]
pub struct Tuples {
    /// Tuples like `411,411,42,33`; read from stdin, one per line, when absent.
    pub tuples: Vec<String>,
}

#[derive(Debug, Args)]
pub struct Enumerate {
    /// Order of the tuples.
    #[arg(short = 'n', long = "order")]
    pub order: Option<u32>,
    /// Index of rigidity (even, at most 0).
    #[arg(short = 'p', long = "index", allow_negative_numbers = true)]
    pub index: Option<i64>,
    /// Worker threads (1 runs sequentially).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Refuse orders above this bound.
    #[arg(long = "max-order", default_value_t = DEFAULT_MAX_ORDER)]
    pub max_order: u32,
}

#[derive(Debug, Args)]
pub struct McDemo {
    #[command(flatten)]
    pub tuples: Tuples,
    /// Seed for eigenvalues and the convolution parameter.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[command(flatten)]
    pub tuples: Tuples,
    /// Graphviz output.
    #[arg(long)]
    pub dot: bool,
}

/// Captured result of one invocation.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Parses `args` (without the program name); help, version and usage
/// errors come back as a finished [`Output`].
pub fn parse_args<I, S>(args: I) -> Result<Command, Output>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("mcv".into()).chain(args.into_iter().map(Into::into));
    Command::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        let text = e.render().to_string();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output {
                code: EXIT_OK,
                stdout: text,
                stderr: String::new(),
            },
            _ => Output {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: text,
            },
        }
    })
}

/// Parses and runs with `input` as stdin.
pub fn run_args<I, S>(args: I, input: &str) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse_args(args) {
        Ok(c) => run(&c, input),
        Err(out) => out,
    }
}

impl Command {
    /// True when the tuples are to be read from stdin.
    pub fn wants_stdin(&self) -> bool {
        match &self.verb {
            Verb::Analyze(t) | Verb::Reduce(t) | Verb::Decompose(t) | Verb::Connect(t) => {
                t.tuples.is_empty()
            }
            Verb::McDemo(d) => d.tuples.tuples.is_empty(),
            Verb::Diagram(d) => d.tuples.tuples.is_empty(),
            Verb::EnumerateRigid(_) | Verb::EnumerateBasic(_) | Verb::Counts(_) => false,
        }
    }
}

pub fn run(c: &Command, input: &str) -> Output {
    match &c.verb {
        Verb::Analyze(t) => per_tuple(t, input, c.json, false, analyze),
        Verb::Reduce(t) => per_tuple(t, input, c.json, false, reduce_one),
        Verb::Decompose(t) => per_tuple(t, input, c.json, true, decompose),
        Verb::Connect(t) => per_tuple(t, input, c.json, true, connect),
        Verb::McDemo(d) => {
            let seed = d.seed;
            per_tuple(&d.tuples, input, c.json, true, move |m| mc_demo(m, seed))
        }
        Verb::Diagram(d) => {
            let dot = d.dot;
            per_tuple(&d.tuples, input, c.json, false, move |m| diagram(m, dot))
        }
        Verb::EnumerateRigid(e) => enumerate(e, c.json, true),
        Verb::EnumerateBasic(e) => enumerate(e, c.json, false),
        Verb::Counts(e) => counts(e, c.json),
    }
}

/// Result of one tuple: text or JSON, and whether the verdict was negative.
struct Report {
    text: String,
    json: Value,
    negative: bool,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Self { text, json, negative: false }
    }
}

/// Accepts `411,411,42,33` and the `6:411,411,42,33` lines printed by the
/// enumerators.
fn parse_tuple(line: &str, untrimmed: bool) -> Result<SpectralType, String> {
    let (order, body) = match line.split_once(':') {
        Some((n, t)) => {
            let n: u32 = n.trim().parse().map_err(|_| format!("bad order prefix in {line:?}"))?;
            (Some(n), t)
        }
        None => (None, line),
    };
    let m = if untrimmed {
        SpectralType::parse_untrimmed(body)
    } else {
        SpectralType::parse(body)
    }
    .map_err(|e| format!("{line:?}: {e}"))?;
    if let Some(n) = order {
        if n != m.order() {
            return Err(format!("{line:?}: prefix says order {n}, tuple has order {}", m.order()));
        }
    }
    Ok(m)
}

fn per_tuple(
    t: &Tuples,
    input: &str,
    json: bool,
    untrimmed: bool,
    f: impl Fn(&SpectralType) -> Result<Report, Error>,
) -> Output {
    let lines: Vec<String> = if t.tuples.is_empty() {
        input
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    } else {
        t.tuples.clone()
    };
    if lines.is_empty() {
        return Output::usage("no tuples given (pass them as arguments or on stdin)");
    }
    let mut out = Output::default();
    for line in &lines {
        let m = match parse_tuple(line, untrimmed) {
            Ok(m) => m,
            Err(e) => {
                let _ = writeln!(out.stderr, "error: {e}");
                out.code = EXIT_USAGE;
                continue;
            }
        };
        match f(&m) {
            Ok(r) => {
                if json {
                    out.stdout.push_str(&r.json.to_string());
                    out.stdout.push('\n');
                } else {
                    out.stdout.push_str(&r.text);
                }
                if r.negative && out.code == EXIT_OK {
                    out.code = EXIT_NEGATIVE;
                }
            }
            Err(e) => {
                // Preconditions on the tuple itself are domain verdicts.
                let _ = writeln!(out.stderr, "{m}: {e}");
                if out.code == EXIT_OK {
                    out.code = if is_domain(&e) { EXIT_NEGATIVE } else { EXIT_USAGE };
                }
            }
        }
    }
    out
}

fn is_domain(e: &Error) -> bool {
    !matches!(e, Error::Parse(_) | Error::BoundExceeded(_) | Error::Dimension(_))
}

fn verdict_text(m: &SpectralType) -> (String, bool) {
    let c = classify(m);
    let trace = reduce(m);
    if c.rigid {
        ("rigid".into(), false)
    } else if c.irreducibly_realizable {
        ("realizable, not rigid".into(), false)
    } else if trace.verdict == Verdict::NotRealizable {
        (format!("not realizable at {}", trace.terminal), true)
    } else {
        ("not irreducibly realizable".into(), true)
    }
}

fn analyze(m: &SpectralType) -> Result<Report, Error> {
    let c = classify(m);
    let trace = reduce(m);
    let (verdict, negative) = verdict_text(m);
    let alpha = alpha_of(m);
    let text = format!(
        "{m}: {verdict}, idx={}, reduction chain {}\n  order {}, Pidx {}, gcd {}, basic {}, fundamental {}, root {}\n  α = {alpha}\n",
        c.idx,
        trace.chain_text(),
        c.order,
        c.pidx,
        c.gcd,
        c.basic,
        c.fundamental,
        c.root_class,
    );
    let json = json!({
        "tuple": m.to_string(),
        "verdict": verdict,
        "realizable": !negative,
        "classification": c,
        "alpha": alpha,
        "chain": trace.chain_text(),
        "reduction": trace,
    });
    Ok(Report { text, json, negative })
}

fn reduce_one(m: &SpectralType) -> Result<Report, Error> {
    let trace = reduce(m);
    let negative = trace.verdict == Verdict::NotRealizable;
    let text = format!("{}  [{}]\n", trace.chain_text(), trace.verdict);
    let json = json!({
        "tuple": m.to_string(),
        "chain": trace.chain_text(),
        "reduction": trace,
    });
    Ok(Report { text, json, negative })
}

fn decompose(m: &SpectralType) -> Result<Report, Error> {
    let decs = rigid_decompositions(m)?;
    let pins = [m.partitions()[0].len(), m.partitions()[1].len()];
    let mut text = format!("{m}: {} rigid decompositions (pins {}, {})\n", decs.len(), pins[0], pins[1]);
    for (a, b) in &decs {
        let _ = writeln!(text, "  {a} ⊕ {b}");
    }
    let json = json!({
        "tuple": m.to_string(),
        "pins": pins,
        "decompositions": decs.iter().map(|(a, b)| json!({"first": a.to_string(), "second": b.to_string()})).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json))
}

fn connect(m: &SpectralType) -> Result<Report, Error> {
    let s = RiemannScheme::symbolic(m)?;
    let f = connection_formula(&s)?;
    // For the generalized hypergeometric shape, also give the classical form.
    let n = m.order();
    let special = match hypergeometric_shape(n) {
        Ok(h) if n >= 2 && &h == m => {
            Some(f.substitute(&hypergeometric_substitution(n)).cancelled())
        }
        _ => None,
    };
    let mut text = format!("{m}: c = {f}\n");
    if let Some(g) = &special {
        let _ = writeln!(text, "  hypergeometric parameters: {g}");
    }
    let json = json!({
        "tuple": m.to_string(),
        "formula": f.to_string(),
        "latex": f.to_latex(),
        "gamma": f,
        "specialized": special.as_ref().map(ToString::to_string),
    });
    Ok(Report::ok(text, json))
}

fn mc_demo(m: &SpectralType, seed: u64) -> Result<Report, Error> {
    if !classify(m).rigid {
        return Err(Error::Precondition(format!("{m} is not rigid")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (scheme, tuple) = construct_rigid_random(m, &mut rng)?;
    let data = SpectralData::of(&tuple)?;
    let dims = orbit_dims(&tuple)?;
    let values = scheme.constant_eigenvalues()?;
    // Convolve with one eigenvalue per point, skipping |μ| = 0.
    let mut mu: Vec<Q> = Vec::new();
    for _ in 0..32 {
        mu = values.iter().map(|r| r[rng.random_range(0..r.len())].clone()).collect();
        if mu.iter().sum::<Q>() != Q::from_integer(0.into()) {
            break;
        }
    }
    let predicted = predict_mc(&data, &mu)?;
    let image = middle_convolution(&tuple, &mu)?;
    let observed = SpectralData::of(&image)?;
    let image_dims = orbit_dims(&image)?;
    let mu_text: Vec<String> = mu.iter().map(fmt_q).collect();
    let agrees = observed == predicted;
    let mut text = format!("{m}: realized by {} matrices of size {}\n", tuple.k(), tuple.size());
    text.push_str(&tuple.to_string());
    let _ = write!(text, "spectral data\n{data}");
    let _ = writeln!(
        text,
        "idx {}, dim Z {}, Pidx {}",
        dims.idx, dims.dim_z, dims.pidx
    );
    let _ = writeln!(
        text,
        "mc with μ = ({}): size {}, idx {}, spectral data {}",
        mu_text.join(", "),
        image.size(),
        image_dims.idx,
        if agrees { "as predicted" } else { "differs from prediction" }
    );
    text.push_str(&observed.to_string());
    let json = json!({
        "tuple": m.to_string(),
        "seed": seed,
        "matrices": tuple,
        "spectral_data": data,
        "orbit": dims,
        "mc": {
            "mu": mu_text,
            "size": image.size(),
            "idx": image_dims.idx,
            "predicted": predicted,
            "observed": observed,
            "agrees": agrees,
        },
    });
    Ok(Report { text, json, negative: !agrees })
}

fn diagram(m: &SpectralType, dot: bool) -> Result<Report, Error> {
    let d = Diagram::of(m);
    let body = if dot { d.to_dot() } else { d.to_ascii() };
    let text = if dot { body.clone() } else { format!("{m}: α = {}\n{body}", d.alpha) };
    let json = json!({
        "tuple": m.to_string(),
        "alpha": d.alpha,
        "nodes": d.nodes,
        "edges": d.edges,
        "text": body,
    });
    Ok(Report::ok(text, json))
}

fn options(e: &Enumerate) -> EnumerateOptions {
    EnumerateOptions {
        threads: e.threads,
        max_order: e.max_order,
    }
}

fn emit(report: &EnumerationReport, json: bool) -> String {
    if json {
        let items: Vec<String> = report
            .items
            .iter()
            .map(|m| format!("{}:{m}", m.order()))
            .collect();
        let mut s = json!({
            "parameter": report.parameter,
            "counts": report.counts,
            "items": items,
        })
        .to_string();
        s.push('\n');
        s
    } else {
        report.to_text()
    }
}

fn enumerate(e: &Enumerate, json: bool, rigid: bool) -> Output {
    let opts = options(e);
    let result = if rigid {
        let Some(n) = e.order else {
            return Output::usage("enumerate-rigid needs -n/--order");
        };
        enumerate_rigid_with(n, &opts)
    } else {
        let Some(p) = e.index else {
            return Output::usage("enumerate-basic needs -p/--index");
        };
        enumerate_basic_with(p, &opts)
    };
    match result {
        Ok(r) => Output { code: EXIT_OK, stdout: emit(&r, json), stderr: String::new() },
        Err(err) => Output::usage(err),
    }
}

fn counts(e: &Enumerate, json: bool) -> Output {
    let n = e.order.unwrap_or(12);
    let p = e.index.unwrap_or(-4);
    let table = match count_table(n, p, &options(e)) {
        Ok(t) => t,
        Err(err) => return Output::usage(err),
    };
    let stdout = if json {
        let mut s = serde_json::to_string(&table).expect("serializable");
        s.push('\n');
        s
    } else {
        let mut s = String::from("rigid\n  n  triplets  total\n");
        for r in &table.rigid {
            let _ = writeln!(s, "{:>3}  {:>8}  {:>5}", r.n, r.triplets, r.total);
        }
        s.push_str("basic\n  p  total  triplets  4-tuples\n");
        for r in &table.basic {
            let _ = writeln!(s, "{:>3}  {:>5}  {:>8}  {:>8}", r.p, r.total, r.triplets, r.four_tuples);
        }
        s
    };
    Output { code: EXIT_OK, stdout, stderr: String::new() }
}
