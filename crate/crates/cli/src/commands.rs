use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde_json::{json, Value};

use bilist_core::bounds::{self, ConditionId, Region, SweepParams};
use bilist_core::budget::Budget;
use bilist_core::colorability::{find_proper_colouring, verify_certificate, Verdict};
use bilist_core::constructions::{self as cons, BoundaryParams, ConstructionError};
use bilist_core::param::PointMode;
use bilist_core::probabilistic::{self as prob, ProbError, SamplerOutcome, SplitMode, Witness};
use bilist_core::search::{is_choosable_complete, threshold_a, AStar, Choosability};
use bilist_core::search::SearchError;
use bilist_core::steiner::{mbar_bounds, mbar_exact, SetFamily};
use bilist_core::{read_certificate, write_certificate, BipartiteGraph, ListAssignment, NonChoosabilityCertificate};

use crate::output::{colouring_json, colouring_text, Report};
use crate::{BoundsArgs, Cli, Command, ConstructArgs, ConstructKind, Format, Mode, SampleArgs, SampleKind, SplitArg, Status};

pub struct Failure {
    pub status: Status,
    pub message: String,
    pub hint: Option<String>,
}

impl Failure {
    fn usage(message: impl Into<String>, hint: impl Into<String>) -> Self {
        Self {
            status: Status::Usage,
            message: message.into(),
            hint: Some(hint.into()),
        }
    }

    fn capped(message: impl Into<String>) -> Self {
        Self {
            status: Status::Capped,
            message: message.into(),
            hint: Some("raise --timeout or --max-nodes to narrow the bracket".into()),
        }
    }
}

type Outcome = Result<Status, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    if g.timeout.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return Err(Failure::usage("--timeout must be a non-negative number of seconds", "e.g. --timeout 30"));
    }
    let budget = Budget::new(g.max_nodes, g.timeout.map(Duration::from_secs_f64));
    match &cli.command {
        Command::Decide { file } => decide(file, g.format),
        Command::Verify { file } => verify(file, g.format),
        Command::Choosable {
            complete,
            ka,
            kb,
            palette_cap,
            out,
        } => choosable(complete[0], complete[1], *ka, *kb, *palette_cap, out.as_deref(), g.format, &budget),
        Command::Threshold {
            b,
            ka,
            kb,
            palette_cap,
            out,
        } => threshold(*b, *ka, *kb, *palette_cap, out.as_deref(), g.format, &budget),
        Command::Mbar { k1, k2, l, bounds_only } => mbar(*k1, *k2, *l, *bounds_only, g.format, &budget),
        Command::Bounds(args) => bounds_cmd(args, g.format, g.max_rows),
        Command::Construct(args) => construct(args, g.format, &budget),
        Command::Sample(args) => sample(args, g.format, g.seed),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display()), "pass an existing file"))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display()), "choose a writable path"))?;
    }
    fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()), "choose a writable path"))
}

/// Reads an instance in certificate format; `claim`, `provenance` and
/// `notes` may be omitted.
fn load_instance(path: &Path) -> Result<NonChoosabilityCertificate, Failure> {
    let text = read_text(path)?;
    let hint = "instances use the bilist-cert/1 JSON format";
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display()), hint))?;
    if let Value::Object(map) = &mut value {
        map.entry("schema").or_insert_with(|| json!(bilist_core::cert::SCHEMA));
        map.entry("claim").or_insert_with(|| json!("NOT_LIST_COLOURABLE"));
        map.entry("provenance").or_insert_with(|| json!("SEARCH"));
        map.entry("notes").or_insert_with(|| json!(""));
    }
    read_certificate(&value.to_string()).map_err(|e| Failure::usage(format!("{}: {e}", path.display()), hint))
}

fn decide(file: &Path, format: Format) -> Outcome {
    let inst = load_instance(file)?;
    let found = find_proper_colouring(&inst.graph, &inst.assignment)
        .map_err(|e| Failure::usage(e.to_string(), "lists must match the graph"))?;
    let (report, status) = match found {
        Some(c) => (
            Report::new(format!("COLOURABLE\n{}", colouring_text(&c)))
                .field("verdict", "COLOURABLE")
                .field("colouring", colouring_json(&c)),
            Status::Affirmative,
        ),
        None => (
            Report::new("NOT COLOURABLE").field("verdict", "NOT_COLOURABLE"),
            Status::Negative,
        ),
    };
    report.print(format);
    Ok(status)
}

fn verify(file: &Path, format: Format) -> Outcome {
    let text = read_text(file)?;
    let cert = read_certificate(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", file.display()), "certificates use the bilist-cert/1 JSON format"))?;
    let verdict = verify_certificate(&cert).map_err(|e| Failure::usage(e.to_string(), "lists must match the graph"))?;
    let (report, status) = match verdict {
        Verdict::Verified => (Report::new("VERIFIED").field("verdict", "VERIFIED"), Status::Affirmative),
        Verdict::Refuted(c) => (
            Report::new(format!("REFUTED\n{}", colouring_text(&c)))
                .field("verdict", "REFUTED")
                .field("colouring", colouring_json(&c)),
            Status::Negative,
        ),
    };
    report.print(format);
    Ok(status)
}

fn search_failure(e: SearchError) -> Failure {
    match e {
        SearchError::Timeout { .. } | SearchError::TooLarge { .. } => Failure::capped(e.to_string()),
        SearchError::Invalid(_) | SearchError::Infeasible { .. } | SearchError::RetryExhausted { .. } => {
            Failure::usage(e.to_string(), "check the size parameters")
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn choosable(
    a: usize,
    b: usize,
    ka: usize,
    kb: usize,
    palette_cap: Option<usize>,
    out: Option<&Path>,
    format: Format,
    budget: &Budget,
) -> Outcome {
    if a == 0 || b == 0 || ka == 0 || kb == 0 {
        return Err(Failure::usage("sizes must be positive", "e.g. --complete 20 7 --ka 3 --kb 4"));
    }
    let cap = palette_cap.unwrap_or(b * kb);
    let verdict = match is_choosable_complete(a, b, ka, kb, cap, budget) {
        Ok(v) => v,
        Err(SearchError::Timeout { nodes, .. }) => {
            Report::new(format!("UNDECIDED ({nodes} nodes charged)"))
                .field("verdict", "UNDECIDED")
                .print(format);
            return Err(Failure::capped("search stopped before every B-family was examined"));
        }
        Err(e) => return Err(search_failure(e)),
    };
    match verdict {
        Choosability::Yes { note } => {
            Report::new(format!("CHOOSABLE\n{note}"))
                .field("verdict", "CHOOSABLE")
                .field("note", note)
                .print(format);
            Ok(Status::Affirmative)
        }
        Choosability::No(cert) => {
            let path = out
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(format!("bilist-K{a}-{b}-{ka}-{kb}.cert")));
            write_text(&path, &write_certificate(&cert))?;
            Report::new(format!("NOT CHOOSABLE\ncertificate: {}", path.display()))
                .field("verdict", "NOT_CHOOSABLE")
                .field("certificate", path.display().to_string())
                .print(format);
            Ok(Status::Negative)
        }
    }
}

fn threshold(
    b: usize,
    ka: usize,
    kb: usize,
    palette_cap: Option<usize>,
    out: Option<&Path>,
    format: Format,
    budget: &Budget,
) -> Outcome {
    if b == 0 || ka == 0 || kb == 0 {
        return Err(Failure::usage("sizes must be positive", "e.g. --b 2 --ka 2 --kb 2"));
    }
    let result = threshold_a(b, ka, kb, palette_cap.unwrap_or(b * kb), budget).map_err(search_failure)?;
    let value = match result.a_star {
        AStar::Finite(a) => a.to_string(),
        AStar::Unbounded => "unbounded".to_string(),
    };
    let mut report = Report::new(format!("{value}\n{}", result.proof_note))
        .field("b", b)
        .field("k_a", ka)
        .field("k_b", kb)
        .field("a_star", value);
    if let (Some(path), Some(cert)) = (out, &result.witness) {
        write_text(path, &write_certificate(cert))?;
        report.human.push_str(&format!("\ncertificate: {}", path.display()));
        report = report.field("certificate", path.display().to_string());
    }
    report.print(format);
    Ok(Status::Affirmative)
}

fn mbar(k1: usize, k2: usize, l: usize, bounds_only: bool, format: Format, budget: &Budget) -> Outcome {
    let bracket = mbar_bounds(k1, k2, l).map_err(search_failure)?;
    let base = |r: Report| {
        r.field("k1", k1)
            .field("k2", k2)
            .field("l", l)
            .field("lower", bracket.lower_ceil.to_string())
            .field("upper", bracket.upper)
    };
    if bounds_only {
        base(Report::new(format!("[{}, {})", bracket.lower_ceil, bracket.upper))).print(format);
        return Ok(Status::Affirmative);
    }
    match mbar_exact(k1, k2, l, budget) {
        Ok(exact) => {
            let text = exact.family.to_text();
            base(Report::new(format!("{}\n{text}", exact.value)))
                .field("value", exact.value)
                .field("family", exact.family.lists())
                .print(format);
            Ok(Status::Affirmative)
        }
        Err(SearchError::Timeout { lower, upper, .. }) => {
            let hi = upper.map_or("?".to_string(), |u| u.to_string());
            base(Report::new(format!("BRACKET [{lower}, {hi}]")))
                .field("value", Value::Null)
                .field("bracket_lower", lower)
                .field("bracket_upper", upper)
                .print(format);
            Err(Failure::capped(format!("M̄({k1},{k2},{l}) lies in [{lower}, {hi}]")))
        }
        Err(e) => Err(search_failure(e)),
    }
}

fn parse_values(flag: &str, s: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::usage(format!("cannot parse --{flag} '{s}'"), "use a value, a list like 2,4,8 or a range like 1..5");
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.parse().map_err(|_| bad())?;
            let hi: u64 = hi.parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.contains(&0) {
        return Err(Failure::usage(format!("--{flag} values must be positive"), "parameters are positive integers"));
    }
    Ok(out)
}

fn bounds_cmd(args: &BoundsArgs, format: Format, max_rows: usize) -> Outcome {
    let ids: Vec<ConditionId> = match &args.conditions {
        None => ConditionId::ALL.to_vec(),
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<Result<_, String>>()
            .map_err(|e| Failure::usage(e, "ids: transversal, coupon, cu1, cu2, c3c1, c3c2, c3c3, boundary, degrees"))?,
    };
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) || args.t.is_nan() || args.p.is_some_and(|p| !(0.0..=1.0).contains(&p)) {
        return Err(Failure::usage("need 0 < epsilon < 1, a finite t and 0 <= p <= 1", "e.g. --epsilon 0.5 --t 1"));
    }
    let region = Region {
        mode: match args.mode {
            Mode::Degree => PointMode::Degree,
            Mode::Complete => PointMode::Complete,
        },
        x_a: parse_values("xa", &args.xa)?,
        x_b: parse_values("xb", &args.xb)?,
        k_a: parse_values("ka", &args.ka)?,
        k_b: parse_values("kb", &args.kb)?,
    };
    let params = SweepParams {
        epsilon: args.epsilon,
        t: args.t,
        p: args.p,
    };
    let points = region.points();
    let rows = points.len() * ids.len();
    let keep = if rows > max_rows { max_rows / ids.len().max(1) } else { points.len() };
    let reports: Vec<_> = points[..keep].par_iter().map(|p| bounds::check_point(p, &ids, &params)).collect();
    match format {
        Format::Csv => print!("{}", bounds::to_csv(&reports)),
        Format::Structured => println!("{}", serde_json::to_string(&reports).expect("serializable reports")),
        Format::Human => {
            for r in &reports {
                let p = &r.point;
                for e in &r.entries {
                    let verdict = match (e.applicable, e.holds) {
                        (false, _) => "n/a",
                        (true, true) => "holds",
                        (true, false) => "fails",
                    };
                    println!(
                        "({}, {}, {}, {}) {:<11} {:<5} margin {}",
                        p.x_a, p.x_b, p.k_a, p.k_b, e.id.as_str(), verdict, e.margin
                    );
                }
            }
        }
    }
    if keep < points.len() {
        return Err(Failure {
            status: Status::Capped,
            message: format!("printed {} of {rows} rows, stopped by --max-rows {max_rows}", keep * ids.len()),
            hint: Some("raise --max-rows or shrink the region".into()),
        });
    }
    Ok(Status::Affirmative)
}

fn fixtures_dir() -> PathBuf {
    std::env::var_os("BILIST_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            let crates = Path::new(env!("CARGO_MANIFEST_DIR")).parent().expect("crate inside crates/");
            crates.parent().expect("workspace root").join("fixtures")
        })
}

fn construction_failure(e: ConstructionError) -> Failure {
    match e {
        ConstructionError::Size { .. } => Failure {
            status: Status::Capped,
            message: e.to_string(),
            hint: Some("raise --size-cap".into()),
        },
        ConstructionError::Scale(report) => Failure {
            status: Status::Capped,
            message: format!("parameters exceed explicit scale: {report}"),
            hint: Some("use --m and --segments for an explicit witness".into()),
        },
        ConstructionError::PropertyAHolds { family, witness } => Failure {
            status: Status::Negative,
            message: format!("family {family} has Property A; witness set {witness:?}"),
            hint: None,
        },
        ConstructionError::Refuted(m) => Failure {
            status: Status::Negative,
            message: format!("construction refuted: {m}"),
            hint: None,
        },
        ConstructionError::Search(s) => search_failure(s),
        ConstructionError::Invalid(_) | ConstructionError::Core(_) => Failure::usage(e.to_string(), "check the construction parameters"),
    }
}

fn read_family(path: &Path) -> Result<SetFamily, Failure> {
    SetFamily::parse(&read_text(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display()), "families use the 'l k m' text format"))
}

fn construct(args: &ConstructArgs, format: Format, budget: &Budget) -> Outcome {
    let cap = args.size_cap;
    let mut extra: Vec<(String, Value)> = Vec::new();
    let cert = match &args.kind {
        ConstructKind::Classic { k, delta } => cons::construct_classic(*k, *delta, cap),
        ConstructKind::Steiner { fam_a, fam_b, k1, k2 } => {
            let (fa, fb) = (read_family(fam_a)?, read_family(fam_b)?);
            cons::construct_steiner(&fa, &fb, *k1, *k2)
        }
        ConstructKind::Fano35 => cons::construct_fano_35(),
        ConstructKind::Fano28 => cons::construct_fano_28(),
        ConstructKind::Boundary { b, delta } => {
            BoundaryParams::new(*b, *delta).and_then(|p| cons::construct_boundary(p, cap))
        }
        ConstructKind::Gadget { k, delta } => cons::construct_gadget(*k, *delta, cap).map(|g| {
            extra.push(("max_degree_b".into(), json!(g.certificate.graph.max_degree_b())));
            g.certificate
        }),
        ConstructKind::Witness { k, degree, m, segments } => match (degree, m, segments) {
            (Some(d), _, _) => cons::construct_witness_cond3(*k, *d, budget).map(|(c, r)| {
                extra.push(("m".into(), json!(r.m)));
                extra.push(("segments".into(), json!(r.segments)));
                c
            }),
            (None, Some(m), Some(s)) => cons::construct_witness_explicit(*k, *m, *s, budget),
            _ => return Err(Failure::usage("witness needs --degree or both --m and --segments", "e.g. witness --k 2 --m 8 --segments 2")),
        },
    }
    .map_err(construction_failure)?;
    let text = write_certificate(&cert);
    let path = match (&args.out, &args.fixture) {
        (Some(_), Some(_)) => return Err(Failure::usage("--out and --fixture are exclusive", "pick one destination")),
        (Some(p), None) => Some(p.clone()),
        (None, Some(name)) => Some(fixtures_dir().join(name)),
        (None, None) => None,
    };
    let Some(path) = path else {
        // The certificate itself is the output.
        print!("{text}");
        return Ok(Status::Affirmative);
    };
    write_text(&path, &text)?;
    let mut report = Report::new(format!(
        "K_{{{},{}}} ({}, {}) VERIFIED\ncertificate: {}",
        cert.graph.a_size(),
        cert.graph.b_size(),
        cert.assignment.k_a(),
        cert.assignment.k_b(),
        path.display()
    ))
    .field("a", cert.graph.a_size())
    .field("b", cert.graph.b_size())
    .field("k_a", cert.assignment.k_a())
    .field("k_b", cert.assignment.k_b())
    .field("verdict", "VERIFIED")
    .field("certificate", path.display().to_string());
    for (k, v) in extra {
        report = report.field(&k, v);
    }
    report.print(format);
    Ok(Status::Affirmative)
}

fn sample(args: &SampleArgs, format: Format, seed: Option<u64>) -> Outcome {
    let seed = match (seed, format) {
        (Some(s), _) => s,
        (None, Format::Csv) => return Err(Failure::usage("--format csv requires an explicit --seed", "add --seed N")),
        (None, _) => 0,
    };
    let (graph, assignment): (BipartiteGraph, ListAssignment) = match (&args.instance, &args.random) {
        (Some(path), _) => {
            let inst = load_instance(path)?;
            (inst.graph, inst.assignment)
        }
        (None, Some(r)) => prob::random_instance(r[0], r[1], r[2], r[3], r[4], r[5], r[6], seed)
            .map_err(|e| Failure::usage(e.to_string(), "--random A B DEG_A DEG_B KA KB PALETTE"))?,
        (None, None) => return Err(Failure::usage("sample needs --instance or --random", "e.g. --random 8 8 3 3 4 2 6")),
    };
    let budget = args.budget;
    let result = match args.kind {
        SampleKind::Transversal => prob::sample_transversal_colouring(&graph, &assignment, seed, budget),
        SampleKind::Coupon => prob::sample_coupon_colouring(&graph, &assignment, seed, budget),
        SampleKind::Split => {
            let mode = match args.split_mode {
                SplitArg::Eq1 => SplitMode::Eq1,
                SplitArg::Eq2 => SplitMode::Eq2,
            };
            prob::sample_palette_split(&graph, &assignment, args.p, args.epsilon, mode, seed, budget)
        }
    };
    match result {
        Ok(outcome) => {
            sample_report(&outcome).print(format);
            Ok(Status::Affirmative)
        }
        Err(ProbError::BudgetExhausted { budget, seed }) => {
            Report::new(format!("EXHAUSTED\nseed {seed}\nresamples [{budget}, {budget}] without success"))
                .field("status", "EXHAUSTED")
                .field("seed", seed)
                .field("budget", budget)
                .field("rng", prob::RNG_ID)
                .print(format);
            Err(Failure::capped(format!("resample budget {budget} exhausted with seed {seed}")))
        }
        Err(e @ (ProbError::Invalid(_) | ProbError::Core(_) | ProbError::TooLarge { .. })) => {
            Err(Failure::usage(e.to_string(), "check the instance and sampler parameters"))
        }
    }
}

fn sample_report(o: &SamplerOutcome) -> Report {
    let (colouring, split) = match &o.result {
        Witness::Colouring(c) => (c, None),
        Witness::PaletteSplit { to_b, colouring } => (colouring, Some(to_b.iter().collect::<Vec<_>>())),
        Witness::Transversal(_) => unreachable!("colouring samplers return colourings"),
    };
    let mut human = format!(
        "SUCCESS\nseed {}\nrng {}\nresamples {}\nbudget {}\n",
        o.seed, o.rng, o.resample_count, o.budget
    );
    for w in &o.warnings {
        human.push_str(&format!("warning: {w}\n"));
    }
    if let Some(s) = &split {
        let cols: Vec<String> = s.iter().map(usize::to_string).collect();
        human.push_str(&format!("to_b: {}\n", cols.join(" ")));
    }
    human.push_str(&colouring_text(colouring));
    Report::new(human)
        .field("status", "SUCCESS")
        .field("seed", o.seed)
        .field("rng", o.rng)
        .field("resamples", o.resample_count)
        .field("budget", o.budget)
        .field("warnings", o.warnings.clone())
        .field("to_b", split.map_or(Value::Null, |s| json!(s)))
        .field("colouring", colouring_json(colouring))
}
