use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use gqca_core::library::{body_digest, FULL_CHECK_QUBITS};
use gqca_core::parallel::{compile_step, family_predicate, serial_pulses, FAMILIES};
use gqca_core::spectra::ScanReport;
use gqca_core::synth::{any_slots, canonical_problem, local_alphabet, standard_alphabet, Geometry};
use gqca_core::{
    apply_gate, decode, encode, gate_program, scaling_report, seeded_rng, synthesize, threshold_scan, verify_entry,
    BitArray, CellConfig, Complex64, Cutoff, EnablePredicate, Gate1, GateKind, GateSpec, Layout, Library, LogicalWord,
    Mode, ParallelLayout, PulseSequence, Register, SparseState, SynthesisOutcome,
};

const SCHEMA: u32 = 1;
const TOP_TERMS: usize = 8;

#[derive(Parser)]
#[command(name = "gqca", version, about = "Globally controlled quantum cellular automaton simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a pulse sequence to a configuration and trace every pulse.
    Sim(SimArgs),
    /// Apply one gate through the pulse library.
    Gate(GateArgs),
    /// Search for a gate sequence.
    Synth(SynthArgs),
    /// Sub-computer parallelism runs and scaling tables.
    Parallel(ParallelArgs),
    /// Multiplet separation scans.
    Spectra(SpectraArgs),
    /// Verify every golden library sequence.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Json,
    None,
}

#[derive(Args)]
struct StateArgs {
    /// Configuration literal over d, u, f.
    #[arg(long, conflicts_with_all = ["layout", "word"])]
    config: Option<String>,
    /// Layout file (`key = value` lines).
    #[arg(long)]
    layout: Option<PathBuf>,
    /// Logical word for the layout: `q=01,cu=1`, or bits alone with the CU
    /// present when the layout has one.
    #[arg(long, requires = "layout")]
    word: Option<String>,
    /// 2 or 3 levels per cell; defaults to the smallest that fits.
    #[arg(long, value_parser = ["2", "3"])]
    mode: Option<String>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Pulse file.
    #[arg(long, conflicts_with = "seq")]
    pulses: Option<PathBuf>,
    /// Inline pulse sequence.
    #[arg(long)]
    seq: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    trace: TraceFormat,
}

#[derive(Args)]
struct GateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Gate spec: `one:U:t`, `cu:U:c:t` or `ccu:U:c1:c2:t`.
    #[arg(long)]
    gate: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    One,
    Cu,
    Ccu,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlphabetArg {
    Standard,
    Local,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Target single-qubit gate: X, H, Z, S, T, or `U[..]`.
    #[arg(long, default_value = "X")]
    gate: String,
    /// Spectator qubits left of the target.
    #[arg(long, default_value_t = 0)]
    left: usize,
    /// Spectator qubits right of the controls.
    #[arg(long, default_value_t = 0)]
    right: usize,
    /// Spectators may also be absent.
    #[arg(long)]
    empty: bool,
    #[arg(long, default_value_t = 14)]
    max_len: usize,
    #[arg(long, value_enum, default_value = "standard")]
    alphabet: AlphabetArg,
    /// Accept any field-2 or field-0 slot, not only B2.
    #[arg(long)]
    any_slot: bool,
    #[arg(long)]
    verbose: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ParallelArgs {
    /// Array sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize])]
    n: Vec<usize>,
    /// all | single:K | pow2:P | interval:LO:HI | table:BITS, or a family
    /// name (single, pow2, interval) for its representative at each size.
    #[arg(long, default_value = "all")]
    pred: String,
    /// Classical single-qubit gate.
    #[arg(long, default_value = "X")]
    gate: String,
    /// Seed for the data qubits of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    report: Format,
}

#[derive(Args)]
struct SpectraArgs {
    /// Single exponent.
    #[arg(long, conflicts_with = "scan")]
    k: Option<f64>,
    /// Exponent grid `lo:hi:step`.
    #[arg(long)]
    scan: Option<String>,
    /// Distance cutoff R, or `analytic` for the full tail.
    #[arg(long, default_value = "analytic")]
    cutoff: String,
    /// Bare-gap spread, in units of J1.
    #[arg(long, default_value_t = 0.0)]
    disorder: f64,
    #[arg(long, default_value_t = 1.0)]
    j1: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Usage errors found after argument parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("GQCA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.command {
        Command::Sim(a) => sim(a),
        Command::Gate(a) => gate(a),
        Command::Synth(a) => synth(a),
        Command::Parallel(a) => parallel(a),
        Command::Spectra(a) => spectra(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn print_json(value: serde_json::Value) {
    let mut v = value;
    if let Some(m) = v.as_object_mut() {
        m.insert("schema".into(), json!(SCHEMA));
    }
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_mode(m: &Option<String>) -> Option<Mode> {
    m.as_deref().map(|m| if m == "3" { Mode::ThreeLevel } else { Mode::TwoLevel })
}

fn parse_word(s: &str, layout: &Layout) -> anyhow::Result<LogicalWord> {
    if s.contains('=') {
        return Ok(s.parse()?);
    }
    // Bits only: CU present if the layout has one.
    let bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            _ => Err(usage(format!("bad logical word {s:?}"))),
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(LogicalWord::new(bits, layout.cu().is_some()))
}

/// Starting configuration and, when given, its layout.
fn load_state(a: &StateArgs) -> anyhow::Result<(CellConfig, Option<Layout>)> {
    match (&a.config, &a.layout) {
        (Some(c), None) => Ok((c.parse()?, None)),
        (None, Some(path)) => {
            let layout = Layout::parse_text(&read(path)?)?;
            let word = match &a.word {
                Some(w) => parse_word(w, &layout)?,
                None => LogicalWord::new(vec![0; layout.n_qubits()], layout.cu().is_some()),
            };
            Ok((encode(&layout, &word)?, Some(layout)))
        }
        _ => Err(usage("give --config or --layout")),
    }
}

fn term_list(terms: &[(CellConfig, Complex64)]) -> Vec<(CellConfig, Complex64)> {
    let mut t: Vec<_> = terms.to_vec();
    t.sort_by(|a, b| b.1.norm_sqr().total_cmp(&a.1.norm_sqr()).then_with(|| a.0.cmp(&b.0)));
    t.truncate(TOP_TERMS);
    t
}

fn fmt_amp(a: Complex64) -> String {
    format!("{:.6}{:+.6}i", a.re, a.im)
}

/// Config literal for a basis state, otherwise the largest terms.
fn snapshot(terms: &[(CellConfig, Complex64)]) -> String {
    if terms.len() == 1 && (terms[0].1.norm() - 1.0).abs() < 1e-12 && terms[0].1.im.abs() < 1e-12 && terms[0].1.re > 0.0
    {
        return terms[0].0.to_string();
    }
    let parts: Vec<String> = term_list(terms)
        .iter()
        .map(|(c, a)| format!("{c}:{}", fmt_amp(*a)))
        .collect();
    format!("superposed({})", parts.join(", "))
}

fn snapshot_json(terms: &[(CellConfig, Complex64)]) -> serde_json::Value {
    json!(term_list(terms)
        .iter()
        .map(|(c, a)| json!({"config": c.to_string(), "re": round6(a.re), "im": round6(a.im)}))
        .collect::<Vec<_>>())
}

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn sim(a: SimArgs) -> anyhow::Result<ExitCode> {
    let (config, _) = load_state(&a.state)?;
    let seq: PulseSequence = match (&a.pulses, &a.seq) {
        (Some(p), None) => read(p)?.parse()?,
        (None, Some(s)) => s.parse()?,
        _ => return Err(usage("give --pulses or --seq")),
    };
    let mode = parse_mode(&a.state.mode).unwrap_or_else(|| {
        let natural = config.natural_mode();
        if seq.iter().any(|r| r.gate.dim() == 3) {
            Mode::ThreeLevel
        } else {
            natural
        }
    });
    config.validate(mode)?;
    let mut lines = Vec::with_capacity(seq.len() + 1);
    let mut steps = Vec::with_capacity(seq.len() + 1);
    let init = vec![(config.clone(), Complex64::new(1.0, 0.0))];
    lines.push(format!("0 | init | {}", snapshot(&init)));
    steps.push(json!({"step": 0, "rule": "init", "terms": snapshot_json(&init)}));
    let classical = seq.is_classical() && mode == config.natural_mode();
    let mut push = |i: usize, rule: String, terms: Vec<(CellConfig, Complex64)>| {
        lines.push(format!("{i} | {rule} | {}", snapshot(&terms)));
        steps.push(json!({"step": i, "rule": rule, "terms": snapshot_json(&terms)}));
    };
    let final_terms = if classical {
        let mut b = BitArray::from_config(&config)?;
        for (i, r) in seq.iter().enumerate() {
            b.apply_rule(r).with_context(|| format!("pulse {}", i + 1))?;
            push(i + 1, r.to_string(), vec![(b.to_config(), Complex64::new(1.0, 0.0))]);
        }
        vec![(b.to_config(), Complex64::new(1.0, 0.0))]
    } else {
        let mut s = SparseState::from_config(&config, mode)?;
        for (i, r) in seq.iter().enumerate() {
            s.apply_rule(r).with_context(|| format!("pulse {}", i + 1))?;
            push(i + 1, r.to_string(), s.terms());
        }
        s.terms()
    };
    match a.trace {
        TraceFormat::Text => {
            for l in &lines {
                println!("{l}");
            }
        }
        TraceFormat::Json => print_json(json!({
            "command": "sim",
            "engine": if classical { "classical" } else { "quantum" },
            "mode": mode.name(),
            "steps": steps,
        })),
        TraceFormat::None => println!("{}", snapshot(&final_terms)),
    }
    Ok(ExitCode::SUCCESS)
}

fn gate(a: GateArgs) -> anyhow::Result<ExitCode> {
    let (config, layout) = load_state(&a.state)?;
    let layout = layout.ok_or_else(|| usage("gate needs --layout"))?;
    let spec: GateSpec = a.gate.parse()?;
    spec.validate(layout.n_qubits())?;
    let mode = parse_mode(&a.state.mode).unwrap_or(Mode::TwoLevel);
    let program = gate_program(&layout, &spec)?;
    let mut s = SparseState::from_config(&config, mode)?;
    apply_gate(&mut s, &layout, &spec)?;
    // (word, bits or config literal, amplitude)
    let mut out: Vec<(String, String, Complex64)> = Vec::new();
    for (c, amp) in term_list(&s.terms()) {
        match decode(&layout, &c) {
            Ok(w) => out.push((w.to_string(), w.bits.iter().map(|b| b.to_string()).collect(), amp)),
            Err(_) => out.push((c.to_string(), c.to_string(), amp)),
        }
    }
    match a.format {
        Format::Json => print_json(json!({
            "command": "gate",
            "gate": spec.to_string(),
            "pulses": program.len(),
            "program": program.to_string(),
            "output": out.iter().map(|(w, _, amp)| json!({"word": w, "re": round6(amp.re), "im": round6(amp.im)})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            println!("bits,re,im");
            for (_, b, amp) in &out {
                println!("{b},{:.6},{:.6}", amp.re, amp.im);
            }
        }
        Format::Text => {
            println!("gate {spec}: {} pulses", program.len());
            println!("{program}");
            for (w, _, amp) in &out {
                println!("{w} {}", fmt_amp(*amp));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn synth(a: SynthArgs) -> anyhow::Result<ExitCode> {
    let kind = match a.kind {
        KindArg::One => GateKind::OneQubit,
        KindArg::Cu => GateKind::ControlledU,
        KindArg::Ccu => GateKind::Ccu,
    };
    let u: Gate1 = a.gate.parse()?;
    let geom = Geometry {
        left: a.left,
        right: a.right,
        empty_spectators: a.empty,
    };
    let mut p = canonical_problem(kind, u, geom, a.max_len)?;
    p.alphabet = match a.alphabet {
        AlphabetArg::Standard => standard_alphabet(),
        AlphabetArg::Local => local_alphabet(),
    };
    if a.any_slot {
        p.slots = any_slots();
    }
    p.verbose = a.verbose;
    let outcome = synthesize(&p)?;
    let found = matches!(outcome, SynthesisOutcome::Found(_));
    match a.format {
        Format::Json => print_json(json!({
            "command": "synth",
            "target": p.target.to_string(),
            "layout": p.layout.to_text(),
            "outcome": outcome,
        })),
        Format::Csv => {
            println!("target,found,length,searched,nodes,error,leakage");
            match &outcome {
                SynthesisOutcome::Found(s) => println!(
                    "{},true,{},{},{},{:.3e},{:.3e}",
                    p.target,
                    s.sequence.len(),
                    s.searched_len,
                    s.nodes,
                    s.error,
                    s.action.leakage
                ),
                SynthesisOutcome::NotFound { nodes, .. } => println!("{},false,,,{nodes},,", p.target),
            }
        }
        Format::Text => match &outcome {
            SynthesisOutcome::Found(s) => {
                println!("target {}", p.target);
                println!("length {} (searched {})", s.sequence.len(), s.searched_len);
                if let Some(slot) = &s.slot {
                    println!(
                        "slot {:?}{} at cell {}, {}",
                        slot.kind,
                        slot.field,
                        slot.cell,
                        slot.orientation.name()
                    );
                }
                println!("nodes {}", s.nodes);
                println!("error {:.3e} leakage {:.3e}", s.error, s.action.leakage);
                println!("{}", s.sequence);
            }
            SynthesisOutcome::NotFound { max_len, nodes } => {
                println!("target {}", p.target);
                println!("no sequence within {max_len} pulses ({nodes} nodes)");
            }
        },
    }
    Ok(if found { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn predicate_for(spec: &str, n: usize) -> anyhow::Result<EnablePredicate> {
    if FAMILIES.contains(&spec) {
        return Ok(family_predicate(spec, n)?);
    }
    EnablePredicate::parse(spec).map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct ParallelRow {
    n: usize,
    predicate: String,
    label_width: usize,
    tau: usize,
    dispatch: usize,
    gate: usize,
    uncompute: usize,
    total_pulses: usize,
    overhead_factor: f64,
    serial_pulses: usize,
    enabled: usize,
    correct: bool,
}

fn parallel(a: ParallelArgs) -> anyhow::Result<ExitCode> {
    let u: Gate1 = a.gate.parse()?;
    if !u.is_classical() {
        return Err(usage("parallel runs on the classical engine; use a permutation gate"));
    }
    if a.n.contains(&0) {
        return Err(usage("--n values must be positive"));
    }
    let mut rng = seeded_rng(a.seed);
    let mut rows = Vec::new();
    for &n in &a.n {
        let pred = predicate_for(&a.pred, n)?;
        let layout = ParallelLayout::new(n)?;
        let program = compile_step(&layout, &u, &pred).with_context(|| format!("predicate {} at N={n}", a.pred))?;
        let data: Vec<u8> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
        let mut b = layout.initial(&data)?;
        b.apply_sequence(&program.sequence())?;
        let want: Vec<u8> = (0..n).map(|g| data[g] ^ u8::from(pred.eval(g as u64))).collect();
        let correct = b == layout.initial(&want)?;
        let enabled: Vec<usize> = (0..n).filter(|&g| pred.eval(g as u64)).collect();
        rows.push(ParallelRow {
            n,
            predicate: format!("{pred:?}"),
            label_width: layout.label_width(),
            tau: program.budget.compute,
            dispatch: program.budget.dispatch,
            gate: program.budget.gate,
            uncompute: program.budget.uncompute,
            total_pulses: program.budget.total,
            overhead_factor: layout.overhead_factor(),
            serial_pulses: serial_pulses(n, &enabled, &u)?,
            enabled: enabled.len(),
            correct,
        });
    }
    let all_ok = rows.iter().all(|r| r.correct);
    match a.report {
        Format::Csv => {
            println!("N,tau,total_pulses,overhead_factor");
            for r in &rows {
                println!("{},{},{},{:.6}", r.n, r.tau, r.total_pulses, r.overhead_factor);
            }
        }
        Format::Json => {
            let fit = if FAMILIES.contains(&a.pred.as_str()) && a.n.len() > 1 {
                Some(scaling_report(&a.pred, &a.n, &u)?)
            } else {
                None
            };
            print_json(json!({"command": "parallel", "rows": rows, "fit": fit}));
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                writeln!(
                    s,
                    "N={} {}: tau {} dispatch {} gate {} uncompute {} total {} (serial {}), overhead {:.3}, {} enabled, {}",
                    r.n,
                    r.predicate,
                    r.tau,
                    r.dispatch,
                    r.gate,
                    r.uncompute,
                    r.total_pulses,
                    r.serial_pulses,
                    r.overhead_factor,
                    r.enabled,
                    if r.correct { "correct" } else { "WRONG" }
                )?;
            }
            print!("{s}");
        }
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_scan(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad scan {s:?}, want lo:hi:step")))?;
    let [lo, hi, step] = parts[..] else {
        return Err(usage(format!("bad scan {s:?}, want lo:hi:step")));
    };
    if !(step > 0.0) || hi < lo {
        return Err(usage(format!("bad scan {s:?}, want lo <= hi and step > 0")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

fn spectra(a: SpectraArgs) -> anyhow::Result<ExitCode> {
    let ks = match (&a.k, &a.scan) {
        (Some(k), None) => vec![*k],
        (None, Some(s)) => parse_scan(s)?,
        _ => return Err(usage("give --k or --scan")),
    };
    let cutoff = if a.cutoff == "analytic" {
        Cutoff::AnalyticTail
    } else {
        Cutoff::Truncated(
            a.cutoff
                .parse()
                .map_err(|_| usage(format!("bad cutoff {:?}", a.cutoff)))?,
        )
    };
    let report: ScanReport = threshold_scan(a.j1, &ks, cutoff, a.disorder)?;
    match a.format {
        Format::Csv => {
            println!("k,W,margin,separated");
            for r in &report.rows {
                println!("{},{:.12},{:.12},{}", r.k, r.w, r.margin, r.separated);
            }
        }
        Format::Json => print_json(json!({
            "command": "spectra",
            "j1": a.j1,
            "disorder": a.disorder,
            "rows": report.rows,
            "crossover": report.crossover,
        })),
        Format::Text => {
            for r in &report.rows {
                println!(
                    "k={} W={:.12} margin={:.12} separated={}",
                    r.k, r.w, r.margin, r.separated
                );
            }
            if let Some(k) = report.crossover {
                println!("crossover k*={k:.6}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> anyhow::Result<ExitCode> {
    let lib = Library::builtin()?;
    let mut reports = Vec::new();
    for entry in lib.entries() {
        let r = verify_entry(entry, a.tol)?;
        let body = entry.render(&[]);
        let tokens: Vec<&str> = body
            .lines()
            .filter(|l| !l.starts_with('#'))
            .flat_map(str::split_whitespace)
            .collect();
        let digest_ok = body_digest(&tokens) == entry.sha256;
        reports.push((r, digest_ok));
    }
    let ok = reports.iter().all(|(r, d)| r.passed && *d);
    match a.format {
        Format::Json => print_json(json!({
            "command": "verify",
            "entries": reports.iter().map(|(r, d)| json!({"report": r, "digest_ok": d})).collect::<Vec<_>>(),
            "full_check_qubits": FULL_CHECK_QUBITS,
            "passed": ok,
        })),
        Format::Csv => {
            println!("entry,length,digest_ok,max_error,covariance_error,passed");
            for (r, d) in &reports {
                let worst = r.gates.iter().map(|g| g.1.max(g.2)).fold(0.0, f64::max);
                println!(
                    "{},{},{},{:.3e},{:.3e},{}",
                    r.name, r.length, d, worst, r.covariance_error, r.passed && *d
                );
            }
        }
        Format::Text => {
            for (r, d) in &reports {
                let worst = r.gates.iter().map(|g| g.1.max(g.2)).fold(0.0, f64::max);
                println!(
                    "{} {}: {} pulses, digest {}, max error {:.1e}, covariance {:.1e}",
                    if r.passed && *d { "PASS" } else { "FAIL" },
                    r.name,
                    r.length,
                    if *d { "ok" } else { "BAD" },
                    worst,
                    r.covariance_error
                );
            }
        }
    }
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(anyhow!("golden verification failed"))
    }
}
