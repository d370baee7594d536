//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use gqca_core::codec::controlled_matrix;
use gqca_core::parallel::{serial_pulses, FAMILIES};
use gqca_core::pulses::{frame_offset, load_bits, transport, transport_from};
use gqca_core::spectra::{brute_force_extent, zeta};
use gqca_core::synth::{canonical_problem, Geometry};
use gqca_core::{
    apply_gate, build_global_operator, decode, encode, extract_logical_action, fluorescence_readout, gate_program,
    multiplet_interval, overlap_margin, run_parallel_step, scaling_report, seeded_rng, synthesize, Basis, BitArray,
    CMatrix, CellConfig, CellType, Complex64, Cutoff, EnablePredicate, Gate1, GateKind, GateSpec, InteractionModel,
    Layout, LogicalWord, Mode, ParallelLayout, QuantumState, Register, SparseState, UpdateRule,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Rule semantics against the dense operator oracle.
fn criterion_1() -> Outcome {
    let t = Instant::now();
    let gates = [
        ("INV", Gate1::inv()),
        ("H", Gate1::h()),
        ("phase", Gate1::phase(std::f64::consts::FRAC_PI_4)),
    ];
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for (mode, max_n) in [(Mode::TwoLevel, 8usize), (Mode::ThreeLevel, 5)] {
        for n in 2..=max_n {
            let basis = Basis::new(n, mode);
            let dim = basis.size() as usize;
            for kind in [CellType::A, CellType::B] {
                for field in -2i8..=2 {
                    for (_, g) in &gates {
                        let rule = UpdateRule::new(kind, field, g.clone()).map_err(e2s)?;
                        let op = build_global_operator(&rule, n, mode).map_err(e2s)?;
                        for j in 0..dim {
                            let c = basis.unrank(j as u64).map_err(e2s)?;
                            let mut s = QuantumState::from_config(&c, mode).map_err(e2s)?;
                            s.apply_rule(&rule).map_err(e2s)?;
                            for (i, a) in s.amplitudes().iter().enumerate() {
                                worst = worst.max((a - op[(i, j)]).norm());
                            }
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:.3e}"))?;
    ensure(t.elapsed() < Duration::from_secs(60), || format!("took {:?}", t.elapsed()))?;
    Ok(format!(
        "{checked} rule/size/mode cases, max deviation {worst:.1e}, {:.1?}",
        t.elapsed()
    ))
}

/// One B0 pulse moves CU and qubit one cell apart; transport reverses.
fn criterion_2() -> Outcome {
    let layout = Layout::new(20, vec![3], Some(12)).map_err(e2s)?;
    for bit in [0u8, 1] {
        let word = LogicalWord::new(vec![bit], true);
        let start = encode(&layout, &word).map_err(e2s)?;
        let mut b = BitArray::from_config(&start).map_err(e2s)?;
        b.apply_rule(&"B0".parse().map_err(e2s)?).map_err(e2s)?;
        let moved = layout.displaced(1, -1).ok_or("no room to move")?;
        let got = decode(&moved, &b.to_config()).map_err(e2s)?;
        ensure(got == word, || format!("after B0 decoded {got}, want {word}"))?;
        for k in 1..=50i64 {
            let seq = transport_from(frame_offset(&layout), k);
            let mut b = BitArray::from_config(&start).map_err(e2s)?;
            b.apply_sequence(&seq).map_err(e2s)?;
            b.apply_sequence(&seq.inverse()).map_err(e2s)?;
            ensure(b.to_config() == start, || format!("k={k} did not restore"))?;
        }
    }
    Ok("B0 moves qubit +1 and CU -1 with forms kept; k = 1..50 restores exactly".into())
}

/// CU passes through a qubit without changing it.
fn criterion_3() -> Outcome {
    let layout = Layout::new(20, vec![3], Some(12)).map_err(e2s)?;
    // Classically: CU starts right of the qubit and ends left of it.
    let crossed = Layout::new(20, vec![13], Some(2)).map_err(e2s)?;
    for bit in [0u8, 1] {
        let word = LogicalWord::new(vec![bit], true);
        let mut b = BitArray::from_config(&encode(&layout, &word).map_err(e2s)?).map_err(e2s)?;
        b.apply_sequence(&transport(10)).map_err(e2s)?;
        let got = decode(&crossed, &b.to_config()).map_err(e2s)?;
        ensure(got == word, || format!("after crossing decoded {got}"))?;
    }
    let act = extract_logical_action(&transport(10), &layout).map_err(e2s)?;
    let err = act.distance(&CMatrix::identity(2));
    ensure(err < 1e-10 && act.leakage < 1e-10, || {
        format!("error {err:.3e}, leakage {:.3e}", act.leakage)
    })?;
    Ok(format!(
        "20 cells, CU crosses the qubit in 10 steps: error {err:.1e}, leakage {:.1e}",
        act.leakage
    ))
}

/// Synthesis of one-qubit and controlled gates on minimal layouts.
fn criterion_4() -> Outcome {
    let targets = [
        ("X", Gate1::x()),
        ("H", Gate1::h()),
        ("Z", Gate1::z()),
        ("phase(pi/4)", Gate1::phase(std::f64::consts::FRAC_PI_4)),
    ];
    let mut notes = Vec::new();
    for kind in [GateKind::OneQubit, GateKind::ControlledU] {
        for (name, u) in &targets {
            let t = Instant::now();
            let p = canonical_problem(kind, u.clone(), Geometry::MINIMAL, 14).map_err(e2s)?;
            let found = synthesize(&p)
                .map_err(e2s)?
                .found()
                .ok_or_else(|| format!("{} {name}: nothing within 14", kind.name()))?;
            ensure(found.error < 1e-8 && found.action.leakage < 1e-8, || {
                format!("{} {name}: error {:.3e}", kind.name(), found.error)
            })?;
            ensure(t.elapsed() < Duration::from_secs(1800), || format!("{} {name} too slow", kind.name()))?;
            if *name == "X" {
                notes.push(format!(
                    "{} {} pulses ({} searched)",
                    kind.name(),
                    found.sequence.len(),
                    found.searched_len
                ));
            }
        }
    }
    Ok(format!("8 targets within 1e-8; {}", notes.join(", ")))
}

/// Library CC-U truth table.
fn criterion_5() -> Outcome {
    let p = canonical_problem(GateKind::Ccu, Gate1::x(), Geometry::MINIMAL, 0).map_err(e2s)?;
    let layout = p.layout;
    let spec = GateSpec::Ccu {
        u: Gate1::x(),
        c1: 2,
        c2: 1,
        target: 0,
    };
    let seq = gate_program(&layout, &spec).map_err(e2s)?;
    let act = extract_logical_action(&seq, &layout).map_err(e2s)?;
    let err = act.distance(&controlled_matrix(3, &[2, 1], 0, &Gate1::x()));
    ensure(err < 1e-8 && act.leakage < 1e-8, || format!("error {err:.3e}"))?;
    for w in 0..8usize {
        let word = LogicalWord::from_index(w, 3, true);
        let mut b = BitArray::from_config(&encode(&layout, &word).map_err(e2s)?).map_err(e2s)?;
        b.apply_sequence(&seq).map_err(e2s)?;
        let got = decode(&layout, &b.to_config()).map_err(e2s)?;
        let mut want = word.bits.clone();
        if want[1] == 1 && want[2] == 1 {
            want[0] ^= 1;
        }
        ensure(got.bits == want, || format!("{word} -> {got}"))?;
    }
    Ok(format!(
        "8x8 table exact; quantum error {err:.1e} on {} cells (sparse engine), {} pulses",
        layout.n_cells(),
        seq.len()
    ))
}

/// Fluorescence readout, deterministic and sampled.
fn criterion_6() -> Outcome {
    let layout = Layout::new(40, vec![5], Some(14)).map_err(e2s)?;
    let cfg = |b: u8| encode(&layout, &LogicalWord::new(vec![b], true));
    let cycles = 4;
    let mut rng = seeded_rng(6);
    for bit in [0u8, 1] {
        let mut s = SparseState::from_config(&cfg(bit).map_err(e2s)?, Mode::ThreeLevel).map_err(e2s)?;
        let r = fluorescence_readout(&mut s, &layout, 0, cycles, &mut rng).map_err(e2s)?;
        let want = if bit == 1 { cycles } else { 0 };
        ensure(r.emissions == want, || format!("qubit {bit}: {} emissions", r.emissions))?;
    }
    let p1 = 0.3f64;
    let start = SparseState::from_terms(
        layout.n_cells(),
        Mode::ThreeLevel,
        &[
            (cfg(0).map_err(e2s)?, Complex64::new((1.0 - p1).sqrt(), 0.0)),
            (cfg(1).map_err(e2s)?, Complex64::new(p1.sqrt(), 0.0)),
        ],
    )
    .map_err(e2s)?;
    let trials = 10_000;
    let mut clicks = 0;
    for _ in 0..trials {
        let mut s = start.clone();
        clicks += usize::from(fluorescence_readout(&mut s, &layout, 0, 1, &mut rng).map_err(e2s)?.bit);
    }
    let f = clicks as f64 / trials as f64;
    ensure((f - p1).abs() < 0.02, || format!("click frequency {f} for |a1|^2 = {p1}"))?;
    Ok(format!("emissions {cycles}/0 for 1/0; frequency {f:.4} vs {p1}"))
}

/// Parallel broadcast correctness, log scaling and the serial comparison.
fn criterion_7() -> Outcome {
    let x = Gate1::x();
    let mut cases = 0;
    for n in [4usize, 8, 16] {
        let n64 = n as u64;
        let mut preds = vec![EnablePredicate::All];
        preds.extend((0..n64).map(EnablePredicate::Single));
        preds.extend((0..=4).map(EnablePredicate::EveryPow2));
        for lo in 0..n64 {
            for hi in lo..n64 {
                preds.push(EnablePredicate::Interval(lo, hi));
            }
        }
        let layout = ParallelLayout::new(n).map_err(e2s)?;
        let data: Vec<u8> = (0..n).map(|g| ((g * 7 + 3) % 5 % 2) as u8).collect();
        for pred in &preds {
            let mut b = layout.initial(&data).map_err(e2s)?;
            run_parallel_step(&layout, &x, pred, &mut b).map_err(e2s)?;
            let want: Vec<u8> = (0..n).map(|g| data[g] ^ u8::from(pred.eval(g as u64))).collect();
            ensure(b == layout.initial(&want).map_err(e2s)?, || format!("N={n} {pred:?}"))?;
            cases += 1;
        }
    }
    let sizes = [4usize, 8, 16, 32, 64, 128, 256];
    let mut fits = Vec::new();
    for family in FAMILIES {
        let r = scaling_report(family, &sizes, &x).map_err(e2s)?;
        ensure(r.max_relative_residual < 0.10, || {
            format!("{family}: residual {:.3}", r.max_relative_residual)
        })?;
        if family == "all" {
            ensure(r.rows.iter().all(|row| row.tau == 0), || "All has nonzero tau".into())?;
        }
        fits.push(format!("{family} {:.0}·log2N{:+.0}", r.c1, r.c2));
    }
    for n in [8usize, 16, 32, 64, 128, 256] {
        let parallel = scaling_report("all", &[n], &x).map_err(e2s)?.rows[0].total_pulses;
        let serial = serial_pulses(n, &(0..n).collect::<Vec<_>>(), &x).map_err(e2s)?;
        ensure(serial > parallel, || format!("N={n}: serial {serial} vs parallel {parallel}"))?;
    }
    Ok(format!(
        "{cases} predicate cases exact; tau fits {}; serial > parallel for N = 8..256",
        fits.join(", ")
    ))
}

/// Multiplet separation.
fn criterion_8() -> Outcome {
    let analytic = 2.0 * (zeta(3.0) - 1.0);
    ensure((analytic - 0.404_113_806_319_188_57).abs() < 1e-12, || format!("zeta(3) gives {analytic}"))?;
    let w3 = InteractionModel::new(1.0, 3.0, Cutoff::Truncated(1_000_000))
        .half_width()
        .map_err(e2s)?;
    ensure((w3 - analytic).abs() < 1e-9, || format!("W(3) = {w3}"))?;
    let m3 = overlap_margin(&InteractionModel::new(1.0, 3.0, Cutoff::AnalyticTail), CellType::A).map_err(e2s)?;
    ensure(m3 > 0.0, || format!("margin(3) = {m3}"))?;
    ensure(
        InteractionModel::new(1.0, 1.0, Cutoff::AnalyticTail).half_width().is_err(),
        || "k = 1 not flagged".into(),
    )?;
    let m1: Vec<f64> = [10usize, 1000, 100_000]
        .iter()
        .map(|&r| overlap_margin(&InteractionModel::new(1.0, 1.0, Cutoff::Truncated(r)), CellType::A))
        .collect::<Result<_, _>>()
        .map_err(e2s)?;
    ensure(m1[0] < 0.0 && m1[1] < m1[0] && m1[2] < m1[1], || format!("margin(1) {m1:?}"))?;
    for k in [1.0, 2.0, 3.0, 5.0] {
        for r in 2..=7 {
            let m = InteractionModel::new(1.0, k, Cutoff::Truncated(r));
            let (lo, hi) = brute_force_extent(&m, r).map_err(e2s)?;
            for f in [-2i8, 0, 2] {
                let iv = multiplet_interval(&m, CellType::A, f).map_err(e2s)?;
                ensure((iv.lo - iv.center - lo).abs() < 1e-12 && (iv.hi - iv.center - hi).abs() < 1e-12, || {
                    format!("k={k} R={r} f={f}")
                })?;
            }
        }
    }
    Ok(format!(
        "W(3) = {w3:.12}, margin(3) = {m3:.4}, margin(1) at R=1e5 = {:.2}; brute force R <= 7 exact",
        m1[2]
    ))
}

/// Load, entangle and read two qubits.
fn criterion_9() -> Outcome {
    let layout = Layout::new(40, vec![5, 13], Some(22)).map_err(e2s)?;
    let word = LogicalWord::new(vec![0, 0], true);
    let mut s = SparseState::from_config(&CellConfig::all_down(40).map_err(e2s)?, Mode::ThreeLevel).map_err(e2s)?;
    gqca_core::apply_sequence(&mut s, &load_bits(&layout, &word).map_err(e2s)?).map_err(e2s)?;
    let loaded = encode(&layout, &word).map_err(e2s)?;
    ensure((s.amplitude(&loaded).norm() - 1.0).abs() < 1e-12, || "load failed".into())?;
    apply_gate(&mut s, &layout, &GateSpec::OneQubit { u: Gate1::h(), target: 1 }).map_err(e2s)?;
    apply_gate(
        &mut s,
        &layout,
        &GateSpec::ControlledU {
            u: Gate1::x(),
            control: 1,
            target: 0,
        },
    )
    .map_err(e2s)?;
    let shots = 10_000;
    let mut rng = seeded_rng(9);
    let (mut same, mut ones) = (0usize, 0usize);
    for _ in 0..shots {
        let mut t = s.clone();
        let a = fluorescence_readout(&mut t, &layout, 0, 1, &mut rng).map_err(e2s)?.bit;
        let b = fluorescence_readout(&mut t, &layout, 1, 1, &mut rng).map_err(e2s)?.bit;
        same += usize::from(a == b);
        ones += usize::from(a && b);
    }
    let f11 = ones as f64 / shots as f64;
    ensure(same == shots, || format!("{} uncorrelated shots", shots - same))?;
    ensure((f11 - 0.5).abs() < 0.02, || format!("P(11) = {f11}"))?;
    Ok(format!("{shots} shots all matching; P(00) = {:.4}, P(11) = {f11:.4}", 1.0 - f11))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("rule semantics", criterion_1),
        ("transport", criterion_2),
        ("CU transparency", criterion_3),
        ("gate synthesis", criterion_4),
        ("CC-U truth table", criterion_5),
        ("readout", criterion_6),
        ("parallelism", criterion_7),
        ("spectra", criterion_8),
        ("end to end", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
