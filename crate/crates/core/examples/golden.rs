//! Regenerates the golden library files.
//!
//! cargo run --release -p gqca-core --example golden -- <out dir> [entry...]
//!
//! With `GOLDEN_FORWARD` set to a forward sequence found earlier (approach
//! included), the search is skipped for the single named entry and the
//! sequence is only checked. `GOLDEN_NODES` then supplies the node count.

use std::path::PathBuf;

use gqca_core::library::LibraryEntry;
use gqca_core::synth::{canonical_problem, check_forward, local_alphabet, synthesize, GateKind, Geometry, Orientation};
use gqca_core::{Gate1, PulseSequence};

struct Job {
    name: &'static str,
    kind: GateKind,
    geometry: Geometry,
    orientation: Option<Orientation>,
    max_len: usize,
}

const JOBS: [Job; 4] = [
    Job {
        name: "one_qubit",
        kind: GateKind::OneQubit,
        geometry: Geometry { left: 2, right: 2, empty_spectators: true },
        orientation: None,
        max_len: 16,
    },
    Job {
        name: "controlled_u",
        kind: GateKind::ControlledU,
        geometry: Geometry { left: 1, right: 1, empty_spectators: true },
        orientation: None,
        max_len: 22,
    },
    Job {
        name: "ccu",
        kind: GateKind::Ccu,
        geometry: Geometry { left: 1, right: 1, empty_spectators: false },
        orientation: None,
        max_len: 30,
    },
    Job {
        name: "readout",
        kind: GateKind::OneQubit,
        geometry: Geometry { left: 2, right: 2, empty_spectators: true },
        orientation: Some(Orientation::Inverted),
        max_len: 16,
    },
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().expect("output directory"));
    let wanted = &args[1..];
    for job in JOBS.iter().filter(|j| wanted.is_empty() || wanted.iter().any(|w| w == j.name)) {
        let mut p = canonical_problem(job.kind, Gate1::x(), job.geometry, job.max_len).expect("problem");
        p.alphabet = local_alphabet();
        p.orientation = job.orientation;
        p.verbose = true;
        let t = std::time::Instant::now();
        let found = match std::env::var("GOLDEN_FORWARD") {
            Ok(fw) => {
                let forward: PulseSequence = fw.parse().expect("forward sequence");
                let nodes = std::env::var("GOLDEN_NODES").ok().and_then(|n| n.parse().ok()).unwrap_or(0);
                check_forward(&p, &forward, nodes).expect("forward sequence does not implement the gate")
            }
            Err(_) => synthesize(&p).expect("search").found().expect("no sequence within max_len"),
        };
        let slot = found.slot.expect("non-identity target");
        let approach = p.approach.len();
        let entry = LibraryEntry {
            name: job.name.to_string(),
            kind: job.kind,
            geometry: job.geometry,
            orientation: slot.orientation,
            approach,
            core: PulseSequence::new(found.forward.rules[approach..].to_vec()),
            slot_kind: slot.kind,
            slot_field: slot.field,
            sha256: String::new(),
            meta: Default::default(),
        };
        let text = entry.render(&[
            ("searched", found.searched_len.to_string()),
            ("nodes", found.nodes.to_string()),
            ("six_up_at_slot", found.six_up_at_slot.to_string()),
        ]);
        std::fs::write(out.join(format!("{}.pulse", job.name)), text).expect("write");
        eprintln!("{}: {} pulses in {:?}", job.name, found.sequence.len(), t.elapsed());
    }
}
