use gqca_core::codec::{controlled_matrix, extract_logical_action, Layout};
use gqca_core::library::{gate_program, verify_entry, Library, LibraryEntry};
use gqca_core::synth::{canonical_problem, GateKind, GateSpec, Geometry};
use gqca_core::Gate1;

const TOL: f64 = 1e-9;

fn minimal(kind: GateKind) -> (Layout, GateSpec) {
    let p = canonical_problem(kind, Gate1::x(), Geometry::MINIMAL, 30).unwrap();
    (p.layout, p.target)
}

#[test]
fn builtin_has_every_kind() {
    let lib = Library::builtin().unwrap();
    assert_eq!(lib.entries().len(), 4);
    for kind in [GateKind::OneQubit, GateKind::ControlledU, GateKind::Ccu] {
        assert_eq!(lib.for_kind(kind).unwrap().kind, kind);
    }
    assert!(lib.get("readout").is_ok());
    assert!(lib.get("swap").is_err());
}

#[test]
fn every_entry_verifies() {
    for entry in Library::builtin().unwrap().entries() {
        let r = verify_entry(entry, TOL).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.gates.len(), 4);
    }
}

#[test]
fn tampered_body_is_rejected() {
    let lib = Library::builtin().unwrap();
    let text = lib.get("one_qubit").unwrap().render(&[]);
    let bad = text.replacen("B2:U", "A2:U", 1);
    assert!(LibraryEntry::parse("one_qubit", &bad).is_err());
    assert!(LibraryEntry::parse("one_qubit", &text).is_ok());
}

#[test]
fn gates_on_minimal_layouts() {
    for kind in [GateKind::OneQubit, GateKind::ControlledU, GateKind::Ccu] {
        let (layout, _) = minimal(kind);
        for name in ["X", "H", "T"] {
            let u: Gate1 = name.parse().unwrap();
            let spec = minimal(kind).1.with_u(u);
            let seq = gate_program(&layout, &spec).unwrap();
            let act = extract_logical_action(&seq, &layout).unwrap();
            let want = spec.logical_matrix(layout.n_qubits());
            assert!(act.distance(&want) < TOL, "{spec}: {}", act.distance(&want));
            assert!(act.leakage < TOL);
        }
    }
}

#[test]
fn toffoli_inside_a_row_of_qubits() {
    // Five qubits at the slot pitch, CU after the last one; the CCU acts on
    // the middle three with a spectator on each side.
    let qubits: Vec<usize> = (0..5).map(|j| 5 + 8 * j).collect();
    let cu = 5 + 8 * 4 + 9;
    let layout = Layout::new(cu + 80, qubits, Some(cu)).unwrap();
    let spec = GateSpec::Ccu {
        u: Gate1::x(),
        c1: 3,
        c2: 2,
        target: 1,
    };
    let seq = gate_program(&layout, &spec).unwrap();
    let act = extract_logical_action(&seq, &layout).unwrap();
    let want = controlled_matrix(5, &[3, 2], 1, &Gate1::x());
    assert!(act.distance(&want) < TOL);
}

#[test]
fn geometry_outside_the_library_is_refused() {
    let qubits: Vec<usize> = (0..3).map(|j| 5 + 8 * j).collect();
    let layout = Layout::new(100, qubits, Some(30)).unwrap();
    let spec = GateSpec::ControlledU {
        u: Gate1::x(),
        control: 0,
        target: 2,
    };
    assert!(gate_program(&layout, &spec).is_err());
}
