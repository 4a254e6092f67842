use nfkgw_core::io::tables::{diagnostics_csv, read_diagnostics, write_diagnostics};
use nfkgw_core::io::{config_hash, Snapshot};
use nfkgw_core::spectral::{ComplexState, DiagnosticsRecord, Frame, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

fn state(grid: &Grid, values: &[f64], frame: Frame) -> ComplexState {
    let n = grid.len();
    let v = |i: usize| values[i % values.len()];
    ComplexState {
        psi: (0..n).map(|i| Complex64::new(v(i), v(i + 1))).collect(),
        phi: (0..n).map(|i| v(i + 2)).collect(),
        pphi: (0..n).map(|i| v(i + 3)).collect(),
        time: v(0).abs(),
        frame,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nfld_round_trip_is_bit_exact(
        dim in 1usize..=3,
        log_n in 2u32..=4,
        values in prop::collection::vec(-1e6f64..1e6, 1..16),
        tau in any::<bool>(),
        eps in 1e-4f64..1.0,
    ) {
        let grid = Grid::new(dim, 1 << log_n, 7.5).unwrap();
        let s = state(&grid, &values, if tau { Frame::Tau } else { Frame::T });
        let mut snap = Snapshot::from_state(&grid, &s, eps);
        snap.config_hash = Some("abc123".into());
        let mut bytes = Vec::new();
        snap.write(&mut bytes).unwrap();
        let back = Snapshot::read(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back, &snap);
        prop_assert_eq!(back.grid().unwrap(), grid);
        prop_assert_eq!(back.to_state().unwrap(), s);
    }
}

#[test]
fn nfld_rejects_damaged_files() {
    let grid = Grid::new(1, 8, 1.0).unwrap();
    let snap = Snapshot::from_state(&grid, &state(&grid, &[0.5], Frame::T), 0.1);
    let mut bytes = Vec::new();
    snap.write(&mut bytes).unwrap();
    assert!(Snapshot::read(&bytes[..bytes.len() - 8]).is_err());
    let mut wrong = bytes.clone();
    wrong[4] = b'2';
    assert!(Snapshot::read(wrong.as_slice()).is_err());
    let text = String::from_utf8_lossy(&bytes[..40]).replace("version 1", "version 9");
    let mut v9 = text.into_bytes();
    v9.extend_from_slice(&bytes[40..]);
    assert!(Snapshot::read(v9.as_slice()).is_err());
}

#[test]
fn diagnostics_csv_round_trip() {
    let records: Vec<DiagnosticsRecord> = (0..5)
        .map(|i| DiagnosticsRecord {
            step: 10 * i,
            time: 0.1 * i as f64 + 1e-17,
            mass: 1.0 / (i + 3) as f64,
            hamiltonian: -std::f64::consts::PI * i as f64,
            error_vs_ref: (i % 2 == 1).then_some(1e-9 * i as f64),
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_diagnostics(&path, "schema_version=1 config=00", &records).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version=1 config=00"));
    assert_eq!(lines.next(), Some("step,time,mass,hamiltonian,error_vs_ref"));
    assert_eq!(read_diagnostics(&path).unwrap(), records);
    assert_eq!(diagnostics_csv("x", &records).unwrap(), diagnostics_csv("x", &records).unwrap());
}

#[test]
fn config_hash_is_stable_and_sensitive() {
    let a = serde_json::json!({ "a": 1, "b": [0.5, 2.0] });
    let b = serde_json::json!({ "a": 1, "b": [0.5, 2.5] });
    let h = config_hash(&a).unwrap();
    assert_eq!(h.len(), 64);
    assert_eq!(h, config_hash(&a).unwrap());
    assert_ne!(h, config_hash(&b).unwrap());
}
