use std::path::Path;

use serde_json::Value;
use vessel_core::numgrid::linalg::{c, from_rows};
use vessel_core::numgrid::{MatFn, TimeGrid};
use vessel_core::realize::PoleChain;
use vessel_core::vesselcore::DiffVessel;
use vessel_core::{fixtures, Complex64};
use vessel_lab::formats::{self, MatFnFile, MatrixFile, PoleDataFile, SignatureFile};
use vessel_lab::LabError;

fn bits(f: &MatFn) -> Vec<(u64, u64)> {
    f.samples().iter().flat_map(|m| m.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>()).collect()
}

fn all_blocks(v: &DiffVessel) -> [&MatFn; 12] {
    let s = &v.sig;
    [&v.a1, &v.a2, &v.bt, &v.c, &v.d, &v.dt, &s.sigma1, &s.sigma2, &s.gamma, &s.sigma1s, &s.sigma2s, &s.gammas]
}

fn edit_json(src: &Path, dst: &Path, f: impl FnOnce(&mut Value)) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(src).unwrap()).unwrap();
    f(&mut v);
    std::fs::write(dst, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

#[test]
fn save_then_load_is_bit_exact_for_every_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for (name, v) in fixtures::all() {
        let p = dir.path().join("v.json");
        formats::save_vessel(&p, &v).unwrap();
        let loaded = formats::load_vessel(&p).unwrap();
        assert!(loaded.warnings.is_empty(), "{name}: {:?}", loaded.warnings);
        for (a, b) in all_blocks(&v).iter().zip(all_blocks(&loaded.vessel)) {
            assert_eq!(bits(a), bits(b), "{name}");
        }
        // Writing the loaded vessel again reproduces the file byte for byte.
        let p2 = dir.path().join("v2.json");
        formats::save_vessel(&p2, &loaded.vessel).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap(), "{name}");
    }
}

#[test]
fn awkward_values_round_trip() {
    let g = TimeGrid::new(0.0, 1.0, 5).unwrap();
    let vals = [0.1, -1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -0.0, 5e-324, std::f64::consts::PI];
    let f = MatFn::from_fn(g, |t| from_rows(1, 2, &[c(vals[(t * 4.0) as usize], t), c(1.0 / (1.0 + t), vals[6])]))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    formats::write_file(&p, &MatFnFile::from_matfn(&f)).unwrap();
    let back = formats::load_matfn(&p).unwrap();
    assert_eq!(bits(&f), bits(&back));
}

#[test]
fn wrong_node_count_names_the_block() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("v0.json");
    let bad = dir.path().join("bad.json");
    formats::save_vessel(&good, &fixtures::v0()).unwrap();
    edit_json(&good, &bad, |v| {
        v["matrices"]["A1"].as_array_mut().unwrap().pop();
    });
    let err = formats::load_vessel(&bad).unwrap_err();
    assert!(matches!(err, LabError::Format(_)), "{err:?}");
    assert!(err.to_string().contains("A1"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn wrong_entry_count_names_the_block() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("v0.json");
    let bad = dir.path().join("bad.json");
    formats::save_vessel(&good, &fixtures::v0()).unwrap();
    edit_json(&good, &bad, |v| {
        v["matrices"]["gammas"][3].as_array_mut().unwrap().push(serde_json::json!([0.0, 0.0]));
    });
    let err = formats::load_vessel(&bad).unwrap_err();
    assert!(err.to_string().contains("gammas"), "{err}");
}

#[test]
fn singular_sigma1_warns_with_node() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("v0.json");
    let bad = dir.path().join("bad.json");
    formats::save_vessel(&good, &fixtures::v0()).unwrap();
    edit_json(&good, &bad, |v| {
        v["matrices"]["sigma1"][7] = serde_json::json!([[0.0, 0.0]]);
    });
    let loaded = formats::load_vessel(&bad).unwrap();
    let hit = loaded.warnings.iter().find(|w| w.starts_with("sigma1 ")).expect("sigma1 warning");
    assert!(hit.contains("node 7"), "{hit}");
}

#[test]
fn parse_error_reports_byte_offset() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    let text = "{\n  \"format_version\": \"vessel-lab/1\",\n  \"dims\": oops\n}\n";
    std::fs::write(&p, text).unwrap();
    match formats::load_vessel(&p).unwrap_err() {
        LabError::Parse { offset, line, .. } => {
            assert_eq!(line, 3);
            assert_eq!(&text[offset..offset + 1], "o");
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn unknown_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("v0.json");
    let bad = dir.path().join("bad.json");
    formats::save_vessel(&good, &fixtures::v0()).unwrap();
    edit_json(&good, &bad, |v| v["format_version"] = Value::from("vessel-lab/99"));
    let err = formats::load_vessel(&bad).unwrap_err();
    assert!(err.to_string().contains("format_version"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn grid_violation_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("v0.json");
    let bad = dir.path().join("bad.json");
    formats::save_vessel(&good, &fixtures::v0()).unwrap();
    edit_json(&good, &bad, |v| v["grid"]["t_end"] = serde_json::json!(-1.0));
    let err = formats::load_vessel(&bad).unwrap_err();
    assert!(err.to_string().contains("grid"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn signature_matrix_and_pole_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let v = fixtures::vg(0.5);

    let sp = dir.path().join("sig.json");
    formats::write_file(&sp, &SignatureFile::from_signature(&v.sig)).unwrap();
    let sig = formats::load_signature(&sp).unwrap();
    assert_eq!(bits(&sig.gammas), bits(&v.sig.gammas));

    let mp = dir.path().join("u0.json");
    let m = from_rows(2, 1, &[c(0.25, -1.0), c(1e-17, 3.0)]);
    formats::write_file(&mp, &MatrixFile::from_matrix(&m)).unwrap();
    assert_eq!(formats::load_matrix(&mp).unwrap(), m);

    let chain = PoleChain {
        z: Complex64::new(0.3, -0.2),
        out_chain: vec![v.c.clone()],
        in_chain: vec![v.bt.adjoint()],
    };
    let pp = dir.path().join("poles.json");
    formats::write_file(&pp, &PoleDataFile::from_chains(std::slice::from_ref(&chain)).unwrap()).unwrap();
    let back = formats::load_poles(&pp).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].z, chain.z);
    assert_eq!(bits(&back[0].out_chain[0]), bits(&chain.out_chain[0]));
    assert_eq!(bits(&back[0].in_chain[0]), bits(&chain.in_chain[0]));
}
