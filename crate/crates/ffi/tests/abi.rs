use std::ffi::{CStr, CString};
use std::ptr;

use bubblecut_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bc_last_error()) }.to_string_lossy().into_owned()
}

fn disk_grid(n: usize) -> *mut BcGrid {
    let mut g = ptr::null_mut();
    let h = 2.0 / (n - 1) as f64;
    assert_eq!(unsafe { bc_grid_euclidean(n, n, h, -1.0, -1.0, BcTopology::Plane, &mut g) }, BcStatus::Ok);
    g
}

#[test]
fn disk_bubble_round_trip() {
    let n = 65;
    let g = disk_grid(n);
    let (mut nx, mut ny, mut h) = (0, 0, 0.0);
    assert_eq!(unsafe { bc_grid_dims(g, &mut nx, &mut ny, &mut h) }, BcStatus::Ok);
    assert_eq!((nx, ny), (n, n));

    // φ = 4 inside r < 0.5 makes the disk of radius 0.5 a bubble.
    let vals: Vec<f64> = (0..n * n)
        .map(|k| {
            let (x, y) = (-1.0 + (k % n) as f64 * h, -1.0 + (k / n) as f64 * h);
            if x * x + y * y < 0.3 { 4.0 } else { -4.0 }
        })
        .collect();
    let mut phi = ptr::null_mut();
    assert_eq!(unsafe { bc_field_from_values(g, vals.as_ptr(), vals.len(), &mut phi) }, BcStatus::Ok);
    let mut region = ptr::null_mut();
    let (mut e, mut p) = (0.0, 0.0);
    let st = unsafe { bc_solve_bubble(g, phi, ptr::null(), ptr::null(), BcChoice::Minimal, &mut region, &mut e, &mut p) };
    assert_eq!(st, BcStatus::Ok);
    assert!(e < 0.0 && p > 0.0);
    let mut count = 0;
    assert_eq!(unsafe { bc_region_count(region, &mut count) }, BcStatus::Ok);
    let mut mask = vec![0u8; n * n];
    assert_eq!(unsafe { bc_region_copy_mask(region, mask.as_mut_ptr(), mask.len()) }, BcStatus::Ok);
    assert_eq!(mask.iter().filter(|&&b| b == 1).count(), count);

    let mut sd = ptr::null_mut();
    assert_eq!(unsafe { bc_signed_distance(g, region, &mut sd) }, BcStatus::Ok);
    let mut out = vec![0.0; n * n];
    assert_eq!(unsafe { bc_field_copy_values(sd, out.as_mut_ptr(), out.len()) }, BcStatus::Ok);
    assert!(out[n * n / 2] < 0.0 && out[0] > 0.0);

    unsafe {
        bc_field_free(sd);
        bc_region_free(region);
        bc_field_free(phi);
        bc_grid_free(g);
    }
}

#[test]
fn verify_paraboloid() {
    let n = 41;
    let g = disk_grid(n);
    let h = 2.0 / (n - 1) as f64;
    let f: Vec<f64> = (0..n * n)
        .map(|k| {
            let (x, y) = (-1.0 + (k % n) as f64 * h, -1.0 + (k / n) as f64 * h);
            x * x + y * y
        })
        .collect();
    let zero = vec![0.0; n * n];
    let (mut ff, mut zz) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(bc_field_from_values(g, f.as_ptr(), f.len(), &mut ff), BcStatus::Ok);
        assert_eq!(bc_field_from_values(g, zero.as_ptr(), zero.len(), &mut zz), BcStatus::Ok);
        let (mut pass, mut m) = (0, 0.0);
        assert_eq!(bc_verify_mean_convex(g, ff, zz, 1e-3, &mut pass, &mut m), BcStatus::Ok);
        assert_eq!(pass, 1);
        assert!(m > 0.0);
        bc_field_free(ff);
        bc_field_free(zz);
        bc_grid_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    let st = unsafe { bc_grid_euclidean(2, 2, 0.1, 0.0, 0.0, BcTopology::Plane, &mut g) };
    assert_eq!(st, BcStatus::Geometry);
    assert!(g.is_null());
    assert!(last_error().starts_with("geometry: invalid grid"), "{}", last_error());

    assert_eq!(unsafe { bc_grid_euclidean(8, 8, 0.1, 0.0, 0.0, BcTopology::Plane, ptr::null_mut()) }, BcStatus::NullArgument);

    let g = disk_grid(9);
    let short = [0u8; 5];
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { bc_region_from_mask(g, short.as_ptr(), short.len(), &mut r) }, BcStatus::InvalidArgument);
    unsafe { bc_grid_free(g) };

    let bad = CString::new(r#"{"name":"poincare_disk","n":16,"half_width":1.2}"#).unwrap();
    let mut g2 = ptr::null_mut();
    assert_eq!(unsafe { bc_grid_from_json(bad.as_ptr(), &mut g2) }, BcStatus::Io);
    assert!(last_error().contains("degenerate metric"));
}

#[test]
fn run_config_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CString::new(
        r#"{"metric":{"name":"flat_torus","nx":24,"ny":32,"h":0.05},"operation":{"name":"separate"}}"#,
    )
    .unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut code = -1;
    assert_eq!(unsafe { bc_run_config(cfg.as_ptr(), out.as_ptr(), &mut code) }, BcStatus::Ok);
    assert_eq!(code, 0);
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/bubblecut.h");
    let src = include_str!("../src/lib.rs");
    let mut n = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            n += 1;
        }
    }
    assert!(n >= 15);
    assert!(!unsafe { CStr::from_ptr(bc_version()) }.to_bytes().is_empty());
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"bubblecut.h\"\nint main(void) { BcGrid *g = 0; return (int)bc_grid_euclidean(8, 8, 0.1, 0.0, 0.0, BC_TOPOLOGY_PLANE, &g); }\n",
    )
    .unwrap();
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let st = std::process::Command::new(cc).args(["-fsyntax-only", "-Wall", "-Werror", "-I", inc]).arg(&src).status().unwrap();
    assert!(st.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
