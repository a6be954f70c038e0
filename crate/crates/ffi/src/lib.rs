//! C ABI over the bubblecut engine.
//!
//! Grids, regions and fields are opaque heap handles created by the
//! `bc_grid_*`, `bc_*_from_*` and operation functions and released with the
//! matching `bc_*_free`. Every fallible call returns a [`BcStatus`]; on failure the
//! message is kept per thread and can be read with [`bc_last_error`].
//! Masks are `uint8_t` arrays of `nx·ny` entries, row-major with the bottom
//! row first; fields are `double` arrays of the same layout with NaN for
//! undefined nodes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use bubblecut::config::RunConfig;
use bubblecut::convexify::verify_mean_convex;
use bubblecut::cut::{build_cut_graph, minimize_phi_area, CutProblem, MinimizerChoice};
use bubblecut::geometry::signed_distance;
use bubblecut::metrics::{generate_metric, MetricSpec};
use bubblecut::{Error, MetricGrid, Region, ScalarField, Topology};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Geometry = 3,
    Cut = 4,
    Bubble = 5,
    Convexify = 6,
    Io = 7,
    Panic = 8,
}

impl From<&Error> for BcStatus {
    fn from(e: &Error) -> Self {
        match e.module() {
            "geometry" => BcStatus::Geometry,
            "cut" => BcStatus::Cut,
            "bubble" => BcStatus::Bubble,
            "convexify" => BcStatus::Convexify,
            _ => BcStatus::Io,
        }
    }
}

/// Topology codes accepted by [`bc_grid_euclidean`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcTopology {
    Plane = 0,
    Cylinder = 1,
    Torus = 2,
}

/// Which of several minimizers [`bc_solve_bubble`] returns.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcChoice {
    Minimal = 0,
    Maximal = 1,
}

pub struct BcGrid(MetricGrid);
pub struct BcRegion(Region);
pub struct BcField(ScalarField);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(BcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(BcStatus::from(&e), e.qualified())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BcStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            BcStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(BcStatus::NullArgument, "null argument".into())
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(BcStatus::InvalidArgument, msg.into())
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not UTF-8"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, want: usize) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(null());
    }
    if len != want {
        return Err(invalid(format!("buffer has {len} entries, grid has {want}")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, want: usize) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(null());
    }
    if len != want {
        return Err(invalid(format!("buffer has {len} entries, grid has {want}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Flat grid of `nx × ny` nodes with spacing `h` and lower-left node at
/// `(x0, y0)`.
///
/// # Safety
/// `out_grid` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_grid_euclidean(
    nx: usize,
    ny: usize,
    h: f64,
    x0: f64,
    y0: f64,
    topology: BcTopology,
    out_grid: *mut *mut BcGrid,
) -> BcStatus {
    guard(|| {
        let slot = out(out_grid)?;
        let topo = match topology {
            BcTopology::Plane => Topology::Plane,
            BcTopology::Cylinder => Topology::Cylinder,
            BcTopology::Torus => Topology::Torus,
        };
        *slot = boxed(BcGrid(MetricGrid::euclidean(nx, ny, h, [x0, y0], topo)?));
        Ok(())
    })
}

/// Grid from a JSON metric description, e.g.
/// `{"name":"poincare_disk","n":128,"half_width":0.84,"disk_radius":0.8}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_grid` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_grid_from_json(json: *const c_char, out_grid: *mut *mut BcGrid) -> BcStatus {
    guard(|| {
        let slot = out(out_grid)?;
        let spec: MetricSpec = serde_json::from_str(c_str(json)?).map_err(|e| invalid(e.to_string()))?;
        *slot = boxed(BcGrid(generate_metric(&spec)?));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bc_grid_free(grid: *mut BcGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Node counts and spacing of a grid.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_grid_dims(grid: *const BcGrid, nx: *mut usize, ny: *mut usize, h: *mut f64) -> BcStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        *out(nx)? = g.nx();
        *out(ny)? = g.ny();
        *out(h)? = g.h();
        Ok(())
    })
}

/// Region from a mask of `len = nx·ny` bytes; non-zero means inside.
///
/// # Safety
/// `mask` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn bc_region_from_mask(
    grid: *const BcGrid,
    mask: *const u8,
    len: usize,
    out_region: *mut *mut BcRegion,
) -> BcStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        let m = slice(mask, len, g.len())?;
        let slot = out(out_region)?;
        *slot = boxed(BcRegion(Region::from_mask(g, m.iter().map(|&b| b != 0).collect())?));
        Ok(())
    })
}

/// # Safety
/// `region` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bc_region_free(region: *mut BcRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Number of nodes in a region.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_region_count(region: *const BcRegion, count: *mut usize) -> BcStatus {
    guard(|| {
        *out(count)? = borrow(region)?.0.count();
        Ok(())
    })
}

/// Writes the region as 0/1 bytes into `mask[0..len]`.
///
/// # Safety
/// `mask` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bc_region_copy_mask(region: *const BcRegion, mask: *mut u8, len: usize) -> BcStatus {
    guard(|| {
        let r = &borrow(region)?.0;
        let (nx, ny) = r.dims();
        let dst = slice_mut(mask, len, nx * ny)?;
        for (d, &b) in dst.iter_mut().zip(r.mask()) {
            *d = u8::from(b);
        }
        Ok(())
    })
}

/// Field from `len = nx·ny` values; NaN marks undefined nodes.
///
/// # Safety
/// `values` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn bc_field_from_values(
    grid: *const BcGrid,
    values: *const f64,
    len: usize,
    out_field: *mut *mut BcField,
) -> BcStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        let v = slice(values, len, g.len())?;
        let slot = out(out_field)?;
        *slot = boxed(BcField(ScalarField::new(g, v.to_vec())?));
        Ok(())
    })
}

/// # Safety
/// `field` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bc_field_free(field: *mut BcField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Writes the field into `values[0..len]`, NaN where undefined.
///
/// # Safety
/// `values` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bc_field_copy_values(field: *const BcField, values: *mut f64, len: usize) -> BcStatus {
    guard(|| {
        let f = &borrow(field)?.0;
        let (nx, ny) = f.dims();
        let dst = slice_mut(values, len, nx * ny)?;
        for (k, d) in dst.iter_mut().enumerate() {
            *d = f.get(k).unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Global minimizer of perimeter minus the φ-weighted area. `include` and
/// `exclude` may be null.
///
/// # Safety
/// Non-null pointers must be valid handles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_solve_bubble(
    grid: *const BcGrid,
    phi: *const BcField,
    include: *const BcRegion,
    exclude: *const BcRegion,
    choice: BcChoice,
    out_region: *mut *mut BcRegion,
    energy: *mut f64,
    perimeter: *mut f64,
) -> BcStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        let phi = &borrow(phi)?.0;
        let slot = out(out_region)?;
        let e_out = out(energy)?;
        let p_out = out(perimeter)?;
        let graph = build_cut_graph(g)?;
        let mut p = CutProblem::new(&graph, phi.clone());
        if let Some(r) = include.as_ref() {
            p.must_include = r.0.clone();
        }
        if let Some(r) = exclude.as_ref() {
            p.must_exclude = r.0.clone();
        }
        p.choice = match choice {
            BcChoice::Minimal => MinimizerChoice::Minimal,
            BcChoice::Maximal => MinimizerChoice::Maximal,
        };
        let sol = minimize_phi_area(&p)?;
        *e_out = sol.energy;
        *p_out = sol.perimeter;
        *slot = boxed(BcRegion(sol.region));
        Ok(())
    })
}

/// Signed distance to a region, negative inside.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_signed_distance(
    grid: *const BcGrid,
    region: *const BcRegion,
    out_field: *mut *mut BcField,
) -> BcStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        let r = &borrow(region)?.0;
        let slot = out(out_field)?;
        *slot = boxed(BcField(signed_distance(g, r)?));
        Ok(())
    })
}

/// Checks strict mean-curvature convexity of `f` against `phi_target`.
/// `pass` receives 1 or 0.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_verify_mean_convex(
    grid: *const BcGrid,
    f: *const BcField,
    phi_target: *const BcField,
    grad_floor: f64,
    pass: *mut i32,
    min_margin: *mut f64,
) -> BcStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        let rep = verify_mean_convex(g, &borrow(f)?.0, &borrow(phi_target)?.0, grad_floor)?;
        *out(pass)? = i32::from(rep.pass);
        *out(min_margin)? = rep.min_margin;
        Ok(())
    })
}

/// Runs a JSON run configuration, writing artifacts to `out_dir` (or the
/// configured directory when null). `exit_code` receives the CLI exit code
/// of a completed run: 0 clean, 2 verification failed.
///
/// # Safety
/// Strings must be NUL-terminated; `exit_code` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_run_config(config_json: *const c_char, out_dir: *const c_char, exit_code: *mut i32) -> BcStatus {
    guard(|| {
        let cfg = RunConfig::from_json(c_str(config_json)?)?;
        let dir = if out_dir.is_null() { None } else { Some(c_str(out_dir)?) };
        let code = out(exit_code)?;
        *code = bubblecut::run::run(&cfg, dir.map(Path::new), None)?.exit_code;
        Ok(())
    })
}
