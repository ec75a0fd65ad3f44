//! JSON file formats for vessels, signatures, matrix functions, constant
//! matrices and pole data. Complex entries are `[re, im]` pairs printed with
//! 17 significant digits, so a save/load cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Number, Value};
use vessel_core::numgrid::linalg::{self, CMat};
use vessel_core::numgrid::{MatFn, TimeGrid, DEFAULT_COND_LIMIT};
use vessel_core::realize::PoleChain;
use vessel_core::vesselcore::{verify_vessel, DiffVessel, Signature};
use vessel_core::{Complex64, VesselError};

use crate::error::{LabError, LabResult};

pub const FORMAT_VERSION: &str = "vessel-lab/1";

/// Real number that serializes as `{:.16e}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite value {}", self.0)));
        }
        Number::from_str(&fmt_real(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Real)
    }
}

pub type Entry = [Real; 2];
/// One row-major entry list per grid node.
pub type Samples = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_start: Real,
    pub t_end: Real,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselDims {
    pub state: usize,
    pub input: usize,
    pub output: usize,
    pub aux_in: usize,
    pub aux_out: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureBlocks {
    pub sigma1: Samples,
    pub sigma2: Samples,
    pub gamma: Samples,
    pub sigma1s: Samples,
    pub sigma2s: Samples,
    pub gammas: Samples,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselBlocks {
    #[serde(rename = "A1")]
    pub a1: Samples,
    #[serde(rename = "A2")]
    pub a2: Samples,
    #[serde(rename = "B")]
    pub b: Samples,
    #[serde(rename = "C")]
    pub c: Samples,
    #[serde(rename = "D")]
    pub d: Samples,
    #[serde(rename = "Dt")]
    pub dt: Samples,
    pub sigma1: Samples,
    pub sigma2: Samples,
    pub gamma: Samples,
    pub sigma1s: Samples,
    pub sigma2s: Samples,
    pub gammas: Samples,
}

impl VesselBlocks {
    fn signature_blocks(&self) -> SignatureBlocks {
        SignatureBlocks {
            sigma1: self.sigma1.clone(),
            sigma2: self.sigma2.clone(),
            gamma: self.gamma.clone(),
            sigma1s: self.sigma1s.clone(),
            sigma2s: self.sigma2s.clone(),
            gammas: self.gammas.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselFile {
    pub format_version: String,
    pub dims: VesselDims,
    pub grid: GridSpec,
    pub matrices: VesselBlocks,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureDims {
    pub input: usize,
    pub output: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureFile {
    pub format_version: String,
    pub dims: SignatureDims,
    pub grid: GridSpec,
    pub matrices: SignatureBlocks,
}

/// A matrix function of t₂, e.g. a gauge T or a feedthrough D.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatFnFile {
    pub format_version: String,
    pub rows: usize,
    pub cols: usize,
    pub grid: GridSpec,
    pub samples: Samples,
}

/// A constant matrix, e.g. an initial input vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub format_version: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleBlock {
    pub z: Entry,
    pub order: usize,
    /// Output chain c₀, …, c_{order−1}; each a column of length `dims.output`.
    pub out_chain: Vec<Samples>,
    /// Input chain b₀, …, b_{order−1}; each a column of length `dims.input`.
    pub in_chain: Vec<Samples>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleDataFile {
    pub format_version: String,
    pub dims: SignatureDims,
    pub grid: GridSpec,
    pub poles: Vec<PoleBlock>,
}

fn entry(z: Complex64) -> Entry {
    [Real(z.re), Real(z.im)]
}

fn complex(e: &Entry) -> Complex64 {
    Complex64::new(e[0].0, e[1].0)
}

fn matrix_entries(m: &CMat) -> Vec<Entry> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(entry(m[(i, j)]));
        }
    }
    out
}

fn matrix_from(name: &str, rows: usize, cols: usize, entries: &[Entry]) -> LabResult<CMat> {
    if entries.len() != rows * cols {
        return Err(LabError::Format(format!(
            "block {name}: expected {rows}x{cols} = {} entries, found {}",
            rows * cols,
            entries.len()
        )));
    }
    let vals: Vec<Complex64> = entries.iter().map(complex).collect();
    Ok(linalg::from_rows(rows, cols, &vals))
}

pub fn samples_of(f: &MatFn) -> Samples {
    f.samples().iter().map(matrix_entries).collect()
}

fn grid_spec(g: &TimeGrid) -> GridSpec {
    GridSpec { t_start: Real(g.t_start()), t_end: Real(g.t_end()), points: g.points() }
}

fn grid_from(spec: &GridSpec) -> LabResult<TimeGrid> {
    TimeGrid::new(spec.t_start.0, spec.t_end.0, spec.points).map_err(|e| LabError::Format(format!("grid: {e}")))
}

fn matfn_from(name: &str, grid: TimeGrid, shape: (usize, usize), samples: &Samples) -> LabResult<MatFn> {
    if samples.len() != grid.points() {
        return Err(LabError::Format(format!(
            "block {name}: expected {} node samples, found {}",
            grid.points(),
            samples.len()
        )));
    }
    let mats = samples
        .iter()
        .map(|s| matrix_from(name, shape.0, shape.1, s))
        .collect::<LabResult<Vec<_>>>()?;
    MatFn::from_samples(grid, mats).map_err(|e| LabError::Format(format!("block {name}: {e}")))
}

fn check_version(v: &str) -> LabResult<()> {
    if v != FORMAT_VERSION {
        return Err(LabError::Format(format!("unsupported format_version {v:?}, expected {FORMAT_VERSION:?}")));
    }
    Ok(())
}

fn signature_blocks(s: &Signature) -> SignatureBlocks {
    SignatureBlocks {
        sigma1: samples_of(&s.sigma1),
        sigma2: samples_of(&s.sigma2),
        gamma: samples_of(&s.gamma),
        sigma1s: samples_of(&s.sigma1s),
        sigma2s: samples_of(&s.sigma2s),
        gammas: samples_of(&s.gammas),
    }
}

fn signature_from(grid: TimeGrid, e: usize, es: usize, b: &SignatureBlocks) -> LabResult<Signature> {
    let sig = Signature::new(
        matfn_from("sigma1", grid, (e, e), &b.sigma1)?,
        matfn_from("sigma2", grid, (e, e), &b.sigma2)?,
        matfn_from("gamma", grid, (e, e), &b.gamma)?,
        matfn_from("sigma1s", grid, (es, es), &b.sigma1s)?,
        matfn_from("sigma2s", grid, (es, es), &b.sigma2s)?,
        matfn_from("gammas", grid, (es, es), &b.gammas)?,
    )?;
    Ok(sig)
}

impl VesselFile {
    pub fn from_vessel(v: &DiffVessel) -> Self {
        let n = v.state_dim();
        VesselFile {
            format_version: FORMAT_VERSION.to_string(),
            dims: VesselDims {
                state: n,
                input: v.input_dim(),
                output: v.output_dim(),
                aux_in: v.input_dim(),
                aux_out: v.output_dim(),
            },
            grid: grid_spec(v.grid()),
            matrices: VesselBlocks {
                a1: samples_of(&v.a1),
                a2: samples_of(&v.a2),
                b: samples_of(&v.bt),
                c: samples_of(&v.c),
                d: samples_of(&v.d),
                dt: samples_of(&v.dt),
                sigma1: samples_of(&v.sig.sigma1),
                sigma2: samples_of(&v.sig.sigma2),
                gamma: samples_of(&v.sig.gamma),
                sigma1s: samples_of(&v.sig.sigma1s),
                sigma2s: samples_of(&v.sig.sigma2s),
                gammas: samples_of(&v.sig.gammas),
            },
        }
    }

    pub fn to_vessel(&self) -> LabResult<DiffVessel> {
        check_version(&self.format_version)?;
        let dims = &self.dims;
        if dims.aux_in != dims.input || dims.aux_out != dims.output {
            return Err(LabError::Format(format!(
                "dims: aux_in/aux_out ({}, {}) must equal input/output ({}, {})",
                dims.aux_in, dims.aux_out, dims.input, dims.output
            )));
        }
        let grid = grid_from(&self.grid)?;
        let (n, e, es) = (dims.state, dims.input, dims.output);
        let m = &self.matrices;
        let sig = signature_from(grid, e, es, &m.signature_blocks())?;
        Ok(DiffVessel::new(
            matfn_from("A1", grid, (n, n), &m.a1)?,
            matfn_from("A2", grid, (n, n), &m.a2)?,
            matfn_from("B", grid, (n, e), &m.b)?,
            matfn_from("C", grid, (es, n), &m.c)?,
            matfn_from("D", grid, (es, e), &m.d)?,
            matfn_from("Dt", grid, (es, e), &m.dt)?,
            sig,
        )?)
    }
}

impl SignatureFile {
    pub fn from_signature(s: &Signature) -> Self {
        SignatureFile {
            format_version: FORMAT_VERSION.to_string(),
            dims: SignatureDims { input: s.input_dim(), output: s.output_dim() },
            grid: grid_spec(s.grid()),
            matrices: signature_blocks(s),
        }
    }

    pub fn to_signature(&self) -> LabResult<Signature> {
        check_version(&self.format_version)?;
        signature_from(grid_from(&self.grid)?, self.dims.input, self.dims.output, &self.matrices)
    }
}

impl MatFnFile {
    pub fn from_matfn(f: &MatFn) -> Self {
        MatFnFile {
            format_version: FORMAT_VERSION.to_string(),
            rows: f.rows(),
            cols: f.cols(),
            grid: grid_spec(f.grid()),
            samples: samples_of(f),
        }
    }

    pub fn to_matfn(&self) -> LabResult<MatFn> {
        check_version(&self.format_version)?;
        matfn_from("samples", grid_from(&self.grid)?, (self.rows, self.cols), &self.samples)
    }
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        MatrixFile {
            format_version: FORMAT_VERSION.to_string(),
            rows: m.nrows(),
            cols: m.ncols(),
            entries: matrix_entries(m),
        }
    }

    pub fn to_matrix(&self) -> LabResult<CMat> {
        check_version(&self.format_version)?;
        matrix_from("entries", self.rows, self.cols, &self.entries)
    }
}

impl PoleDataFile {
    pub fn from_chains(chains: &[PoleChain]) -> LabResult<Self> {
        let first = chains
            .first()
            .and_then(|c| c.out_chain.first().zip(c.in_chain.first()))
            .ok_or_else(|| LabError::Format("pole data needs at least one nonempty chain".into()))?;
        let grid = *first.0.grid();
        Ok(PoleDataFile {
            format_version: FORMAT_VERSION.to_string(),
            dims: SignatureDims { input: first.1.rows(), output: first.0.rows() },
            grid: grid_spec(&grid),
            poles: chains
                .iter()
                .map(|c| PoleBlock {
                    z: entry(c.z),
                    order: c.order(),
                    out_chain: c.out_chain.iter().map(samples_of).collect(),
                    in_chain: c.in_chain.iter().map(samples_of).collect(),
                })
                .collect(),
        })
    }

    pub fn to_chains(&self) -> LabResult<Vec<PoleChain>> {
        check_version(&self.format_version)?;
        let grid = grid_from(&self.grid)?;
        let mut out = Vec::with_capacity(self.poles.len());
        for (p, block) in self.poles.iter().enumerate() {
            if block.out_chain.len() != block.order || block.in_chain.len() != block.order {
                return Err(LabError::Format(format!(
                    "pole {p}: order {} but chains of length {} and {}",
                    block.order,
                    block.out_chain.len(),
                    block.in_chain.len()
                )));
            }
            let side = |name: &str, rows: usize, chain: &[Samples]| {
                chain
                    .iter()
                    .enumerate()
                    .map(|(i, s)| matfn_from(&format!("pole {p} {name}[{i}]"), grid, (rows, 1), s))
                    .collect::<LabResult<Vec<_>>>()
            };
            out.push(PoleChain {
                z: complex(&block.z),
                out_chain: side("out_chain", self.dims.output, &block.out_chain)?,
                in_chain: side("in_chain", self.dims.input, &block.in_chain)?,
            });
        }
        Ok(out)
    }
}

/// Pretty JSON where arrays holding only numbers or number arrays stay on one
/// line, so each node sample of a block reads as one row.
pub fn to_json_text<T: Serialize>(value: &T) -> LabResult<String> {
    let v = serde_json::to_value(value).map_err(|e| LabError::Format(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn is_leafy(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| match x {
            Value::Number(_) => true,
            Value::Array(inner) => inner.iter().all(Value::is_number),
            _ => false,
        }),
        _ => false,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
        Value::Array(items) if !items.is_empty() && !is_leafy(v) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        other => out.push_str(&other.to_string()),
    }
}

fn read_text(path: &Path) -> LabResult<String> {
    std::fs::read_to_string(path).map_err(|source| LabError::Io { path: path.to_path_buf(), source })
}

/// Byte offset of a 1-based (line, column) position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    before + column.saturating_sub(1)
}

pub fn parse_text<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> LabResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        LabError::Parse {
            path: path.to_path_buf(),
            offset: byte_offset(text, line, column),
            line,
            column,
            message: e.to_string(),
        }
    })
}

pub fn read_file<T: for<'de> Deserialize<'de>>(path: &Path) -> LabResult<T> {
    parse_text(path, &read_text(path)?)
}

pub fn write_file<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let text = to_json_text(value)?;
    std::fs::write(path, text).map_err(|source| LabError::Io { path: path.to_path_buf(), source })
}

/// A loaded vessel and the warnings raised while checking it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub vessel: DiffVessel,
    pub warnings: Vec<String>,
}

/// Warnings for a vessel that parsed but may be numerically unusable.
pub fn vessel_warnings(v: &DiffVessel, tol: f64) -> Vec<String> {
    let mut warnings = Vec::new();
    for (name, f) in [("sigma1", &v.sig.sigma1), ("sigma1s", &v.sig.sigma1s)] {
        if let Err(VesselError::Invertibility { node, cond, .. }) = f.check_invertible(name, DEFAULT_COND_LIMIT) {
            warnings.push(format!(
                "{name} is not invertible at node {node} (t2 = {}, condition number {cond:e})",
                fmt_real(v.grid().node(node))
            ));
        }
    }
    let report = verify_vessel(v, tol);
    for (name, r) in report.named() {
        if !(r <= tol) {
            warnings.push(format!("{name} residual {} exceeds {}", fmt_real(r), fmt_real(tol)));
        }
    }
    warnings
}

pub fn load_vessel_with_tol(path: &Path, tol: f64) -> LabResult<Loaded> {
    let file: VesselFile = read_file(path)?;
    let vessel = map_format(path, file.to_vessel())?;
    let warnings = vessel_warnings(&vessel, tol);
    Ok(Loaded { vessel, warnings })
}

/// Reads a vessel file and checks its axioms at the default tolerance.
pub fn load_vessel(path: &Path) -> LabResult<Loaded> {
    load_vessel_with_tol(path, vessel_core::vesselcore::DEFAULT_TOL)
}

pub fn save_vessel(path: &Path, v: &DiffVessel) -> LabResult<()> {
    write_file(path, &VesselFile::from_vessel(v))
}

fn map_format<T>(path: &Path, r: LabResult<T>) -> LabResult<T> {
    r.map_err(|e| match e {
        LabError::Numeric(inner) => LabError::Format(format!("{}: {inner}", path.display())),
        LabError::Format(msg) => LabError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn load_signature(path: &Path) -> LabResult<Signature> {
    map_format(path, read_file::<SignatureFile>(path)?.to_signature())
}

pub fn load_matfn(path: &Path) -> LabResult<MatFn> {
    map_format(path, read_file::<MatFnFile>(path)?.to_matfn())
}

pub fn load_matrix(path: &Path) -> LabResult<CMat> {
    map_format(path, read_file::<MatrixFile>(path)?.to_matrix())
}

pub fn load_poles(path: &Path) -> LabResult<Vec<PoleChain>> {
    map_format(path, read_file::<PoleDataFile>(path)?.to_chains())
}
