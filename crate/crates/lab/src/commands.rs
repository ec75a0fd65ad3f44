//! Subcommands of the `vessel-lab` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use vessel_core::numgrid::linalg::CMat;
use vessel_core::numgrid::TimeGrid;
use vessel_core::realize::realize_mittag_leffler;
use vessel_core::simulate2d::{pde_residuals, separated_trajectory};
use vessel_core::structure::{equivalent, kalman_decompose};
use vessel_core::vesselcore::{transfer, verify_vessel, DiffVessel, DEFAULT_TOL};
use vessel_core::vesselops::{adjoint, cascade, gauge_transform, invert};
use vessel_core::{fixtures, population, Complex64, VesselError};

use crate::error::{LabError, LabResult};
use crate::formats::{self, fmt_real, Loaded};

#[derive(Debug, Parser)]
#[command(name = "vessel-lab", version, about = "Differential vessels from the command line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Axiom residuals of a vessel; exit 1 if any exceeds the tolerance.
    Verify {
        vessel: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Transfer function on a line of λ values and a set of t₂ samples, as CSV.
    Transfer {
        vessel: PathBuf,
        /// Real parts as START:END:COUNT.
        #[arg(long, allow_hyphen_values = true)]
        lambda_grid: String,
        /// Common imaginary part of the λ values.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        im: f64,
        #[arg(long, default_value_t = 1)]
        t2_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cascade connection of two vessels.
    Cascade {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inverse vessel.
    Invert {
        vessel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adjoint vessel.
    Adjoint {
        vessel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gauge transform by an invertible matrix function T.
    Gauge {
        vessel: PathBuf,
        #[arg(long = "T")]
        t: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kalman block dimensions and the minimal sub-vessel.
    Kalman {
        vessel: PathBuf,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exit 0 if two vessels have the same transfer function, 1 if not.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 5)]
        t2_samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Vessel from pole chains, a signature and a feedthrough D.
    Realize {
        #[arg(long)]
        poles: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long = "D")]
        d: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Separated trajectory on a t₁ × t₂ grid as CSV, with PDE residuals.
    Simulate {
        vessel: PathBuf,
        /// λ as RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        u0: PathBuf,
        /// t₁ grid as START:END:POINTS.
        #[arg(long, default_value = "0:0.5:33", allow_hyphen_values = true)]
        t1: String,
        /// t₂ grid as START:END:POINTS.
        #[arg(long, default_value = "0:0.5:33", allow_hyphen_values = true)]
        t2: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a reference vessel: v0, va, vg or vc2.
    Fixture {
        name: String,
        /// Pole of va or gain of vg.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        param: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a random vessel with simple poles in the unit disc.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        input_dim: usize,
        #[arg(long, default_value_t = 2)]
        max_poles: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

fn parse_num(s: &str, what: &str) -> LabResult<f64> {
    s.trim().parse::<f64>().map_err(|_| usage(format!("{what}: cannot parse {s:?} as a number")))
}

/// `START:END:COUNT`.
pub fn parse_range(s: &str, what: &str) -> LabResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("{what}: expected START:END:COUNT, got {s:?}")));
    }
    let count = parts[2].trim().parse::<usize>().map_err(|_| usage(format!("{what}: bad count {:?}", parts[2])))?;
    if count == 0 {
        return Err(usage(format!("{what}: count must be positive")));
    }
    Ok((parse_num(parts[0], what)?, parse_num(parts[1], what)?, count))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * (k as f64 / (n - 1) as f64) }).collect()
}

fn parse_grid(s: &str, what: &str) -> LabResult<TimeGrid> {
    let (a, b, n) = parse_range(s, what)?;
    TimeGrid::new(a, b, n).map_err(|e| usage(format!("{what}: {e}")))
}

fn parse_complex(s: &str) -> LabResult<Complex64> {
    let (re, im) = s.split_once(',').ok_or_else(|| usage(format!("lambda: expected RE,IM, got {s:?}")))?;
    Ok(Complex64::new(parse_num(re, "lambda")?, parse_num(im, "lambda")?))
}

fn load(path: &Path, tol: f64) -> LabResult<DiffVessel> {
    let Loaded { vessel, warnings } = formats::load_vessel_with_tol(path, tol)?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(vessel)
}

fn load_default(path: &Path) -> LabResult<DiffVessel> {
    load(path, DEFAULT_TOL)
}

fn entry_header(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut h = Vec::with_capacity(2 * rows * cols);
    for i in 1..=rows {
        for j in 1..=cols {
            h.push(format!("{prefix}{i}{j}_re"));
            h.push(format!("{prefix}{i}{j}_im"));
        }
    }
    h
}

fn push_entries(record: &mut Vec<String>, m: &CMat) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            record.push(fmt_real(m[(i, j)].re));
            record.push(fmt_real(m[(i, j)].im));
        }
    }
}

fn write_csv(out: Option<&Path>, header: Vec<String>, rows: Vec<Vec<String>>) -> LabResult<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(
            std::fs::File::create(p).map_err(|source| LabError::Io { path: p.to_path_buf(), source })?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let io_err = |e: csv::Error| LabError::Io {
        path: out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<stdout>")),
        source: std::io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    w.flush().map_err(|e| io_err(e.into()))?;
    Ok(())
}

fn write_vessel(out: &Path, v: &DiffVessel) -> LabResult<()> {
    formats::save_vessel(out, v)?;
    println!("wrote {} (state {}, input {}, output {})", out.display(), v.state_dim(), v.input_dim(), v.output_dim());
    Ok(())
}

fn verify(path: &Path, tol: f64) -> LabResult<i32> {
    let v = load(path, f64::INFINITY)?;
    let r = verify_vessel(&v, tol);
    println!("nodes {}", v.grid().points());
    println!("tol {}", fmt_real(tol));
    for (name, val) in r.named() {
        println!("{name} {}", fmt_real(val));
    }
    println!("max {}", fmt_real(r.max_over_grid));
    println!("worst_node {}", r.worst_node());
    println!("result {}", if r.pass { "PASS" } else { "FAIL" });
    Ok(if r.pass { 0 } else { 1 })
}

fn transfer_table(path: &Path, grid: &str, im: f64, t2_samples: usize, out: Option<&Path>) -> LabResult<i32> {
    let v = load_default(path)?;
    let (a, b, n) = parse_range(grid, "lambda-grid")?;
    if t2_samples == 0 {
        return Err(usage("t2-samples must be positive"));
    }
    let points: Vec<(f64, Complex64)> = v
        .grid()
        .samples(t2_samples)
        .into_iter()
        .flat_map(|t| linspace(a, b, n).into_iter().map(move |re| (t, Complex64::new(re, im))))
        .collect();
    let values = points
        .par_iter()
        .map(|&(t, l)| transfer(&v, l, t))
        .collect::<Result<Vec<_>, VesselError>>()?;
    let mut header = vec!["t2".to_string(), "re_lambda".to_string(), "im_lambda".to_string()];
    header.extend(entry_header("s", v.output_dim(), v.input_dim()));
    let rows = points
        .iter()
        .zip(&values)
        .map(|(&(t, l), s)| {
            let mut r = vec![fmt_real(t), fmt_real(l.re), fmt_real(l.im)];
            push_entries(&mut r, s);
            r
        })
        .collect();
    write_csv(out, header, rows)?;
    Ok(0)
}

fn kalman(path: &Path, t2: f64, out: Option<&Path>) -> LabResult<i32> {
    let v = load_default(path)?;
    let k = kalman_decompose(&v, t2)?;
    let d = k.dims();
    println!("base_time {}", fmt_real(k.base_time));
    println!("c_obar {}", d[0]);
    println!("co {}", d[1]);
    println!("cbar_obar {}", d[2]);
    println!("cbar_o {}", d[3]);
    println!("triangularity_defect {}", fmt_real(k.triangularity_defect()));
    if let Some(p) = out {
        write_vessel(p, &k.minimal)?;
    }
    Ok(0)
}

fn equiv(a: &Path, b: &Path, t2_samples: usize, tol: f64) -> LabResult<i32> {
    let (v1, v2) = (load_default(a)?, load_default(b)?);
    let same = equivalent(&v1, &v2, t2_samples, tol)?;
    println!("{}", if same { "equivalent" } else { "not equivalent" });
    Ok(if same { 0 } else { 1 })
}

fn realize(poles: &Path, sig: &Path, d: &Path, out: &Path) -> LabResult<i32> {
    let chains = formats::load_poles(poles)?;
    let sig = formats::load_signature(sig)?;
    let d = formats::load_matfn(d)?;
    let triples = chains
        .par_iter()
        .map(|c| c.to_triple())
        .collect::<Result<Vec<_>, VesselError>>()?;
    let v = realize_mittag_leffler(&triples, &d, &sig)?;
    write_vessel(out, &v)?;
    Ok(0)
}

fn simulate(path: &Path, lambda: &str, u0: &Path, t1: &str, t2: &str, out: &Path) -> LabResult<i32> {
    let v = load_default(path)?;
    let lambda = parse_complex(lambda)?;
    let u0 = formats::load_matrix(u0)?;
    let (g1, g2) = (parse_grid(t1, "t1")?, parse_grid(t2, "t2")?);
    let traj = separated_trajectory(&v, lambda, &u0, g1, g2)?;
    let mut header = vec!["t1".to_string(), "t2".to_string()];
    header.extend(entry_header("u", v.input_dim(), 1));
    header.extend(entry_header("x", v.state_dim(), 1));
    header.extend(entry_header("y", v.output_dim(), 1));
    let mut rows = Vec::with_capacity(traj.len());
    for (i, s1) in g1.nodes().into_iter().enumerate() {
        for (j, s2) in g2.nodes().into_iter().enumerate() {
            let k = traj.index(i, j);
            let mut r = vec![fmt_real(s1), fmt_real(s2)];
            push_entries(&mut r, &traj.u[k]);
            push_entries(&mut r, &traj.x[k]);
            push_entries(&mut r, &traj.y[k]);
            rows.push(r);
        }
    }
    write_csv(Some(out), header, rows)?;
    let res = pde_residuals(&v, &traj)?;
    for (name, val) in res.named() {
        println!("{name} {}", fmt_real(val));
    }
    println!("max {}", fmt_real(res.max()));
    Ok(0)
}

fn fixture(name: &str, param: f64, out: &Path) -> LabResult<i32> {
    let v = match name {
        "v0" => fixtures::v0(),
        "va" => fixtures::va(param),
        "vg" => fixtures::vg(param),
        "vc2" => fixtures::vc2(),
        other => return Err(usage(format!("unknown fixture {other:?}; expected v0, va, vg or vc2"))),
    };
    write_vessel(out, &v)?;
    Ok(0)
}

fn random(seed: u64, input_dim: usize, max_poles: usize, out: &Path) -> LabResult<i32> {
    if input_dim == 0 || max_poles == 0 {
        return Err(usage("input-dim and max-poles must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = population::random_signature(&mut rng, TimeGrid::unit(), input_dim);
    let v = population::random_vessel(&mut rng, &sig, max_poles)?;
    write_vessel(out, &v)?;
    Ok(0)
}

/// Runs one parsed command and returns its exit code.
pub fn run(cli: Cli) -> LabResult<i32> {
    match cli.command {
        Command::Verify { vessel, tol } => verify(&vessel, tol),
        Command::Transfer { vessel, lambda_grid, im, t2_samples, out } => {
            transfer_table(&vessel, &lambda_grid, im, t2_samples, out.as_deref())
        }
        Command::Cascade { first, second, out } => {
            write_vessel(&out, &cascade(&load_default(&first)?, &load_default(&second)?)?)?;
            Ok(0)
        }
        Command::Invert { vessel, out } => {
            write_vessel(&out, &invert(&load_default(&vessel)?)?)?;
            Ok(0)
        }
        Command::Adjoint { vessel, out } => {
            write_vessel(&out, &adjoint(&load_default(&vessel)?)?)?;
            Ok(0)
        }
        Command::Gauge { vessel, t, out } => {
            let v = load_default(&vessel)?;
            write_vessel(&out, &gauge_transform(&v, &formats::load_matfn(&t)?)?)?;
            Ok(0)
        }
        Command::Kalman { vessel, t2, out } => kalman(&vessel, t2, out.as_deref()),
        Command::Equiv { first, second, t2_samples, tol } => equiv(&first, &second, t2_samples, tol),
        Command::Realize { poles, sig, d, out } => realize(&poles, &sig, &d, &out),
        Command::Simulate { vessel, lambda, u0, t1, t2, out } => simulate(&vessel, &lambda, &u0, &t1, &t2, &out),
        Command::Fixture { name, param, out } => fixture(&name, param, &out),
        Command::Random { seed, input_dim, max_poles, out } => random(seed, input_dim, max_poles, &out),
    }
}

/// Full entry point: thread setup, argument parsing and exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("VESSEL_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("VESSEL_LAB_THREADS must be a positive integer, got {raw:?}"))?;
    // A second call in the same process finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("2:2:1", "x").unwrap(), (2.0, 2.0, 1));
        assert_eq!(parse_range("-1:3:5", "x").unwrap(), (-1.0, 3.0, 5));
        assert!(parse_range("1:2", "x").is_err());
        assert!(parse_range("1:2:0", "x").is_err());
    }

    #[test]
    fn linspace_hits_both_ends() {
        assert_eq!(linspace(2.0, 2.0, 1), vec![2.0]);
        let xs = linspace(0.0, 1.0, 4);
        assert_eq!(xs.len(), 4);
        assert_eq!(xs[3], 1.0);
    }

    #[test]
    fn complex_argument_parses() {
        assert_eq!(parse_complex("2,-0.5").unwrap(), Complex64::new(2.0, -0.5));
        assert!(parse_complex("2").is_err());
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(main_with_args(["vessel-lab", "verify", "x.json", "--bogus"]), 2);
    }
}
