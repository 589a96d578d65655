//! `yamabe`: ground states, constants tables, test-function bounds and
//! circle-factor periodic solutions from the command line.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use yamabe_core::functional::PiecewiseLinearProfile;
use yamabe_core::periodic;
use yamabe_core::products::{self, TableControls};
use yamabe_core::report;
use yamabe_core::shooting::DEFAULT_TOL_ALPHA;
use yamabe_core::{find_ground_state, geomconst, gn_value, reference_constants, Dims, Error, IntegrationControls};

#[derive(Parser, Debug)]
#[command(name = "yamabe", version, about = "Gagliardo-Nirenberg constants and Yamabe constants of products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Locate the radial ground state for (m, n) and evaluate the functional on it.
    GroundState {
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Write `t h h'` rows of the profile to PATH.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Constants table for m, n >= 2 and m + n <= --max-dim.
    Table {
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(4..=40))]
        max_dim: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the table to PATH instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Upper bound on the limiting constant from a piecewise-linear test function.
    Bound {
        #[arg(value_parser = clap::value_parser!(u32).range(2..))]
        m: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// `t h` rows; defaults to the bundled (2, 2) test function.
        profile: Option<PathBuf>,
        /// Report whether L falls below this value [default for the bundled
        /// profile: 2.427458].
        #[arg(long)]
        claim: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Periodic solutions on S^{n-1} x S^1(r).
    Periodic {
        #[arg(value_parser = clap::value_parser!(u32).range(3..=64))]
        n: u32,
        #[arg(value_parser = positive)]
        r: f64,
        /// Write `t u u'` rows over one period of the longest traceable orbit to PATH.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sphere volumes, Yamabe constants of spheres and reference values.
    Constants {
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(3..=40))]
        max_dim: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct SolverArgs {
    /// Bisection tolerance on h(0).
    #[arg(long, default_value_t = DEFAULT_TOL_ALPHA, value_parser = tol_alpha)]
    tol_alpha: f64,
    /// Integration horizon for a single shot.
    #[arg(long, default_value_t = 50.0, value_parser = tmax)]
    tmax: f64,
}

impl SolverArgs {
    fn controls(&self) -> IntegrationControls {
        IntegrationControls { t_max: self.tmax, ..IntegrationControls::default() }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Text,
}

fn ranged(s: &str, lo: f64, hi: f64) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x >= lo && x <= hi {
        Ok(x)
    } else {
        Err(format!("must lie in [{lo:e}, {hi:e}]"))
    }
}

fn tol_alpha(s: &str) -> Result<f64, String> {
    ranged(s, 1e-14, 1e-3)
}

fn tmax(s: &str) -> Result<f64, String> {
    ranged(s, 5.0, 1000.0)
}

fn positive(s: &str) -> Result<f64, String> {
    ranged(s, f64::MIN_POSITIVE, 1e6)
}

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDimension { .. }
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::DegenerateProfile(_)
            | Error::Parse { .. } => Failure::Usage(e.into()),
            _ => Failure::Numerical(e.into()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

fn dims(m: u32, n: u32) -> Result<Dims, Failure> {
    if m + n < 3 {
        return Err(usage(format!("need m + n >= 3, got m = {m}, n = {n}")));
    }
    Ok(Dims::new(m as usize, n as usize)?)
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Usage)
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::Usage)
}

fn json_text(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

fn ground_state(m: u32, n: u32, dump: Option<PathBuf>, solver: SolverArgs, format: Format) -> Outcome {
    let d = dims(m, n)?;
    let gs = find_ground_state(d, solver.tol_alpha, &solver.controls())?;
    let gn = gn_value(&gs.profile, d)?;
    let y_inf = (d.m() >= 2)
        .then(|| geomconst::unit_volume_sphere_scalar(d.m()).map(|s| products::y_infinity(d, s, gn.sigma_inv)))
        .transpose()?;

    if let Some(path) = &dump {
        let mut w = create(path)?;
        gs.profile.write_rows(&mut w)?;
        w.flush()?;
    }

    let text = match format {
        Format::Json => json_text(json!({
            "m": d.m(),
            "n": d.n(),
            "alpha0": gs.alpha0,
            "bracket": [gs.bracket.0, gs.bracket.1],
            "shots": gs.shots,
            "grad_sq": gn.grad_sq,
            "l2_sq": gn.l2_sq,
            "lp_norm": gn.lp_norm,
            "sigma_inv": gn.sigma_inv,
            "y_inf": y_inf,
        })),
        Format::Csv => {
            let mut s = String::from("m,n,alpha0,sigma_inv,grad_sq,l2_sq,lp_norm\n");
            writeln!(
                s,
                "{},{},{:.12},{:.12},{:.12},{:.12},{:.12}",
                d.m(),
                d.n(),
                gs.alpha0,
                gn.sigma_inv,
                gn.grad_sq,
                gn.l2_sq,
                gn.lp_norm
            )
            .unwrap();
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "(m, n)        = ({}, {})", d.m(), d.n()).unwrap();
            writeln!(s, "alpha0        = {:.12}", gs.alpha0).unwrap();
            writeln!(s, "sigma_inv     = {:.12}", gn.sigma_inv).unwrap();
            writeln!(s, "|grad f|_2^2  = {:.12}", gn.grad_sq).unwrap();
            writeln!(s, "|f|_2^2       = {:.12}", gn.l2_sq).unwrap();
            writeln!(s, "|f|_p         = {:.12}  (p = {})", gn.lp_norm, d.p()).unwrap();
            if let Some(y) = y_inf {
                writeln!(s, "Y_inf         = {y:.10}").unwrap();
            }
            writeln!(s, "shots         = {}", gs.shots).unwrap();
            s
        }
    };
    emit(&text, None)
}

fn table(max_dim: u32, format: Format, out: Option<PathBuf>, solver: SolverArgs) -> Outcome {
    let ctrl = TableControls { tol_alpha: solver.tol_alpha, integration: solver.controls() };
    let results = products::build_table(max_dim as usize, &ctrl)?;
    let mut rows = Vec::with_capacity(results.len());
    let mut failed = 0;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => {
                eprintln!("error: row {}: {}", f.d, f.error);
                failed += 1;
            }
        }
    }
    let text = match format {
        Format::Csv => report::table_csv(&rows),
        Format::Json => report::table_json(&rows),
        Format::Text => report::table_text(&rows),
    };
    emit(&text, out.as_deref())?;
    if failed > 0 {
        return Err(Failure::Numerical(anyhow!("{failed} row(s) failed")));
    }
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn bound(m: u32, n: u32, profile: Option<PathBuf>, claim: Option<f64>, format: Format) -> Outcome {
    let d = dims(m, n)?;
    let (f, source, claim) = match &profile {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::Usage)?;
            let f: PiecewiseLinearProfile =
                text.parse().map_err(|e: Error| Failure::Usage(anyhow!("{}: {e}", path.display())))?;
            (f, path.display().to_string(), claim)
        }
        None => (PiecewiseLinearProfile::bundled(), "bundled".to_string(), claim.or(Some(2.427458))),
    };
    let s_g = geomconst::unit_volume_sphere_scalar(d.m())?;
    let b = products::bound_from_profile(&f, d, s_g)?;
    let y_sphere = geomconst::yamabe_sphere(d.k())?;

    let text = match format {
        Format::Json => json_text(json!({
            "m": d.m(),
            "n": d.n(),
            "profile": source,
            "l_value": b.l_value,
            "bound": b.bound,
            "lambda0": b.lambda0,
            "y_sphere": y_sphere,
            "below_sphere": b.bound < y_sphere,
            "claim": claim,
            "below_claim": claim.map(|c| b.l_value < c),
        })),
        Format::Csv | Format::Text => {
            let mut s = String::new();
            writeln!(s, "profile: {source}").unwrap();
            writeln!(s, "(m, n) = ({}, {})", d.m(), d.n()).unwrap();
            writeln!(s, "L = {:.10}", b.l_value).unwrap();
            writeln!(s, "Y_inf <= {:.10}", b.bound).unwrap();
            writeln!(s, "optimal dilation = {:.10}", b.lambda0).unwrap();
            writeln!(s, "Y_{} = {:.10}", d.k(), y_sphere).unwrap();
            writeln!(s, "bound < Y_{}: {}", d.k(), pass(b.bound < y_sphere)).unwrap();
            if let Some(c) = claim {
                writeln!(s, "L < {c}: {}", pass(b.l_value < c)).unwrap();
            }
            s
        }
    };
    emit(&text, None)
}

fn periodic_cmd(n: u32, r: f64, dump: Option<PathBuf>, format: Format) -> Outcome {
    let n = n as usize;
    let uc = periodic::constant_solution(n)?;
    let t_min = periodic::minimal_period(n)?;
    let sols = periodic::periodic_solutions(n, r)?;
    let y_circle = periodic::s1_yamabe_constant(n, r)?;
    let y_sphere = geomconst::yamabe_sphere(n)?;

    if let Some(path) = &dump {
        let mut w = create(path)?;
        // Orbits beyond the resolvable depth exist only asymptotically; dump
        // the longest one that can be traced.
        match sols.iter().find(|(_, o)| o.u_min >= periodic::MIN_ORBIT_DEPTH) {
            Some((k, o)) => {
                if *k != 1 {
                    eprintln!("note: dumping the k = {k} orbit; longer ones are too close to the separatrix");
                }
                let trace = periodic::trace_orbit(o, 1e-12, 1e-14)?;
                for [t, u, du] in trace.samples {
                    writeln!(w, "{t:.16e} {u:.16e} {du:.16e}")?;
                }
            }
            None => {
                for t in [0.0, 2.0 * PI * r] {
                    writeln!(w, "{t:.16e} {uc:.16e} {:.16e}", 0.0)?;
                }
            }
        }
        w.flush()?;
    }

    let text = match format {
        Format::Json => json_text(json!({
            "n": n,
            "r": r,
            "u_c": uc,
            "t_min": t_min,
            "count": sols.len(),
            "orbits": sols.iter().map(|(k, o)| json!({
                "k": k, "period": o.period, "u_min": o.u_min, "u_max": o.u_max, "energy": o.energy,
            })).collect::<Vec<_>>(),
            "y_circle": y_circle,
            "y_sphere": y_sphere,
        })),
        Format::Csv => {
            let mut s = String::from("k,period,u_min,u_max,energy\n");
            for (k, o) in &sols {
                writeln!(s, "{k},{:.12},{:.12e},{:.12},{:.12e}", o.period, o.u_min, o.u_max, o.energy).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "n = {n}, r = {r}").unwrap();
            writeln!(s, "u_c = {uc:.12}").unwrap();
            writeln!(s, "T_min = {t_min:.12}").unwrap();
            writeln!(s, "2 pi r = {:.12}", 2.0 * PI * r).unwrap();
            writeln!(s, "count = {}", sols.len()).unwrap();
            for (k, o) in &sols {
                writeln!(s, "  k = {k:>3}  period = {:.10}  u in [{:.6e}, {:.10}]", o.period, o.u_min, o.u_max)
                    .unwrap();
            }
            writeln!(s, "Y_S1 = {y_circle:.10}  (Y_{n} = {y_sphere:.10})").unwrap();
            s
        }
    };
    emit(&text, None)
}

fn constants(max_dim: u32, format: Format) -> Outcome {
    let refs = reference_constants();
    let mut spheres = Vec::new();
    for k in 1..=max_dim as usize {
        let vol = geomconst::sphere_volume(k)?;
        let y = (k >= 3).then(|| geomconst::yamabe_sphere(k)).transpose()?;
        let sigma = (k >= 3).then(|| geomconst::sobolev_constant(k)).transpose()?;
        spheres.push((k, vol, y, sigma));
    }
    let text = match format {
        Format::Json => json_text(json!({
            "spheres": spheres.iter().map(|(k, v, y, s)| json!({
                "k": k, "volume": v, "yamabe": y, "sobolev": s,
            })).collect::<Vec<_>>(),
            "y_cp2": refs.y_cp2,
            "y_s2xs2_product": refs.y_s2xs2_product,
        })),
        Format::Csv => {
            let mut s = String::from("k,volume,yamabe,sobolev\n");
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.12}")).unwrap_or_default();
            for (k, v, y, sg) in &spheres {
                writeln!(s, "{k},{v:.12},{},{}", opt(*y), opt(*sg)).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{:>3} {:>16} {:>16} {:>16}", "k", "Vol(S^k)", "Y_k", "a_k/Y_k").unwrap();
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into());
            for (k, v, y, sg) in &spheres {
                writeln!(s, "{k:>3} {v:>16.10} {:>16} {:>16}", opt(*y), opt(*sg)).unwrap();
            }
            writeln!(s, "Y(CP^2) = {:.10}", refs.y_cp2).unwrap();
            writeln!(s, "Y(S^2 x S^2) = {:.10}", refs.y_s2xs2_product).unwrap();
            s
        }
    };
    emit(&text, None)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::GroundState { m, n, dump, solver, format } => ground_state(m, n, dump, solver, format),
        Command::Table { max_dim, format, out, solver } => table(max_dim, format, out, solver),
        Command::Bound { m, n, profile, claim, format } => bound(m, n, profile, claim, format),
        Command::Periodic { n, r, dump, format } => periodic_cmd(n, r, dump, format),
        Command::Constants { max_dim, format } => constants(max_dim, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
