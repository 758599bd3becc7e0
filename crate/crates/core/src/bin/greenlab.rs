use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use greenlab::ball::BallKernels;
use greenlab::bounds::{best_finite_bound_with, compare_table, finite_bound_with};
use greenlab::energy::{energy, optimize_with, Configuration, EnergyReport, OptimizeSettings};
use greenlab::manifold::io::{read_points, write_points};
use greenlab::output::{sig17, to_json, RunManifest};
use greenlab::special::TOL_REL_ENV;
use greenlab::verify::{format_table, run_suite, Mode};
use greenlab::{Error, Family, ManifoldSpec, QuadratureSettings, RadialGreenProfile};

/// Green functions, energies and certified lower bounds on S^n, RP^n, CP^n, HP^n and OP^2.
#[derive(Parser, Debug)]
#[command(name = "greenlab", version)]
struct Cli {
    /// Worker threads for energy sums (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, env = TOL_REL_ENV, default_value_t = 1e-10)]
    tol_rel: f64,

    /// Output file; the run manifest goes to `<out>.manifest.json` (stderr otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    S,
    Rp,
    Cp,
    Hp,
    Op2,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::S => Family::Sphere,
            FamilyArg::Rp => Family::RealProj,
            FamilyArg::Cp => Family::ComplexProj,
            FamilyArg::Hp => Family::QuatProj,
            FamilyArg::Op2 => Family::CayleyPlane,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct ManifoldArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Family parameter (ignored for op2).
    #[arg(long, default_value_t = 2)]
    n: usize,
}

impl ManifoldArgs {
    fn spec(&self) -> greenlab::Result<ManifoldSpec> {
        ManifoldSpec::new(self.family.into(), if matches!(self.family, FamilyArg::Op2) { 2 } else { self.n })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulated Green profile: r, phi_hat(r), phi(r) at the 200 table nodes (csv by default).
    Profile {
        #[command(flatten)]
        m: ManifoldArgs,
    },
    /// Ball kernels K(a) and Theta(a), at --radius or on a 20-point grid (csv by default).
    Ball {
        #[command(flatten)]
        m: ManifoldArgs,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Finite-N lower bound optimized over the radius (json by default).
    Bound {
        #[command(flatten)]
        m: ManifoldArgs,
        /// Number of points N.
        #[arg(long)]
        points: u64,
        /// Also evaluate the bound at this radius.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Leading coefficients next to the earlier ones, one row per n (csv by default).
    Compare {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Energy of a point file against its certified lower bound (json by default).
    Energy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Descend from uniform random points; writes the point file to --out (or stdout).
    Optimize {
        #[command(flatten)]
        m: ManifoldArgs,
        #[arg(long)]
        points: usize,
        /// Single-point moves.
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the self-check suite; exits 1 if any check fails.
    Verify {
        #[arg(long)]
        quick: bool,
    },
}

struct Ctx {
    settings: QuadratureSettings,
}

impl Ctx {
    fn kernels(&self, spec: ManifoldSpec) -> greenlab::Result<BallKernels> {
        let prof = if self.settings == QuadratureSettings::default() {
            RadialGreenProfile::shared(spec)?
        } else {
            Arc::new(RadialGreenProfile::with_settings(spec, self.settings)?)
        };
        Ok(BallKernels::new(prof))
    }
}

struct Payload {
    text: String,
    manifest_params: serde_json::Value,
    seed: Option<u64>,
    failed: bool,
}

fn csv_line(cols: &[String]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

fn run(cli: &Cli, ctx: &Ctx) -> greenlab::Result<Payload> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    let mut failed = false;
    let mut seed = None;
    let (text, params) = match &cli.command {
        Command::Profile { m } => {
            let spec = m.spec()?;
            let prof = ctx.kernels(spec)?.profile().clone();
            let text = match fmt(Format::Csv) {
                Format::Csv => {
                    let mut buf = Vec::new();
                    prof.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("ascii")
                }
                Format::Json => {
                    let rows: Vec<_> = prof
                        .nodes()
                        .into_iter()
                        .map(|r| {
                            let ph = prof.phi_hat(r)?;
                            Ok(json!({ "r": r, "phi_hat": ph, "phi": prof.eval(r)? }))
                        })
                        .collect::<greenlab::Result<_>>()?;
                    to_json(&json!({ "spec": spec, "c_m": prof.c_m(), "r_cut": prof.r_cut(), "rows": rows }))?
                }
            };
            (text, json!({ "spec": spec }))
        }
        Command::Ball { m, radius } => {
            let spec = m.spec()?;
            let kern = ctx.kernels(spec)?;
            let radii: Vec<f64> = match radius {
                Some(a) => vec![*a],
                None => (1..=20).map(|k| spec.diameter() * k as f64 / 20.0).collect(),
            };
            let values = radii.iter().map(|&a| kern.value(a)).collect::<greenlab::Result<Vec<_>>>()?;
            let text = match fmt(Format::Csv) {
                Format::Csv => {
                    let mut s = csv_line(&["a".into(), "K".into(), "Theta".into(), "method".into()]);
                    for v in &values {
                        let method = serde_json::to_value(v.method).unwrap().as_str().unwrap().to_string();
                        s.push_str(&csv_line(&[sig17(v.a), sig17(v.k_value), sig17(v.theta_value), method]));
                    }
                    s
                }
                Format::Json => to_json(&values)?,
            };
            (text, json!({ "spec": spec, "radius": radius }))
        }
        Command::Bound { m, points, radius } => {
            let spec = m.spec()?;
            let kern = ctx.kernels(spec)?;
            let report = best_finite_bound_with(&kern, *points)?;
            let at = radius.map(|a| finite_bound_with(&kern, *points, a).map(|b| (a, b))).transpose()?;
            let text = match fmt(Format::Json) {
                Format::Json => {
                    let mut v = serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?;
                    if let Some((a, b)) = at {
                        v["requested"] = json!({ "a": a, "bound": b });
                    }
                    to_json(&v)?
                }
                Format::Csv => {
                    let mut s = csv_line(&["a".into(), "bound".into()]);
                    for (a, b) in report.radius_grid.iter().chain(at.iter()) {
                        s.push_str(&csv_line(&[sig17(*a), sig17(*b)]));
                    }
                    s
                }
            };
            (text, json!({ "spec": spec, "N": points, "radius": radius }))
        }
        Command::Compare { family, n_min, n_max } => {
            let family: Family = (*family).into();
            let (lo, hi) = match family {
                Family::RealProj => (3, 60),
                Family::ComplexProj => (2, 60),
                Family::QuatProj => (1, 30),
                _ => (2, 2),
            };
            let rows = compare_table(family, n_min.unwrap_or(lo)..=n_max.unwrap_or(hi))?;
            let text = match fmt(Format::Csv) {
                Format::Csv => {
                    let mut s = csv_line(&["n".into(), "ours".into(), "matzke".into(), "ratio".into()]);
                    for r in &rows {
                        s.push_str(&csv_line(&[r.n.to_string(), sig17(r.ours), sig17(r.matzke), sig17(r.ratio)]));
                    }
                    s
                }
                Format::Json => to_json(&rows)?,
            };
            (text, json!({ "family": family.short_name(), "n_min": n_min, "n_max": n_max }))
        }
        Command::Energy { config } => {
            let (spec, points) = read_points(BufReader::new(File::open(config)?))?;
            let kern = ctx.kernels(spec)?;
            let cfg = Configuration::new(spec, points)?;
            let report = EnergyReport::new(&cfg, &kern)?;
            (to_json(&report)?, json!({ "config": config, "spec": spec, "N": cfg.len() }))
        }
        Command::Optimize { m, points, iters, seed: s } => {
            let spec = m.spec()?;
            let kern = ctx.kernels(spec)?;
            let out = optimize_with(kern.profile(), *points, &OptimizeSettings::new(*iters, *s))?;
            let mut buf = Vec::new();
            write_points(&mut buf, &spec, out.config.points())?;
            let e = energy(&out.config, kern.profile())?;
            eprintln!(
                "initial energy {}, final energy {}, {} accepted moves",
                sig17(out.history[0]),
                sig17(e),
                out.accepted
            );
            seed = Some(*s);
            (String::from_utf8(buf).expect("ascii"), json!({ "spec": spec, "N": points, "iters": iters, "final_energy": e }))
        }
        Command::Verify { quick } => {
            let res = run_suite(if *quick { Mode::Quick } else { Mode::Full });
            failed = res.iter().any(|r| !r.passed);
            let text = match fmt(Format::Csv) {
                Format::Json => to_json(&res)?,
                Format::Csv => format_table(&res),
            };
            (text, json!({ "quick": quick }))
        }
    };
    Ok(Payload {
        text,
        manifest_params: params,
        seed,
        failed,
    })
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Profile { .. } => "profile",
        Command::Ball { .. } => "ball",
        Command::Bound { .. } => "bound",
        Command::Compare { .. } => "compare",
        Command::Energy { .. } => "energy",
        Command::Optimize { .. } => "optimize",
        Command::Verify { .. } => "verify",
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn emit(cli: &Cli, payload: &Payload, manifest: &RunManifest) -> greenlab::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(payload.text.as_bytes())?;
            w.flush()?;
            manifest.write(BufWriter::new(File::create(manifest_path(path))?))?;
        }
        None => {
            io::stdout().write_all(payload.text.as_bytes())?;
            manifest.write(io::stderr())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let d = QuadratureSettings::default();
    let settings = match QuadratureSettings::new(cli.tol_rel, d.abs_tol, d.max_subdivisions) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let ctx = Ctx { settings };
    let result = run(&cli, &ctx).and_then(|payload| {
        let mut params = payload.manifest_params.clone();
        params["format"] = json!(cli.format.map(|f| format!("{f:?}").to_lowercase()));
        params["out"] = json!(cli.out);
        let manifest = RunManifest::new(subcommand_name(&cli.command), params, payload.seed, cli.threads, settings).finish(started);
        emit(&cli, &payload, &manifest)?;
        Ok(payload.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
