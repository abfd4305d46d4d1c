use clap::{Args, Parser, Subcommand, ValueEnum};
use lmg_core::audit::run_audit;
use lmg_core::limit::{classify, metric_limit, metric_limit_numeric, ricci_limit, RicciMethod, Variant};
use lmg_core::metric::{bures_dense, default_fd_step, metric_fd_free_energy, metric_fluctuations, MetricTensor2};
use lmg_core::metric::bures::BURES_DEFAULT_STEP;
use lmg_core::scan::{
    convergence_csv, fmt_f64, metric_csv, phase_csv, run_convergence, run_metric_scan, run_phase_diagram, Range,
    ScanRequest,
};
use lmg_core::spectrum::{ground_state, spectrum};
use lmg_core::thermal::ThermalEnsemble;
use lmg_core::{Error, ModelParams};
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

/// Fidelity metric, phase structure and curvature of thermal states of the
/// isotropic Lipkin-Meshkov-Glick model.
#[derive(Parser)]
#[command(name = "lmg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of CSV / text.
    #[arg(long, global = true)]
    json: bool,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Worker threads for grid scans.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
}

#[derive(Args)]
struct Point {
    #[arg(long)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    h: f64,
}

#[derive(Args)]
struct Grid {
    #[arg(long)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    #[arg(long, allow_hyphen_values = true)]
    h_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    h_max: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Override the number of temperature points.
    #[arg(long)]
    t_steps: Option<usize>,
    /// Override the number of field points.
    #[arg(long)]
    h_steps: Option<usize>,
}

impl Grid {
    fn request(&self) -> lmg_core::Result<ScanRequest> {
        ScanRequest::new(
            Range::new(self.t_min, self.t_max, self.t_steps.unwrap_or(self.steps))?,
            Range::new(self.h_min, self.h_max, self.h_steps.unwrap_or(self.steps))?,
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FiniteMethod {
    Fluct,
    Fd,
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Corrected,
    Printed,
    /// Finite differences of the limit free energy (no closed form).
    Numeric,
}

#[derive(Clone, Copy, ValueEnum)]
enum RicciArg {
    Christoffel,
    Orthogonal,
    Printed,
}

#[derive(Subcommand)]
enum Command {
    /// Sector table and ground state.
    Spectrum {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        /// One CSV row per level: S,log_multiplicity,M,E.
        #[arg(long)]
        csv: bool,
    },
    /// Partition function, free energy and moments at finite N.
    Thermal {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        point: Point,
    },
    /// Finite-N metric tensor.
    FiniteMetric {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value = "fluct")]
        method: FiniteMethod,
        /// Difference step for the fd and dense methods.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Per-spin metric in the thermodynamic limit.
    LimitMetric {
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value = "corrected")]
        variant: VariantArg,
    },
    /// Ricci scalar of the limit metric (ordered phase only).
    Ricci {
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value = "christoffel")]
        method: RicciArg,
    },
    /// Phase, order parameter, metric and curvature over a (T, h) grid.
    PhaseDiagram {
        #[command(flatten)]
        grid: Grid,
    },
    /// Limit metric over a (T, h) grid.
    MetricScan {
        #[command(flatten)]
        grid: Grid,
    },
    /// Finite-N metric per spin against the limit, for a list of sizes.
    Converge {
        #[command(flatten)]
        point: Point,
        /// Comma-separated even sizes, ascending.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400,800")]
        ns: Vec<u32>,
    },
    /// Compare closed-form variants against the numerical oracles.
    Audit,
}

fn metric_line(n: u32, beta: f64, h: f64, g: &MetricTensor2, extra: &[f64]) -> String {
    let mut cells = vec![n.to_string(), fmt_f64(beta), fmt_f64(h)];
    cells.extend([g.g_bb, g.g_bh, g.g_hh, g.det()].iter().chain(extra).map(|&x| fmt_f64(x)));
    cells.join(",")
}

fn run(cli: &Cli) -> lmg_core::Result<String> {
    let threads = usize::from(cli.threads);
    let mut s = String::new();
    match &cli.command {
        Command::Spectrum { n, h, csv } => {
            let secs = spectrum(*n, *h)?;
            let gs = ground_state(*n, *h)?;
            if cli.json {
                let sectors: Vec<_> = secs
                    .iter()
                    .map(|sec| {
                        json!({
                            "S": sec.s,
                            "log_multiplicity": sec.log_multiplicity,
                            "multiplicity": sec.multiplicity_exact.as_ref().map(|d| d.to_string()),
                            "levels": sec.levels.iter().map(|&(m, e)| json!({"M": m, "E": e})).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                s = json!({"N": n, "h": h, "sectors": sectors, "ground_state": gs}).to_string();
                s.push('\n');
            } else if *csv {
                s.push_str("S,log_multiplicity,M,E\n");
                for sec in &secs {
                    for &(m, e) in &sec.levels {
                        let _ = writeln!(s, "{},{},{},{}", sec.s, fmt_f64(sec.log_multiplicity), m, fmt_f64(e));
                    }
                }
            } else {
                let _ = writeln!(s, "{:>6} {:>22} {:>14} {:>14}", "S", "d_S", "E_min", "E_max");
                for sec in &secs {
                    let d = match &sec.multiplicity_exact {
                        Some(d) => d.to_string(),
                        None => format!("exp({:.6})", sec.log_multiplicity),
                    };
                    let lo = sec.levels.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
                    let hi = sec.levels.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
                    let _ = writeln!(s, "{:>6} {:>22} {:>14.8} {:>14.8}", sec.s, d, lo, hi);
                }
                let _ = writeln!(
                    s,
                    "ground state: S0 = {}, M0 = {}, E = {}{}",
                    gs.s0,
                    gs.m0,
                    fmt_f64(gs.energy),
                    if gs.degenerate { " (level crossing)" } else { "" }
                );
            }
        }
        Command::Thermal { n, point } => {
            let ens = ThermalEnsemble::new(ModelParams::new(*n, point.beta, point.h)?)?;
            let m = ens.moments();
            let fields = [
                ("log_z", ens.log_partition()),
                ("f_n", ens.free_energy_per_spin()),
                ("mean_h", m.mean_h),
                ("var_h", m.var_h),
                ("mean_sz", m.mean_sz),
                ("var_sz", m.var_sz),
                ("cov_h_sz", m.cov_h_sz),
            ];
            if cli.json {
                let mut obj = serde_json::Map::new();
                obj.insert("N".into(), json!(n));
                obj.insert("beta".into(), json!(point.beta));
                obj.insert("h".into(), json!(point.h));
                for (k, v) in fields {
                    obj.insert(k.into(), json!(v));
                }
                s = serde_json::Value::Object(obj).to_string();
                s.push('\n');
            } else {
                for (k, v) in fields {
                    let _ = writeln!(s, "{k} = {}", fmt_f64(v));
                }
            }
        }
        Command::FiniteMetric { n, point, method, step } => {
            let params = ModelParams::new(*n, point.beta, point.h)?;
            let (g, nc) = match method {
                FiniteMethod::Fluct => (metric_fluctuations(params)?, None),
                FiniteMethod::Fd => (metric_fd_free_energy(params, step.unwrap_or(default_fd_step(point.beta)))?, None),
                FiniteMethod::Dense => {
                    let sp = bures_dense(*n, point.beta, point.h, step.unwrap_or(BURES_DEFAULT_STEP))?;
                    (sp.classical, Some(sp.nonclassical))
                }
            };
            if cli.json {
                let mut v = json!({"N": n, "beta": point.beta, "h": point.h,
                    "g_bb": g.g_bb, "g_bh": g.g_bh, "g_hh": g.g_hh, "det": g.det()});
                if let Some(nc) = nc {
                    v["nc_bb"] = json!(nc.g_bb);
                    v["nc_bh"] = json!(nc.g_bh);
                    v["nc_hh"] = json!(nc.g_hh);
                }
                s = v.to_string();
                s.push('\n');
            } else {
                let (header, extra) = match nc {
                    Some(nc) => ("N,beta,h,g_bb,g_bh,g_hh,det,nc_bb,nc_bh,nc_hh", nc.components().to_vec()),
                    None => ("N,beta,h,g_bb,g_bh,g_hh,det", vec![]),
                };
                let _ = writeln!(s, "{header}\n{}", metric_line(*n, point.beta, point.h, &g, &extra));
            }
        }
        Command::LimitMetric { point, variant } => {
            let p = classify(point.beta, point.h)?;
            let (g, det, name) = match variant {
                VariantArg::Numeric => {
                    let g = metric_limit_numeric(point.beta, point.h)?;
                    (g, g.det(), "numeric")
                }
                VariantArg::Corrected | VariantArg::Printed => {
                    let (v, name) = match variant {
                        VariantArg::Printed => (Variant::AsPrinted, "printed"),
                        _ => (Variant::Corrected, "corrected"),
                    };
                    let m = metric_limit(point.beta, point.h, v)?;
                    (m.tensor, m.det(), name)
                }
            };
            if cli.json {
                s = json!({"beta": point.beta, "h": point.h, "phase": p.phase, "mu_xy": p.mu_xy, "r": p.r,
                    "variant": name, "g_bb": g.g_bb, "g_bh": g.g_bh, "g_hh": g.g_hh, "det": det})
                .to_string();
                s.push('\n');
            } else {
                let cells = [p.mu_xy, g.g_bb, g.g_bh, g.g_hh, det].map(fmt_f64).join(",");
                let _ = writeln!(s, "beta,h,phase,variant,mu_xy,g_bb,g_bh,g_hh,det");
                let _ = writeln!(s, "{},{},{},{name},{cells}", fmt_f64(point.beta), fmt_f64(point.h), p.phase);
            }
        }
        Command::Ricci { point, method } => {
            let (m, name) = match method {
                RicciArg::Christoffel => (RicciMethod::ChristoffelFD, "christoffel"),
                RicciArg::Orthogonal => (RicciMethod::OrthogonalClosedForm, "orthogonal"),
                RicciArg::Printed => (RicciMethod::AsPrinted, "printed"),
            };
            let r = ricci_limit(point.beta, point.h, m)?;
            if cli.json {
                s = json!({"beta": point.beta, "h": point.h, "method": name, "ricci": r}).to_string();
                s.push('\n');
            } else {
                let _ = writeln!(s, "beta,h,method,ricci\n{},{},{name},{}", fmt_f64(point.beta), fmt_f64(point.h), fmt_f64(r));
            }
        }
        Command::PhaseDiagram { grid } => {
            let rows = run_phase_diagram(&grid.request()?, threads)?;
            s = if cli.json { json_lines(&rows) } else { phase_csv(&rows) };
        }
        Command::MetricScan { grid } => {
            let rows = run_metric_scan(&grid.request()?, threads)?;
            s = if cli.json { json_lines(&rows) } else { metric_csv(&rows) };
        }
        Command::Converge { point, ns } => {
            let rep = run_convergence(ns, point.beta, point.h, threads)?;
            s = if cli.json {
                let mut t = serde_json::to_string(&rep).expect("serialisable");
                t.push('\n');
                t
            } else {
                convergence_csv(&rep)
            };
        }
        Command::Audit => {
            let rep = run_audit()?;
            s = if cli.json {
                let mut t = serde_json::to_string(&rep).expect("serialisable");
                t.push('\n');
                t
            } else {
                rep.to_string()
            };
        }
    }
    Ok(s)
}

fn json_lines<T: serde::Serialize>(rows: &[T]) -> String {
    let mut s = serde_json::to_string(rows).expect("serialisable");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, out),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(out.as_bytes())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("lmg: write failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("lmg: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
