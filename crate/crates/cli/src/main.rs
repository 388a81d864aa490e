use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tdgl_core::experiment::{
    cmd_compare, cmd_convergence_study, cmd_run, RunConfig, SchemeKind, TauRule,
};
use tdgl_core::io::{fmt_num, write_vtk};
use tdgl_core::mesh::build_l_shape_mesh;
use tdgl_core::sparse::SpdMethod;
use tdgl_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tdgl",
    version,
    about = "Ginzburg-Landau finite element experiments on an L-shaped domain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run of the manufactured case
    Run {
        #[command(flatten)]
        opts: ConfigArgs,
        /// Fail with exit code 4 unless every error and norm is finite
        #[arg(long)]
        check: bool,
    },
    /// Convergence study over several meshes
    Study {
        #[command(flatten)]
        opts: ConfigArgs,
        /// Comma separated mesh parameters, ascending
        #[arg(long = "Ms", value_delimiter = ',', default_value = "16,32,64")]
        ms: Vec<usize>,
        /// Fail with exit code 4 unless the observed rates show the expected behaviour
        #[arg(long)]
        check: bool,
    },
    /// Both schemes on the same mesh
    Compare {
        #[command(flatten)]
        opts: ConfigArgs,
        /// Fail with exit code 4 unless the Hodge A-error is at least 3x smaller
        #[arg(long)]
        check: bool,
    },
    /// Write the mesh for M as legacy VTK
    ExportMesh {
        #[arg(long = "M")]
        m: usize,
        #[arg(long, default_value = "mesh.vtk")]
        output: PathBuf,
    },
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON configuration; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<SchemeKind>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "tau-rule", value_parser = parse_tau_rule)]
    tau_rule: Option<TauRule>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long = "output-dir")]
    output_dir: Option<PathBuf>,
    #[arg(long = "export-fields")]
    export_fields: bool,
    #[arg(long = "export-matrices")]
    export_matrices: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "snapshot-times", value_delimiter = ',')]
    snapshot_times: Option<Vec<f64>>,
    #[arg(long = "allow-large-tau")]
    allow_large_tau: bool,
    #[arg(long = "solver-tol")]
    solver_tol: Option<f64>,
    #[arg(long = "spd-solver", value_parser = parse_spd)]
    spd_solver: Option<SpdMethod>,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    match s {
        "hodge" => Ok(SchemeKind::Hodge),
        "direct" => Ok(SchemeKind::Direct),
        _ => Err(format!("unknown scheme {s:?} (expected hodge or direct)")),
    }
}

fn parse_tau_rule(s: &str) -> Result<TauRule, String> {
    match s {
        "equal_h" => Ok(TauRule::EqualH),
        _ => Err(format!("unknown tau rule {s:?} (expected equal_h)")),
    }
}

fn parse_spd(s: &str) -> Result<SpdMethod, String> {
    match s {
        "cholesky" => Ok(SpdMethod::Cholesky),
        "cg" => Ok(SpdMethod::Cg),
        _ => Err(format!("unknown solver {s:?} (expected cholesky or cg)")),
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_path(p)?,
            None => RunConfig::new(SchemeKind::Hodge, 16),
        };
        if let Some(s) = self.scheme {
            c.scheme = s;
        }
        if let Some(m) = self.m {
            c.m = m;
        }
        // an explicit step or rule on the command line replaces the other
        if let Some(t) = self.tau {
            c.tau = Some(t);
            c.tau_rule = None;
        }
        if let Some(r) = self.tau_rule {
            c.tau_rule = Some(r);
            c.tau = None;
        }
        if let Some(t) = self.t_final {
            c.t_final = t;
        }
        if let Some(e) = self.eta {
            c.eta = e;
        }
        if let Some(k) = self.kappa {
            c.kappa = k;
        }
        if let Some(o) = &self.output_dir {
            c.output_dir = o.clone();
        }
        c.export_fields |= self.export_fields;
        c.export_matrices |= self.export_matrices;
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = &self.snapshot_times {
            c.snapshot_times = t.clone();
        }
        c.allow_large_tau |= self.allow_large_tau;
        if let Some(t) = self.solver_tol {
            c.solver_tol = t;
        }
        if let Some(s) = self.spd_solver {
            c.spd_solver = s;
        }
        c.validate()?;
        Ok(c)
    }
}

fn exit_for(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::Config(_) | Error::MeshParameter { .. } | Error::Json(_) => {
            ExitCode::from(EXIT_CONFIG)
        }
        Error::Solve { .. } | Error::Linear(_) | Error::NonFinite(_) => ExitCode::from(EXIT_SOLVER),
        _ => ExitCode::FAILURE,
    }
}

fn check_result(ok: bool, what: &str) -> ExitCode {
    if ok {
        println!("check passed: {what}");
        ExitCode::SUCCESS
    } else {
        eprintln!("check failed: {what}");
        ExitCode::from(EXIT_CHECK)
    }
}

fn real_main(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { opts, check } => {
            let cfg = opts.resolve()?;
            let out = cmd_run(&cfg)?;
            let e = &out.errors;
            println!(
                "{} M={} tau={} e_psi={} e_mod_psi={} e_A={} e_u={} e_v={}",
                e.scheme,
                cfg.m,
                fmt_num(e.tau),
                fmt_num(e.e_psi),
                fmt_num(e.e_mod_psi),
                fmt_num(e.e_a),
                fmt_num(e.e_u),
                fmt_num(e.e_v)
            );
            println!("wrote {}", cfg.output_dir.display());
            if check {
                let finite = [e.e_psi, e.e_mod_psi, e.e_a, e.e_u, e.e_v]
                    .iter()
                    .all(|v| v.is_finite() && *v >= 0.0)
                    && out.diagnostics.iter().all(|d| d.psi_l2.is_finite());
                return Ok(check_result(finite, "errors and norms finite"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Study { opts, ms, check } => {
            let cfg = opts.resolve()?;
            let table = cmd_convergence_study(&cfg, &ms)?;
            for (m, r) in &table.runs {
                println!(
                    "M={m} e_psi={} e_mod_psi={} e_A={}",
                    fmt_num(r.e_psi),
                    fmt_num(r.e_mod_psi),
                    fmt_num(r.e_a)
                );
            }
            match table.rates {
                Some(r) => println!(
                    "rates psi={:.3} mod_psi={:.3} A={:.3} u={:.3} v={:.3}",
                    r[0], r[1], r[2], r[3], r[4]
                ),
                None => {
                    eprintln!("note: a single mesh gives no convergence rate; rate row omitted")
                }
            }
            if check {
                let Some(r) = table.rates else {
                    return Ok(check_result(
                        false,
                        "at least two meshes are needed for a rate check",
                    ));
                };
                return Ok(match cfg.scheme {
                    SchemeKind::Hodge => check_result(
                        r[0] >= 0.85 && r[1] >= 0.85 && r[2] >= 0.65,
                        "hodge rates psi >= 0.85, |psi| >= 0.85, A >= 0.65",
                    ),
                    SchemeKind::Direct => check_result(
                        r[2] <= 0.2 && r[0] <= 0.3,
                        "direct plateau A <= 0.2, psi <= 0.3",
                    ),
                });
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { opts, check } => {
            let cfg = opts.resolve()?;
            let out = cmd_compare(&cfg)?;
            println!(
                "hodge  e_psi={} e_A={}",
                fmt_num(out.hodge.e_psi),
                fmt_num(out.hodge.e_a)
            );
            println!(
                "direct e_psi={} e_A={}",
                fmt_num(out.direct.e_psi),
                fmt_num(out.direct.e_a)
            );
            println!(
                "psi matrices identical for identical A data: {}",
                out.psi_matrices_identical
            );
            if check {
                return Ok(check_result(
                    out.direct.e_a >= 3.0 * out.hodge.e_a && out.psi_matrices_identical,
                    "hodge A-error at least 3x below direct",
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportMesh { m, output } => {
            let mesh = build_l_shape_mesh::<f64>(m)?;
            write_vtk(&output, &mesh, &format!("L-shaped mesh M={m}"), &[])?;
            println!(
                "{} vertices, {} triangles -> {}",
                mesh.num_vertices(),
                mesh.num_triangles(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    real_main(cli).unwrap_or_else(|e| exit_for(&e))
}
