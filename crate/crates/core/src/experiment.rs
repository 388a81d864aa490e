//! Run configuration and the experiment drivers behind the command line.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direct::{DirectScheme, DirectState};
use crate::error::{Error, Result};
use crate::fem::P1Space;
use crate::hodge::{HodgeScheme, SchemeConfig, StepDiagnostics, TdglState};
use crate::io::{self, RatesTable, VtkData};
use crate::manufactured::ManufacturedCase;
use crate::mesh::build_l_shape_mesh;
use crate::metrics::{
    convergence_rate, hodge_potential_errors, l2_error_modulus, l2_error_psi, l2_error_vector,
    ErrorRow, VectorFieldRef,
};
use crate::sparse::SpdMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Hodge,
    Direct,
}

impl SchemeKind {
    pub fn tag(self) -> &'static str {
        match self {
            SchemeKind::Hodge => "hodge",
            SchemeKind::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauRule {
    /// `τ = h = 1/M`.
    EqualH,
}

fn default_eta() -> f64 {
    1.0
}
fn default_kappa() -> f64 {
    10.0
}
fn default_t() -> f64 {
    1.0
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub tau_rule: Option<TauRule>,
    #[serde(rename = "T", default = "default_t")]
    pub t_final: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub export_fields: bool,
    #[serde(default)]
    pub export_matrices: bool,
    #[serde(default)]
    pub seed: u64,
    /// Times at which VTK snapshots are written when `export_fields` is set;
    /// each is rounded to the nearest step. The final state is always written.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub allow_large_tau: bool,
    #[serde(default = "default_tol")]
    pub solver_tol: f64,
    #[serde(default)]
    pub spd_solver: SpdMethod,
}

impl RunConfig {
    pub fn new(scheme: SchemeKind, m: usize) -> Self {
        RunConfig {
            scheme,
            m,
            tau: None,
            tau_rule: Some(TauRule::EqualH),
            t_final: 1.0,
            eta: 1.0,
            kappa: 10.0,
            output_dir: default_output(),
            export_fields: false,
            export_matrices: false,
            seed: 0,
            snapshot_times: Vec::new(),
            allow_large_tau: false,
            solver_tol: 1e-10,
            spd_solver: SpdMethod::Cholesky,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn resolved_tau(&self) -> Result<f64> {
        match (self.tau, self.tau_rule) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either tau or tau_rule, not both".into(),
            )),
            (Some(t), None) => Ok(t),
            (None, Some(TauRule::EqualH)) | (None, None) => Ok(1.0 / self.m as f64),
        }
    }

    /// Validated scheme parameters.
    pub fn scheme_config(&self) -> Result<SchemeConfig<f64>> {
        let c = SchemeConfig {
            eta: self.eta,
            kappa: self.kappa,
            tau: self.resolved_tau()?,
            t_final: self.t_final,
            allow_large_tau: self.allow_large_tau,
            solver_tol: self.solver_tol,
            spd_method: self.spd_solver,
        };
        c.validate()?;
        if self.eta != 1.0 || self.kappa != 10.0 {
            return Err(Error::Config(
                "the manufactured forcing is defined for eta = 1 and kappa = 10 only".into(),
            ));
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.m % 2 != 0 {
            return Err(Error::MeshParameter {
                m: self.m,
                reason: "must be even and at least 2",
            });
        }
        self.scheme_config().map(|_| ())
    }
}

/// Result of one manufactured-solution run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub errors: ErrorRow,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl RunOutcome {
    pub fn max_psi_l2(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.psi_l2)
            .fold(0.0, f64::max)
    }
}

fn snapshot_steps(cfg: &RunConfig, tau: f64, steps: usize) -> Vec<usize> {
    let mut s: Vec<usize> = cfg
        .snapshot_times
        .iter()
        .map(|t| ((t / tau).round().max(0.0) as usize).min(steps))
        .collect();
    s.push(steps);
    s.sort_unstable();
    s.dedup();
    s
}

fn hodge_fields(s: &TdglState<f64>) -> Vec<VtkData> {
    vec![
        VtkData::PointScalar("psi_abs".into(), s.psi.iter().map(|z| z.norm()).collect()),
        VtkData::PointScalar("psi_re".into(), s.psi.iter().map(|z| z.re).collect()),
        VtkData::PointScalar("psi_im".into(), s.psi.iter().map(|z| z.im).collect()),
        VtkData::PointScalar("p".into(), s.p.clone()),
        VtkData::PointScalar("q".into(), s.q.clone()),
        VtkData::PointScalar("u".into(), s.u.clone()),
        VtkData::PointScalar("v".into(), s.v.clone()),
        VtkData::CellVector("A".into(), s.a.0.clone()),
    ]
}

fn direct_fields(s: &DirectState<f64>) -> Vec<VtkData> {
    vec![
        VtkData::PointScalar("psi_abs".into(), s.psi.iter().map(|z| z.norm()).collect()),
        VtkData::PointScalar("psi_re".into(), s.psi.iter().map(|z| z.re).collect()),
        VtkData::PointScalar("psi_im".into(), s.psi.iter().map(|z| z.im).collect()),
        VtkData::PointVector("A".into(), s.a.chunks(2).map(|c| [c[0], c[1]]).collect()),
    ]
}

/// Runs the manufactured case and, when `out` is given, writes
/// `diagnostics.csv`, `errors.csv` and any requested exports there.
pub fn run_manufactured(cfg: &RunConfig, out: Option<&Path>) -> Result<RunOutcome> {
    cfg.validate()?;
    let sc = cfg.scheme_config()?;
    let case = ManufacturedCase::<f64>::new()?;
    let space = P1Space::new(build_l_shape_mesh::<f64>(cfg.m)?);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let mut export_err: Option<Error> = None;
    let (errors, diagnostics) = match cfg.scheme {
        SchemeKind::Hodge => {
            let scheme = HodgeScheme::new(space, sc)?;
            let snaps = snapshot_steps(cfg, sc.tau, scheme.steps());
            let state = scheme.init_from_exact(&case)?;
            if let (Some(dir), true) = (out, cfg.export_matrices) {
                export_hodge_matrices(&scheme, &state, &case, dir)?;
            }
            let (fin, diags) = scheme.run(state, &case, |s, _| {
                if let (Some(dir), true) = (out, cfg.export_fields && snaps.contains(&s.step)) {
                    let path = dir.join(format!("fields_{:05}.vtk", s.step));
                    if let Err(e) =
                        io::write_vtk(&path, scheme.space().mesh(), "hodge", &hodge_fields(s))
                    {
                        export_err.get_or_insert(e);
                    }
                }
            })?;
            let sp = scheme.space();
            let t = fin.t;
            let a = VectorFieldRef::Element(&fin.a);
            let (e_u, e_v) = hodge_potential_errors(sp, cfg.m, a, &case, t)?;
            let row = ErrorRow {
                h: 1.0 / cfg.m as f64,
                tau: sc.tau,
                scheme: cfg.scheme.tag().into(),
                e_psi: l2_error_psi(sp, &fin.psi, &case, t)?,
                e_mod_psi: l2_error_modulus(sp, &fin.psi, &case, t)?,
                e_a: l2_error_vector(sp, a, &case, t)?,
                e_u,
                e_v,
            };
            (row, diags)
        }
        SchemeKind::Direct => {
            let scheme = DirectScheme::new(space, sc)?;
            let snaps = snapshot_steps(cfg, sc.tau, scheme.steps());
            let state = scheme.init_from_exact(&case)?;
            if let (Some(dir), true) = (out, cfg.export_matrices) {
                let (m, _) = scheme.psi_system(&state, &case)?;
                io::write_matrix_market(&dir.join("psi_system_step1.mtx"), &m)?;
                io::write_matrix_market(&dir.join("vector_system.mtx"), scheme.vector_system())?;
            }
            let (fin, diags) = scheme.run(state, &case, |s, _| {
                if let (Some(dir), true) = (out, cfg.export_fields && snaps.contains(&s.step)) {
                    let path = dir.join(format!("fields_{:05}.vtk", s.step));
                    if let Err(e) =
                        io::write_vtk(&path, scheme.space().mesh(), "direct", &direct_fields(s))
                    {
                        export_err.get_or_insert(e);
                    }
                }
            })?;
            let sp = scheme.space();
            let t = fin.t;
            let a = VectorFieldRef::Nodal(&fin.a);
            let (e_u, e_v) = hodge_potential_errors(sp, cfg.m, a, &case, t)?;
            let row = ErrorRow {
                h: 1.0 / cfg.m as f64,
                tau: sc.tau,
                scheme: cfg.scheme.tag().into(),
                e_psi: l2_error_psi(sp, &fin.psi, &case, t)?,
                e_mod_psi: l2_error_modulus(sp, &fin.psi, &case, t)?,
                e_a: l2_error_vector(sp, a, &case, t)?,
                e_u,
                e_v,
            };
            (row, diags)
        }
    };
    if let Some(e) = export_err {
        return Err(e);
    }
    if let Some(dir) = out {
        io::write_diagnostics_csv(&dir.join("diagnostics.csv"), &diagnostics)?;
        io::write_errors_csv(&dir.join("errors.csv"), std::slice::from_ref(&errors))?;
    }
    Ok(RunOutcome {
        errors,
        diagnostics,
    })
}

fn export_hodge_matrices(
    scheme: &HodgeScheme<f64>,
    state: &TdglState<f64>,
    case: &ManufacturedCase<f64>,
    dir: &Path,
) -> Result<()> {
    let (m, _) = scheme.psi_system(state, case)?;
    io::write_matrix_market(&dir.join("psi_system_step1.mtx"), &m)?;
    for (name, a) in scheme.spd_matrices() {
        io::write_matrix_market(&dir.join(format!("{name}.mtx")), a)?;
    }
    Ok(())
}

/// `cmd_run`: a single run writing into `cfg.output_dir`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome> {
    run_manufactured(cfg, Some(&cfg.output_dir))
}

/// Rates from the two finest runs, `NaN` where undefined.
pub fn study_rates(rows: &[ErrorRow]) -> Option<[f64; 5]> {
    let [.., a, b] = rows else { return None };
    let r = |x: f64, y: f64| convergence_rate(x, y).unwrap_or(f64::NAN);
    Some([
        r(a.e_psi, b.e_psi),
        r(a.e_mod_psi, b.e_mod_psi),
        r(a.e_a, b.e_a),
        r(a.e_u, b.e_u),
        r(a.e_v, b.e_v),
    ])
}

/// `cmd_convergence_study`: one run per `M` (concurrently, each in its own
/// `M<m>` subdirectory) and `rates.csv` in `cfg.output_dir`.
pub fn cmd_convergence_study(cfg: &RunConfig, ms: &[usize]) -> Result<RatesTable> {
    if ms.is_empty() {
        return Err(Error::Config("empty mesh list".into()));
    }
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("mesh list must be strictly ascending".into()));
    }
    let configs: Vec<RunConfig> = ms
        .iter()
        .map(|&m| RunConfig {
            m,
            output_dir: cfg.output_dir.join(format!("M{m}")),
            ..cfg.clone()
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let results: Vec<Result<RunOutcome>> = configs
        .par_iter()
        .map(|c| run_manufactured(c, Some(&c.output_dir)))
        .collect();
    let mut runs = Vec::with_capacity(ms.len());
    let mut failure = None;
    for (m, r) in ms.iter().zip(results) {
        match r {
            Ok(o) => runs.push((*m, o.errors)),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    fs::create_dir_all(&cfg.output_dir)?;
    if let Some(e) = failure {
        let partial = RatesTable { runs, rates: None };
        io::write_rates_csv(&cfg.output_dir.join("rates.partial.csv"), &partial)?;
        return Err(e);
    }
    let rows: Vec<ErrorRow> = runs.iter().map(|(_, r)| r.clone()).collect();
    let table = RatesTable {
        rates: study_rates(&rows),
        runs,
    };
    io::write_rates_csv(&cfg.output_dir.join("rates.csv"), &table)?;
    Ok(table)
}

/// Outcome of `cmd_compare`.
#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub hodge: ErrorRow,
    pub direct: ErrorRow,
    /// Whether both schemes assemble bit-identical order-parameter matrices
    /// when given the same `ψ` and elementwise `A`.
    pub psi_matrices_identical: bool,
}

/// Both schemes with identical `M`, `τ`, `T`; writes `compare.csv` and
/// `compare.txt`.
pub fn cmd_compare(cfg: &RunConfig) -> Result<CompareOutcome> {
    let hc = RunConfig {
        scheme: SchemeKind::Hodge,
        output_dir: cfg.output_dir.join("hodge"),
        ..cfg.clone()
    };
    let dc = RunConfig {
        scheme: SchemeKind::Direct,
        output_dir: cfg.output_dir.join("direct"),
        ..cfg.clone()
    };
    let (h, d) = rayon::join(
        || run_manufactured(&hc, Some(&hc.output_dir)),
        || run_manufactured(&dc, Some(&dc.output_dir)),
    );
    let (h, d) = (h?, d?);
    let identical = psi_matrix_cross_check(cfg)?;
    fs::create_dir_all(&cfg.output_dir)?;
    io::write_errors_csv(
        &cfg.output_dir.join("compare.csv"),
        &[h.errors.clone(), d.errors.clone()],
    )?;
    let report = format!(
        "M={} tau={}\nA error hodge={} direct={} ratio={}\npsi matrices identical for identical A data: {}\n",
        cfg.m,
        io::fmt_num(h.errors.tau),
        io::fmt_num(h.errors.e_a),
        io::fmt_num(d.errors.e_a),
        io::fmt_num(d.errors.e_a / h.errors.e_a),
        identical
    );
    fs::write(cfg.output_dir.join("compare.txt"), report)?;
    Ok(CompareOutcome {
        hodge: h.errors,
        direct: d.errors,
        psi_matrices_identical: identical,
    })
}

/// Takes one direct step, feeds the resulting `ψ` and element-averaged `A`
/// into both schemes' order-parameter assembly, and compares the matrices
/// bit for bit.
pub fn psi_matrix_cross_check(cfg: &RunConfig) -> Result<bool> {
    let sc = RunConfig {
        t_final: cfg.resolved_tau()?,
        ..cfg.clone()
    }
    .scheme_config()?;
    let case = ManufacturedCase::<f64>::new()?;
    let mesh = build_l_shape_mesh::<f64>(cfg.m)?;
    let direct = DirectScheme::new(P1Space::new(mesh.clone()), sc)?;
    let hodge = HodgeScheme::new(P1Space::new(mesh), sc)?;
    let (ds, _) = direct.step(&direct.init_from_exact(&case)?, &case)?;
    let mut hs = hodge.zero_state();
    hs.psi = ds.psi.clone();
    hs.a = direct.element_average(&ds.a);
    hs.step = ds.step;
    let (md, rd) = direct.psi_system(&ds, &case)?;
    let (mh, rh) = hodge.psi_system(&hs, &case)?;
    Ok(md == mh && rd == rh)
}
