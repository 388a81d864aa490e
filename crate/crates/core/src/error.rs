use thiserror::Error;

use crate::sparse::SolveError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Unknown solved within one time step; used to name the failing solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Psi,
    P,
    Q,
    U,
    V,
    /// Nodal vector potential of the direct scheme.
    A,
    /// Initial-data Poisson problems.
    Init,
}

impl std::fmt::Display for Subsystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Subsystem::Psi => "psi",
            Subsystem::P => "p",
            Subsystem::Q => "q",
            Subsystem::U => "u",
            Subsystem::V => "v",
            Subsystem::A => "A",
            Subsystem::Init => "initial data",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh parameter M={m}: {reason}")]
    MeshParameter { m: usize, reason: &'static str },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("point ({x}, {y}) lies in the removed quadrant of the L-shaped domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{subsystem} solve failed at step {step}: {source}")]
    Solve {
        subsystem: Subsystem,
        step: usize,
        #[source]
        source: SolveError,
    },
    #[error(transparent)]
    Linear(#[from] SolveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
