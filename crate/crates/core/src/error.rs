use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The cut would move at or faster than the excitation speed.
    #[error("superluminal cut: |u| = {u} is outside the relativistic guard")]
    SuperluminalCut { u: f64 },

    #[error("neutral field (degeneracy 1) cannot carry a magnetic flux, got gamma_B = {gamma_b}")]
    NeutralWithFlux { gamma_b: f64 },

    #[error("no flux: no bands")]
    NoFlux,

    #[error("zeta(-{n}) is outside the tabulated range n <= {max}")]
    OutOfRange { n: u32, max: u32 },

    #[error("finite-part fit is ill-conditioned: condition number {cond:.3e} exceeds {bound:.3e}")]
    IllConditioned { cond: f64, bound: f64 },

    #[error("finite-part fit needs at least 4 samples spanning one decade: {reason}")]
    InsufficientSamples { reason: String },

    #[error("light-cone singularity at (x, y, z) = ({x}, {y}, {z})")]
    LightconeSingular { x: f64, y: f64, z: f64 },

    #[error("effective split alpha is exactly zero; perturb the time split")]
    AlphaZero,

    #[error("divergence subtraction unreliable: residual {residual:.3e} exceeds {tolerance:.3e}")]
    FitUnreliable { residual: f64, tolerance: f64 },

    #[error("u = {u} sits on band boundary n = {n}; pass an explicit side")]
    OnBandBoundary { u: f64, n: i64 },

    #[error("band {band} has {found} interior grid points, need at least {needed}")]
    InsufficientPoints { band: i64, found: usize, needed: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),
}
