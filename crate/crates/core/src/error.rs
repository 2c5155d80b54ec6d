use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("frequency ratio {omega_bar} is outside the perturbative regime (0, 1)")]
    OutsidePerturbativeRegime { omega_bar: f64 },

    /// The direct difference of the two shifted kernel branches loses about
    /// `-log10(omega_bar)` digits; below the crossover the series must be used.
    #[error("exact GW kernel at omega_bar = {omega_bar} is below the series crossover {threshold}")]
    PrecisionLoss { omega_bar: f64, threshold: f64 },

    #[error("sign-flip scan passed the separation ceiling {ceiling} without a flip")]
    ScanBudgetExceeded { ceiling: u64 },

    #[error("brute-force evaluation with N = {n} exceeds the budget N <= {limit}")]
    BudgetExceeded { n: u64, limit: u64 },

    #[error("mu*N = {mu_n} is at or beyond the pole of the closed form (mu*N must exceed -1)")]
    PoleInClosedForm { mu_n: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, target {target:e}")]
    QuadratureNotConverged { achieved: f64, target: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfiguration(msg.into())
}
