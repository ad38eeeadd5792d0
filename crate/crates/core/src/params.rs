//! Problem parameters `(N, p, q)` and their validity ranges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// The triple `(N, p, q)` of the equation `-Δ_p u + |∇u|^q = 0`.
///
/// `N >= 2` is the space dimension, `1 < p <= N` the diffusion exponent and
/// `q` the absorption exponent. `q` is optional: the spherical p-harmonic
/// eigenproblem does not involve it. When present it must satisfy
/// `p - 1 < q <= p`; the endpoint `q = p` is admitted only so that the
/// logarithmic comparison barrier can be evaluated, and every operation
/// built on the similarity exponent `β_q` rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams<T> {
    n: u32,
    p: T,
    q: Option<T>,
}

/// Validation and domain errors for parameter arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    /// `N < 2`.
    DimensionTooSmall { n: u32 },
    /// `p` outside `(1, N]`.
    DiffusionExponentOutOfRange { p: f64, n: u32 },
    /// `q` outside `(p-1, p]`.
    AbsorptionExponentOutOfRange { q: f64, p: f64 },
    /// An operation required `q` but the parameters carry none.
    AbsorptionExponentMissing,
    /// An operation required `q < p` strictly (`β_q` degenerates at `q = p`).
    AbsorptionExponentCritical { q: f64, p: f64 },
    /// A parameter was not finite.
    NotFinite,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::DimensionTooSmall { n } => write!(f, "dimension N = {n} is below 2"),
            ParamError::DiffusionExponentOutOfRange { p, n } => {
                write!(f, "p = {p} outside (1, N] with N = {n}")
            }
            ParamError::AbsorptionExponentOutOfRange { q, p } => {
                write!(f, "q = {q} outside (p-1, p] with p = {p}")
            }
            ParamError::AbsorptionExponentMissing => {
                write!(f, "operation requires the absorption exponent q")
            }
            ParamError::AbsorptionExponentCritical { q, p } => {
                write!(f, "q = {q} must be strictly below p = {p}")
            }
            ParamError::NotFinite => write!(f, "parameters must be finite"),
        }
    }
}

impl std::error::Error for ParamError {}

impl<T: Real> ProblemParams<T> {
    /// Purely p-harmonic parameters (no absorption exponent).
    pub fn new(n: u32, p: T) -> Result<Self, ParamError> {
        if !p.is_finite() {
            return Err(ParamError::NotFinite);
        }
        if n < 2 {
            return Err(ParamError::DimensionTooSmall { n });
        }
        if p <= T::one() || p > T::of(n as f64) {
            return Err(ParamError::DiffusionExponentOutOfRange {
                p: p.to_f64().unwrap_or(f64::NAN),
                n,
            });
        }
        Ok(Self { n, p, q: None })
    }

    /// Parameters with an absorption exponent `q` in `(p-1, p]`.
    pub fn with_q(n: u32, p: T, q: T) -> Result<Self, ParamError> {
        Self::new(n, p)?;
        if !q.is_finite() {
            return Err(ParamError::NotFinite);
        }
        if q <= p - T::one() || q > p {
            return Err(ParamError::AbsorptionExponentOutOfRange {
                q: q.to_f64().unwrap_or(f64::NAN),
                p: p.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { n, p, q: Some(q) })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dimension as a scalar.
    pub fn nf(&self) -> T {
        T::of(self.n as f64)
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q_opt(&self) -> Option<T> {
        self.q
    }

    /// The absorption exponent, required strictly subcritical (`q < p`).
    pub fn q(&self) -> Result<T, ParamError> {
        let q = self.q.ok_or(ParamError::AbsorptionExponentMissing)?;
        if q >= self.p {
            return Err(ParamError::AbsorptionExponentCritical {
                q: q.to_f64().unwrap_or(f64::NAN),
                p: self.p.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(q)
    }

    /// `q`, with the endpoint `q = p` allowed (log-barrier evaluations).
    pub fn q_allow_critical(&self) -> Result<T, ParamError> {
        self.q.ok_or(ParamError::AbsorptionExponentMissing)
    }

    /// Replaces `q`, revalidating.
    pub fn set_q(&self, q: T) -> Result<Self, ParamError> {
        Self::with_q(self.n, self.p, q)
    }
}
