//! Radial comparison barriers and their supersolution certificates.
//!
//! Three explicit radial functions dominate positive solutions near a
//! singular boundary portion:
//!
//! * the power barrier `v(s) = c₂ ((s-ε)^{-β_q} - (R-ε)^{-β_q})` on an
//!   annulus `ε < s < R` (for `q < p`),
//! * the logarithmic barrier `v(s) = (p-1) ln((R-ε)/(s-ε))` (for `q = p`),
//! * the tangential barrier `v(s) = a (r'-s)^{-β_q} - b`, singular at the
//!   outer radius, used for estimates up to the boundary.
//!
//! For a radial profile the operator reduces to
//!
//! ```text
//!   -Δ_p v + |∇v|^q = |v'|^{p-2} ( -(p-1) v'' - (N-1) v'/s ) + |v'|^q,
//! ```
//!
//! and a supersolution certificate is a nonnegative residual on the whole
//! radius range. For the power barrier the blow-up terms at `s -> ε` share
//! the power `(s-ε)^{-q(β_q+1)}` and the certificate reduces to the
//! amplitude condition `(c₂ β_q)^{q+1-p} >= (p-1)(β_q+1)`, with equality at
//!
//! ```text
//!   c₂ = (p-q)^{-1} (p-1)^{1/(q+1-p)} (q+1-p)^{(q-p)/(q+1-p)}.
//! ```
//!
//! A widely printed variant of this constant,
//! `(p-q)^{-1} (q+p-1)^{(q-p)/(q+1-p)}`, fails the certificate by orders of
//! magnitude away from trivial cases (the residual dives to `-∞` at the
//! inner radius); it is kept as [`c2_printed`] so the failure can be
//! demonstrated, and [`c2_supersolution`] is what the toolkit certifies.

use serde::Serialize;

use crate::exponents::beta_q;
use crate::params::{ParamError, ProblemParams};
use crate::real::Real;

/// Which explicit barrier to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    /// `c₂((s-ε)^{-β_q} - (R-ε)^{-β_q})`, supersolution for `q < p`.
    PowerSupersolution,
    /// `(p-1) ln((R-ε)/(s-ε))`, supersolution for `q = p`.
    LogSupersolution,
    /// `a (r'-s)^{-β_q} - b`, singular at the outer radius `r'`.
    Tangential,
}

/// A fully parameterized radial barrier.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarrierSpec<T> {
    pub kind: BarrierKind,
    /// Center offset: `ε` for the inner barriers, `τ` for the tangential.
    pub offset: T,
    /// Outer radius: `R`, or `r'` for the tangential barrier.
    pub outer: T,
    /// Amplitude `c₂` or `a`.
    pub amplitude: T,
    /// Vertical shift `b` (tangential barrier only).
    pub shift: T,
}

/// Barrier evaluation failures.
#[derive(Debug, Clone, PartialEq)]
pub enum BarrierError {
    Param(ParamError),
    /// Parameters outside the cited construction ranges.
    BadGeometry(&'static str),
    /// `v'` vanished on the grid (degenerate p-Laplacian).
    DegenerateGradient { s: f64 },
    /// Grid node outside the barrier domain.
    NodeOutOfDomain { s: f64 },
    /// Barrier kind incompatible with `q` (log needs `q = p`, power `q < p`).
    WrongAbsorption(&'static str),
}

impl From<ParamError> for BarrierError {
    fn from(e: ParamError) -> Self {
        BarrierError::Param(e)
    }
}

impl std::fmt::Display for BarrierError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BarrierError::Param(e) => write!(f, "{e}"),
            BarrierError::BadGeometry(w) => write!(f, "bad barrier geometry: {w}"),
            BarrierError::DegenerateGradient { s } => {
                write!(f, "barrier gradient vanished at s = {s}")
            }
            BarrierError::NodeOutOfDomain { s } => write!(f, "node s = {s} outside the barrier domain"),
            BarrierError::WrongAbsorption(w) => write!(f, "{w}"),
        }
    }
}

impl std::error::Error for BarrierError {}

/// The printed amplitude `(p-q)^{-1} (q+p-1)^{(q-p)/(q+1-p)}`.
///
/// Kept as a diagnostic: it does not certify (see module docs).
pub fn c2_printed<T: Real>(params: &ProblemParams<T>) -> Result<T, ParamError> {
    let q = params.q()?;
    let p = params.p();
    let expo = (q - p) / (q + T::one() - p);
    Ok((q + p - T::one()).powf(expo) / (p - q))
}

/// The smallest amplitude that makes the power barrier a supersolution on
/// every annulus: `(p-q)^{-1} (p-1)^{1/(q+1-p)} (q+1-p)^{(q-p)/(q+1-p)}`.
pub fn c2_supersolution<T: Real>(params: &ProblemParams<T>) -> Result<T, ParamError> {
    let q = params.q()?;
    let p = params.p();
    let one = T::one();
    let expo = (q - p) / (q + one - p);
    Ok((p - one).powf(one / (q + one - p)) * (q + one - p).powf(expo) / (p - q))
}

impl<T: Real> BarrierSpec<T> {
    /// Power barrier with the certified amplitude [`c2_supersolution`].
    pub fn power(params: &ProblemParams<T>, eps: T, outer: T) -> Result<Self, BarrierError> {
        Self::power_with_amplitude(params, eps, outer, c2_supersolution(params)?)
    }

    /// Power barrier with an explicit amplitude (e.g. [`c2_printed`]).
    pub fn power_with_amplitude(
        params: &ProblemParams<T>,
        eps: T,
        outer: T,
        amplitude: T,
    ) -> Result<Self, BarrierError> {
        params.q().map_err(|_| {
            BarrierError::WrongAbsorption("power barrier requires q < p strictly")
        })?;
        if !(eps >= T::zero() && outer > eps) {
            return Err(BarrierError::BadGeometry("need 0 <= eps < R"));
        }
        Ok(BarrierSpec {
            kind: BarrierKind::PowerSupersolution,
            offset: eps,
            outer,
            amplitude,
            shift: T::zero(),
        })
    }

    /// Logarithmic barrier for the borderline absorption `q = p`.
    pub fn log(params: &ProblemParams<T>, eps: T, outer: T) -> Result<Self, BarrierError> {
        let q = params.q_allow_critical()?;
        if q != params.p() {
            return Err(BarrierError::WrongAbsorption("log barrier requires q = p"));
        }
        if !(eps >= T::zero() && outer > eps) {
            return Err(BarrierError::BadGeometry("need 0 <= eps < R"));
        }
        Ok(BarrierSpec {
            kind: BarrierKind::LogSupersolution,
            offset: eps,
            outer,
            amplitude: params.p() - T::one(),
            shift: T::zero(),
        })
    }

    /// Tangential barrier `a (r'-s)^{-β_q} - b`, vanishing at `s = τ`.
    pub fn tangential(
        params: &ProblemParams<T>,
        tau: T,
        r_prime: T,
        amplitude: T,
    ) -> Result<Self, BarrierError> {
        let bq = beta_q(params)?;
        if !(tau > T::zero() && tau <= r_prime / T::of(2.0)) {
            return Err(BarrierError::BadGeometry("need 0 < tau <= r'/2"));
        }
        let shift = amplitude * (r_prime - tau).powf(-bq);
        Ok(BarrierSpec {
            kind: BarrierKind::Tangential,
            offset: tau,
            outer: r_prime,
            amplitude,
            shift,
        })
    }

    /// Smallest tangential amplitude satisfying the certificate on `[τ, r')`.
    pub fn tangential_min_amplitude(
        params: &ProblemParams<T>,
        tau: T,
        r_prime: T,
    ) -> Result<T, BarrierError> {
        let q = params.q()?;
        let p = params.p();
        let bq = beta_q(params)?;
        let one = T::one();
        let rhs = (p - one) / (q + one - p)
            + (params.nf() - one) * (r_prime - tau) / tau;
        Ok(rhs.powf(one / (q + one - p)) / bq)
    }

    /// Barrier value at radius `s`.
    pub fn value(&self, params: &ProblemParams<T>, s: T) -> Result<T, BarrierError> {
        let (v, _, _) = self.derivs(params, s)?;
        Ok(v)
    }

    fn derivs(&self, params: &ProblemParams<T>, s: T) -> Result<(T, T, T), BarrierError> {
        let sf = s.to_f64().unwrap_or(f64::NAN);
        match self.kind {
            BarrierKind::PowerSupersolution => {
                let bq = beta_q(params)?;
                let d = s - self.offset;
                if !(d > T::zero() && s < self.outer) {
                    return Err(BarrierError::NodeOutOfDomain { s: sf });
                }
                let c = self.amplitude;
                let v = c * (d.powf(-bq) - (self.outer - self.offset).powf(-bq));
                let vp = -c * bq * d.powf(-bq - T::one());
                let vpp = c * bq * (bq + T::one()) * d.powf(-bq - T::of(2.0));
                Ok((v, vp, vpp))
            }
            BarrierKind::LogSupersolution => {
                let d = s - self.offset;
                if !(d > T::zero() && s < self.outer) {
                    return Err(BarrierError::NodeOutOfDomain { s: sf });
                }
                let pm1 = self.amplitude;
                let v = pm1 * ((self.outer - self.offset) / d).ln();
                let vp = -pm1 / d;
                let vpp = pm1 / (d * d);
                Ok((v, vp, vpp))
            }
            BarrierKind::Tangential => {
                let bq = beta_q(params)?;
                let d = self.outer - s;
                if !(d > T::zero() && s >= self.offset) {
                    return Err(BarrierError::NodeOutOfDomain { s: sf });
                }
                let a = self.amplitude;
                let v = a * d.powf(-bq) - self.shift;
                let vp = a * bq * d.powf(-bq - T::one());
                let vpp = a * bq * (bq + T::one()) * d.powf(-bq - T::of(2.0));
                Ok((v, vp, vpp))
            }
        }
    }
}

/// Result of a nodewise certificate evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport<T> {
    /// Smallest residual over the grid.
    pub min_residual: T,
    /// Smallest residual relative to the local term magnitude.
    pub min_residual_scaled: T,
    /// Whether the scaled residual stays above `-1e-12` everywhere.
    pub sign_ok: bool,
    /// For the tangential barrier: the amplitude condition
    /// `(a β_q)^{q+1-p} >= (p-1)/(q+1-p) + (N-1)(r'-s)/s` on the grid.
    pub amplitude_ok: Option<bool>,
    /// Radius attaining the minimum.
    pub argmin: T,
}

/// Evaluates the radial supersolution residual on a grid.
pub fn barrier_residual<T: Real>(
    spec: &BarrierSpec<T>,
    params: &ProblemParams<T>,
    grid: &[T],
) -> Result<BarrierReport<T>, BarrierError> {
    let q = match spec.kind {
        BarrierKind::LogSupersolution => params.q_allow_critical()?,
        _ => params.q()?,
    };
    let p = params.p();
    let n = params.nf();
    let one = T::one();
    let mut min_res = T::infinity();
    let mut min_scaled = T::infinity();
    let mut argmin = T::nan();
    for &s in grid {
        let (_, vp, vpp) = spec.derivs(params, s)?;
        if vp == T::zero() {
            return Err(BarrierError::DegenerateGradient {
                s: s.to_f64().unwrap_or(f64::NAN),
            });
        }
        let grad = vp.abs();
        let t_diff = -(p - one) * vpp * grad.powf(p - T::of(2.0));
        let t_curv = -(n - one) * vp / s * grad.powf(p - T::of(2.0));
        let t_abs = grad.powf(q);
        let res = t_diff + t_curv + t_abs;
        let scale = t_diff.abs().max(t_curv.abs()).max(t_abs.abs());
        let scaled = res / scale;
        if res < min_res {
            min_res = res;
            argmin = s;
        }
        min_scaled = min_scaled.min(scaled);
    }
    let amplitude_ok = match spec.kind {
        BarrierKind::Tangential => {
            let bq = beta_q(params)?;
            let lhs = (spec.amplitude * bq).powf(q + one - p);
            let ok = grid.iter().all(|&s| {
                lhs >= (p - one) / (q + one - p) + (n - one) * (spec.outer - s) / s
            });
            Some(ok)
        }
        _ => None,
    };
    Ok(BarrierReport {
        min_residual: min_res,
        min_residual_scaled: min_scaled,
        sign_ok: min_scaled >= T::of(-1e-12),
        amplitude_ok,
        argmin,
    })
}
