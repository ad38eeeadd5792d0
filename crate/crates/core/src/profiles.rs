//! The strongly singular azimuthal profile `ω_*` of the absorption
//! equation, by shooting from the pole.
//!
//! In the azimuthal variable the separable ansatz `u = r^{-β_q} ω(θ)`
//! reduces the full equation to
//!
//! ```text
//!   -ω'' - (N-2) cot θ ω' - (p-2)(β²ω + ω'') ω'²/S + S^{(q+2-p)/2} = β Λ_β ω,
//!   S = β²ω² + ω'²,   β = β_q,
//! ```
//!
//! with `ω'(0) = 0` and `ω(π/2) = 0`. Shooting from `ω(0) = ω₀` produces a
//! dichotomy in `ω₀`:
//!
//! * small `ω₀`: the absorption (superlinear in the profile amplitude) is
//!   negligible, the dynamics approach the eigen-ODE at exponent
//!   `β_q > β_*` and the profile crosses zero before `π/2`;
//! * large `ω₀`: the absorption props the profile up, which reaches `π/2`
//!   positive (or blows up in finite angle for very large starts).
//!
//! The unique positive profile sits on the interface, and exists exactly
//! when `q < q_*`; for `q >= q_*` (`β_q <= β_*`) no start crosses zero and
//! the bisection bracket is empty, which is the numerical face of the
//! nonexistence threshold.
//!
//! Pole start: substituting `ω = ω₀ + a θ²` into the divided ODE and
//! clearing `cot θ` by L'Hôpital forces
//! `a = [(β ω₀)^{q+2-p} - β Λ_β ω₀] / (2(N-1))`.

use serde::Serialize;

use crate::eigensolver::{AzimuthalProfile, ProfileKind};
use crate::exponents::{beta_q, lambda_of};
use crate::numerics::{rk4_step2, second_diff};
use crate::params::{ParamError, ProblemParams};
use crate::real::Real;

/// Initial azimuth for the pole-regularized integration.
pub const THETA0: f64 = 1e-6;

/// How a single shot from the pole ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ShotExit<T> {
    /// Reached `θ = π/2` with the recorded value.
    ReachedEnd,
    /// First zero crossing strictly inside the interval.
    CrossedZero { theta_cross: T },
    /// Step control failed (finite-angle blow-up).
    DerivativeBlowup,
}

/// Outcome of one shot.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShotOutcome<T> {
    pub omega0: T,
    pub exit: ShotExit<T>,
    /// `ω(π/2)` for `ReachedEnd`, `0` otherwise.
    pub end_value: T,
}

/// Profile-solver failures.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileError {
    Param(ParamError),
    /// Argument out of range.
    BadArgument(&'static str),
    /// `β²ω² + ω'² = 0` in a residual evaluation.
    DegeneratePoint,
    /// No `(crossed, reached)` bracket over the sweep: the threshold
    /// behaviour (`q >= q_*`), reported with the sweep bounds.
    NoBracket { omega0_lo: f64, omega0_hi: f64 },
    /// `nonexistence_scan` called in the subcritical regime.
    SubcriticalRegime { q: f64, q_star: f64 },
}

impl From<ParamError> for ProfileError {
    fn from(e: ParamError) -> Self {
        ProfileError::Param(e)
    }
}

impl std::fmt::Display for ProfileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileError::Param(e) => write!(f, "{e}"),
            ProfileError::BadArgument(w) => write!(f, "bad argument: {w}"),
            ProfileError::DegeneratePoint => write!(f, "beta^2 w^2 + w'^2 vanished"),
            ProfileError::NoBracket {
                omega0_lo,
                omega0_hi,
            } => write!(
                f,
                "no crossing/reaching bracket for omega0 in [{omega0_lo}, {omega0_hi}]"
            ),
            ProfileError::SubcriticalRegime { q, q_star } => {
                write!(f, "q = {q} is below q_* = {q_star}; a profile exists")
            }
        }
    }
}

impl std::error::Error for ProfileError {}

/// Divided-form residual of the azimuthal absorption ODE at one point;
/// zero on exact solutions.
pub fn hj_residual<T: Real>(
    omega: T,
    omega_theta: T,
    omega_thetatheta: T,
    theta: T,
    beta: T,
    params: &ProblemParams<T>,
) -> Result<T, ProfileError> {
    let q = params.q()?;
    let p = params.p();
    let n = params.nf();
    let s = beta * beta * omega * omega + omega_theta * omega_theta;
    if !(s > T::zero()) {
        return Err(ProfileError::DegeneratePoint);
    }
    let lam = lambda_of(beta, params);
    let cot = theta.cos() / theta.sin();
    Ok(
        -omega_thetatheta - (n - T::of(2.0)) * cot * omega_theta
            - (p - T::of(2.0)) * (beta * beta * omega + omega_thetatheta) * omega_theta
                * omega_theta
                / s
            + s.powf((q + T::of(2.0) - p) / T::of(2.0))
            - beta * lam * omega,
    )
}

/// `ω''` solved from the divided absorption ODE.
#[allow(clippy::too_many_arguments)]
fn accel<T: Real>(theta: T, w: T, v: T, beta: T, lam: T, n: T, p: T, q: T) -> T {
    let s = beta * beta * w * w + v * v;
    let cot = theta.cos() / theta.sin();
    let num = -((n - T::of(2.0)) * cot * v
        + (p - T::of(2.0)) * beta * beta * w * v * v / s
        + beta * lam * w)
        + s.powf((q + T::of(2.0) - p) / T::of(2.0));
    let den = T::one() + (p - T::of(2.0)) * v * v / s;
    num / den
}

struct ShotTrace<T> {
    outcome: ShotOutcome<T>,
    /// Profile values at `0, h, ..., π/2` (only when the end was reached).
    omega: Option<(Vec<T>, Vec<T>)>,
}

/// Integrates one shot on `m` output intervals, substepping each interval
/// adaptively so that stiff large-amplitude starts stay stable.
fn shoot<T: Real>(
    omega0: T,
    params: &ProblemParams<T>,
    m: usize,
    keep: bool,
) -> Result<ShotTrace<T>, ProfileError> {
    let q = params.q()?;
    let p = params.p();
    let n = params.nf();
    let beta = beta_q(params)?;
    let lam = lambda_of(beta, params);
    let t0 = T::of(THETA0);
    let h = T::half_pi() / T::of(m as f64);
    let blow = T::of(1e12) * omega0.max(T::one());

    let f = |t: T, y: [T; 2]| [y[1], accel(t, y[0], y[1], beta, lam, n, p, q)];
    // series start at the pole
    let a = ((beta * omega0).powf(q + T::of(2.0) - p) - beta * lam * omega0)
        / (T::of(2.0) * (n - T::one()));
    let mut y = [omega0 + a * t0 * t0, T::of(2.0) * a * t0];
    let mut t = t0;

    let mut omega = Vec::new();
    let mut omega_theta = Vec::new();
    if keep {
        omega.reserve(m + 1);
        omega_theta.reserve(m + 1);
        omega.push(omega0);
        omega_theta.push(T::zero());
    }

    for j in 0..m {
        let t_next = if j == m - 1 {
            T::half_pi()
        } else {
            T::of((j + 1) as f64) * h
        };
        // substep count from the local stiffness |ω''| h / |scale|
        let acc = f(t, y)[1].abs();
        let scale = y[0].abs().max(y[1].abs()).max(omega0 * T::of(1e-6));
        let mut nsub = ((t_next - t) * acc / (T::of(0.05) * scale))
            .to_f64()
            .unwrap_or(f64::INFINITY);
        if !nsub.is_finite() {
            return Ok(ShotTrace {
                outcome: ShotOutcome {
                    omega0,
                    exit: ShotExit::DerivativeBlowup,
                    end_value: T::zero(),
                },
                omega: None,
            });
        }
        nsub = nsub.ceil().clamp(1.0, 4096.0);
        let hs = (t_next - t) / T::of(nsub as usize as f64);
        for _ in 0..(nsub as usize) {
            let y_prev = y;
            let t_prev = t;
            y = rk4_step2(&f, t, y, hs);
            t = t + hs;
            if !y[0].is_finite() || !y[1].is_finite() || y[1].abs() > blow || y[0] > blow {
                return Ok(ShotTrace {
                    outcome: ShotOutcome {
                        omega0,
                        exit: ShotExit::DerivativeBlowup,
                        end_value: T::zero(),
                    },
                    omega: None,
                });
            }
            if y[0] <= T::zero() && t < T::half_pi() - T::of(1e-9) {
                // refine the crossing angle by bisection on the last substep
                let mut lo = (t_prev, y_prev);
                let mut hi_t = t;
                for _ in 0..40 {
                    let mid = T::of(0.5) * (lo.0 + hi_t);
                    let ym = rk4_step2(&f, lo.0, lo.1, mid - lo.0);
                    if ym[0] > T::zero() {
                        lo = (mid, ym);
                    } else {
                        hi_t = mid;
                    }
                }
                return Ok(ShotTrace {
                    outcome: ShotOutcome {
                        omega0,
                        exit: ShotExit::CrossedZero {
                            theta_cross: T::of(0.5) * (lo.0 + hi_t),
                        },
                        end_value: T::zero(),
                    },
                    omega: None,
                });
            }
        }
        t = t_next;
        if keep {
            omega.push(y[0]);
            omega_theta.push(y[1]);
        }
    }
    // a nonpositive carry means the crossing happened inside the last
    // interval: classify by sign so the bisection interface is unbiased
    if y[0] <= T::zero() {
        let theta_cross = if y[1] < T::zero() {
            T::half_pi() - y[0] / y[1]
        } else {
            T::half_pi()
        };
        return Ok(ShotTrace {
            outcome: ShotOutcome {
                omega0,
                exit: ShotExit::CrossedZero {
                    theta_cross: theta_cross.min(T::half_pi()),
                },
                end_value: T::zero(),
            },
            omega: None,
        });
    }
    Ok(ShotTrace {
        outcome: ShotOutcome {
            omega0,
            exit: ShotExit::ReachedEnd,
            end_value: y[0],
        },
        omega: if keep { Some((omega, omega_theta)) } else { None },
    })
}

/// One shot from `ω(0) = ω₀`; records the first zero crossing or the
/// value carried to `π/2`.
pub fn shoot_profile<T: Real>(
    omega0: T,
    params: &ProblemParams<T>,
    m: usize,
) -> Result<ShotOutcome<T>, ProfileError> {
    if !(omega0 > T::zero()) {
        return Err(ProfileError::BadArgument("omega0 must be positive"));
    }
    if m < 64 {
        return Err(ProfileError::BadArgument("grid below 64 intervals"));
    }
    Ok(shoot(omega0, params, m, false)?.outcome)
}

/// Pole-balance estimate of the profile amplitude: the start with a flat
/// series (`a = 0`), `ω₀ = (Λ_β β^{p-1-q})^{1/(q+1-p)}`. Used to size the
/// sweep range; near the threshold the true amplitude drops far below it.
pub fn amplitude_scale<T: Real>(params: &ProblemParams<T>) -> Result<T, ProfileError> {
    let q = params.q()?;
    let p = params.p();
    let beta = beta_q(params)?;
    let lam = lambda_of(beta, params);
    if lam <= T::zero() {
        return Ok(T::one());
    }
    Ok((lam * beta.powf(p - T::one() - q)).powf(T::one() / (q + T::one() - p)))
}

fn crossed<T: Real>(o: &ShotOutcome<T>) -> bool {
    matches!(o.exit, ShotExit::CrossedZero { .. })
}

/// Solves for the strongly singular profile by bisection on `ω₀` between a
/// crossing start and a reaching start.
///
/// The geometric sweep covers `[1e-6, max(1e6, 10^4 · amplitude scale)]`;
/// an empty bracket is the `q >= q_*` signal and returns
/// [`ProfileError::NoBracket`].
pub fn solve_omega_star<T: Real>(
    params: &ProblemParams<T>,
    tol: T,
    m: usize,
) -> Result<AzimuthalProfile<T>, ProfileError> {
    if !(tol > T::zero()) {
        return Err(ProfileError::BadArgument("tol must be positive"));
    }
    let beta = beta_q(params)?;
    let sweep_lo = T::of(1e-6);
    let sweep_hi = T::of(1e6).max(T::of(1e4) * amplitude_scale(params)?);
    // coarse sweep to bracket the interface
    let mut lo: Option<T> = None;
    let mut hi: Option<T> = None;
    let mut w0 = sweep_lo;
    let step = T::of(2.0);
    while w0 <= sweep_hi {
        let out = shoot(w0, params, m.min(1024), false)?.outcome;
        if crossed(&out) {
            lo = Some(w0);
        } else if lo.is_some() {
            hi = Some(w0);
            break;
        }
        w0 = w0 * step;
    }
    let (mut lo, mut hi) = match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        _ => {
            return Err(ProfileError::NoBracket {
                omega0_lo: sweep_lo.to_f64().unwrap_or(f64::NAN),
                omega0_hi: sweep_hi.to_f64().unwrap_or(f64::NAN),
            })
        }
    };
    // geometric bisection at full resolution
    let mut guard = 0;
    while hi / lo > T::one() + tol && guard < 400 {
        let mid = (lo * hi).sqrt();
        if crossed(&shoot(mid, params, m, false)?.outcome) {
            lo = mid;
        } else {
            hi = mid;
        }
        guard += 1;
    }
    // reconstruct on the reaching side so the trace exists all the way
    let trace = shoot(hi, params, m, true)?;
    let (mut omega, omega_theta) = match trace.omega {
        Some(v) => v,
        None => {
            // blow-up exactly at the interface resolution: fall back a hair
            let trace = shoot(hi * (T::one() + T::of(1e-12)), params, m, true)?;
            trace.omega.ok_or(ProfileError::BadArgument(
                "no reaching trace at the bisection interface",
            ))?
        }
    };
    let last = omega.len() - 1;
    if omega[last] < T::zero() {
        omega[last] = T::zero();
    }
    let h = T::half_pi() / T::of(m as f64);
    let theta: Vec<T> = (0..=m).map(|j| T::of(j as f64) * h).collect();
    let mut profile = AzimuthalProfile {
        beta,
        theta,
        omega,
        omega_theta,
        residual_sup: T::zero(),
        kind: ProfileKind::Singular,
    };
    profile.residual_sup = singular_residual_sup(&profile, params)?;
    Ok(profile)
}

/// Sup norm of [`hj_residual`] on interior nodes with centered-difference
/// second derivatives.
pub fn singular_residual_sup<T: Real>(
    profile: &AzimuthalProfile<T>,
    params: &ProblemParams<T>,
) -> Result<T, ProfileError> {
    let h = profile.theta[1] - profile.theta[0];
    let mut sup = T::zero();
    for i in 1..profile.theta.len() - 1 {
        let s = profile.beta * profile.beta * profile.omega[i] * profile.omega[i]
            + profile.omega_theta[i] * profile.omega_theta[i];
        if !(s > T::zero()) {
            continue;
        }
        let wtt = second_diff(&profile.omega, i, h);
        let r = hj_residual(
            profile.omega[i],
            profile.omega_theta[i],
            wtt,
            profile.theta[i],
            profile.beta,
            params,
        )?;
        sup = sup.max(r.abs());
    }
    Ok(sup)
}

/// Log-spaced sweep specification for the nonexistence scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepSpec<T> {
    pub omega0_lo: T,
    pub omega0_hi: T,
    pub count: usize,
}

impl<T: Real> Default for SweepSpec<T> {
    fn default() -> Self {
        SweepSpec {
            omega0_lo: T::of(1e-6),
            omega0_hi: T::of(1e6),
            count: 49,
        }
    }
}

/// Result of a nonexistence sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport<T> {
    pub q: T,
    pub q_star_proxy: Option<T>,
    pub outcomes: Vec<ShotOutcome<T>>,
    /// True when no start crossed zero (the expected `q >= q_*` signature).
    pub one_sided: bool,
    /// A found bracket falsifies nonexistence; reported, never thrown.
    pub falsification: Option<(T, T)>,
}

/// Sweeps starts over a log grid and asserts the outcomes stay on the
/// non-crossing side. Precondition: `q >= q_*` (pass the computed `β_*`).
pub fn nonexistence_scan<T: Real>(
    params: &ProblemParams<T>,
    beta_star: T,
    spec: &SweepSpec<T>,
    m: usize,
) -> Result<SweepReport<T>, ProfileError> {
    let q = params.q()?;
    let beta = beta_q(params)?;
    let q_star = crate::exponents::q_star(beta_star, params).map_err(ProfileError::Param)?;
    // tolerance absorbs rounding at the exact threshold q = q_*
    if beta > beta_star * (T::one() + T::of(1e-10)) {
        return Err(ProfileError::SubcriticalRegime {
            q: q.to_f64().unwrap_or(f64::NAN),
            q_star: q_star.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut outcomes = Vec::with_capacity(spec.count);
    let ratio = (spec.omega0_hi / spec.omega0_lo).powf(T::one() / T::of((spec.count - 1) as f64));
    let mut w0 = spec.omega0_lo;
    let mut last_crossed: Option<T> = None;
    let mut falsification = None;
    for _ in 0..spec.count {
        let out = shoot(w0, params, m, false)?.outcome;
        if crossed(&out) {
            last_crossed = Some(w0);
        } else if let Some(lc) = last_crossed {
            if falsification.is_none() {
                falsification = Some((lc, w0));
            }
        }
        outcomes.push(out);
        w0 = w0 * ratio;
    }
    let one_sided = outcomes.iter().all(|o| !crossed(o));
    Ok(SweepReport {
        q,
        q_star_proxy: Some(q_star),
        outcomes,
        one_sided,
        falsification,
    })
}
