//! Spherical p-harmonic eigenpair `(β_*, ψ_*)` on the upper half sphere.
//!
//! The axisymmetric eigenprofile `ω(θ)` on `[0, π/2]` satisfies
//!
//! ```text
//!   -ω'' - (N-2) cot θ ω' - (p-2) (β²ω + ω'') ω'² / (β²ω² + ω'²) = β Λ_β ω,
//!   ω'(0) = 0,   ω(π/2) = 0,
//! ```
//!
//! with `Λ_β = β(p-1) + p - N`. Writing `ω = r cos φ`, `-ω' = β r sin φ`
//! turns this into a first-order phase system that is regular on the whole
//! interval once the tangent/cotangent quotients are cleared:
//!
//! ```text
//!   φ' = [(2-N) cot θ sin φ cos φ + (p-1) β sin²φ + Λ_β cos²φ] / D(φ),
//!   (ln r)' = [(2-N) cot θ sin²φ + (Λ_β - β) sin φ cos φ] / D(φ),
//!   D(φ) = (p-1) sin²φ + cos²φ,
//! ```
//!
//! with the series start `φ(θ₀) = Λ_β θ₀ / (N-1)` at `θ₀ = 1e-6`. The
//! boundary condition `ω(π/2) = 0` becomes the shooting target
//! `φ(π/2) = π/2`; the defect `φ(π/2) - π/2` is increasing in `β` and
//! changes sign exactly once on the analytic bracket, so bisection applies.
//!
//! Integration is one classical RK4 step per output interval, which makes
//! the defect a deterministic function of `(β, M)` with clean fourth-order
//! grid convergence.

use serde::Serialize;

use crate::exponents::lambda_of;
use crate::numerics::{rk4_step2, second_diff, simpson_uniform};
use crate::params::ProblemParams;
use crate::real::Real;

/// Initial azimuth for the regularized integration; the series start
/// carries an `O(θ₀²)` error, far below the solver tolerances.
pub const THETA0: f64 = 1e-6;

/// Default azimuthal grid size (number of intervals).
pub const DEFAULT_GRID: usize = 4096;

/// Eigensolver failures.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenError {
    /// Fewer than 64 grid intervals requested.
    GridTooCoarse { m: usize },
    /// The phase left `[0, π]`; reported with the exit azimuth.
    PhaseExit { theta: f64, phi: f64 },
    /// The defect does not change sign over the expanded bracket.
    NoSignChange { lo: f64, hi: f64 },
    /// Nonpositive trial exponent or tolerance.
    BadArgument(&'static str),
}

impl std::fmt::Display for EigenError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EigenError::GridTooCoarse { m } => write!(f, "grid of {m} intervals is below 64"),
            EigenError::PhaseExit { theta, phi } => {
                write!(f, "phase {phi} left [0, pi] at theta = {theta}")
            }
            EigenError::NoSignChange { lo, hi } => {
                write!(f, "shooting defect has one sign on [{lo}, {hi}]")
            }
            EigenError::BadArgument(what) => write!(f, "bad argument: {what}"),
        }
    }
}

impl std::error::Error for EigenError {}

/// Discretized phase-plane trajectory for one trial exponent.
#[derive(Debug, Clone)]
pub struct PhasePath<T> {
    /// Trial exponent.
    pub beta: T,
    /// Nodes: `θ₀, h, 2h, ..., Mh = π/2`.
    pub theta: Vec<T>,
    /// Phase angle per node.
    pub phi: Vec<T>,
    /// Log of the elliptic radius per node (`log r(θ₀) = 0`).
    pub log_r: Vec<T>,
    /// Phase derivative per node (the ODE right-hand side).
    pub phi_theta: Vec<T>,
    /// `φ(π/2) - π/2`.
    pub defect: T,
}

/// Which boundary-value problem a profile solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// p-harmonic eigenprofile `ψ_*`.
    Eigen,
    /// Strongly singular profile `ω_*` of the absorption equation.
    Singular,
}

/// An azimuthal profile on the uniform grid `0, h, ..., π/2`.
#[derive(Debug, Clone)]
pub struct AzimuthalProfile<T> {
    pub beta: T,
    pub theta: Vec<T>,
    pub omega: Vec<T>,
    pub omega_theta: Vec<T>,
    /// Sup norm of the governing ODE residual on interior nodes, with the
    /// second derivative from centered differences.
    pub residual_sup: T,
    pub kind: ProfileKind,
}

/// Result of the eigenvalue bisection.
#[derive(Debug, Clone)]
pub struct EigenResult<T> {
    pub beta_star: T,
    pub profile: AzimuthalProfile<T>,
    pub iterations: u32,
    /// Final bisection interval.
    pub bracket: (T, T),
    /// Relative gap of the integral eigenvalue identity.
    pub identity_gap: T,
}

#[inline]
fn phase_rhs<T: Real>(n: T, p: T, beta: T, lam: T, theta: T, phi: T) -> (T, T) {
    let s = phi.sin();
    let c = phi.cos();
    let d = (p - T::one()) * s * s + c * c;
    let ct = (T::of(2.0) - n) * theta.cos() / theta.sin();
    let dphi = (ct * s * c + (p - T::one()) * beta * s * s + lam * c * c) / d;
    let dlr = (ct * s * s + (lam - beta) * s * c) / d;
    (dphi, dlr)
}

fn grid<T: Real>(m: usize) -> (T, Vec<T>) {
    let h = T::half_pi() / T::of(m as f64);
    let mut theta = Vec::with_capacity(m + 1);
    theta.push(T::of(THETA0));
    for j in 1..=m {
        theta.push(T::of(j as f64) * h);
    }
    theta[m] = T::half_pi();
    (h, theta)
}

enum Shot<T> {
    Done { phi: Vec<T>, log_r: Vec<T> },
    Exited { theta: T, phi: T },
}

fn integrate<T: Real>(beta: T, params: &ProblemParams<T>, m: usize) -> Shot<T> {
    let n = params.nf();
    let p = params.p();
    let lam = lambda_of(beta, params);
    let (_, theta) = grid::<T>(m);
    let f = |t: T, y: [T; 2]| {
        let (dphi, dlr) = phase_rhs(n, p, beta, lam, t, y[0]);
        [dphi, dlr]
    };
    let mut phi = Vec::with_capacity(m + 1);
    let mut log_r = Vec::with_capacity(m + 1);
    let mut y = [lam / (n - T::one()) * T::of(THETA0), T::zero()];
    phi.push(y[0]);
    log_r.push(y[1]);
    let lo_cap = T::of(-0.5);
    let hi_cap = T::pi() + T::of(0.5);
    for j in 0..m {
        let t = theta[j];
        let h = theta[j + 1] - theta[j];
        y = rk4_step2(&f, t, y, h);
        if !(y[0].is_finite()) || y[0] < lo_cap || y[0] > hi_cap {
            return Shot::Exited {
                theta: theta[j + 1],
                phi: y[0],
            };
        }
        phi.push(y[0]);
        log_r.push(y[1]);
    }
    Shot::Done { phi, log_r }
}

/// Shooting defect `φ(π/2) - π/2` extended off the admissible set so that
/// bisection stays oriented: `Λ_β <= 0` and downward phase exits count as
/// strong undershoots, upward exits as strong overshoots.
fn defect_ext<T: Real>(beta: T, params: &ProblemParams<T>, m: usize) -> T {
    if lambda_of(beta, params) <= T::zero() {
        return -T::pi();
    }
    match integrate(beta, params, m) {
        Shot::Done { phi, .. } => *phi.last().unwrap() - T::half_pi(),
        Shot::Exited { phi, .. } => {
            if phi > T::half_pi() {
                T::pi()
            } else {
                -T::pi()
            }
        }
    }
}

/// Integrates the phase system for one trial `β` on `M` intervals.
pub fn integrate_phase<T: Real>(
    beta: T,
    params: &ProblemParams<T>,
    m: usize,
) -> Result<PhasePath<T>, EigenError> {
    if m < 64 {
        return Err(EigenError::GridTooCoarse { m });
    }
    if !(beta > T::zero()) {
        return Err(EigenError::BadArgument("beta must be positive"));
    }
    let (_, theta) = grid::<T>(m);
    match integrate(beta, params, m) {
        Shot::Exited { theta, phi } => Err(EigenError::PhaseExit {
            theta: theta.to_f64().unwrap_or(f64::NAN),
            phi: phi.to_f64().unwrap_or(f64::NAN),
        }),
        Shot::Done { phi, log_r } => {
            let n = params.nf();
            let p = params.p();
            let lam = lambda_of(beta, params);
            let phi_theta: Vec<T> = theta
                .iter()
                .zip(&phi)
                .map(|(&t, &f)| phase_rhs(n, p, beta, lam, t, f).0)
                .collect();
            let defect = *phi.last().unwrap() - T::half_pi();
            Ok(PhasePath {
                beta,
                theta,
                phi,
                log_r,
                phi_theta,
                defect,
            })
        }
    }
}

/// Analytic bracket for the eigenexponent, expanded as needed.
///
/// The lower end starts just above `max{1, (N-p)/(p-1)}` and is pushed
/// down when the defect there is already positive (this happens at
/// `p = N`, where `β_* = 1` sits exactly on the bound). The upper end is
/// `(N-1)/(p-1) + 1` for `p >= 2` and is found by doubling from
/// `(N-1)/(p-1)` for `p < 2`.
fn initial_bracket<T: Real>(
    params: &ProblemParams<T>,
    m: usize,
) -> Result<(T, T), EigenError> {
    let one = T::one();
    let p = params.p();
    let nf = params.nf();
    let ratio = (nf - one) / (p - one);
    let mut lo = one.max((nf - p) / (p - one)) + T::of(1e-9);
    let mut hi;
    if p >= T::of(2.0) {
        hi = ratio + one;
    } else {
        hi = ratio;
        let mut guard = 0;
        while defect_ext(hi, params, m) < T::zero() {
            hi = hi * T::of(2.0);
            guard += 1;
            if guard > 60 {
                return Err(EigenError::NoSignChange {
                    lo: lo.to_f64().unwrap_or(f64::NAN),
                    hi: hi.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let mut step = T::of(1e-6);
    let mut guard = 0;
    while defect_ext(lo, params, m) > T::zero() {
        lo = lo - step;
        step = step * T::of(2.0);
        guard += 1;
        if lo <= T::zero() || guard > 60 {
            return Err(EigenError::NoSignChange {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    if defect_ext(hi, params, m) < T::zero() {
        return Err(EigenError::NoSignChange {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((lo, hi))
}

/// Solves for `(β_*, ψ_*)` by bisection on the shooting defect.
///
/// The returned profile is normalized to `ω(0) = 1` (its maximum, since the
/// eigenprofile is decreasing).
pub fn solve_beta_star<T: Real>(
    params: &ProblemParams<T>,
    tol: T,
    m: usize,
) -> Result<EigenResult<T>, EigenError> {
    if !(tol > T::zero()) {
        return Err(EigenError::BadArgument("tol must be positive"));
    }
    if m < 64 {
        return Err(EigenError::GridTooCoarse { m });
    }
    let (mut lo, mut hi) = initial_bracket(params, m)?;
    let mut iterations = 0u32;
    while hi - lo > tol && iterations < 200 {
        let mid = T::of(0.5) * (lo + hi);
        if defect_ext(mid, params, m) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let beta_star = T::of(0.5) * (lo + hi);
    let path = integrate_phase(beta_star, params, m)?;
    let profile = reconstruct_profile(&path, params);
    let identity_gap = eigen_identity_gap(&profile, params);
    Ok(EigenResult {
        beta_star,
        profile,
        iterations,
        bracket: (lo, hi),
        identity_gap,
    })
}

/// Rebuilds `ω = r cos φ`, `ω' = -β r sin φ` from a phase path and rescales
/// to `ω(0) = 1`.
///
/// The profile lives on the uniform grid `0, h, ..., π/2`: the path node at
/// `θ₀ = 1e-6` stands in for `θ = 0` (the substitution error is `O(θ₀²)`).
pub fn reconstruct_profile<T: Real>(
    path: &PhasePath<T>,
    params: &ProblemParams<T>,
) -> AzimuthalProfile<T> {
    let beta = path.beta;
    let mut theta = path.theta.clone();
    theta[0] = T::zero();
    let mut omega: Vec<T> = path
        .phi
        .iter()
        .zip(&path.log_r)
        .map(|(&f, &lr)| lr.exp() * f.cos())
        .collect();
    let mut omega_theta: Vec<T> = path
        .phi
        .iter()
        .zip(&path.log_r)
        .map(|(&f, &lr)| -beta * lr.exp() * f.sin())
        .collect();
    // pull the θ₀ sample back to the pole with the series
    // ω(θ) = ω(0)(1 - βΛ θ²/(2(N-1)) + O(θ⁴))
    let lam = lambda_of(beta, params);
    let t0 = path.theta[0];
    omega[0] = omega[0]
        / (T::one() - beta * lam * t0 * t0 / (T::of(2.0) * (params.nf() - T::one())));
    let scale = omega[0];
    for w in omega.iter_mut() {
        *w = *w / scale;
    }
    for w in omega_theta.iter_mut() {
        *w = *w / scale;
    }
    omega_theta[0] = T::zero();
    let mut profile = AzimuthalProfile {
        beta,
        theta,
        omega,
        omega_theta,
        residual_sup: T::zero(),
        kind: ProfileKind::Eigen,
    };
    profile.residual_sup = eigen_residual_sup(&profile, params);
    profile
}

/// Sup norm over interior nodes of the azimuthal eigen-ODE residual, with
/// `ω''` from centered differences of the stored profile.
fn eigen_residual_sup<T: Real>(profile: &AzimuthalProfile<T>, params: &ProblemParams<T>) -> T {
    let beta = profile.beta;
    let lam = lambda_of(beta, params);
    let n = params.nf();
    let p = params.p();
    let h = profile.theta[1] - profile.theta[0];
    let mut sup = T::zero();
    for i in 1..profile.theta.len() - 1 {
        let th = profile.theta[i];
        let w = profile.omega[i];
        let v = profile.omega_theta[i];
        let wtt = second_diff(&profile.omega, i, h);
        let s = beta * beta * w * w + v * v;
        if s <= T::zero() {
            continue;
        }
        let res = -wtt - (n - T::of(2.0)) * (th.cos() / th.sin()) * v
            - (p - T::of(2.0)) * (beta * beta * w + wtt) * v * v / s
            - beta * lam * w;
        sup = sup.max(res.abs());
    }
    sup
}

/// `ω''` from the governing ODE itself (no differencing noise).
pub fn omega_thetatheta_from_ode<T: Real>(
    theta: T,
    omega: T,
    omega_theta: T,
    beta: T,
    params: &ProblemParams<T>,
) -> T {
    let n = params.nf();
    let p = params.p();
    let lam = lambda_of(beta, params);
    let s = beta * beta * omega * omega + omega_theta * omega_theta;
    let cot = theta.cos() / theta.sin();
    let num = -((n - T::of(2.0)) * cot * omega_theta
        + (p - T::of(2.0)) * beta * beta * omega * omega_theta * omega_theta / s
        + beta * lam * omega);
    let den = T::one() + (p - T::of(2.0)) * omega_theta * omega_theta / s;
    num / den
}

/// Both sides of the integral eigenvalue identity
///
/// ```text
///   (2-p) ∫ (β²ω + ω'') ω'² / (β²ω² + ω'²) cos θ sin^{N-2}θ dθ
///       = (p-1) (β - (N-1)/(p-1)) (β + 1) ∫ ω cos θ sin^{N-2}θ dθ,
/// ```
///
/// obtained by weighting the azimuthal ODE with `cos θ sin^{N-2}θ` and
/// integrating by parts. Returns `|L - R| / max(|L|, |R|, S)` where
/// `S = (N-1) ∫ ω cos θ sin^{N-2}θ dθ` is the natural equation scale, so
/// the degenerate `p = 2` case (both sides vanish) reports a tiny gap
/// instead of comparing two roundoff-sized numbers.
pub fn eigen_identity_gap<T: Real>(profile: &AzimuthalProfile<T>, params: &ProblemParams<T>) -> T {
    let beta = profile.beta;
    let n = params.nf();
    let p = params.p();
    let h = profile.theta[1] - profile.theta[0];
    let mut lhs_vals = Vec::with_capacity(profile.theta.len());
    let mut rhs_vals = Vec::with_capacity(profile.theta.len());
    for i in 0..profile.theta.len() {
        let th = profile.theta[i];
        let w = profile.omega[i];
        let v = profile.omega_theta[i];
        let weight = th.cos() * th.sin().powf(n - T::of(2.0));
        let s = beta * beta * w * w + v * v;
        let conv = if i == 0 || s <= T::zero() {
            T::zero() // ω'(0) = 0 kills the integrand at the pole
        } else {
            let wtt = omega_thetatheta_from_ode(th, w, v, beta, params);
            (beta * beta * w + wtt) * v * v / s
        };
        lhs_vals.push(conv * weight);
        rhs_vals.push(w * weight);
    }
    let i1 = simpson_uniform(&lhs_vals, h);
    let i2 = simpson_uniform(&rhs_vals, h);
    let lhs = (T::of(2.0) - p) * i1;
    let rhs = (p - T::one()) * (beta - (n - T::one()) / (p - T::one())) * (beta + T::one()) * i2;
    let scale = ((n - T::one()) * i2).abs();
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(scale)
}

/// Nodewise certification of the phase-path properties.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport<T> {
    /// `max(φ' - β)` over nodes; the bound is `φ' <= β`.
    pub phi_theta_max_excess: T,
    pub phi_theta_bound_ok: bool,
    /// `min(β²ω + ω'')` over nodes; the bound is `>= 0`.
    pub convexity_min: T,
    pub convexity_ok: bool,
    /// Smallest `c` with `|ω'' + (N-2) cot θ ω'| <= c ω` on interior nodes.
    pub laplace_ratio_c: T,
    /// `|φ'(π/2) - β|`.
    pub endpoint_slope_gap: T,
    pub endpoint_slope_ok: bool,
    /// `max φ' - min φ'` (recorded: at `p = 2`, `N = 2` the phase speed is
    /// exactly constant; elsewhere it is not).
    pub phi_theta_variation: T,
    pub tolerance: T,
}

/// Checks `φ' <= β`, `β²ω + ω'' >= 0`, the Lipschitz bound on the
/// spherical Laplacian and the endpoint slope `φ'(π/2) = β`.
pub fn certify_properties<T: Real>(
    path: &PhasePath<T>,
    profile: &AzimuthalProfile<T>,
    params: &ProblemParams<T>,
) -> PropertyReport<T> {
    let tol = T::of(1e-8);
    let beta = path.beta;
    let mut max_excess = T::neg_infinity();
    let mut min_phi_t = T::infinity();
    let mut max_phi_t = T::neg_infinity();
    for &pt in &path.phi_theta {
        max_excess = max_excess.max(pt - beta);
        min_phi_t = min_phi_t.min(pt);
        max_phi_t = max_phi_t.max(pt);
    }
    let mut convexity_min = T::infinity();
    let mut laplace_c = T::zero();
    let n = params.nf();
    for i in 1..profile.theta.len() - 1 {
        let th = profile.theta[i];
        let w = profile.omega[i];
        let v = profile.omega_theta[i];
        if w <= T::zero() {
            continue;
        }
        let wtt = omega_thetatheta_from_ode(th, w, v, beta, params);
        convexity_min = convexity_min.min(beta * beta * w + wtt);
        let lap = wtt + (n - T::of(2.0)) * (th.cos() / th.sin()) * v;
        laplace_c = laplace_c.max(lap.abs() / w);
    }
    let endpoint_gap = (*path.phi_theta.last().unwrap() - beta).abs();
    PropertyReport {
        phi_theta_max_excess: max_excess,
        phi_theta_bound_ok: max_excess <= tol,
        convexity_min,
        convexity_ok: convexity_min >= -tol,
        laplace_ratio_c: laplace_c,
        endpoint_slope_gap: endpoint_gap,
        endpoint_slope_ok: endpoint_gap <= T::of(1e-6) * T::one().max(beta),
        phi_theta_variation: max_phi_t - min_phi_t,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, p: f64) -> ProblemParams<f64> {
        ProblemParams::new(n, p).unwrap()
    }

    #[test]
    fn defect_signs_straddle_the_eigenvalue() {
        // p=2, N=3: beta_* = 2; below undershoots, above overshoots
        let pr = params(3, 2.0);
        let d_lo = integrate_phase(1.0 + 1e-6, &pr, 1024).unwrap().defect;
        let d_hi = integrate_phase(2.2, &pr, 1024).unwrap().defect;
        assert!(d_lo < 0.0, "defect at beta below beta_*: {d_lo}");
        assert!(d_hi > 0.0, "defect at beta above beta_*: {d_hi}");
        let d_at = integrate_phase(2.0, &pr, 4096).unwrap().defect;
        assert!(d_at.abs() < 1e-8, "defect at beta_*: {d_at}");
        // far above, the phase leaves [0, π]: integration-failure error,
        // reported with the exit azimuth
        match integrate_phase(4.0, &pr, 1024) {
            Err(EigenError::PhaseExit { theta, .. }) => assert!(theta > 0.0),
            other => panic!("expected phase exit, got {other:?}"),
        }
        // the extended defect still orients the bisection out there
        assert!(defect_ext(4.0, &pr, 1024) > 0.0);
    }

    #[test]
    fn defect_zero_at_p_equals_n() {
        let d = integrate_phase(1.0, &params(3, 3.0), 4096).unwrap().defect;
        assert!(d.abs() < 1e-8, "defect: {d}");
    }

    #[test]
    fn special_cases_converge() {
        let r = solve_beta_star(&params(3, 2.0), 1e-10, 2048).unwrap();
        assert!((r.beta_star - 2.0).abs() < 1e-8);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-10);
        assert!(r.bracket.0 <= r.beta_star && r.beta_star <= r.bracket.1);
        let r = solve_beta_star(&params(4, 4.0), 1e-10, 2048).unwrap();
        assert!((r.beta_star - 1.0).abs() < 1e-8);
    }

    #[test]
    fn planar_closed_form_matches_shooting() {
        for &p in &[1.2f64, 1.5, 1.8] {
            let r = solve_beta_star(&params(2, p), 1e-11, 4096).unwrap();
            let cf = crate::exponents::beta_star_planar(p);
            assert!(
                (r.beta_star - cf).abs() < 1e-8,
                "p={p}: shot {} vs closed form {cf}",
                r.beta_star
            );
        }
    }

    #[test]
    fn p_two_profile_is_cosine() {
        // For p = 2 the eigenprofile is cos θ in every dimension, and the
        // same holds at p = N (there β_* = 1 and ω + ω'' = 0 kills the
        // quasilinear term).
        for (n, p) in [(3u32, 2.0f64), (4, 4.0)] {
            let r = solve_beta_star(&params(n, p), 1e-12, 4096).unwrap();
            let mut worst = 0.0f64;
            for (i, &th) in r.profile.theta.iter().enumerate() {
                worst = worst.max((r.profile.omega[i] - th.cos()).abs());
            }
            assert!(worst < 1e-6, "N={n} p={p}: sup |omega - cos| = {worst}");
            assert!(r.profile.residual_sup < 1e-6);
        }
    }

    #[test]
    fn profile_boundary_behaviour() {
        let r = solve_beta_star(&params(4, 3.0), 1e-11, 2048).unwrap();
        let pf = &r.profile;
        let m = pf.omega.len() - 1;
        assert!((pf.omega[0] - 1.0).abs() < 1e-12);
        assert!(pf.omega[m].abs() < 1e-6, "omega(pi/2) = {}", pf.omega[m]);
        assert!(pf.omega_theta[m] < 0.0);
        // monotone decreasing
        for i in 0..m {
            assert!(pf.omega[i + 1] <= pf.omega[i] + 1e-12);
        }
    }

    #[test]
    fn identity_gap_small_and_zero_at_p_two() {
        let r = solve_beta_star(&params(3, 2.5), 1e-11, 4096).unwrap();
        assert!(r.identity_gap < 1e-5, "gap {}", r.identity_gap);
        let r = solve_beta_star(&params(4, 2.0), 1e-11, 4096).unwrap();
        assert!(r.identity_gap < 1e-7, "p=2 gap {}", r.identity_gap);
    }

    #[test]
    fn properties_certify() {
        for (n, p) in [(4u32, 3.0f64), (3, 2.0), (2, 1.5)] {
            let pr = params(n, p);
            let r = solve_beta_star(&pr, 1e-11, 2048).unwrap();
            let path = integrate_phase(r.beta_star, &pr, 2048).unwrap();
            let rep = certify_properties(&path, &r.profile, &pr);
            assert!(rep.phi_theta_bound_ok, "{n},{p}: {:?}", rep.phi_theta_max_excess);
            assert!(rep.convexity_ok, "{n},{p}: {:?}", rep.convexity_min);
            assert!(rep.endpoint_slope_ok, "{n},{p}: {:?}", rep.endpoint_slope_gap);
            assert!(rep.laplace_ratio_c.is_finite());
        }
        // phase speed is constant exactly in the planar p = 2 case
        let pr = params(2, 2.0);
        let r = solve_beta_star(&pr, 1e-11, 1024).unwrap();
        let path = integrate_phase(r.beta_star, &pr, 1024).unwrap();
        let rep = certify_properties(&path, &r.profile, &pr);
        assert!(rep.phi_theta_variation < 1e-9);
        // but not in the spherical one
        let pr = params(3, 2.0);
        let r = solve_beta_star(&pr, 1e-11, 1024).unwrap();
        let path = integrate_phase(r.beta_star, &pr, 1024).unwrap();
        let rep = certify_properties(&path, &r.profile, &pr);
        assert!(rep.phi_theta_variation > 1.0);
    }

    #[test]
    fn defect_changes_sign_exactly_once_on_the_bracket() {
        for (n, p) in [(3u32, 2.5f64), (4, 3.0), (2, 1.5), (5, 1.8), (6, 4.5)] {
            let pr = params(n, p);
            let (lo, hi) = initial_bracket(&pr, 512).unwrap();
            let mut changes = 0;
            let mut prev = defect_ext(lo, &pr, 512) < 0.0;
            for i in 1..=50 {
                let b = lo + (hi - lo) * i as f64 / 50.0;
                let cur = defect_ext(b, &pr, 512) < 0.0;
                if cur != prev {
                    changes += 1;
                }
                prev = cur;
            }
            assert_eq!(changes, 1, "N={n} p={p}");
        }
    }

    #[test]
    fn grid_convergence_is_high_order() {
        let pr = params(4, 3.0);
        let solve = |m: usize| solve_beta_star(&pr, 1e-13, m).unwrap().beta_star;
        let b256 = solve(256);
        let b512 = solve(512);
        let b1024 = solve(1024);
        let e1 = (b256 - b512).abs();
        let e2 = (b512 - b1024).abs();
        assert!(
            e1 > 4.0 * e2 || e1 < 1e-11,
            "grid convergence too slow: {e1} -> {e2}"
        );
    }

    #[test]
    fn phase_is_strictly_increasing_on_converged_paths() {
        for (n, p) in [(3u32, 2.0f64), (4, 3.0), (2, 1.5)] {
            let pr = params(n, p);
            let r = solve_beta_star(&pr, 1e-10, 1024).unwrap();
            let path = integrate_phase(r.beta_star, &pr, 1024).unwrap();
            for w in path.phi.windows(2) {
                assert!(w[1] > w[0]);
            }
            // series start at the pole
            let lam = lambda_of(r.beta_star, &pr);
            let expected = lam / (pr.nf() - 1.0) * path.theta[0];
            assert!((path.phi[0] - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn profile_residual_decreases_under_refinement() {
        let pr = params(4, 3.0);
        let coarse = solve_beta_star(&pr, 1e-11, 256).unwrap();
        let fine = solve_beta_star(&pr, 1e-11, 2048).unwrap();
        assert!(
            fine.profile.residual_sup < 0.25 * coarse.profile.residual_sup,
            "{} -> {}",
            coarse.profile.residual_sup,
            fine.profile.residual_sup
        );
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(
            integrate_phase(2.0, &params(3, 2.0), 2),
            Err(EigenError::GridTooCoarse { .. })
        ));
    }
}
