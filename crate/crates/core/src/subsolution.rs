//! Interior subsolution sign checks on the eigenprofile.
//!
//! Perturbing the separable p-harmonic solution by `V = ψ_* - a(t) g(ψ_*)`
//! with `a(t) = e^{γt}` (in the logarithmic radius `t = ln r`) produces a
//! subsolution of the absorption equation provided the leading-order
//! coefficient
//!
//! ```text
//!   Q₁[V] = (γ-Λ)(γ-β)[1 + (p-2) β²ψ²/D²] - (p-1) β Λ ψg'/g
//!         + [(p-4) β Λ ψ - 2Δ'ψ] (γ - β(1 - ψg'/g)) βψ/D²
//!         - (p-2) [ψg'/g ((β+1)γ - βΛ + β) + γ - β + β ψ²g''/g] ψθ²/D²
//!         + (p-1) (g''/g) ψθ²,            D² = β²ψ² + ψθ²,
//! ```
//!
//! is nonpositive on the relevant region. Three increment shapes `g` are
//! used:
//!
//! * `g = ψ` (linear): nonpositive on all of `[0, π/2]` when `1 < p < 2`,
//!   and near the equator (`ψ <= ε₀`) in general;
//! * `g = ψ e^{-kψ}` (damped): the small-`k` correction that keeps the sign
//!   on `ψ <= ε₀` for `p >= 2`;
//! * `g = c ψ^{1-γ/β}` (power): on `ψ >= ε₀` the troublesome `Δ'ψ` term
//!   cancels identically and `Q₁ = (1-p) γ(β-γ) [1 + ψθ²/(β²ψ²)] < 0`.
//!
//! The glued shape switches between the damped and power branches at
//! `ψ = ε₀`; the glue constant drops out of `Q₁` because only the ratios
//! `ψg'/g` and `ψ²g''/g` enter.
//!
//! `ε₀` is picked empirically as the largest grid value of `ψ` below which
//! the linear-shape coefficient stays above half of its `ψ -> 0` limit
//! `S = Λ + β + (p-2)(β+2)`, and `k₀` by dyadic search over
//! `k ∈ {1, 1/2, 1/4, ...}`.

use serde::Serialize;

use crate::eigensolver::{omega_thetatheta_from_ode, AzimuthalProfile};
use crate::exponents::{beta_q, lambda_of};
use crate::params::{ParamError, ProblemParams};
use crate::real::Real;

/// Increment shape `g(ψ_*)` for the subsolution ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GChoice {
    /// `g = ψ`.
    Linear,
    /// `g = ψ e^{-kψ}`.
    Damped,
    /// Damped near the equator, power `ψ^{1-γ/β}` near the pole.
    Glued,
}

/// Parameters of one subsolution check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubsolutionSpec<T> {
    pub gamma: T,
    pub k: T,
    pub epsilon0: T,
    pub g_choice: GChoice,
}

/// Subsolution-check failures.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsolutionError {
    Param(ParamError),
    /// `γ` outside `(0, γ₀]`.
    GammaOutOfRange { gamma: f64, gamma0: f64 },
    /// `ε₀` or `k` out of range.
    BadArgument(&'static str),
}

impl From<ParamError> for SubsolutionError {
    fn from(e: ParamError) -> Self {
        SubsolutionError::Param(e)
    }
}

impl std::fmt::Display for SubsolutionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubsolutionError::Param(e) => write!(f, "{e}"),
            SubsolutionError::GammaOutOfRange { gamma, gamma0 } => {
                write!(f, "gamma = {gamma} outside (0, {gamma0}]")
            }
            SubsolutionError::BadArgument(w) => write!(f, "bad argument: {w}"),
        }
    }
}

impl std::error::Error for SubsolutionError {}

/// The decay-rate ceiling `γ₀ = min{ (Λ+β+(p-2)(β+2))/2, ν, β }` with
/// `ν = 1 - (β_*+1)/(β_q+1)`.
pub fn gamma0<T: Real>(beta_star: T, params: &ProblemParams<T>) -> Result<T, SubsolutionError> {
    let bq = beta_q(params)?;
    let lam = lambda_of(beta_star, params);
    let p = params.p();
    let s_limit = lam + beta_star + (p - T::of(2.0)) * (beta_star + T::of(2.0));
    let nu = T::one() - (beta_star + T::one()) / (bq + T::one());
    if nu <= T::zero() {
        return Err(SubsolutionError::BadArgument(
            "supercritical absorption: nu <= 0",
        ));
    }
    Ok((s_limit / T::of(2.0)).min(nu).min(beta_star))
}

/// One evaluated node.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Q1Node<T> {
    pub theta: T,
    pub psi: T,
    pub q1: T,
}

/// Nodewise `Q₁` report over the validity region of the chosen shape.
#[derive(Debug, Clone, Serialize)]
pub struct Q1Report<T> {
    pub spec: SubsolutionSpec<T>,
    pub nodes: Vec<Q1Node<T>>,
    pub max_q1: T,
    pub fraction_nonpositive: T,
}

#[allow(clippy::too_many_arguments)]
fn q1_master<T: Real>(
    beta: T,
    lam: T,
    p: T,
    psi: T,
    psi_t: T,
    del_psi: T,
    gamma: T,
    rg: T,  // ψ g'/g
    rgg: T, // ψ² g''/g
) -> T {
    let one = T::one();
    let two = T::of(2.0);
    let d2 = beta * beta * psi * psi + psi_t * psi_t;
    let t1 = (gamma - lam) * (gamma - beta) * (one + (p - two) * beta * beta * psi * psi / d2);
    let t2 = -(p - one) * beta * lam * rg;
    let t3 = ((p - T::of(4.0)) * beta * lam * psi - two * del_psi)
        * (gamma - beta * (one - rg))
        * beta
        * psi
        / d2;
    let t4 = -(p - two)
        * (rg * ((beta + one) * gamma - beta * lam + beta) + gamma - beta + beta * rgg)
        * psi_t
        * psi_t
        / d2;
    let t5 = (p - one) * rgg * psi_t * psi_t / (psi * psi);
    t1 + t2 + t3 + t4 + t5
}

fn shape_ratios<T: Real>(psi: T, k: T, alpha: T, power_branch: bool) -> (T, T) {
    if power_branch {
        (alpha, alpha * (alpha - T::one()))
    } else {
        // damped: ψg'/g = 1 - kψ, ψ²g''/g = ψ(k²ψ - 2k); k = 0 is linear
        (T::one() - k * psi, psi * (k * k * psi - T::of(2.0) * k))
    }
}

fn q1_at_node<T: Real>(
    profile: &AzimuthalProfile<T>,
    params: &ProblemParams<T>,
    i: usize,
    gamma: T,
    k: T,
    power_branch: bool,
) -> T {
    let beta = profile.beta;
    let lam = lambda_of(beta, params);
    let p = params.p();
    let th = profile.theta[i];
    let psi = profile.omega[i];
    let psi_t = profile.omega_theta[i];
    let psi_tt = omega_thetatheta_from_ode(th, psi, psi_t, beta, params);
    let cot = if i == 0 {
        T::zero() // ψθ(0) = 0 kills the cot θ term at the pole
    } else {
        th.cos() / th.sin()
    };
    let del_psi = psi_tt + (params.nf() - T::of(2.0)) * cot * psi_t;
    let alpha = T::one() - gamma / beta;
    let (rg, rgg) = shape_ratios(psi, k, alpha, power_branch);
    q1_master(beta, lam, p, psi, psi_t, del_psi, gamma, rg, rgg)
}

/// Empirical `ε₀`: scan nodes from the equator upward with the linear
/// shape and return the largest `ψ` below which the effective coefficient
/// `S_eff = γ - Q₁/(γ B)` stays above `S/2`, where
/// `B = 1 + (p-2)β²ψ²/D²` and `S = Λ + β + (p-2)(β+2)`.
pub fn epsilon0_empirical<T: Real>(
    profile: &AzimuthalProfile<T>,
    params: &ProblemParams<T>,
    gamma: T,
) -> T {
    let beta = profile.beta;
    let lam = lambda_of(beta, params);
    let p = params.p();
    let s_limit = lam + beta + (p - T::of(2.0)) * (beta + T::of(2.0));
    let m = profile.theta.len() - 1;
    let mut eps0 = profile.omega[1].min(profile.omega[m - 1]);
    // walk from the equator (smallest ψ) toward the pole
    for i in (1..m).rev() {
        let psi = profile.omega[i];
        if psi <= T::zero() {
            continue;
        }
        let psi_t = profile.omega_theta[i];
        let d2 = beta * beta * psi * psi + psi_t * psi_t;
        let b = T::one() + (p - T::of(2.0)) * beta * beta * psi * psi / d2;
        let q1 = q1_at_node(profile, params, i, gamma, T::zero(), false);
        let s_eff = gamma - q1 / (gamma * b);
        if s_eff <= s_limit / T::of(2.0) {
            break;
        }
        eps0 = psi;
    }
    eps0
}

/// Dyadic search for the damping ceiling: the largest `k` in
/// `{1, 1/2, 1/4, ...}` with `Q₁ <= 0` on the region `ψ <= ε₀`.
pub fn k0_dyadic<T: Real>(
    profile: &AzimuthalProfile<T>,
    params: &ProblemParams<T>,
    gamma: T,
    epsilon0: T,
) -> Option<T> {
    let m = profile.theta.len() - 1;
    let mut k = T::one();
    for _ in 0..24 {
        let mut ok = true;
        for i in 1..m {
            let psi = profile.omega[i];
            if psi <= T::zero() || psi > epsilon0 {
                continue;
            }
            if q1_at_node(profile, params, i, gamma, k, false) > T::of(1e-12) {
                ok = false;
                break;
            }
        }
        if ok {
            return Some(k);
        }
        k = k / T::of(2.0);
    }
    None
}

/// Evaluates `Q₁` nodewise on the validity region of the chosen shape.
///
/// Linear: all interior nodes for `p < 2`, else `ψ <= ε₀`. Damped:
/// `ψ <= ε₀`. Glued: damped branch on `ψ <= ε₀`, power branch on
/// `ψ >= ε₀`. Positive nodes are reported, never thrown.
pub fn q1_nodes<T: Real>(
    spec: &SubsolutionSpec<T>,
    profile: &AzimuthalProfile<T>,
    beta_star: T,
    params: &ProblemParams<T>,
) -> Result<Q1Report<T>, SubsolutionError> {
    let g0 = gamma0(beta_star, params)?;
    if !(spec.gamma > T::zero() && spec.gamma <= g0) {
        return Err(SubsolutionError::GammaOutOfRange {
            gamma: spec.gamma.to_f64().unwrap_or(f64::NAN),
            gamma0: g0.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(spec.epsilon0 > T::zero()) {
        return Err(SubsolutionError::BadArgument("epsilon0 must be positive"));
    }
    let p = params.p();
    let m = profile.theta.len() - 1;
    let mut nodes = Vec::new();
    let mut max_q1 = T::neg_infinity();
    let mut nonpos = 0usize;
    for i in 1..m {
        let psi = profile.omega[i];
        if psi <= T::zero() {
            continue;
        }
        let (include, k, power_branch) = match spec.g_choice {
            GChoice::Linear => (
                p < T::of(2.0) || psi <= spec.epsilon0,
                T::zero(),
                false,
            ),
            GChoice::Damped => (psi <= spec.epsilon0, spec.k, false),
            GChoice::Glued => (true, spec.k, psi >= spec.epsilon0),
        };
        if !include {
            continue;
        }
        let q1 = q1_at_node(profile, params, i, spec.gamma, k, power_branch);
        if q1 <= T::of(1e-12) {
            nonpos += 1;
        }
        max_q1 = max_q1.max(q1);
        nodes.push(Q1Node {
            theta: profile.theta[i],
            psi,
            q1,
        });
    }
    let fraction = if nodes.is_empty() {
        T::zero()
    } else {
        T::of(nonpos as f64) / T::of(nodes.len() as f64)
    };
    Ok(Q1Report {
        spec: *spec,
        nodes,
        max_q1,
        fraction_nonpositive: fraction,
    })
}

/// Closed-form value of `Q₁` on the power branch,
/// `(1-p) γ (β-γ) [1 + ψθ²/(β²ψ²)]`; the master expression collapses to
/// this identically, which the tests pin down.
pub fn q1_power_closed_form<T: Real>(beta: T, gamma: T, p: T, psi: T, psi_t: T) -> T {
    (T::one() - p)
        * gamma
        * (beta - gamma)
        * (T::one() + psi_t * psi_t / (beta * beta * psi * psi))
}
