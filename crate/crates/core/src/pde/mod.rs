//! Steady states of `-Δ_p u + |∇u|^q = 0` on an axisymmetric half-annulus.
//!
//! The computational domain is `{ε <= r <= 1, 0 <= θ <= π/2}` in spherical
//! coordinates with the `sin^{N-2}θ` volume weight: the flat boundary
//! `θ = π/2` models the domain wall carrying the homogeneous Dirichlet
//! condition, the inner sphere `r = ε` carries the singular data, the
//! outer sphere `r = 1` truncates the domain with `u = 0`, and the axis
//! `θ = 0` is a symmetry (no-flux) line.
//!
//! Discretization: finite volumes on a geometric radial grid and a uniform
//! azimuthal grid. The diffusivity `K = (|∇u|² + δ²)^{(p-2)/2}` is frozen
//! at the current iterate (damped Picard); the absorption is evaluated
//! with a monotone one-sided gradient (Rouy-Tourin type),
//!
//! ```text
//!   |∂u|²_mono = max(D⁻u, 0)² + min(D⁺u, 0)²,
//! ```
//!
//! and linearized onto the diagonal as `(G/u_old) u`. The monotone gradient
//! matters: with centered differences the absorption at a node is blind to
//! the node's own value and under-resolved collapse layers admit spurious
//! solutions that scale linearly with the inner data, breaking every
//! comparison bound. A pseudo-transient continuation ramp takes over when
//! the Picard loop stalls.

pub mod banded;
mod checks;

pub use checks::{
    fit_exponent, gradient_estimate_check, harnack_spot_check, scaling_invariance_check,
    ExponentFit, FitError, GradientReport, HarnackReport, ScalingReport,
};

use serde::Serialize;

use crate::eigensolver::AzimuthalProfile;
use crate::exponents::beta_q;
use crate::numerics::{geomspace, lerp_table, linspace};
use crate::params::{ParamError, ProblemParams};
use crate::real::Real;

use banded::Banded;

/// Tensor grid on the half-annulus.
#[derive(Debug, Clone)]
pub struct PolarGrid<T> {
    /// Geometric (log-uniform) radial nodes on `[ε, 1]`.
    pub r: Vec<T>,
    /// Uniform azimuthal nodes on `[0, π/2]`.
    pub theta: Vec<T>,
    /// Dimension for the `sin^{N-2}θ` weight.
    pub n: u32,
}

/// PDE-solver failures.
#[derive(Debug, Clone, PartialEq)]
pub enum PdeError {
    Param(ParamError),
    BadArgument(&'static str),
    /// The frozen-coefficient matrix lost its M-matrix structure.
    SingularSystem,
    /// Boundary mode needs a profile that was not supplied.
    MissingProfile(&'static str),
}

impl From<ParamError> for PdeError {
    fn from(e: ParamError) -> Self {
        PdeError::Param(e)
    }
}

impl std::fmt::Display for PdeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PdeError::Param(e) => write!(f, "{e}"),
            PdeError::BadArgument(w) => write!(f, "bad argument: {w}"),
            PdeError::SingularSystem => write!(f, "frozen-coefficient system is singular"),
            PdeError::MissingProfile(w) => write!(f, "boundary mode requires a profile: {w}"),
        }
    }
}

impl std::error::Error for PdeError {}

impl<T: Real> PolarGrid<T> {
    /// Geometric-by-uniform grid; `n_r, n_theta >= 16`, `eps > 0`.
    pub fn new(eps: T, n_r: usize, n_theta: usize, n: u32) -> Result<Self, PdeError> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(PdeError::BadArgument("need 0 < eps < 1"));
        }
        if n_r < 16 || n_theta < 16 {
            return Err(PdeError::BadArgument("need n_r, n_theta >= 16"));
        }
        Ok(PolarGrid {
            r: geomspace(eps, T::one(), n_r),
            theta: linspace(T::zero(), T::half_pi(), n_theta),
            n,
        })
    }

    pub fn eps(&self) -> T {
        self.r[0]
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.theta.len() + j
    }
}

/// Inner boundary data selector at `r = ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum BoundaryMode<T> {
    /// `k ε^{-β_*} ψ_*(θ)`: the weak-singularity trace.
    Weak { k: T },
    /// `A ε^{-β_q} ω_*(θ)`: the strong-singularity trace, swept in `A`.
    Strong { amp: T },
    /// Constant data `A` (removability experiments).
    Flat { amp: T },
}

/// Iteration statistics attached to a converged (or abandoned) field.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveStats<T> {
    pub iterations: u32,
    pub final_update: T,
    pub converged: bool,
    /// Negative-undershoot clamps applied across all iterations.
    pub clamp_events: u64,
    /// Whether the pseudo-transient ramp was engaged.
    pub ptc_engaged: bool,
    /// Regularization actually used.
    pub reg_delta: T,
}

/// A discrete solution on the half-annulus.
#[derive(Debug, Clone)]
pub struct PolarField<T> {
    pub grid: PolarGrid<T>,
    /// Row-major over `(r_i, θ_j)`.
    pub u: Vec<T>,
    pub mode: BoundaryMode<T>,
    pub stats: SolveStats<T>,
}

impl<T: Real> PolarField<T> {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.u[self.grid.idx(i, j)]
    }

    /// Shell maximum `max_θ u(r_i, ·)`.
    pub fn shell_max(&self, i: usize) -> T {
        let nt = self.grid.theta.len();
        let mut m = T::neg_infinity();
        for j in 0..nt {
            m = m.max(self.at(i, j));
        }
        m
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    pub max_iter: u32,
    /// Relative sup-norm update threshold.
    pub tol: T,
    pub damping: T,
    /// Regularization δ; `None` selects `1e-6 × (data scale)/ε`.
    pub reg_delta: Option<T>,
    /// Debug switch: drop the absorption term entirely.
    pub absorption_off: bool,
    /// Picard iterations without progress before the PTC ramp engages;
    /// `0` runs pseudo-transient from the start.
    pub stall_window: u32,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            max_iter: 400,
            tol: T::of(1e-9),
            damping: T::of(0.5),
            reg_delta: None,
            absorption_off: false,
            stall_window: 40,
        }
    }
}

/// Builds the inner Dirichlet data for a mode; weak/strong modes sample
/// the supplied azimuthal profile.
pub fn inner_data<T: Real>(
    grid: &PolarGrid<T>,
    mode: &BoundaryMode<T>,
    params: &ProblemParams<T>,
    beta_star: Option<T>,
    profile: Option<&AzimuthalProfile<T>>,
) -> Result<Vec<T>, PdeError> {
    let eps = grid.eps();
    let nt = grid.theta.len();
    let mut data = vec![T::zero(); nt];
    match mode {
        BoundaryMode::Weak { k } => {
            let bs = beta_star.ok_or(PdeError::MissingProfile("beta_star for weak mode"))?;
            let pf = profile.ok_or(PdeError::MissingProfile("psi_* for weak mode"))?;
            let scale = *k * eps.powf(-bs);
            for j in 0..nt {
                data[j] = scale * lerp_table(&pf.theta, &pf.omega, grid.theta[j]).max(T::zero());
            }
        }
        BoundaryMode::Strong { amp } => {
            let bq = beta_q(params)?;
            let pf = profile.ok_or(PdeError::MissingProfile("omega_* for strong mode"))?;
            let scale = *amp * eps.powf(-bq);
            for j in 0..nt {
                data[j] = scale * lerp_table(&pf.theta, &pf.omega, grid.theta[j]).max(T::zero());
            }
        }
        BoundaryMode::Flat { amp } => {
            for d in data.iter_mut() {
                *d = *amp;
            }
        }
    }
    data[nt - 1] = T::zero(); // corner belongs to the wall
    Ok(data)
}

/// `sin^{N-2}θ`.
#[inline]
fn weight<T: Real>(n: T, theta: T) -> T {
    if n == T::of(2.0) {
        T::one()
    } else {
        theta.sin().abs().powf(n - T::of(2.0))
    }
}

/// Cell integral of the weight over `[a, b]` (4-point Gauss).
fn weight_cell<T: Real>(n: T, a: T, b: T) -> T {
    let xs = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    let ws = [
        0.347_854_845_137_453_85,
        0.652_145_154_862_546_2,
        0.652_145_154_862_546_2,
        0.347_854_845_137_453_85,
    ];
    let half = (b - a) / T::of(2.0);
    let mid = (b + a) / T::of(2.0);
    let mut acc = T::zero();
    for k in 0..4 {
        acc = acc + T::of(ws[k]) * weight(n, mid + half * T::of(xs[k]));
    }
    acc * half
}

/// Nodal squared gradients: `(centered, monotone)`.
fn gradients<T: Real>(grid: &PolarGrid<T>, u: &[T]) -> (Vec<T>, Vec<T>) {
    let nr = grid.r.len();
    let nt = grid.theta.len();
    let dth = grid.theta[1] - grid.theta[0];
    let mut gc = vec![T::zero(); nr * nt];
    let mut gm = vec![T::zero(); nr * nt];
    for i in 0..nr {
        for j in 0..nt {
            let k = grid.idx(i, j);
            // radial slopes
            let (dm, dp) = {
                let dm = if i > 0 {
                    (u[k] - u[grid.idx(i - 1, j)]) / (grid.r[i] - grid.r[i - 1])
                } else {
                    T::zero()
                };
                let dp = if i + 1 < nr {
                    (u[grid.idx(i + 1, j)] - u[k]) / (grid.r[i + 1] - grid.r[i])
                } else {
                    T::zero()
                };
                (dm, dp)
            };
            let ur_c = if i == 0 {
                dp
            } else if i + 1 == nr {
                dm
            } else {
                (u[grid.idx(i + 1, j)] - u[grid.idx(i - 1, j)]) / (grid.r[i + 1] - grid.r[i - 1])
            };
            let ur_m2 = dm.max(T::zero()).powi(2) + dp.min(T::zero()).powi(2);
            // azimuthal slopes; axis j = 0 mirrors (even symmetry)
            let (em, ep) = {
                let em = if j > 0 {
                    (u[k] - u[grid.idx(i, j - 1)]) / dth
                } else {
                    T::zero()
                };
                let ep = if j + 1 < nt {
                    (u[grid.idx(i, j + 1)] - u[k]) / dth
                } else {
                    T::zero()
                };
                (em, ep)
            };
            let ut_c = if j == 0 {
                T::zero()
            } else if j + 1 == nt {
                em
            } else {
                (u[grid.idx(i, j + 1)] - u[grid.idx(i, j - 1)]) / (dth + dth)
            };
            let ut_m2 = em.max(T::zero()).powi(2) + ep.min(T::zero()).powi(2);
            let ri2 = grid.r[i] * grid.r[i];
            gc[k] = ur_c * ur_c + ut_c * ut_c / ri2;
            gm[k] = ur_m2 + ut_m2 / ri2;
        }
    }
    (gc, gm)
}

struct Stencil<T> {
    c_w: T,
    c_e: T,
    c_n: T,
    c_s: T,
}

/// Face coefficients of `-div(K ∇·)` at interior node `(i, j)`.
#[allow(clippy::too_many_arguments)]
fn stencil<T: Real>(
    grid: &PolarGrid<T>,
    kdiff: &[T],
    wcell: &[T],
    i: usize,
    j: usize,
) -> Stencil<T> {
    let nf = T::of(grid.n as f64);
    let r = &grid.r;
    let th = &grid.theta;
    let dth = th[1] - th[0];
    let half = T::of(0.5);
    let rm = half * (r[i - 1] + r[i]);
    let rp = half * (r[i] + r[i + 1]);
    let drm = r[i] - r[i - 1];
    let drp = r[i + 1] - r[i];
    let dri = half * (r[i + 1] - r[i - 1]);
    let vol_r = r[i].powf(nf - T::one()) * dri;
    let km = half * (kdiff[grid.idx(i - 1, j)] + kdiff[grid.idx(i, j)]);
    let kp = half * (kdiff[grid.idx(i, j)] + kdiff[grid.idx(i + 1, j)]);
    let c_w = rm.powf(nf - T::one()) * km / (drm * vol_r);
    let c_e = rp.powf(nf - T::one()) * kp / (drp * vol_r);
    let vol_t = r[i] * r[i] * wcell[j];
    let wp = weight(nf, th[j] + half * dth);
    let ktp = half * (kdiff[grid.idx(i, j)] + kdiff[grid.idx(i, j + 1)]);
    let c_n = wp * ktp / (dth * vol_t);
    let c_s = if j > 0 {
        let wm = weight(nf, th[j] - half * dth);
        let ktm = half * (kdiff[grid.idx(i, j)] + kdiff[grid.idx(i, j - 1)]);
        wm * ktm / (dth * vol_t)
    } else {
        T::zero() // axis: no flux across θ = 0
    };
    Stencil { c_w, c_e, c_n, c_s }
}

fn weight_cells<T: Real>(grid: &PolarGrid<T>) -> Vec<T> {
    let nf = T::of(grid.n as f64);
    let th = &grid.theta;
    let dth = th[1] - th[0];
    let half = T::of(0.5);
    (0..th.len())
        .map(|j| {
            let a = if j == 0 { T::zero() } else { th[j] - half * dth };
            let b = if j + 1 == th.len() {
                T::half_pi()
            } else {
                th[j] + half * dth
            };
            weight_cell(nf, a, b)
        })
        .collect()
}

/// Default regularization: `1e-6` times the gradient scale of the
/// separable guess at the outer boundary, `sup(data) β_q ε^{β_q}`.
///
/// Tying δ to the inner gradient scale `sup(data)/ε` instead looks natural
/// but fails badly for singular data: the absorption floor `δ^q` then acts
/// as a constant sink that wipes out the solution wherever `|∇u|` falls
/// below δ, which on a four-decade annulus is most of it. The smallest
/// physical gradient in the domain is the outer one, so δ hides below
/// that. A tiny floor keeps the diffusivity finite on freshly clamped
/// plateaus.
pub fn default_reg_delta<T: Real>(data: &[T], eps: T, beta_q: T) -> T {
    let mut sup = T::zero();
    for &d in data {
        sup = sup.max(d.abs());
    }
    let outer_grad = sup * beta_q * eps.powf(beta_q);
    (T::of(1e-6) * outer_grad).max(T::of(1e-30) * sup)
}

/// Damped Picard iteration on the frozen-coefficient problem, with a
/// monotone absorption and a pseudo-transient fallback. Non-convergence is
/// flagged in the stats, not an error.
pub fn solve_steady<T: Real>(
    grid: PolarGrid<T>,
    mode: BoundaryMode<T>,
    params: &ProblemParams<T>,
    data: Vec<T>,
    options: &SolveOptions<T>,
) -> Result<PolarField<T>, PdeError> {
    let nr = grid.r.len();
    let nt = grid.theta.len();
    if data.len() != nt {
        return Err(PdeError::BadArgument("inner data length != n_theta"));
    }
    let p = params.p();
    let q = params.q()?;
    let bq = beta_q(params)?;
    let eps = grid.eps();
    let delta = options
        .reg_delta
        .unwrap_or_else(|| default_reg_delta(&data, eps, bq));
    let two = T::of(2.0);

    // separable initial guess data(θ) (r^{-β_q} - 1)/(ε^{-β_q} - 1)
    let mut u = vec![T::zero(); nr * nt];
    let denom = eps.powf(-bq) - T::one();
    for i in 0..nr {
        let g = (grid.r[i].powf(-bq) - T::one()) / denom;
        for j in 0..nt {
            u[grid.idx(i, j)] = data[j] * g;
        }
    }
    for j in 0..nt {
        u[grid.idx(0, j)] = data[j];
        u[grid.idx(nr - 1, j)] = T::zero();
    }
    for i in 0..nr {
        u[grid.idx(i, nt - 1)] = T::zero();
    }

    let wcell = weight_cells(&grid);
    let n_int_r = nr - 2;
    let n_int_t = nt - 1;
    let nun = n_int_r * n_int_t;
    let unk = |i: usize, j: usize| (i - 1) * n_int_t + j;

    let mut clamp_events = 0u64;
    let mut converged = false;
    let mut final_update = T::infinity();
    let mut iterations = 0u32;
    let mut ptc_engaged = false;
    let mut ptc_dtau_inv = T::zero();
    let mut best_update = T::infinity();
    let mut stall = 0u32;
    let mut prev_update = T::infinity();
    let floor = T::of(1e-290);

    for it in 0..options.max_iter {
        iterations = it + 1;
        let (gc, gm) = gradients(&grid, &u);
        let kdiff: Vec<T> = gc
            .iter()
            .map(|&g| (g + delta * delta).powf((p - two) / two))
            .collect();
        let mut mat = Banded::zeros(nun, n_int_t);
        let mut rhs = vec![T::zero(); nun];
        for i in 1..nr - 1 {
            for j in 0..nt - 1 {
                let k = unk(i, j);
                let st = stencil(&grid, &kdiff, &wcell, i, j);
                let mut diag = st.c_w + st.c_e + st.c_n + st.c_s;
                let uo = u[grid.idx(i, j)];
                if !options.absorption_off {
                    let src = (gm[grid.idx(i, j)] + delta * delta).powf(q / two);
                    if uo > floor {
                        diag = diag + src / uo;
                    } else {
                        rhs[k] = rhs[k] - src;
                    }
                }
                if ptc_engaged {
                    diag = diag + ptc_dtau_inv;
                    rhs[k] = rhs[k] + ptc_dtau_inv * uo;
                }
                mat.add(k, k, diag);
                if i > 1 {
                    mat.add(k, unk(i - 1, j), -st.c_w);
                } else {
                    rhs[k] = rhs[k] + st.c_w * data[j];
                }
                if i < nr - 2 {
                    mat.add(k, unk(i + 1, j), -st.c_e);
                }
                if j < nt - 2 {
                    mat.add(k, unk(i, j + 1), -st.c_n);
                }
                if j > 0 {
                    mat.add(k, unk(i, j - 1), -st.c_s);
                }
            }
        }
        if !mat.factor() {
            return Err(PdeError::SingularSystem);
        }
        mat.solve(&mut rhs);

        let mut sup_u = T::zero();
        let mut sup_diff = T::zero();
        for i in 1..nr - 1 {
            for j in 0..nt - 1 {
                let k = grid.idx(i, j);
                sup_u = sup_u.max(u[k].abs());
                sup_diff = sup_diff.max((rhs[unk(i, j)] - u[k]).abs());
            }
        }
        let update = if sup_u > T::zero() {
            sup_diff / sup_u
        } else {
            sup_diff
        };
        for i in 1..nr - 1 {
            for j in 0..nt - 1 {
                let k = grid.idx(i, j);
                let mut next = u[k] + options.damping * (rhs[unk(i, j)] - u[k]);
                if next < T::zero() {
                    next = T::zero();
                    clamp_events += 1;
                }
                u[k] = next;
            }
        }
        final_update = update;
        if update < options.tol {
            converged = true;
            break;
        }
        // stall detection -> pseudo-transient ramp
        if update < best_update * T::of(0.999) {
            best_update = update;
            stall = 0;
        } else {
            stall += 1;
        }
        if !ptc_engaged && stall >= options.stall_window {
            ptc_engaged = true;
            ptc_dtau_inv = T::one();
        } else if ptc_engaged {
            let growth = (prev_update / update).min(two).max(T::of(0.5));
            ptc_dtau_inv = (ptc_dtau_inv / growth).max(T::of(1e-12));
        }
        prev_update = update;
    }

    Ok(PolarField {
        grid,
        u,
        mode,
        stats: SolveStats {
            iterations,
            final_update,
            converged,
            clamp_events,
            ptc_engaged,
            reg_delta: delta,
        },
    })
}

/// Discrete residual `-div_h(K ∇u) + (|∇u|²_mono + δ²)^{q/2}` at the
/// interior nodes, with the solver's own discretization. Returned row-major
/// over `(1..nr-1) x (0..nt-1)`.
pub fn discrete_residual<T: Real>(
    grid: &PolarGrid<T>,
    u: &[T],
    params: &ProblemParams<T>,
    delta: T,
    absorption_off: bool,
) -> Result<Vec<T>, PdeError> {
    let nr = grid.r.len();
    let nt = grid.theta.len();
    if u.len() != nr * nt {
        return Err(PdeError::BadArgument("field length != n_r * n_theta"));
    }
    let p = params.p();
    let q = params.q()?;
    let two = T::of(2.0);
    let (gc, gm) = gradients(grid, u);
    let kdiff: Vec<T> = gc
        .iter()
        .map(|&g| (g + delta * delta).powf((p - two) / two))
        .collect();
    let wcell = weight_cells(grid);
    let mut res = Vec::with_capacity((nr - 2) * (nt - 1));
    for i in 1..nr - 1 {
        for j in 0..nt - 1 {
            let st = stencil(grid, &kdiff, &wcell, i, j);
            let uc = u[grid.idx(i, j)];
            let mut val = st.c_w * (uc - u[grid.idx(i - 1, j)])
                + st.c_e * (uc - u[grid.idx(i + 1, j)])
                + st.c_n * (uc - u[grid.idx(i, j + 1)]);
            if j > 0 {
                val = val + st.c_s * (uc - u[grid.idx(i, j - 1)]);
            }
            if !absorption_off {
                val = val + (gm[grid.idx(i, j)] + delta * delta).powf(q / two);
            }
            res.push(val);
        }
    }
    Ok(res)
}
