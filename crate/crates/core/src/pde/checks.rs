//! Post-processing of polar fields: exponent fits, gradient and Harnack
//! spot checks, and the discrete scaling-covariance test.

use serde::Serialize;

use crate::exponents::beta_q;
use crate::numerics::{lerp_table, linear_fit};
use crate::params::ProblemParams;
use crate::real::Real;

use super::{discrete_residual, PdeError, PolarField, PolarGrid};

/// Least-squares decay exponent over a radial window.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit<T> {
    /// Fitted decay exponent of `max_θ u(r, ·)` (sign convention: `u ~ r^{-β̂}`).
    pub beta_hat: T,
    pub r_window: (T, T),
    /// Regression quality in `[0, 1]`.
    pub r2: T,
    /// Max-normalized azimuthal profile at the window midpoint shell.
    pub profile_at_mid: Vec<T>,
}

/// Fit failures.
#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// Fewer than 8 shells inside the window.
    WindowTooSmall { shells: usize },
    /// Window must start above `3ε` to stay clear of the boundary layer.
    WindowTooClose { r_lo: f64, eps: f64 },
    /// Shell maxima vanished (log of zero).
    DegenerateData,
}

impl std::fmt::Display for FitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitError::WindowTooSmall { shells } => {
                write!(f, "fit window holds {shells} shells, need at least 8")
            }
            FitError::WindowTooClose { r_lo, eps } => {
                write!(f, "fit window start {r_lo} within 3x inner radius {eps}")
            }
            FitError::DegenerateData => write!(f, "shell maxima are zero inside the window"),
        }
    }
}

impl std::error::Error for FitError {}

/// Fits `log max_θ u` against `log r` over `[r_lo, r_hi]`.
pub fn fit_exponent<T: Real>(
    field: &PolarField<T>,
    window: (T, T),
) -> Result<ExponentFit<T>, FitError> {
    let (r_lo, r_hi) = window;
    let eps = field.grid.eps();
    if r_lo <= T::of(3.0) * eps {
        return Err(FitError::WindowTooClose {
            r_lo: r_lo.to_f64().unwrap_or(f64::NAN),
            eps: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut shell_ids = Vec::new();
    for (i, &r) in field.grid.r.iter().enumerate() {
        if r < r_lo || r > r_hi {
            continue;
        }
        let m = field.shell_max(i);
        if m <= T::zero() {
            return Err(FitError::DegenerateData);
        }
        xs.push(r.ln());
        ys.push(m.ln());
        shell_ids.push(i);
    }
    if xs.len() < 8 {
        return Err(FitError::WindowTooSmall { shells: xs.len() });
    }
    let (slope, _, r2) = linear_fit(&xs, &ys);
    let mid = (r_lo * r_hi).sqrt();
    let imid = shell_ids
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let da = (field.grid.r[a] - mid).abs();
            let db = (field.grid.r[b] - mid).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let mmax = field.shell_max(imid);
    let profile: Vec<T> = (0..field.grid.theta.len())
        .map(|j| field.at(imid, j) / mmax)
        .collect();
    Ok(ExponentFit {
        beta_hat: -slope,
        r_window: window,
        r2,
        profile_at_mid: profile,
    })
}

/// Sup of `|∇u| d^{1/(q+1-p)}` with `d = r cos θ` the distance to the wall.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GradientReport<T> {
    pub constant: T,
    pub at_r: T,
    pub at_theta: T,
}

/// Evaluates the scale-invariant gradient bound constant on interior nodes.
pub fn gradient_estimate_check<T: Real>(
    field: &PolarField<T>,
    params: &ProblemParams<T>,
) -> Result<GradientReport<T>, PdeError> {
    let q = params.q()?;
    let p = params.p();
    let expo = T::one() / (q + T::one() - p);
    let grid = &field.grid;
    let nr = grid.r.len();
    let nt = grid.theta.len();
    let dth = grid.theta[1] - grid.theta[0];
    let mut best = T::zero();
    let mut at = (T::zero(), T::zero());
    for i in 1..nr - 1 {
        for j in 0..nt - 1 {
            let ur = (field.at(i + 1, j) - field.at(i - 1, j)) / (grid.r[i + 1] - grid.r[i - 1]);
            let ut = if j == 0 {
                T::zero()
            } else {
                (field.at(i, j + 1) - field.at(i, j - 1)) / (dth + dth)
            };
            let gn = (ur * ur + ut * ut / (grid.r[i] * grid.r[i])).sqrt();
            let d = grid.r[i] * grid.theta[j].cos();
            let c = gn * d.powf(expo);
            if c > best {
                best = c;
                at = (grid.r[i], grid.theta[j]);
            }
        }
    }
    Ok(GradientReport {
        constant: best,
        at_r: at.0,
        at_theta: at.1,
    })
}

/// Boundary Harnack spot check over comparable shells.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HarnackReport<T> {
    /// `max [u(x)/d(x)] / [u(y)/d(y)]` over pairs with `|x|/2 <= |y| <= 2|x|`.
    pub max_ratio: T,
    /// Nodes skipped by the positivity guard.
    pub guarded_nodes: u64,
}

/// Evaluates the shell-pair quotient bound; a finite stable value is the
/// pass condition. Shells with `r > 1/4` are left out: next to the
/// artificial outer truncation the field vanishes and the quotient carries
/// no information about the wall behaviour.
pub fn harnack_spot_check<T: Real>(field: &PolarField<T>) -> HarnackReport<T> {
    let grid = &field.grid;
    let nr = grid.r.len();
    let nt = grid.theta.len();
    let r_cap = T::of(0.25);
    let mut guarded = 0u64;
    // per-shell extremes of u/d over interior azimuths
    let mut qmax = vec![T::neg_infinity(); nr];
    let mut qmin = vec![T::infinity(); nr];
    for i in 1..nr - 1 {
        if grid.r[i] > r_cap {
            continue;
        }
        for j in 0..nt - 1 {
            let u = field.at(i, j);
            let d = grid.r[i] * grid.theta[j].cos();
            if u <= T::zero() || d <= T::zero() {
                guarded += 1;
                continue;
            }
            let qv = u / d;
            qmax[i] = qmax[i].max(qv);
            qmin[i] = qmin[i].min(qv);
        }
    }
    let two = T::of(2.0);
    let mut best = T::zero();
    for i1 in 1..nr - 1 {
        if !qmax[i1].is_finite() {
            continue;
        }
        for i2 in 1..nr - 1 {
            let r1 = grid.r[i1];
            let r2 = grid.r[i2];
            if r2 < r1 / two || r2 > two * r1 {
                continue;
            }
            if qmin[i2] > T::zero() && qmin[i2].is_finite() {
                best = best.max(qmax[i1] / qmin[i2]);
            }
        }
    }
    HarnackReport {
        max_ratio: best,
        guarded_nodes: guarded,
    }
}

/// Discrete scaling-covariance deviation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingReport<T> {
    /// `sup |R[T_ℓ w](x) - ℓ^{q(β_q+1)} R[w](ℓx)|` over comparable nodes.
    pub sup_diff: T,
    /// `sup |R[T_ℓ w]|`, the natural scale of the residual field.
    pub residual_scale: T,
    /// `sup_diff / residual_scale`.
    pub relative: T,
}

/// Checks that the discrete residual operator inherits the continuum
/// scaling `R[T_ℓ u](x) = ℓ^{q(β_q+1)} R[u](ℓx)` up to discretization
/// error, on the manufactured field `w = r^{-β_q} cos θ`.
///
/// `R[w](ℓx)` is interpolated in `log r` between shells, so the comparison
/// is exact in the continuum limit and the reported deviation measures the
/// discretization alone.
pub fn scaling_invariance_check<T: Real>(
    params: &ProblemParams<T>,
    ell: T,
    grid: &PolarGrid<T>,
) -> Result<ScalingReport<T>, PdeError> {
    if !(ell > T::zero() && ell <= T::one()) {
        return Err(PdeError::BadArgument("need 0 < ell <= 1"));
    }
    let q = params.q()?;
    let bq = beta_q(params)?;
    let nr = grid.r.len();
    let nt = grid.theta.len();
    let make = |scale: T, amp: T| -> Vec<T> {
        // T_ℓ w (x) = ℓ^{β_q} w(ℓ x) = amp * (scale*r)^{-β_q} cos θ
        let mut u = vec![T::zero(); nr * nt];
        for (i, &r) in grid.r.iter().enumerate() {
            for (j, &t) in grid.theta.iter().enumerate() {
                u[grid.idx(i, j)] = amp * (scale * r).powf(-bq) * t.cos();
            }
        }
        u
    };
    let w = make(T::one(), T::one());
    let w_scaled = make(ell, ell.powf(bq));
    let res_w = discrete_residual(grid, &w, params, T::zero(), false)?;
    let res_ws = discrete_residual(grid, &w_scaled, params, T::zero(), false)?;
    let n_int_t = nt - 1;
    // ln r table of the base residual per azimuth
    let lnr: Vec<T> = grid.r[1..nr - 1].iter().map(|&r| r.ln()).collect();
    let power = ell.powf(q * (bq + T::one()));
    let mut sup_diff = T::zero();
    let mut scale_sup = T::zero();
    // skip boundary-adjacent rows/columns: their stencils average the
    // one-sided boundary gradients into the face diffusivity
    let nrow = lnr.len();
    for (row, &r) in grid.r[1..nr - 1].iter().enumerate() {
        if row == 0 || row + 1 == nrow {
            continue;
        }
        let target = (ell * r).ln();
        if target < lnr[1] || target > lnr[nrow - 2] {
            continue;
        }
        for j in 0..n_int_t.saturating_sub(1) {
            let col: Vec<T> = (0..nrow).map(|i| res_w[i * n_int_t + j]).collect();
            let base = lerp_table(&lnr, &col, target);
            let lhs = res_ws[row * n_int_t + j];
            sup_diff = sup_diff.max((lhs - power * base).abs());
            scale_sup = scale_sup.max(lhs.abs());
        }
    }
    Ok(ScalingReport {
        sup_diff,
        residual_scale: scale_sup,
        relative: if scale_sup > T::zero() {
            sup_diff / scale_sup
        } else {
            T::zero()
        },
    })
}
