//! Closed-form exponent arithmetic and analytic bounds on `β_*`.
//!
//! For the equation `-Δ_p u + |∇u|^q = 0` on the half space, separable
//! solutions `u = r^{-β_q} ω(σ)` force the similarity exponent
//!
//! ```text
//!     β_q = (p - q)/(q + 1 - p),        Λ_β = β (p-1) + p - N,
//! ```
//!
//! while the p-harmonic eigenprofile on the upper half sphere carries its
//! own exponent `β_*`, known in closed form only for `p = 2` (`β_* = N-1`),
//! `p = N` (`β_* = 1`) and `N = 2`. The critical absorption exponent is
//!
//! ```text
//!     q_* = (β_* (p-1) + p)/(β_* + 1) = p - β_*/(β_* + 1),
//! ```
//!
//! and boundary isolated singularities exist exactly for `q < q_*`,
//! equivalently `β_q > β_*`.
//!
//! For `N = 2` the azimuthal phase ODE is autonomous and integrates in
//! closed form; `β_*` is the positive root of the quadratic
//! `3(p-1) x^2 + 2(p-3) x - (p-1) = 0`, that is
//!
//! ```text
//!     β_* = (3 - p + 2 sqrt(p^2 - 3p + 3)) / (3 (p - 1)).
//! ```
//!
//! Two corrupted variants of this expression circulate (one with radicand
//! `p^2 - 5p + 7`, one with leading coefficient `1` instead of `3 - p`);
//! both agree with the true root only at `p = 2`. They are kept in
//! [`diagnostics`] so the shooting solver can demonstrate the disagreement.

use serde::Serialize;

use crate::params::{ParamError, ProblemParams};
use crate::real::Real;

/// Which side of the critical exponent `q_*` the parameters sit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q < q_*` (equivalently `β_q > β_*`): singular solutions exist.
    Subcritical,
    /// `q >= q_*`: no singular profile, isolated singularities removable.
    CriticalOrAbove,
}

/// The similarity exponent `β_q = (p-q)/(q+1-p)`.
///
/// Strictly positive and strictly decreasing in `q` on `(p-1, p)`; the call
/// is a domain error at `q = p` and outside the interval.
pub fn beta_q<T: Real>(params: &ProblemParams<T>) -> Result<T, ParamError> {
    let q = params.q()?;
    let p = params.p();
    Ok((p - q) / (q + T::one() - p))
}

/// `Λ_β = β (p-1) + p - N` for an arbitrary exponent `β`.
pub fn lambda_of<T: Real>(beta: T, params: &ProblemParams<T>) -> T {
    beta * (params.p() - T::one()) + params.p() - params.nf()
}

/// The critical absorption exponent `q_* = p - β_*/(β_* + 1)`.
///
/// Requires `β_* > 0`; the result lies in `(p-1, p)`.
pub fn q_star<T: Real>(beta_star: T, params: &ProblemParams<T>) -> Result<T, ParamError> {
    if !(beta_star > T::zero()) || !beta_star.is_finite() {
        return Err(ParamError::NotFinite);
    }
    Ok(params.p() - beta_star / (beta_star + T::one()))
}

/// The planar (`N = 2`) eigenexponent, valid for `1 < p <= 2`.
///
/// Positive root of `3(p-1) x^2 + 2(p-3) x - (p-1) = 0`, obtained by exact
/// quadrature of the autonomous phase ODE.
pub fn beta_star_planar<T: Real>(p: T) -> T {
    let three = T::of(3.0);
    let rad = p * p - three * p + three;
    (three - p + T::of(2.0) * rad.sqrt()) / (three * (p - T::one()))
}

/// Closed-form `β_*` where one is known.
///
/// * `p = 2`: `β_* = N - 1`;
/// * `p = N`: `β_* = 1`;
/// * `N = 2`, `1 < p <= 2`: [`beta_star_planar`];
/// * otherwise `None` (use the shooting eigensolver).
pub fn beta_star_closed_form<T: Real>(params: &ProblemParams<T>) -> Option<T> {
    let p = params.p();
    let two = T::of(2.0);
    if p == two {
        return Some(params.nf() - T::one());
    }
    if p == params.nf() {
        return Some(T::one());
    }
    if params.n() == 2 && p > T::one() && p <= two {
        return Some(beta_star_planar(p));
    }
    None
}

/// Corrupted printed variants of the planar closed form, kept as
/// diagnostics. Both coincide with [`beta_star_planar`] at `p = 2` and
/// disagree with the shooting solution for every other `p`.
pub mod diagnostics {
    use crate::real::Real;

    /// Variant with radicand `p^2 - 5p + 7` in place of `p^2 - 3p + 3`.
    pub fn planar_variant_radicand<T: Real>(p: T) -> T {
        let three = T::of(3.0);
        let rad = p * p - T::of(5.0) * p + T::of(7.0);
        (three - p + T::of(2.0) * rad.sqrt()) / (three * (p - T::one()))
    }

    /// Variant with leading term `1` in place of `3 - p`.
    pub fn planar_variant_prefactor<T: Real>(p: T) -> T {
        let three = T::of(3.0);
        let rad = p * p - three * p + three;
        (T::one() + T::of(2.0) * rad.sqrt()) / (three * (p - T::one()))
    }
}

/// Outcome of a single analytic bound evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck<T> {
    /// Which inequality was evaluated.
    pub name: &'static str,
    /// Whether it holds (equalities pass within [`EQUALITY_RTOL`]).
    pub satisfied: bool,
    /// Whether the check detected the equality case.
    pub equality: bool,
    /// Left-hand side (the tested `β_*`).
    pub beta_star: T,
    /// Right-hand side of the inequality.
    pub threshold: T,
}

/// Relative tolerance used to flag equality cases in [`check_bounds`].
pub const EQUALITY_RTOL: f64 = 1e-8;

/// Evaluates the analytic bounds on `β_*`:
///
/// * `β_* > (N-p)/(p-1)` whenever `p < N`;
/// * `β_* < (N-1)/(p-1)` for `2 < p < N`;
/// * `β_* > (N-1)/(p-1)` for `1 < p < 2`;
/// * `β_* = (N-1)/(p-1)` (to tolerance) at `p = 2` and `p = N`;
/// * `β_* >= max{1, (N-p)/(p-1)}`.
///
/// Unsatisfied bounds are reported, never thrown.
pub fn check_bounds<T: Real>(beta_star: T, params: &ProblemParams<T>) -> Vec<BoundCheck<T>> {
    let p = params.p();
    let nf = params.nf();
    let one = T::one();
    let two = T::of(2.0);
    let rtol = T::of(EQUALITY_RTOL);
    let serrin = (nf - p) / (p - one);
    let ratio = (nf - one) / (p - one);
    let near = |a: T, b: T| (a - b).abs() <= rtol * (one + a.abs().max(b.abs()));

    let mut checks = Vec::new();
    if p < nf {
        checks.push(BoundCheck {
            name: "beta_star > (N-p)/(p-1)",
            satisfied: beta_star > serrin,
            equality: near(beta_star, serrin),
            beta_star,
            threshold: serrin,
        });
    }
    if p > two && p < nf {
        checks.push(BoundCheck {
            name: "beta_star < (N-1)/(p-1) for 2 < p < N",
            satisfied: beta_star < ratio,
            equality: near(beta_star, ratio),
            beta_star,
            threshold: ratio,
        });
    }
    if p < two {
        checks.push(BoundCheck {
            name: "beta_star > (N-1)/(p-1) for 1 < p < 2",
            satisfied: beta_star > ratio,
            equality: near(beta_star, ratio),
            beta_star,
            threshold: ratio,
        });
    }
    if p == two || p == nf {
        checks.push(BoundCheck {
            name: "beta_star = (N-1)/(p-1) at p = 2 or p = N",
            satisfied: near(beta_star, ratio),
            equality: near(beta_star, ratio),
            beta_star,
            threshold: ratio,
        });
    }
    let floor = one.max(serrin);
    checks.push(BoundCheck {
        name: "beta_star >= max{1, (N-p)/(p-1)}",
        satisfied: beta_star >= floor - rtol * (one + floor),
        equality: near(beta_star, floor),
        beta_star,
        threshold: floor,
    });
    checks
}

/// Summary of the exponent arithmetic for one parameter triple.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport<T> {
    pub beta_q: Option<T>,
    pub lambda_beta_q: Option<T>,
    pub beta_star: T,
    pub lambda_beta_star: T,
    pub q_star: T,
    pub regime: Option<Regime>,
    pub bound_checks: Vec<BoundCheck<T>>,
}

impl<T: Real> ExponentReport<T> {
    /// Assembles the report from a known `β_*` (closed form or eigensolver).
    pub fn build(beta_star: T, params: &ProblemParams<T>) -> Result<Self, ParamError> {
        let qs = q_star(beta_star, params)?;
        let bq = match params.q_opt() {
            Some(_) => Some(beta_q(params)?),
            None => None,
        };
        let regime = bq.map(|b| {
            if b > beta_star {
                Regime::Subcritical
            } else {
                Regime::CriticalOrAbove
            }
        });
        Ok(ExponentReport {
            beta_q: bq,
            lambda_beta_q: bq.map(|b| lambda_of(b, params)),
            beta_star,
            lambda_beta_star: lambda_of(beta_star, params),
            q_star: qs,
            regime,
            bound_checks: check_bounds(beta_star, params),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pq(n: u32, p: f64, q: f64) -> ProblemParams<f64> {
        ProblemParams::with_q(n, p, q).unwrap()
    }

    #[test]
    fn beta_q_direct_substitution() {
        // (N=3, p=2, q=3/2) -> 1
        assert_eq!(beta_q(&pq(3, 2.0, 1.5)).unwrap(), 1.0);
        // (N=3, p=2, q=4/3) -> 2
        assert!((beta_q(&pq(3, 2.0, 4.0 / 3.0)).unwrap() - 2.0).abs() < 1e-12);
        // q -> p^- drives beta_q -> 0
        assert!(beta_q(&pq(3, 2.0, 2.0 - 1e-9)).unwrap() < 1e-8);
        // q = p is a domain error
        assert!(beta_q(&pq(3, 2.0, 2.0)).is_err());
    }

    #[test]
    fn lambda_substitutions() {
        // (β=1, p=N) -> N-1
        let pr = ProblemParams::new(4, 4.0).unwrap();
        assert_eq!(lambda_of(1.0, &pr), 3.0);
        // (β=N-1, p=2) -> 1
        let pr = ProblemParams::new(5, 2.0).unwrap();
        assert_eq!(lambda_of(4.0, &pr), 1.0);
        // Λ vanishes at the Serrin exponent
        let pr = ProblemParams::new(4, 3.0).unwrap();
        let lam: f64 = lambda_of((4.0 - 3.0) / (3.0 - 1.0), &pr);
        assert!(lam.abs() < 1e-15);
    }

    #[test]
    fn q_star_examples() {
        // (β_*=1, p=N) -> N - 1/2
        let pr = ProblemParams::new(4, 4.0).unwrap();
        assert_eq!(q_star(1.0, &pr).unwrap(), 3.5);
        // (β_*=N-1, p=2, N=3) -> 4/3
        let pr = ProblemParams::new(3, 2.0).unwrap();
        let qs: f64 = q_star(2.0, &pr).unwrap();
        assert!((qs - 4.0 / 3.0).abs() < 1e-15);
        // β_* -> ∞ drives q_* -> p - 1
        let pr = ProblemParams::new(3, 2.0).unwrap();
        let qs: f64 = q_star(1e12, &pr).unwrap();
        assert!((qs - 1.0).abs() < 1e-11);
        assert!(q_star(-1.0, &pr).is_err());
        assert!(q_star(0.0, &pr).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            beta_star_closed_form(&ProblemParams::new(5, 2.0).unwrap()),
            Some(4.0)
        );
        assert_eq!(
            beta_star_closed_form(&ProblemParams::new(4, 4.0).unwrap()),
            Some(1.0)
        );
        // N=2, p=3/2: (1.5 + 2 sqrt(0.75)) / 1.5
        let b = beta_star_closed_form(&ProblemParams::new(2, 1.5).unwrap()).unwrap();
        assert!((b - (1.5 + 2.0 * 0.75f64.sqrt()) / 1.5).abs() < 1e-15);
        assert!((b - 2.154700538379252).abs() < 1e-12);
        // no closed form for generic (N, p)
        assert_eq!(
            beta_star_closed_form(&ProblemParams::new(4, 3.0).unwrap()),
            None
        );
    }

    #[test]
    fn planar_root_solves_quadratic() {
        for &p in &[1.1, 1.3, 1.5, 1.7, 1.9, 2.0] {
            let x: f64 = beta_star_planar(p);
            let res = 3.0 * (p - 1.0) * x * x + 2.0 * (p - 3.0) * x - (p - 1.0);
            assert!(res.abs() < 1e-12, "p={p}: residual {res}");
        }
    }

    #[test]
    fn printed_variants_agree_only_at_p_two() {
        assert!((diagnostics::planar_variant_radicand(2.0f64) - 1.0).abs() < 1e-15);
        assert!((diagnostics::planar_variant_prefactor(2.0f64) - 1.0).abs() < 1e-15);
        for &p in &[1.2f64, 1.5, 1.8] {
            let truth = beta_star_planar(p);
            assert!((diagnostics::planar_variant_radicand(p) - truth).abs() > 1e-3);
            assert!((diagnostics::planar_variant_prefactor(p) - truth).abs() > 1e-3);
        }
    }

    #[test]
    fn bound_checks_flag_equalities() {
        // (β_*=2, N=3, p=2): all satisfied, equality flagged
        let pr = ProblemParams::new(3, 2.0).unwrap();
        let checks = check_bounds(2.0, &pr);
        assert!(checks.iter().all(|c| c.satisfied));
        assert!(checks.iter().any(|c| c.equality));
        // (β_*=1, N=3, p=3): p = N equality case
        let pr = ProblemParams::new(3, 3.0).unwrap();
        let checks = check_bounds(1.0, &pr);
        assert!(checks.iter().all(|c| c.satisfied));
        assert!(checks
            .iter()
            .any(|c| c.name.contains("p = 2 or p = N") && c.equality));
    }

    #[test]
    fn report_consistency() {
        let pr = pq(3, 2.0, 1.25);
        let rep = ExponentReport::build(2.0, &pr).unwrap();
        assert_eq!(rep.beta_q.unwrap(), 3.0);
        assert!((rep.q_star - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(rep.regime, Some(Regime::Subcritical));
    }

    #[test]
    fn kernels_instantiate_at_f32() {
        // the scalar abstraction is real: exponent arithmetic and a coarse
        // eigensolve run in single precision at matching loose tolerances
        let pr = ProblemParams::<f32>::with_q(3, 2.0, 1.25).unwrap();
        assert!((beta_q(&pr).unwrap() - 3.0f32).abs() < 1e-5);
        assert!((q_star(2.0f32, &pr).unwrap() - 4.0 / 3.0).abs() < 1e-5);
        let base = ProblemParams::<f32>::new(3, 2.0).unwrap();
        let r = crate::eigensolver::solve_beta_star(&base, 1e-4f32, 256).unwrap();
        assert!((r.beta_star - 2.0).abs() < 1e-3, "f32 beta_star {}", r.beta_star);
    }

    proptest! {
        // q |-> beta_q strictly decreasing on (p-1, p), and the regime flag
        // agrees with both the beta comparison and the q comparison.
        #[test]
        fn beta_q_monotone_and_regime_consistent(
            p in 1.05f64..3.0,
            t1 in 0.01f64..0.99,
            t2 in 0.01f64..0.99,
        ) {
            let n = 3u32;
            let p = p.min(3.0);
            let (lo, hi) = (t1.min(t2), t1.max(t2));
            prop_assume!(hi - lo > 1e-6);
            let q1 = p - 1.0 + lo * (1.0 - 1e-9);
            let q2 = p - 1.0 + hi * (1.0 - 1e-9);
            let b1 = beta_q(&pq(n, p, q1)).unwrap();
            let b2 = beta_q(&pq(n, p, q2)).unwrap();
            prop_assert!(b1 > b2);
            prop_assert!(b2 > 0.0);

            // regime flag consistency against an arbitrary positive beta_star
            let beta_star = 1.0 + t1 * 4.0;
            let rep = ExponentReport::build(beta_star, &pq(n, p, q1)).unwrap();
            let by_beta = b1 > beta_star;
            let by_q = q1 < rep.q_star;
            prop_assert_eq!(by_beta, by_q);
            prop_assert_eq!(rep.regime == Some(Regime::Subcritical), by_beta);
        }

        // p = 2 reduction: beta_q(N,2,q) = (2-q)/(q-1).
        #[test]
        fn p_two_reduction(q in 1.01f64..1.99) {
            let b = beta_q(&pq(3, 2.0, q)).unwrap();
            prop_assert!((b - (2.0 - q)/(q - 1.0)).abs() < 1e-12 * (1.0 + b));
        }
    }
}
