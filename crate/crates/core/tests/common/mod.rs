//! Test-only oracles, independent of the library's solver path.

/// Direct integrator for the `p = 2` azimuthal absorption equation
///
/// ```text
///   ω'' = -(N-2) cot θ ω' + (β²ω² + ω'²)^{q/2} - λ ω,    λ = β Λ_β,
/// ```
///
/// (no elliptic-coordinate reduction, no divided form, its own RK4 and
/// bisection). Returns the profile on the uniform grid `0, h, ..., π/2`
/// together with the pole value.
pub struct LaplaceOracle {
    pub n: f64,
    pub beta: f64,
    pub lambda: f64,
    pub q: f64,
}

impl LaplaceOracle {
    pub fn new(n: u32, q: f64) -> Self {
        let nf = n as f64;
        let beta = (2.0 - q) / (q - 1.0);
        let lambda = beta * (beta + 2.0 - nf);
        LaplaceOracle {
            n: nf,
            beta,
            lambda,
            q,
        }
    }

    fn rhs(&self, th: f64, w: f64, v: f64) -> f64 {
        let s = self.beta * self.beta * w * w + v * v;
        -(self.n - 2.0) * (th.cos() / th.sin()) * v + s.powf(0.5 * self.q) - self.lambda * w
    }

    /// RK4 shot from the pole; `Some(values on the grid)` when the profile
    /// stays positive to `π/2`, `None` on a zero crossing or blow-up.
    fn shot(&self, omega0: f64, m: usize) -> Option<Vec<f64>> {
        let th0 = 1e-6;
        let h = std::f64::consts::FRAC_PI_2 / m as f64;
        // series start: -2(N-1) a = λ ω₀ - (β ω₀)^q
        let a = ((self.beta * omega0).powf(self.q) - self.lambda * omega0) / (2.0 * (self.n - 1.0));
        let mut w = omega0 + a * th0 * th0;
        let mut v = 2.0 * a * th0;
        let mut t = th0;
        let mut out = Vec::with_capacity(m + 1);
        out.push(omega0);
        for j in 0..m {
            let t_next = if j == m - 1 {
                std::f64::consts::FRAC_PI_2
            } else {
                (j + 1) as f64 * h
            };
            let nsub = (((t_next - t) * self.rhs(t, w, v).abs()
                / (0.02 * (w.abs() + v.abs() + 1e-6 * omega0)))
                .ceil() as usize)
                .clamp(1, 1024);
            let hs = (t_next - t) / nsub as f64;
            for _ in 0..nsub {
                let f = |t: f64, y: (f64, f64)| (y.1, self.rhs(t, y.0, y.1));
                let y = (w, v);
                let k1 = f(t, y);
                let k2 = f(t + 0.5 * hs, (y.0 + 0.5 * hs * k1.0, y.1 + 0.5 * hs * k1.1));
                let k3 = f(t + 0.5 * hs, (y.0 + 0.5 * hs * k2.0, y.1 + 0.5 * hs * k2.1));
                let k4 = f(t + hs, (y.0 + hs * k3.0, y.1 + hs * k3.1));
                w = y.0 + hs / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                v = y.1 + hs / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                t += hs;
                if !w.is_finite() || !v.is_finite() || v.abs() > 1e10 * omega0.max(1.0) {
                    return None;
                }
                if w <= 0.0 {
                    return None;
                }
            }
            t = t_next;
            out.push(w);
        }
        Some(out)
    }

    /// Bisects the pole value between crossing and reaching starts.
    pub fn solve(&self, m: usize) -> Option<(f64, Vec<f64>)> {
        let mut lo = None;
        let mut hi = None;
        let mut w0 = 1e-6;
        while w0 < 1e8 {
            match self.shot(w0, m) {
                None => lo = Some(w0),
                Some(_) if lo.is_some() => {
                    hi = Some(w0);
                    break;
                }
                Some(_) => {}
            }
            w0 *= 2.0;
        }
        let (mut lo, mut hi) = (lo?, hi?);
        for _ in 0..80 {
            let mid = (lo * hi).sqrt();
            if self.shot(mid, m).is_none() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let values = self.shot(hi, m)?;
        Some((hi, values))
    }
}
