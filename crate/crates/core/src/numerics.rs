//! Small shared numerical kernels: RK4 stepping, composite quadrature,
//! finite differences, grids and least squares.

use crate::real::Real;

/// One classical fourth-order Runge-Kutta step for a 2-component system.
#[inline]
pub fn rk4_step2<T: Real, F>(f: &F, t: T, y: [T; 2], h: T) -> [T; 2]
where
    F: Fn(T, [T; 2]) -> [T; 2],
{
    let half = T::of(0.5);
    let sixth = T::of(1.0 / 6.0);
    let two = T::of(2.0);
    let k1 = f(t, y);
    let k2 = f(t + half * h, [y[0] + half * h * k1[0], y[1] + half * h * k1[1]]);
    let k3 = f(t + half * h, [y[0] + half * h * k2[0], y[1] + half * h * k2[1]]);
    let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h * sixth * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
        y[1] + h * sixth * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
    ]
}

/// `n` evenly spaced nodes from `a` to `b` inclusive.
pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    assert!(n >= 2);
    let h = (b - a) / T::of((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + T::of(i as f64) * h
            }
        })
        .collect()
}

/// `n` log-evenly spaced nodes from `a` to `b` inclusive (`a, b > 0`).
pub fn geomspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    assert!(n >= 2);
    let la = a.ln();
    let lb = b.ln();
    let h = (lb - la) / T::of((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                (la + T::of(i as f64) * h).exp()
            }
        })
        .collect()
}

/// Composite Simpson rule on a uniform grid with an even interval count.
///
/// Falls back to trapezoid on the last interval when the count is odd.
pub fn simpson_uniform<T: Real>(values: &[T], h: T) -> T {
    let n = values.len();
    assert!(n >= 2);
    let m = n - 1;
    let pairs = m / 2;
    let mut acc = T::zero();
    let four = T::of(4.0);
    let third = T::of(1.0 / 3.0);
    for k in 0..pairs {
        let i = 2 * k;
        acc = acc + third * h * (values[i] + four * values[i + 1] + values[i + 2]);
    }
    if m % 2 == 1 {
        acc = acc + T::of(0.5) * h * (values[m - 1] + values[m]);
    }
    acc
}

/// Centered second difference on a uniform grid; one-sided error `O(h)` is
/// not needed because callers only use interior nodes.
#[inline]
pub fn second_diff<T: Real>(values: &[T], i: usize, h: T) -> T {
    (values[i - 1] - T::of(2.0) * values[i] + values[i + 1]) / (h * h)
}

/// Piecewise-linear interpolation of `(xs, ys)` at `x` (xs increasing).
/// Clamps outside the table.
pub fn lerp_table<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let mut lo = 0usize;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if xs[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, r2)`.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = T::of(xs.len() as f64);
    let mut sx = T::zero();
    let mut sy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sx = sx + x;
        sy = sy + y;
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_res = syy - a * sxy;
    let r2 = if syy > T::zero() {
        T::one() - ss_res / syy
    } else {
        T::one()
    };
    (a, b, r2)
}
