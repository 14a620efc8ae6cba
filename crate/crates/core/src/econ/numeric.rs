//! Quadrature, ODE stepping and root finding used by the equilibrium solvers.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (m - a) <= f64::EPSILON * m.abs().max(1.0) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Scalar ODE solution from classical RK4, stored at every step node.
#[derive(Debug, Clone)]
pub struct Rk4Solution {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dys: Vec<f64>,
}

/// Integrates `y' = rhs(x, y)` from `(x0, y0)` to `x1` with steps of at most `h`.
/// The final step is shortened to land exactly on `x1`.
pub fn rk4<F: Fn(f64, f64) -> f64>(rhs: F, x0: f64, y0: f64, x1: f64, h: f64) -> Rk4Solution {
    let span = x1 - x0;
    let steps = ((span / h).ceil() as usize).max(1);
    let step = span / steps as f64;
    let mut xs = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps + 1);
    let mut dys = Vec::with_capacity(steps + 1);
    let (mut x, mut y) = (x0, y0);
    xs.push(x);
    ys.push(y);
    dys.push(rhs(x, y));
    for i in 0..steps {
        // stages evaluate at the stored nodes so nothing samples past x1
        let next = if i + 1 == steps { x1 } else { x0 + (i + 1) as f64 * step };
        let h = next - x;
        let k1 = rhs(x, y);
        let k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
        let k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
        let k4 = rhs(next, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x = next;
        xs.push(x);
        ys.push(y);
        dys.push(rhs(x, y));
    }
    Rk4Solution { xs, ys, dys }
}

impl Rk4Solution {
    /// Cubic Hermite interpolation between step nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&xi| xi <= x).saturating_sub(1).min(n - 2);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.dys[i] + h01 * self.ys[i + 1] + h11 * h * self.dys[i + 1]
    }
}

/// Bisection for an increasing function `f` on `[lo, hi]` with `f(lo) <= target <= f(hi)`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
