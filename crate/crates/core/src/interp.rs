//! Small numerical toolbox: monotone cubic (PCHIP) interpolation, Simpson
//! quadrature, cumulative quadrature on uniform grids, scalar root finding
//! and golden-section minimisation.

use crate::error::{Result, SolverError};

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson).
///
/// Monotone data produces a monotone interpolant, which is what the inverse
/// foot maps and tabulated pressure laws rely on.
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    /// Build from strictly increasing abscissae. Panics on fewer than two
    /// points or non-increasing `xs`; callers own grid construction.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert!(xs.len() >= 2, "pchip needs at least two points");
        for w in xs.windows(2) {
            assert!(
                w[1] > w[0],
                "pchip abscissae must increase: {} !< {}",
                w[0],
                w[1]
            );
        }
        let slopes = fritsch_carlson_slopes(&xs, &ys);
        Pchip { xs, ys, slopes }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) if i >= self.xs.len() => self.xs.len() - 2,
            Err(i) => i - 1,
        }
    }

    /// Evaluate; linear extension outside the data range (keeps p' continuous).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.slopes[0];
        }
        if x >= self.xs[n - 1] {
            return self.slopes[n - 1];
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        y0 * (6.0 * t2 - 6.0 * t) / h
            + m0 * (3.0 * t2 - 4.0 * t + 1.0)
            + y1 * (-6.0 * t2 + 6.0 * t) / h
            + m1 * (3.0 * t2 - 2.0 * t)
    }

    /// Second derivative of the cubic pieces (piecewise linear, jumps at knots;
    /// zero in the linear extensions).
    pub fn second_deriv(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] || x >= self.xs[n - 1] {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        y0 * (12.0 * t - 6.0) / (h * h)
            + m0 * (6.0 * t - 4.0) / h
            + y1 * (-12.0 * t + 6.0) / (h * h)
            + m1 * (6.0 * t - 2.0) / h
    }
}

fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut h = vec![0.0; n - 1];
    let mut d = vec![0.0; n - 1];
    for i in 0..n - 1 {
        h[i] = xs[i + 1] - xs[i];
        d[i] = (ys[i + 1] - ys[i]) / h[i];
    }
    let mut m = vec![0.0; n];
    m[0] = endpoint_slope(
        h[0],
        h.get(1).copied().unwrap_or(h[0]),
        d[0],
        d.get(1).copied().unwrap_or(d[0]),
    );
    m[n - 1] = endpoint_slope(
        h[n - 2],
        if n >= 3 { h[n - 3] } else { h[n - 2] },
        d[n - 2],
        if n >= 3 { d[n - 3] } else { d[n - 2] },
    );
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // one-sided three-point estimate, clamped for shape preservation
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Composite Simpson rule with `n` panels (function evaluated at `2n+1` nodes).
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 1);
    let m = 2 * n;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

/// Cumulative integral of uniformly sampled values (spacing `h`), returning
/// the running integral at every sample. Uses quadratic panels: O(h^3) global,
/// O(h^4) at even indices where full Simpson pairs apply.
pub fn cumulative_quad(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
        return out;
    }
    // first half-panel from the leading quadratic
    out[1] = h / 12.0 * (5.0 * values[0] + 8.0 * values[1] - values[2]);
    for k in 1..n - 1 {
        // Simpson over [k-1, k+1] added to the value two back
        out[k + 1] = out[k - 1] + h / 3.0 * (values[k - 1] + 4.0 * values[k] + values[k + 1]);
    }
    // recompute odd entries from the trailing quadratic for a consistent order
    for k in (1..n - 1).skip(1).step_by(2) {
        out[k] = out[k - 1] + h / 12.0 * (-values[k - 2] + 8.0 * values[k - 1] + 5.0 * values[k]);
    }
    out
}

/// Root of `f` on `[a, b]` assuming `f(a)` and `f(b)` straddle zero.
/// Illinois-damped regula falsi with a bisection fallback.
pub fn illinois_root<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(SolverError::BracketFailure { y: a, tau: b });
    }
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { a } else { b };
    let mut best_f = fa.abs().min(fb.abs());
    for it in 0..max_iter {
        let mut x = (fa * b - fb * a) / (fa - fb);
        if !x.is_finite() || x <= a.min(b) || x >= a.max(b) || it % 8 == 7 {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx.abs() < best_f {
            best_f = fx.abs();
            best = x;
        }
        if fx.abs() <= ftol || (b - a).abs() <= xtol {
            return Ok(if fx.abs() <= best_f { x } else { best });
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best)
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Uniform grid of `n` points including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pchip_reproduces_linear_data_exactly() {
        let xs = linspace(-1.0, 3.0, 9);
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 0.75).collect();
        let p = Pchip::new(xs, ys);
        for &x in &[-1.0, -0.37, 0.0, 1.234, 2.999, 3.0] {
            assert_relative_eq!(p.eval(x), 2.5 * x - 0.75, max_relative = 1e-14);
            assert_relative_eq!(p.deriv(x), 2.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn pchip_is_monotone_on_monotone_data() {
        let xs = linspace(0.1, 4.0, 17);
        let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let p = Pchip::new(xs.clone(), ys);
        let fine = linspace(0.1, 4.0, 1000);
        for w in fine.windows(2) {
            assert!(p.eval(w[1]) > p.eval(w[0]));
        }
        // interpolation error away from the steep left edge
        for &x in &fine {
            if x >= 1.0 {
                assert!((p.eval(x) - x.ln()).abs() < 1e-3, "x={x}");
            }
        }
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 4);
        // integral = [x^4/4 - x^2 + x] over [-1,2] = (4-4+2) - (1/4-1-1)
        assert_relative_eq!(v, 2.0 - (0.25 - 2.0), epsilon = 1e-13);
    }

    #[test]
    fn cumulative_quad_matches_closed_form() {
        let n = 201;
        let h = 0.5 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|k| (h * k as f64).sin()).collect();
        let cum = cumulative_quad(&vals, h);
        for k in 0..n {
            let t = h * k as f64;
            assert!((cum[k] - (1.0 - t.cos())).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn illinois_finds_simple_root() {
        let f = |x: f64| Ok(x * x - 2.0);
        let r = illinois_root(f, 0.0, 2.0, -2.0, 2.0, 1e-14, 1e-14, 200).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn golden_min_quadratic() {
        // localisation of a quadratic minimum is limited to sqrt(f64 eps)
        let (x, _) = golden_min(|x| (x - 0.7) * (x - 0.7) + 3.0, -1.0, 2.0, 80);
        assert_relative_eq!(x, 0.7, epsilon = 1e-6);
    }
}
