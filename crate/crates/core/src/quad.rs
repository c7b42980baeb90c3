//! Quadrature kernels shared by the measure and matrix pipelines.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Periodic trapezoid of a function over [-pi, pi], doubling the node count
/// until two successive estimates agree to `tol` (absolutely, relative to the
/// magnitude of the estimate) or `max_nodes` is reached.
///
/// Converges geometrically for integrands analytic in a strip around the
/// real axis, which is the case for all contour integrands used here.
pub fn periodic_trapezoid<F>(mut f: F, tol: f64, max_nodes: usize) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let mut n = 16usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
        sum += f(t);
    }
    let mut prev = sum * Complex64::new(2.0 * std::f64::consts::PI / n as f64, 0.0);
    loop {
        // refine: add the midpoints of the current grid
        for k in 0..n {
            let t = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / (n as f64);
            sum += f(t);
        }
        n *= 2;
        let cur = sum * Complex64::new(2.0 * std::f64::consts::PI / n as f64, 0.0);
        let err = (cur - prev).norm();
        if err <= tol * (1.0 + cur.norm()) {
            return Ok(cur);
        }
        if n >= max_nodes {
            return Err(Error::QuadratureNoConvergence { tol, err });
        }
        prev = cur;
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial from Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrate f over [a, b] by composite Gauss-Legendre with an endpoint
/// substitution x = a + (m-a) u^4 (resp. mirrored at b) on each half, which
/// regularizes algebraic endpoint singularities up to x^(-3/4).
pub fn integrate_endpoint_singular<F>(f: F, a: f64, b: f64, nodes_per_half: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let per_panel = 24usize;
    let panels = nodes_per_half.div_ceil(per_panel).max(4);
    let (xs, ws) = gauss_legendre(per_panel);
    let mid = 0.5 * (a + b);
    let mut total = 0.0;
    for (len, from_left) in [(mid - a, true), (b - mid, false)] {
        // u in [0,1] split into uniform panels; x = endpoint +- len*u^4
        for p in 0..panels {
            let u0 = p as f64 / panels as f64;
            let u1 = (p + 1) as f64 / panels as f64;
            let h = 0.5 * (u1 - u0);
            let m = 0.5 * (u0 + u1);
            for (&x, &w) in xs.iter().zip(&ws) {
                let u = m + h * x;
                let (xx, jac) = if from_left {
                    (a + len * u.powi(4), 4.0 * len * u.powi(3))
                } else {
                    (b - len * u.powi(4), 4.0 * len * u.powi(3))
                };
                if xx > a && xx < b {
                    total += w * h * f(xx) * jac;
                }
            }
        }
    }
    total
}

/// Polynomial extrapolation to zero (Neville tableau) of samples (h_i, y_i).
/// Returns the extrapolated value and an error estimate from the last
/// correction.
pub fn neville_to_zero(hs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = hs.len();
    assert_eq!(n, ys.len());
    let mut t = ys.to_vec();
    let mut best = t[n - 1];
    let mut err = f64::INFINITY;
    for k in 1..n {
        for i in 0..n - k {
            t[i] = t[i + 1] + (t[i + 1] - t[i]) * hs[i + k] / (hs[i] - hs[i + k]);
        }
        let e = (t[0] - best).abs();
        if e.is_finite() {
            err = e;
            best = t[0];
        }
    }
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_constant_coefficient() {
        // (1/2pi) int e^{ikt} dt = [k == 0]
        let v = periodic_trapezoid(|t| Complex64::from_polar(1.0, 3.0 * t), 1e-13, 1 << 16)
            .unwrap();
        assert!(v.norm() < 1e-12);
        let v0 = periodic_trapezoid(|t| Complex64::new(t.cos() * t.cos(), 0.0), 1e-13, 1 << 16)
            .unwrap();
        assert!((v0.re - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn gl_exactness() {
        // 10-point GL integrates degree-19 polynomials exactly
        let (xs, ws) = gauss_legendre(10);
        let val: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * x.powi(18)).sum();
        assert!((val - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singular_sqrt() {
        // int_0^1 1/sqrt(x(1-x)) dx = pi. The floor here is set by
        // cancellation in evaluating 1-x next to the endpoint, not by the
        // rule itself.
        let v = integrate_endpoint_singular(|x| 1.0 / (x * (1.0 - x)).sqrt(), 0.0, 1.0, 200);
        assert!((v - std::f64::consts::PI).abs() < 5e-9, "got {v}");
    }

    #[test]
    fn neville_extrapolates_quadratic() {
        let hs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<f64> = hs.iter().map(|h| 3.0 + 2.0 * h + 7.0 * h * h).collect();
        let (v, _) = neville_to_zero(&hs, &ys);
        assert!((v - 3.0).abs() < 1e-12);
    }
}
