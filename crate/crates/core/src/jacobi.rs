//! Jacobi parameters of the operator attached to the limiting measure:
//! the exact Hankel-determinant route and the classical moment-to-recurrence
//! (Chebyshev) algorithm in double-double, plus orthogonal polynomial
//! evaluation, the orthogonality quadrature check, and the constant-Jacobi
//! limit residuals.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::measure::CurveMeasure;
use crate::moments::MomentSequence;
use crate::quad::integrate_endpoint_singular;
use crate::symbol::rat_to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiMode {
    ExactHankel,
    ChebyshevExtended,
}

/// Off-diagonal a_1..a_N and diagonal b_1..b_N of the Jacobi matrix, with
/// exact values when the moments were exact rationals.
#[derive(Clone, Debug)]
pub struct JacobiParameters {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mode: JacobiMode,
    pub a_sq_exact: Option<Vec<BigRational>>,
    pub b_exact: Option<Vec<BigRational>>,
    /// indices beyond this are considered unreliable (Chebyshev mode only;
    /// equals N in exact mode)
    pub n_reliable: usize,
}

impl JacobiParameters {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Compute a_1..a_N and b_1..b_N from moments.
///
/// Exact mode evaluates
///   a_n^2 = det H_{n-1} det H_{n+1} / det H_n^2,
///   b_n   = det A_n / det H_n - det A_{n-1} / det H_{n-1}
/// (A_n the shifted Hankel minor, det H_0 = 1, det A_0 = 0) in big-rational
/// arithmetic. Chebyshev mode runs the classical sigma recurrence in
/// double-double and reports how many indices survive its cancellation.
pub fn jacobi_params(
    ms: &MomentSequence,
    n: usize,
    mode: JacobiMode,
) -> Result<JacobiParameters> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    let need = 2 * n + 1;
    if ms.m_max() + 1 < need {
        return Err(Error::InsufficientMoments { need, have: ms.m_max() + 1 });
    }
    if !ms.real {
        return Err(Error::NotRational);
    }
    match mode {
        JacobiMode::ExactHankel => {
            let ex = ms.exact.as_ref().ok_or(Error::NotRational)?;
            exact_route(ex, n)
        }
        JacobiMode::ChebyshevExtended => chebyshev_route(ms, n),
    }
}

fn exact_route(h: &[BigRational], n: usize) -> Result<JacobiParameters> {
    // det H_k for k = 0..=n+1 and det A_k (tilde) for k = 0..=n
    let mut det_h = vec![BigRational::one()]; // H_0
    let mut det_t = vec![BigRational::zero()]; // A_0 (so b_1 = h_1)
    for k in 1..=n + 1 {
        let hd = crate::moments::hankel(&MomentSequence::from_exact(h[..2 * k].to_vec()), k)?;
        let dh = hd.det_h_exact.expect("exact moments give exact dets");
        if !dh.is_positive() {
            return Err(Error::NotPositiveDefinite(k));
        }
        det_h.push(dh);
        if k <= n {
            det_t.push(hd.det_h_tilde_exact.expect("exact moments give exact dets"));
        }
    }
    let mut a_sq = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 1..=n {
        a_sq.push(&(&det_h[k - 1] * &det_h[k + 1]) / &(&det_h[k] * &det_h[k]));
        let cur = &det_t[k] / &det_h[k];
        let prev = &det_t[k - 1] / &det_h[k - 1];
        b.push(cur - prev);
    }
    Ok(JacobiParameters {
        a: a_sq.iter().map(|x| rat_to_f64(x).sqrt()).collect(),
        b: b.iter().map(rat_to_f64).collect(),
        mode: JacobiMode::ExactHankel,
        a_sq_exact: Some(a_sq),
        b_exact: Some(b),
        n_reliable: n,
    })
}

fn rat_to_dd(r: &BigRational) -> Dd {
    let hi = rat_to_f64(r);
    match BigRational::from_float(hi) {
        Some(hr) => {
            let rem = r - hr;
            Dd::new(hi, rat_to_f64(&rem))
        }
        None => Dd::from_f64(hi),
    }
}

/// The classical sigma recurrence in one scalar type; returns (alphas, betas)
/// where beta_k really appeared positive.
fn chebyshev_sigma<T>(m: &[T], n: usize) -> (Vec<T>, Vec<T>)
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>,
    T: Into<f64> + From<f64>,
{
    let len = m.len();
    let mut alphas: Vec<T> = Vec::with_capacity(n);
    let mut betas: Vec<T> = Vec::with_capacity(n + 1);
    let mut prev: Vec<T> = vec![T::from(0.0); len + 1];
    let mut cur: Vec<T> = m.to_vec();
    alphas.push(m[1] / m[0]);
    betas.push(m[0]);
    for k in 1..=n {
        let lo = k;
        let hi = 2 * n - k;
        let mut next = vec![T::from(0.0); len + 1];
        let a_prev = alphas[k - 1];
        let b_prev = betas[k - 1];
        for l in lo..=hi.min(len - 2) {
            next[l] = cur[l + 1] - a_prev * cur[l] - b_prev * prev[l];
        }
        let pivot = next[k];
        let pf: f64 = pivot.into();
        if !(pf > 0.0) || !pf.is_finite() {
            break;
        }
        betas.push(pivot / cur[k - 1]);
        if k < n {
            alphas.push(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
        }
        prev = cur;
        cur = next;
    }
    (alphas, betas)
}

fn chebyshev_route(ms: &MomentSequence, n: usize) -> Result<JacobiParameters> {
    let len = 2 * n + 1;
    let m_dd: Vec<Dd> = match &ms.exact {
        Some(ex) => ex[..len].iter().map(rat_to_dd).collect(),
        None => ms.values[..len].iter().map(|v| Dd::from_f64(v.re)).collect(),
    };
    let m_f64: Vec<f64> = m_dd.iter().map(|d| d.to_f64()).collect();
    let (alphas, betas) = chebyshev_sigma(&m_dd, n);
    let (alphas_f, betas_f) = chebyshev_sigma(&m_f64, n);

    // Reliability by two-precision agreement: wherever the f64 run still
    // matches the double-double run to 1e-6, the double-double values have
    // lost at most those six digits out of ~31 and are good far beyond the
    // 1e-10 cross-validation target.
    let have = betas.len() - 1;
    let mut kept = 0usize;
    for k in 1..=have.min(n) {
        let bd = betas[k].to_f64();
        let agree_b = k <= betas_f.len() - 1
            && (betas_f[k] - bd).abs() <= 1e-6 * (1.0 + bd.abs());
        let ad = alphas[k - 1].to_f64();
        let agree_a = k - 1 < alphas_f.len()
            && (alphas_f[k - 1] - ad).abs() <= 1e-6 * (1.0 + ad.abs());
        if agree_a && agree_b && bd > 0.0 {
            kept = k;
        } else {
            break;
        }
    }
    if kept == 0 {
        return Err(Error::NotPositiveDefinite(1));
    }
    let a: Vec<f64> = (1..=kept).map(|k| betas[k].to_f64().sqrt()).collect();
    let b: Vec<f64> = (0..kept).map(|k| alphas[k - 1].to_f64()).collect();
    Ok(JacobiParameters {
        a,
        b,
        mode: JacobiMode::ChebyshevExtended,
        a_sq_exact: None,
        b_exact: None,
        n_reliable: kept,
    })
}

/// Monic orthogonal polynomial p_n(x) by the three-term recurrence
/// p_{k+1} = (x - b_{k+1}) p_k - a_k^2 p_{k-1}, p_{-1} = 0, p_0 = 1.
pub fn orthopoly_eval(params: &JacobiParameters, n: usize, x: f64) -> Result<f64> {
    if n > params.len() {
        return Err(Error::IndexOutOfRange(n, params.len()));
    }
    let mut pm = 0.0f64; // p_{-1}
    let mut p = 1.0f64; // p_0
    for k in 0..n {
        let a_sq = if k == 0 { 0.0 } else { params.a[k - 1] * params.a[k - 1] };
        let next = (x - params.b[k]) * p - a_sq * pm;
        pm = p;
        p = next;
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug)]
pub struct OrthogonalityReport {
    pub integral: f64,
    pub expected: f64,
}

/// Gauss-Legendre check (with endpoint substitution) of
/// int p_n p_m rho = delta_{nm} det H_{n+1} / det H_n over the support.
pub fn orthogonality_check(
    ms: &MomentSequence,
    params: &JacobiParameters,
    measure: &CurveMeasure,
    n: usize,
    m: usize,
) -> Result<OrthogonalityReport> {
    if n > params.len() || m > params.len() {
        return Err(Error::IndexOutOfRange(n.max(m), params.len()));
    }
    let (alpha, beta) = measure.support();
    let f = |x: f64| -> f64 {
        let pn = orthopoly_eval(params, n, x).unwrap_or(f64::NAN);
        let pm = orthopoly_eval(params, m, x).unwrap_or(f64::NAN);
        let rho = measure.density(x).unwrap_or(f64::NAN);
        pn * pm * rho
    };
    let integral = integrate_endpoint_singular(f, alpha, beta, 600);
    let expected = if n == m {
        if let Some(ex) = &ms.exact {
            let hd_n1 = crate::moments::hankel(
                &MomentSequence::from_exact(ex[..2 * (n + 1)].to_vec()),
                n + 1,
            )?;
            let det_n1 = hd_n1.det_h_exact.expect("exact");
            if n == 0 {
                rat_to_f64(&det_n1)
            } else {
                let hd_n = crate::moments::hankel(
                    &MomentSequence::from_exact(ex[..2 * n].to_vec()),
                    n,
                )?;
                rat_to_f64(&(&det_n1 / &hd_n.det_h_exact.expect("exact")))
            }
        } else {
            // float route: ratio of products of a_k^2 (equivalent identity)
            let mut v = 1.0;
            for k in 1..=n {
                v *= params.a[k - 1] * params.a[k - 1];
            }
            v
        }
    } else {
        0.0
    };
    Ok(OrthogonalityReport { integral, expected })
}

#[derive(Clone, Copy, Debug)]
pub struct NevaiResiduals {
    pub index: usize,
    pub residual_a: f64,
    pub residual_b: f64,
}

/// Distance of the last computed Jacobi parameters from the constant-Jacobi
/// limits (beta - alpha)/4 and (alpha + beta)/2.
pub fn nevai_limits_check(params: &JacobiParameters, alpha: f64, beta: f64) -> NevaiResiduals {
    let n = params.len();
    NevaiResiduals {
        index: n,
        residual_a: (params.a[n - 1] - (beta - alpha) / 4.0).abs(),
        residual_b: (params.b[n - 1] - (alpha + beta) / 2.0).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments;
    use crate::symbol::Symbol;
    use num_bigint::BigInt;

    fn br(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn brf(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tridiag_exact_params() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let ms = moments(&b, 40);
        let p = jacobi_params(&ms, 15, JacobiMode::ExactHankel).unwrap();
        let aq = p.a_sq_exact.as_ref().unwrap();
        let bx = p.b_exact.as_ref().unwrap();
        // a_1^2 = h_2 - h_1^2 = 2 (the variance of the arcsine measure)
        assert_eq!(aq[0], br(2));
        for k in 1..15 {
            assert_eq!(aq[k], br(1), "a_{} should be 1", k + 1);
        }
        for k in 0..15 {
            assert_eq!(bx[k], br(0));
        }
    }

    #[test]
    fn fourdiag_exact_params_match_closed_forms() {
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let ms = moments(&b, 30);
        let p = jacobi_params(&ms, 12, JacobiMode::ExactHankel).unwrap();
        let aq = p.a_sq_exact.as_ref().unwrap();
        let bx = p.b_exact.as_ref().unwrap();
        assert_eq!(aq[0], br(6));
        assert_eq!(bx[0], br(3));
        for k in 2..=12i64 {
            let expect_a = brf(
                9 * (6 * k - 5) * (6 * k - 1) * (3 * k - 1) * (3 * k + 1),
                4 * (4 * k - 3) * (4 * k - 1) * (4 * k - 1) * (4 * k + 1),
            );
            assert_eq!(aq[(k - 1) as usize], expect_a, "a_{k}^2");
            let expect_b = brf(3 * (36 * k * k - 54 * k + 13), 2 * (4 * k - 5) * (4 * k - 1));
            assert_eq!(bx[(k - 1) as usize], expect_b, "b_{k}");
        }
    }

    #[test]
    fn simple_a1_from_moments() {
        // h = (1, 0, 1, 0, 0): a_1 = sqrt(h_2 - h_1^2) = 1
        let ms = MomentSequence::from_reals(&[1.0, 0.0, 1.0, 0.0, 0.0]);
        let p = jacobi_params(&ms, 1, JacobiMode::ChebyshevExtended).unwrap();
        assert!((p.a[0] - 1.0).abs() < 1e-14);
        assert!(p.b[0].abs() < 1e-14);
    }

    #[test]
    fn chebyshev_matches_exact() {
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let ms = moments(&b, 62);
        let pe = jacobi_params(&ms, 14, JacobiMode::ExactHankel).unwrap();
        let pc = jacobi_params(&ms, 30, JacobiMode::ChebyshevExtended).unwrap();
        assert!(pc.n_reliable >= 14, "reliable only to {}", pc.n_reliable);
        for k in 0..14 {
            assert!(
                (pe.a[k] - pc.a[k]).abs() <= 1e-10 * (1.0 + pe.a[k].abs()),
                "a_{}: {} vs {}",
                k + 1,
                pe.a[k],
                pc.a[k]
            );
            assert!(
                (pe.b[k] - pc.b[k]).abs() <= 1e-10 * (1.0 + pe.b[k].abs()),
                "b_{}: {} vs {}",
                k + 1,
                pe.b[k],
                pc.b[k]
            );
        }
    }

    #[test]
    fn not_solvable_moment_problem_reported() {
        // 1/z + z^2 fails positivity at n = 2
        let b = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        let ms = moments(&b, 10);
        assert!(matches!(
            jacobi_params(&ms, 3, JacobiMode::ExactHankel),
            Err(Error::NotPositiveDefinite(2))
        ));
    }

    #[test]
    fn orthopoly_recurrence_values() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let ms = moments(&b, 40);
        let p = jacobi_params(&ms, 10, JacobiMode::ExactHankel).unwrap();
        // p_0 = 1, p_2 = x^2 - 2 (a_1 = sqrt(2), b = 0)
        assert_eq!(orthopoly_eval(&p, 0, 0.37).unwrap(), 1.0);
        for x in [-1.0f64, 0.0, 0.6, 2.5] {
            let got = orthopoly_eval(&p, 2, x).unwrap();
            assert!((got - (x * x - 2.0)).abs() < 1e-12);
        }
        assert!(matches!(
            orthopoly_eval(&p, 11, 0.0),
            Err(Error::IndexOutOfRange(11, 10))
        ));
    }

    #[test]
    fn orthopoly_chebyshev_combination() {
        // p_n(x) = U_n(x/2) - U_{n-2}(x/2) = 2 T_n(x/2) for the a = 1
        // tridiagonal case (the monic rescaled first-kind polynomials)
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let ms = moments(&b, 40);
        let p = jacobi_params(&ms, 10, JacobiMode::ExactHankel).unwrap();
        let x = 0.6f64;
        let theta = (x / 2.0).acos();
        let u = |k: i32| -> f64 {
            if k < 0 {
                0.0
            } else {
                ((k + 1) as f64 * theta).sin() / theta.sin()
            }
        };
        for n in 1..=8usize {
            let expect = u(n as i32) - u(n as i32 - 2);
            let got = orthopoly_eval(&p, n, x).unwrap();
            assert!((got - expect).abs() < 1e-10, "n={n}: {got} vs {expect}");
        }
    }

    #[test]
    fn orthogonality_quadrature() {
        use crate::curve::{trace_polar, TraceResult};
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let curve = match trace_polar(&b, 512).unwrap() {
            TraceResult::Found(c) => c,
            _ => panic!(),
        };
        let cm = CurveMeasure::new(&b, &curve).unwrap();
        let ms = moments(&b, 40);
        let params = jacobi_params(&ms, 6, JacobiMode::ExactHankel).unwrap();
        // <p_1, p_1> = det H_2 / det H_1 = 2
        let rep = orthogonality_check(&ms, &params, &cm, 1, 1).unwrap();
        assert!((rep.expected - 2.0).abs() < 1e-14);
        assert!((rep.integral - rep.expected).abs() < 1e-7, "{}", rep.integral);
        // distinct indices integrate to ~0
        for (n, m) in [(0usize, 1usize), (1, 2), (2, 3), (0, 4)] {
            let rep = orthogonality_check(&ms, &params, &cm, n, m).unwrap();
            assert!(rep.integral.abs() < 1e-7, "({n},{m}): {}", rep.integral);
        }
    }

    #[test]
    fn nevai_residuals_tridiag() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let ms = moments(&b, 24);
        let p = jacobi_params(&ms, 8, JacobiMode::ExactHankel).unwrap();
        let r = nevai_limits_check(&p, -2.0, 2.0);
        assert!(r.residual_a < 1e-14 && r.residual_b < 1e-14);
    }
}
