//! Polynomial root finding (Aberth-Ehrlich with companion-matrix fallback)
//! and the root-modulus ordering that defines the limiting set.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::Symbol;

/// Roots of sum_k c_k z^k (coefficients in ascending order, c[deg] != 0),
/// with multiplicity. Each returned root satisfies
/// |p(root)| <= tol-controlled residual relative to the coefficient scale;
/// when the simultaneous iteration stalls the companion-matrix eigensolver
/// takes over.
pub fn roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    roots_seeded(coeffs, tol, None)
}

/// Like `roots`, but optionally warm-started from a previous root set
/// (used by grid scans where lambda moves by one cell).
pub fn roots_seeded(
    coeffs: &[Complex64],
    tol: f64,
    seed: Option<&[Complex64]>,
) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFiniteCoefficient);
    }
    // trim trailing zero coefficients
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == Complex64::new(0.0, 0.0) {
        deg -= 1;
    }
    if deg == 0 {
        return Err(Error::ZeroPolynomial);
    }
    deg -= 1; // highest power
    if deg == 0 {
        return Ok(vec![]);
    }
    let c = &coeffs[..=deg];

    // strip roots at the origin
    let mut zeros_at_origin = 0;
    while zeros_at_origin < deg && c[zeros_at_origin] == Complex64::new(0.0, 0.0) {
        zeros_at_origin += 1;
    }
    let c = &c[zeros_at_origin..];
    let deg = deg - zeros_at_origin;
    let mut result = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if deg == 0 {
        return Ok(result);
    }
    if deg == 1 {
        result.push(-c[0] / c[1]);
        return Ok(result);
    }
    if deg == 2 {
        let (r1, r2) = quadratic(c[0], c[1], c[2]);
        result.push(r1);
        result.push(r2);
        return Ok(result);
    }

    match aberth(c, deg, tol, seed) {
        Some(mut found) => {
            result.append(&mut found);
            Ok(result)
        }
        None => {
            // companion-matrix fallback
            let mut m = vec![Complex64::new(0.0, 0.0); deg * deg];
            let lead = c[deg];
            for i in 0..deg {
                m[i * deg + deg - 1] = -c[i] / lead;
                if i > 0 {
                    m[i * deg + i - 1] = Complex64::new(1.0, 0.0);
                }
            }
            let mut eigs = crate::eig::eigenvalues_f64(&m, deg)?;
            polish(c, &mut eigs);
            result.append(&mut eigs);
            Ok(result)
        }
    }
}

/// Stable quadratic formula.
fn quadratic(c0: Complex64, c1: Complex64, c2: Complex64) -> (Complex64, Complex64) {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // pick the sign that avoids cancellation in -c1 -+ disc
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -0.5 * (c1 + disc)
    } else {
        -0.5 * (c1 - disc)
    };
    if q == Complex64::new(0.0, 0.0) {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (q / c2, c0 / q)
    }
}

fn eval_poly(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // returns (p(z), p'(z))
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

fn coeff_scale(c: &[Complex64]) -> f64 {
    c.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Aberth-Ehrlich simultaneous iteration. Returns None if it fails to reach
/// the stopping criterion within the iteration budget.
fn aberth(
    c: &[Complex64],
    deg: usize,
    tol: f64,
    seed: Option<&[Complex64]>,
) -> Option<Vec<Complex64>> {
    let scale = coeff_scale(c);
    let mut z: Vec<Complex64> = match seed {
        Some(s) if s.len() == deg => s.to_vec(),
        _ => {
            // Cauchy-bound circle with an irrational angular offset so no
            // guess sits on a symmetry axis
            let bound = 1.0
                + c[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max) / c[deg].norm();
            let radius = bound.min(1e6);
            (0..deg)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * (i as f64) / (deg as f64) + 0.41;
                    Complex64::from_polar(radius * 0.8, th)
                })
                .collect()
        }
    };

    let max_iters = 200;
    for _ in 0..max_iters {
        let mut max_step = 0.0f64;
        let snapshot = z.clone();
        for i in 0..deg {
            let (p, dp) = eval_poly(c, snapshot[i]);
            if p.norm() <= tol * scale * (1.0 + snapshot[i].norm().powi(deg as i32)) {
                continue;
            }
            let newton = if dp == Complex64::new(0.0, 0.0) {
                // nudge off the stationary point
                Complex64::new(1e-8, 1e-8)
            } else {
                p / dp
            };
            let mut repel = Complex64::new(0.0, 0.0);
            for (j, &zj) in snapshot.iter().enumerate() {
                if j != i {
                    let d = snapshot[i] - zj;
                    if d.norm() > 1e-300 {
                        repel += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repel;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            z[i] -= step;
            let rel = step.norm() / (1.0 + z[i].norm());
            max_step = max_step.max(rel);
        }
        if max_step <= tol {
            polish(c, &mut z);
            // verify residuals before accepting
            let ok = z.iter().all(|&zi| {
                let (p, _) = eval_poly(c, zi);
                p.norm() <= 1e-8 * scale * (1.0 + zi.norm().powi(deg as i32))
            });
            if ok {
                return Some(z);
            } else {
                return None;
            }
        }
    }
    None
}

/// A couple of Newton polish steps per root.
fn polish(c: &[Complex64], z: &mut [Complex64]) {
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_poly(c, *zi);
            if dp.norm() < 1e-300 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
            if step.norm() <= 1e-16 * (1.0 + zi.norm()) {
                break;
            }
        }
    }
}

/// The r+s roots of z^r (b(z) - lambda), sorted by modulus, together with
/// the modulus defect |z_{r+1}| - |z_r| whose zero set is the limiting set.
#[derive(Clone, Debug)]
pub struct RootsByModulus {
    pub lambda: Complex64,
    pub roots: Vec<Complex64>,
    pub r: usize,
    /// |z_{r+1}| - |z_r| >= 0; zero (within tolerance) iff lambda is in the
    /// limiting set.
    pub defect: f64,
    /// Minimum pairwise root distance: small values flag proximity to a
    /// branch (exceptional) point where root accuracy degrades.
    pub condition: f64,
}

/// Coefficients of z^r (b(z) - lambda) in ascending powers.
pub fn shifted_poly(b: &Symbol, lambda: Complex64) -> Vec<Complex64> {
    let r = b.r() as i32;
    let s = b.s() as i32;
    let mut c = vec![Complex64::new(0.0, 0.0); (r + s + 1) as usize];
    for (k, a) in b.terms() {
        c[(k + r) as usize] += a;
    }
    c[r as usize] -= lambda;
    c
}

pub fn roots_by_modulus(b: &Symbol, lambda: Complex64) -> Result<RootsByModulus> {
    roots_by_modulus_seeded(b, lambda, None)
}

pub fn roots_by_modulus_seeded(
    b: &Symbol,
    lambda: Complex64,
    seed: Option<&[Complex64]>,
) -> Result<RootsByModulus> {
    b.require_two_sided()?;
    let c = shifted_poly(b, lambda);
    let mut rts = roots_seeded(&c, 1e-13, seed)?;
    rts.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let r = b.r() as usize;
    let defect = rts[r].norm() - rts[r - 1].norm();
    let mut condition = f64::INFINITY;
    for i in 0..rts.len() {
        for j in i + 1..rts.len() {
            condition = condition.min((rts[i] - rts[j]).norm());
        }
    }
    Ok(RootsByModulus { lambda, roots: rts, r, defect: defect.max(0.0), condition })
}

/// |z_{r+1}(lambda)| - |z_r(lambda)|, the Schmidt-Spitzer membership defect.
pub fn defect(b: &Symbol, lambda: Complex64) -> Result<f64> {
    Ok(roots_by_modulus(b, lambda)?.defect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // z^2 - 1
        let r = roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-13).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_roots_of_unity() {
        // z^3 - 1
        let r = roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-13).unwrap();
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!((z.powi(3) - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn section_char_poly_trinomial() {
        // 1 - z^3 = char poly of T_3 for 1/z + z^2 (alpha=0, beta=1)
        let r = roots(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], 1e-13).unwrap();
        let mut has_one = false;
        for z in &r {
            assert!((z.norm() - 1.0).abs() < 1e-10);
            if (z - c(1.0, 0.0)).norm() < 1e-10 {
                has_one = true;
            }
        }
        assert!(has_one);
    }

    #[test]
    fn high_degree_residuals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let deg = rng.gen_range(3..12);
            let coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            if coeffs[deg].norm() < 1e-2 {
                continue;
            }
            let scale = coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let r = roots(&coeffs, 1e-13).unwrap();
            assert_eq!(r.len(), deg);
            for z in &r {
                let (p, _) = eval_poly(&coeffs, *z);
                assert!(
                    p.norm() <= 1e-8 * scale * (1.0 + z.norm().powi(deg as i32)),
                    "residual {} at {}",
                    p.norm(),
                    z
                );
            }
        }
    }

    #[test]
    fn multiple_root() {
        // (z-1)^3 = -1 + 3z - 3z^2 + z^3
        let r = roots(&[c(-1.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)], 1e-13).unwrap();
        for z in &r {
            assert!((z - c(1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn zero_poly_rejected() {
        assert!(matches!(roots(&[c(0.0, 0.0)], 1e-13), Err(Error::ZeroPolynomial)));
        assert!(matches!(
            roots(&[c(f64::NAN, 0.0), c(1.0, 0.0)], 1e-13),
            Err(Error::NonFiniteCoefficient)
        ));
    }

    #[test]
    fn modulus_sorting_tridiag() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        // lambda = 0: roots of 1 + z^2: +-i, defect 0
        let rm = roots_by_modulus(&b, c(0.0, 0.0)).unwrap();
        assert!(rm.defect < 1e-12);
        // lambda = 5: roots of z^2 - 5z + 1
        let rm = roots_by_modulus(&b, c(5.0, 0.0)).unwrap();
        let s21 = 21f64.sqrt();
        assert!((rm.roots[0].re - (5.0 - s21) / 2.0).abs() < 1e-12);
        assert!((rm.roots[1].re - (5.0 + s21) / 2.0).abs() < 1e-12);
        assert!((rm.defect - s21).abs() < 1e-10);
        // lambda = 3: defect sqrt(5)
        let d = defect(&b, c(3.0, 0.0)).unwrap();
        assert!((d - 5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn modulus_sorting_trinomial() {
        let b = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        let rm = roots_by_modulus(&b, c(0.0, 0.0)).unwrap();
        assert_eq!(rm.roots.len(), 3);
        assert!(rm.defect < 1e-12);
        for z in &rm.roots {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn root_product_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let b = Symbol::new_int(&[(-2, 3), (-1, 1), (1, 2), (3, -1)]).unwrap();
        for _ in 0..200 {
            let lambda = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let rm = roots_by_modulus(&b, lambda).unwrap();
            let prod: Complex64 = rm.roots.iter().product();
            let rs = rm.roots.len() as i32;
            let expect = b.coeff(b.band_lo()) / b.coeff(b.band_hi())
                * if rs % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (prod - expect).norm() <= 1e-8 * (1.0 + expect.norm()),
                "lambda={lambda} prod={prod} expect={expect}"
            );
        }
    }

    #[test]
    fn defect_large_lambda_positive() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let d = defect(&b, c(100.0, 30.0)).unwrap();
        assert!(d > 10.0);
    }

    #[test]
    fn defect_locally_lipschitz() {
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let h = 1e-6;
        for base in [c(3.0, 1.0), c(-1.0, 0.5), c(2.0, -2.0)] {
            let d0 = defect(&b, base).unwrap();
            let d1 = defect(&b, base + c(h, 0.0)).unwrap();
            assert!((d1 - d0).abs() <= 50.0 * h, "jump at {base}");
        }
    }
}
