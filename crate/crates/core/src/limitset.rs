//! The limiting set as a point cloud: grid scan of the root-modulus defect
//! with local descent refinement, exceptional points via an interpolated
//! resultant, and support extraction for certified symbols.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curve::{is_class_r_sampled, ClassRVerdict};
use crate::error::{Error, Result};
use crate::roots::{roots_by_modulus_seeded, shifted_poly};
use crate::symbol::{Symbol, SymbolLike};

#[derive(Clone, Copy, Debug)]
pub struct ScanRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Clone, Debug)]
pub struct LimitingSetCloud {
    /// lambda with its defect value, sorted by (Re, Im)
    pub points: Vec<(Complex64, f64)>,
    pub grid_step: f64,
    pub tolerance: f64,
}

/// Grid scan of the defect |z_{r+1}| - |z_r| over the region (default: the
/// square covering the disk |lambda| <= norm bound). Local minima below a
/// coarse threshold are refined by alternating golden-section descent along
/// the grid directions; points whose refined defect is below `tol * (1+R)`
/// are emitted.
pub fn limiting_set_scan(
    b: &Symbol,
    region: Option<ScanRegion>,
    resolution: usize,
    tol: f64,
) -> Result<LimitingSetCloud> {
    if resolution < 8 {
        return Err(Error::BadScanParams(format!("resolution {resolution} < 8")));
    }
    if tol <= 0.0 {
        return Err(Error::BadScanParams("tol must be positive".into()));
    }
    b.require_two_sided()?;
    let r_norm = b.norm_bound();
    let region = region.unwrap_or(ScanRegion {
        re_min: -r_norm,
        re_max: r_norm,
        im_min: -r_norm,
        im_max: r_norm,
    });
    let w = region.re_max - region.re_min;
    let h = region.im_max - region.im_min;
    if !(w > 0.0 && h > 0.0) {
        return Err(Error::BadScanParams("degenerate region".into()));
    }
    let step = (w.max(h)) / (resolution - 1) as f64;
    // snap the grid to multiples of step so the real axis lies on a grid row
    let re_min = step * (region.re_min / step).floor();
    let im_min = step * (region.im_min / step).floor();
    let nx = ((region.re_max - re_min) / step).ceil() as usize + 1;
    let ny = ((region.im_max - im_min) / step).ceil() as usize + 1;
    let region = ScanRegion { re_min, re_max: region.re_max, im_min, im_max: region.im_max };
    let tol_abs = tol * (1.0 + r_norm);

    // defect field, rows in parallel with warm-started root solves
    let defect_row = |iy: usize| -> Vec<f64> {
        let im = region.im_min + step * iy as f64;
        let mut row = Vec::with_capacity(nx);
        let mut seed: Option<Vec<Complex64>> = None;
        for ix in 0..nx {
            let lam = Complex64::new(region.re_min + step * ix as f64, im);
            match roots_by_modulus_seeded(b, lam, seed.as_deref()) {
                Ok(rm) => {
                    row.push(rm.defect);
                    seed = Some(rm.roots);
                }
                Err(_) => {
                    row.push(f64::INFINITY);
                    seed = None;
                }
            }
        }
        row
    };
    let field: Vec<Vec<f64>> = (0..ny).into_par_iter().map(defect_row).collect();

    // seeds: 3x3 local minima below a coarse threshold (the defect grows
    // like sqrt(distance) near branch-point ends of the arcs)
    let coarse = 6.0 * (step * (1.0 + r_norm)).sqrt();
    let mut seeds = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let v = field[iy][ix];
            if !v.is_finite() || v > coarse {
                continue;
            }
            let mut is_min = true;
            'nbr: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let jx = ix as i64 + dx;
                    let jy = iy as i64 + dy;
                    if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                        continue;
                    }
                    if field[jy as usize][jx as usize] < v {
                        is_min = false;
                        break 'nbr;
                    }
                }
            }
            if is_min {
                seeds.push(Complex64::new(
                    region.re_min + step * ix as f64,
                    region.im_min + step * iy as f64,
                ));
            }
        }
    }

    let defect_at = |lam: Complex64| -> f64 {
        crate::roots::defect(b, lam).unwrap_or(f64::INFINITY)
    };
    let refined: Vec<(Complex64, f64)> = seeds
        .into_par_iter()
        .filter_map(|seed| {
            let mut p = seed;
            // Alternating golden-section line minimization. The bracket in
            // each direction shrinks across rounds, so convergence is
            // geometric overall; the first transverse bracket spans a full
            // cell, the along-set bracket stays below half a cell so refined
            // points cannot drift far from their seed.
            let mut width_re = 0.4 * step;
            let mut width_im = 1.2 * step;
            for round in 0..8 {
                let along_re = round % 2 == 0;
                let width = if along_re { width_re } else { width_im };
                let (q, final_w) = golden_descent(&defect_at, p, width, along_re, 9);
                p = q;
                if along_re {
                    width_re = (3.0 * final_w).max(1e-12);
                } else {
                    width_im = (3.0 * final_w).max(1e-12);
                }
            }
            let d = defect_at(p);
            if d <= tol_abs {
                Some((p, d))
            } else {
                None
            }
        })
        .collect();

    // deterministic ordering + dedupe of near-coincident points
    let mut pts = refined;
    pts.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    let mut out: Vec<(Complex64, f64)> = Vec::new();
    for (p, d) in pts {
        if out
            .iter()
            .all(|(q, _)| (p - q).norm() > step / 4.0)
        {
            out.push((p, d));
        }
    }
    Ok(LimitingSetCloud { points: out, grid_step: step, tolerance: tol_abs })
}

fn golden_descent<F: Fn(Complex64) -> f64>(
    f: &F,
    center: Complex64,
    width: f64,
    along_re: bool,
    iters: usize,
) -> (Complex64, f64) {
    let dir = if along_re {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut lo = -width;
    let mut hi = width;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(center + dir * x1);
    let mut f2 = f(center + dir * x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(center + dir * x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(center + dir * x2);
        }
    }
    (center + dir * (0.5 * (lo + hi)), hi - lo)
}

/// Exceptional points: the lambda where z^r (b(z) - lambda) has a multiple
/// root, found as roots of the resultant Res_z(p_lambda, p_lambda'),
/// a polynomial of degree r+s in lambda reconstructed by interpolation on a
/// circle of radius R+1.
pub fn exceptional_points(b: &Symbol) -> Result<Vec<Complex64>> {
    b.require_two_sided()?;
    let n = (b.r() + b.s()) as usize;
    let rho = b.norm_bound() + 1.0;
    let m = n + 1;
    // evaluate D(lambda_j) at the interpolation nodes
    let mut dvals = Vec::with_capacity(m);
    let nodes: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
        .collect();
    for &lam in &nodes {
        let p = shifted_poly(b, lam);
        let lead = p[n];
        let rts = crate::roots::roots(&p, 1e-13)?;
        // p'(z) at each root
        let mut prod = Complex64::new(1.0, 0.0);
        for &z in &rts {
            let mut dp = Complex64::new(0.0, 0.0);
            for (k, &c) in p.iter().enumerate().skip(1) {
                dp += c * (k as f64) * z.powi(k as i32 - 1);
            }
            prod *= dp;
        }
        dvals.push(lead.powi(n as i32 - 1) * prod);
    }
    // normalize to avoid overflow in the small linear solve
    let scale = dvals.iter().map(|d| d.norm()).fold(0.0, f64::max).max(1e-300);
    for d in dvals.iter_mut() {
        *d /= scale;
    }
    // coefficients by inverse DFT: lambda_j = rho w^j with w = e^{2 pi i/m}
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &dv) in dvals.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64;
            acc += dv * Complex64::from_polar(1.0, ang);
        }
        *ck = acc / (m as f64) / rho.powi(k as i32);
    }
    let raw = crate::roots::roots(&coeffs, 1e-12)?;
    // multiple roots of the resultant come out as tight clusters; the
    // cluster mean is far more accurate than the members
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in raw {
        let mut placed = false;
        for (c, m) in clusters.iter_mut() {
            if (z - *c).norm() < 1e-4 * (1.0 + z.norm()) {
                *c = (*c * (*m as f64) + z) / (*m as f64 + 1.0);
                *m += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push((z, 1));
        }
    }
    let mut lams: Vec<Complex64> = clusters.into_iter().map(|(c, _)| c).collect();
    // residual check: the z-polynomial must have a near-multiple root there
    lams.retain(|&lam| {
        let p = shifted_poly(b, lam);
        match crate::roots::roots(&p, 1e-12) {
            Ok(rts) => {
                let mut min_gap = f64::INFINITY;
                let mut zscale = 0.0f64;
                for i in 0..rts.len() {
                    zscale = zscale.max(rts[i].norm());
                    for j in i + 1..rts.len() {
                        min_gap = min_gap.min((rts[i] - rts[j]).norm());
                    }
                }
                // root clusters of multiplicity m spread like eps^(1/m)
                min_gap < 2e-2 * (1.0 + zscale)
            }
            Err(_) => false,
        }
    });
    lams.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(lams)
}

/// Support [alpha, beta] of the limiting measure for a class-R symbol:
/// min/max of the branch interval endpoints of the certified curve.
pub fn support_interval(b: &Symbol, trace_samples: usize) -> Result<(f64, f64)> {
    match is_class_r_sampled(b, 30, trace_samples)? {
        ClassRVerdict::Yes(curve) => Ok(crate::limitset::support_from_curve(&curve)),
        _ => Err(Error::NotCertified),
    }
}

pub fn support_from_curve(curve: &crate::curve::JordanCurveSamples) -> (f64, f64) {
    let mut alpha = f64::INFINITY;
    let mut beta = f64::NEG_INFINITY;
    for br in &curve.branches {
        alpha = alpha.min(br.alpha);
        beta = beta.max(br.beta);
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_cloud_hausdorff() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let cloud = limiting_set_scan(&b, None, 128, 1e-6).unwrap();
        assert!(!cloud.points.is_empty());
        let step = cloud.grid_step;
        // every point near [-2, 2]
        for (p, d) in &cloud.points {
            assert!(*d <= cloud.tolerance);
            assert!(p.im.abs() <= step, "stray point {p}");
            assert!(p.re >= -2.0 - step && p.re <= 2.0 + step);
        }
        // every x in [-2, 2] near some point
        let mut x = -2.0;
        while x <= 2.0 {
            let dmin = cloud
                .points
                .iter()
                .map(|(p, _)| (p - Complex64::new(x, 0.0)).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(dmin <= 2.0 * step, "gap at {x}: {dmin}");
            x += 0.05;
        }
    }

    #[test]
    fn trinomial_cloud_nonreal() {
        let b = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        let cloud = limiting_set_scan(&b, None, 96, 1e-6).unwrap();
        let nonreal = cloud.points.iter().filter(|(p, _)| p.im.abs() > 0.1).count();
        assert!(nonreal > 5, "expected non-real cloud points, got {nonreal}");
    }

    #[test]
    fn cloud_conjugate_symmetry() {
        let b = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        let cloud = limiting_set_scan(&b, None, 96, 1e-6).unwrap();
        let step = cloud.grid_step;
        for (p, _) in &cloud.points {
            let mirror = cloud
                .points
                .iter()
                .map(|(q, _)| (q - p.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(mirror <= step, "no mirror for {p}");
        }
    }

    #[test]
    fn exceptional_points_tridiag() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let e = exceptional_points(&b).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-8);
        assert!((e[1] - Complex64::new(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn exceptional_points_fourdiag() {
        // (1+z)^3/z: branch values 0 and 27/4
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let e = exceptional_points(&b).unwrap();
        assert!(e.iter().any(|l| (l - Complex64::new(0.0, 0.0)).norm() < 1e-6));
        assert!(e.iter().any(|l| (l - Complex64::new(6.75, 0.0)).norm() < 1e-6));
    }

    #[test]
    fn exceptional_points_boundary_fourdiag_real() {
        // alpha = 3, beta = 1 (boundary): all branch values real
        let b = Symbol::new_int(&[(-1, 1), (1, 3), (2, 1)]).unwrap();
        let e = exceptional_points(&b).unwrap();
        assert!(!e.is_empty());
        for lam in &e {
            assert!(lam.im.abs() < 1e-6, "non-real branch value {lam}");
        }
    }

    #[test]
    fn support_tridiag() {
        let b = Symbol::new_int(&[(-1, 1), (1, 4)]).unwrap();
        let (a, bb) = support_interval(&b, 256).unwrap();
        assert!((a + 4.0).abs() < 1e-9 && (bb - 4.0).abs() < 1e-9);
        // non-certified symbol errors
        let t = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        assert!(matches!(support_interval(&t, 256), Err(Error::NotCertified)));
    }
}
