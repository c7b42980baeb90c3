//! Jordan curves in b^{-1}(R): polar tracing by predictor-corrector
//! continuation, the critical-angle partition, curve reflection, and the
//! class-R verdict.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::Symbol;
use crate::toeplitz::{reality_check, RealityVerdict};

/// One monotone branch of b restricted to the traced curve: the image of
/// [phi_lo, phi_hi] is [alpha, beta].
#[derive(Clone, Debug)]
pub struct CurveBranch {
    pub phi_lo: f64,
    pub phi_hi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub increasing: bool,
}

/// Polar samples of a Jordan curve gamma(t) = rho(t) e^{it} on which the
/// symbol is real. Angles are uniform over [-pi, pi] with the closing sample
/// duplicated at t = pi.
#[derive(Clone, Debug)]
pub struct JordanCurveSamples {
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
    pub radii_deriv: Vec<f64>,
    /// Re b(gamma(t_j)); empty for synthetic curves built without a symbol.
    pub values: Vec<f64>,
    /// max_j |Im b(gamma(t_j))| over the samples
    pub max_residual: f64,
    /// interior critical angles phi_1 < .. < phi_l in (0, pi)
    pub interior_critical_angles: Vec<f64>,
    /// branches delimited by 0 = phi_0 < ... < phi_{l+1} = pi
    pub branches: Vec<CurveBranch>,
}

impl JordanCurveSamples {
    /// A circle of the given radius, sampled at n uniform angles (n+1 stored).
    pub fn circle(radius: f64, n: usize) -> JordanCurveSamples {
        let angles: Vec<f64> = (0..=n)
            .map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / n as f64)
            .collect();
        JordanCurveSamples {
            radii: vec![radius; n + 1],
            radii_deriv: vec![0.0; n + 1],
            values: vec![],
            max_residual: 0.0,
            interior_critical_angles: vec![],
            branches: vec![],
            angles,
        }
    }

    pub fn len_partition(&self) -> usize {
        self.interior_critical_angles.len()
    }

    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[j], self.angles[j])
    }

    /// Interpolated radius at an arbitrary angle (linear between samples).
    pub fn rho_interp(&self, t: f64) -> f64 {
        let n = self.angles.len();
        let t = t.clamp(self.angles[0], self.angles[n - 1]);
        let step = self.angles[1] - self.angles[0];
        let j = (((t - self.angles[0]) / step) as usize).min(n - 2);
        let frac = (t - self.angles[j]) / step;
        self.radii[j] * (1.0 - frac) + self.radii[j + 1] * frac
    }

    /// Radius at angle t refined by Newton on Im b(rho e^{it}) from the
    /// interpolated predictor.
    pub fn rho_at(&self, b: &Symbol, t: f64) -> Result<f64> {
        let mut rho = self.rho_interp(t);
        newton_radius(b, t, &mut rho, 60)?;
        Ok(rho)
    }

    /// gamma* = 1/conj(gamma): radii inverted, angles preserved.
    pub fn reflect(&self) -> JordanCurveSamples {
        JordanCurveSamples {
            angles: self.angles.clone(),
            radii: self.radii.iter().map(|r| 1.0 / r).collect(),
            radii_deriv: self
                .radii_deriv
                .iter()
                .zip(&self.radii)
                .map(|(dr, r)| -dr / (r * r))
                .collect(),
            values: vec![],
            max_residual: self.max_residual,
            interior_critical_angles: self.interior_critical_angles.clone(),
            branches: vec![],
        }
    }

    /// Winding number of the sampled curve about the origin.
    pub fn winding_number(&self) -> i32 {
        let mut total = 0.0;
        for j in 1..self.angles.len() {
            let a = self.point(j - 1);
            let b = self.point(j);
            let cross = a.re * b.im - a.im * b.re;
            let dot = a.re * b.re + a.im * b.im;
            total += cross.atan2(dot);
        }
        (total / (2.0 * std::f64::consts::PI)).round() as i32
    }

    /// Largest |Im b(gamma(t))| over `m` fresh uniformly spaced angles,
    /// each re-solved by Newton (not just the stored samples).
    pub fn resample_residual(&self, b: &Symbol, m: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..m {
            let t = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
            let rho = self.rho_at(b, t)?;
            let v = b.eval(Complex64::from_polar(rho, t))?;
            worst = worst.max(v.im.abs());
        }
        Ok(worst)
    }
}

/// Im b(rho e^{it}) and its rho-derivative Im(b'(rho e^{it}) e^{it}).
fn g_and_grho(b: &Symbol, db: &Symbol, rho: f64, t: f64) -> Result<(f64, f64, Complex64)> {
    let z = Complex64::from_polar(rho, t);
    let v = b.eval(z)?;
    let w = db.eval(z)? * Complex64::from_polar(1.0, t);
    Ok((v.im, w.im, w))
}

fn local_scale(b: &Symbol, rho: f64) -> f64 {
    b.terms().map(|(k, a)| a.norm() * rho.powi(k)).sum::<f64>().max(1e-300)
}

fn newton_radius(b: &Symbol, t: f64, rho: &mut f64, max_iter: usize) -> Result<()> {
    let db = b.derivative()?;
    newton_radius_with(b, &db, t, rho, max_iter)
}

fn newton_radius_with(
    b: &Symbol,
    db: &Symbol,
    t: f64,
    rho: &mut f64,
    max_iter: usize,
) -> Result<()> {
    let start = *rho;
    for _ in 0..max_iter {
        let (g, grho, _) = g_and_grho(b, db, *rho, t)?;
        let tol = 1e-14 * local_scale(b, *rho);
        if g.abs() <= tol {
            return Ok(());
        }
        if grho == 0.0 {
            return Err(Error::ContinuationDiverged(t));
        }
        let step = g / grho;
        let new = *rho - step;
        if !new.is_finite() || new <= 0.0 || (new - start).abs() > 0.75 * start {
            return Err(Error::ContinuationDiverged(t));
        }
        *rho = new;
        if step.abs() <= 1e-15 * (1.0 + *rho) {
            // one more residual check next loop; tolerate the floor
            let (g2, _, _) = g_and_grho(b, db, *rho, t)?;
            if g2.abs() <= 10.0 * tol {
                return Ok(());
            }
        }
    }
    let (g, _, _) = g_and_grho(b, db, *rho, t)?;
    if g.abs() <= 1e-11 * local_scale(b, *rho) {
        Ok(())
    } else {
        Err(Error::ContinuationDiverged(t))
    }
}

/// Positive real critical points of b, polished and deduplicated; candidates
/// for the curve's crossing of the positive half-axis.
fn real_critical_points(b: &Symbol) -> Result<(Vec<f64>, Vec<f64>)> {
    let cps = b.critical_points()?;
    // cluster roots (multiple roots come out as tight clusters whose mean is
    // far more accurate than any member)
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in cps {
        let mut placed = false;
        for (c, m) in clusters.iter_mut() {
            if (z - *c).norm() < 5e-3 * (1.0 + z.norm()) {
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
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (c, _) in clusters {
        if c.im.abs() <= 1e-7 * (1.0 + c.norm()) {
            let x = polish_real_critical(b, c.re)?;
            if x > 0.0 {
                pos.push(x);
            } else if x < 0.0 {
                neg.push(x);
            }
        }
    }
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pos.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
    neg.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
    Ok((pos, neg))
}

/// Newton on Re b'(x) along the real axis; falls back to the input when the
/// root is multiple (cluster means are already accurate there).
fn polish_real_critical(b: &Symbol, x0: f64) -> Result<f64> {
    let db = b.derivative()?;
    let ddb = db.derivative()?;
    let mut x = x0;
    for _ in 0..60 {
        let f = db.eval(Complex64::new(x, 0.0))?.re;
        let fp = ddb.eval(Complex64::new(x, 0.0))?.re;
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        if !step.is_finite() || step.abs() > 0.5 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    if (x - x0).abs() < 2e-2 * (1.0 + x0.abs()) {
        Ok(x)
    } else {
        Ok(x0)
    }
}

/// Outcome of the polar tracer.
#[derive(Clone, Debug)]
pub enum TraceResult {
    Found(JordanCurveSamples),
    /// No starting critical point produced a full sweep. Records the failure
    /// angle for each attempted start radius.
    NotFound { attempts: Vec<(f64, f64)> },
}

/// Trace a Jordan curve gamma(t) = rho(t) e^{it} in b^{-1}(R) for a
/// real-coefficient symbol.
///
/// Starts at a positive real critical point, continues Im b(rho e^{it}) = 0
/// by predictor-corrector in t over (0, pi) with adaptive step halving, and
/// succeeds if the sweep reaches t = pi at a negative real critical point;
/// the lower half is the mirror image. `n` is the total sample count over
/// [-pi, pi] (must be even; a power of two is convenient downstream).
pub fn trace_polar(b: &Symbol, n: usize) -> Result<TraceResult> {
    b.require_two_sided()?;
    if !b.is_real() {
        return Err(Error::InvalidParameter(
            "polar tracing requires a real-coefficient symbol".into(),
        ));
    }
    if n < 16 || n % 2 != 0 {
        return Err(Error::InvalidParameter("sample count must be even and >= 16".into()));
    }
    let (pos, neg) = real_critical_points(b)?;
    if pos.is_empty() || neg.is_empty() {
        return Ok(TraceResult::NotFound { attempts: vec![] });
    }
    let db = b.derivative()?;
    let mut attempts = Vec::new();
    for &rho0 in &pos {
        match sweep_upper_half(b, &db, rho0, n / 2, &neg) {
            Ok(curve) => return Ok(TraceResult::Found(curve)),
            Err(Error::ContinuationDiverged(t)) => attempts.push((rho0, t)),
            Err(e) => return Err(e),
        }
    }
    Ok(TraceResult::NotFound { attempts })
}

fn sweep_upper_half(
    b: &Symbol,
    db: &Symbol,
    rho0: f64,
    m: usize,
    neg_criticals: &[f64],
) -> Result<JordanCurveSamples> {
    let dt_grid = std::f64::consts::PI / m as f64;
    let min_dt = std::f64::consts::PI / 2f64.powi(20);
    let mut radii = vec![0.0; m + 1];
    let mut derivs = vec![0.0; m + 1];
    radii[0] = rho0;
    derivs[0] = 0.0; // even symmetry of rho(t) for real symbols

    let mut t = 0.0;
    let mut rho = rho0;
    let mut drho = 0.0;
    for j in 1..=m {
        let t_target = if j == m { std::f64::consts::PI } else { j as f64 * dt_grid };
        // adaptive substeps toward the grid angle
        let mut dt = t_target - t;
        while t < t_target - 1e-15 {
            let t_next = (t + dt).min(t_target);
            // at the final angle the whole real axis solves Im b = 0, so
            // stop the corrector just short and extrapolate
            let solve_at = if t_next >= std::f64::consts::PI - 1e-9 {
                std::f64::consts::PI - 1e-7
            } else {
                t_next
            };
            let mut cand = rho + drho * (solve_at - t);
            if cand <= 0.0 {
                cand = 0.5 * rho;
            }
            match newton_radius_with(b, db, solve_at, &mut cand, 50) {
                Ok(()) => {
                    // slope from implicit differentiation where well posed
                    let (_, grho, w) = g_and_grho(b, db, cand, solve_at)?;
                    let new_drho = if grho.abs() > 1e-9 * (w.norm() + 1e-300) {
                        -cand * w.re / grho
                    } else {
                        drho
                    };
                    // reject wild slope jumps near branch crossings
                    if (cand - rho).abs() > 0.75 * rho {
                        return Err(Error::ContinuationDiverged(solve_at));
                    }
                    rho = cand;
                    drho = new_drho;
                    t = t_next;
                    dt = (dt * 2.0).min(t_target - t + dt_grid);
                }
                Err(Error::ContinuationDiverged(_)) => {
                    dt *= 0.5;
                    if dt < min_dt {
                        return Err(Error::ContinuationDiverged(t));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        radii[j] = rho;
        derivs[j] = drho;
    }

    // endpoint: gamma(pi) = -rho(pi) must be a negative critical point
    let endpoint = -rho;
    let nearest = neg_criticals
        .iter()
        .copied()
        .min_by(|a, b| (a - endpoint).abs().partial_cmp(&(b - endpoint).abs()).unwrap());
    let snapped = match nearest {
        Some(x) if (x - endpoint).abs() <= 2e-2 * (1.0 + endpoint.abs()) => -x,
        _ => return Err(Error::ContinuationDiverged(std::f64::consts::PI)),
    };
    radii[m] = snapped;
    derivs[m] = 0.0;

    // assemble the full curve over [-pi, pi] by conjugation symmetry
    let total = 2 * m;
    let mut angles = Vec::with_capacity(total + 1);
    let mut rr = Vec::with_capacity(total + 1);
    let mut dd = Vec::with_capacity(total + 1);
    for j in 0..=total {
        let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / total as f64;
        angles.push(t);
        let jj = (j as i64 - m as i64).unsigned_abs() as usize;
        rr.push(radii[jj]);
        // rho(-t) = rho(t) so rho'(-t) = -rho'(t)
        dd.push(if j < m { -derivs[jj] } else { derivs[jj] });
    }
    let mut values = Vec::with_capacity(total + 1);
    let mut max_residual: f64 = 0.0;
    for j in 0..=total {
        let v = b.eval(Complex64::from_polar(rr[j], angles[j]))?;
        values.push(v.re);
        max_residual = max_residual.max(v.im.abs());
    }
    let mut curve = JordanCurveSamples {
        angles,
        radii: rr,
        radii_deriv: dd,
        values,
        max_residual,
        interior_critical_angles: vec![],
        branches: vec![],
    };
    curve_critical_partition(b, &mut curve)?;
    Ok(curve)
}

/// Locate the critical angles 0 = phi_0 < phi_1 < ... < phi_{l+1} = pi on the
/// traced curve and record the branch images [alpha_i, beta_i].
///
/// Interior critical points lie exactly at (polished) roots of b' on the
/// curve, so their angles come from the root coordinates rather than a
/// sampled search.
pub fn curve_critical_partition(b: &Symbol, curve: &mut JordanCurveSamples) -> Result<()> {
    let cps = b.critical_points()?;
    let db = b.derivative()?;
    let mut interior: Vec<(f64, f64)> = Vec::new(); // (phi, value)
    for z0 in cps {
        // keep strictly upper half-plane points; the margin also rejects the
        // root-finder noise that splits a multiple real critical point into
        // a tight cluster straddling the axis
        if z0.im <= 1e-4 * (1.0 + z0.norm()) {
            continue;
        }
        // Newton polish on b' in the complex plane
        let mut z = z0;
        let ddb = db.derivative()?;
        for _ in 0..50 {
            let f = db.eval(z)?;
            let fp = ddb.eval(z)?;
            if fp.norm() == 0.0 {
                break;
            }
            let step = f / fp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            z -= step;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        if z.im <= 1e-4 * (1.0 + z.norm()) {
            continue;
        }
        let t = z.arg();
        if !(1e-6..=std::f64::consts::PI - 1e-6).contains(&t) {
            continue;
        }
        // on-curve test: radius matches and the symbol is real there
        let rho_curve = curve.rho_at(b, t).unwrap_or(f64::NAN);
        if !rho_curve.is_finite() || (z.norm() - rho_curve).abs() > 1e-5 * (1.0 + z.norm()) {
            continue;
        }
        let v = b.eval(z)?;
        if v.im.abs() > 1e-8 * local_scale(b, z.norm()) {
            continue;
        }
        interior.push((t, v.re));
    }
    interior.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    interior.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);

    let m = (curve.angles.len() - 1) / 2;
    let v0 = curve.values[m]; // t = 0
    let vpi = curve.values[2 * m]; // t = pi
    let mut phis = vec![(0.0, v0)];
    phis.extend(interior.iter().copied());
    phis.push((std::f64::consts::PI, vpi));

    let mut branches = Vec::new();
    for w in phis.windows(2) {
        let (plo, vlo) = w[0];
        let (phi, vhi) = w[1];
        branches.push(CurveBranch {
            phi_lo: plo,
            phi_hi: phi,
            alpha: vlo.min(vhi),
            beta: vlo.max(vhi),
            increasing: vhi > vlo,
        });
    }
    curve.interior_critical_angles = interior.iter().map(|(t, _)| *t).collect();
    curve.branches = branches;
    Ok(())
}

/// Class-R verdict for a banded symbol.
#[derive(Clone, Debug)]
pub enum ClassRVerdict {
    /// Certificate: a traced Jordan curve on which b is real.
    Yes(Box<JordanCurveSamples>),
    /// Witness: a section size and a non-real eigenvalue of T_n(b).
    No { n: usize, witness: Complex64 },
    Unknown,
}

/// Decide membership in the class of symbols with asymptotically real
/// spectrum:
/// YES when a polar Jordan curve in b^{-1}(R) is found (sufficient);
/// NO when some section n <= n_probe has a confirmed non-real eigenvalue
/// (spectra of all sections are real for class members, so one non-real
/// eigenvalue is decisive);
/// UNKNOWN otherwise — a non-polar curve could exist that the tracer cannot
/// represent, so absence of a trace is never converted into a NO.
pub fn is_class_r(b: &Symbol, n_probe: usize) -> Result<ClassRVerdict> {
    is_class_r_sampled(b, n_probe, 4096)
}

pub fn is_class_r_sampled(b: &Symbol, n_probe: usize, samples: usize) -> Result<ClassRVerdict> {
    b.require_two_sided()?;
    if b.is_real() {
        if let TraceResult::Found(curve) = trace_polar(b, samples)? {
            return Ok(ClassRVerdict::Yes(Box::new(curve)));
        }
    }
    let rep = reality_check(b, n_probe, 1e-7)?;
    match rep.verdict {
        RealityVerdict::NonReal { n, witness } => Ok(ClassRVerdict::No { n, witness }),
        RealityVerdict::Real => Ok(ClassRVerdict::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_curve_is_circle() {
        // b = 1/z + a z is real on |z| = a^{-1/2}
        for a in [1.0f64, 4.0] {
            let b = Symbol::new(&[(-1, Complex64::new(1.0, 0.0)), (1, Complex64::new(a, 0.0))])
                .unwrap();
            let res = trace_polar(&b, 256).unwrap();
            let curve = match res {
                TraceResult::Found(c) => c,
                _ => panic!("expected curve for a={a}"),
            };
            let expect = 1.0 / a.sqrt();
            for &r in &curve.radii {
                assert!((r - expect).abs() < 1e-10, "a={a}: {r} vs {expect}");
            }
            assert_eq!(curve.len_partition(), 0);
            assert_eq!(curve.winding_number().abs(), 1);
        }
    }

    #[test]
    fn example3_curve_closed_form() {
        // b = (1+z)^3/z (r=1, s=2): rho(t) = sin(t/3)/sin(2t/3)
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let res = trace_polar(&b, 512).unwrap();
        let curve = match res {
            TraceResult::Found(c) => c,
            _ => panic!("curve expected"),
        };
        for (j, &t) in curve.angles.iter().enumerate() {
            let expect = if t.abs() < 1e-12 {
                0.5
            } else {
                (t.abs() / 3.0).sin() / (2.0 * t.abs() / 3.0).sin()
            };
            assert!(
                (curve.radii[j] - expect).abs() < 1e-9,
                "t={t}: {} vs {expect}",
                curve.radii[j]
            );
        }
        // single branch decreasing from 27/4 to 0
        assert_eq!(curve.len_partition(), 0);
        let br = &curve.branches[0];
        assert!((br.beta - 6.75).abs() < 1e-10);
        assert!(br.alpha.abs() < 1e-10);
        assert!(!br.increasing);
    }

    #[test]
    fn trinomial_not_found() {
        let b = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        let res = trace_polar(&b, 256).unwrap();
        assert!(matches!(res, TraceResult::NotFound { .. }));
    }

    #[test]
    fn reflect_curve_radii() {
        let c = JordanCurveSamples::circle(1.0, 64);
        let r = c.reflect();
        assert!(r.radii.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let c = JordanCurveSamples::circle(0.5, 64);
        let r = c.reflect();
        assert!(r.radii.iter().all(|&x| (x - 2.0).abs() < 1e-15));
    }

    #[test]
    fn example5_partition() {
        let b = Symbol::new_int(&[(-3, 1), (-2, 1), (-1, 1), (1, 1), (2, 1), (3, 1)]).unwrap();
        let res = trace_polar(&b, 1024).unwrap();
        let curve = match res {
            TraceResult::Found(c) => c,
            _ => panic!("curve expected"),
        };
        // unit circle
        for &r in &curve.radii {
            assert!((r - 1.0).abs() < 1e-9);
        }
        assert_eq!(curve.len_partition(), 2);
        let phi1 = curve.interior_critical_angles[0];
        let phi2 = curve.interior_critical_angles[1];
        let z1 = (-1.0 + 7f64.sqrt()) / 6.0;
        let z2 = (-1.0 - 7f64.sqrt()) / 6.0;
        assert!((phi1 - z1.acos()).abs() < 1e-10);
        assert!((phi2 - z2.acos()).abs() < 1e-10);
        // branch value endpoints: b(1)=6, b(z1)~-2.63113, b(z2)~0.112612, b(-1)=-2
        let b1 = &curve.branches[0];
        assert!((b1.beta - 6.0).abs() < 1e-9 && (b1.alpha + 2.63113).abs() < 1e-4);
        let b3 = &curve.branches[2];
        assert!((b3.alpha + 2.0).abs() < 1e-9 && (b3.beta - 0.112612).abs() < 1e-4);
    }

    #[test]
    fn class_r_tridiag_signs() {
        let byes = Symbol::new(&[(-1, Complex64::new(1.0, 0.0)), (1, Complex64::new(2.0, 0.0))])
            .unwrap();
        assert!(matches!(is_class_r_sampled(&byes, 20, 256).unwrap(), ClassRVerdict::Yes(_)));

        let bno = Symbol::new(&[(-1, Complex64::new(1.0, 0.0)), (1, Complex64::new(-1.0, 0.0))])
            .unwrap();
        match is_class_r_sampled(&bno, 20, 256).unwrap() {
            ClassRVerdict::No { n, witness } => {
                assert_eq!(n, 2);
                assert!((witness.im.abs() - 1.0).abs() < 1e-9);
            }
            other => panic!("expected NO, got {other:?}"),
        }
    }

    #[test]
    fn class_r_fourdiag_condition() {
        // 1/z + alpha z + beta z^2 with beta = 1: in class iff alpha^3 >= 27
        let mk = |al: f64| {
            Symbol::new(&[
                (-1, Complex64::new(1.0, 0.0)),
                (1, Complex64::new(al, 0.0)),
                (2, Complex64::new(1.0, 0.0)),
            ])
            .unwrap()
        };
        assert!(matches!(
            is_class_r_sampled(&mk(3.5), 20, 512).unwrap(),
            ClassRVerdict::Yes(_)
        ));
        assert!(matches!(
            is_class_r_sampled(&mk(2.0), 30, 512).unwrap(),
            ClassRVerdict::No { .. }
        ));
    }

    #[test]
    fn yes_certificate_has_small_residuals_and_real_crossings() {
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let curve = match trace_polar(&b, 512).unwrap() {
            TraceResult::Found(c) => c,
            _ => panic!(),
        };
        let res = curve.resample_residual(&b, 2000).unwrap();
        assert!(res <= 1e-9 * b.norm_bound(), "residual {res}");
        // the two real crossings are critical points
        let db = b.derivative().unwrap();
        let m = (curve.angles.len() - 1) / 2;
        let zpos = Complex64::new(curve.radii[m], 0.0);
        let zneg = Complex64::new(-curve.radii[0], 0.0);
        assert!(db.eval(zpos).unwrap().norm() < 1e-8);
        assert!(db.eval(zneg).unwrap().norm() < 1e-8);
    }
}
