//! The limiting measure: density and distribution function from the
//! certified Jordan curve, the Weyl m-function by annulus quadrature,
//! Stieltjes-Perron inversion, and the Cauchy transform of sampled
//! densities.

use num_complex::Complex64;

use crate::curve::JordanCurveSamples;
use crate::error::{Error, Result};
use crate::quad::{neville_to_zero, periodic_trapezoid};
use crate::roots::roots_by_modulus;
use crate::symbol::Symbol;

/// The measure carried by a certified curve: evaluation of the density, the
/// distribution function, and branch-wise sampling.
pub struct CurveMeasure<'a> {
    b: &'a Symbol,
    curve: &'a JordanCurveSamples,
    db: Symbol,
}

impl<'a> CurveMeasure<'a> {
    pub fn new(b: &'a Symbol, curve: &'a JordanCurveSamples) -> Result<CurveMeasure<'a>> {
        if curve.branches.is_empty() {
            return Err(Error::NotCertified);
        }
        Ok(CurveMeasure { b, curve, db: b.derivative()? })
    }

    pub fn curve(&self) -> &JordanCurveSamples {
        self.curve
    }

    /// Support [alpha, beta] = [min alpha_i, max beta_i].
    pub fn support(&self) -> (f64, f64) {
        crate::limitset::support_from_curve(self.curve)
    }

    /// V(t) = b(gamma(t)) with the radius re-solved at the exact angle.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let rho = self.curve.rho_at(self.b, t)?;
        Ok(self.b.eval(Complex64::from_polar(rho, t))?.re)
    }

    /// V'(t) = -rho |w|^2 / Im w with w = b'(gamma(t)) e^{it}
    /// (real by construction on the curve).
    pub fn dvalue_at(&self, t: f64) -> Result<f64> {
        let rho = self.curve.rho_at(self.b, t)?;
        let w = self.db.eval(Complex64::from_polar(rho, t))? * Complex64::from_polar(1.0, t);
        if w.im == 0.0 {
            return Err(Error::ExtrapolationFailed(t));
        }
        Ok(-rho * w.norm_sqr() / w.im)
    }

    /// The angle t in branch `i` with V(t) = x, by bisection on the strictly
    /// monotone branch.
    pub fn invert_branch(&self, i: usize, x: f64) -> Result<f64> {
        let br = &self.curve.branches[i];
        if !(x > br.alpha && x < br.beta) {
            return Err(Error::InvalidParameter(format!(
                "x = {x} outside branch image [{}, {}]",
                br.alpha, br.beta
            )));
        }
        let mut lo = br.phi_lo;
        let mut hi = br.phi_hi;
        // V(lo) is alpha for increasing branches, beta otherwise
        let increasing = br.increasing;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let v = self.value_at(mid)?;
            let go_right = if increasing { v < x } else { v > x };
            if go_right {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + hi.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Density of the limiting measure at x: sum over the branches whose
    /// image contains x of 1 / (pi |V'(t_i(x))|).
    pub fn density(&self, x: f64) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.curve.branches.len() {
            let br = &self.curve.branches[i];
            if x > br.alpha && x < br.beta {
                let t = self.invert_branch(i, x)?;
                let dv = self.dvalue_at(t)?;
                total += 1.0 / (std::f64::consts::PI * dv.abs());
            }
        }
        Ok(total)
    }

    /// Distribution function F(x) = mu([alpha, x]).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.curve.branches.len() {
            let br = &self.curve.branches[i];
            let full = (br.phi_hi - br.phi_lo) / std::f64::consts::PI;
            if x >= br.beta {
                total += full;
            } else if x > br.alpha {
                let t = self.invert_branch(i, x)?;
                total += if br.increasing {
                    (t - br.phi_lo) / std::f64::consts::PI
                } else {
                    (br.phi_hi - t) / std::f64::consts::PI
                };
            }
        }
        Ok(total)
    }

    /// Integral of f against the measure, computed from the sampled-density
    /// estimator on two midpoint grids (K and 2K). The single-grid estimator
    /// carries an O(1/K) bias from the singular support edges; the two grids
    /// are self-similar there, so the Richardson combination cancels it and
    /// the result converges at O(1/K^2) while still exercising the density
    /// values themselves.
    pub fn integral_weighted<F: Fn(f64) -> f64>(&self, f: &F, k: usize) -> Result<f64> {
        let coarse = self.sample(k)?;
        let fine = self.sample(2 * k)?;
        let e_coarse: f64 = coarse.branches.iter().map(|b| b.weighted_stride(1, f)).sum();
        let e_fine: f64 = fine.branches.iter().map(|b| b.weighted_stride(1, f)).sum();
        Ok(2.0 * e_fine - e_coarse)
    }

    /// Branch-wise density samples at k angles uniform in t per branch
    /// (midpoint grid, endpoints excluded where the density may blow up).
    pub fn sample(&self, k_per_branch: usize) -> Result<DensitySamples> {
        let mut branches = Vec::new();
        for (i, br) in self.curve.branches.iter().enumerate() {
            let k = k_per_branch.max(8);
            let dt = (br.phi_hi - br.phi_lo) / k as f64;
            let mut xs = Vec::with_capacity(k);
            let mut rho = Vec::with_capacity(k);
            for j in 0..k {
                let t = br.phi_lo + (j as f64 + 0.5) * dt;
                let x = self.value_at(t)?;
                let d = 1.0 / (std::f64::consts::PI * self.dvalue_at(t)?.abs());
                xs.push(x);
                rho.push(d);
            }
            if !br.increasing {
                xs.reverse();
                rho.reverse();
            }
            branches.push(BranchDensity { branch: i, dt, xs, rho });
        }
        Ok(DensitySamples { support: self.support(), branches })
    }
}

/// Density sampled along one monotone branch, abscissae ascending.
#[derive(Clone, Debug)]
pub struct BranchDensity {
    pub branch: usize,
    /// t-space step used to generate the samples
    pub dt: f64,
    pub xs: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct DensitySamples {
    pub support: (f64, f64),
    pub branches: Vec<BranchDensity>,
}

impl BranchDensity {
    /// Measure of each uncovered end strip: the samples sit on a midpoint
    /// grid in t, the strip is half a t-step, and the branch measure is
    /// dt/pi per unit angle by construction.
    fn strip(&self) -> f64 {
        0.5 * self.dt / std::f64::consts::PI
    }

    /// Trapezoid in x over a stride of the samples, plus the exact end-strip
    /// masses weighted by f at the nearest sample.
    pub(crate) fn weighted_stride<F: Fn(f64) -> f64>(&self, stride: usize, f: &F) -> f64 {
        let xs: Vec<f64> = self.xs.iter().copied().step_by(stride).collect();
        let rho: Vec<f64> = self.rho.iter().copied().step_by(stride).collect();
        let n = xs.len();
        if n < 2 {
            return 0.0;
        }
        let g = |x: f64, r: f64| f(x) * r;
        let mut total = 0.0;
        for i in 1..n {
            total += 0.5 * (g(xs[i], rho[i]) + g(xs[i - 1], rho[i - 1])) * (xs[i] - xs[i - 1]);
        }
        total + self.strip() * (f(xs[0]) + f(xs[n - 1]))
    }

    /// Richardson over sample strides; the leftover edge bias decays like
    /// 1/K, so sample counts around 4e5 reach 1e-6 accuracy.
    pub fn weighted<F: Fn(f64) -> f64>(&self, f: &F) -> f64 {
        2.0 * self.weighted_stride(1, f) - self.weighted_stride(2, f)
    }

    pub fn integral(&self) -> f64 {
        self.weighted(&|_| 1.0)
    }

    pub fn moment(&self, p: u32) -> f64 {
        self.weighted(&|x| x.powi(p as i32))
    }

    /// Midpoint rule in curve-angle space: sum f(x_j) dt / pi. The integrand
    /// is smooth in t even where the density blows up in x, so this
    /// converges at O(dt^2); it uses the abscissae but not the rho values.
    pub fn integrate_smooth<F: Fn(f64) -> f64>(&self, f: &F) -> f64 {
        self.xs.iter().map(|&x| f(x)).sum::<f64>() * self.dt / std::f64::consts::PI
    }
}

impl DensitySamples {
    pub fn integral(&self) -> f64 {
        self.branches.iter().map(|b| b.integral()).sum()
    }

    pub fn first_moment(&self) -> f64 {
        self.branches.iter().map(|b| b.moment(1)).sum()
    }

    pub fn moment(&self, p: u32) -> f64 {
        self.branches.iter().map(|b| b.moment(p)).sum()
    }

    pub fn min_density(&self) -> f64 {
        self.branches
            .iter()
            .flat_map(|b| b.rho.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Density samples from a certified curve: K interior nodes per branch.
pub fn density_from_curve(
    b: &Symbol,
    curve: &JordanCurveSamples,
    k_per_branch: usize,
) -> Result<DensitySamples> {
    CurveMeasure::new(b, curve)?.sample(k_per_branch)
}

/// Pointwise density at x (sum over contributing branches).
pub fn density_at(b: &Symbol, curve: &JordanCurveSamples, x: f64) -> Result<f64> {
    CurveMeasure::new(b, curve)?.density(x)
}

/// F(b(gamma(t))) for single-branch (l = 0) curves: t/pi when b grows along
/// the upper arc from t=0 to t=pi, otherwise 1 - t/pi.
pub fn distribution_from_curve(b: &Symbol, curve: &JordanCurveSamples, t: f64) -> Result<f64> {
    let l = curve.len_partition();
    if l > 0 {
        return Err(Error::MultiBranch(l));
    }
    if curve.branches.is_empty() {
        return Err(Error::NotCertified);
    }
    let _ = b;
    if !(0.0..=std::f64::consts::PI).contains(&t) {
        return Err(Error::InvalidParameter("t must lie in [0, pi]".into()));
    }
    let br = &curve.branches[0];
    Ok(if br.increasing {
        t / std::f64::consts::PI
    } else {
        1.0 - t / std::f64::consts::PI
    })
}

/// Weyl m-function of the Jacobi operator attached to the limiting measure:
///   m(lambda) = (1/2 pi) int_0^{2 pi} d theta / (b(rho e^{i theta}) - lambda)
/// with rho the geometric mean of |z_r| and |z_{r+1}| (the annulus gap is
/// widest there, so the integrand is as smooth as possible).
pub fn weyl_m(b: &Symbol, lambda: Complex64) -> Result<Complex64> {
    weyl_m_tol(b, lambda, 1e-12)
}

/// As `weyl_m` with an explicit quadrature agreement tolerance. Very small
/// gaps between |z_r| and |z_{r+1}| (lambda close to the limiting set) push
/// the node count toward the 2^16 cap, where 1e-12 may be unreachable.
pub fn weyl_m_tol(b: &Symbol, lambda: Complex64, quad_tol: f64) -> Result<Complex64> {
    let rm = roots_by_modulus(b, lambda)?;
    let tol = 1e-9 * (1.0 + rm.roots[rm.r - 1].norm());
    if rm.defect <= tol {
        return Err(Error::OnLimitingSet(rm.defect));
    }
    let rho = (rm.roots[rm.r - 1].norm() * rm.roots[rm.r].norm()).sqrt();
    let integrand = |theta: f64| -> Complex64 {
        let z = Complex64::from_polar(rho, theta);
        match b.eval(z) {
            Ok(v) => Complex64::new(1.0, 0.0) / (v - lambda),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    let total = periodic_trapezoid(integrand, quad_tol, 1 << 18)?;
    Ok(total / Complex64::new(2.0 * std::f64::consts::PI, 0.0))
}

/// Stieltjes-Perron inversion: density(x) = (1/pi) lim_{eps->0+} Im m(x+i eps),
/// Richardson-extrapolated over eps = eps0 * 2^-k.
pub fn density_from_m(b: &Symbol, x: f64, eps0: f64, levels: usize) -> Result<f64> {
    if !(eps0 > 0.0) || levels < 3 {
        return Err(Error::InvalidParameter("need eps0 > 0 and >= 3 levels".into()));
    }
    let mut hs = Vec::with_capacity(levels);
    let mut ys = Vec::with_capacity(levels);
    for k in 0..levels {
        let eps = eps0 * 0.5f64.powi(k as i32);
        let m = weyl_m_tol(b, Complex64::new(x, eps), 3e-10)?;
        hs.push(eps);
        ys.push(m.im / std::f64::consts::PI);
    }
    let (value, err) = neville_to_zero(&hs, &ys);
    if !value.is_finite() || err > 1e-4 * (1.0 + value.abs()) {
        return Err(Error::ExtrapolationFailed(x));
    }
    Ok(value)
}

/// Cauchy transform C(z) = int rho(x) / (x - z) dx of a sampled density.
pub fn cauchy_transform(ds: &DensitySamples, z: Complex64) -> Result<Complex64> {
    let (a, b) = ds.support;
    if z.im.abs() < 1e-6 && z.re >= a - 1e-6 && z.re <= b + 1e-6 {
        return Err(Error::InvalidParameter(
            "z is within 1e-6 of the support; the transform is singular there".into(),
        ));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for br in &ds.branches {
        let re = br.integrate_smooth(&|x| ((Complex64::new(x, 0.0) - z).inv()).re);
        let im = br.integrate_smooth(&|x| ((Complex64::new(x, 0.0) - z).inv()).im);
        total += Complex64::new(re, im);
    }
    Ok(total)
}
