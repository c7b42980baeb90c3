//! Dense nonsymmetric complex eigensolver: balancing, Householder reduction
//! to upper Hessenberg form, and explicit single-shift QR with Givens
//! rotations and Wilkinson shifts.
//!
//! The solver is generic over the working scalar so that the same code runs
//! in `f64` and, when a finite section is too non-normal for double
//! precision, in double-double (see `dd`).

use num_complex::Complex64;

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Real scalar the QR iteration can run over.
pub trait QrReal:
    Copy
    + PartialOrd
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    const EPS: f64;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
}

impl QrReal for f64 {
    const EPS: f64 = f64::EPSILON;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl QrReal for Dd {
    const EPS: f64 = Dd::EPS;
    fn zero() -> Self {
        Dd::ZERO
    }
    fn one() -> Self {
        Dd::ONE
    }
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
}

/// Minimal complex type over a QrReal.
#[derive(Clone, Copy, Debug)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: QrReal> Cx<T> {
    #[inline]
    pub fn zero() -> Self {
        Cx { re: T::zero(), im: T::zero() }
    }
    #[inline]
    fn is_zero(self) -> bool {
        self.re.to_f64() == 0.0 && self.im.to_f64() == 0.0
    }
    #[inline]
    fn conj(self) -> Self {
        Cx { re: self.re, im: -self.im }
    }
    #[inline]
    fn add(self, o: Self) -> Self {
        Cx { re: self.re + o.re, im: self.im + o.im }
    }
    #[inline]
    fn sub(self, o: Self) -> Self {
        Cx { re: self.re - o.re, im: self.im - o.im }
    }
    #[inline]
    fn mul(self, o: Self) -> Self {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
    #[inline]
    fn scale(self, t: T) -> Self {
        Cx { re: self.re * t, im: self.im * t }
    }
    /// Smith's algorithm, robust against intermediate overflow.
    fn div(self, o: Self) -> Self {
        if o.im.abs() <= o.re.abs() {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            Cx { re: (self.re + self.im * r) / d, im: (self.im - self.re * r) / d }
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            Cx { re: (self.re * r + self.im) / d, im: (self.im * r - self.re) / d }
        }
    }
    fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    /// |z| with scaling to avoid overflow.
    fn abs(self) -> T {
        let ar = self.re.abs();
        let ai = self.im.abs();
        let (big, small) = if ar >= ai { (ar, ai) } else { (ai, ar) };
        if big.to_f64() == 0.0 {
            return T::zero();
        }
        let q = small / big;
        big * (T::one() + q * q).sqrt()
    }
    /// Principal square root.
    fn sqrt(self) -> Self {
        if self.is_zero() {
            return Cx::zero();
        }
        let m = self.abs();
        let half = T::from_f64(0.5);
        let t = ((m + self.re.abs()) * half).sqrt();
        if self.re.to_f64() >= 0.0 {
            let im = self.im * half / t;
            Cx { re: t, im }
        } else {
            let re = self.im.abs() * half / t;
            let im = if self.im.to_f64() >= 0.0 { t } else { -t };
            Cx { re, im }
        }
    }
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    pub fn from_c64(z: Complex64) -> Self {
        Cx { re: T::from_f64(z.re), im: T::from_f64(z.im) }
    }
}

struct Mat<T> {
    n: usize,
    a: Vec<Cx<T>>,
}

impl<T: QrReal> Mat<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Cx<T> {
        self.a[i * self.n + j]
    }
    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Cx<T> {
        &mut self.a[i * self.n + j]
    }
}

/// Diagonal balancing by powers of two (norm equalization of rows/columns).
fn balance<T: QrReal>(h: &mut Mat<T>) {
    let n = h.n;
    let radix = T::from_f64(2.0);
    let radix_inv = T::from_f64(0.5);
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + h.at(j, i).abs();
                    r = r + h.at(i, j).abs();
                }
            }
            if c.to_f64() == 0.0 || r.to_f64() == 0.0 {
                continue;
            }
            let mut f = T::one();
            let mut cc = c;
            let s = c + r;
            while cc < r * radix_inv {
                f = f * radix;
                cc = cc * radix * radix;
            }
            let mut rr = r;
            let mut cc2 = c;
            let mut g = T::one();
            while cc2 > rr * radix {
                g = g * radix;
                cc2 = cc2 * radix_inv * radix_inv;
                rr = rr * radix;
            }
            let f = f / g;
            let cnew = c * f;
            let rnew = r / f;
            if (cnew + rnew).to_f64() < 0.95 * s.to_f64() {
                done = false;
                let finv = T::one() / f;
                for j in 0..n {
                    *h.at_mut(i, j) = h.at(i, j).scale(finv);
                }
                for j in 0..n {
                    *h.at_mut(j, i) = h.at(j, i).scale(f);
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (values only, no Q).
fn hessenberg<T: QrReal>(h: &mut Mat<T>) {
    let n = h.n;
    if n < 3 {
        return;
    }
    let mut v = vec![Cx::<T>::zero(); n];
    for k in 0..n - 2 {
        // build the reflector from column k, rows k+1..n
        let mut norm = T::zero();
        for i in k + 1..n {
            norm = norm + h.at(i, k).norm_sqr();
        }
        let norm = norm.sqrt();
        if norm.to_f64() == 0.0 {
            continue;
        }
        let x0 = h.at(k + 1, k);
        let x0abs = x0.abs();
        let phase = if x0abs.to_f64() == 0.0 {
            Cx { re: T::one(), im: T::zero() }
        } else {
            x0.scale(T::one() / x0abs)
        };
        let alpha = phase.scale(norm); // reflect onto -alpha e1
        let mut vnorm = T::zero();
        for i in k + 1..n {
            let vi = if i == k + 1 { x0.add(alpha) } else { h.at(i, k) };
            v[i] = vi;
            vnorm = vnorm + vi.norm_sqr();
        }
        if vnorm.to_f64() == 0.0 {
            continue;
        }
        let inv = T::one() / vnorm.sqrt();
        for vi in v.iter_mut().take(n).skip(k + 1) {
            *vi = vi.scale(inv);
        }
        // H <- (I - 2 v v^H) H  on rows k+1.., columns k..
        for j in k..n {
            let mut dot = Cx::<T>::zero();
            for i in k + 1..n {
                dot = dot.add(v[i].conj().mul(h.at(i, j)));
            }
            let dot2 = dot.scale(T::from_f64(2.0));
            for i in k + 1..n {
                let upd = v[i].mul(dot2);
                *h.at_mut(i, j) = h.at(i, j).sub(upd);
            }
        }
        // H <- H (I - 2 v v^H)  on all rows, columns k+1..
        for i in 0..n {
            let mut dot = Cx::<T>::zero();
            for j in k + 1..n {
                dot = dot.add(h.at(i, j).mul(v[j]));
            }
            let dot2 = dot.scale(T::from_f64(2.0));
            for j in k + 1..n {
                let upd = dot2.mul(v[j].conj());
                *h.at_mut(i, j) = h.at(i, j).sub(upd);
            }
        }
        // enforce exact zeros below the subdiagonal
        for i in k + 2..n {
            *h.at_mut(i, k) = Cx::zero();
        }
    }
}

/// Givens rotation [c, s; -conj(s), c] (c real) mapping (a, b) to (r, 0).
fn givens<T: QrReal>(a: Cx<T>, b: Cx<T>) -> (T, Cx<T>) {
    let babs = b.abs();
    if babs.to_f64() == 0.0 {
        return (T::one(), Cx::zero());
    }
    let aabs = a.abs();
    if aabs.to_f64() == 0.0 {
        // r = |b|, s = conj(b)/|b|
        return (T::zero(), b.conj().scale(T::one() / babs));
    }
    let scale = aabs + babs;
    let inv_scale = T::one() / scale;
    let ar = aabs * inv_scale;
    let br = babs * inv_scale;
    let norm = scale * (ar * ar + br * br).sqrt();
    let c = aabs / norm;
    let phase = a.scale(T::one() / aabs);
    let s = phase.mul(b.conj()).scale(T::one() / norm);
    (c, s)
}

/// Eigenvalues of the 2x2 block [[a,b],[c,d]].
fn eig2<T: QrReal>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> (Cx<T>, Cx<T>) {
    let half = T::from_f64(0.5);
    let mean = a.add(d).scale(half);
    let delta = a.sub(d).scale(half);
    let disc = delta.mul(delta).add(b.mul(c)).sqrt();
    (mean.add(disc), mean.sub(disc))
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 closest to d.
fn wilkinson<T: QrReal>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Cx<T> {
    let (e1, e2) = eig2(a, b, c, d);
    if e1.sub(d).abs() < e2.sub(d).abs() {
        e1
    } else {
        e2
    }
}

/// Shifted QR iteration on a Hessenberg matrix; returns the eigenvalues.
fn qr_eigenvalues<T: QrReal>(h: &mut Mat<T>) -> Result<Vec<Cx<T>>> {
    let n = h.n;
    let mut eigs = vec![Cx::<T>::zero(); n];
    if n == 0 {
        return Ok(vec![]);
    }
    let eps = T::from_f64(T::EPS);
    // overall magnitude floor for deflation tests
    let mut hnorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            hnorm = hnorm + h.at(i, j).abs();
        }
    }
    let floor = hnorm * eps;

    let mut hi = n - 1;
    let mut iters_at_hi = 0usize;
    let mut total_iters = 0usize;
    let max_total = 60 * n + 200;
    loop {
        // deflate converged eigenvalues at the bottom
        loop {
            if hi == 0 {
                eigs[0] = h.at(0, 0);
                return Ok(eigs);
            }
            let sub = h.at(hi, hi - 1).abs();
            let local = h.at(hi - 1, hi - 1).abs() + h.at(hi, hi).abs();
            let tol = if local.to_f64() > 0.0 { eps * local } else { floor };
            if sub < tol || sub.to_f64() == 0.0 {
                eigs[hi] = h.at(hi, hi);
                *h.at_mut(hi, hi - 1) = Cx::zero();
                hi -= 1;
                iters_at_hi = 0;
            } else {
                break;
            }
        }
        if hi == 1 {
            let (e1, e2) = eig2(h.at(0, 0), h.at(0, 1), h.at(1, 0), h.at(1, 1));
            eigs[0] = e1;
            eigs[1] = e2;
            return Ok(eigs);
        }
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h.at(lo, lo - 1).abs();
            let local = h.at(lo - 1, lo - 1).abs() + h.at(lo, lo).abs();
            let tol = if local.to_f64() > 0.0 { eps * local } else { floor };
            if sub < tol || sub.to_f64() == 0.0 {
                *h.at_mut(lo, lo - 1) = Cx::zero();
                break;
            }
            lo -= 1;
        }

        total_iters += 1;
        iters_at_hi += 1;
        if total_iters > max_total {
            return Err(Error::QrNoConvergence(n));
        }
        let mu = if iters_at_hi % 12 == 0 {
            // exceptional shift to break limit cycles
            let off = h.at(hi, hi - 1).abs() + h.at(hi - 1, hi - 2.min(hi - 1)).abs();
            h.at(hi, hi).add(Cx { re: off * T::from_f64(0.75), im: T::zero() })
        } else {
            wilkinson(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            )
        };

        // explicit shifted QR sweep on [lo..=hi]
        for i in lo..=hi {
            let d = h.at(i, i).sub(mu);
            *h.at_mut(i, i) = d;
        }
        let mut rots: Vec<(T, Cx<T>)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h.at(i, i), h.at(i + 1, i));
            rots.push((c, s));
            // apply to rows i, i+1 on columns i..=hi
            for j in i..=hi {
                let x = h.at(i, j);
                let y = h.at(i + 1, j);
                *h.at_mut(i, j) = x.scale(c).add(s.mul(y));
                *h.at_mut(i + 1, j) = y.scale(c).sub(s.conj().mul(x));
            }
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            // apply G_i^H on columns i, i+1, rows lo..=min(i+1, hi)
            for row in lo..=(i + 1).min(hi) {
                let x = h.at(row, i);
                let y = h.at(row, i + 1);
                *h.at_mut(row, i) = x.scale(*c).add(y.mul(s.conj()));
                *h.at_mut(row, i + 1) = y.scale(*c).sub(x.mul(*s));
            }
        }
        for i in lo..=hi {
            let d = h.at(i, i).add(mu);
            *h.at_mut(i, i) = d;
        }
    }
}

/// Eigenvalues of a dense complex matrix (row-major, n*n entries), computed
/// in the scalar type `T`.
pub fn eigenvalues_in<T: QrReal>(matrix: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    assert_eq!(matrix.len(), n * n);
    if n == 0 {
        return Ok(vec![]);
    }
    let mut h = Mat::<T> {
        n,
        a: matrix.iter().map(|&z| Cx::from_c64(z)).collect(),
    };
    balance(&mut h);
    hessenberg(&mut h);
    let eigs = qr_eigenvalues(&mut h)?;
    Ok(eigs.into_iter().map(|e| e.to_c64()).collect())
}

pub fn eigenvalues_f64(matrix: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    eigenvalues_in::<f64>(matrix, n)
}

pub fn eigenvalues_dd(matrix: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    eigenvalues_in::<Dd>(matrix, n)
}

/// Determinant by LU with partial pivoting (A overwritten).
pub fn det(a: &mut [Complex64], n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n);
    let mut sign = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].norm();
        for i in k + 1..n {
            let v = a[i * n + k].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let akk = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / akk;
            for j in k + 1..n {
                let upd = f * a[k * n + j];
                a[i * n + j] -= upd;
            }
        }
    }
    let mut d = Complex64::new(sign, 0.0);
    for k in 0..n {
        d *= a[k * n + k];
    }
    d
}

/// Solve A x = b by LU with partial pivoting (A overwritten). Used for
/// eigenpair residual spot checks via inverse iteration.
pub fn lu_solve(a: &mut [Complex64], n: usize, b: &mut [Complex64]) -> Result<()> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = a[piv[k] * n + k].norm();
        for i in k + 1..n {
            let v = a[piv[i] * n + k].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            // singular to working precision: nudge the pivot
            a[piv[k] * n + k] = Complex64::new(1e-300, 0.0);
        }
        piv.swap(k, p);
        let pk = piv[k];
        let akk = a[pk * n + k];
        for i in k + 1..n {
            let pi = piv[i];
            let f = a[pi * n + k] / akk;
            a[pi * n + k] = f;
            for j in k + 1..n {
                let upd = f * a[pk * n + j];
                a[pi * n + j] -= upd;
            }
        }
    }
    // forward substitution
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = b[piv[i]];
        for j in 0..i {
            acc -= a[piv[i] * n + j] * y[j];
        }
        y[i] = acc;
    }
    // back substitution
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in i + 1..n {
            acc -= a[piv[i] * n + j] * b[j];
        }
        b[i] = acc / a[piv[i] * n + i];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_eigs(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn diag_matrix() {
        let n = 3;
        let mut m = vec![Complex64::new(0.0, 0.0); 9];
        m[0] = Complex64::new(1.0, 0.0);
        m[4] = Complex64::new(2.0, 1.0);
        m[8] = Complex64::new(-3.0, 0.0);
        let e = sort_eigs(eigenvalues_f64(&m, n).unwrap());
        assert!((e[0] - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
        assert!((e[2] - Complex64::new(2.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn shift_matrix_cube_roots() {
        // circulant-like: [[0,1,0],[0,0,1],[1,0,0]] has eigenvalues = cube roots of 1
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let m = vec![z, o, z, z, z, o, o, z, z];
        let e = eigenvalues_f64(&m, 3).unwrap();
        for ev in &e {
            assert!((ev.norm() - 1.0).abs() < 1e-10);
            let c = ev.powi(3);
            assert!((c - o).norm() < 1e-9);
        }
    }

    #[test]
    fn random_matrix_trace_and_det_consistency() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 5, 9, 17] {
            let m: Vec<Complex64> = (0..n * n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let e = eigenvalues_f64(&m, n).unwrap();
            let tr: Complex64 = (0..n).map(|i| m[i * n + i]).sum();
            let se: Complex64 = e.iter().sum();
            assert!((tr - se).norm() < 1e-9 * (1.0 + tr.norm()), "n={n}");
        }
    }

    #[test]
    fn dd_matches_f64_on_small_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 6;
        let m: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let e1 = sort_eigs(eigenvalues_f64(&m, n).unwrap());
        let e2 = sort_eigs(eigenvalues_dd(&m, n).unwrap());
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn lu_solves() {
        let mut a = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(3.0, 0.0),
        ];
        let mut b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let a0 = a.clone();
        lu_solve(&mut a, 2, &mut b).unwrap();
        let r0 = a0[0] * b[0] + a0[1] * b[1] - Complex64::new(1.0, 0.0);
        let r1 = a0[2] * b[0] + a0[3] * b[1];
        assert!(r0.norm() < 1e-13 && r1.norm() < 1e-13);
    }
}
