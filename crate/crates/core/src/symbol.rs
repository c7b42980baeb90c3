//! Laurent-polynomial symbols b(z) = sum_{k=-r}^{s} a_k z^k and truncated
//! Laurent series obtained by composing a symbol with an entire function.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Laurent polynomial with complex coefficients on the band [-r, s].
///
/// Zero band edges are trimmed at construction. When every coefficient is a
/// real rational the exact representation is kept alongside the floating one,
/// so that the moment/Hankel pipeline can run in exact arithmetic.
#[derive(Clone, Debug)]
pub struct Symbol {
    coeffs: BTreeMap<i32, Complex64>,
    exact: Option<BTreeMap<i32, BigRational>>,
    real: bool,
}

impl Symbol {
    /// Build a symbol from (power, coefficient) pairs. Duplicate powers are
    /// rejected; zero coefficients (and hence zero band edges) are dropped.
    pub fn new(entries: &[(i32, Complex64)]) -> Result<Symbol> {
        if entries.is_empty() {
            return Err(Error::EmptySymbol);
        }
        let mut coeffs = BTreeMap::new();
        for &(k, a) in entries {
            if coeffs.contains_key(&k) {
                return Err(Error::DuplicatePower(k));
            }
            coeffs.insert(k, a);
        }
        coeffs.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        if coeffs.is_empty() {
            return Err(Error::EmptySymbol);
        }
        let real = coeffs.values().all(|a| a.im == 0.0);
        Ok(Symbol { coeffs, exact: None, real })
    }

    /// Build a symbol with exact rational (real) coefficients.
    pub fn new_rational(entries: &[(i32, BigRational)]) -> Result<Symbol> {
        if entries.is_empty() {
            return Err(Error::EmptySymbol);
        }
        let mut exact = BTreeMap::new();
        for (k, a) in entries {
            if exact.contains_key(k) {
                return Err(Error::DuplicatePower(*k));
            }
            exact.insert(*k, a.clone());
        }
        exact.retain(|_, a| !a.is_zero());
        if exact.is_empty() {
            return Err(Error::EmptySymbol);
        }
        let coeffs = exact
            .iter()
            .map(|(&k, a)| (k, Complex64::new(rat_to_f64(a), 0.0)))
            .collect();
        Ok(Symbol { coeffs, exact: Some(exact), real: true })
    }

    /// Convenience constructor from integer coefficients.
    pub fn new_int(entries: &[(i32, i64)]) -> Result<Symbol> {
        let v: Vec<(i32, BigRational)> = entries
            .iter()
            .map(|&(k, a)| (k, BigRational::from_integer(BigInt::from(a))))
            .collect();
        Symbol::new_rational(&v)
    }

    /// The banded-analysis entry point: requires at least one negative and
    /// one positive power after trimming (r, s >= 1).
    pub fn new_banded(entries: &[(i32, Complex64)]) -> Result<Symbol> {
        let sym = Symbol::new(entries)?;
        sym.require_two_sided()?;
        Ok(sym)
    }

    pub fn require_two_sided(&self) -> Result<()> {
        let lo = self.band_lo();
        let hi = self.band_hi();
        if lo >= 0 || hi <= 0 {
            return Err(Error::OneSided { lo, hi });
        }
        Ok(())
    }

    /// Least power with nonzero coefficient.
    pub fn band_lo(&self) -> i32 {
        *self.coeffs.keys().next().expect("symbol is never empty")
    }

    /// Greatest power with nonzero coefficient.
    pub fn band_hi(&self) -> i32 {
        *self.coeffs.keys().next_back().expect("symbol is never empty")
    }

    /// Pole order r (0 for a symbol with no negative powers).
    pub fn r(&self) -> u32 {
        (-self.band_lo()).max(0) as u32
    }

    /// Polynomial degree s (0 for a symbol with no positive powers).
    pub fn s(&self) -> u32 {
        self.band_hi().max(0) as u32
    }

    pub fn coeff(&self, k: i32) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn coeff_exact(&self, k: i32) -> Option<BigRational> {
        self.exact.as_ref().map(|m| m.get(&k).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_coeffs(&self) -> Option<&BTreeMap<i32, BigRational>> {
        self.exact.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &a)| (k, a))
    }

    /// Wiener norm R = sum |a_k|, an upper bound for ||T_n(b)|| at every n.
    pub fn norm_bound(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm()).sum()
    }

    /// Evaluate at z != 0 by two Horner passes: nonnegative powers in z,
    /// negative powers in 1/z.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if self.band_lo() < 0 && z == Complex64::new(0.0, 0.0) {
            return Err(Error::EvalAtZero);
        }
        let hi = self.band_hi();
        let lo = self.band_lo();
        let mut plus = Complex64::new(0.0, 0.0);
        if hi >= 0 {
            for k in (0..=hi).rev() {
                plus = plus * z + self.coeff(k);
            }
        }
        let mut minus = Complex64::new(0.0, 0.0);
        if lo < 0 {
            let w = Complex64::new(1.0, 0.0) / z;
            for k in lo..0 {
                minus = minus * w + self.coeff(k);
            }
            minus *= w;
        }
        Ok(plus + minus)
    }

    /// Evaluate the derivative b'(z) directly (no intermediate Symbol).
    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.derivative()?.eval(z)
    }

    /// Coefficient-wise derivative: power k maps to k*a_k at power k-1.
    pub fn derivative(&self) -> Result<Symbol> {
        let entries: Vec<(i32, Complex64)> = self
            .coeffs
            .iter()
            .filter(|(&k, _)| k != 0)
            .map(|(&k, &a)| (k - 1, a * k as f64))
            .collect();
        if entries.is_empty() {
            // derivative of a constant: the zero symbol, kept as 0*z^0
            return Symbol::new(&[(0, Complex64::new(0.0, 0.0))]).or_else(|_| {
                Ok(Symbol {
                    coeffs: BTreeMap::from([(0, Complex64::new(0.0, 0.0))]),
                    exact: None,
                    real: true,
                })
            });
        }
        let mut d = Symbol::new(&entries)?;
        if let Some(ex) = &self.exact {
            let exentries: Vec<(i32, BigRational)> = ex
                .iter()
                .filter(|(&k, _)| k != 0)
                .map(|(&k, a)| (k - 1, a * BigRational::from_integer(BigInt::from(k))))
                .collect();
            if !exentries.is_empty() {
                d = Symbol::new_rational(&exentries)?;
            }
        }
        Ok(d)
    }

    pub fn is_constant(&self) -> bool {
        self.band_lo() == 0 && self.band_hi() == 0
    }

    /// All critical points of b: the roots of z^{r+1} b'(z), a polynomial of
    /// degree r+s which has no root at z = 0 (its constant term is -r a_{-r}).
    /// Multiplicities are reported through repeated entries.
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        if self.is_constant() {
            return Err(Error::ConstantSymbol);
        }
        // coefficient of z^{k+r} is k*a_k, for k in [-r, s]
        let r = self.r() as i32;
        let deg = (self.s() as i32 + r) as usize;
        let mut poly = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (k, a) in self.terms() {
            if k != 0 {
                poly[(k + r) as usize] = a * k as f64;
            }
        }
        crate::roots::roots(&poly, 1e-13)
    }

    /// Scale the argument: returns the symbol z -> b(c z), with coefficients
    /// a_k c^k. This is a similarity transform of every finite section (by
    /// the diagonal matrix diag(c^i)), so all spectra are preserved exactly.
    pub fn scale_argument(&self, c: f64) -> Symbol {
        let entries: Vec<(i32, Complex64)> =
            self.terms().map(|(k, a)| (k, a * c.powi(k))).collect();
        Symbol::new(&entries).expect("scaling keeps the symbol nonempty")
    }

    /// Add a real constant to the symbol (shifts every spectrum rigidly).
    pub fn shift(&self, c: f64) -> Symbol {
        let mut entries: Vec<(i32, Complex64)> = self.terms().collect();
        let mut found = false;
        for e in entries.iter_mut() {
            if e.0 == 0 {
                e.1 += c;
                found = true;
            }
        }
        if !found {
            entries.push((0, Complex64::new(c, 0.0)));
        }
        Symbol::new(&entries).expect("shift keeps the symbol nonempty")
    }

    /// Parse the JSON wire format; see the module docs for the two variants.
    pub fn from_json(text: &str) -> Result<Symbol> {
        let doc: SymbolJson = serde_json::from_str(text)?;
        doc.into_symbol()
    }

    pub fn to_json(&self) -> String {
        let doc = SymbolJson::from_symbol(self);
        serde_json::to_string(&doc).expect("symbol serialization cannot fail")
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.im == 0.0 {
                write!(f, "{}", a.re)?;
            } else {
                write!(f, "({}{:+}i)", a.re, a.im)?;
            }
            if k != 0 {
                write!(f, "*z^{}", k)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn rat_to_f64(a: &BigRational) -> f64 {
    // BigRational::to_f64 is exact-rounded for values in range
    a.to_f64().unwrap_or(f64::NAN)
}

/// A truncated Laurent series on the band [-big_r, big_s], carrying a bound on
/// the absolute coefficient mass dropped on the annulus of interest.
#[derive(Clone, Debug)]
pub struct TruncatedSymbol {
    coeffs: BTreeMap<i32, Complex64>,
    pub tail_bound: f64,
    pub annulus: (f64, f64),
}

impl TruncatedSymbol {
    pub fn band_lo(&self) -> i32 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    pub fn band_hi(&self) -> i32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn coeff(&self, k: i32) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &a)| (k, a))
    }

    pub fn norm_bound(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if self.band_lo() < 0 && z == Complex64::new(0.0, 0.0) {
            return Err(Error::EvalAtZero);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let zinv = Complex64::new(1.0, 0.0) / z;
        for (k, a) in self.terms() {
            let p = if k >= 0 { z.powi(k) } else { zinv.powi(-k) };
            acc += a * p;
        }
        Ok(acc)
    }
}

/// Truncated composition f(b(z)) of an entire function (given by its leading
/// Taylor coefficients) with a symbol.
///
/// Retained partial-sum terms whose monomials fall outside [-big_r, big_s]
/// are dropped; `tail_bound` is the sum of |c| * max(rho_min^k, rho_max^k)
/// over the dropped monomials, i.e. the sup of the dropped mass on the
/// annulus.
pub fn compose_entire(
    f_taylor: &[Complex64],
    b: &Symbol,
    truncation: (i32, i32),
    annulus: Option<(f64, f64)>,
) -> Result<TruncatedSymbol> {
    let (big_r, big_s) = truncation;
    if big_r < 0 || big_s < 0 {
        return Err(Error::InvalidParameter("truncation bounds must be nonnegative".into()));
    }
    let annulus = annulus.unwrap_or((0.5, 2.0));
    if !(annulus.0 > 0.0 && annulus.1 >= annulus.0) {
        return Err(Error::InvalidParameter("annulus must satisfy 0 < rho_min <= rho_max".into()));
    }
    let m_min = f_taylor
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(m, _)| m as i32);
    if let Some(m) = m_min {
        let r = b.r() as i32;
        let s = b.s() as i32;
        if r * m > big_r || s * m > big_s {
            return Err(Error::TruncationTooSmall { r: big_r, s: big_s });
        }
    }

    // accumulate c_m * b(z)^m over the full band, then truncate
    let lo = b.band_lo();
    let hi = b.band_hi();
    let mmax = f_taylor.len() as i32 - 1;
    let full_lo = (lo * mmax).min(0);
    let full_hi = (hi * mmax).max(0);
    let width = (full_hi - full_lo + 1) as usize;
    let idx = |k: i32| (k - full_lo) as usize;

    let mut acc = vec![Complex64::new(0.0, 0.0); width];
    let mut power = vec![Complex64::new(0.0, 0.0); width];
    power[idx(0)] = Complex64::new(1.0, 0.0);
    if let Some(&c0) = f_taylor.first() {
        acc[idx(0)] += c0;
    }
    let bterms: Vec<(i32, Complex64)> = b.terms().collect();
    for (m, &cm) in f_taylor.iter().enumerate().skip(1) {
        // power <- power * b
        let mut next = vec![Complex64::new(0.0, 0.0); width];
        for (i, &p) in power.iter().enumerate() {
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let kp = full_lo + i as i32;
            for &(k, a) in &bterms {
                let kk = kp + k;
                if kk >= full_lo && kk <= full_hi {
                    next[idx(kk)] += p * a;
                }
            }
        }
        power = next;
        if cm != Complex64::new(0.0, 0.0) {
            for (i, &p) in power.iter().enumerate() {
                acc[i] += cm * p;
            }
        }
        let _ = m;
    }

    let mut coeffs = BTreeMap::new();
    let mut tail = 0.0;
    for (i, &a) in acc.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k = full_lo + i as i32;
        if -k <= big_r && k <= big_s {
            coeffs.insert(k, a);
        } else {
            tail += a.norm() * annulus.0.powi(k).max(annulus.1.powi(k));
        }
    }
    Ok(TruncatedSymbol { coeffs, tail_bound: tail, annulus })
}

/// Anything a Toeplitz section can be built from: a banded symbol or a
/// truncated series.
pub trait SymbolLike {
    fn band_lo(&self) -> i32;
    fn band_hi(&self) -> i32;
    fn coeff(&self, k: i32) -> Complex64;
    fn eval(&self, z: Complex64) -> Result<Complex64>;
    fn norm_bound(&self) -> f64;
}

impl SymbolLike for Symbol {
    fn band_lo(&self) -> i32 {
        Symbol::band_lo(self)
    }
    fn band_hi(&self) -> i32 {
        Symbol::band_hi(self)
    }
    fn coeff(&self, k: i32) -> Complex64 {
        Symbol::coeff(self, k)
    }
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Symbol::eval(self, z)
    }
    fn norm_bound(&self) -> f64 {
        Symbol::norm_bound(self)
    }
}

impl SymbolLike for TruncatedSymbol {
    fn band_lo(&self) -> i32 {
        TruncatedSymbol::band_lo(self)
    }
    fn band_hi(&self) -> i32 {
        TruncatedSymbol::band_hi(self)
    }
    fn coeff(&self, k: i32) -> Complex64 {
        TruncatedSymbol::coeff(self, k)
    }
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        TruncatedSymbol::eval(self, z)
    }
    fn norm_bound(&self) -> f64 {
        TruncatedSymbol::norm_bound(self)
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    coeffs: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Rational { k: i32, num: String, den: String },
    Float { k: i32, re: f64, #[serde(default)] im: f64 },
}

impl SymbolJson {
    fn from_symbol(s: &Symbol) -> SymbolJson {
        let coeffs = if let Some(ex) = &s.exact {
            ex.iter()
                .map(|(&k, a)| CoeffJson::Rational {
                    k,
                    num: a.numer().to_string(),
                    den: a.denom().to_string(),
                })
                .collect()
        } else {
            s.terms()
                .map(|(k, a)| CoeffJson::Float { k, re: a.re, im: a.im })
                .collect()
        };
        SymbolJson { coeffs }
    }

    fn into_symbol(self) -> Result<Symbol> {
        let all_rational = self.coeffs.iter().all(|c| matches!(c, CoeffJson::Rational { .. }));
        if all_rational && !self.coeffs.is_empty() {
            let mut entries = Vec::new();
            for c in &self.coeffs {
                if let CoeffJson::Rational { k, num, den } = c {
                    let n = BigInt::from_str(num).map_err(|e| {
                        Error::Json(serde_json::Error::custom(format!("bad numerator: {e}")))
                    })?;
                    let d = BigInt::from_str(den).map_err(|e| {
                        Error::Json(serde_json::Error::custom(format!("bad denominator: {e}")))
                    })?;
                    if d.is_zero() {
                        return Err(Error::InvalidParameter("zero denominator".into()));
                    }
                    entries.push((*k, BigRational::new(n, d)));
                }
            }
            Symbol::new_rational(&entries)
        } else {
            let mut entries = Vec::new();
            for c in &self.coeffs {
                match c {
                    CoeffJson::Float { k, re, im } => {
                        entries.push((*k, Complex64::new(*re, *im)));
                    }
                    CoeffJson::Rational { k, num, den } => {
                        let n = BigInt::from_str(num).map_err(|e| {
                            Error::Json(serde_json::Error::custom(format!("bad numerator: {e}")))
                        })?;
                        let d = BigInt::from_str(den).map_err(|e| {
                            Error::Json(serde_json::Error::custom(format!("bad denominator: {e}")))
                        })?;
                        if d.is_zero() {
                            return Err(Error::InvalidParameter("zero denominator".into()));
                        }
                        entries.push((*k, Complex64::new(rat_to_f64(&BigRational::new(n, d)), 0.0)));
                    }
                }
            }
            Symbol::new(&entries)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_symbol_normalizes() {
        let b = Symbol::new_banded(&[(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        assert_eq!(b.r(), 1);
        assert_eq!(b.s(), 1);
        assert!(b.is_real());
    }

    #[test]
    fn make_symbol_spec42() {
        // b(z) = 1/z + 3a^2 z + a^3 z^2 with a = 4/27
        let a = 4.0 / 27.0;
        let b = Symbol::new_banded(&[
            (-1, c(1.0, 0.0)),
            (1, c(3.0 * a * a, 0.0)),
            (2, c(a * a * a, 0.0)),
        ])
        .unwrap();
        assert_eq!(b.r(), 1);
        assert_eq!(b.s(), 2);
    }

    #[test]
    fn make_symbol_trims_and_rejects_one_sided() {
        let err = Symbol::new_banded(&[(2, c(1.0, 0.0)), (-2, c(0.0, 0.0))]);
        assert!(matches!(err, Err(Error::OneSided { .. })));
        let err = Symbol::new(&[(1, c(1.0, 0.0)), (1, c(2.0, 0.0))]);
        assert!(matches!(err, Err(Error::DuplicatePower(1))));
    }

    #[test]
    fn eval_matches_hand_values() {
        let b = Symbol::new_banded(&[(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let v = b.eval(c(1.0, 0.0)).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-15);
        assert!(matches!(b.eval(c(0.0, 0.0)), Err(Error::EvalAtZero)));

        // b = (1+az)^3/z with a=1 at z=1/2: 27a/4
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let v = b.eval(c(0.5, 0.0)).unwrap();
        assert!((v.re - 27.0 / 4.0).abs() < 1e-14);
        assert!(v.im == 0.0);
    }

    #[test]
    fn derivative_band() {
        let b = Symbol::new_banded(&[(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let d = b.derivative().unwrap();
        assert_eq!(d.coeff(-2), c(-1.0, 0.0));
        assert_eq!(d.coeff(0), c(1.0, 0.0));

        // b = 1/z + alpha z + beta z^2 -> b' = -1/z^2 + alpha + 2 beta z
        let b = Symbol::new(&[(-1, c(1.0, 0.0)), (1, c(3.0, 0.0)), (2, c(5.0, 0.0))]).unwrap();
        let d = b.derivative().unwrap();
        assert_eq!(d.coeff(-2), c(-1.0, 0.0));
        assert_eq!(d.coeff(0), c(3.0, 0.0));
        assert_eq!(d.coeff(1), c(10.0, 0.0));

        let k = Symbol::new(&[(0, c(7.0, 0.0))]).unwrap();
        let dk = k.derivative().unwrap();
        assert_eq!(dk.coeff(0), c(0.0, 0.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let b = Symbol::new_int(&[(-2, 3), (-1, 1), (1, 2), (3, -1)]).unwrap();
        let d = b.derivative().unwrap();
        let h = 1e-6;
        for j in 0..8 {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            let z = Complex64::from_polar(1.0, t);
            let fd = (b.eval(z + c(h, 0.0)).unwrap() - b.eval(z - c(h, 0.0)).unwrap()) / (2.0 * h);
            let ex = d.eval(z).unwrap();
            assert!((fd - ex).norm() <= 1e-6 * (1.0 + ex.norm()), "t={t}");
        }
    }

    #[test]
    fn conjugation_symmetry_for_real_symbols() {
        let b = Symbol::new_int(&[(-3, 1), (-1, 7), (2, -2), (4, -1)]).unwrap();
        for j in 0..10 {
            let z = Complex64::from_polar(0.8, 0.1 + j as f64);
            let lhs = b.eval(z).unwrap().conj();
            let rhs = b.eval(z.conj()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn critical_points_tridiag() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let mut cps = b.critical_points().unwrap();
        cps.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(cps.len(), 2);
        assert!((cps[0] - c(-1.0, 0.0)).norm() < 1e-10);
        assert!((cps[1] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn critical_points_fourdiag() {
        // (1+z)^3/z, a=1: critical points -1 (double) and 1/2
        let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
        let cps = b.critical_points().unwrap();
        assert_eq!(cps.len(), 3);
        let near_half = cps.iter().filter(|z| (**z - c(0.5, 0.0)).norm() < 1e-7).count();
        let near_m1 = cps.iter().filter(|z| (**z - c(-1.0, 0.0)).norm() < 1e-5).count();
        assert_eq!(near_half, 1);
        assert_eq!(near_m1, 2);
    }

    #[test]
    fn critical_points_trinomial() {
        // b = 1/z + z^2: roots of -1 + 2z^3, i.e. 2^{-1/3} cube roots of unity
        let b = Symbol::new_int(&[(-1, 1), (2, 1)]).unwrap();
        let cps = b.critical_points().unwrap();
        assert_eq!(cps.len(), 3);
        let rad = 0.5f64.powf(1.0 / 3.0);
        for z in cps {
            assert!((z.norm() - rad).abs() < 1e-10);
        }
    }

    #[test]
    fn compose_identity_is_symbol() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let t = compose_entire(&[c(0.0, 0.0), c(1.0, 0.0)], &b, (1, 1), None).unwrap();
        assert_eq!(t.coeff(-1), c(1.0, 0.0));
        assert_eq!(t.coeff(1), c(1.0, 0.0));
        assert_eq!(t.tail_bound, 0.0);
    }

    #[test]
    fn compose_exp_constant_term() {
        // constant term of sum_m b^m/m! for b = 1/z+z: sum_k C(2k,k)/(2k)!
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let mut taylor = Vec::new();
        let mut fact = 1.0;
        for m in 0..=10 {
            if m > 0 {
                fact *= m as f64;
            }
            taylor.push(c(1.0 / fact, 0.0));
        }
        let t = compose_entire(&taylor, &b, (10, 10), None).unwrap();
        // brute-force oracle: multiply series directly in a wide band
        let mut expect = 0.0;
        let mut binom = 1.0f64; // C(0,0)
        let mut f2k = 1.0f64;
        for k in 0..=5 {
            if k > 0 {
                binom = binom * (2 * k - 1) as f64 * (2 * k) as f64 / ((k * k) as f64);
                f2k *= (2 * k - 1) as f64 * (2 * k) as f64;
            }
            expect += binom / f2k;
        }
        assert!((t.coeff(0).re - expect).abs() < 1e-14, "{} vs {}", t.coeff(0).re, expect);
        assert_eq!(t.tail_bound, 0.0);
    }

    #[test]
    fn compose_cos_degenerate_truncation() {
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let taylor = [c(1.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)];
        let err = compose_entire(&taylor, &b, (0, 0), None);
        assert!(matches!(err, Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn compose_reports_tail() {
        // exp-partial-sum of tridiag truncated to [-2,2] drops mass
        let b = Symbol::new_int(&[(-1, 1), (1, 1)]).unwrap();
        let taylor: Vec<Complex64> = (0..=6)
            .scan(1.0, |f, m| {
                if m > 0 {
                    *f *= m as f64;
                }
                Some(c(1.0 / *f, 0.0))
            })
            .collect();
        let t = compose_entire(&taylor, &b, (2, 2), None).unwrap();
        assert!(t.tail_bound > 0.0);
    }

    #[test]
    fn json_roundtrip() {
        let b = Symbol::new_rational(&[
            (-1, BigRational::new(BigInt::from(1), BigInt::from(1))),
            (2, BigRational::new(BigInt::from(-3), BigInt::from(7))),
        ])
        .unwrap();
        let s = b.to_json();
        let b2 = Symbol::from_json(&s).unwrap();
        assert!(b2.is_rational());
        assert_eq!(b2.coeff_exact(2).unwrap(), BigRational::new(BigInt::from(-3), BigInt::from(7)));

        let f = Symbol::from_json(r#"{"coeffs":[{"k":-1,"re":1.0,"im":0.0},{"k":1,"re":2.5}]}"#)
            .unwrap();
        assert_eq!(f.coeff(1), c(2.5, 0.0));
        // duplicate k rejected
        let dup = Symbol::from_json(r#"{"coeffs":[{"k":1,"re":1.0},{"k":1,"re":2.0}]}"#);
        assert!(dup.is_err());
    }
}
