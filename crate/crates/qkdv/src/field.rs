//! Real scalar fields on the periodic grid with a dual spectral view.
//!
//! A [`Field`] holds `n` samples of a real function on the uniform grid over
//! `[0, period)` together with a lazily computed Fourier spectrum. The forward
//! transform is unnormalized (`spectrum[m] = sum_j values[j] exp(-2 pi i j m / n)`),
//! so the Fourier coefficient of the mode `exp(i xi_m x)` is `spectrum[m] / n`
//! with `xi_m = 2 pi s_m / period` and `s_m` the signed mode number.
//!
//! Derivatives are spectral. Products of fields are dealiased by truncating both
//! factors and the result to the retained band (`|s_m| <= fraction * n/2`).
//! Nyquist is dropped from odd derivatives so results stay real.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Minimum grid size; below this dealiasing keeps almost nothing.
pub const MIN_GRID: usize = 16;

/// Canonical dealiasing fraction (the 2/3 rule).
pub const DEALIAS_FRACTION: f64 = 2.0 / 3.0;

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

pub(crate) fn fft_forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let (fwd, _) = plans(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    buf
}

pub(crate) fn fft_inverse_real(spectrum: &[Complex64]) -> Vec<f64> {
    let n = spectrum.len();
    let (_, inv) = plans(n);
    let mut buf = spectrum.to_vec();
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Signed mode number for bin `m` of an `n`-point transform.
#[inline]
pub fn signed_mode(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        if m == n / 2 {
            -((n / 2) as i64)
        } else {
            m as i64
        }
    } else {
        m as i64 - n as i64
    }
}

/// Highest retained signed mode under the given dealias fraction.
#[inline]
pub fn retained_mode(n: usize, fraction: f64) -> i64 {
    ((fraction * (n as f64 / 2.0)).floor() as i64).min(n as i64 / 2 - 1)
}

#[derive(Debug, Clone)]
pub struct Field {
    n: usize,
    period: f64,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Field {
    pub fn from_values(period: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < MIN_GRID || !n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "grid size {n} must be a power of two and at least {MIN_GRID}"
            )));
        }
        if !(period > 0.0) {
            return Err(Error::InvalidConfig(format!("period {period} must be positive")));
        }
        Ok(Self {
            n,
            period,
            values,
            spectrum: OnceLock::new(),
        })
    }

    pub fn from_spectrum(period: f64, spectrum: Vec<Complex64>) -> Result<Self> {
        let values = fft_inverse_real(&spectrum);
        let field = Self::from_values(period, values)?;
        let _ = field.spectrum.set(spectrum);
        Ok(field)
    }

    pub fn from_fn(n: usize, period: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = period / n as f64;
        Self::from_values(period, (0..n).map(|j| f(j as f64 * dx)).collect())
    }

    pub fn zeros(n: usize, period: f64) -> Result<Self> {
        Self::from_values(period, vec![0.0; n])
    }

    pub fn constant(n: usize, period: f64, c: f64) -> Result<Self> {
        Self::from_values(period, vec![c; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.period / self.n as f64;
        (0..self.n).map(|j| j as f64 * dx).collect()
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| fft_forward(&self.values))
    }

    /// Wavenumber of bin `m`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI * signed_mode(m, self.n) as f64 / self.period
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.n != other.n || self.period != other.period {
            return Err(Error::GridMismatch(format!(
                "{}x{} vs {}x{}",
                self.n, self.period, other.n, other.period
            )));
        }
        Ok(())
    }

    /// Spectral derivative of the given order. Nyquist is zeroed for odd orders.
    pub fn derivative(&self, order: usize) -> Field {
        if order == 0 {
            return self.clone();
        }
        let n = self.n;
        let spec = self.spectrum();
        let mut out = Vec::with_capacity(n);
        for (m, &c) in spec.iter().enumerate() {
            let s = signed_mode(m, n);
            if order % 2 == 1 && s == -((n / 2) as i64) {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let ik = Complex64::new(0.0, 2.0 * std::f64::consts::PI * s as f64 / self.period);
            out.push(c * ik.powu(order as u32));
        }
        Field::from_spectrum(self.period, out).expect("derivative preserves grid")
    }

    /// Zero all modes with |s_m| above `fraction * n/2`.
    pub fn low_pass(&self, fraction: f64) -> Field {
        let keep = retained_mode(self.n, fraction);
        let spec = self.spectrum();
        let out: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                if signed_mode(m, self.n).abs() <= keep {
                    c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Field::from_spectrum(self.period, out).expect("low_pass preserves grid")
    }

    /// Multiply a spectrum hook: applies `f(signed_mode, xi)` as a complex factor.
    pub fn multiply_spectrum(&self, f: impl Fn(i64, f64) -> Complex64) -> Field {
        let spec = self.spectrum();
        let out: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                let s = signed_mode(m, self.n);
                c * f(s, 2.0 * std::f64::consts::PI * s as f64 / self.period)
            })
            .collect();
        Field::from_spectrum(self.period, out).expect("multiplier preserves grid")
    }

    /// Pointwise map of the sample values (no dealiasing).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            n: self.n,
            period: self.period,
            values: self.values.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    pub fn zip(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert_eq!(self.n, other.n);
        Field {
            n: self.n,
            period: self.period,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Dealiased pointwise product: both factors and the result are truncated
    /// to the retained band.
    pub fn mul_dealiased(&self, other: &Field, fraction: f64) -> Field {
        let a = self.low_pass(fraction);
        let b = other.low_pass(fraction);
        a.zip(&b, |x, y| x * y).low_pass(fraction)
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// L^2 norm over the torus, computed by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let n2 = (self.n as f64) * (self.n as f64);
        let sum: f64 = self.spectrum().iter().map(|c| c.norm_sqr()).sum();
        (self.period * sum / n2).sqrt()
    }

    /// Squared seminorm `|| d^k v ||_{L^2}^2`.
    pub fn seminorm_sq(&self, k: usize) -> f64 {
        let n2 = (self.n as f64) * (self.n as f64);
        let mut sum = 0.0;
        for (m, c) in self.spectrum().iter().enumerate() {
            let xi = self.wavenumber(m);
            sum += xi.powi(2 * k as i32) * c.norm_sqr();
        }
        self.period * sum / n2
    }

    /// Full Sobolev norm `||v||_{H^s} = (sum_{k<=s} ||d^k v||^2)^{1/2}`.
    pub fn sobolev_norm(&self, s: usize) -> f64 {
        (0..=s).map(|k| self.seminorm_sq(k)).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }

    /// `W^{s,inf}` norm: max over derivative orders `0..=s` of the sup norm.
    pub fn w_sup_norm(&self, s: usize) -> f64 {
        (0..=s)
            .map(|k| self.derivative(k).sup_norm())
            .fold(0.0_f64, f64::max)
    }

    /// Relative spectral tail level in the top fifth of the 2/3 band.
    pub fn tail_level(&self) -> f64 {
        let keep = retained_mode(self.n, DEALIAS_FRACTION);
        let lo = ((0.8 * keep as f64).ceil() as i64).max(1);
        let spec = self.spectrum();
        let mut peak = 0.0_f64;
        let mut tail = 0.0_f64;
        for (m, c) in spec.iter().enumerate() {
            let s = signed_mode(m, self.n).abs();
            let mag = c.norm();
            peak = peak.max(mag);
            if s >= lo && s <= keep {
                tail = tail.max(mag);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }

    /// Resolution gate used before repeated spectral differentiation.
    pub fn ensure_resolved(&self, tol: f64) -> Result<()> {
        let level = self.tail_level();
        if level > tol {
            let keep = retained_mode(self.n, DEALIAS_FRACTION);
            let peak = self
                .spectrum()
                .iter()
                .fold(0.0_f64, |acc, c| acc.max(c.norm()));
            let _ = keep;
            return Err(Error::UnresolvedField {
                tail: level * peak,
                peak,
                tol,
            });
        }
        Ok(())
    }

    /// Exact bit-level equality of sample values.
    pub fn bit_identical(&self, other: &Field) -> bool {
        self.n == other.n
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Field::from_values(1.0, vec![0.0; 8]).is_err());
        assert!(Field::from_values(1.0, vec![0.0; 24]).is_err());
        assert!(Field::from_values(-1.0, vec![0.0; 16]).is_err());
    }

    #[test]
    fn derivative_of_single_mode() {
        let period = 5.0;
        let xi = 2.0 * std::f64::consts::PI * 3.0 / period;
        let v = Field::from_fn(64, period, |x| (xi * x).sin()).unwrap();
        let d = v.derivative(1);
        let expect = Field::from_fn(64, period, |x| xi * (xi * x).cos()).unwrap();
        let err = d.sub(&expect).sup_norm();
        assert!(err < 1e-11, "err = {err}");
    }

    #[test]
    fn parseval_l2() {
        let v = Field::from_fn(128, 2.0, |x| (std::f64::consts::PI * x).cos()).unwrap();
        // ||cos||_{L^2([0,2))}^2 = 1
        assert!((v.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_level_flags_noise() {
        let n = 64;
        let mut vals = vec![0.0; n];
        for (j, v) in vals.iter_mut().enumerate() {
            let x = j as f64 / n as f64;
            *v = (2.0 * std::f64::consts::PI * x).sin();
        }
        let clean = Field::from_values(1.0, vals.clone()).unwrap();
        assert!(clean.ensure_resolved(1e-10).is_ok());
        for (j, v) in vals.iter_mut().enumerate() {
            // inject content at the top of the retained band
            let x = j as f64 / n as f64;
            *v += 1e-3 * (2.0 * std::f64::consts::PI * 20.0 * x).cos();
        }
        let dirty = Field::from_values(1.0, vals).unwrap();
        assert!(dirty.ensure_resolved(1e-10).is_err());
    }

    #[test]
    fn zero_field_is_resolved() {
        let z = Field::zeros(32, 1.0).unwrap();
        assert!(z.ensure_resolved(1e-10).is_ok());
    }

    proptest! {
        #[test]
        fn spectrum_roundtrip(vals in proptest::collection::vec(-10.0f64..10.0, 64)) {
            let v = Field::from_values(4.0, vals).unwrap();
            let back = fft_inverse_real(v.spectrum());
            let scale = 1.0 + v.sup_norm();
            for (a, b) in v.values().iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn dealiased_product_of_low_modes_is_exact(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let period = 3.0;
            let u = Field::from_fn(64, period, |x| a * (2.0 * std::f64::consts::PI * x / period).cos()).unwrap();
            let w = Field::from_fn(64, period, |x| b * (2.0 * std::f64::consts::PI * 2.0 * x / period).sin()).unwrap();
            let exact = u.zip(&w, |p, q| p * q);
            let dealiased = u.mul_dealiased(&w, DEALIAS_FRACTION);
            prop_assert!(exact.sub(&dealiased).sup_norm() < 1e-12);
        }
    }
}
