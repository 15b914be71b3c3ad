use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::WignerError;

/// Default grid: 512 points on [-12, 12).
pub const DEFAULT_POINTS: usize = 512;
pub const DEFAULT_Q_MIN: f64 = -12.0;
pub const DEFAULT_Q_MAX: f64 = 12.0;
/// Minimum grid size.
pub const MIN_POINTS: usize = 128;
/// Tolerance on `Σ|ψ|² dq = 1`.
pub const NORM_TOL: f64 = 1e-10;

/// Wavefunction sampled on a uniform q grid. Mass is 1 throughout the module.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub q_min: f64,
    pub dq: f64,
    pub hbar: f64,
    pub values: Vec<Complex64>,
}

impl WavefunctionGrid {
    pub fn new(
        q_min: f64,
        dq: f64,
        hbar: f64,
        values: Vec<Complex64>,
    ) -> Result<Self, WignerError> {
        let n = values.len();
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(WignerError::InvalidGrid(
                "point count must be a power of two ≥ 128",
            ));
        }
        if !(dq.is_finite() && dq > 0.0 && q_min.is_finite()) {
            return Err(WignerError::InvalidGrid(
                "dq must be positive and q_min finite",
            ));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(WignerError::InvalidGrid("ħ must be positive"));
        }
        Ok(Self {
            q_min,
            dq,
            hbar,
            values,
        })
    }

    /// Samples `f` on `n` points of `[q_min, q_max)` and normalizes.
    pub fn from_fn<F: Fn(f64) -> Complex64>(
        q_min: f64,
        q_max: f64,
        n: usize,
        hbar: f64,
        f: F,
    ) -> Result<Self, WignerError> {
        let dq = (q_max - q_min) / n as f64;
        let values = (0..n).map(|j| f(q_min + j as f64 * dq)).collect();
        let mut grid = Self::new(q_min, dq, hbar, values)?;
        grid.normalize()?;
        Ok(grid)
    }

    /// Gaussian wavepacket centred at (q0, p0) with position spread `sigma`
    /// (standard deviation of |ψ|²), on the default grid.
    pub fn gaussian(q0: f64, p0: f64, sigma: f64, hbar: f64) -> Result<Self, WignerError> {
        Self::from_fn(DEFAULT_Q_MIN, DEFAULT_Q_MAX, DEFAULT_POINTS, hbar, |q| {
            let env = (-(q - q0).powi(2) / (4.0 * sigma * sigma)).exp();
            Complex64::from_polar(env, p0 * q / hbar)
        })
    }

    /// Coherent state of the unit harmonic oscillator (m = ω = 1).
    pub fn coherent(q0: f64, p0: f64, hbar: f64) -> Result<Self, WignerError> {
        Self::gaussian(q0, p0, (0.5 * hbar).sqrt(), hbar)
    }

    /// Ground (`level = 0`) or first excited (`level = 1`) state of the
    /// unit harmonic oscillator, on the default grid.
    pub fn harmonic_eigenstate(level: u32, hbar: f64) -> Result<Self, WignerError> {
        if level > 1 {
            return Err(WignerError::InvalidGrid(
                "only levels 0 and 1 are tabulated",
            ));
        }
        Self::from_fn(DEFAULT_Q_MIN, DEFAULT_Q_MAX, DEFAULT_POINTS, hbar, |q| {
            let g = (-q * q / (2.0 * hbar)).exp();
            Complex64::new(if level == 0 { g } else { q * g }, 0.0)
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn q(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(Complex64::norm_sqr).sum::<f64>() * self.dq
    }

    pub fn check_normalized(&self) -> Result<(), WignerError> {
        let norm = self.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(WignerError::NotNormalized(norm));
        }
        Ok(())
    }

    pub fn normalize(&mut self) -> Result<(), WignerError> {
        let norm = self.norm_sqr();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(WignerError::NotNormalized(norm));
        }
        let s = norm.sqrt().recip();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        let overlap: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.dq;
        overlap.norm_sqr()
    }

    /// Variance of |ψ|² in q.
    pub fn position_variance(&self) -> f64 {
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            let q = self.q(j);
            m0 += w;
            m1 += w * q;
            m2 += w * q * q;
        }
        let mean = m1 / m0;
        m2 / m0 - mean * mean
    }

    /// Spacing of the momentum axis of the Wigner grid built from this state.
    pub fn wigner_dp(&self) -> f64 {
        PI * self.hbar / (self.len() as f64 * self.dq)
    }
}

/// Wigner quasiprobability on a (q, p) grid, row-major in q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub q_min: f64,
    pub dq: f64,
    pub p_min: f64,
    pub dp: f64,
    pub n_q: usize,
    pub n_p: usize,
    pub hbar: f64,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, iq: usize, ip: usize) -> f64 {
        self.values[iq * self.n_p + ip]
    }

    pub fn q(&self, iq: usize) -> f64 {
        self.q_min + iq as f64 * self.dq
    }

    pub fn p(&self, ip: usize) -> f64 {
        self.p_min + ip as f64 * self.dp
    }

    /// Nearest grid indices to (q, p).
    pub fn index_of(&self, q: f64, p: f64) -> (usize, usize) {
        let iq = ((q - self.q_min) / self.dq)
            .round()
            .clamp(0.0, (self.n_q - 1) as f64);
        let ip = ((p - self.p_min) / self.dp)
            .round()
            .clamp(0.0, (self.n_p - 1) as f64);
        (iq as usize, ip as usize)
    }

    pub fn value_at(&self, q: f64, p: f64) -> f64 {
        let (iq, ip) = self.index_of(q, p);
        self.at(iq, ip)
    }

    /// `Σ ρ_W dq dp`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dq * self.dp
    }

    /// `Σ_p ρ_W dp` per q point.
    pub fn q_marginal(&self) -> Vec<f64> {
        self.values
            .chunks(self.n_p)
            .map(|row| row.iter().sum::<f64>() * self.dp)
            .collect()
    }

    /// `Σ_q ρ_W dq` per p point.
    pub fn p_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_p];
        for row in self.values.chunks(self.n_p) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v * self.dq;
            }
        }
        out
    }

    /// Same values with a different ħ; the axes are unchanged.
    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self {
            hbar,
            ..self.clone()
        }
    }
}

/// Polynomial potential `V(q) = Σ c_k q^k`, degree ≤ 6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub coeffs: [f64; 7],
}

impl PotentialSpec {
    pub fn new(coeffs: &[f64]) -> Result<Self, WignerError> {
        if coeffs.len() > 7 {
            return Err(WignerError::InvalidPotential("degree above 6"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(WignerError::InvalidPotential("non-finite coefficient"));
        }
        let mut c = [0.0; 7];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { coeffs: c })
    }

    pub fn free() -> Self {
        Self { coeffs: [0.0; 7] }
    }

    /// `k q² / 2`.
    pub fn harmonic(k: f64) -> Self {
        let mut coeffs = [0.0; 7];
        coeffs[2] = 0.5 * k;
        Self { coeffs }
    }

    /// `k2 q²/2 + k4 q⁴/4`.
    pub fn quartic(k2: f64, k4: f64) -> Self {
        let mut coeffs = [0.0; 7];
        coeffs[2] = 0.5 * k2;
        coeffs[4] = 0.25 * k4;
        Self { coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != 0.0)
    }

    /// Coefficients of the `order`-th derivative.
    pub fn derivative(&self, order: usize) -> Self {
        let mut out = [0.0; 7];
        for k in order..7 {
            let falling: f64 = (k - order + 1..=k).map(|v| v as f64).product();
            out[k - order] = self.coeffs[k] * falling;
        }
        Self { coeffs: out }
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    pub fn eval_derivative(&self, order: usize, q: f64) -> f64 {
        self.derivative(order).eval(q)
    }
}
