use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::evolve::wavenumbers;
use super::{
    schrodinger_evolve, wigner_transform, PotentialSpec, WavefunctionGrid, WignerError, WignerGrid,
};

/// Highest odd order carried; degree ≤ 6 potentials terminate here.
pub const MAX_ORDER: u32 = 5;

/// One odd-order term of the Wigner–Moyal expansion,
/// `(ħ/2i)^{λ-1}/λ! · ∂^λ_q V · ∂^λ_p ρ_W`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoyalTerm {
    pub order: u32,
    pub field: Vec<f64>,
}

/// Real prefactor `(ħ/2i)^{λ-1} / λ!` for odd λ.
pub fn moyal_coefficient(order: u32, hbar: f64) -> f64 {
    debug_assert!(!order.is_multiple_of(2));
    let half = (order - 1) / 2;
    let sign = if half.is_multiple_of(2) { 1.0 } else { -1.0 };
    let factorial: f64 = (1..=order).map(f64::from).product();
    sign * (0.5 * hbar).powi(order as i32 - 1) / factorial
}

/// Spectral derivative of order `order` along each row of a row-major
/// `rows × cols` array sampled with spacing `h`.
fn spectral_derivative_rows(
    data: &[f64],
    rows: usize,
    cols: usize,
    h: f64,
    order: u32,
) -> Vec<f64> {
    let fft = FftPlanner::new().plan_fft_forward(cols);
    let ifft = FftPlanner::new().plan_fft_inverse(cols);
    let k = wavenumbers(cols, h);
    let mult: Vec<Complex64> = k
        .iter()
        .enumerate()
        .map(|(m, &kv)| {
            if order % 2 == 1 && m == cols / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, kv).powu(order) / cols as f64
            }
        })
        .collect();
    let mut out = vec![0.0; rows * cols];
    out.par_chunks_mut(cols)
        .zip(data.par_chunks(cols))
        .for_each(|(dst, src)| {
            let mut buf: Vec<Complex64> = src.iter().map(|v| Complex64::new(*v, 0.0)).collect();
            fft.process(&mut buf);
            for (b, m) in buf.iter_mut().zip(&mult) {
                *b *= m;
            }
            ifft.process(&mut buf);
            for (d, b) in dst.iter_mut().zip(&buf) {
                *d = b.re;
            }
        });
    out
}

fn transpose(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Odd-order Moyal terms λ = 1, 3, …, `lambda_max`.
pub fn moyal_terms(
    rho: &WignerGrid,
    potential: &PotentialSpec,
    lambda_max: u32,
) -> Result<Vec<MoyalTerm>, WignerError> {
    if !matches!(lambda_max, 1 | 3 | 5) {
        return Err(WignerError::InvalidOrder(lambda_max));
    }
    let mut terms = Vec::new();
    for order in (1..=lambda_max).step_by(2) {
        let dv = potential.derivative(order as usize);
        let field = if dv.degree().is_none() {
            vec![0.0; rho.values.len()]
        } else {
            let coeff = moyal_coefficient(order, rho.hbar);
            let dp = spectral_derivative_rows(&rho.values, rho.n_q, rho.n_p, rho.dp, order);
            let mut f = dp;
            for (iq, row) in f.chunks_mut(rho.n_p).enumerate() {
                let c = coeff * dv.eval(rho.q(iq));
                row.iter_mut().for_each(|v| *v *= c);
            }
            f
        };
        terms.push(MoyalTerm { order, field });
    }
    Ok(terms)
}

/// Kinetic transport term `-(p/m) ∂_q ρ_W`, m = 1.
pub fn transport_term(rho: &WignerGrid) -> Vec<f64> {
    let cols = transpose(&rho.values, rho.n_q, rho.n_p);
    let dq = spectral_derivative_rows(&cols, rho.n_p, rho.n_q, rho.dq, 1);
    let dq = transpose(&dq, rho.n_p, rho.n_q);
    let mut out = dq;
    for row in out.chunks_mut(rho.n_p) {
        for (ip, v) in row.iter_mut().enumerate() {
            *v *= -rho.p(ip);
        }
    }
    out
}

/// `∂_t ρ_W` from the transport term plus every odd Moyal term up to λ = 5.
pub fn wigner_time_derivative(rho: &WignerGrid, potential: &PotentialSpec) -> Vec<f64> {
    let mut total = transport_term(rho);
    for term in moyal_terms(rho, potential, MAX_ORDER).expect("order 5 is valid") {
        for (t, v) in total.iter_mut().zip(&term.field) {
            *t += v;
        }
    }
    total
}

/// `(Σ f² dq dp)^{1/2}`.
pub fn field_norm(rho: &WignerGrid, field: &[f64]) -> f64 {
    (field.iter().map(|v| v * v).sum::<f64>() * rho.dq * rho.dp).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressibilityRow {
    pub t: f64,
    pub lambda1_norm: f64,
    pub lambda3_norm: f64,
    pub lambda5_norm: f64,
    /// `‖λ≥3 contribution‖ / ‖λ=1 contribution‖`.
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressibilityReport {
    pub rows: Vec<CompressibilityRow>,
    pub max_metric: f64,
}

/// Relative size of the quantum (λ ≥ 3) corrections in the term-by-term
/// Wigner flow at one instant. Zero whenever those terms vanish.
pub fn compressibility_row(
    rho: &WignerGrid,
    potential: &PotentialSpec,
    t: f64,
) -> CompressibilityRow {
    let terms = moyal_terms(rho, potential, MAX_ORDER).expect("order 5 is valid");
    let norms: Vec<f64> = terms
        .iter()
        .map(|term| field_norm(rho, &term.field))
        .collect();
    let quantum: Vec<f64> = terms[1]
        .field
        .iter()
        .zip(&terms[2].field)
        .map(|(a, b)| a + b)
        .collect();
    let quantum_norm = field_norm(rho, &quantum);
    let metric = if quantum_norm == 0.0 {
        0.0
    } else {
        quantum_norm / norms[0]
    };
    CompressibilityRow {
        t,
        lambda1_norm: norms[0],
        lambda3_norm: norms[1],
        lambda5_norm: norms[2],
        metric,
    }
}

/// Evolves `psi0` for `total_time` with step `dt` and samples the
/// compressibility metric every `stride` steps (and at the final time).
pub fn wigner_compressibility(
    psi0: &WavefunctionGrid,
    potential: &PotentialSpec,
    total_time: f64,
    dt: f64,
    stride: usize,
) -> Result<CompressibilityReport, WignerError> {
    if !(total_time.is_finite() && total_time >= 0.0) {
        return Err(WignerError::InvalidTimeStep(total_time));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(WignerError::InvalidTimeStep(dt));
    }
    if stride == 0 {
        return Err(WignerError::InvalidGrid("stride must be positive"));
    }
    let total_steps = (total_time / dt - 1e-9).ceil().max(0.0) as usize;
    let step = if total_steps == 0 {
        dt
    } else {
        total_time / total_steps as f64
    };
    let mut psi = psi0.clone();
    let mut rows = vec![compressibility_row(
        &wigner_transform(&psi)?,
        potential,
        0.0,
    )];
    let mut done = 0;
    while done < total_steps {
        let chunk = stride.min(total_steps - done);
        psi = schrodinger_evolve(&psi, potential, step, chunk)?;
        psi.normalize()?;
        done += chunk;
        rows.push(compressibility_row(
            &wigner_transform(&psi)?,
            potential,
            done as f64 * step,
        ));
    }
    let max_metric = rows.iter().map(|r| r.metric).fold(0.0, f64::max);
    Ok(CompressibilityReport { rows, max_metric })
}
