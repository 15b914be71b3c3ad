use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{WavefunctionGrid, WignerError, WignerGrid};

/// Largest |ψ| tolerated at the grid edges.
const EDGE_AMPLITUDE: f64 = 1e-6;
/// Largest fraction of |ψ̃|² tolerated outside the Wigner momentum window.
const SPECTRAL_LEAK: f64 = 1e-12;
/// Largest imaginary residue tolerated in the transform.
const IMAG_TOL: f64 = 1e-10;

/// Wigner function on the grid q_j × p_m with
///
/// ```text
///     ρ_W(q_j, p_m) = dq/(πħ) Σ_k ψ(q_j + k dq) ψ*(q_j - k dq) e^{-2πi m k / n}
/// ```
///
/// i.e. the half-offset integral sampled at integer shifts. The momentum
/// spacing is `πħ / (n dq)` and the window is `[-πħ/2dq, πħ/2dq)`.
pub fn wigner_transform(psi: &WavefunctionGrid) -> Result<WignerGrid, WignerError> {
    psi.check_normalized()?;
    check_support(psi)?;
    let n = psi.len();
    let half = n as isize / 2;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = psi.dq / (std::f64::consts::PI * psi.hbar);
    let rows: Vec<Result<Vec<f64>, WignerError>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for k in -half..half {
                let (plus, minus) = (j as isize + k, j as isize - k);
                if plus < 0 || minus < 0 || plus >= n as isize || minus >= n as isize {
                    continue;
                }
                buf[k.rem_euclid(n as isize) as usize] =
                    psi.values[plus as usize] * psi.values[minus as usize].conj();
            }
            fft.process(&mut buf);
            let mut row = vec![0.0; n];
            for (m, v) in buf.iter().enumerate() {
                if v.im.abs() * scale > IMAG_TOL {
                    return Err(WignerError::ImaginaryResidue(v.im * scale));
                }
                // FFT bin m holds momentum index m for m < n/2 and m - n above
                row[(m + n / 2) % n] = v.re * scale;
            }
            Ok(row)
        })
        .collect();
    let mut values = Vec::with_capacity(n * n);
    for row in rows {
        values.extend(row?);
    }
    let dp = psi.wigner_dp();
    Ok(WignerGrid {
        q_min: psi.q_min,
        dq: psi.dq,
        p_min: -((n / 2) as f64) * dp,
        dp,
        n_q: n,
        n_p: n,
        hbar: psi.hbar,
        values,
    })
}

/// Rejects states that touch the box edges or carry momentum outside the
/// window resolved by the integer-shift transform.
fn check_support(psi: &WavefunctionGrid) -> Result<(), WignerError> {
    let n = psi.len();
    let edge = psi.values[..4]
        .iter()
        .chain(&psi.values[n - 4..])
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if edge > EDGE_AMPLITUDE {
        return Err(WignerError::GridTooCoarse(
            "wavefunction reaches the box edge",
        ));
    }
    let mut spec = psi.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut spec);
    let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
    let outside: f64 = spec[n / 4..3 * n / 4].iter().map(|v| v.norm_sqr()).sum();
    if outside > SPECTRAL_LEAK * total {
        return Err(WignerError::GridTooCoarse(
            "momentum content aliases in the Wigner window",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ground_state_peak() {
        let psi = WavefunctionGrid::harmonic_eigenstate(0, 1.0).unwrap();
        let w = wigner_transform(&psi).unwrap();
        assert!((w.value_at(0.0, 0.0) - 1.0 / PI).abs() < 1e-3);
    }

    #[test]
    fn rejects_unnormalized_and_edge_states() {
        let mut psi = WavefunctionGrid::harmonic_eigenstate(0, 1.0).unwrap();
        psi.values[200] *= 2.0;
        assert!(matches!(
            wigner_transform(&psi),
            Err(WignerError::NotNormalized(_))
        ));

        let wide = WavefunctionGrid::gaussian(0.0, 0.0, 6.0, 1.0).unwrap();
        assert!(matches!(
            wigner_transform(&wide),
            Err(WignerError::GridTooCoarse(_))
        ));

        let fast = WavefunctionGrid::gaussian(0.0, 40.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            wigner_transform(&fast),
            Err(WignerError::GridTooCoarse(_))
        ));
    }
}
