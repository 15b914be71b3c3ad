use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{PotentialSpec, WavefunctionGrid, WignerError};

/// Largest `dt · max|V| / ħ` accepted by the split-step solver.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Angular wavenumbers of the FFT bins for `n` points spaced `dq`.
pub(crate) fn wavenumbers(n: usize, dq: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / (n as f64 * dq);
    (0..n)
        .map(|m| {
            let signed = if m < n / 2 {
                m as isize
            } else {
                m as isize - n as isize
            };
            signed as f64 * base
        })
        .collect()
}

/// Strang split-step evolution of `iħ ∂_t ψ = (-ħ²/2 ∂²_q + V) ψ`, m = 1.
pub fn schrodinger_evolve(
    psi: &WavefunctionGrid,
    potential: &PotentialSpec,
    dt: f64,
    steps: usize,
) -> Result<WavefunctionGrid, WignerError> {
    if steps == 0 {
        return Ok(psi.clone());
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(WignerError::InvalidTimeStep(dt));
    }
    let n = psi.len();
    let hbar = psi.hbar;
    let v: Vec<f64> = (0..n).map(|j| potential.eval(psi.q(j))).collect();
    let v_max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if dt * v_max / hbar >= STABILITY_LIMIT {
        return Err(WignerError::StabilityViolation {
            dt,
            v_max,
            limit: STABILITY_LIMIT,
        });
    }
    let half_kick: Vec<Complex64> = v
        .iter()
        .map(|x| Complex64::from_polar(1.0, -0.5 * x * dt / hbar))
        .collect();
    let full_kick: Vec<Complex64> = half_kick.iter().map(|z| z * z).collect();
    let inv_n = 1.0 / n as f64;
    let drift: Vec<Complex64> = wavenumbers(n, psi.dq)
        .iter()
        .map(|k| Complex64::from_polar(inv_n, -0.5 * hbar * k * k * dt))
        .collect();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut scratch = vec![
        Complex64::new(0.0, 0.0);
        forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len())
    ];

    let mut out = psi.clone();
    let buf = &mut out.values;
    for (x, k) in buf.iter_mut().zip(&half_kick) {
        *x *= k;
    }
    for s in 0..steps {
        forward.process_with_scratch(buf, &mut scratch);
        for (x, d) in buf.iter_mut().zip(&drift) {
            *x *= d;
        }
        inverse.process_with_scratch(buf, &mut scratch);
        let kick = if s + 1 == steps {
            &half_kick
        } else {
            &full_kick
        };
        for (x, k) in buf.iter_mut().zip(kick) {
            *x *= k;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_is_identity() {
        let psi = WavefunctionGrid::coherent(1.0, 0.5, 1.0).unwrap();
        let out = schrodinger_evolve(&psi, &PotentialSpec::quartic(1.0, 0.4), 1.0, 0).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn stability_violation() {
        let psi = WavefunctionGrid::coherent(1.0, 0.5, 1.0).unwrap();
        // max V on [-12, 12) is 72 for the unit oscillator
        let err = schrodinger_evolve(&psi, &PotentialSpec::harmonic(1.0), 2e-3, 10).unwrap_err();
        assert!(matches!(err, WignerError::StabilityViolation { .. }));
    }

    #[test]
    fn norm_is_preserved() {
        let psi = WavefunctionGrid::coherent(2.0, 0.0, 1.0).unwrap();
        let out = schrodinger_evolve(&psi, &PotentialSpec::quartic(1.0, 0.4), 4e-5, 2000).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
