//! Central finite-difference Jacobians.

use std::f64::consts::PI;

/// Central-difference Jacobian `J[i][j] = d f_i / d x_j` of `f` at `x`.
///
/// Output components flagged in `periodic` are treated as angles: their
/// differences are wrapped to `(-pi, pi]` before dividing by the step.
pub fn central_jacobian<F>(f: F, x: &[f64], step: f64, periodic: &[bool]) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut columns = Vec::with_capacity(n);
    let mut probe = x.to_vec();
    for j in 0..n {
        probe[j] = x[j] + step;
        let plus = f(&probe);
        probe[j] = x[j] - step;
        let minus = f(&probe);
        probe[j] = x[j];
        let col: Vec<f64> = plus
            .iter()
            .zip(&minus)
            .enumerate()
            .map(|(i, (p, m))| {
                let mut d = p - m;
                if periodic.get(i).copied().unwrap_or(false) {
                    d = wrap_difference(d);
                }
                d / (2.0 * step)
            })
            .collect();
        columns.push(col);
    }
    let m = columns.first().map_or(0, Vec::len);
    (0..m)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect()
}

/// Wraps an angle difference to `(-pi, pi]`.
pub fn wrap_difference(d: f64) -> f64 {
    let mut w = d.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

pub fn det2(m: &[Vec<f64>]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn det3(m: &[Vec<f64>]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
