//! One-dimensional adaptive quadrature.

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Iterated adaptive Simpson over a 3D box.
pub fn adaptive_simpson_3d<F: Fn(f64, f64, f64) -> f64>(
    f: &F,
    x: (f64, f64),
    y: (f64, f64),
    z: (f64, f64),
    tol: f64,
) -> f64 {
    let inner_tol = tol / ((x.1 - x.0).abs().max(1.0) * (y.1 - y.0).abs().max(1.0));
    let mid_tol = tol / (x.1 - x.0).abs().max(1.0);
    adaptive_simpson(
        &|xv| {
            adaptive_simpson(
                &|yv| adaptive_simpson(&|zv| f(xv, yv, zv), z.0, z.1, inner_tol),
                y.0,
                y.1,
                mid_tol,
            )
        },
        x.0,
        x.1,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_sine_over_half_period() {
        let v = adaptive_simpson(&f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(&|x: f64| x * x, 1.0, 1.0, 1e-9), 0.0);
    }

    #[test]
    fn box_volume() {
        let v = adaptive_simpson_3d(&|_, _, _| 1.0, (0.0, 2.0), (0.0, 3.0), (-1.0, 1.0), 1e-10);
        assert!((v - 12.0).abs() < 1e-9);
    }
}
