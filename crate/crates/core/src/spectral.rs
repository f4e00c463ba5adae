//! Fourier-collocation calculus on the periodic grid.
//!
//! First derivatives use the symbol `i k` with the Nyquist bin zeroed, so the
//! discrete derivative matrix is real and exactly skew-symmetric. Second
//! derivatives use `-k²` on every bin including Nyquist.

use num_complex::Complex64;

use crate::error::{IkError, Result};
use crate::field::Field;

/// Derivative of order 1 or 2 along `axis` of the trigonometric interpolant.
pub fn spectral_derivative(f: &Field, axis: usize, order: u32) -> Result<Field> {
    f.check_finite()?;
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(IkError::InvalidDomain(format!(
            "axis {axis} out of range for a {}D grid",
            grid.dim()
        )));
    }
    match order {
        1 => Ok(derivative(f, axis)),
        2 => {
            let mut spec = grid.forward(f.values());
            let k = grid.axis_wavenumbers(axis).to_vec();
            for (idx, c) in spec.iter_mut().enumerate() {
                let m = grid.unravel(idx);
                *c *= -k[m[axis]] * k[m[axis]];
            }
            Ok(Field::from_raw(grid, grid.inverse_real(spec)))
        }
        _ => Err(IkError::InvalidConfig(format!(
            "derivative order must be 1 or 2, got {order}"
        ))),
    }
}

/// First derivative along `axis` (no finiteness check).
pub fn derivative(f: &Field, axis: usize) -> Field {
    let grid = f.grid();
    let spec = grid.forward(f.values());
    apply_derivative(f, spec, axis)
}

fn apply_derivative(f: &Field, mut spec: Vec<Complex64>, axis: usize) -> Field {
    let grid = f.grid();
    for (k, c) in spec.iter_mut().enumerate() {
        *c *= Complex64::new(0.0, grid.derivative_symbol(axis, k));
    }
    Field::from_raw(grid, grid.inverse_real(spec))
}

/// `∇f` as one field per axis, sharing a single forward transform.
pub fn gradient(f: &Field) -> Vec<Field> {
    let grid = f.grid();
    let spec = grid.forward(f.values());
    (0..grid.dim())
        .map(|a| apply_derivative(f, spec.clone(), a))
        .collect()
}

/// `∇·v` for a vector field given one component per axis.
pub fn divergence(v: &[Field]) -> Field {
    let grid = v[0].grid();
    assert_eq!(v.len(), grid.dim(), "vector field has wrong arity");
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (a, comp) in v.iter().enumerate() {
        let spec = grid.forward(comp.values());
        for (k, (s, c)) in acc.iter_mut().zip(spec).enumerate() {
            *s += c * Complex64::new(0.0, grid.derivative_symbol(a, k));
        }
    }
    Field::from_raw(grid, grid.inverse_real(acc))
}

/// `Δf` with the exact second-derivative symbol `-|k|²`.
pub fn laplacian(f: &Field) -> Field {
    let grid = f.grid();
    let mut spec = grid.forward(f.values());
    for (k, c) in spec.iter_mut().enumerate() {
        *c *= -grid.wavenumber_sq(k);
    }
    Field::from_raw(grid, grid.inverse_real(spec))
}

/// Largest mode index (per axis) kept by the 2/3 rule.
pub fn dealias_cutoff(n: usize) -> i64 {
    (n / 3) as i64
}

/// Zeroes every Fourier mode whose index along any axis exceeds 2/3 of Nyquist.
pub fn dealias(f: &Field) -> Field {
    let grid = f.grid();
    let mut spec = grid.forward(f.values());
    let cut: Vec<i64> = grid
        .domain()
        .resolution
        .iter()
        .map(|&n| dealias_cutoff(n))
        .collect();
    for (k, c) in spec.iter_mut().enumerate() {
        let m = grid.mode_of(k);
        if (0..grid.dim()).any(|a| m[a].abs() > cut[a]) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Field::from_raw(grid, grid.inverse_real(spec))
}

/// Grid mean of `f·g` evaluated in spectral space (Parseval).
pub fn spectral_mean_product(f: &Field, g: &Field) -> f64 {
    let grid = f.grid();
    let a = grid.forward(f.values());
    let b = grid.forward(g.values());
    let n = grid.len() as f64;
    a.iter().zip(&b).map(|(x, y)| (x * y.conj()).re).sum::<f64>() / (n * n)
}

/// Vector dot product `a·b` of two gradient-like field lists.
pub fn dot(a: &[Field], b: &[Field]) -> Field {
    let mut out = &a[0] * &b[0];
    for (x, y) in a.iter().zip(b).skip(1) {
        out += &(x * y);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, PeriodicDomain};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn line(n: usize, l: f64) -> Arc<Grid> {
        Grid::new(PeriodicDomain::line(l, n).unwrap()).unwrap()
    }

    #[test]
    fn cosine_first_and_second_derivative() {
        let g = line(64, 2.0 * PI);
        let k = 3.0;
        let f = Field::from_fn(&g, |x, _| (k * x).cos());
        let d1 = spectral_derivative(&f, 0, 1).unwrap();
        let d2 = spectral_derivative(&f, 0, 2).unwrap();
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert!((d1.values()[i] + k * (k * x).sin()).abs() < 1e-12);
            assert!((d2.values()[i] + k * k * (k * x).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = line(32, 5.0);
        let f = Field::constant(&g, 7.25);
        for order in [1, 2] {
            let d = spectral_derivative(&f, 0, order).unwrap();
            assert!(d.max_abs() < 1e-13);
        }
    }

    #[test]
    fn first_derivative_has_zero_mean() {
        let g = line(32, 3.0);
        let f = Field::from_fn(&g, |x, _| (x * 1.7).sin().exp());
        assert!(derivative(&f, 0).mean().abs() < 1e-14);
    }

    #[test]
    fn non_finite_input_rejected() {
        let g = line(16, 1.0);
        let mut f = Field::zeros(&g);
        f.values_mut()[2] = f64::INFINITY;
        assert!(matches!(
            spectral_derivative(&f, 0, 1),
            Err(IkError::NonFiniteField)
        ));
        assert!(spectral_derivative(&Field::zeros(&g), 0, 3).is_err());
    }

    #[test]
    fn nyquist_mode_is_dealiased_away() {
        let g = line(32, 1.0);
        let f = Field::from_fn(&g, |x, _| (PI * 32.0 * x).cos());
        assert!(f.max_abs() > 0.99);
        assert!(dealias(&f).max_abs() < 1e-14);
    }

    #[test]
    fn band_limited_field_survives_dealiasing() {
        let g = line(48, 2.0 * PI);
        let f = Field::from_fn(&g, |x, _| (16.0 * x).sin() + 0.5 * (3.0 * x).cos());
        let d = dealias(&f);
        assert!((&d - &f).max_abs() < 1e-13);
        let h = Field::from_fn(&g, |x, _| (17.0 * x).sin());
        assert!(dealias(&h).max_abs() < 1e-13);
    }

    #[test]
    fn two_d_gradient_and_laplacian() {
        let g = Grid::new(PeriodicDomain::plane(2.0 * PI, 4.0 * PI, 16, 32).unwrap()).unwrap();
        let f = Field::from_fn(&g, |x, y| (2.0 * x).sin() * (1.5 * y).cos());
        let grad = gradient(&f);
        let lap = laplacian(&f);
        let div = divergence(&grad);
        for i in 0..g.len() {
            let [x, y] = g.point(i);
            assert!((grad[0].values()[i] - 2.0 * (2.0 * x).cos() * (1.5 * y).cos()).abs() < 1e-12);
            assert!((grad[1].values()[i] + 1.5 * (2.0 * x).sin() * (1.5 * y).sin()).abs() < 1e-12);
            assert!((lap.values()[i] + 6.25 * f.values()[i]).abs() < 1e-11);
            assert!((div.values()[i] - lap.values()[i]).abs() < 1e-11);
        }
    }
}
