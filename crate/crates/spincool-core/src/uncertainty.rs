//! First-order propagation of independent input uncertainties.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Central-difference step for input `x`.
pub fn fd_step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-9)
}

/// `Δf = sqrt(Σᵢ (∂f/∂xᵢ · Δxᵢ)²)` with central finite-difference partials.
pub fn propagate_error<F>(f: F, values: &[f64], deltas: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let out = propagate_errors(|x| vec![f(x)], values, deltas)?;
    Ok(out[0])
}

/// Vector-valued version of [`propagate_error`]: one combined uncertainty per output.
pub fn propagate_errors<F>(f: F, values: &[f64], deltas: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if values.len() != deltas.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} values but {} deltas",
            values.len(),
            deltas.len()
        )));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0)) {
        return Err(Error::InvalidParameter(alloc::format!("negative delta {d}")));
    }
    let center = f(values);
    if let Some(index) = center.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut sq = vec![0.0; center.len()];
    let mut x: Vec<f64> = values.to_vec();
    for i in 0..values.len() {
        if deltas[i] == 0.0 {
            continue;
        }
        let h = fd_step(values[i]);
        x[i] = values[i] + h;
        let plus = f(&x);
        x[i] = values[i] - h;
        let minus = f(&x);
        x[i] = values[i];
        for (k, acc) in sq.iter_mut().enumerate() {
            let d = (plus[k] - minus[k]) / (2.0 * h);
            if !d.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            *acc += (d * deltas[i]) * (d * deltas[i]);
        }
    }
    Ok(sq.into_iter().map(libm::sqrt).collect())
}
