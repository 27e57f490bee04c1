//! Least-squares fit of the small-noise expansion `E(λ) = Σ a_k λ^k`.

use nalgebra::{DMatrix, DVector};

use crate::error::{QemError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionDiagnostics {
    /// `â_0, …, â_order`.
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

pub fn fit_expansion(lambdas: &[f64], values: &[f64], order: usize) -> Result<ExpansionDiagnostics> {
    if lambdas.len() != values.len() {
        return Err(QemError::DimensionMismatch { expected: lambdas.len(), found: values.len() });
    }
    if lambdas.len() < order + 1 {
        return Err(QemError::InvalidArgument(format!(
            "{} points cannot determine {} coefficients",
            lambdas.len(),
            order + 1
        )));
    }
    // Columns are rescaled by the largest |λ|^k so tiny rates stay well conditioned.
    let scale = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(lambdas.len(), order + 1, |i, k| (lambdas[i] / scale).powi(k as i32));
    let b = DVector::from_column_slice(values);
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-13)
        .map_err(|e| QemError::IllConditioned(format!("expansion fit failed: {e}")))?;
    let resid = &a * &x - &b;
    let coefficients = x.iter().enumerate().map(|(k, c)| c / scale.powi(k as i32)).collect();
    Ok(ExpansionDiagnostics { coefficients, rms_residual: (resid.norm_squared() / lambdas.len() as f64).sqrt() })
}
