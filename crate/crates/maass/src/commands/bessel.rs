use std::io::Write;

use anyhow::Result;
use maass_core::hejhal::BESSEL_RELATIVE_TARGET;
use maass_core::number_theory::eisenstein_coeffs;
use maass_core::special_functions::BesselEvaluator;

use super::{CoefficientFile, Kind};
use crate::cli::{BesselArgs, EisensteinArgs};
use crate::format::{csv, f17, to_json};
use crate::io::write_output;
use crate::{Outcome, UsageError};

/// `x,value,regime,est_error` at `n_points` equally spaced `x`.
pub fn bessel_csv(r: f64, x_min: f64, x_max: f64, n_points: usize) -> Result<String> {
    if !(r.is_finite() && x_min > 0.0 && x_max >= x_min && x_max.is_finite()) || n_points == 0 {
        return Err(UsageError(format!(
            "need finite r, 0 < x_min ≤ x_max and n_points ≥ 1, got r={r}, x=[{x_min}, {x_max}], n_points={n_points}"
        ))
        .into());
    }
    let ev = BesselEvaluator::default();
    let target = BESSEL_RELATIVE_TARGET * ev.peak(r);
    let mut rows = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let x = if n_points == 1 { x_min } else { x_min + (x_max - x_min) * i as f64 / (n_points - 1) as f64 };
        let b = ev.k_scaled(r, x, target)?;
        rows.push(vec![f17(x), f17(b.value), b.regime.to_string(), f17(b.est_error)]);
    }
    Ok(csv(&["x", "value", "regime", "est_error"], rows))
}

fn emit(bytes: &[u8], output: Option<&std::path::Path>, overwrite: bool) -> Result<()> {
    match output {
        Some(p) => write_output(p, bytes, overwrite).map(|_| ()),
        None => Ok(std::io::stdout().lock().write_all(bytes)?),
    }
}

pub fn run(a: &BesselArgs) -> Result<Outcome> {
    let text = bessel_csv(a.r, a.x_min, a.x_max, a.n_points)?;
    emit(text.as_bytes(), a.output.as_deref(), a.overwrite)?;
    Ok(Outcome::Success)
}

pub fn eisenstein(a: &EisensteinArgs) -> Result<Outcome> {
    if !(a.r.is_finite() && a.r >= 0.0) || a.n_max == 0 {
        return Err(UsageError(format!("need r ≥ 0 and n_max ≥ 1, got r={}, n_max={}", a.r, a.n_max)).into());
    }
    let c = eisenstein_coeffs(a.r, a.n_max)?;
    let file = CoefficientFile { kind: Kind::Eisenstein, r: a.r, symmetry: c.symmetry, coefficients: c.a };
    emit(&to_json(&file)?, a.output.as_deref(), a.overwrite)?;
    Ok(Outcome::Success)
}
