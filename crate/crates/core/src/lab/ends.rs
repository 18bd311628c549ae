//! Bottom of the essential spectrum from truncated ends.

use rayon::prelude::*;
use serde::Serialize;

use crate::spectral::{lambda0, mass_in};
use crate::surface::{ExhaustionFamily, Subsurface};

use super::LabError;

/// First Dirichlet eigenvalues of the end complements `S ∖ K_i`, truncated at
/// two far radii and extrapolated in the truncation length.
#[derive(Debug, Clone, Serialize)]
pub struct EssSpecEstimate {
    pub levels: Vec<f64>,
    /// Outer and inner far radius.
    pub far_radii: [f64; 2],
    /// `λ₀` of `{r_i ≤ r ≤ R}` for the outer far radius `R`.
    pub values: Vec<f64>,
    /// The same for the inner far radius.
    pub values_near: Vec<f64>,
    /// Per level, the limit `R → ∞` assuming `λ(L) = λ∞ + c/L²` in the
    /// truncation length `L = R − r_i`.
    pub extrapolated: Vec<f64>,
    /// Extrapolated value at the outermost level.
    pub limit_estimate: f64,
    /// Change of the outermost value caused by the far-radius extrapolation.
    pub far_sensitivity: f64,
}

impl EssSpecEstimate {
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9))
    }
}

/// Estimates `lim λ₀(S ∖ K)` over the exhaustion.
pub fn ess_spectrum_estimate(fam: &ExhaustionFamily<f64>, far: [f64; 2], tol: f64) -> Result<EssSpecEstimate, LabError> {
    let n = fam.levels.len();
    if n < 3 {
        return Err(LabError::TooFewLevels { needed: 3, got: n });
    }
    let last = fam.levels[n - 1];
    if !(far[0] > far[1] && far[1] > last) {
        return Err(LabError::BadParameter("far radii must decrease and exceed every level".into()));
    }
    let solve = |i: usize, r: f64| -> Result<f64, LabError> { Ok(lambda0(&fam.complement(i, Some(r))?, tol)?.lambda0) };
    let pairs = (0..n)
        .into_par_iter()
        .map(|i| Ok((solve(i, far[0])?, solve(i, far[1])?)))
        .collect::<Result<Vec<_>, LabError>>()?;
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let values_near: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let extrapolated: Vec<f64> = (0..n)
        .map(|i| {
            let l = far[0] - fam.levels[i];
            let l2 = far[1] - fam.levels[i];
            (l * l * values[i] - l2 * l2 * values_near[i]) / (l * l - l2 * l2)
        })
        .collect();
    Ok(EssSpecEstimate {
        levels: fam.levels.clone(),
        far_radii: far,
        limit_estimate: extrapolated[n - 1],
        far_sensitivity: (values[n - 1] - extrapolated[n - 1]).abs(),
        values,
        values_near,
        extrapolated,
    })
}

/// Ground-state mass of `F` inside each truncation.
#[derive(Debug, Clone, Serialize)]
pub struct MassConcentration {
    pub levels: Vec<f64>,
    pub lambda0: f64,
    pub masses: Vec<f64>,
    /// Smallest `C` with `mass_i ≥ 1 − C/i` for every level `i ≥ 1`.
    pub fitted_c: f64,
}

/// `∫_{F ∩ K_i} φ²` for the ground state `φ` of `F`.
pub fn mass_concentration(f: &Subsurface<f64>, fam: &ExhaustionFamily<f64>, tol: f64) -> Result<MassConcentration, LabError> {
    let ground = lambda0(f, tol)?;
    let masses = fam
        .truncations
        .iter()
        .map(|k| mass_in(f, &ground, k))
        .collect::<Result<Vec<_>, _>>()?;
    let fitted_c = masses
        .iter()
        .enumerate()
        .map(|(i, m)| (i + 1) as f64 * (1.0 - m))
        .fold(0.0, f64::max);
    Ok(MassConcentration {
        levels: fam.levels.clone(),
        lambda0: ground.lambda0,
        masses,
        fitted_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::surface::{build_exhaustion, make_warped_cylinder, WarpedCylinderSpec};

    fn end(warp: impl Fn(f64) -> f64, x_max: f64) -> Arc<crate::surface::MetricSurface<f64>> {
        let spec = WarpedCylinderSpec { x_range: (0.0, x_max), circumference: 1.0, x_cells: (x_max * 20.0) as usize, y_cells: 4 };
        Arc::new(make_warped_cylinder(warp, spec).unwrap())
    }

    #[test]
    fn flat_end_extrapolates_to_zero() {
        let s = end(|_| 1.0, 12.0);
        let fam = build_exhaustion(s, &[1.0, 2.0, 3.0]).unwrap();
        let e = ess_spectrum_estimate(&fam, [12.0, 9.0], 1e-10).unwrap();
        assert!(e.is_monotone());
        assert!(e.limit_estimate.abs() < 5e-3, "{e:?}");
        assert!((e.values[2] - std::f64::consts::PI.powi(2) / 81.0).abs() < 2e-3, "{e:?}");
    }

    #[test]
    fn hyperbolic_funnel_tends_to_quarter() {
        let s = end(f64::cosh, 14.0);
        let fam = build_exhaustion(s, &[1.0, 2.0, 3.0]).unwrap();
        let e = ess_spectrum_estimate(&fam, [14.0, 11.0], 1e-10).unwrap();
        assert!(e.is_monotone());
        assert!((e.limit_estimate - 0.25).abs() < 0.05 * 0.25, "{e:?}");
    }

    #[test]
    fn too_few_levels() {
        let s = end(|_| 1.0, 4.0);
        let fam = build_exhaustion(s, &[1.0, 2.0]).unwrap();
        assert_eq!(
            ess_spectrum_estimate(&fam, [4.0, 3.0], 1e-8).unwrap_err(),
            LabError::TooFewLevels { needed: 3, got: 2 }
        );
    }
}
