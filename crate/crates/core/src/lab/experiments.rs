//! Covering, conformal-rescaling and annulus ground-state experiments.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::geodesics::{inradius, metric_ball, shortest_in_homotopy_class, GeodesicError};
use crate::spectral::lambda0;
use crate::surface::{build_exhaustion, ConformalFactor, CoverKind, ExhaustionFamily, MetricSurface, Subsurface, TopoClass};

use super::candidates::triangle_components;
use super::{ess_spectrum_estimate, fem_error_bar, CandidateFamily, InequalityReport, LabError};

#[derive(Debug, Clone, Serialize)]
pub struct CoverRow {
    pub sheets: usize,
    pub kind: CoverKind,
    pub area: f64,
    pub lambda0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverTable {
    pub rows: Vec<CoverRow>,
    /// `p` in the least-squares fit `λ₀ ≈ C k^{−p}` over chains with `k ≥ 2`.
    pub fitted_exponent: Option<f64>,
}

/// `λ₀` of the `k`-sheeted segments of the cyclic cover obtained by cutting
/// along `core`, with Dirichlet conditions at both ends. `k = 1` gives the
/// closed surface itself.
pub fn cover_experiment(s: &MetricSurface<f64>, core: &[usize], ks: &[usize], tol: f64) -> Result<CoverTable, LabError> {
    let rows = ks
        .par_iter()
        .map(|&k| {
            let kind = if k == 1 { CoverKind::Closed } else { CoverKind::Chain };
            let cover = Arc::new(s.cyclic_cover(core, k, kind)?);
            let l = lambda0(&Subsurface::whole(cover.clone()), tol)?;
            Ok(CoverRow {
                sheets: k,
                kind,
                area: cover.area(),
                lambda0: l.lambda0,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sheets >= 2 && r.lambda0 > 0.0)
        .map(|r| ((r.sheets as f64).ln(), r.lambda0.ln()))
        .collect();
    let fitted_exponent = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        -sxy / sxx
    });
    Ok(CoverTable { rows, fitted_exponent })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalRow {
    pub t: f64,
    /// `λ₀` of the truncations lying in the core.
    pub core_lambda0: Vec<f64>,
    /// Whether every core value equals the unscaled one bit for bit.
    pub core_unchanged: bool,
    pub ess_limit: f64,
    /// `ess_limit` divided by its unscaled value.
    pub ess_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalTable {
    pub core_radius: f64,
    pub rows: Vec<ConformalRow>,
}

/// Rescales the metric by `factor(t, r)` per triangle, `r` the mean radial
/// coordinate, which must equal 1 on the core `r ≤ core_radius`; records
/// the eigenvalues of truncations inside the core and the essential
/// spectrum estimate for every `t`.
pub fn conformal_experiment(
    fam: &ExhaustionFamily<f64>,
    core_radius: f64,
    ts: &[f64],
    factor: &(dyn Fn(f64, f64) -> f64 + Sync),
    far: [f64; 2],
    tol: f64,
) -> Result<ConformalTable, LabError> {
    let s = &fam.surface;
    let radial = s.radial().ok_or(LabError::BadParameter("surface has no radial coordinate".into()))?;
    let mean_r: Vec<f64> = (0..s.n_triangles())
        .map(|t| s.triangle(t).iter().map(|&v| radial[v]).sum::<f64>() / 3.0)
        .collect();
    let core_levels: Vec<usize> = (0..fam.levels.len()).filter(|&i| fam.levels[i] <= core_radius).collect();
    let run = |family: &ExhaustionFamily<f64>| -> Result<(Vec<f64>, f64), LabError> {
        let core = core_levels
            .iter()
            .map(|&i| Ok(lambda0(&family.truncations[i], tol)?.lambda0))
            .collect::<Result<Vec<_>, LabError>>()?;
        Ok((core, ess_spectrum_estimate(family, far, tol)?.limit_estimate))
    };
    let (base_core, base_ess) = run(fam)?;
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let c: Vec<f64> = mean_r.iter().map(|&r| factor(t, r)).collect();
        if mean_r.iter().zip(&c).any(|(&r, &f)| r <= core_radius && f != 1.0) {
            return Err(LabError::FactorNotOneOnCore);
        }
        let scaled = Arc::new(s.conformal_scale(&ConformalFactor::PerTriangle(c))?);
        let family = build_exhaustion(scaled, &fam.levels)?;
        let (core, ess) = run(&family)?;
        rows.push(ConformalRow {
            t,
            core_unchanged: core.iter().zip(&base_core).all(|(a, b)| a.to_bits() == b.to_bits()),
            core_lambda0: core,
            ess_limit: ess,
            ess_ratio: ess / base_ess,
        });
    }
    Ok(ConformalTable { core_radius, rows })
}

/// Both sides of the ground-state estimate for annuli
/// `λ₀ ≥ {1 − δ + 2(1 − 1/δ)(|F|/ℓ)√λ₀} Λ′`.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusGroundStateReport {
    pub delta: f64,
    pub lambda0: f64,
    pub area: f64,
    pub ell: f64,
    /// Smallest disc eigenvalue found inside `F`.
    pub lambda_prime: f64,
    pub lambda_prime_source: CandidateFamily,
    pub coefficient: f64,
    pub report: InequalityReport,
}

/// Evaluates the annulus ground-state estimate with `Λ′` taken over disc
/// components of superlevel sets of the squared ground state and over the
/// widest inscribed ball around its maximum.
///
/// The report tolerance is `tolerance_rel · |rhs|`.
pub fn annulus_ground_state_diagnostic(
    f: &Subsurface<f64>,
    delta: f64,
    n_thresholds: usize,
    tolerance_rel: f64,
    tol: f64,
    instance: &str,
) -> Result<AnnulusGroundStateReport, LabError> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(LabError::DeltaOutOfRange(delta));
    }
    if f.topo_class() != TopoClass::Annulus {
        return Err(GeodesicError::WrongClass(f.topo_class()).into());
    }
    let s = f.parent();
    let ground = lambda0(f, tol)?;
    let ell = 2.0 * shortest_in_homotopy_class(f)?.length;
    let psi: Vec<f64> = ground.ground_state.iter().map(|x| x * x).collect();

    let mut discs: Vec<(CandidateFamily, Subsurface<f64>)> = Vec::new();
    let mut sorted: Vec<f64> = f.vertices().iter().map(|&v| psi[v]).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in 1..=n_thresholds {
        let t = sorted[k * (sorted.len() - 1) / (n_thresholds + 1)];
        let tris: Vec<usize> = f
            .triangles()
            .iter()
            .copied()
            .filter(|&x| s.triangle(x).iter().map(|&v| psi[v]).sum::<f64>() / 3.0 >= t)
            .collect();
        for comp in triangle_components(s, &tris) {
            let c = Subsurface::from_triangles(s.clone(), comp)?;
            if c.topo_class() == TopoClass::Disc {
                discs.push((CandidateFamily::Superlevel, c));
            }
        }
    }
    let peak = *f
        .vertices()
        .iter()
        .max_by(|&&a, &&b| psi[a].partial_cmp(&psi[b]).unwrap().then(b.cmp(&a)))
        .expect("nonempty subsurface");
    let rho = inradius(f)?;
    let ball = metric_ball(s, peak, rho)?;
    let inside: Vec<usize> = ball.triangles().iter().copied().filter(|&t| f.contains_triangle(t)).collect();
    if let Ok(b) = Subsurface::from_triangles(s.clone(), inside) {
        if b.topo_class() == TopoClass::Disc {
            discs.push((CandidateFamily::Ball, b));
        }
    }
    let evaluated = discs
        .par_iter()
        .map(|(fam, d)| Ok((*fam, lambda0(d, tol)?)))
        .collect::<Result<Vec<_>, LabError>>()?;
    let (source, best) = evaluated
        .into_iter()
        .min_by(|a, b| a.1.lambda0.partial_cmp(&b.1.lambda0).unwrap())
        .ok_or(LabError::NoValidCandidate)?;
    let lambda_prime = best.lambda0;
    let area = f.area();
    let coefficient = 1.0 - delta + 2.0 * (1.0 - 1.0 / delta) * (area / ell) * ground.lambda0.sqrt();
    let rhs = coefficient * lambda_prime;
    let error_bar = fem_error_bar(ground.lambda0, ground.mesh_h) + coefficient.abs() * fem_error_bar(lambda_prime, best.mesh_h);
    Ok(AnnulusGroundStateReport {
        delta,
        lambda0: ground.lambda0,
        area,
        ell,
        lambda_prime,
        lambda_prime_source: source,
        coefficient,
        report: InequalityReport::new("annulus_ground_state", instance, ground.lambda0, rhs, tolerance_rel * rhs.abs(), error_bar),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Verdict;
    use crate::surface::{build_exhaustion, make_flat_torus, make_warped_cylinder, WarpedCylinderSpec};

    #[test]
    fn torus_chain_covers() {
        let n = 12;
        let s = make_flat_torus([1.0, 0.0], [0.0, 1.0], n).unwrap();
        let core: Vec<usize> = (0..n).map(|j| j * n).collect();
        let table = cover_experiment(&s, &core, &[1, 2, 4], 1e-10).unwrap();
        assert_eq!(table.rows[0].lambda0, 0.0);
        for row in &table.rows[1..] {
            let exact = std::f64::consts::PI.powi(2) / (row.sheets * row.sheets) as f64;
            assert!((row.lambda0 - exact).abs() / exact < 0.02, "{row:?}");
        }
        let p = table.fitted_exponent.unwrap();
        assert!((1.9..=2.1).contains(&p), "{p}");
    }

    #[test]
    fn shrinking_the_end_leaves_the_core() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 10.0), circumference: 1.0, x_cells: 200, y_cells: 4 };
        let s = Arc::new(make_warped_cylinder(f64::cosh, spec).unwrap());
        let fam = build_exhaustion(s, &[1.0, 2.0, 3.0]).unwrap();
        let shrink = |t: f64, r: f64| if r <= 1.0 { 1.0 } else { (-t).exp() };
        let table = conformal_experiment(&fam, 1.0, &[0.5, 1.0], &shrink, [10.0, 8.0], 1e-10).unwrap();
        for row in &table.rows {
            assert_eq!(row.core_lambda0.len(), 1);
            assert!(row.core_unchanged);
            assert!((row.ess_ratio - row.t.exp()).abs() / row.t.exp() < 1e-6, "{row:?}");
        }
        let bad = |_: f64, _: f64| 0.5;
        assert_eq!(
            conformal_experiment(&fam, 1.0, &[1.0], &bad, [10.0, 8.0], 1e-10).unwrap_err(),
            LabError::FactorNotOneOnCore
        );
    }

    #[test]
    fn flat_cylinder_annulus_estimate() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 1.0), circumference: 3.0, x_cells: 16, y_cells: 48 };
        let s = Arc::new(make_warped_cylinder(|_: f64| 1.0, spec).unwrap());
        let r = annulus_ground_state_diagnostic(&Subsurface::whole(s), 0.25, 8, 0.05, 1e-10, "cylinder").unwrap();
        assert!((r.ell - 6.0).abs() < 1e-9);
        assert!(r.coefficient < 0.0);
        assert_eq!(r.report.verdict, Verdict::Holds);
        assert_eq!(annulus_ground_state_diagnostic(&Subsurface::whole(Arc::new(make_warped_cylinder(|_: f64| 1.0, spec).unwrap())), 0.5, 8, 0.05, 1e-8, "x").unwrap_err(), LabError::DeltaOutOfRange(0.5));
    }
}
