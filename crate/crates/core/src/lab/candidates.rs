//! Upper bounds for the analytic systole from explicit candidate subsurfaces.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmpfun::{collar_width, Sidedness};
use crate::geodesics::{collar, eikonal_distances, metric_ball, systole_upper, Certificate, LoopResult};
use crate::spectral::{closed_eigenpairs, lambda0, SpectralError, SpectralResult};
use crate::surface::{cut_sides, Incompressibility, MetricSurface, Subsurface, SubsurfaceSummary, SurfaceError, TopoClass, NONE};

use super::{fem_error_bar, LabError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CandidateFamily {
    Ball,
    Collar,
    Superlevel,
}

/// A disc, annulus or cross cap together with its first Dirichlet eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateRecord {
    pub id: usize,
    pub family: CandidateFamily,
    /// Ball radius, collar half-width or superlevel threshold.
    pub parameter: f64,
    /// Ball center vertex.
    pub anchor: Option<usize>,
    pub summary: SubsurfaceSummary,
    pub lambda0: SpectralResult<f64>,
    pub error_bar: f64,
    /// Homological incompressibility test for annuli and cross caps.
    pub incompressibility: Option<Incompressibility>,
    #[serde(skip)]
    pub subsurface: Subsurface<f64>,
}

/// Candidate grids of the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Ball centers.
    pub centers: Vec<usize>,
    /// Number of log-spaced ball radii.
    pub n_radii: usize,
    /// Largest ball radius; defaults to the eccentricity of each center.
    pub max_radius: Option<f64>,
    /// Collar core loops; defaults to the shortest essential loop.
    pub cores: Option<Vec<Vec<usize>>>,
    /// Number of evenly spaced collar half-widths.
    pub n_widths: usize,
    /// Largest collar half-width; defaults to the embedded collar width for
    /// negatively curved surfaces and to `|S| / (2 sys)` otherwise.
    pub max_width: Option<f64>,
    /// Number of quantile thresholds for superlevel sets.
    pub n_quantiles: usize,
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            centers: vec![0],
            n_radii: 12,
            max_radius: None,
            cores: None,
            n_widths: 12,
            max_width: None,
            n_quantiles: 8,
            tol: 1e-8,
        }
    }
}

/// Result of [`lambda_upper`].
#[derive(Debug, Clone, Serialize)]
pub struct LambdaUpper {
    /// Smallest candidate eigenvalue.
    pub value: f64,
    /// Index of the minimizing candidate.
    pub best: usize,
    pub candidates: Vec<CandidateRecord>,
    /// Selections discarded for having another topology.
    pub rejected: usize,
}

impl LambdaUpper {
    pub fn best_record(&self) -> &CandidateRecord {
        &self.candidates[self.best]
    }
}

fn is_admissible(class: TopoClass) -> bool {
    matches!(class, TopoClass::Disc | TopoClass::Annulus | TopoClass::CrossCap)
}

/// Edge-connected components of a triangle set.
pub(super) fn triangle_components(s: &MetricSurface<f64>, tris: &[usize]) -> Vec<Vec<usize>> {
    let mut member = vec![false; s.n_triangles()];
    tris.iter().for_each(|&t| member[t] = true);
    let mut seen = vec![false; s.n_triangles()];
    let mut out = Vec::new();
    for &start in tris {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for e in s.tri_edges(t) {
                for o in s.edge_triangles(e) {
                    if o != NONE && member[o] && !seen[o] {
                        seen[o] = true;
                        comp.push(o);
                        queue.push_back(o);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn sidedness(s: &MetricSurface<f64>, core: &[usize]) -> Sidedness {
    if s.is_orientable() {
        return Sidedness::TwoSided;
    }
    match cut_sides(s, core, true) {
        Err(SurfaceError::OneSidedLoop) => Sidedness::OneSided,
        _ => Sidedness::TwoSided,
    }
}

fn default_max_width(s: &MetricSurface<f64>, core: &[usize], len: f64) -> Result<f64, LabError> {
    let kmax = s.curvature().map(|k| k.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    match kmax {
        Some(k) if k < 0.0 => {
            let scale = (-k).sqrt();
            Ok(collar_width(len * scale, sidedness(s, core))? / scale)
        }
        _ => Ok(s.area() / (2.0 * len)),
    }
}

struct Pending {
    family: CandidateFamily,
    parameter: f64,
    anchor: Option<usize>,
    subsurface: Subsurface<f64>,
}

fn ball_candidates(s: &Arc<MetricSurface<f64>>, cfg: &SearchConfig, out: &mut Vec<Pending>) -> Result<(), LabError> {
    let r_min = 2.0 * s.mesh_size();
    for &c in &cfg.centers {
        let r_max = match cfg.max_radius {
            Some(r) => r,
            None => eikonal_distances(&**s, &[c], None)
                .into_iter()
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max),
        };
        if !(r_max > r_min) || cfg.n_radii == 0 {
            continue;
        }
        for k in 0..cfg.n_radii {
            let frac = if cfg.n_radii == 1 { 1.0 } else { k as f64 / (cfg.n_radii - 1) as f64 };
            let r = r_min * (r_max / r_min).powf(frac);
            out.push(Pending {
                family: CandidateFamily::Ball,
                parameter: r,
                anchor: Some(c),
                subsurface: metric_ball(s, c, r)?,
            });
        }
    }
    Ok(())
}

fn collar_candidates(s: &Arc<MetricSurface<f64>>, cfg: &SearchConfig, out: &mut Vec<Pending>) -> Result<(), LabError> {
    let cores: Vec<LoopResult<f64>> = match &cfg.cores {
        Some(c) => c
            .iter()
            .map(|p| {
                Ok(LoopResult {
                    edge_path: p.clone(),
                    length: s.loop_length(p)?,
                    certificate: Certificate::Unknown,
                })
            })
            .collect::<Result<_, SurfaceError>>()?,
        None if s.is_closed() && s.euler_characteristic() <= 0 => vec![systole_upper(&**s)?],
        None => Vec::new(),
    };
    for core in &cores {
        let w_max = match cfg.max_width {
            Some(w) => w,
            None => default_max_width(s, &core.edge_path, core.length)?,
        };
        for k in 1..=cfg.n_widths {
            let w = w_max * k as f64 / cfg.n_widths as f64;
            out.push(Pending {
                family: CandidateFamily::Collar,
                parameter: w,
                anchor: None,
                subsurface: collar(s, core, w)?,
            });
        }
    }
    Ok(())
}

fn superlevel_candidates(s: &Arc<MetricSurface<f64>>, cfg: &SearchConfig, out: &mut Vec<Pending>) -> Result<(), LabError> {
    if cfg.n_quantiles == 0 {
        return Ok(());
    }
    let u = if s.is_closed() {
        closed_eigenpairs(&**s, 1, cfg.tol)?.vectors.swap_remove(0)
    } else {
        lambda0(&Subsurface::whole(s.clone()), cfg.tol)?.ground_state
    };
    let psi: Vec<f64> = u.iter().map(|x| x * x).collect();
    let mut sorted = psi.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in 1..=cfg.n_quantiles {
        let t = sorted[k * (sorted.len() - 1) / (cfg.n_quantiles + 1)];
        let tris: Vec<usize> = (0..s.n_triangles())
            .filter(|&f| s.triangle(f).iter().map(|&v| psi[v]).sum::<f64>() / 3.0 >= t)
            .collect();
        for comp in triangle_components(s, &tris) {
            out.push(Pending {
                family: CandidateFamily::Superlevel,
                parameter: t,
                anchor: None,
                subsurface: Subsurface::from_triangles(s.clone(), comp)?,
            });
        }
    }
    Ok(())
}

/// Smallest first Dirichlet eigenvalue over ball, collar and superlevel
/// candidates of disc, annulus or cross-cap type; an upper bound for the
/// analytic systole.
pub fn lambda_upper(s: &Arc<MetricSurface<f64>>, cfg: &SearchConfig) -> Result<LambdaUpper, LabError> {
    let mut pending = Vec::new();
    ball_candidates(s, cfg, &mut pending)?;
    collar_candidates(s, cfg, &mut pending)?;
    superlevel_candidates(s, cfg, &mut pending)?;

    let mut seen = HashSet::new();
    let mut rejected = 0;
    let mut kept = Vec::new();
    for p in pending {
        if !seen.insert(p.subsurface.triangles().to_vec()) {
            continue;
        }
        if is_admissible(p.subsurface.topo_class()) {
            kept.push(p);
        } else {
            rejected += 1;
        }
    }
    let computed = kept
        .into_par_iter()
        .map(|p| {
            let l = match lambda0(&p.subsurface, cfg.tol) {
                Ok(l) => l,
                Err(SpectralError::EmptyInterior) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let incompressibility = match p.subsurface.topo_class() {
                TopoClass::Annulus | TopoClass::CrossCap => Some(p.subsurface.classify_incompressible()?),
                _ => None,
            };
            Ok(Some(CandidateRecord {
                id: 0,
                family: p.family,
                parameter: p.parameter,
                anchor: p.anchor,
                summary: p.subsurface.summary(),
                error_bar: fem_error_bar(l.lambda0, l.mesh_h),
                lambda0: l,
                incompressibility,
                subsurface: p.subsurface,
            }))
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    rejected += computed.iter().filter(|c| c.is_none()).count();
    let candidates: Vec<CandidateRecord> = computed
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(id, c)| CandidateRecord { id, ..c })
        .collect();
    let best = (0..candidates.len())
        .min_by(|&a, &b| candidates[a].lambda0.lambda0.partial_cmp(&candidates[b].lambda0.lambda0).unwrap())
        .ok_or(LabError::NoValidCandidate)?;
    Ok(LambdaUpper {
        value: candidates[best].lambda0.lambda0,
        best,
        candidates,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_torus, make_round_sphere};

    #[test]
    fn square_torus_search() {
        let s = Arc::new(make_flat_torus([1.0, 0.0], [0.0, 1.0], 16).unwrap());
        let up = lambda_upper(&s, &SearchConfig::default()).unwrap();
        assert!(up.value >= 1.0);
        let best = up.best_record();
        assert_eq!(best.family, CandidateFamily::Collar);
        // A flat band of width `a` on the unit torus has area `a` and `λ₀ = π²/a²`.
        let band = std::f64::consts::PI.powi(2) / best.summary.area.powi(2);
        assert!((up.value - band).abs() / band < 0.02, "{} vs {band}", up.value);
        assert!(up.candidates.iter().all(|c| is_admissible(c.summary.topo_class)));
        let again = lambda_upper(&s, &SearchConfig::default()).unwrap();
        assert_eq!(up.value.to_bits(), again.value.to_bits());
    }

    #[test]
    fn sphere_balls_approach_zero() {
        let s = Arc::new(make_round_sphere(24).unwrap());
        let cfg = SearchConfig { n_quantiles: 0, ..SearchConfig::default() };
        let up = lambda_upper(&s, &cfg).unwrap();
        assert!(up.value < 0.5, "{}", up.value);
        let balls: Vec<f64> = up.candidates.iter().map(|c| c.lambda0.lambda0).collect();
        assert!(balls.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    }
}
