//! Runs the experiments of a manifest and collects their reports.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use systole_core::cmpfun::CurvatureBound;
use systole_core::geodesics::{fuchsian_lengths, metric_ball, systole_upper};
use systole_core::lab::{
    annulus_ground_state_diagnostic, check_isoperimetric, check_sandwich, check_systolic_bound, cheeger_upper,
    conformal_experiment, cover_experiment, ess_spectrum_estimate, EssSpecEstimate, fem_error_bar, flat_torus_systole, lambda_lower_bound,
    lambda_upper, InequalityReport, IsoperimetricOptions, SearchConfig, SystoleEstimate,
};
use systole_core::scene::{Model, Scene};
use systole_core::spectral::{assemble_surface, lambda0, Extrapolation};
use systole_core::surface::{build_exhaustion, octagon_geometry, ConformalFactor, TopoClass};
use systole_core::{Region, Surface};

use crate::docs::{CandidatesDoc, CoverDoc, CoverRowDoc, ResultDoc, SandwichDoc};
use crate::error::{geodesic, lab, Classify, Failure, Outcome};
use crate::manifest::{Experiment, LoadedManifest, SystoleSource};

/// Reports of one experiment plus an optional document for plotting.
pub struct ExperimentOutput {
    pub reports: Vec<InequalityReport>,
    pub document: Option<ResultDoc>,
}

impl ExperimentOutput {
    fn reports(reports: Vec<InequalityReport>) -> Self {
        Self { reports, document: None }
    }
}

/// `value ≈ expected` as the two one-sided reports `value ≥ expected` and
/// `expected ≥ value`, each with absolute tolerance `tol`.
pub fn agreement(name: &str, instance: &str, value: f64, expected: f64, tol: f64, error_bar: f64) -> [InequalityReport; 2] {
    [
        InequalityReport::new(format!("{name}:from_below"), instance, value, expected, tol, error_bar),
        InequalityReport::new(format!("{name}:from_above"), instance, expected, value, tol, error_bar),
    ]
}

fn build(scene: &Scene) -> Outcome<Arc<Surface>> {
    Ok(Arc::new(scene.build().input_err(&format!("scene {}", scene.label()))?))
}

fn whole_lambda0(s: &Arc<Surface>, tol: f64) -> Outcome<(f64, f64)> {
    let r = lambda0(&Region::whole(s.clone()), tol).solver_err("eigenvalue solve")?;
    Ok((r.lambda0, fem_error_bar(r.lambda0, r.mesh_h)))
}

/// `λ₀` extrapolated over `resolutions`, or at the scene resolution when
/// none are given, with its error bar.
fn refined_lambda0(sc: &Scene, resolutions: &[usize], tol: f64) -> Outcome<(f64, f64)> {
    if resolutions.len() < 2 {
        let n = resolutions.first().copied().unwrap_or(sc.resolution);
        let s = Arc::new(sc.build_at(n).input_err(&format!("scene {}", sc.label()))?);
        return whole_lambda0(&s, tol);
    }
    let levels = resolutions
        .par_iter()
        .map(|&n| {
            let s = Arc::new(sc.build_at(n).input_err(&format!("scene {}", sc.label()))?);
            Ok((n, whole_lambda0(&s, tol)?.0))
        })
        .collect::<Outcome<Vec<_>>>()?;
    let x = Extrapolation::from_levels(&levels).solver_err("extrapolation")?;
    Ok((x.value, x.error_bar))
}

/// Exact systole of the octagon surface from the group.
pub fn group_systole() -> Outcome<f64> {
    let lengths = fuchsian_lengths(&octagon_geometry(), 4).solver_err("translation lengths")?;
    lengths.first().copied().ok_or_else(|| Failure::Solver(anyhow::anyhow!("no hyperbolic word")))
}

fn systole_estimate(scene: &Scene, s: &Surface, source: &SystoleSource) -> Outcome<SystoleEstimate> {
    Ok(match (source, &scene.model) {
        (SystoleSource::Lattice, Model::FlatTorus { a, b }) => SystoleEstimate {
            value: flat_torus_systole(*a, *b),
            certified: true,
            source: "lattice".into(),
        },
        (SystoleSource::Lattice, _) => return Err(Failure::input("lattice systole needs a flat torus scene")),
        (SystoleSource::Fuchsian, Model::HyperbolicOctagon) => SystoleEstimate {
            value: group_systole()?,
            certified: true,
            source: "fuchsian".into(),
        },
        (SystoleSource::Fuchsian, _) => return Err(Failure::input("group systole needs the octagon scene")),
        (SystoleSource::Mesh, _) => SystoleEstimate {
            value: geodesic(systole_upper(s), "systole")?.length,
            certified: false,
            source: "mesh".into(),
        },
        (SystoleSource::Value(v), _) => SystoleEstimate {
            value: *v,
            certified: false,
            source: "manifest".into(),
        },
    })
}

fn search(s: &Arc<Surface>, tol: f64) -> Outcome<systole_core::lab::LambdaUpper> {
    lab(lambda_upper(s, &SearchConfig { tol, ..SearchConfig::default() }), "candidate search")
}

fn systolic_bound(s: &Arc<Surface>, kappa: f64, sys: &SystoleEstimate, tol: f64, solver: f64, instance: &str) -> Outcome<ExperimentOutput> {
    let up = search(s, solver)?;
    let kappa = CurvatureBound::new(kappa);
    let reports = lab(check_systolic_bound(s, kappa, sys, &up, tol, instance), "curvature bound")?;
    let mut doc = CandidatesDoc::new(instance, &up);
    doc.lower_bound = Some(lab(lambda_lower_bound(s, kappa, sys), "curvature bound")?);
    Ok(ExperimentOutput {
        reports,
        document: Some(ResultDoc::Candidates(doc)),
    })
}

fn random_unit_lattice(rng: &mut ChaCha8Rng) -> ([f64; 2], [f64; 2]) {
    let x: f64 = rng.gen_range(-0.5..0.5);
    let y: f64 = rng.gen_range(0.6..2.0);
    let r = y.sqrt();
    ([1.0 / r, 0.0], [x / r, r])
}

pub fn run_experiment(m: &LoadedManifest, index: usize, e: &Experiment) -> Outcome<ExperimentOutput> {
    let tol = m.tolerance(e);
    let solver = m.manifest.tolerances.solver;
    let seed = m.manifest.seed.wrapping_add(index as u64);
    match e {
        Experiment::Eigenvalue { scene, resolutions, expected, .. } => {
            let sc = m.scene(scene);
            let (value, bar) = refined_lambda0(sc, resolutions, solver)?;
            Ok(ExperimentOutput::reports(agreement("eigenvalue", &sc.label(), value, *expected, tol * expected.abs(), bar).to_vec()))
        }
        Experiment::EigenvalueBounds { scene, resolutions, lower, upper, .. } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let (l, bar) = refined_lambda0(sc, resolutions, solver)?;
            Ok(ExperimentOutput::reports(vec![
                InequalityReport::new("eigenvalue_lower_bound", &inst, l, *lower, tol * lower.abs(), bar),
                InequalityReport::new("eigenvalue_upper_bound", &inst, *upper, l, tol * upper.abs(), bar),
            ]))
        }
        Experiment::Decreasing { scenes } => {
            let values = scenes
                .par_iter()
                .map(|id| whole_lambda0(&build(m.scene(id))?, solver).map(|v| v.0))
                .collect::<Outcome<Vec<_>>>()?;
            Ok(ExperimentOutput::reports(
                values
                    .windows(2)
                    .zip(scenes.windows(2))
                    .map(|(v, id)| InequalityReport::new("eigenvalue_decreasing", format!("{}>{}", id[0], id[1]), v[0], v[1], 0.0, 0.0))
                    .collect(),
            ))
        }
        Experiment::SystolicBound { scene, kappa, systole, .. } => {
            let sc = m.scene(scene);
            let s = build(sc)?;
            let sys = systole_estimate(sc, &s, systole)?;
            systolic_bound(&s, *kappa, &sys, tol, solver, &sc.label())
        }
        Experiment::RandomTori { count, resolution, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut reports = Vec::new();
            for i in 0..*count {
                let (a, b) = random_unit_lattice(&mut rng);
                let mut sc = Scene::new(Model::FlatTorus { a, b }, *resolution);
                sc.id = Some(format!("random_torus_{i}"));
                let s = build(&sc)?;
                let sys = systole_estimate(&sc, &s, &SystoleSource::Lattice)?;
                reports.extend(systolic_bound(&s, 0.0, &sys, tol, solver, &sc.label())?.reports);
            }
            Ok(ExperimentOutput::reports(reports))
        }
        Experiment::Sandwich {
            scene,
            expected_systole,
            systole_tolerance,
            ..
        } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let s = build(sc)?;
            let sys_tol = systole_tolerance.unwrap_or(0.03);
            let mesh_sys = geodesic(systole_upper(&*s), "systole")?.length;
            let sys = match sc.model {
                Model::HyperbolicOctagon => systole_estimate(sc, &s, &SystoleSource::Fuchsian)?,
                _ => systole_estimate(sc, &s, &SystoleSource::Mesh)?,
            };
            let mut reports = Vec::new();
            if let Some(x) = expected_systole {
                reports.extend(agreement("group_systole", &inst, sys.value, *x, sys_tol * x, 0.0));
            }
            reports.extend(agreement("mesh_systole", &inst, mesh_sys, sys.value, sys_tol * sys.value, 0.0));
            let up = search(&s, solver)?;
            let sw = lab(check_sandwich(&s, &sys, &up, tol, &inst), "sandwich")?;
            reports.push(sw.lower.clone());
            reports.push(sw.upper.clone());
            reports.extend(sw.candidates.iter().cloned());
            let mut doc = CandidatesDoc::new(&inst, &up);
            doc.sandwich = Some(SandwichDoc::new(s.euler_characteristic(), sys.value, &sw));
            Ok(ExperimentOutput {
                reports,
                document: Some(ResultDoc::Candidates(doc)),
            })
        }
        Experiment::Isoperimetric { scene, kappa, equality, .. } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let s = build(sc)?;
            let opts = IsoperimetricOptions {
                tolerance_rel: tol,
                error_bar_rel: m.manifest.tolerances.isoperimetric_error_bar,
                instance: inst.clone(),
            };
            let r = lab(check_isoperimetric(&Region::whole(s), CurvatureBound::new(*kappa), &opts), "isoperimetric check")?;
            let mut reports = r.reports.clone();
            if *equality {
                for rep in &r.reports {
                    reports.extend(agreement(&format!("{}_equality", rep.name), &inst, rep.lhs, rep.rhs, tol * rep.rhs.abs(), 0.0));
                }
            }
            Ok(ExperimentOutput::reports(reports))
        }
        Experiment::RandomDiscs { count, resolution, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let disc = build(&Scene::new(Model::FlatDisc { radius: 1.0 }, *resolution))?;
            let mut reports = Vec::new();
            let mut made = 0;
            for _ in 0..20 * count {
                if made == *count {
                    break;
                }
                let center = rng.gen_range(0..disc.n_vertices());
                let radius = rng.gen_range(0.2..0.8);
                let f = metric_ball(&disc, center, radius).solver_err("metric ball")?;
                if f.topo_class() != TopoClass::Disc {
                    continue;
                }
                let opts = IsoperimetricOptions {
                    tolerance_rel: tol,
                    error_bar_rel: m.manifest.tolerances.isoperimetric_error_bar,
                    instance: format!("random_disc_{made}"),
                };
                reports.extend(lab(check_isoperimetric(&f, CurvatureBound::new(0.0), &opts), "isoperimetric check")?.reports);
                made += 1;
            }
            if made < *count {
                return Err(Failure::Solver(anyhow::anyhow!("only {made} of {count} random discs were discs")));
            }
            Ok(ExperimentOutput::reports(reports))
        }
        Experiment::Cheeger {
            scene,
            cheeger_constant,
            thresholds,
            identity_tolerance,
            ..
        } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let f = Region::whole(build(sc)?);
            let est = lab(cheeger_upper(&f, *thresholds, solver), "Cheeger sweep")?;
            let h = *cheeger_constant;
            let bar = fem_error_bar(est.lambda0, f.parent().mesh_size());
            let id_tol = identity_tolerance.unwrap_or(1e-2);
            let si = &est.sweep_inequality;
            let mut reports = vec![
                InequalityReport::new("cheeger_eigenvalue_bound", &inst, est.lambda0, h * h / 4.0, tol * h * h / 4.0, bar),
                InequalityReport::new("cheeger_sweep_upper", &inst, h, est.h_upper, tol * h, 0.0),
                InequalityReport::new(
                    "sweep_inequality",
                    &inst,
                    si.two_sqrt_lambda * si.phi_sq,
                    si.two_phi_grad_phi,
                    1e-9 * si.two_phi_grad_phi,
                    0.0,
                ),
            ];
            reports.extend(agreement("coarea_identity", &inst, est.profile.integral_length(), si.grad_psi, id_tol * si.grad_psi, 0.0));
            reports.extend(agreement("cavalieri_identity", &inst, est.profile.integral_area(), si.psi, id_tol * si.psi, 0.0));
            Ok(ExperimentOutput::reports(reports))
        }
        Experiment::Cover {
            scene,
            sheets,
            constant,
            exponent,
            exponent_tolerance,
            ..
        } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let s = build(sc)?;
            let core = geodesic(systole_upper(&*s), "core loop")?;
            let table = lab(cover_experiment(&s, &core.edge_path, sheets, solver), "cover experiment")?;
            let mut reports = Vec::new();
            for row in &table.rows {
                let expected = if row.sheets == 1 { 0.0 } else { constant / (row.sheets as f64).powf(*exponent) };
                reports.extend(agreement(&format!("cover_lambda0[{}]", row.sheets), &inst, row.lambda0, expected, tol * expected, 0.0));
            }
            if let Some(p) = table.fitted_exponent {
                reports.extend(agreement("cover_decay_exponent", &inst, p, *exponent, *exponent_tolerance, 0.0));
            }
            let doc = CoverDoc {
                scene: inst,
                rows: table
                    .rows
                    .iter()
                    .map(|r| CoverRowDoc {
                        sheets: r.sheets,
                        kind: r.kind,
                        area: r.area,
                        lambda0: r.lambda0,
                    })
                    .collect(),
                fitted_exponent: table.fitted_exponent,
            };
            Ok(ExperimentOutput {
                reports,
                document: Some(ResultDoc::Cover(doc)),
            })
        }
        Experiment::EssSpectrum {
            scene,
            levels,
            far,
            expected,
            at_least,
            ..
        } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let estimate = |n: usize| -> Outcome<EssSpecEstimate> {
                let s = Arc::new(sc.build_at(n).input_err(&format!("scene {inst}"))?);
                let fam = build_exhaustion(s, levels).input_err("exhaustion levels")?;
                lab(ess_spectrum_estimate(&fam, *far, solver), "essential spectrum estimate")
            };
            let (est, coarse) = rayon::join(|| estimate(sc.resolution), || estimate((sc.resolution / 2).max(2)));
            let (est, coarse) = (est?, coarse?);
            let n = est.values.len();
            // Level spread plus the Richardson estimate of the discretization error.
            let bar = (est.extrapolated[n - 1] - est.extrapolated[n - 2]).abs() + (est.limit_estimate - coarse.limit_estimate).abs() / 3.0;
            let mut reports: Vec<InequalityReport> = est
                .values
                .windows(2)
                .enumerate()
                .map(|(i, w)| InequalityReport::new("ess_values_nondecreasing", format!("{inst}[{i}]"), w[1], w[0], 1e-9 * w[0].abs(), 0.0))
                .collect();
            if let Some(x) = expected {
                reports.extend(agreement("ess_limit", &inst, est.limit_estimate, *x, tol * x.abs(), bar));
            }
            if let Some(x) = at_least {
                reports.push(InequalityReport::new("ess_limit_at_least", &inst, est.limit_estimate, *x, 0.0, bar));
            }
            Ok(ExperimentOutput::reports(reports))
        }
        Experiment::Conformal {
            scene,
            levels,
            core_radius,
            ts,
            far,
            ..
        } => {
            let sc = m.scene(scene);
            let inst = sc.label();
            let s = build(sc)?;
            let fam = build_exhaustion(s.clone(), levels).input_err("exhaustion levels")?;
            let r0 = *core_radius;
            let shrink = move |t: f64, r: f64| if r <= r0 { 1.0 } else { (-t).exp() };
            let table = lab(conformal_experiment(&fam, r0, ts, &shrink, *far, solver), "conformal experiment")?;
            let mut reports = Vec::new();
            for row in &table.rows {
                let tag = format!("{inst}[t={}]", row.t);
                let same = if row.core_unchanged { 1.0 } else { 0.0 };
                reports.push(InequalityReport::new("conformal_core_unchanged", &tag, same, 1.0, 0.0, 0.0));
                let e = row.t.exp();
                reports.extend(agreement("conformal_ess_scaling", &tag, row.ess_ratio, e, tol * e, 0.0));
            }
            let base = assemble_surface(&*s).solver_err("assembly")?;
            let radial = s.radial().ok_or_else(|| Failure::input("conformal experiment needs a radial coordinate"))?;
            let scale = base.stiffness.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            // Areas from squared lengths lose ε·(ℓ²/A)² relative precision.
            let cond = (0..s.n_triangles())
                .map(|t| s.local_lengths(t).iter().fold(0.0f64, |m, l| m.max(l * l)) / s.triangle_area(t))
                .fold(0.0f64, f64::max);
            let roundoff = f64::EPSILON * cond * cond * scale;
            for &t in ts {
                let c = (0..s.n_triangles())
                    .map(|k| {
                        let r = s.triangle(k).iter().map(|&v| radial[v]).sum::<f64>() / 3.0;
                        shrink(t, r)
                    })
                    .collect();
                let scaled = s.conformal_scale(&ConformalFactor::PerTriangle(c)).solver_err("conformal scaling")?;
                let k = assemble_surface(&scaled).solver_err("assembly")?.stiffness;
                let dev = if k.same_pattern(&base.stiffness) {
                    k.values().iter().zip(base.stiffness.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                } else {
                    f64::INFINITY
                };
                reports.push(InequalityReport::new("conformal_stiffness_invariance", format!("{inst}[t={t}]"), 0.0, dev, 1e-12 * scale + roundoff, 0.0));
            }
            Ok(ExperimentOutput::reports(reports))
        }
        Experiment::AnnulusGroundState { scene, delta, .. } => {
            let sc = m.scene(scene);
            let f = Region::whole(build(sc)?);
            let r = lab(annulus_ground_state_diagnostic(&f, *delta, 8, tol, solver, &sc.label()), "annulus estimate")?;
            Ok(ExperimentOutput::reports(vec![r.report]))
        }
    }
}
