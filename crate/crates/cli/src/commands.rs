//! Subcommand implementations.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use systole_core::cmpfun::CurvatureBound;
use systole_core::geodesics::{systole_upper, Certificate};
use systole_core::lab::{
    check_sandwich, cover_experiment, flat_torus_systole, lambda_lower_bound, lambda_upper, SearchConfig, SystoleEstimate, Verdict,
};
use systole_core::scene::{Model, Scene};
use systole_core::spectral::{lambda0, lambda_k, Extrapolation};
use systole_core::{Region, Surface};

use crate::docs::{CandidatesDoc, CoverDoc, CoverRowDoc, ReportBundle, ResultDoc, SandwichDoc, SpectrumDoc, SpectrumRow, Summary, SystoleDoc};
use crate::error::{geodesic, lab, Classify, Failure, Outcome};
use crate::manifest::load_manifest;
use crate::output::{sig, OutDir};
use crate::plot::charts;
use crate::verify::run_experiment;

/// Relative tolerance of the verdicts attached to single-scene runs.
const REPORT_TOLERANCE: f64 = 0.05;

fn load_scene(path: &Path) -> Outcome<(Scene, Surface)> {
    let scene = Scene::load(path).input_err("scene")?;
    let s = scene.build().input_err(&format!("scene {}", scene.label()))?;
    Ok((scene, s))
}

/// Exact systole when the model has an independent oracle.
fn reference_systole(scene: &Scene) -> Outcome<Option<f64>> {
    Ok(match &scene.model {
        Model::FlatTorus { a, b } => Some(flat_torus_systole(*a, *b)),
        Model::HyperbolicOctagon => Some(crate::verify::group_systole()?),
        _ => None,
    })
}

fn stem(scene: &Scene) -> String {
    scene.label().replace(|c: char| !c.is_ascii_alphanumeric() && c != '-' && c != '_', "_")
}

pub fn spectrum(path: &Path, refinements: usize, tol: f64, out: &OutDir) -> Outcome<()> {
    let (scene, base) = load_scene(path)?;
    let refinements = refinements.max(1);
    let resolutions: Vec<usize> = (0..refinements).map(|i| scene.resolution << i).collect();
    let closed = base.is_closed();
    let rows = resolutions
        .par_iter()
        .map(|&n| {
            let s = Arc::new(scene.build_at(n).input_err(&format!("scene {}", scene.label()))?);
            let r = lambda0(&Region::whole(s.clone()), tol).solver_err("eigenvalue solve")?;
            let lambda1 = if closed { Some(lambda_k(&*s, 1, tol).solver_err("eigenvalue solve")?[1]) } else { None };
            Ok(SpectrumRow {
                resolution: n,
                triangles: s.n_triangles(),
                mesh_h: r.mesh_h,
                lambda0: r.lambda0,
                lambda1,
                residual: r.residual,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let (extrapolated, error_bar) = if !closed && rows.len() >= 2 {
        let levels: Vec<(usize, f64)> = rows.iter().map(|r| (r.resolution, r.lambda0)).collect();
        let x = Extrapolation::from_levels(&levels).solver_err("extrapolation")?;
        (Some(x.value), Some(x.error_bar))
    } else {
        (None, None)
    };
    for r in &rows {
        let l1 = r.lambda1.map(|l| format!(" lambda1={}", sig(l, 6))).unwrap_or_default();
        println!("resolution={} triangles={} lambda0={}{l1}", r.resolution, r.triangles, sig(r.lambda0, 6));
    }
    if let (Some(v), Some(b)) = (extrapolated, error_bar) {
        println!("extrapolated lambda0={}±{}", sig(v, 6), sig(b, 3));
    }
    out.write_csv("spectrum.csv", &rows)?;
    let doc = ResultDoc::Spectrum(SpectrumDoc {
        scene: scene.label(),
        closed,
        rows,
        extrapolated,
        error_bar,
    });
    out.write_json("spectrum.json", &doc)?;
    out.write_mesh(&stem(&scene), &base)
}

pub fn systole(path: &Path, out: &OutDir) -> Outcome<()> {
    let (scene, s) = load_scene(path)?;
    let l = geodesic(systole_upper(&s), "systole")?;
    let certificate = match &l.certificate {
        Certificate::HomologyNontrivial(c) => format!("homology {c:?}"),
        other => format!("{other:?}"),
    };
    let doc = SystoleDoc {
        scene: scene.label(),
        length: l.length,
        simple: l.is_simple(),
        certificate,
        loop_vertices: l.edge_path.clone(),
        reference: reference_systole(&scene)?,
    };
    let reference = doc.reference.map(|r| format!(" reference={}", sig(r, 6))).unwrap_or_default();
    println!("systole<={} vertices={} certificate={}{reference}", sig(doc.length, 6), doc.loop_vertices.len(), doc.certificate);
    out.write_json("systole.json", &ResultDoc::Systole(doc))?;
    out.write_mesh(&stem(&scene), &s)
}

pub fn lambda(path: &Path, tol: f64, out: &OutDir) -> Outcome<()> {
    let (scene, s) = load_scene(path)?;
    let s = Arc::new(s);
    let up = lab(lambda_upper(&s, &SearchConfig { tol, ..SearchConfig::default() }), "candidate search")?;
    let mut doc = CandidatesDoc::new(&scene.label(), &up);
    let kmax = s.curvature().map(|k| k.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    if let (true, Some(k)) = (s.is_closed() && s.euler_characteristic() <= 0, kmax) {
        let sys = match reference_systole(&scene)? {
            Some(v) => SystoleEstimate { value: v, certified: true, source: "oracle".into() },
            None => SystoleEstimate {
                value: geodesic(systole_upper(&*s), "systole")?.length,
                certified: false,
                source: "mesh".into(),
            },
        };
        doc.lower_bound = Some(lab(lambda_lower_bound(&s, CurvatureBound::new(k), &sys), "curvature bound")?);
        if s.euler_characteristic() < 0 && (k + 1.0).abs() < 1e-9 {
            let sw = lab(check_sandwich(&s, &sys, &up, REPORT_TOLERANCE, &scene.label()), "sandwich")?;
            println!("sandwich lower={} upper={}", sig(sw.lower_value, 6), sig(sw.upper_value, 6));
            doc.sandwich = Some(SandwichDoc::new(s.euler_characteristic(), sys.value, &sw));
        }
    }
    println!(
        "lambda_up={} candidates={} rejected={} best={:?}",
        sig(up.value, 6),
        up.candidates.len(),
        up.rejected,
        up.best_record().family
    );
    if let Some(b) = doc.lower_bound {
        println!("lower_bound={}", sig(b, 6));
    }
    out.write_csv("candidates.csv", &doc.candidates)?;
    out.write_json("lambda.json", &ResultDoc::Candidates(doc))?;
    out.write_mesh(&stem(&scene), &s)
}

pub fn cover(path: &Path, doublings: usize, tol: f64, out: &OutDir) -> Outcome<()> {
    let (scene, s) = load_scene(path)?;
    let core = geodesic(systole_upper(&s), "core loop")?;
    let sheets: Vec<usize> = (0..=doublings).map(|i| 1 << i).collect();
    let table = lab(cover_experiment(&s, &core.edge_path, &sheets, tol), "cover experiment")?;
    let rows: Vec<CoverRowDoc> = table
        .rows
        .iter()
        .map(|r| CoverRowDoc {
            sheets: r.sheets,
            kind: r.kind,
            area: r.area,
            lambda0: r.lambda0,
        })
        .collect();
    for r in &rows {
        println!("sheets={} area={} lambda0={}", r.sheets, sig(r.area, 6), sig(r.lambda0, 6));
    }
    if let Some(p) = table.fitted_exponent {
        println!("fitted_exponent={}", sig(p, 6));
    }
    out.write_csv("cover.csv", &rows)?;
    let doc = CoverDoc {
        scene: scene.label(),
        rows,
        fitted_exponent: table.fitted_exponent,
    };
    out.write_json("cover.json", &ResultDoc::Cover(doc))?;
    out.write_mesh(&stem(&scene), &s)
}

/// Runs a manifest; returns whether any report was violated.
pub fn verify(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Outcome<bool> {
    let mut m = load_manifest(path)?;
    if let Some(seed) = seed {
        m.manifest.seed = seed;
    }
    let root = match (out, &m.manifest.output) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => m.base_dir.join(o),
        (None, None) => Path::new("systole-lab-out").to_path_buf(),
    };
    let dir = OutDir::new(&root);
    let mut reports = Vec::new();
    for (i, e) in m.manifest.experiments.iter().enumerate() {
        let result = run_experiment(&m, i, e)?;
        for r in &result.reports {
            println!(
                "{:<12} {} [{}] lhs={} rhs={} margin={}",
                format!("{:?}", r.verdict),
                r.name,
                r.instance,
                sig(r.lhs, 6),
                sig(r.rhs, 6),
                sig(r.margin, 3)
            );
        }
        if let Some(doc) = &result.document {
            dir.write_json(&format!("details/{i:02}_{}.json", e.op()), doc)?;
        }
        reports.extend(result.reports);
    }
    let summary = Summary::of(&reports);
    println!("holds={} violated={} inconclusive={}", summary.holds, summary.violated.len(), summary.inconclusive.len());
    for name in &summary.inconclusive {
        println!("inconclusive: {name}");
    }
    for name in &summary.violated {
        println!("violated: {name}");
    }
    let violated = reports.iter().any(|r| r.verdict == Verdict::Violated);
    dir.write_csv("reports.csv", &reports)?;
    let bundle = ReportBundle {
        tool_version: m.manifest.tool_version.clone(),
        seed: m.manifest.seed,
        reports,
        summary,
    };
    dir.write_json("reports.json", &ResultDoc::Reports(bundle))?;
    Ok(violated)
}

pub fn plot(inputs: &[std::path::PathBuf], out: &OutDir) -> Outcome<()> {
    if inputs.is_empty() {
        return Err(Failure::input("no result files given"));
    }
    for input in inputs {
        let text = std::fs::read_to_string(input).input_err(&format!("cannot read {}", input.display()))?;
        let doc: ResultDoc = serde_json::from_str(&text).input_err(&format!("invalid result file {}", input.display()))?;
        let charts = charts(&doc);
        if charts.is_empty() {
            return Err(Failure::input(format!("{} has nothing to plot", input.display())));
        }
        let prefix = input.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
        for (name, chart) in charts {
            let p = out.write_text(&format!("{prefix}_{name}"), &chart.render())?;
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}
