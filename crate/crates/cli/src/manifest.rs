//! Run manifests: named scenes, experiments and tolerances.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use systole_core::scene::{Scene, SCENE_SCHEMA};

use crate::error::{Classify, Failure, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of experiments that do not set their own.
    pub relative: f64,
    /// Relative error bar of the isoperimetric checks.
    #[serde(default = "default_isoperimetric_error_bar")]
    pub isoperimetric_error_bar: f64,
    /// Eigensolver tolerance.
    #[serde(default = "default_solver")]
    pub solver: f64,
}

fn default_isoperimetric_error_bar() -> f64 {
    0.01
}

fn default_solver() -> f64 {
    1e-10
}

/// Where the systole entering a lower bound comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystoleSource {
    /// Shortest lattice vector of a flat torus scene.
    Lattice,
    /// Shortest translation length of the regular octagon group.
    Fuchsian,
    /// Shortest essential mesh loop; an upper bound only.
    Mesh,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// `λ₀` extrapolated over resolutions against a reference value.
    Eigenvalue {
        scene: String,
        resolutions: Vec<usize>,
        expected: f64,
        tolerance: Option<f64>,
    },
    /// `lower ≤ λ₀ ≤ upper`, extrapolated when several resolutions are given.
    EigenvalueBounds {
        scene: String,
        #[serde(default)]
        resolutions: Vec<usize>,
        lower: f64,
        upper: f64,
        tolerance: Option<f64>,
    },
    /// `λ₀` strictly decreasing along the listed scenes.
    Decreasing { scenes: Vec<String> },
    /// Every search candidate above the systolic lower bound.
    SystolicBound {
        scene: String,
        kappa: f64,
        systole: SystoleSource,
        tolerance: Option<f64>,
    },
    /// The systolic bound on seeded random unit-area flat tori.
    RandomTori {
        count: usize,
        resolution: usize,
        tolerance: Option<f64>,
    },
    /// Two-sided estimate on a closed hyperbolic surface, with the mesh and
    /// group systoles cross-checked against `expected_systole`.
    Sandwich {
        scene: String,
        expected_systole: Option<f64>,
        /// Relative tolerance of the systole cross-checks.
        systole_tolerance: Option<f64>,
        tolerance: Option<f64>,
    },
    /// The isoperimetric inequalities on the whole scene; with `equality`,
    /// also that both sides agree within the tolerance.
    Isoperimetric {
        scene: String,
        kappa: f64,
        #[serde(default)]
        equality: bool,
        tolerance: Option<f64>,
    },
    /// The isoperimetric checks on seeded random subdiscs of a flat disc.
    RandomDiscs {
        count: usize,
        resolution: usize,
        tolerance: Option<f64>,
    },
    /// `λ₀ ≥ h²/4` with the exact Cheeger constant `h`, the sweep identities
    /// and the sweep inequality.
    Cheeger {
        scene: String,
        cheeger_constant: f64,
        thresholds: usize,
        /// Relative tolerance of the coarea and Cavalieri identities.
        identity_tolerance: Option<f64>,
        tolerance: Option<f64>,
    },
    /// Chains of the cyclic cover cut along the shortest loop against
    /// `constant / k^exponent`.
    Cover {
        scene: String,
        sheets: Vec<usize>,
        constant: f64,
        exponent: f64,
        exponent_tolerance: f64,
        tolerance: Option<f64>,
    },
    EssSpectrum {
        scene: String,
        levels: Vec<f64>,
        far: [f64; 2],
        expected: Option<f64>,
        at_least: Option<f64>,
        tolerance: Option<f64>,
    },
    /// Shrinks the metric by `e^{−t}` outside the core.
    Conformal {
        scene: String,
        levels: Vec<f64>,
        core_radius: f64,
        ts: Vec<f64>,
        far: [f64; 2],
        tolerance: Option<f64>,
    },
    AnnulusGroundState {
        scene: String,
        delta: f64,
        tolerance: Option<f64>,
    },
}

impl Experiment {
    pub fn op(&self) -> &'static str {
        match self {
            Experiment::Eigenvalue { .. } => "eigenvalue",
            Experiment::EigenvalueBounds { .. } => "eigenvalue_bounds",
            Experiment::Decreasing { .. } => "decreasing",
            Experiment::SystolicBound { .. } => "systolic_bound",
            Experiment::RandomTori { .. } => "random_tori",
            Experiment::Sandwich { .. } => "sandwich",
            Experiment::Isoperimetric { .. } => "isoperimetric",
            Experiment::RandomDiscs { .. } => "random_discs",
            Experiment::Cheeger { .. } => "cheeger",
            Experiment::Cover { .. } => "cover",
            Experiment::EssSpectrum { .. } => "ess_spectrum",
            Experiment::Conformal { .. } => "conformal",
            Experiment::AnnulusGroundState { .. } => "annulus_ground_state",
        }
    }

    fn scenes(&self) -> Vec<&str> {
        match self {
            Experiment::Eigenvalue { scene, .. }
            | Experiment::EigenvalueBounds { scene, .. }
            | Experiment::SystolicBound { scene, .. }
            | Experiment::Sandwich { scene, .. }
            | Experiment::Isoperimetric { scene, .. }
            | Experiment::Cheeger { scene, .. }
            | Experiment::Cover { scene, .. }
            | Experiment::EssSpectrum { scene, .. }
            | Experiment::Conformal { scene, .. }
            | Experiment::AnnulusGroundState { scene, .. } => vec![scene],
            Experiment::Decreasing { scenes } => scenes.iter().map(String::as_str).collect(),
            Experiment::RandomTori { .. } | Experiment::RandomDiscs { .. } => Vec::new(),
        }
    }

    fn tolerance(&self) -> Option<f64> {
        match self {
            Experiment::Eigenvalue { tolerance, .. }
            | Experiment::EigenvalueBounds { tolerance, .. }
            | Experiment::SystolicBound { tolerance, .. }
            | Experiment::RandomTori { tolerance, .. }
            | Experiment::Sandwich { tolerance, .. }
            | Experiment::Isoperimetric { tolerance, .. }
            | Experiment::RandomDiscs { tolerance, .. }
            | Experiment::Cheeger { tolerance, .. }
            | Experiment::Cover { tolerance, .. }
            | Experiment::EssSpectrum { tolerance, .. }
            | Experiment::Conformal { tolerance, .. }
            | Experiment::AnnulusGroundState { tolerance, .. } => *tolerance,
            Experiment::Decreasing { .. } => None,
        }
    }
}

/// A scene given inline or as a path relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SceneRef {
    Path(PathBuf),
    Inline(Scene),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema: u32,
    pub tool_version: String,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub scenes: BTreeMap<String, SceneRef>,
    pub experiments: Vec<Experiment>,
}

/// A manifest with every scene loaded.
pub struct LoadedManifest {
    pub manifest: RunManifest,
    pub scenes: BTreeMap<String, Scene>,
    pub base_dir: PathBuf,
}

impl LoadedManifest {
    pub fn tolerance(&self, e: &Experiment) -> f64 {
        e.tolerance().unwrap_or(self.manifest.tolerances.relative)
    }

    pub fn scene(&self, id: &str) -> &Scene {
        &self.scenes[id]
    }
}

pub fn load_manifest(path: &Path) -> Outcome<LoadedManifest> {
    let text = std::fs::read_to_string(path).input_err(&format!("cannot read manifest {}", path.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).input_err(&format!("invalid manifest {}", path.display()))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    if manifest.schema != SCENE_SCHEMA {
        return Err(Failure::input(format!("unsupported manifest schema {}", manifest.schema)));
    }
    let t = &manifest.tolerances;
    for (name, v) in [("relative", t.relative), ("isoperimetric_error_bar", t.isoperimetric_error_bar)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Failure::input(format!("tolerance {name} must be finite and nonnegative, got {v}")));
        }
    }
    if !(t.solver > 0.0) {
        return Err(Failure::input("solver tolerance must be positive"));
    }
    let mut scenes = BTreeMap::new();
    for (id, r) in &manifest.scenes {
        let mut scene = match r {
            SceneRef::Inline(s) => {
                s.validate().input_err(&format!("scene {id}"))?;
                s.clone()
            }
            SceneRef::Path(p) => Scene::load(&base_dir.join(p)).input_err(&format!("scene {id}"))?,
        };
        scene.id.get_or_insert_with(|| id.clone());
        scenes.insert(id.clone(), scene);
    }
    for e in &manifest.experiments {
        for id in e.scenes() {
            if !scenes.contains_key(id) {
                return Err(Failure::input(format!("experiment {} refers to unknown scene {id}", e.op())));
            }
        }
        if let Some(t) = e.tolerance() {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Failure::input(format!("experiment {} has invalid tolerance {t}", e.op())));
            }
        }
    }
    Ok(LoadedManifest { manifest, scenes, base_dir })
}
