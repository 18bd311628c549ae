//! Versioned JSON descriptions of the generated surfaces.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cmpfun::{funnel_warp, CmpError, WarpMode};
use crate::surface::{
    make_flat_disc, make_flat_torus, make_geodesic_disc, make_hyperbolic_disc, make_hyperbolic_octagon, make_klein_bottle,
    make_round_sphere, make_warped_cylinder, MetricSurface, SurfaceError, WarpedCylinderSpec,
};

pub const SCENE_SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid scene JSON")]
    Json(#[from] serde_json::Error),
    #[error("unsupported scene schema {0}, expected {SCENE_SCHEMA}")]
    Schema(u32),
    #[error("invalid scene parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Profile(#[from] CmpError),
}

/// Warping function `j` of a warped cylinder `dx² + j(x)²dy²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    /// `j = 1`.
    Flat,
    /// `j = cosh x`, curvature −1.
    Cosh,
    /// Solution of `j'' + κj = 0` with `κ` blending smoothly from
    /// `kappa_inner` to `kappa_outer` over `transition`, evaluated at `|x|`.
    Funnel {
        kappa_inner: f64,
        kappa_outer: f64,
        transition: [f64; 2],
        #[serde(default)]
        cusp: bool,
    },
}

impl Warp {
    pub fn curvature(&self, x: f64) -> f64 {
        match *self {
            Warp::Flat => 0.0,
            Warp::Cosh => -1.0,
            Warp::Funnel {
                kappa_inner,
                kappa_outer,
                transition: [a, b],
                ..
            } => {
                let s = ((x.abs() - a) / (b - a)).clamp(0.0, 1.0);
                kappa_inner + (kappa_outer - kappa_inner) * s * s * (3.0 - 2.0 * s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    FlatTorus {
        a: [f64; 2],
        b: [f64; 2],
    },
    HyperbolicOctagon,
    WarpedCylinder {
        x_range: [f64; 2],
        circumference: f64,
        warp: Warp,
        /// Cells around the circle; defaults to square cells.
        #[serde(default)]
        y_cells: Option<usize>,
    },
    HyperbolicDisc {
        radius: f64,
    },
    KleinBottleFlat {
        width: f64,
        height: f64,
    },
    FlatDisc {
        radius: f64,
    },
    GeodesicDisc {
        kappa: f64,
        radius: f64,
    },
    RoundSphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub model: Model,
    pub resolution: usize,
}

impl Scene {
    pub fn new(model: Model, resolution: usize) -> Self {
        Self {
            schema: SCENE_SCHEMA,
            id: None,
            model,
            resolution,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let scene: Scene = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self, SceneError> {
        let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.schema != SCENE_SCHEMA {
            return Err(SceneError::Schema(self.schema));
        }
        if self.resolution == 0 {
            return Err(SceneError::Parameter("resolution must be positive".into()));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SceneError::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        match &self.model {
            Model::FlatTorus { a, b } => positive("lattice area", (a[0] * b[1] - a[1] * b[0]).abs()),
            Model::HyperbolicOctagon | Model::RoundSphere => Ok(()),
            Model::WarpedCylinder { x_range, circumference, warp, .. } => {
                positive("circumference", *circumference)?;
                positive("x range length", x_range[1] - x_range[0])?;
                if let Warp::Funnel { transition: [a, b], .. } = warp {
                    positive("transition length", b - a)?;
                }
                Ok(())
            }
            Model::HyperbolicDisc { radius } | Model::FlatDisc { radius } | Model::GeodesicDisc { radius, .. } => {
                positive("radius", *radius)
            }
            Model::KleinBottleFlat { width, height } => {
                positive("width", *width)?;
                positive("height", *height)
            }
        }
    }

    /// Identifier used in reports: the explicit id or the model name.
    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            serde_json::to_value(&self.model).expect("model serializes")["model"]
                .as_str()
                .unwrap_or("scene")
                .to_string()
        })
    }

    /// Builds the mesh at the scene resolution.
    pub fn build(&self) -> Result<MetricSurface<f64>, SceneError> {
        self.build_at(self.resolution)
    }

    /// Builds the mesh at another resolution.
    pub fn build_at(&self, resolution: usize) -> Result<MetricSurface<f64>, SceneError> {
        self.validate()?;
        let n = resolution;
        Ok(match &self.model {
            Model::FlatTorus { a, b } => make_flat_torus(*a, *b, n)?,
            Model::HyperbolicOctagon => make_hyperbolic_octagon(n)?,
            Model::HyperbolicDisc { radius } => make_hyperbolic_disc(*radius, n)?,
            Model::KleinBottleFlat { width, height } => make_klein_bottle(*width, *height, n)?,
            Model::FlatDisc { radius } => make_flat_disc(*radius, n)?,
            Model::GeodesicDisc { kappa, radius } => make_geodesic_disc(*kappa, *radius, n)?,
            Model::RoundSphere => make_round_sphere(n)?,
            Model::WarpedCylinder {
                x_range: [x0, x1],
                circumference,
                warp,
                y_cells,
            } => {
                let ny = y_cells.unwrap_or_else(|| ((n as f64 * circumference / (x1 - x0)).round() as usize).max(4));
                let spec = WarpedCylinderSpec {
                    x_range: (*x0, *x1),
                    circumference: *circumference,
                    x_cells: n,
                    y_cells: ny,
                };
                let s = match warp {
                    Warp::Flat => make_warped_cylinder(|_: f64| 1.0, spec)?,
                    Warp::Cosh => make_warped_cylinder(f64::cosh, spec)?,
                    Warp::Funnel { cusp, .. } => {
                        let mode = if *cusp { WarpMode::Cusp } else { WarpMode::Expanding };
                        let reach = x0.abs().max(x1.abs());
                        let profile = funnel_warp(|x| warp.curvature(x), mode, reach, (4 * n).max(8))?;
                        make_warped_cylinder(|x| profile.eval_even(x), spec)?
                    }
                };
                let k = (0..s.n_triangles())
                    .map(|t| warp.curvature(s.triangle(t).iter().map(|&v| s.coords()[v][0]).sum::<f64>() / 3.0))
                    .collect();
                s.with_curvature(k)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"schema": 1, "id": "torus", "model": "flat_torus", "a": [1, 0], "b": [0.5, 1], "resolution": 8}"#;
        let scene = Scene::from_json(text).unwrap();
        assert_eq!(scene.model, Model::FlatTorus { a: [1.0, 0.0], b: [0.5, 1.0] });
        assert_eq!(Scene::from_json(&scene.to_json()).unwrap(), scene);
        assert_eq!(scene.label(), "torus");
        let s = scene.build().unwrap();
        assert!((s.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Scene::from_json(r#"{"schema": 2, "model": "hyperbolic_octagon", "resolution": 8}"#),
            Err(SceneError::Schema(2))
        ));
        assert!(matches!(Scene::from_json(r#"{"schema": 1, "model": "moebius", "resolution": 8}"#), Err(SceneError::Json(_))));
        assert!(matches!(
            Scene::from_json(r#"{"schema": 1, "model": "flat_disc", "radius": -1, "resolution": 8}"#),
            Err(SceneError::Parameter(_))
        ));
    }

    #[test]
    fn pinched_funnel_curvature() {
        let warp = Warp::Funnel { kappa_inner: -1.0, kappa_outer: -4.0, transition: [1.0, 3.0], cusp: false };
        let scene = Scene::new(
            Model::WarpedCylinder { x_range: [0.0, 4.0], circumference: 1.0, warp: warp.clone(), y_cells: Some(4) },
            40,
        );
        let s = scene.build().unwrap();
        let k = s.curvature().unwrap();
        assert!((k[0] + 1.0).abs() < 1e-12);
        assert!((k[k.len() - 1] + 4.0).abs() < 1e-12);
        assert_eq!(warp.curvature(2.0), -2.5);
        // Far out the warp grows like e^{2x}.
        let [j3, j4] = [3.5, 3.9].map(|x| circle_edge_at(&s, x));
        assert!(((j4 / j3).ln() / 0.4 - 2.0).abs() < 0.05);
    }

    /// Circle length at the grid column nearest to `x`.
    fn circle_edge_at(s: &MetricSurface<f64>, x: f64) -> f64 {
        let v = (0..s.n_vertices())
            .min_by(|&a, &b| (s.coords()[a][0] - x).abs().partial_cmp(&(s.coords()[b][0] - x).abs()).unwrap())
            .unwrap();
        let col: Vec<usize> = (0..s.n_vertices()).filter(|&w| s.coords()[w][0] == s.coords()[v][0]).collect();
        let e = s.edge_between(col[0], col[1]).unwrap();
        s.edge_length(e)
    }
}
