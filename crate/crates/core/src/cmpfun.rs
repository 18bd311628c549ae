//! Comparison functions `sn_κ`, `cs_κ`, `tn_κ`, `ct_κ`, collar widths and
//! warped-product profiles solving `j'' + κ j = 0`.

use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmpError {
    #[error("division by zero: sn_κ({kappa}, {t}) vanishes")]
    DivisionByZero { kappa: f64, t: f64 },
    #[error("systole must be positive, got {0}")]
    NonPositiveSystole(f64),
    #[error("invalid curvature profile: {0}")]
    InvalidProfile(String),
}

/// Upper curvature bound `κ` in units of 1/length².
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurvatureBound<T> {
    pub kappa: T,
}

impl<T: Real> CurvatureBound<T> {
    pub fn new(kappa: T) -> Self {
        assert!(kappa.is_finite(), "curvature bound must be finite");
        Self { kappa }
    }
}

/// Threshold on `|κ| t²` below which the Taylor series replaces the closed forms.
const SERIES_CUTOFF: f64 = 1e-8;

/// Solution of `u'' + κu = 0` with `u(0) = 0`, `u'(0) = 1`.
pub fn sn<T: Real>(kappa: T, t: T) -> T {
    let x = kappa * t * t;
    if x.abs() < T::lit(SERIES_CUTOFF) {
        // t - κt³/6 + κ²t⁵/120
        return t * (T::one() - x / T::lit(6.0) + x * x / T::lit(120.0));
    }
    if kappa < T::zero() {
        let s = (-kappa).sqrt();
        (s * t).sinh() / s
    } else {
        let s = kappa.sqrt();
        (s * t).sin() / s
    }
}

/// Solution of `u'' + κu = 0` with `u(0) = 1`, `u'(0) = 0`.
pub fn cs<T: Real>(kappa: T, t: T) -> T {
    let x = kappa * t * t;
    if x.abs() < T::lit(SERIES_CUTOFF) {
        return T::one() - x / T::lit(2.0) + x * x / T::lit(24.0);
    }
    if kappa < T::zero() {
        ((-kappa).sqrt() * t).cosh()
    } else {
        (kappa.sqrt() * t).cos()
    }
}

pub fn tn<T: Real>(kappa: T, t: T) -> T {
    sn(kappa, t) / cs(kappa, t)
}

pub fn ct<T: Real>(kappa: T, t: T) -> Result<T, CmpError> {
    let s = sn(kappa, t);
    if s == T::zero() {
        return Err(CmpError::DivisionByZero {
            kappa: kappa.as_f64(),
            t: t.as_f64(),
        });
    }
    Ok(cs(kappa, t) / s)
}

/// `arsinh x = ln(x + √(x² + 1))`.
pub fn arsinh<T: Real>(x: T) -> T {
    (x + (x * x + T::one()).sqrt()).ln()
}

/// Which side structure the systolic geodesic has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sidedness {
    TwoSided,
    OneSided,
}

/// Embedded collar half-width around a systolic geodesic of length `sys` on a
/// surface with curvature at least −1.
///
/// Two-sided: `arsinh(1/sinh(sys/2))`; one-sided: `arsinh(1/sinh(sys))`.
pub fn collar_width<T: Real>(sys: T, side: Sidedness) -> Result<T, CmpError> {
    if !(sys > T::zero()) {
        return Err(CmpError::NonPositiveSystole(sys.as_f64()));
    }
    let arg = match side {
        Sidedness::TwoSided => sys / T::lit(2.0),
        Sidedness::OneSided => sys,
    };
    Ok(arsinh(T::one() / arg.sinh()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WarpMode {
    /// `j(0) = 1`, `j'(0) = 0`; grows at least like `cosh x`.
    Expanding,
    /// `j(0) = 1`, `j(∞) = 0`; decays at least like `exp(−x)`.
    Cusp,
}

/// Sampled warping function `j` together with `j'` on a uniform grid over `[0, x_max]`.
#[derive(Debug, Clone)]
pub struct WarpProfile<T> {
    pub mode: WarpMode,
    pub xs: Vec<T>,
    pub j: Vec<T>,
    pub dj: Vec<T>,
}

impl<T: Real> WarpProfile<T> {
    pub fn x_max(&self) -> T {
        *self.xs.last().expect("nonempty grid")
    }

    /// Cubic Hermite interpolation of `j`; arguments outside the grid are clamped.
    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        let h = self.xs[1] - self.xs[0];
        let x = x.max(T::zero()).min(self.x_max());
        let mut i = (x / h).floor().to_usize().unwrap_or(0);
        if i >= n - 1 {
            i = n - 2;
        }
        let s = (x - self.xs[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        h00 * self.j[i] + h10 * h * self.dj[i] + h01 * self.j[i + 1] + h11 * h * self.dj[i + 1]
    }

    /// Even extension `x ↦ j(|x|)`.
    pub fn eval_even(&self, x: T) -> T {
        self.eval(x.abs())
    }
}

/// Relative local error target of the adaptive integrator.
const RK_TOL: f64 = 1e-10;

fn rk4_step<T: Real, F: Fn(T, [T; 2]) -> [T; 2]>(f: &F, x: T, y: [T; 2], h: T) -> [T; 2] {
    let half = T::lit(0.5);
    let k1 = f(x, y);
    let k2 = f(x + half * h, [y[0] + half * h * k1[0], y[1] + half * h * k1[1]]);
    let k3 = f(x + half * h, [y[0] + half * h * k2[0], y[1] + half * h * k2[1]]);
    let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    [
        y[0] + h / six * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
        y[1] + h / six * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
    ]
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction) with
/// step-doubling error control.
fn integrate_adaptive<T: Real, F: Fn(T, [T; 2]) -> [T; 2]>(
    f: &F,
    x0: T,
    x1: T,
    mut y: [T; 2],
    h_init: T,
) -> [T; 2] {
    let dir = if x1 >= x0 { T::one() } else { -T::one() };
    let total = (x1 - x0).abs();
    let mut done = T::zero();
    let mut h = h_init.abs().min(total).max(T::lit(1e-12));
    let tol = T::lit(RK_TOL).max(T::epsilon() * T::lit(64.0));
    let mut guard = 0usize;
    while done < total {
        guard += 1;
        assert!(guard < 10_000_000, "adaptive RK4 failed to progress");
        if done + h > total {
            h = total - done;
        }
        let x = x0 + dir * done;
        let full = rk4_step(f, x, y, dir * h);
        let half = rk4_step(f, x, y, dir * h / T::lit(2.0));
        let two = rk4_step(f, x + dir * h / T::lit(2.0), half, dir * h / T::lit(2.0));
        let scale0 = two[0].abs().max(T::one());
        let scale1 = two[1].abs().max(T::one());
        let err = ((two[0] - full[0]).abs() / scale0).max((two[1] - full[1]).abs() / scale1) / T::lit(15.0);
        if err <= tol || h <= T::lit(1e-10) {
            // Richardson-corrected accept
            y = [
                two[0] + (two[0] - full[0]) / T::lit(15.0),
                two[1] + (two[1] - full[1]) / T::lit(15.0),
            ];
            done += h;
            let grow = if err == T::zero() {
                T::lit(2.0)
            } else {
                (T::lit(0.9) * (tol / err).powf(T::lit(0.2))).min(T::lit(2.0))
            };
            h = h * grow;
        } else {
            h = h * (T::lit(0.9) * (tol / err).powf(T::lit(0.2))).max(T::lit(0.1));
        }
    }
    y
}

fn validate_profile<T: Real, K: Fn(T) -> T>(kappa: &K, x_max: T, samples: usize) -> Result<(), CmpError> {
    if !(x_max > T::zero()) {
        return Err(CmpError::InvalidProfile("x_max must be positive".into()));
    }
    let n = samples.max(64) * 4;
    let mut prev: Option<T> = None;
    let mut sign = 0i8;
    for i in 0..=n {
        let x = x_max * T::from_usize_lossy(i) / T::from_usize_lossy(n);
        let k = kappa(x);
        if !k.is_finite() {
            return Err(CmpError::InvalidProfile(format!("κ not finite at x = {x}")));
        }
        if x <= T::one() && (k + T::one()).abs() > T::lit(1e-12) {
            return Err(CmpError::InvalidProfile(format!(
                "κ must equal −1 on [0, 1], got {k} at x = {x}"
            )));
        }
        if let Some(p) = prev {
            let d = k - p;
            let s = if d > T::zero() { 1 } else if d < T::zero() { -1 } else { 0 };
            if s != 0 {
                if sign != 0 && s != sign {
                    return Err(CmpError::InvalidProfile(format!("κ not monotone near x = {x}")));
                }
                sign = s;
            }
        }
        prev = Some(k);
    }
    Ok(())
}

/// Solves `j'' + κ(x) j = 0` on `[0, x_max]` and samples it at `samples + 1`
/// uniform grid points.
///
/// `Expanding` uses `j(0) = 1, j'(0) = 0`. `Cusp` selects the decaying solution
/// with `j(0) = 1` by integrating the Riccati equation `m' = −κ − m²` for
/// `m = j'/j` backwards from far out, where it is stable.
pub fn funnel_warp<T: Real, K: Fn(T) -> T>(
    kappa: K,
    mode: WarpMode,
    x_max: T,
    samples: usize,
) -> Result<WarpProfile<T>, CmpError> {
    if samples < 2 {
        return Err(CmpError::InvalidProfile("need at least two grid intervals".into()));
    }
    validate_profile(&kappa, x_max, samples)?;
    let h = x_max / T::from_usize_lossy(samples);
    let xs: Vec<T> = (0..=samples).map(|i| h * T::from_usize_lossy(i)).collect();
    let mut j = Vec::with_capacity(samples + 1);
    let mut dj = Vec::with_capacity(samples + 1);
    match mode {
        WarpMode::Expanding => {
            let f = |x: T, y: [T; 2]| [y[1], -kappa(x) * y[0]];
            let mut y = [T::one(), T::zero()];
            j.push(y[0]);
            dj.push(y[1]);
            for w in xs.windows(2) {
                y = integrate_adaptive(&f, w[0], w[1], y, h / T::lit(4.0));
                j.push(y[0]);
                dj.push(y[1]);
            }
        }
        WarpMode::Cusp => {
            let k_end = kappa(x_max);
            if !(k_end < T::zero()) {
                return Err(CmpError::InvalidProfile("cusp mode needs κ < 0 at infinity".into()));
            }
            let margin = T::lit(40.0) / (-k_end).sqrt();
            let x_far = x_max + margin;
            // y = (m, ln j) integrated backwards; κ is frozen beyond x_max.
            let f = |x: T, y: [T; 2]| {
                let k = kappa(x.min(x_max));
                [-k - y[0] * y[0], y[0]]
            };
            let mut y = [-(-k_end).sqrt(), T::zero()];
            y = integrate_adaptive(&f, x_far, x_max, y, h);
            let mut ms = vec![T::zero(); samples + 1];
            let mut logs = vec![T::zero(); samples + 1];
            ms[samples] = y[0];
            logs[samples] = y[1];
            for i in (0..samples).rev() {
                y = integrate_adaptive(&f, xs[i + 1], xs[i], y, h / T::lit(4.0));
                ms[i] = y[0];
                logs[i] = y[1];
            }
            let l0 = logs[0];
            for i in 0..=samples {
                let ji = (logs[i] - l0).exp();
                j.push(ji);
                dj.push(ms[i] * ji);
            }
        }
    }
    Ok(WarpProfile { mode, xs, j, dj })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sn_trivial_values() {
        assert_eq!(sn(0.0, 2.0), 2.0);
        assert!((sn(-1.0, 1.0) - 1.0f64.sinh()).abs() < 1e-14);
        assert!((sn(1.0, 1.0) - 1.0f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn series_branch_is_continuous() {
        for &t in &[0.3f64, 1.0, 2.5] {
            let k = 1e-9 / (t * t);
            let below = sn(k * 0.99, t);
            let above = sn(k * 1.01 * 1e3, t);
            assert!((below - t).abs() < 1e-9);
            assert!((above - t).abs() < 1e-5);
            assert!((cs(-k, t) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ct_and_tn() {
        assert!((ct(0.0f64, 0.7).unwrap() - 1.0 / 0.7).abs() < 1e-14);
        assert!((tn(0.0f64, 0.35) - 0.35).abs() < 1e-14);
        assert!(matches!(ct(-1.0, 0.0), Err(CmpError::DivisionByZero { .. })));
    }

    #[test]
    fn collar_width_errors_on_nonpositive() {
        assert!(matches!(
            collar_width(0.0, Sidedness::TwoSided),
            Err(CmpError::NonPositiveSystole(_))
        ));
        assert!(collar_width(-1.0, Sidedness::OneSided).is_err());
    }

    #[test]
    fn collar_width_small_systole_asymptotics() {
        // w(s) + ln(s) stays bounded as s -> 0
        let a = collar_width(1e-3, Sidedness::TwoSided).unwrap() + 1e-3f64.ln();
        let b = collar_width(1e-6, Sidedness::TwoSided).unwrap() + 1e-6f64.ln();
        assert!((a - b).abs() < 1e-3);
        assert!((b - 4f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn warp_profile_rejects_bad_profiles() {
        let r = funnel_warp(|_x: f64| -2.0, WarpMode::Expanding, 3.0, 30);
        assert!(matches!(r, Err(CmpError::InvalidProfile(_))));
        let wiggle = |x: f64| if x <= 1.0 { -1.0 } else { -1.0 - (3.0 * x).sin().powi(2) };
        assert!(funnel_warp(wiggle, WarpMode::Expanding, 5.0, 50).is_err());
    }

    #[test]
    fn constant_curvature_warps() {
        let p = funnel_warp(|_x: f64| -1.0, WarpMode::Expanding, 4.0, 40).unwrap();
        for (x, j) in p.xs.iter().zip(&p.j) {
            assert!((j - x.cosh()).abs() < 1e-9 * x.cosh());
        }
        let c = funnel_warp(|_x: f64| -1.0, WarpMode::Cusp, 4.0, 40).unwrap();
        for (x, j) in c.xs.iter().zip(&c.j) {
            assert!((j - (-x).exp()).abs() < 1e-9);
        }
        assert!((p.eval(1.234) - 1.234f64.cosh()).abs() < 1e-5);
    }
}
