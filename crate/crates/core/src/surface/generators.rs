//! Instance generators for the model surfaces.

use std::collections::HashMap;

use crate::cmpfun::sn;
use crate::real::Real;

use super::{gram_from_lengths, MetricSurface, SurfaceError};

fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Lagrange–Gauss reduction of a lattice basis, followed by a sign choice
/// making `a·b ≤ 0` so that `a + b` is the shorter diagonal.
fn reduce_basis(mut a: [f64; 2], mut b: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let dot = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];
    if dot(a, a) > dot(b, b) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let mu = (dot(a, b) / dot(a, a)).round();
        b = [b[0] - mu * a[0], b[1] - mu * a[1]];
        if dot(b, b) >= dot(a, a) {
            break;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if dot(a, b) > 0.0 {
        b = [-b[0], -b[1]];
    }
    (a, b)
}

/// Flat torus `ℝ²/(aℤ + bℤ)` meshed by an `n × n` grid in the reduced basis.
pub fn make_flat_torus<T: Real>(a: [T; 2], b: [T; 2], resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    if resolution < 4 {
        return Err(SurfaceError::BadParameter(format!("resolution {resolution} < 4")));
    }
    let a = [a[0].as_f64(), a[1].as_f64()];
    let b = [b[0].as_f64(), b[1].as_f64()];
    let det = a[0] * b[1] - a[1] * b[0];
    if !(det.abs() > 1e-12 * norm2(a) * norm2(b)) || !det.is_finite() {
        return Err(SurfaceError::DegenerateLattice);
    }
    let (a, b) = reduce_basis(a, b);
    let n = resolution;
    let nf = n as f64;
    let ea = [a[0] / nf, a[1] / nf];
    let eb = [b[0] / nf, b[1] / nf];
    let la = norm2(ea);
    let lb = norm2(eb);
    let ld = norm2([ea[0] + eb[0], ea[1] + eb[1]]);
    let idx = |i: usize, j: usize| (i % n) + n * (j % n);
    let mut tris = Vec::with_capacity(2 * n * n);
    let mut lens = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([v00, v10, v11]);
            lens.push([T::lit(la), T::lit(lb), T::lit(ld)]);
            tris.push([v00, v11, v01]);
            lens.push([T::lit(ld), T::lit(la), T::lit(lb)]);
        }
    }
    let coords = (0..n * n)
        .map(|v| {
            let (i, j) = ((v % n) as f64, (v / n) as f64);
            [T::lit(i * ea[0] + j * eb[0]), T::lit(i * ea[1] + j * eb[1])]
        })
        .collect();
    Ok(MetricSurface::from_edge_lengths("flat_torus", n * n, tris, lens, coords)?.with_constant_curvature(T::zero()))
}

/// Flat Klein bottle: the rectangle `[0, width] × [0, height]` with
/// `(x, 0) ~ (x, height)` and `(0, y) ~ (width, height − y)`.
///
/// The horizontal loops at `y = 0` and `y = height/2` are one-sided and have
/// length `width`; vertical loops are two-sided of length `height`.
pub fn make_klein_bottle<T: Real>(width: T, height: T, resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    if resolution < 4 || resolution % 2 != 0 {
        return Err(SurfaceError::BadParameter(format!("resolution {resolution} must be even and ≥ 4")));
    }
    if !(width > T::zero() && height > T::zero()) {
        return Err(SurfaceError::DegenerateLattice);
    }
    let (n, m) = (resolution, resolution);
    let idx = |i: usize, j: usize| {
        if i == n {
            (m - j % m) % m * n
        } else {
            i + n * (j % m)
        }
    };
    let dx = width / T::from_usize_lossy(n);
    let dy = height / T::from_usize_lossy(m);
    let dd = (dx * dx + dy * dy).sqrt();
    let mut tris = Vec::with_capacity(2 * n * m);
    let mut lens = Vec::with_capacity(2 * n * m);
    for j in 0..m {
        for i in 0..n {
            let (v00, v10, v11, v01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([v00, v10, v11]);
            lens.push([dx, dy, dd]);
            tris.push([v00, v11, v01]);
            lens.push([dd, dx, dy]);
        }
    }
    let coords = (0..n * m)
        .map(|v| [dx * T::from_usize_lossy(v % n), dy * T::from_usize_lossy(v / n)])
        .collect();
    Ok(MetricSurface::from_edge_lengths("klein_bottle_flat", n * m, tris, lens, coords)?
        .with_constant_curvature(T::zero()))
}

/// Dimensions of the regular hyperbolic octagon with interior angles π/4.
#[derive(Debug, Clone, Copy)]
pub struct OctagonGeometry {
    /// Distance from the center to a corner: `cosh r = cot²(π/8)`.
    pub vertex_radius: f64,
    /// Distance from the center to a side midpoint: `cosh r = 1 + √2`.
    pub edge_radius: f64,
    /// Translation length of each side pairing, `2 arccosh(1 + √2)`.
    pub pairing_length: f64,
}

pub fn octagon_geometry() -> OctagonGeometry {
    let c = 1.0 / (std::f64::consts::PI / 8.0).tan();
    let vertex_radius = (c * c).acosh();
    let edge_radius = (1.0 + 2f64.sqrt()).acosh();
    OctagonGeometry {
        vertex_radius,
        edge_radius,
        pairing_length: 2.0 * edge_radius,
    }
}

/// Point on the hyperboloid `x0² − x1² − x2² = 1`.
type Hyp = [f64; 3];

fn hyp_polar(r: f64, theta: f64) -> Hyp {
    [r.cosh(), r.sinh() * theta.cos(), r.sinh() * theta.sin()]
}

fn hyp_dist(p: Hyp, q: Hyp) -> f64 {
    let pp = poincare(p);
    let qq = poincare(q);
    let d2 = (pp[0] - qq[0]).powi(2) + (pp[1] - qq[1]).powi(2);
    let den = ((1.0 - pp[0] * pp[0] - pp[1] * pp[1]) * (1.0 - qq[0] * qq[0] - qq[1] * qq[1])).sqrt();
    2.0 * (d2.sqrt() / den).asinh()
}

fn poincare(p: Hyp) -> [f64; 2] {
    [p[1] / (1.0 + p[0]), p[2] / (1.0 + p[0])]
}

/// Point at arc-length fraction `tau` along the geodesic from `p` to `q`.
fn hyp_lerp(p: Hyp, q: Hyp, tau: f64) -> Hyp {
    if tau == 0.0 {
        return p;
    }
    if tau == 1.0 {
        return q;
    }
    let d = hyp_dist(p, q);
    if d < 1e-300 {
        return p;
    }
    let (wp, wq) = (((1.0 - tau) * d).sinh() / d.sinh(), (tau * d).sinh() / d.sinh());
    [wp * p[0] + wq * q[0], wp * p[1] + wq * q[1], wp * p[2] + wq * q[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum OctKey {
    Center,
    Corner,
    Side(usize, usize),
    SpokeV(usize, usize),
    SpokeM(usize, usize),
    Interior(usize, usize, usize),
}

/// Genus-2 surface glued from the regular hyperbolic octagon with interior
/// angles π/4, opposite sides identified by hyperbolic translations.
///
/// The octagon is fanned from its center into 16 triangles (center, corner,
/// side midpoint), each subdivided into `n²` triangles with `n = resolution/4`
/// along rings at uniform arc length. Edge lengths are exact hyperbolic
/// distances; the shortest closed geodesics through opposite side midpoints
/// are mesh edge paths of length `2 arccosh(1 + √2)`.
pub fn make_hyperbolic_octagon<T: Real>(resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    if resolution < 4 {
        return Err(SurfaceError::BadParameter(format!("resolution {resolution} < 4")));
    }
    let n = (resolution / 4).max(2);
    let geo = octagon_geometry();
    let pi = std::f64::consts::PI;
    let center: Hyp = [1.0, 0.0, 0.0];
    let corner = |k: usize| hyp_polar(geo.vertex_radius, (k % 8) as f64 * pi / 4.0 - pi / 8.0);
    let mid = |k: usize| hyp_polar(geo.edge_radius, (k % 8) as f64 * pi / 4.0);

    // Canonical identification of boundary points: side q ≥ 4 maps to side
    // q − 4 with reversed arc parameter.
    let side_key = |q: usize, s: usize| -> OctKey {
        if s == 0 || s == 2 * n {
            OctKey::Corner
        } else if q >= 4 {
            OctKey::Side(q - 4, 2 * n - s)
        } else {
            OctKey::Side(q, s)
        }
    };

    let mut ids: HashMap<OctKey, usize> = HashMap::new();
    let mut positions: Vec<[f64; 2]> = Vec::new();
    let mut tris = Vec::new();
    let mut lens = Vec::new();

    for k in 0..8 {
        for half in 0..2 {
            let fan = 2 * k + half;
            let (p, q) = if half == 0 { (corner(k), mid(k)) } else { (mid(k), corner(k + 1)) };
            // Point with weights (a, b, c) on (center, p, q); ring = b + c.
            let point = |b: usize, c: usize| -> (OctKey, Hyp) {
                let a = n - b - c;
                let ring = b + c;
                let key = if a == n {
                    OctKey::Center
                } else if half == 0 {
                    if a == 0 {
                        side_key(k, c)
                    } else if c == 0 {
                        OctKey::SpokeV(k, b)
                    } else if b == 0 {
                        OctKey::SpokeM(k, c)
                    } else {
                        OctKey::Interior(fan, b, c)
                    }
                } else if a == 0 {
                    side_key(k, n + c)
                } else if c == 0 {
                    OctKey::SpokeM(k, b)
                } else if b == 0 {
                    OctKey::SpokeV((k + 1) % 8, c)
                } else {
                    OctKey::Interior(fan, b, c)
                };
                if ring == 0 {
                    return (key, center);
                }
                let t = ring as f64 / n as f64;
                let ap = hyp_lerp(center, p, t);
                let aq = hyp_lerp(center, q, t);
                (key, hyp_lerp(ap, aq, c as f64 / ring as f64))
            };
            let mut vid = |b: usize, c: usize| -> (usize, Hyp) {
                let (key, h) = point(b, c);
                let next = positions.len();
                let id = *ids.entry(key).or_insert(next);
                if id == next {
                    positions.push(poincare(h));
                }
                (id, h)
            };
            let mut push = |tri: [(usize, Hyp); 3]| {
                tris.push([tri[0].0, tri[1].0, tri[2].0]);
                lens.push([
                    T::lit(hyp_dist(tri[0].1, tri[1].1)),
                    T::lit(hyp_dist(tri[1].1, tri[2].1)),
                    T::lit(hyp_dist(tri[2].1, tri[0].1)),
                ]);
            };
            for b in 0..n {
                for c in 0..n - b {
                    push([vid(b, c), vid(b + 1, c), vid(b, c + 1)]);
                    if b + c + 2 <= n {
                        push([vid(b + 1, c), vid(b + 1, c + 1), vid(b, c + 1)]);
                    }
                }
            }
        }
    }
    let coords = positions.iter().map(|p| [T::lit(p[0]), T::lit(p[1])]).collect();
    Ok(MetricSurface::from_edge_lengths("hyperbolic_octagon", positions.len(), tris, lens, coords)?
        .with_constant_curvature(-T::one()))
}

/// Length of the chart segment `p → q` under `dx² + j(x)²dy²`, by
/// three-point Gauss–Legendre quadrature.
fn warped_segment_length<T: Real, F: Fn(T) -> T>(warp: &F, p: [T; 2], q: [T; 2]) -> T {
    let dx = q[0] - p[0];
    let dy = q[1] - p[1];
    if dx == T::zero() {
        return warp(p[0]).abs() * dy.abs();
    }
    if dy == T::zero() {
        return dx.abs();
    }
    let half = T::lit(0.5);
    let nodes = [-T::lit(0.6).sqrt(), T::zero(), T::lit(0.6).sqrt()];
    let weights = [T::lit(5.0 / 9.0), T::lit(8.0 / 9.0), T::lit(5.0 / 9.0)];
    let mut s = T::zero();
    for (z, w) in nodes.iter().zip(weights) {
        let x = p[0] + dx * half * (T::one() + *z);
        let jx = warp(x);
        s += w * (dx * dx + jx * jx * dy * dy).sqrt();
    }
    s * half
}

/// Parameters of a warped cylinder `[x0, x1] × ℝ/Lℤ` with metric `dx² + j(x)²dy²`.
#[derive(Debug, Clone, Copy)]
pub struct WarpedCylinderSpec<T> {
    pub x_range: (T, T),
    pub circumference: T,
    pub x_cells: usize,
    pub y_cells: usize,
}

/// Annulus with the warped product metric `dx² + j(x)²dy²`.
///
/// The metric is integrated per triangle with the three edge-midpoint rule,
/// exact for quadratic `j²`. The radial coordinate is `|x|`.
pub fn make_warped_cylinder<T: Real, F: Fn(T) -> T>(
    warp: F,
    spec: WarpedCylinderSpec<T>,
) -> Result<MetricSurface<T>, SurfaceError> {
    let WarpedCylinderSpec {
        x_range: (x0, x1),
        circumference,
        x_cells: nx,
        y_cells: ny,
    } = spec;
    if !(x1 > x0) || nx < 1 || ny < 3 || !(circumference > T::zero()) {
        return Err(SurfaceError::BadParameter("warped cylinder needs x0 < x1, x_cells ≥ 1, y_cells ≥ 3".into()));
    }
    let xs: Vec<T> = (0..=nx)
        .map(|i| x0 + (x1 - x0) * T::from_usize_lossy(i) / T::from_usize_lossy(nx))
        .collect();
    for &x in &xs {
        let j = warp(x);
        if !(j > T::zero()) || !j.is_finite() {
            return Err(SurfaceError::NonPositiveWarp(j.as_f64(), x.as_f64()));
        }
    }
    let dy = circumference / T::from_usize_lossy(ny);
    let idx = |i: usize, j: usize| i * ny + j % ny;
    let pos = |i: usize, j: usize| [xs[i], dy * T::from_usize_lossy(j)];
    let mut tris = Vec::with_capacity(2 * nx * ny);
    let mut grams = Vec::with_capacity(2 * nx * ny);
    let mut lengths: HashMap<(usize, usize), T> = HashMap::new();
    let half = T::lit(0.5);
    for i in 0..nx {
        for j in 0..ny {
            let corners = [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]];
            for c in corners {
                let p: Vec<[T; 2]> = c.iter().map(|&(a, b)| pos(a, b)).collect();
                let e1 = [p[1][0] - p[0][0], p[1][1] - p[0][1]];
                let e2 = [p[2][0] - p[0][0], p[2][1] - p[0][1]];
                let jj: T = (0..3)
                    .map(|k| {
                        let x = (p[k][0] + p[(k + 1) % 3][0]) * half;
                        let w = warp(x);
                        w * w
                    })
                    .sum::<T>()
                    / T::lit(3.0);
                grams.push([
                    e1[0] * e1[0] + jj * e1[1] * e1[1],
                    e1[0] * e2[0] + jj * e1[1] * e2[1],
                    e2[0] * e2[0] + jj * e2[1] * e2[1],
                ]);
                let ids: Vec<usize> = c.iter().map(|&(a, b)| idx(a, b)).collect();
                for k in 0..3 {
                    let (u, v) = (ids[k], ids[(k + 1) % 3]);
                    lengths
                        .entry((u.min(v), u.max(v)))
                        .or_insert_with(|| warped_segment_length(&warp, p[k], p[(k + 1) % 3]));
                }
                tris.push([ids[0], ids[1], ids[2]]);
            }
        }
    }
    let nv = (nx + 1) * ny;
    let coords: Vec<[T; 2]> = (0..nv).map(|v| pos(v / ny, v % ny)).collect();
    let radial = coords.iter().map(|c| c[0].abs()).collect();
    let s = MetricSurface::from_gram("warped_cylinder", nv, tris, grams, |a, b| lengths[&(a, b)], coords)?;
    Ok(s.with_radial(radial))
}

/// Inverse of `t ↦ sn_κ(t)` on its increasing branch.
fn asn<T: Real>(kappa: T, y: T) -> T {
    if kappa < T::zero() {
        let s = (-kappa).sqrt();
        (s * y).asinh() / s
    } else if kappa > T::zero() {
        let s = kappa.sqrt();
        (s * y).min(T::one()).asin() / s
    } else {
        y
    }
}

/// Distance between polar points `(r1, θ1)` and `(r2, θ2)` in the constant
/// curvature `κ` plane, in a cancellation-free half-angle form.
fn polar_distance<T: Real>(kappa: T, r1: T, r2: T, dtheta: T) -> T {
    let two = T::lit(2.0);
    let a = sn(kappa, (r1 - r2) / two);
    let s = (dtheta / two).sin();
    let h = (a * a + sn(kappa, r1) * sn(kappa, r2) * s * s).max(T::zero()).sqrt();
    two * asn(kappa, h)
}

/// Geodesic disc of radius `radius` in the simply connected surface of
/// constant curvature `κ`, on a polar mesh with `resolution` angular and
/// `resolution/2` radial cells. When `κ > 0` and `radius = π/√κ` the outer
/// ring collapses to the antipodal pole and the result is a closed sphere.
pub fn make_geodesic_disc<T: Real>(kappa: T, radius: T, resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    if resolution < 6 || !(radius > T::zero()) {
        return Err(SurfaceError::BadParameter("geodesic disc needs radius > 0 and resolution ≥ 6".into()));
    }
    let nt = resolution;
    let nr = (resolution / 2).max(2);
    let closes = kappa > T::zero() && (radius * kappa.sqrt() - T::PI()).abs() < T::lit(1e-9);
    if kappa > T::zero() && radius * kappa.sqrt() > T::PI() + T::lit(1e-9) {
        return Err(SurfaceError::BadParameter("radius exceeds the antipodal distance".into()));
    }
    let rings = if closes { nr - 1 } else { nr };
    let r_of = |i: usize| radius * T::from_usize_lossy(i) / T::from_usize_lossy(nr);
    let th_of = |j: usize| T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(nt);
    // Vertex 0 is the center, ring i ≥ 1 occupies 1 + (i−1)·nt ..; the pole is last.
    let idx = |i: usize, j: usize| if i == 0 { 0 } else { 1 + (i - 1) * nt + j % nt };
    let nv = 1 + rings * nt + usize::from(closes);
    let pole = nv - 1;
    let mut polar: Vec<(T, T)> = vec![(T::zero(), T::zero())];
    for i in 1..=rings {
        for j in 0..nt {
            polar.push((r_of(i), th_of(j)));
        }
    }
    if closes {
        polar.push((radius, T::zero()));
    }
    let dist = |u: usize, v: usize| -> T {
        let (r1, t1) = polar[u];
        let (r2, t2) = polar[v];
        if u == 0 || v == 0 || (closes && (u == pole || v == pole)) {
            return (r1 - r2).abs();
        }
        polar_distance(kappa, r1, r2, t1 - t2)
    };
    let mut tris = Vec::new();
    for j in 0..nt {
        tris.push([0, idx(1, j), idx(1, j + 1)]);
    }
    for i in 1..rings {
        for j in 0..nt {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    if closes {
        for j in 0..nt {
            tris.push([idx(rings, j), pole, idx(rings, j + 1)]);
        }
    }
    let lens: Vec<[T; 3]> = tris
        .iter()
        .map(|t| [dist(t[0], t[1]), dist(t[1], t[2]), dist(t[2], t[0])])
        .collect();
    let coords = polar.iter().map(|&(r, t)| [r * t.cos(), r * t.sin()]).collect();
    let radial: Vec<T> = polar.iter().map(|&(r, _)| r).collect();
    let name = if closes {
        "round_sphere"
    } else if kappa < T::zero() {
        "hyperbolic_disc"
    } else if kappa > T::zero() {
        "spherical_disc"
    } else {
        "flat_disc"
    };
    let s = if kappa < T::zero() {
        // Chords between far-out ring vertices cut deep inside the annulus,
        // so ring cells carry the polar metric averaged over the cell.
        let dth = T::lit(2.0) * T::PI() / T::from_usize_lossy(nt);
        let grams = tris
            .iter()
            .zip(&lens)
            .enumerate()
            .map(|(t, (tri, l))| {
                if t < nt {
                    return gram_from_lengths(l[0], l[1], l[2]);
                }
                let quad = (t - nt) % 2;
                let p = |v: usize, step: usize| (radial[v], dth * T::from_usize_lossy(step));
                // Angles relative to the cell's first corner, unwrapped.
                let q = if quad == 0 { [p(tri[0], 0), p(tri[1], 0), p(tri[2], 1)] } else { [p(tri[0], 0), p(tri[1], 1), p(tri[2], 1)] };
                let jj = (0..3)
                    .map(|k| {
                        let w = sn(kappa, (q[k].0 + q[(k + 1) % 3].0) * T::lit(0.5));
                        w * w
                    })
                    .sum::<T>()
                    / T::lit(3.0);
                let e1 = (q[1].0 - q[0].0, q[1].1 - q[0].1);
                let e2 = (q[2].0 - q[0].0, q[2].1 - q[0].1);
                [e1.0 * e1.0 + jj * e1.1 * e1.1, e1.0 * e2.0 + jj * e1.1 * e2.1, e2.0 * e2.0 + jj * e2.1 * e2.1]
            })
            .collect();
        MetricSurface::from_gram(name, nv, tris, grams, |a, b| dist(a, b), coords)?
    } else {
        MetricSurface::from_edge_lengths(name, nv, tris, lens, coords)?
    };
    Ok(s.with_constant_curvature(kappa).with_radial(radial))
}

/// Geodesic disc of curvature −1.
pub fn make_hyperbolic_disc<T: Real>(radius: T, resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    make_geodesic_disc(-T::one(), radius, resolution)
}

/// Euclidean disc.
pub fn make_flat_disc<T: Real>(radius: T, resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    make_geodesic_disc(T::zero(), radius, resolution)
}

/// Unit round sphere, as the geodesic disc of radius π in curvature 1.
pub fn make_round_sphere<T: Real>(resolution: usize) -> Result<MetricSurface<T>, SurfaceError> {
    make_geodesic_disc(T::one(), T::PI(), resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn torus_area_and_topology() {
        let s = make_flat_torus::<f64>([1.0, 0.0], [0.3, 1.1], 16).unwrap();
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.is_closed());
        assert!(s.is_orientable());
        assert!((s.area() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_lattice_rejected() {
        let r = make_flat_torus([1.0, 0.0], [2.0, 0.0], 8);
        assert_eq!(r.unwrap_err(), SurfaceError::DegenerateLattice);
    }

    #[test]
    fn klein_bottle_is_non_orientable() {
        let s = make_klein_bottle::<f64>(1.0, 1.0, 8).unwrap();
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.is_closed());
        assert!(!s.is_orientable());
        assert!((s.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn octagon_topology_and_area() {
        let s = make_hyperbolic_octagon::<f64>(64).unwrap();
        assert_eq!(s.euler_characteristic(), -2);
        assert!(s.is_closed());
        assert!(s.is_orientable());
        assert!((s.area() - 4.0 * PI).abs() / (4.0 * PI) < 0.02);
    }

    #[test]
    fn octagon_spoke_pair_has_pairing_length() {
        let n = 3;
        let s = make_hyperbolic_octagon::<f64>(4 * n).unwrap();
        let geo = octagon_geometry();
        let spoke: f64 = s.edge_lengths().iter().filter(|l| (*l - geo.edge_radius / n as f64).abs() < 1e-12).count() as f64;
        assert!(spoke >= 8.0 * n as f64);
        assert!((geo.pairing_length - 3.0571).abs() < 1e-4);
    }

    #[test]
    fn warped_flat_cylinder_area() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 0.5), circumference: 1.0, x_cells: 8, y_cells: 8 };
        let s = make_warped_cylinder(|_: f64| 1.0, spec).unwrap();
        assert_eq!(s.euler_characteristic(), 0);
        assert_eq!(s.boundary_loops().len(), 2);
        assert!((s.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cusp_piece_area() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 3.0), circumference: 1.0, x_cells: 120, y_cells: 6 };
        let s = make_warped_cylinder(|x: f64| (-x).exp(), spec).unwrap();
        let exact = 1.0 - (-3.0f64).exp();
        assert!((s.area() - exact).abs() / exact < 1e-3, "{}", s.area());
    }

    #[test]
    fn nonpositive_warp_rejected() {
        let spec = WarpedCylinderSpec { x_range: (-1.0, 1.0), circumference: 1.0, x_cells: 4, y_cells: 4 };
        assert!(matches!(make_warped_cylinder(|x: f64| x, spec), Err(SurfaceError::NonPositiveWarp(..))));
    }

    #[test]
    fn hyperbolic_disc_area() {
        let s = make_hyperbolic_disc(1.0, 64).unwrap();
        let exact = 2.0 * PI * (1f64.cosh() - 1.0);
        assert!((s.area() - exact).abs() / exact < 0.01);
        assert_eq!(s.euler_characteristic(), 1);
        assert_eq!(s.boundary_loops().len(), 1);
    }

    #[test]
    fn small_disc_is_nearly_euclidean() {
        let s = make_hyperbolic_disc(1e-3, 64).unwrap();
        let ratio = s.area() / (PI * 1e-6);
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn sphere_closes_up() {
        let s = make_round_sphere::<f64>(32).unwrap();
        assert_eq!(s.euler_characteristic(), 2);
        assert!(s.is_closed());
        assert!((s.area() - 4.0 * PI).abs() / (4.0 * PI) < 0.01);
    }

    #[test]
    fn polar_distance_matches_law_of_cosines() {
        let d = polar_distance(-1.0, 1.0, 2.0, 0.7);
        let c = 1f64.cosh() * 2f64.cosh() - 1f64.sinh() * 2f64.sinh() * 0.7f64.cos();
        assert!((d - c.acosh()).abs() < 1e-12);
        let e = polar_distance(0.0, 1.0, 1.0, PI / 2.0);
        assert!((e - 2f64.sqrt()).abs() < 1e-14);
    }
}
