//! P1 finite element matrices of the Laplace–Beltrami operator.

use crate::real::Real;
use crate::sparse::CsrMatrix;
use crate::surface::{MetricSurface, Subsurface, NONE};

use super::SpectralError;

/// Stiffness and mass matrices over a set of degrees of freedom.
#[derive(Debug, Clone)]
pub struct Assembly<T> {
    pub stiffness: CsrMatrix<T>,
    pub mass: CsrMatrix<T>,
    /// Parent vertex of each degree of freedom.
    pub dofs: Vec<usize>,
    /// Degree of freedom of each parent vertex, `NONE` when eliminated.
    pub dof_of: Vec<usize>,
}

/// Element stiffness `Dᵀ adj(G) D / (4A)` of a triangle with Gram matrix `G`,
/// where `D` maps vertex values to the derivatives along `e1`, `e2`.
/// Diagonal entries are minus the off-diagonal row sums.
pub fn element_stiffness<T: Real>(g: [T; 3]) -> Option<[[T; 3]; 3]> {
    let det = g[0] * g[2] - g[1] * g[1];
    if !(det > T::zero()) {
        return None;
    }
    let four_a = T::lit(2.0) * det.sqrt();
    // adj(G) = [[g22, −g12], [−g12, g11]]; columns of D: (−1,−1), (1,0), (0,1).
    let k01 = (g[1] - g[2]) / four_a;
    let k02 = (g[1] - g[0]) / four_a;
    let k12 = -g[1] / four_a;
    let mut k = [[T::zero(); 3]; 3];
    k[0][1] = k01;
    k[1][0] = k01;
    k[0][2] = k02;
    k[2][0] = k02;
    k[1][2] = k12;
    k[2][1] = k12;
    for i in 0..3 {
        let off: T = (0..3).filter(|&j| j != i).map(|j| k[i][j]).sum();
        k[i][i] = -off;
    }
    Some(k)
}

/// Consistent element mass `A/12 · (1 + δ_ij)`.
pub fn element_mass<T: Real>(area: T) -> [[T; 3]; 3] {
    let off = area / T::lit(12.0);
    let diag = area / T::lit(6.0);
    [[diag, off, off], [off, diag, off], [off, off, diag]]
}

fn assemble_over<T: Real>(s: &MetricSurface<T>, triangles: &[usize], dofs: Vec<usize>) -> Result<Assembly<T>, SpectralError> {
    let mut dof_of = vec![NONE; s.n_vertices()];
    for (i, &v) in dofs.iter().enumerate() {
        dof_of[v] = i;
    }
    let mut kt = Vec::with_capacity(9 * triangles.len());
    let mut mt = Vec::with_capacity(9 * triangles.len());
    for &t in triangles {
        let ke = element_stiffness(s.gram(t)).ok_or(SpectralError::DegenerateTriangle(t))?;
        let me = element_mass(s.triangle_area(t));
        let tri = s.triangle(t);
        for a in 0..3 {
            let i = dof_of[tri[a]];
            if i == NONE {
                continue;
            }
            for b in 0..3 {
                let j = dof_of[tri[b]];
                if j == NONE {
                    continue;
                }
                kt.push((i, j, ke[a][b]));
                mt.push((i, j, me[a][b]));
            }
        }
    }
    let n = dofs.len();
    Ok(Assembly {
        stiffness: CsrMatrix::from_triplets(n, &kt),
        mass: CsrMatrix::from_triplets(n, &mt),
        dofs,
        dof_of,
    })
}

/// Matrices on `F` with Dirichlet conditions on its boundary eliminated.
/// A closed `F` keeps every vertex.
pub fn assemble<T: Real>(f: &Subsurface<T>) -> Result<Assembly<T>, SpectralError> {
    let dofs = if f.has_boundary() { f.interior_vertices() } else { f.vertices().to_vec() };
    assemble_over(f.parent(), f.triangles(), dofs)
}

/// Matrices on `F` keeping every vertex, boundary included.
pub fn assemble_free<T: Real>(f: &Subsurface<T>) -> Result<Assembly<T>, SpectralError> {
    assemble_over(f.parent(), f.triangles(), f.vertices().to_vec())
}

/// Matrices of a whole surface with no elimination.
pub fn assemble_surface<T: Real>(s: &MetricSurface<T>) -> Result<Assembly<T>, SpectralError> {
    let tris: Vec<usize> = (0..s.n_triangles()).collect();
    assemble_over(s, &tris, (0..s.n_vertices()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::gram_from_lengths;

    #[test]
    fn right_triangle_cotan_weights() {
        // Unit right triangle at v0: cotangent weights ½cot give the
        // 5-point-stencil couplings.
        let g = gram_from_lengths(1.0, 2f64.sqrt(), 1.0);
        let k = element_stiffness(g).unwrap();
        assert!((k[0][1] + 0.5).abs() < 1e-15);
        assert!((k[0][2] + 0.5).abs() < 1e-15);
        assert!(k[1][2].abs() < 1e-15);
        assert!((k[0][0] - 1.0).abs() < 1e-15);
        assert!((k[1][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn equilateral_weights_are_cot_sixty() {
        let g = gram_from_lengths(1.0, 1.0, 1.0);
        let k = element_stiffness(g).unwrap();
        let w = -0.5 / 3f64.sqrt();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((k[i][j] - w).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_gram_rejected() {
        assert!(element_stiffness([1.0, 1.0, 1.0]).is_none());
    }
}
