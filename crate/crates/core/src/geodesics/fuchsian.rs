//! Closed geodesic lengths of the regular octagon surface from its deck group.

use num_complex::Complex64;

use crate::surface::OctagonGeometry;

use super::GeodesicError;

/// Element of SU(1,1) acting on the Poincaré disc, `[[a, b], [b̄, ā]]`.
#[derive(Debug, Clone, Copy)]
struct Su11 {
    a: Complex64,
    b: Complex64,
}

impl Su11 {
    /// Hyperbolic translation by `length` along the diameter at angle `theta`.
    fn translation(theta: f64, length: f64) -> Self {
        let h = length / 2.0;
        Self {
            a: Complex64::new(h.cosh(), 0.0),
            b: Complex64::from_polar(h.sinh(), theta),
        }
    }

    fn inverse(self) -> Self {
        Self { a: self.a.conj(), b: -self.b }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }

    fn trace(self) -> f64 {
        2.0 * self.a.re
    }
}

/// Sorted distinct lengths `2 arccosh(|tr γ| / 2)` of hyperbolic elements
/// given by reduced words of length at most `word_length_cap` in the four
/// side pairings of the regular octagon.
pub fn fuchsian_lengths(geometry: &OctagonGeometry, word_length_cap: usize) -> Result<Vec<f64>, GeodesicError> {
    let gens: Vec<Su11> = (0..4)
        .flat_map(|k| {
            let g = Su11::translation(k as f64 * std::f64::consts::FRAC_PI_4, geometry.pairing_length);
            [g, g.inverse()]
        })
        .collect();
    // Generator 2k+1 is the inverse of 2k.
    let inverse_of = |i: usize| i ^ 1;
    let mut traces = Vec::new();
    let mut frontier: Vec<(Su11, usize)> = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    for depth in 1..=word_length_cap {
        if depth > 1 {
            frontier = frontier
                .iter()
                .flat_map(|&(w, last)| {
                    gens.iter()
                        .enumerate()
                        .filter(move |&(i, _)| i != inverse_of(last))
                        .map(move |(i, &g)| (w.mul(g), i))
                })
                .collect();
        }
        traces.extend(frontier.iter().map(|(w, _)| w.trace().abs()).filter(|&t| t > 2.0 + 1e-9));
    }
    if traces.is_empty() {
        return Err(GeodesicError::CapTooSmall);
    }
    let mut lengths: Vec<f64> = traces.into_iter().map(|t| 2.0 * (t / 2.0).acosh()).collect();
    lengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lengths.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    Ok(lengths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::octagon_geometry;

    #[test]
    fn generators_have_systolic_length() {
        let l = fuchsian_lengths(&octagon_geometry(), 1).unwrap();
        let sys = 2.0 * (1.0 + 2f64.sqrt()).acosh();
        assert_eq!(l.len(), 1);
        assert!((l[0] - sys).abs() < 1e-12);
        assert_eq!(fuchsian_lengths(&octagon_geometry(), 0).unwrap_err(), GeodesicError::CapTooSmall);
    }

    #[test]
    fn relation_word_is_trivial() {
        // a0 a1⁻¹ a2 a3⁻¹ a0⁻¹ a1 a2⁻¹ a3 relates the side pairings.
        let g = octagon_geometry();
        let t = |k: usize| Su11::translation(k as f64 * std::f64::consts::FRAC_PI_4, g.pairing_length);
        let w = [t(0), t(1).inverse(), t(2), t(3).inverse(), t(0).inverse(), t(1), t(2).inverse(), t(3)]
            .into_iter()
            .reduce(Su11::mul)
            .unwrap();
        assert!((w.a.norm() - 1.0).abs() < 1e-9 && w.b.norm() < 1e-9, "{w:?}");
    }

    #[test]
    fn spectrum_is_sorted_and_positive() {
        let l = fuchsian_lengths(&octagon_geometry(), 3).unwrap();
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert!(l.iter().all(|&x| x > 0.0));
        assert!(l[0] > 3.05);
    }
}
