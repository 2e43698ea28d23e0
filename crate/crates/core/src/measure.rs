//! Finite signed measures: atom lists plus an optional grid density.
//! Home of the fractional-variation measures and the discrete delta pairs.

use crate::error::{FracError, Result};
use crate::grid::{pair, GridField};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T: Scalar> {
    pub loc: [T; 2],
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure<T: Scalar> {
    pub atoms: Vec<Atom<T>>,
    pub density: Option<GridField<T>>,
}

impl<T: Scalar> SignedMeasure<T> {
    pub fn from_atoms(atoms: Vec<Atom<T>>) -> Self {
        Self { atoms, density: None }
    }

    pub fn delta(loc: [T; 2], weight: T) -> Self {
        Self::from_atoms(vec![Atom { loc, weight }])
    }

    /// delta_a - delta_b in one dimension.
    pub fn delta_pair_1d(a: T, b: T) -> Self {
        Self::from_atoms(vec![
            Atom { loc: [a, T::zero()], weight: T::one() },
            Atom { loc: [b, T::zero()], weight: -T::one() },
        ])
    }

    pub fn from_density(density: GridField<T>) -> Self {
        Self { atoms: Vec::new(), density: Some(density) }
    }

    /// Total variation: sum of |atom weights| plus the cell mass of the density.
    pub fn total_variation(&self) -> T {
        let mut tv = self.atoms.iter().fold(T::zero(), |s, a| s + a.weight.abs());
        if let Some(d) = &self.density {
            let w = d.grid().cell_volume();
            let mut m = T::zero();
            for i in 0..d.grid().num_cells() {
                let mut s2 = T::zero();
                for c in 0..d.components() {
                    let v = d.comp(c)[i];
                    s2 += v * v;
                }
                m += s2.sqrt();
            }
            tv += m * w;
        }
        tv
    }

    /// Mass |mu|(B_r(x)): atoms inside the closed ball plus density cells
    /// whose centers fall inside.
    pub fn mass_on_ball(&self, x: [T; 2], r: T) -> T {
        let mut m = T::zero();
        for a in &self.atoms {
            if dist(a.loc, x) <= r {
                m += a.weight.abs();
            }
        }
        if let Some(d) = &self.density {
            let w = d.grid().cell_volume();
            for i in 0..d.grid().num_cells() {
                if dist(d.grid().coords(i), x) <= r {
                    let mut s2 = T::zero();
                    for c in 0..d.components() {
                        let v = d.comp(c)[i];
                        s2 += v * v;
                    }
                    m += s2.sqrt() * w;
                }
            }
        }
        m
    }
}

fn dist<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Pairing of a continuous test field against a measure:
/// sum of weight * phi(atom) (multilinear interpolation) plus the grid
/// pairing with the density part.
///
/// For a vector test field against a vector measure density the pairing is
/// the dot product; atoms of a scalar measure pair against component 0.
pub fn pair_measure<T: Scalar>(phi: &GridField<T>, mu: &SignedMeasure<T>) -> Result<T> {
    let mut s = T::zero();
    for a in &mu.atoms {
        if !phi.grid().contains(a.loc) {
            return Err(FracError::AtomOutsideBox(a.loc[0].f64(), a.loc[1].f64()));
        }
        s += a.weight * phi.interp(0, a.loc)?;
    }
    if let Some(d) = &mu.density {
        s += pair(phi, d)?;
    }
    Ok(s)
}

/// Pushforward by translation: atoms shift by `v`, the density shifts with
/// interpolation; weights are untouched. Errors if an atom leaves the box.
pub fn translate_measure<T: Scalar>(mu: &SignedMeasure<T>, v: [T; 2]) -> Result<SignedMeasure<T>> {
    let mut atoms = Vec::with_capacity(mu.atoms.len());
    for a in &mu.atoms {
        let loc = [a.loc[0] + v[0], a.loc[1] + v[1]];
        if let Some(d) = &mu.density {
            if !d.grid().contains(loc) {
                return Err(FracError::AtomOutsideBox(loc[0].f64(), loc[1].f64()));
            }
        }
        atoms.push(Atom { loc, weight: a.weight });
    }
    let density = match &mu.density {
        None => None,
        Some(d) => {
            let g = *d.grid();
            let mut shifted = d.clone();
            for c in 0..d.components() {
                let mut vals = vec![T::zero(); g.num_cells()];
                for (i, slot) in vals.iter_mut().enumerate() {
                    let p = g.coords(i);
                    let q = [p[0] - v[0], p[1] - v[1]];
                    *slot = d.interp(c, q).unwrap_or(T::zero());
                }
                shifted.comp_mut(c).copy_from_slice(&vals);
            }
            Some(shifted)
        }
    };
    Ok(SignedMeasure { atoms, density })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridField};
    use approx::assert_relative_eq;

    fn grid() -> Grid<f64> {
        Grid::new(1, 256, 4.0).unwrap()
    }

    #[test]
    fn constant_test_field_cancels_delta_pair() {
        let mu = SignedMeasure::delta_pair_1d(0.0, 1.0);
        let one = GridField::constant(grid(), 1.0);
        assert_relative_eq!(pair_measure(&one, &mu).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn linear_test_field_sees_the_gap() {
        let mu = SignedMeasure::delta_pair_1d(0.0, 1.0);
        let x = GridField::from_fn(grid(), |p| p[0]);
        // phi(0) - phi(1) = -1
        assert_relative_eq!(pair_measure(&x, &mu).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn atom_outside_box_rejected() {
        let mu = SignedMeasure::delta([17.0, 0.0], 1.0);
        let one = GridField::constant(grid(), 1.0);
        assert!(pair_measure(&one, &mu).is_err());
    }

    #[test]
    fn translate_delta() {
        let mu = SignedMeasure::delta([0.0, 0.0], 1.0);
        let t = translate_measure(&mu, [1.0, 0.0]).unwrap();
        assert_relative_eq!(t.atoms[0].loc[0], 1.0);
        assert_relative_eq!(t.total_variation(), mu.total_variation());
    }

    #[test]
    fn translate_roundtrip_identity() {
        let mu = SignedMeasure::delta_pair_1d(-0.5, 0.75);
        let t = translate_measure(&translate_measure(&mu, [0.25, 0.0]).unwrap(), [-0.25, 0.0])
            .unwrap();
        for (a, b) in mu.atoms.iter().zip(t.atoms.iter()) {
            assert_relative_eq!(a.loc[0], b.loc[0], epsilon = 1e-14);
            assert_relative_eq!(a.weight, b.weight);
        }
    }

    #[test]
    fn mass_on_ball_counts_atoms() {
        let mu = SignedMeasure::delta_pair_1d(0.0, 1.0);
        assert_relative_eq!(mu.mass_on_ball([0.0, 0.0], 0.5), 1.0);
        assert_relative_eq!(mu.mass_on_ball([0.5, 0.0], 1.0), 2.0);
    }
}
