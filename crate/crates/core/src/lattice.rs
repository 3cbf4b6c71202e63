//! Lattice geometry and the coupling matrix K = m² − ∇² of the discretised
//! free scalar theory.
//!
//! A [`LatticeSpec`] is the identity of one cutoff theory: spatial dimension,
//! sites per axis, spacing `l` (the cutoff length), renormalised mass `m` and
//! boundary conditions. All internal computations run in dimensionless
//! lattice units (l = 1, m̃ = m·l) with the canonical pair normalised to
//! [φ_x, π_y] = i δ_xy; physical units appear only on input and output.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Dirichlet,
}

/// Finite-difference stencil convention used in the narrative dispersion.
///
/// Both stencils assemble the same symmetric second-difference quadratic
/// form Σ ((φ_{x+1} − φ_x)/l)²; the choice is recorded as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    #[default]
    Forward,
    Central,
}

/// Geometry, spacing and mass of one discretised free scalar theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    /// Spatial dimension, 1–3.
    pub dimension: usize,
    /// Sites per axis (total sites = sites_per_axis^dimension).
    pub sites_per_axis: usize,
    /// Lattice spacing, the cutoff length l (length units).
    pub spacing: f64,
    /// Renormalised mass m (inverse-length units).
    pub mass: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub stencil: Stencil,
}

impl LatticeSpec {
    /// Validate and construct a lattice spec.
    pub fn new(
        dimension: usize,
        sites_per_axis: usize,
        spacing: f64,
        mass: f64,
        boundary: Boundary,
        stencil: Stencil,
    ) -> Result<Self> {
        let spec = Self {
            dimension,
            sites_per_axis,
            spacing,
            mass,
            boundary,
            stencil,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Re-run construction validation (deserialized specs bypass `new`).
    pub fn validate(&self) -> Result<()> {
        let Self {
            dimension,
            sites_per_axis,
            spacing,
            mass,
            boundary,
            ..
        } = *self;
        if !(1..=3).contains(&dimension) {
            return Err(Error::Validation(format!(
                "dimension must be 1..=3, got {dimension}"
            )));
        }
        if sites_per_axis == 0 {
            return Err(Error::Validation("sites_per_axis must be >= 1".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Validation(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::Validation(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if mass == 0.0 {
            // The k = 0 mode of a periodic lattice has frequency exactly m.
            return match boundary {
                Boundary::Periodic => Err(Error::ZeroMode),
                Boundary::Dirichlet => {
                    Err(Error::Validation("mass must be positive, got 0".into()))
                }
            };
        }
        // Total site count must fit the index range.
        let mut total: usize = 1;
        for _ in 0..dimension {
            total = total
                .checked_mul(sites_per_axis)
                .ok_or_else(|| Error::Validation("site count overflows index range".into()))?;
        }
        Ok(())
    }

    /// Convenience constructor for 1D periodic lattices with the default stencil.
    pub fn periodic_1d(sites: usize, spacing: f64, mass: f64) -> Result<Self> {
        Self::new(1, sites, spacing, mass, Boundary::Periodic, Stencil::Forward)
    }

    /// Total number of sites.
    pub fn sites(&self) -> usize {
        self.sites_per_axis.pow(self.dimension as u32)
    }

    /// Mass in lattice units, m̃ = m · l.
    pub fn mass_lattice(&self) -> f64 {
        self.mass * self.spacing
    }

    /// Physical extent along one axis, N · l.
    pub fn extent(&self) -> f64 {
        self.sites_per_axis as f64 * self.spacing
    }

    /// Flat index of a multi-index (row-major).
    pub fn flat_index(&self, coords: &[usize]) -> usize {
        let n = self.sites_per_axis;
        coords.iter().fold(0, |acc, &c| acc * n + c)
    }

    /// Multi-index of a flat index.
    pub fn coords(&self, site: usize) -> Vec<usize> {
        let n = self.sites_per_axis;
        let mut c = vec![0; self.dimension];
        let mut s = site;
        for i in (0..self.dimension).rev() {
            c[i] = s % n;
            s /= n;
        }
        c
    }

    /// Nearest neighbours of a site, respecting the boundary condition.
    /// Each undirected edge appears once in `edges()`, not here.
    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        let n = self.sites_per_axis;
        let c = self.coords(site);
        let mut out = Vec::with_capacity(2 * self.dimension);
        for axis in 0..self.dimension {
            for dir in [1isize, -1] {
                let x = c[axis] as isize + dir;
                match self.boundary {
                    Boundary::Periodic => {
                        if n > 1 {
                            let mut cc = c.clone();
                            cc[axis] = x.rem_euclid(n as isize) as usize;
                            out.push(self.flat_index(&cc));
                        }
                    }
                    Boundary::Dirichlet => {
                        if x >= 0 && (x as usize) < n {
                            let mut cc = c.clone();
                            cc[axis] = x as usize;
                            out.push(self.flat_index(&cc));
                        }
                    }
                }
            }
        }
        out
    }

    /// Directed difference edges (x, x+ê_a) entering the quadratic form
    /// Σ (φ_{x+ê} − φ_x)². Periodic: one wrap edge per axis line; N = 1
    /// contributes none (a single decoupled oscillator).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.sites_per_axis;
        let mut out = Vec::new();
        for site in 0..self.sites() {
            let c = self.coords(site);
            for axis in 0..self.dimension {
                match self.boundary {
                    Boundary::Periodic => {
                        if n > 1 {
                            let mut cc = c.clone();
                            cc[axis] = (c[axis] + 1) % n;
                            out.push((site, self.flat_index(&cc)));
                        }
                    }
                    Boundary::Dirichlet => {
                        if c[axis] + 1 < n {
                            let mut cc = c.clone();
                            cc[axis] = c[axis] + 1;
                            out.push((site, self.flat_index(&cc)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Lattice graph distance from every site to the nearest site of `sources`
    /// (multi-source BFS). `usize::MAX` never occurs for nonempty sources on a
    /// connected lattice.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let total = self.sites();
        let mut dist = vec![usize::MAX; total];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// True if the lattice is translation invariant.
    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }
}

/// The lattice realisation of K = m² − ∇², in physical (inverse-length²)
/// units: diagonal m² + 2·dimension/l², −1/l² on nearest-neighbour pairs.
///
/// Its square roots determine the vacuum covariances; `spec` records
/// provenance and the stencil convention used for dispersion bookkeeping.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    entries: DMatrix<f64>,
    spec: LatticeSpec,
}

impl CouplingMatrix {
    /// Assemble K from a spec by expanding Σ ((φ_{x+ê} − φ_x)/l)² + m²φ².
    pub fn from_spec(spec: &LatticeSpec) -> Self {
        let total = spec.sites();
        let inv_l2 = 1.0 / (spec.spacing * spec.spacing);
        let m2 = spec.mass * spec.mass;
        let mut k = DMatrix::zeros(total, total);
        for i in 0..total {
            k[(i, i)] = m2;
        }
        for (a, b) in spec.edges() {
            // (φ_b − φ_a)²/l² = (φ_a² + φ_b² − 2 φ_a φ_b)/l²
            k[(a, a)] += inv_l2;
            k[(b, b)] += inv_l2;
            k[(a, b)] -= inv_l2;
            k[(b, a)] -= inv_l2;
        }
        Self {
            entries: k,
            spec: spec.clone(),
        }
    }

    /// Wrap an explicit symmetric matrix (used by tests and decoupled-site
    /// constructions). Fails if not symmetric to 1e-12 relative.
    pub fn from_entries(entries: DMatrix<f64>, spec: LatticeSpec) -> Result<Self> {
        if entries.nrows() != spec.sites() || !entries.is_square() {
            return Err(Error::Validation(format!(
                "matrix size {} does not match {} sites",
                entries.nrows(),
                spec.sites()
            )));
        }
        let scale = entries.amax().max(f64::MIN_POSITIVE);
        for i in 0..entries.nrows() {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Validation("matrix not symmetric".into()));
                }
            }
        }
        Ok(Self { entries, spec })
    }

    /// Entries in physical inverse-length² units.
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Entries in lattice units, K̃ = l²·K (diagonal m̃² + 2·dimension).
    pub fn entries_lattice(&self) -> DMatrix<f64> {
        let l2 = self.spec.spacing * self.spec.spacing;
        &self.entries * l2
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Stencil convention recorded in output metadata.
    pub fn stencil(&self) -> Stencil {
        self.spec.stencil
    }

    /// Matrix size (= total sites).
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Export as CSV rows (row-major) for debugging.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|j| format!("{:.16e}", self.entries[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_valid_specs() {
        let s = LatticeSpec::periodic_1d(3, 1.0, 1.0).unwrap();
        assert_eq!(s.sites(), 3);
        let s2 = LatticeSpec::new(2, 8, 0.25, 2.0, Boundary::Periodic, Stencil::Forward).unwrap();
        assert_eq!(s2.sites(), 64);
    }

    #[test]
    fn rejects_massless_periodic() {
        let err = LatticeSpec::periodic_1d(4, 0.5, 0.0).unwrap_err();
        assert!(matches!(err, Error::ZeroMode));
        assert!(err.to_string().contains("zero mode"));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LatticeSpec::periodic_1d(3, -1.0, 1.0).is_err());
        assert!(LatticeSpec::periodic_1d(3, 1.0, -1.0).is_err());
        assert!(LatticeSpec::periodic_1d(0, 1.0, 1.0).is_err());
        assert!(LatticeSpec::new(4, 3, 1.0, 1.0, Boundary::Periodic, Stencil::Forward).is_err());
        assert!(
            LatticeSpec::new(1, 4, 1.0, 0.0, Boundary::Dirichlet, Stencil::Forward).is_err()
        );
    }

    #[test]
    fn coupling_matrix_n3() {
        let spec = LatticeSpec::periodic_1d(3, 1.0, 1.0).unwrap();
        let k = CouplingMatrix::from_spec(&spec);
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[3.0, -1.0, -1.0, -1.0, 3.0, -1.0, -1.0, -1.0, 3.0],
        );
        assert_eq!(k.entries(), &expected);
    }

    #[test]
    fn coupling_matrix_single_site() {
        let spec = LatticeSpec::periodic_1d(1, 1.0, 2.0).unwrap();
        let k = CouplingMatrix::from_spec(&spec);
        assert_eq!(k.entries()[(0, 0)], 4.0);
        assert_eq!(k.size(), 1);
    }

    #[test]
    fn coupling_matrix_row_structure() {
        // Sparsity pattern, exact entries, symmetry for N >= 3.
        for (dim, n, l, m) in [(1usize, 6usize, 0.5, 0.7), (2, 4, 1.0, 1.3), (3, 3, 2.0, 0.4)] {
            let spec =
                LatticeSpec::new(dim, n, l, m, Boundary::Periodic, Stencil::Forward).unwrap();
            let k = CouplingMatrix::from_spec(&spec);
            let inv_l2 = 1.0 / (l * l);
            let diag = m * m + 2.0 * dim as f64 * inv_l2;
            for i in 0..spec.sites() {
                assert!((k.entries()[(i, i)] - diag).abs() < 1e-12 * diag);
                let nbrs = spec.neighbors(i);
                for j in 0..spec.sites() {
                    if i == j {
                        continue;
                    }
                    let expected = if nbrs.contains(&j) { -inv_l2 } else { 0.0 };
                    assert_eq!(k.entries()[(i, j)], expected, "entry ({i},{j})");
                    assert_eq!(k.entries()[(i, j)], k.entries()[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn dirichlet_has_no_wrap() {
        let spec = LatticeSpec::new(1, 4, 1.0, 1.0, Boundary::Dirichlet, Stencil::Forward).unwrap();
        let k = CouplingMatrix::from_spec(&spec);
        assert_eq!(k.entries()[(0, 3)], 0.0);
        // end sites see one difference edge
        assert_eq!(k.entries()[(0, 0)], 2.0);
        assert_eq!(k.entries()[(1, 1)], 3.0);
    }

    #[test]
    fn units_round_trip() {
        let spec = LatticeSpec::periodic_1d(16, 0.37, 2.9).unwrap();
        let m_lat = spec.mass_lattice();
        let m_back = m_lat / spec.spacing;
        assert!((m_back - spec.mass).abs() <= 1e-12 * spec.mass);
        let k = CouplingMatrix::from_spec(&spec);
        let k_lat = k.entries_lattice();
        let k_back = &k_lat / (spec.spacing * spec.spacing);
        let diff = (&k_back - k.entries()).amax();
        assert!(diff <= 1e-12 * k.entries().amax());
    }

    #[test]
    fn graph_distances_periodic() {
        let spec = LatticeSpec::periodic_1d(10, 1.0, 1.0).unwrap();
        let d = spec.distances_from(&[0, 1, 2]);
        assert_eq!(d[2], 0);
        assert_eq!(d[3], 1);
        assert_eq!(d[9], 1); // wraps
        assert_eq!(d[6], 4);
    }
}
