//! Bell-basis cyclicity demo: operations on one qubit of a maximally
//! entangled pair generate the whole two-qubit basis, the finite-dimensional
//! mirror of vacuum cyclicity under local algebras.
//!
//! States are ordered |00⟩, |01⟩, |10⟩, |11⟩. The single-qubit maps are
//! M_A = diag(1, −1), M_B = offdiag(1, 1) and M_C = [[0, −1], [1, 0]]
//! (M_C|0⟩ = |1⟩, M_C|1⟩ = −|0⟩), which sends |B1⟩ exactly to |B4⟩.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::Serialize;

/// Residuals of the Bell-basis identities; all are ≤ 1e-15 by construction.
#[derive(Debug, Clone, Serialize)]
pub struct BellRecord {
    /// max |(M_A⊗1)|B1⟩ − |B2⟩|
    pub residual_a: f64,
    /// max |(M_B⊗1)|B1⟩ − |B3⟩|
    pub residual_b: f64,
    /// max |(M_C⊗1)|B1⟩ − |B4⟩|
    pub residual_c: f64,
    /// max |⟨Bi|Bj⟩ − δ_ij|
    pub orthonormality_residual: f64,
    /// |det[B1 B2 B3 B4]| (1 for a spanning orthonormal set)
    pub span_determinant: f64,
    pub pass: bool,
}

fn kron_with_identity(m: &Matrix2<f64>) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(2 * i, 2 * j)] = m[(i, j)];
            out[(2 * i + 1, 2 * j + 1)] = m[(i, j)];
        }
    }
    out
}

/// The four Bell states as columns in the |00⟩,|01⟩,|10⟩,|11⟩ basis.
pub fn bell_basis() -> [Vector4<f64>; 4] {
    let s = 1.0 / 2.0f64.sqrt();
    [
        Vector4::new(s, 0.0, 0.0, s),   // B1 = (|00⟩ + |11⟩)/√2
        Vector4::new(s, 0.0, 0.0, -s),  // B2 = (|00⟩ − |11⟩)/√2
        Vector4::new(0.0, s, s, 0.0),   // B3 = (|10⟩ + |01⟩)/√2
        Vector4::new(0.0, -s, s, 0.0),  // B4 = (|10⟩ − |01⟩)/√2
    ]
}

/// Verify the three mapping identities and that {|Bi⟩} is an orthonormal
/// spanning set. Self-contained 4-dimensional computation.
pub fn bell_demo() -> BellRecord {
    let [b1, b2, b3, b4] = bell_basis();
    let m_a = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let m_b = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    let m_c = Matrix2::new(0.0, -1.0, 1.0, 0.0);

    let residual_a = (kron_with_identity(&m_a) * b1 - b2).amax();
    let residual_b = (kron_with_identity(&m_b) * b1 - b3).amax();
    let residual_c = (kron_with_identity(&m_c) * b1 - b4).amax();

    let basis = [b1, b2, b3, b4];
    let mut orthonormality_residual = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let dot = basis[i].dot(&basis[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality_residual = orthonormality_residual.max((dot - target).abs());
        }
    }
    let span = Matrix4::from_columns(&basis);
    let span_determinant = span.determinant().abs();

    let pass = residual_a <= 1e-15
        && residual_b <= 1e-15
        && residual_c <= 1e-15
        && orthonormality_residual <= 1e-15
        && (span_determinant - 1.0).abs() <= 1e-15;

    BellRecord {
        residual_a,
        residual_b,
        residual_c,
        orthonormality_residual,
        span_determinant,
        pass,
    }
}
