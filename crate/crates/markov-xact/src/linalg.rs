//! Internal dense linear-algebra helpers shared by the gap and path-space
//! modules. Thin wrappers over nalgebra with deterministic ordering.

use nalgebra::{Complex, DMatrix, DVector};

/// Singular values, sorted descending.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub(crate) fn largest_singular_value(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub(crate) fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Eigenvalues of a symmetric matrix, sorted descending. The input is
/// symmetrized explicitly so callers may pass matrices that are symmetric
/// only up to rounding.
pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Full complex spectrum of a real square matrix. Schur iteration with a
/// finite cap: heavily rank-deficient nonsymmetric matrices can defeat the
/// QR iteration, and an unbounded attempt would spin forever. Suitable for
/// small fixtures only, which is why production code goes through
/// `char_poly_pad_distance` instead.
#[cfg(test)]
pub(crate) fn complex_eigenvalues(
    m: &DMatrix<f64>,
) -> crate::error::Result<Vec<Complex<f64>>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| {
            crate::error::Error::InvariantViolation(
                "eigenvalue iteration did not converge".into(),
            )
        })?;
    let ev = schur.complex_eigenvalues();
    Ok(ev.iter().copied().collect())
}

/// Distance between the characteristic polynomial of `big` and that of
/// `small` padded with zero eigenvalues: max over probe points λ on the
/// circle |λ| = 2 of the relative difference between det(big − λI) and
/// (−λ)^{Δ}·det(small − λI), Δ = dim(big) − dim(small) (the (−1)^Δ factor
/// aligns the leading coefficients of the two determinant polynomials).
/// Zero (up to rounding) iff the spectrum of `big` is the spectrum of
/// `small` plus Δ zeros, multiplicities included. Both spectra must lie
/// inside the probe circle, which holds for row-stochastic matrices; every
/// probe then keeps |λ − eigenvalue| ≥ 1, so the determinants are well
/// conditioned.
pub(crate) fn char_poly_pad_distance(big: &DMatrix<f64>, small: &DMatrix<f64>) -> f64 {
    let nb = big.nrows();
    let ns = small.nrows();
    assert!(nb >= ns, "padding direction is big over small");
    let probes = nb + 1; // a degree-nb polynomial identity needs nb+1 points
    let mut worst = 0.0f64;
    for j in 0..probes {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / probes as f64;
        let lambda = Complex::new(2.0 * theta.cos(), 2.0 * theta.sin());
        let det_big = det_shifted(big, lambda);
        let det_pad = (-lambda).powu((nb - ns) as u32) * det_shifted(small, lambda);
        let scale = det_big.norm().max(det_pad.norm()).max(1.0);
        worst = worst.max((det_big - det_pad).norm() / scale);
    }
    worst
}

/// det(m − λI) through a complex LU factorization.
fn det_shifted(m: &DMatrix<f64>, lambda: Complex<f64>) -> Complex<f64> {
    let n = m.nrows();
    let shifted = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| {
        let mut c = Complex::new(m[(i, j)], 0.0);
        if i == j {
            c -= lambda;
        }
        c
    });
    shifted.lu().determinant()
}

/// Orthonormal basis of the orthogonal complement of `q` (unit vector),
/// as the last d−1 columns of the Householder reflector mapping q to ±e₁.
/// Returns the reflector vector w and its squared norm; apply with
/// `apply_householder_*`.
pub(crate) struct Reflector {
    w: DVector<f64>,
    w2: f64,
}

impl Reflector {
    pub(crate) fn from_unit(q: &DVector<f64>) -> Self {
        let mut w = q.clone();
        let alpha = if q[0] >= 0.0 { -1.0 } else { 1.0 };
        w[0] -= alpha;
        let w2 = w.dot(&w);
        Self { w, w2 }
    }

    /// H M H with H = I − 2wwᵀ/‖w‖², via two rank-1 updates.
    pub(crate) fn conjugate(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        if self.w2 == 0.0 {
            return m.clone();
        }
        let c = 2.0 / self.w2;
        let wt_m = self.w.transpose() * m; // 1×d
        let hm = m - (&self.w * wt_m) * c;
        let hm_w = &hm * &self.w; // d×1
        &hm - (hm_w * self.w.transpose()) * c
    }
}

/// Restriction of the conjugated matrix to the complement of q: drops the
/// first row and column of H M H.
pub(crate) fn project_complement(m: &DMatrix<f64>, q_unit: &DVector<f64>) -> DMatrix<f64> {
    let h = Reflector::from_unit(q_unit);
    let c = h.conjugate(m);
    let d = m.nrows();
    c.view((1, 1), (d - 1, d - 1)).into_owned()
}
