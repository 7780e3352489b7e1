//! Dense linear algebra helpers shared by every module.
//!
//! Rank decisions are relative: a singular value counts when it exceeds
//! `RANK_RTOL` times the largest one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub const RANK_RTOL: f64 = 1e-8;

/// Singular values in descending order.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Operator 2-norm.
pub fn spectral_norm(m: &Mat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Operator 2-norm of a complex matrix.
pub fn spectral_norm_c(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().iter().fold(0.0f64, |acc, &s| acc.max(s))
}

/// 2-norm of a symmetric matrix via its eigenvalues.
pub fn symmetric_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Numerical rank with threshold `rtol * sigma_max`.
pub fn rank(m: &Mat, rtol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > rtol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the column space, ordered by decreasing singular value.
pub fn orthonormal_basis(m: &Mat, rtol: f64) -> Mat {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Mat::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    if smax == 0.0 {
        return Mat::zeros(rows, 0);
    }
    let mut idx: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > rtol * smax).collect();
    idx.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    Mat::from_fn(rows, idx.len(), |i, j| u[(i, idx[j])])
}

/// Orthonormal basis of the orthogonal complement of an orthonormal frame.
pub fn orthogonal_complement(frame: &Mat) -> Mat {
    let dim = frame.nrows();
    let k = frame.ncols();
    if k == 0 {
        return Mat::identity(dim, dim);
    }
    if k >= dim {
        return Mat::zeros(dim, 0);
    }
    // I - F F^T has eigenvalue 1 on the complement and 0 on the span.
    let p = Mat::identity(dim, dim) - frame * frame.transpose();
    let eig = symmetrize(&p).symmetric_eigen();
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let keep = dim - k;
    let raw = Mat::from_fn(dim, keep, |i, j| eig.eigenvectors[(i, idx[j])]);
    qr_orthonormalize(&raw)
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn null_space(m: &Mat, rtol: f64) -> Mat {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return Mat::identity(cols, cols);
    }
    let row_space = orthonormal_basis(&m.transpose(), rtol);
    orthogonal_complement(&row_space)
}

/// Orthonormal basis of `{x : m x = 0}` with an absolute singular-value
/// threshold, for matrices whose entries are already normalised.
pub fn null_space_abs(m: &Mat, atol: f64) -> Mat {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return Mat::identity(cols, cols);
    }
    let svd = m.transpose().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let idx: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > atol).collect();
    let row_space = Mat::from_fn(cols, idx.len(), |i, j| u[(i, idx[j])]);
    orthogonal_complement(&row_space)
}

/// Thin QR factor of a full-column-rank matrix with a sign convention
/// making the diagonal of R nonnegative.
pub fn qr_orthonormalize(m: &Mat) -> Mat {
    if m.ncols() == 0 {
        return m.clone();
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            let mut c = q.column_mut(j);
            c.neg_mut();
        }
    }
    q
}

/// `(m + m^T) / 2`.
pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    let eig = symmetrize(m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Mat::from_fn(n, n, |i, j| eig.eigenvectors[(i, idx[j])]);
    (vals, vecs)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of a general complex matrix via its complex Schur form.
pub fn complex_eigenvalues(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenvalues of a (numerically) unitary matrix.
///
/// `U` is normal, so a generic Hermitian combination `cos θ H + sin θ K` of
/// `H = (U + U*)/2` and `K = (U - U*)/2i` shares its eigenvectors; the
/// eigenvalues are the Rayleigh quotients. Angles are tried until the
/// residual `max_j ||U v_j - z_j v_j||` is below `1e-9`; general Schur is the last resort.
pub fn unitary_eigenvalues(u: &CMat) -> Vec<Complex64> {
    let n = u.nrows();
    if n == 0 {
        return Vec::new();
    }
    let i = Complex64::new(0.0, 1.0);
    let h = (u + u.adjoint()) * Complex64::new(0.5, 0.0);
    let k = (u - u.adjoint()) * (-0.5 * i);
    for theta in [0.61803, 1.91322, 2.71828, 0.30103] {
        let (c, s) = (Complex64::new(f64::cos(theta), 0.0), Complex64::new(f64::sin(theta), 0.0));
        let mut g = &h * c + &k * s;
        g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
        let v = nalgebra::SymmetricEigen::new(g).eigenvectors;
        let uv = u * &v;
        let z: Vec<Complex64> = (0..n).map(|j| v.column(j).dotc(&uv.column(j))).collect();
        let residual = (0..n)
            .map(|j| (uv.column(j) - v.column(j) * z[j]).norm())
            .fold(0.0f64, f64::max);
        if residual <= 1e-9 {
            return z;
        }
    }
    complex_eigenvalues(u)
}

/// Embed a real matrix into the complex field.
pub fn to_complex(m: &Mat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest entry magnitude.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

/// Block-diagonal matrix `diag(a, b)`.
pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let mut out = Mat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Horizontal concatenation `[a | b]`.
pub fn hstack(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut out = Mat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Vertical concatenation `[a; b]`.
pub fn vstack(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut out = Mat::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Matrix exponential by scaling and squaring with a Taylor core.
/// Only used as an independent reference in checks.
pub fn expm(m: &Mat) -> Mat {
    let n = m.nrows();
    let norm = m.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
    let s = (norm.log2().ceil() as i32 + 1).max(0);
    let a = m / 2f64.powi(s);
    let mut term = Mat::identity(n, n);
    let mut sum = Mat::identity(n, n);
    for k in 1..30 {
        term = &term * &a / k as f64;
        sum += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Column vector from a slice.
pub fn col(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_eigenvalues_handle_repeated_phases() {
        // Q diag(-1, -1, i) Q* with Q a complex rotation; oracle is the diagonal.
        let (c, s) = (0.6, 0.8);
        let q = CMat::from_row_slice(
            3,
            3,
            &[
                Complex64::new(c, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, 0.0),
                Complex64::new(0.0, s), Complex64::new(c, 0.0), Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
            ],
        );
        let d = CMat::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ]));
        let u = &q * d * q.adjoint();
        let mut z = unitary_eigenvalues(&u);
        z.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((z[0] + 1.0).norm() < 1e-12 && (z[1] + 1.0).norm() < 1e-12);
        assert!((z[2] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let u = col(&[1.0, 2.0, 3.0]);
        let m = &u * u.transpose();
        assert_eq!(rank(&m, RANK_RTOL), 1);
    }

    #[test]
    fn null_space_is_annihilated_and_orthonormal() {
        let m = Mat::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let k = null_space(&m, RANK_RTOL);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - Mat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn complement_spans_the_rest() {
        let f = Mat::from_column_slice(3, 1, &[0.0, 0.6, 0.8]);
        let c = orthogonal_complement(&f);
        assert_eq!(c.ncols(), 2);
        assert!((f.transpose() * &c).norm() < 1e-12);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let j = Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = expm(&(j * 0.7));
        assert!((e[(0, 0)] - 0.7f64.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - 0.7f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn symmetric_eigenvalues_sorted() {
        let m = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]);
        assert_eq!(symmetric_eigenvalues(&m), vec![-1.0, 2.0]);
    }
}
