//! Hyperbolic splittings `R^{2n} = V⁻(M) ⊕ V⁺(M)` and relative dimensions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat, RANK_RTOL};

/// Invariance residual budget, relative to `max(1, ||M||)`.
pub const TOL_INVARIANCE: f64 = 1e-10;

/// `min |Re μ|` over the eigenvalues of `m`.
pub fn hyperbolicity_margin(m: &Mat) -> f64 {
    linalg::complex_eigenvalues(&linalg::to_complex(m))
        .iter()
        .fold(f64::INFINITY, |a, z| a.min(z.re.abs()))
}

/// No eigenvalue within `tol` of the imaginary axis.
pub fn is_hyperbolic(m: &Mat, tol: f64) -> bool {
    hyperbolicity_margin(m) > tol
}

/// Orthonormal frames of the stable (`Re < 0`) and unstable (`Re > 0`)
/// invariant subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub stable: Mat,
    pub unstable: Mat,
    pub margin: f64,
    /// `max ||(I - P) M P||` over both frames.
    pub invariance_residual: f64,
}

/// Swap adjacent diagonal entries `k, k+1` of an upper-triangular `t` by a
/// Givens rotation, accumulating into `q`.
fn swap_adjacent(t: &mut CMat, q: &mut CMat, k: usize) {
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let c = t[(k, k + 1)];
    // Eigenvector of [[a, c], [0, b]] for b becomes the first basis vector.
    let x1 = c;
    let x2 = b - a;
    let r = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
    if r == 0.0 {
        return;
    }
    let (g1, g2) = (x1 / r, x2 / r);
    // G = [[g1, -conj(g2)], [g2, conj(g1)]]
    let n = t.nrows();
    for j in 0..n {
        let (u, v) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = g1.conj() * u + g2.conj() * v;
        t[(k + 1, j)] = -g2 * u + g1 * v;
    }
    for i in 0..n {
        let (u, v) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = u * g1 + v * g2;
        t[(i, k + 1)] = -u * g2.conj() + v * g1.conj();
    }
    for i in 0..q.nrows() {
        let (u, v) = (q[(i, k)], q[(i, k + 1)]);
        q[(i, k)] = u * g1 + v * g2;
        q[(i, k + 1)] = -u * g2.conj() + v * g1.conj();
    }
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
}

fn invariance_residual(m: &Mat, frame: &Mat) -> f64 {
    let dim = m.nrows();
    let p = frame * frame.transpose();
    let r = (Mat::identity(dim, dim) - &p) * m * &p;
    linalg::spectral_norm(&r)
}

/// Real orthonormal frame of a conjugation-invariant complex subspace.
fn real_frame(qk: &CMat, k: usize) -> Result<Mat> {
    let re = qk.map(|z| z.re);
    let im = qk.map(|z| z.im);
    let basis = linalg::orthonormal_basis(&linalg::hstack(&re, &im), 1e-6);
    if basis.ncols() != k {
        return Err(Error::RankDeficient { expected: k, found: basis.ncols() });
    }
    Ok(basis)
}

/// Frame of the `Re < 0` invariant subspace: the leading Schur vectors after
/// bubbling the stable eigenvalues to the front.
fn leading_stable_frame(m: &Mat) -> Result<Mat> {
    let dim = m.nrows();
    let (mut q, mut t) = linalg::to_complex(m).schur().unpack();
    loop {
        let mut swapped = false;
        for k in 0..dim.saturating_sub(1) {
            if t[(k, k)].re > 0.0 && t[(k + 1, k + 1)].re < 0.0 {
                swap_adjacent(&mut t, &mut q, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let k = (0..dim).filter(|&i| t[(i, i)].re < 0.0).count();
    real_frame(&q.columns(0, k).into_owned(), k)
}

/// Stable/unstable splitting by a complex Schur form reordered with Givens swaps.
pub fn stable_unstable_splitting(m: &Mat) -> Result<Splitting> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch(format!("matrix of shape {:?}", m.shape())));
    }
    let margin = hyperbolicity_margin(m);
    if !(margin > crate::hamiltonian::family::TOL_HYPERBOLIC) {
        return Err(Error::NotHyperbolic { margin });
    }
    let stable = leading_stable_frame(m)?;
    // Trailing Schur vectors span the orthogonal complement, which is not
    // invariant for non-normal input; the unstable space is the stable space of -M.
    let unstable = leading_stable_frame(&(-m))?;
    if stable.ncols() + unstable.ncols() != dim {
        return Err(Error::RankDeficient { expected: dim, found: stable.ncols() + unstable.ncols() });
    }
    let scale = linalg::spectral_norm(m).max(1.0);
    let residual = invariance_residual(m, &stable).max(invariance_residual(m, &unstable));
    if residual > TOL_INVARIANCE * scale {
        return Err(Error::Structure { what: "invariant subspace", residual, tol: TOL_INVARIANCE * scale });
    }
    Ok(Splitting { stable, unstable, margin, invariance_residual: residual })
}

/// `dim(V, W) = dim(W ∩ V^⊥) - dim(W^⊥ ∩ V)` by rank arithmetic.
pub fn relative_dimension(v: &Mat, w: &Mat) -> Result<i64> {
    let dim = v.nrows();
    if w.nrows() != dim {
        return Err(Error::DimensionMismatch(format!("ambient dimensions {dim} and {}", w.nrows())));
    }
    let vb = linalg::orthonormal_basis(v, RANK_RTOL);
    let wb = linalg::orthonormal_basis(w, RANK_RTOL);
    let vperp = linalg::orthogonal_complement(&vb);
    let wperp = linalg::orthogonal_complement(&wb);
    let meet = |a: &Mat, b: &Mat| -> i64 {
        let stacked = linalg::hstack(a, b);
        (a.ncols() + b.ncols()) as i64 - linalg::rank(&stacked, RANK_RTOL) as i64
    };
    Ok(meet(&wb, &vperp) - meet(&wperp, &vb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{standard_j, subspace_gap};

    #[test]
    fn hyperbolicity_examples() {
        let jb = standard_j(1) * Mat::from_diagonal(&linalg::col(&[1.0, -1.0]));
        assert!(is_hyperbolic(&jb, 1e-8));
        assert!((hyperbolicity_margin(&jb) - 1.0).abs() < 1e-12);
        assert!(!is_hyperbolic(&standard_j(1), 1e-8));
        assert!(is_hyperbolic(&Mat::from_diagonal(&linalg::col(&[2.0, -3.0])), 1e-8));
    }

    #[test]
    fn diagonal_splitting() {
        let s = stable_unstable_splitting(&Mat::from_diagonal(&linalg::col(&[-1.0, 2.0]))).unwrap();
        let e1 = Mat::from_column_slice(2, 1, &[1.0, 0.0]);
        let e2 = Mat::from_column_slice(2, 1, &[0.0, 1.0]);
        assert!(subspace_gap(&s.stable, &e1).unwrap() < 1e-12);
        assert!(subspace_gap(&s.unstable, &e2).unwrap() < 1e-12);
    }

    #[test]
    fn saddle_splitting_and_decay() {
        let jb = standard_j(1) * Mat::from_diagonal(&linalg::col(&[1.0, -1.0]));
        let s = stable_unstable_splitting(&jb).unwrap();
        let r = 0.5f64.sqrt();
        let minus = Mat::from_column_slice(2, 1, &[r, -r]);
        let plus = Mat::from_column_slice(2, 1, &[r, r]);
        assert!(subspace_gap(&s.stable, &minus).unwrap() < 1e-12);
        assert!(subspace_gap(&s.unstable, &plus).unwrap() < 1e-12);
        let x = s.stable.column(0).into_owned();
        assert!((linalg::expm(&(&jb * 5.0)) * &x).norm() < 1e-2 * x.norm());
    }

    #[test]
    fn non_normal_splitting_is_invariant() {
        // Oracle: eigenvectors of [[0, a], [b, 0]] are (±sqrt(a), sqrt(b)).
        let m = Mat::from_row_slice(2, 2, &[0.0, 0.99, 1.01, 0.0]);
        let s = stable_unstable_splitting(&m).unwrap();
        let minus = Mat::from_column_slice(2, 1, &[-0.99f64.sqrt(), 1.01f64.sqrt()]) / 2f64.sqrt();
        let plus = Mat::from_column_slice(2, 1, &[0.99f64.sqrt(), 1.01f64.sqrt()]) / 2f64.sqrt();
        assert!(subspace_gap(&s.stable, &minus).unwrap() < 1e-12);
        assert!(subspace_gap(&s.unstable, &plus).unwrap() < 1e-12);
        assert!(s.invariance_residual < 1e-12);
    }

    #[test]
    fn relative_dimension_examples() {
        let e = Mat::identity(4, 4);
        let v = e.columns(0, 1).into_owned();
        let w = e.columns(0, 2).into_owned();
        assert_eq!(relative_dimension(&v, &v).unwrap(), 0);
        assert_eq!(relative_dimension(&v, &w).unwrap(), 1);
        assert_eq!(relative_dimension(&w, &v).unwrap(), -1);
    }
}
