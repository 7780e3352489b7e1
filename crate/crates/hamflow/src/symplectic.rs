//! Symplectic and Lagrangian linear algebra on `R^{2n}`.
//!
//! A space carries a compatible complex structure `J` (`J^2 = -I`,
//! `J^T = -J`) and an orthogonal basis `Q` adapted to it, so that
//! `Q^T J Q` is the standard block form. Complexification always happens
//! in the adapted coordinates `z_k = x_k + i x_{n+k}`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat, RANK_RTOL};
use num_complex::Complex64;

pub const TOL_STRUCTURE: f64 = 1e-10;
pub const TOL_FRAME: f64 = 1e-10;
pub const TOL_EIG: f64 = 1e-6;
pub const TOL_UNITARY: f64 = 1e-10;
/// Commutation tolerance for products built from numerically propagated frames.
pub const TOL_COMMUTE: f64 = 1e-8;

/// Standard block structure `[[0, -I], [I, 0]]`.
pub fn standard_j(n: usize) -> Mat {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -1.0;
        j[(n + k, k)] = 1.0;
    }
    j
}

#[derive(Debug, Clone)]
pub struct SymplecticSpace {
    n: usize,
    j: Mat,
    adapted: Mat,
    standard: bool,
}

/// The canonical model of `R^{2n}` with the block structure.
pub fn standard_space(n: usize) -> Result<SymplecticSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("half-dimension must be at least 1".into()));
    }
    Ok(SymplecticSpace {
        n,
        j: standard_j(n),
        adapted: Mat::identity(2 * n, 2 * n),
        standard: true,
    })
}

impl SymplecticSpace {
    /// Validate an arbitrary compatible complex structure and build an
    /// orthonormal basis `[v_1..v_n, J v_1..J v_n]` adapted to it.
    pub fn with_structure(j: Mat, tol: f64) -> Result<Self> {
        let dim = j.nrows();
        if dim == 0 || dim != j.ncols() || dim % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "structure must be square of even positive size, got {}x{}",
                j.nrows(),
                j.ncols()
            )));
        }
        let n = dim / 2;
        let square = linalg::max_abs(&(&j * &j + Mat::identity(dim, dim)));
        if square > tol {
            return Err(Error::Structure { what: "J^2 + I", residual: square, tol });
        }
        let skew = linalg::max_abs(&(&j + j.transpose()));
        if skew > tol {
            return Err(Error::Structure { what: "J^T + J", residual: skew, tol });
        }
        let mut chosen: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(dim);
        let mut v_cols = Vec::with_capacity(n);
        for _ in 0..n {
            // Greedy pick of the basis vector least explained by the current span.
            let mut best: Option<(f64, nalgebra::DVector<f64>)> = None;
            for i in 0..dim {
                let mut e = nalgebra::DVector::<f64>::zeros(dim);
                e[i] = 1.0;
                for c in &chosen {
                    let d = c.dot(&e);
                    e -= c * d;
                }
                let norm = e.norm();
                if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                    best = Some((norm, e));
                }
            }
            let (norm, mut v) = best.expect("dim > 0");
            v /= norm;
            // Second pass for numerical orthogonality.
            for c in &chosen {
                let d = c.dot(&v);
                v -= c * d;
            }
            v /= v.norm();
            let jv = &j * &v;
            chosen.push(v.clone());
            chosen.push(jv);
            v_cols.push(v);
        }
        let mut adapted = Mat::zeros(dim, dim);
        for (k, v) in v_cols.iter().enumerate() {
            adapted.set_column(k, v);
            adapted.set_column(n + k, &(&j * v));
        }
        let standard = linalg::max_abs(&(&j - standard_j(n))) == 0.0;
        if standard {
            adapted = Mat::identity(dim, dim);
        }
        Ok(Self { n, j, adapted, standard })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn j(&self) -> &Mat {
        &self.j
    }

    /// Orthogonal `Q` with `Q^T J Q` in standard block form.
    pub fn adapted_basis(&self) -> &Mat {
        &self.adapted
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// `omega(x, y) = <J x, y>`.
    pub fn omega(&self, x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>) -> f64 {
        (&self.j * x).dot(y)
    }

    /// `E x E` with structure `diag(J, -J)`, the home of pair indices.
    pub fn doubled(&self) -> SymplecticSpace {
        let j2 = linalg::block_diag(&self.j, &(-&self.j));
        SymplecticSpace::with_structure(j2, 1e-12).expect("diag(J, -J) is compatible")
    }

    fn to_adapted(&self, m: &Mat) -> Mat {
        if self.standard {
            m.clone()
        } else {
            self.adapted.transpose() * m * &self.adapted
        }
    }

    fn from_adapted(&self, m: &Mat) -> Mat {
        if self.standard {
            m.clone()
        } else {
            &self.adapted * m * self.adapted.transpose()
        }
    }
}

/// Orthonormal frame of a Lagrangian subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    cols: Mat,
}

impl LagrangianFrame {
    /// Wrap columns that are already orthonormal and isotropic; callers own the check.
    pub(crate) fn from_orthonormal(cols: Mat) -> Self {
        Self { cols }
    }

    pub fn columns(&self) -> &Mat {
        &self.cols
    }

    pub fn dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn n(&self) -> usize {
        self.cols.ncols()
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.cols.ncols();
        linalg::max_abs(&(self.cols.transpose() * &self.cols - Mat::identity(k, k)))
    }

    pub fn isotropy_residual(&self, space: &SymplecticSpace) -> f64 {
        linalg::max_abs(&(self.cols.transpose() * space.j() * &self.cols))
    }

    /// `J L`, the orthogonal complement of a Lagrangian `L`.
    pub fn complement(&self, space: &SymplecticSpace) -> LagrangianFrame {
        LagrangianFrame::from_orthonormal(space.j() * &self.cols)
    }

    /// Image under an orthogonal map commuting with `J`, which preserves Lagrangians.
    pub fn transformed(&self, orthogonal: &Mat) -> LagrangianFrame {
        LagrangianFrame::from_orthonormal(linalg::qr_orthonormalize(&(orthogonal * &self.cols)))
    }
}

/// Two Lagrangians considered together; the intersection dimension is cached once computed.
#[derive(Debug, Clone)]
pub struct SubspacePair {
    pub first: LagrangianFrame,
    pub second: LagrangianFrame,
    pub intersection_dim: Option<usize>,
}

impl SubspacePair {
    pub fn new(first: LagrangianFrame, second: LagrangianFrame) -> Self {
        Self { first, second, intersection_dim: None }
    }

    pub fn compute_intersection(&mut self, space: &SymplecticSpace) -> Result<usize> {
        let d = intersection_dimension(&self.second, &self.first, space, TOL_EIG)?.dim;
        self.intersection_dim = Some(d);
        Ok(d)
    }
}

/// Orthonormalize `raw` and check that its span is Lagrangian.
pub fn lagrangian_from_matrix(
    raw: &Mat,
    space: &SymplecticSpace,
    tol: f64,
) -> Result<LagrangianFrame> {
    if raw.nrows() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "frame has {} rows, space has dimension {}",
            raw.nrows(),
            space.dim()
        )));
    }
    let basis = linalg::orthonormal_basis(raw, RANK_RTOL);
    if basis.ncols() != space.n() {
        return Err(Error::RankDeficient { expected: space.n(), found: basis.ncols() });
    }
    let frame = LagrangianFrame::from_orthonormal(basis);
    let residual = frame.isotropy_residual(space);
    if residual > tol {
        return Err(Error::NotLagrangian { residual, tol });
    }
    Ok(frame)
}

/// `P = F F^T`.
pub fn orthogonal_projection(frame: &LagrangianFrame) -> Mat {
    frame.cols.clone() * frame.cols.transpose()
}

/// Gap between the spans of two orthonormal frames, `||P_U - P_V||_2`.
pub fn subspace_gap(u: &Mat, v: &Mat) -> Result<f64> {
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            u.nrows(),
            v.nrows()
        )));
    }
    let d = u * u.transpose() - v * v.transpose();
    Ok(linalg::symmetric_norm(&d))
}

/// Gap metric on Lagrangian subspaces.
pub fn gap_distance(u: &LagrangianFrame, v: &LagrangianFrame) -> Result<f64> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimensions {} and {}",
            u.n(),
            v.n()
        )));
    }
    subspace_gap(&u.cols, &v.cols)
}

/// Orthonormal frame of the graph `{(x, A x)}` in `R^{2N}`.
pub fn graph_frame(a: &Mat) -> Mat {
    let n = a.ncols();
    let raw = linalg::vstack(&Mat::identity(n, n), a);
    linalg::qr_orthonormalize(&raw)
}

/// Gap metric between two matrices viewed as operators through their graphs.
pub fn graph_gap_distance(a: &Mat, b: &Mat) -> Result<f64> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "operators of shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    subspace_gap(&graph_frame(a), &graph_frame(b))
}

/// Real form of the Souriau map `-(I - 2 P_L)(I - 2 P_W)`.
pub fn souriau_real(w: &LagrangianFrame, l: &LagrangianFrame) -> Mat {
    let dim = w.dim();
    let eye = Mat::identity(dim, dim);
    let rl = &eye - orthogonal_projection(l) * 2.0;
    let rw = &eye - orthogonal_projection(w) * 2.0;
    -(rl * rw)
}

/// Souriau image of `L` relative to `W` as a complex `n x n` unitary.
pub fn souriau_map(
    w: &LagrangianFrame,
    l: &LagrangianFrame,
    space: &SymplecticSpace,
) -> Result<CMat> {
    souriau_map_with_tol(w, l, space, TOL_COMMUTE, TOL_UNITARY)
}

pub fn souriau_map_with_tol(
    w: &LagrangianFrame,
    l: &LagrangianFrame,
    space: &SymplecticSpace,
    tol_commute: f64,
    tol_unitary: f64,
) -> Result<CMat> {
    if w.dim() != space.dim() || l.dim() != space.dim() {
        return Err(Error::DimensionMismatch("frames do not live in the given space".into()));
    }
    let s = souriau_real(w, l);
    let u = complexify_commuting_operator_with_tol(&s, space, tol_commute)?;
    let n = u.nrows();
    let residual = linalg::spectral_norm_c(&(&u * u.adjoint() - CMat::identity(n, n)));
    if residual > tol_unitary.max(tol_commute) {
        return Err(Error::Structure { what: "Souriau unitarity", residual, tol: tol_unitary });
    }
    Ok(u)
}

/// Result of the intersection-dimension computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntersectionDimension {
    /// Multiplicity of `-1` in the Souriau unitary.
    pub dim: usize,
    /// `2n - rank[F_L | F_W]`.
    pub rank_oracle: usize,
    /// Set when some eigenvalue sits near the `tol_eig` boundary or the routes disagree.
    pub ambiguous: bool,
}

/// `dim(L ∩ W)` as the multiplicity of the eigenvalue `-1` of the Souriau map.
pub fn intersection_dimension(
    w: &LagrangianFrame,
    l: &LagrangianFrame,
    space: &SymplecticSpace,
    tol_eig: f64,
) -> Result<IntersectionDimension> {
    let u = souriau_map(w, l, space)?;
    let eig = linalg::unitary_eigenvalues(&u);
    let mut dim = 0;
    let mut near_boundary = false;
    for z in eig {
        let d = (z + Complex64::new(1.0, 0.0)).norm();
        if d <= tol_eig {
            dim += 1;
        }
        if d > 0.1 * tol_eig && d < 10.0 * tol_eig {
            near_boundary = true;
        }
    }
    let rank_oracle = intersection_dimension_rank(w, l);
    Ok(IntersectionDimension { dim, rank_oracle, ambiguous: near_boundary || dim != rank_oracle })
}

/// Rank route: `dim(L ∩ W) = 2n - rank[F_L | F_W]`.
pub fn intersection_dimension_rank(w: &LagrangianFrame, l: &LagrangianFrame) -> usize {
    let stacked = linalg::hstack(&l.cols, &w.cols);
    stacked.ncols() - linalg::rank(&stacked, RANK_RTOL)
}

/// Matrix of a `J`-commuting real operator as a complex-linear map.
pub fn complexify_commuting_operator(m: &Mat, space: &SymplecticSpace) -> Result<CMat> {
    complexify_commuting_operator_with_tol(m, space, TOL_STRUCTURE)
}

pub fn complexify_commuting_operator_with_tol(
    m: &Mat,
    space: &SymplecticSpace,
    tol: f64,
) -> Result<CMat> {
    let dim = space.dim();
    if m.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "operator {:?} on a space of dimension {dim}",
            m.shape()
        )));
    }
    let scale = linalg::max_abs(m).max(1.0);
    let residual = linalg::max_abs(&(m * space.j() - space.j() * m));
    if residual > tol * scale {
        return Err(Error::Structure { what: "commutation with J", residual, tol: tol * scale });
    }
    let ms = space.to_adapted(m);
    let n = space.n();
    // In adapted coordinates the operator reads [[A, -B], [B, A]] and acts as A + iB.
    Ok(CMat::from_fn(n, n, |i, k| {
        let a = 0.5 * (ms[(i, k)] + ms[(n + i, n + k)]);
        let b = 0.5 * (ms[(n + i, k)] - ms[(i, n + k)]);
        Complex64::new(a, b)
    }))
}

/// Inverse of complexification: the real `2n x 2n` operator of a complex matrix.
pub fn realify(c: &CMat, space: &SymplecticSpace) -> Mat {
    let n = space.n();
    let mut ms = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            let z = c[(i, k)];
            ms[(i, k)] = z.re;
            ms[(n + i, n + k)] = z.re;
            ms[(n + i, k)] = z.im;
            ms[(i, n + k)] = -z.im;
        }
    }
    space.from_adapted(&ms)
}
