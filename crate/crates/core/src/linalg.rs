//! Dense complex-matrix primitives shared by every other module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. All tolerances in this module
//! are relative to a scale taken from the inputs (Frobenius norm, largest
//! singular value or spectral diameter); nothing uses an absolute cutoff.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative asymmetry accepted by [`hermitian_eigendecompose`].
pub const HERMITIAN_RTOL: f64 = 1e-10;
/// Eigenvalues closer than this fraction of the spectral diameter form a cluster.
pub const CLUSTER_RTOL: f64 = 1e-10;
/// `min λ > POSITIVITY_RTOL · max λ` is the positive-definiteness test.
pub const POSITIVITY_RTOL: f64 = 1e-14;
/// Singular values below this fraction of the largest are treated as zero.
pub const NULL_SPACE_RTOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Matrix unit `E_ij` of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = re(1.0);
    m
}

/// All matrix units of `M_n` in row-major order `E_00, E_01, …`.
pub fn matrix_units(n: usize) -> Vec<CMatrix> {
    (0..n * n).map(|k| unit(n, k / n, k % n)).collect()
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&x| re(x))))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn ensure_square(m: &CMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::dims(format!(
            "{what} must be a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn ensure_dim(m: &CMatrix, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dims(format!(
            "{what} must be {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `‖M − M*‖_F / ‖M‖_F` (zero for the zero matrix).
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.norm();
    if n == 0.0 {
        0.0
    } else {
        (m - m.adjoint()).norm() / n
    }
}

/// Eigenvalues (ascending) and unitary eigenvector columns of a self-adjoint
/// matrix.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.eigenvectors;
        let d = CVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&l| f(l)));
        let mut vd = v.clone();
        for (k, mut col) in vd.column_iter_mut().enumerate() {
            col *= d[k];
        }
        vd * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(re)
    }

    /// Spectral projection onto the eigenvalues selected by `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        self.apply_fn(|l| if keep(l) { re(1.0) } else { re(0.0) })
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// `‖V*V − 1‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        (self.eigenvectors.adjoint() * &self.eigenvectors - identity(n)).norm()
    }
}

/// Eigendecomposition of a self-adjoint matrix with a deterministic basis.
///
/// Eigenvalues come back ascending. Inside a degenerate cluster the basis is
/// replaced by a column-pivoted orthonormalization of the cluster projector,
/// so the result depends only on the eigenspaces and not on the solver's
/// internal choices; isolated eigenvectors get their largest coordinate made
/// real positive.
pub fn hermitian_eigendecompose(m: &CMatrix) -> Result<EigenSystem> {
    let n = ensure_square(m, "hermitian_eigendecompose input")?;
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_RTOL {
        return Err(Error::NonHermitian(defect));
    }
    let sym = (m + m.adjoint()) * re(0.5);
    let raw = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw.eigenvalues[a].total_cmp(&raw.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| raw.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| raw.eigenvectors[(i, order[j])]);

    let diameter = values[n - 1] - values[0];
    let mut out_values = values.clone();
    let mut out_vectors = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= CLUSTER_RTOL * diameter {
            end += 1;
        }
        let width = end - start;
        let block = vectors.columns(start, width).into_owned();
        let basis = if width == 1 {
            fix_phase(block)
        } else {
            let proj = &block * block.adjoint();
            let mean = values[start..end].iter().sum::<f64>() / width as f64;
            out_values[start..end].iter_mut().for_each(|v| *v = mean);
            pivoted_orthonormal_basis(&proj, width)
        };
        out_vectors.columns_mut(start, width).copy_from(&basis);
        start = end;
    }

    Ok(EigenSystem {
        eigenvalues: out_values,
        eigenvectors: out_vectors,
    })
}

fn fix_phase(mut col: CMatrix) -> CMatrix {
    let max = col.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return col;
    }
    let pivot = col
        .iter()
        .copied()
        .find(|z| z.norm() >= (1.0 - 1e-8) * max)
        .expect("nonzero column has a pivot");
    let phase = pivot.conj() / pivot.norm();
    col *= phase;
    col
}

/// `rank` orthonormal columns spanning the range of the projector `proj`,
/// chosen by greedy column pivoting on `proj` itself.
///
/// The pivot is the column with the largest residual norm; near-ties (within
/// a relative 1e-8) go to the lowest index. Each output column has a real
/// positive entry at its pivot row.
pub fn pivoted_orthonormal_basis(proj: &CMatrix, rank: usize) -> CMatrix {
    let n = proj.nrows();
    let mut residual = proj.clone();
    let mut out = CMatrix::zeros(n, rank);
    for k in 0..rank {
        let norms: Vec<f64> = residual.column_iter().map(|c| c.norm()).collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let pivot = norms
            .iter()
            .position(|&x| x >= (1.0 - 1e-8) * max)
            .unwrap_or(0);
        let mut q: CVector = residual.column(pivot).into_owned();
        let qn = q.norm();
        if qn == 0.0 {
            break;
        }
        let phase = q[pivot].conj() / q[pivot].norm().max(f64::MIN_POSITIVE);
        q *= phase / re(qn);
        // remove q from every column of the residual
        let coeffs = q.adjoint() * &residual;
        residual -= &q * coeffs;
        out.set_column(k, &q);
    }
    out
}

/// Principal matrix power `ρ^z = V diag(exp(z ln λ)) V*` of a positive definite `ρ`.
pub fn matrix_power(rho: &CMatrix, z: C64) -> Result<CMatrix> {
    let eig = hermitian_eigendecompose(rho)?;
    ensure_positive_definite(&eig)?;
    Ok(eig.apply_fn(|l| (z * l.ln()).exp()))
}

pub fn ensure_positive_definite(eig: &EigenSystem) -> Result<()> {
    let min = eig.eigenvalues[0];
    let max = *eig.eigenvalues.last().expect("nonempty spectrum");
    if !(max > 0.0 && min > POSITIVITY_RTOL * max) {
        return Err(Error::SingularDensity { min, max });
    }
    Ok(())
}

/// Thin singular value decomposition `M = U diag(σ) V*`, descending `σ`.
///
/// Columns of `u` belonging to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn recompose(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (k, mut col) in us.column_iter_mut().enumerate() {
            col *= re(self.singular_values[k]);
        }
        us * self.v.adjoint()
    }
}

/// One-sided (Hestenes) Jacobi SVD. Slower than bidiagonalization but
/// accurate to working precision on rank-deficient input, where nalgebra's
/// complex SVD can return a wrong factorization.
pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let mut a = m.clone();
    let mut v = identity(cols);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for target in [&mut a, &mut v] {
                    for i in 0..target.nrows() {
                        let x = target[(i, p)];
                        let y = target[(i, q)] * phase.conj();
                        target[(i, p)] = x * cs - y * sn;
                        target[(i, q)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = CMatrix::zeros(rows, cols);
    let mut vs = CMatrix::zeros(cols, cols);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &(a.column(j) / re(norms[j])));
        }
        vs.set_column(k, &v.column(j));
    }
    Svd {
        u,
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: vs,
    }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    if m.is_square() && hermitian_defect(m) == 0.0 {
        let mut s: Vec<f64> = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .collect();
        s.sort_by(|x, y| y.total_cmp(x));
        return s;
    }
    svd(m).singular_values
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    ensure_square(m, "trace_norm input")?;
    Ok(singular_values(m).iter().sum())
}

/// Operator (spectral) norm.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Trace over every site after the first `keep` sites of a chain with the
/// given local dimensions (row-major tensor ordering, site 0 most significant).
pub fn partial_trace(m: &CMatrix, site_dims: &[usize], keep: usize) -> Result<CMatrix> {
    let n = ensure_square(m, "partial_trace input")?;
    if site_dims.contains(&0) {
        return Err(Error::dims("site dimensions must be positive"));
    }
    let total: usize = site_dims.iter().product();
    if total != n {
        return Err(Error::dims(format!(
            "site dimensions multiply to {total} but the matrix is {n}x{n}"
        )));
    }
    if keep > site_dims.len() {
        return Err(Error::dims(format!(
            "cannot keep {keep} of {} sites",
            site_dims.len()
        )));
    }
    let kept: usize = site_dims[..keep].iter().product();
    let rest = n / kept;
    Ok(CMatrix::from_fn(kept, kept, |i, j| {
        (0..rest).map(|r| m[(i * rest + r, j * rest + r)]).sum()
    }))
}

/// Row-major vectorization `vec(X)[i·n + j] = X_ij`.
pub fn vec_row_major(x: &CMatrix) -> CVector {
    let (r, cc) = x.shape();
    CVector::from_fn(r * cc, |k, _| x[(k / cc, k % cc)])
}

pub fn unvec_row_major(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Orthonormal (Frobenius) basis of `{X : [X, G] = [X, G*] = 0 for every generator G}`.
///
/// The commutant is the null space of the stacked maps `X ↦ XG − GX`; singular
/// values below `NULL_SPACE_RTOL` times the largest one count as zero. An empty
/// generator list gives all `dim × dim` matrix units.
pub fn commutant_basis(generators: &[CMatrix], dim: usize) -> Result<Vec<CMatrix>> {
    if dim == 0 {
        return Err(Error::dims("commutant dimension must be positive"));
    }
    for g in generators {
        ensure_dim(g, dim, "commutant generator")?;
    }
    if generators.is_empty() {
        return Ok(matrix_units(dim));
    }
    let nn = dim * dim;
    let blocks = 2 * generators.len();
    let mut stacked = CMatrix::zeros(blocks * nn, nn);
    let mut block = 0;
    for g in generators {
        for op in [g.clone(), g.adjoint()] {
            let row0 = block * nn;
            // (XG − GX)_ij = Σ_m X_im G_mj − Σ_m G_im X_mj
            for i in 0..dim {
                for j in 0..dim {
                    let row = row0 + i * dim + j;
                    for m in 0..dim {
                        stacked[(row, i * dim + m)] += op[(m, j)];
                        stacked[(row, m * dim + j)] -= op[(i, m)];
                    }
                }
            }
            block += 1;
        }
    }
    // Same singular values as the stacked map, at a square size.
    let r = stacked.qr().r();
    let dec = svd(&r);
    let smax = dec.singular_values.iter().cloned().fold(0.0, f64::max);
    let null_rows: Vec<usize> = (0..dec.singular_values.len())
        .filter(|&k| dec.singular_values[k] <= NULL_SPACE_RTOL * smax)
        .collect();
    if null_rows.is_empty() {
        return Ok(Vec::new());
    }
    let mut null = CMatrix::zeros(nn, null_rows.len());
    for (c, &k) in null_rows.iter().enumerate() {
        null.set_column(c, &dec.v.column(k));
    }
    let proj = &null * null.adjoint();
    let basis = pivoted_orthonormal_basis(&proj, null_rows.len());
    Ok(basis
        .column_iter()
        .map(|col| unvec_row_major(&col.into_owned(), dim, dim))
        .collect())
}

/// Orthogonal projector onto the column span of `m`, with a relative rank cutoff.
pub fn column_space_projector(m: &CMatrix, rtol: f64) -> CMatrix {
    let n = m.nrows();
    if m.ncols() == 0 {
        return CMatrix::zeros(n, n);
    }
    let dec = svd(m);
    let smax = dec.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut p = CMatrix::zeros(n, n);
    if smax == 0.0 {
        return p;
    }
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s > rtol * smax {
            let col = dec.u.column(k);
            p += col * col.adjoint();
        }
    }
    p
}

/// Numerical rank with a relative singular-value cutoff.
pub fn rank(m: &CMatrix, rtol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = singular_values(m);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rtol * smax).count()
}

/// Moore–Penrose pseudo-inverse with a relative cutoff.
pub fn pseudo_inverse(m: &CMatrix, rtol: f64) -> CMatrix {
    let dec = svd(m);
    let smax = dec.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s > rtol * smax && s > 0.0 {
            out += dec.v.column(k) * dec.u.column(k).adjoint() / re(s);
        }
    }
    out
}

/// Largest distance of a self-adjoint operator's spectrum from `{0, 1}`.
pub fn projection_spectrum_defect(p: &CMatrix) -> Result<f64> {
    let eig = hermitian_eigendecompose(p)?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|&l| l.abs().min((l - 1.0).abs()))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(n: usize, seed: u64) -> CMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    fn check_svd(m: &CMatrix) {
        let dec = svd(m);
        let scale = m.norm().max(1.0);
        assert!((dec.recompose() - m).norm() < 1e-13 * scale);
        let k = dec.singular_values.len();
        assert!((dec.v.adjoint() * &dec.v - identity(k)).norm() < 1e-13);
        assert!(dec.singular_values.windows(2).all(|w| w[0] >= w[1]));
        // σ² are the eigenvalues of M*M
        let mut want: Vec<f64> = (m.adjoint() * m).symmetric_eigen().eigenvalues.iter().copied().collect();
        if m.nrows() < m.ncols() {
            want = (m * m.adjoint()).symmetric_eigen().eigenvalues.iter().copied().collect();
        }
        want.sort_by(|x, y| y.total_cmp(x));
        for (s, w) in dec.singular_values.iter().zip(&want) {
            assert!((s * s - w).abs() < 1e-12 * scale * scale);
        }
    }

    #[test]
    fn svd_dense_shapes() {
        let a = lcg_matrix(7, 3);
        check_svd(&a);
        check_svd(&a.columns(0, 4).into_owned());
        check_svd(&a.rows(0, 3).into_owned());
    }

    #[test]
    fn svd_sparse_rank_deficient() {
        // zero rows and columns with repeated singular values
        let base = lcg_matrix(25, 11);
        let m = CMatrix::from_fn(25, 12, |i, j| {
            if j < 6 || i % 3 != 1 {
                re(0.0)
            } else {
                base[(i / 3, j)]
            }
        });
        let m = CMatrix::from_fn(25, 12, |i, j| {
            if i >= 16 && j >= 6 {
                m[(i - 15, j)]
            } else {
                m[(i, j)]
            }
        });
        check_svd(&m);
        let p = column_space_projector(&m, 1e-10);
        assert!((&p * &m - &m).norm() < 1e-13 * m.norm());
        assert!((&p * &p - &p).norm() < 1e-13);
        let pinv = pseudo_inverse(&m, 1e-10);
        assert!((&m * &pinv * &m - &m).norm() < 1e-12 * m.norm());
    }

    fn hermitian(n: usize, seed: u64) -> CMatrix {
        let x = lcg_matrix(n, seed);
        (&x + x.adjoint()) * re(0.5)
    }

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eigendecompose(&identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        assert!(rel_diff(&e.eigenvectors, &identity(2)) < 1e-15);
    }

    #[test]
    fn diagonal_eigenvalues_ascend() {
        let e = hermitian_eigendecompose(&diag_real(&[0.75, 0.25])).unwrap();
        assert!((e.eigenvalues[0] - 0.25).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        let m = hermitian(8, 3);
        let e = hermitian_eigendecompose(&m).unwrap();
        assert!((e.reconstruct() - &m).norm() < 1e-12 * m.norm());
        assert!(e.orthonormality_defect() < 1e-12);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_cluster_is_deterministic() {
        // rotate a degenerate spectrum by a unitary; the canonical basis of the
        // degenerate block must not depend on the solver
        let u = hermitian(4, 11).exp_unitary();
        let m = &u * diag_real(&[1.0, 1.0, 2.0, 3.0]) * u.adjoint();
        let a = hermitian_eigendecompose(&m).unwrap();
        let b = hermitian_eigendecompose(&(m.clone() * re(1.0))).unwrap();
        assert_eq!(a.eigenvectors, b.eigenvectors);
        assert!((a.reconstruct() - &m).norm() < 1e-12 * m.norm());
    }

    trait ExpUnitary {
        fn exp_unitary(&self) -> CMatrix;
    }
    impl ExpUnitary for CMatrix {
        fn exp_unitary(&self) -> CMatrix {
            let e = hermitian_eigendecompose(self).unwrap();
            e.apply_fn(|l| c(0.0, l).exp())
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        assert!(matches!(
            hermitian_eigendecompose(&unit(2, 0, 1)),
            Err(Error::NonHermitian(_))
        ));
        assert!(matches!(
            hermitian_eigendecompose(&CMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn zeroth_power_is_identity() {
        let rho = diag_real(&[0.75, 0.25]);
        assert!(rel_diff(&matrix_power(&rho, re(0.0)).unwrap(), &identity(2)) < 1e-15);
    }

    #[test]
    fn diagonal_square_root() {
        let rho = diag_real(&[0.75, 0.25]);
        let half = matrix_power(&rho, re(0.5)).unwrap();
        let want = diag_real(&[3f64.sqrt() / 2.0, 0.5]);
        assert!(rel_diff(&half, &want) < 1e-15);
    }

    #[test]
    fn power_group_law_and_unitarity() {
        let x = lcg_matrix(5, 7);
        let rho = &x * x.adjoint() + identity(5) * re(0.1);
        let (z, w) = (c(0.3, -0.7), c(-1.1, 0.4));
        let lhs = matrix_power(&rho, z).unwrap() * matrix_power(&rho, w).unwrap();
        let rhs = matrix_power(&rho, z + w).unwrap();
        assert!(rel_diff(&lhs, &rhs) < 1e-11);
        let u = matrix_power(&rho, c(0.0, 2.5)).unwrap();
        assert!((u.adjoint() * &u - identity(5)).norm() < 1e-11);
    }

    #[test]
    fn singular_density_rejected() {
        let rho = diag_real(&[1.0, 0.0]);
        assert!(matches!(
            matrix_power(&rho, re(0.5)),
            Err(Error::SingularDensity { .. })
        ));
    }

    #[test]
    fn trace_norm_cases() {
        assert!((trace_norm(&diag_real(&[0.75, -0.25])).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
        // singular values are eigenvalues of sqrt(M*M)
        let m = lcg_matrix(6, 5);
        let root = matrix_power(&(m.adjoint() * &m), re(0.5)).unwrap();
        let oracle: f64 = hermitian_eigendecompose(&root)
            .unwrap()
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .sum();
        assert!((trace_norm(&m).unwrap() - oracle).abs() < 1e-11);
    }

    #[test]
    fn partial_trace_cases() {
        let a = lcg_matrix(2, 1);
        let b = lcg_matrix(3, 2);
        let pt = partial_trace(&kron(&a, &b), &[2, 3], 1).unwrap();
        assert!(rel_diff(&pt, &(&a * trace(&b))) < 1e-14);
        let m = lcg_matrix(6, 9);
        assert_eq!(partial_trace(&m, &[2, 3], 2).unwrap(), m);
        let t = trace(&partial_trace(&m, &[2, 3], 1).unwrap());
        assert!((t - trace(&m)).norm() < 1e-12);
        assert!(partial_trace(&m, &[2, 2], 1).is_err());
    }

    #[test]
    fn partial_trace_is_linear() {
        let (x, y) = (lcg_matrix(8, 21), lcg_matrix(8, 22));
        let s = c(0.3, 1.2);
        let lhs = partial_trace(&(&x + &y * s), &[2, 2, 2], 2).unwrap();
        let rhs = partial_trace(&x, &[2, 2, 2], 2).unwrap()
            + partial_trace(&y, &[2, 2, 2], 2).unwrap() * s;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn commutant_of_full_algebra_is_scalar() {
        let basis = commutant_basis(&matrix_units(3), 3).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(rel_diff(&basis[0], &(identity(3) * re(1.0 / 3f64.sqrt()))) < 1e-12);
    }

    #[test]
    fn commutant_of_nothing_is_everything() {
        assert_eq!(commutant_basis(&[], 2).unwrap().len(), 4);
    }

    #[test]
    fn commutant_of_grading_is_diagonal() {
        // X diag(1,-1) = diag(1,-1) X forces X_01 = X_10 = 0
        let basis = commutant_basis(&[diag_real(&[1.0, -1.0])], 2).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(rel_diff(&basis[0], &unit(2, 0, 0)) < 1e-12);
        assert!(rel_diff(&basis[1], &unit(2, 1, 1)) < 1e-12);
    }

    #[test]
    fn commutant_elements_commute() {
        let g = vec![kron(&lcg_matrix(2, 4), &identity(2))];
        let basis = commutant_basis(&g, 4).unwrap();
        assert_eq!(basis.len(), 4);
        for x in &basis {
            assert!(commutator(x, &g[0]).norm() < 1e-10);
            assert!(commutator(x, &g[0].adjoint()).norm() < 1e-10);
        }
    }
}
