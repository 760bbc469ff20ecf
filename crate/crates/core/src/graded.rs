//! Z₂-graded matrix algebras and functionals given by a kernel matrix.
//!
//! The grading is `γ = Ad(g)` with `g` diagonal in the working basis. The
//! canonical constructor orders the basis so that `g = diag(+1…+1, −1…−1)`;
//! tensor products of graded sites keep the product ordering instead, so the
//! sign pattern is stored explicitly.

use crate::error::{Error, Result};
use crate::linalg::{
    self, ensure_dim, ensure_positive_definite, ensure_square, hermitian_eigendecompose, re,
    trace_norm, CMatrix, EigenSystem, C64,
};

/// Relative tolerance for "ρ commutes with g".
pub const EVEN_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GradedAlgebra {
    signs: Vec<f64>,
}

impl GradedAlgebra {
    /// `M_n` with `n = n_plus + n_minus` and `g = diag(+1…+1, −1…−1)`.
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus + n_minus == 0 {
            return Err(Error::dims("graded algebra needs positive dimension"));
        }
        let mut signs = vec![1.0; n_plus];
        signs.extend(std::iter::repeat_n(-1.0, n_minus));
        Ok(Self { signs })
    }

    /// Grading with an arbitrary diagonal sign pattern.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::dims("graded algebra needs positive dimension"));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Config("grading signs must be +1 or -1".into()));
        }
        Ok(Self {
            signs: signs.iter().map(|&s| s as f64).collect(),
        })
    }

    /// Product grading `g ⊗ g'` on the tensor product.
    pub fn tensor(&self, other: &GradedAlgebra) -> GradedAlgebra {
        let signs = self
            .signs
            .iter()
            .flat_map(|&s| other.signs.iter().map(move |&t| s * t))
            .collect();
        GradedAlgebra { signs }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn n_plus(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0.0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.dim() - self.n_plus()
    }

    /// True when `n_minus = 0`, i.e. `γ` is the identity.
    pub fn is_ungraded(&self) -> bool {
        self.n_minus() == 0
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// The grading operator `g`.
    pub fn g(&self) -> CMatrix {
        linalg::diag_real(&self.signs)
    }

    /// Basis indices of the `+1` (`positive = true`) or `−1` eigenspace of `g`.
    pub fn sector(&self, positive: bool) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| (self.signs[i] > 0.0) == positive)
            .collect()
    }

    /// Orthogonal projector onto one eigenspace of `g`.
    pub fn sector_projector(&self, positive: bool) -> CMatrix {
        let d: Vec<f64> = self
            .signs
            .iter()
            .map(|&s| if (s > 0.0) == positive { 1.0 } else { 0.0 })
            .collect();
        linalg::diag_real(&d)
    }

    fn check(&self, a: &CMatrix) -> Result<()> {
        ensure_dim(a, self.dim(), "algebra element")
    }

    /// `a^γ = g a g`.
    pub fn gamma(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check(a)?;
        Ok(self.gamma_unchecked(a))
    }

    fn gamma_unchecked(&self, a: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
            a[(i, j)] * (self.signs[i] * self.signs[j])
        })
    }

    /// `(a₊, a₋) = ((a + gag)/2, (a − gag)/2)`.
    pub fn parity_split(&self, a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
        self.check(a)?;
        Ok((self.even_part(a), self.odd_part(a)))
    }

    pub fn even_part(&self, a: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
            if self.signs[i] == self.signs[j] {
                a[(i, j)]
            } else {
                re(0.0)
            }
        })
    }

    pub fn odd_part(&self, a: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
            if self.signs[i] != self.signs[j] {
                a[(i, j)]
            } else {
                re(0.0)
            }
        })
    }

    /// `‖gag − a‖_F / ‖a‖_F`; zero for even elements.
    pub fn parity_defect(&self, a: &CMatrix) -> f64 {
        let n = a.norm();
        if n == 0.0 {
            0.0
        } else {
            2.0 * self.odd_part(a).norm() / n
        }
    }

    /// Whether the matrix unit `E_ij` is even.
    pub fn unit_parity(&self, i: usize, j: usize) -> bool {
        self.signs[i] == self.signs[j]
    }

    /// Kernel `T = gρ` of the regularized supertrace `ω = str(·ρ)`.
    pub fn supertrace_functional(&self, rho: &CMatrix) -> Result<Functional> {
        self.check(rho)?;
        let odd = self.parity_defect(rho);
        if odd > EVEN_RTOL {
            return Err(Error::OddDensity(odd));
        }
        let eig = hermitian_eigendecompose(rho)?;
        ensure_positive_definite(&eig)?;
        let kernel = self.g() * rho;
        Ok(Functional { kernel })
    }

    /// Eigendecomposition of an even self-adjoint matrix computed sector by
    /// sector, so every eigenvector is homogeneous for the grading.
    ///
    /// Sector results are merged by ascending eigenvalue; exact ties keep the
    /// `+1` sector first.
    pub fn even_eigensystem(&self, m: &CMatrix) -> Result<EigenSystem> {
        self.check(m)?;
        let odd = self.parity_defect(m);
        if odd > EVEN_RTOL {
            return Err(Error::OddDensity(odd));
        }
        let n = self.dim();
        let mut entries: Vec<(f64, Vec<(usize, C64)>)> = Vec::with_capacity(n);
        for positive in [true, false] {
            let idx = self.sector(positive);
            if idx.is_empty() {
                continue;
            }
            let block = CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
            let eig = hermitian_eigendecompose(&block)?;
            for (k, &l) in eig.eigenvalues.iter().enumerate() {
                let col = idx
                    .iter()
                    .enumerate()
                    .map(|(r, &row)| (row, eig.eigenvectors[(r, k)]))
                    .collect();
                entries.push((l, col));
            }
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vectors = CMatrix::zeros(n, n);
        for (k, (_, col)) in entries.iter().enumerate() {
            for &(row, z) in col {
                vectors[(row, k)] = z;
            }
        }
        Ok(EigenSystem {
            eigenvalues: entries.iter().map(|e| e.0).collect(),
            eigenvectors: vectors,
        })
    }
}

/// Linear functional `ω(a) = tr(aT)` on `M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    kernel: CMatrix,
}

impl Functional {
    pub fn new(kernel: CMatrix) -> Result<Self> {
        ensure_square(&kernel, "functional kernel")?;
        Ok(Self { kernel })
    }

    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.nrows()
    }

    /// `ω(a) = tr(aT)`.
    pub fn eval(&self, a: &CMatrix) -> Result<C64> {
        ensure_dim(a, self.dim(), "argument of functional")?;
        Ok(self.eval_unchecked(a))
    }

    pub(crate) fn eval_unchecked(&self, a: &CMatrix) -> C64 {
        let n = self.dim();
        let mut s = re(0.0);
        for i in 0..n {
            for j in 0..n {
                s += a[(i, j)] * self.kernel[(j, i)];
            }
        }
        s
    }

    /// `ω*(a) = conj ω(a*)`, with kernel `T*`.
    pub fn adjoint(&self) -> Functional {
        Functional {
            kernel: self.kernel.adjoint(),
        }
    }

    /// `‖ω‖ = ‖T‖₁` on the full matrix algebra.
    pub fn norm(&self) -> f64 {
        trace_norm(&self.kernel).expect("kernel is square")
    }

    pub fn self_adjoint_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.kernel)
    }

    pub fn ensure_self_adjoint(&self, rtol: f64) -> Result<()> {
        let d = self.self_adjoint_defect();
        if d > rtol {
            return Err(Error::NotSelfAdjoint(d));
        }
        Ok(())
    }

    /// `‖gTg − T‖_F / ‖T‖_F`.
    pub fn parity_defect(&self, algebra: &GradedAlgebra) -> f64 {
        algebra.parity_defect(&self.kernel)
    }

    /// Functional with kernel scaled by a real factor.
    pub fn scaled(&self, s: f64) -> Functional {
        Functional {
            kernel: &self.kernel * re(s),
        }
    }
}
