//! Seeded random elements.
//!
//! The generator is xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Uniform doubles take the top 53 bits
//! of each output; Gaussians come from Box–Muller with both outputs of a pair
//! used in order (cosine branch first). A complex Gaussian entry draws its real
//! part first, then its imaginary part, and matrices are filled row by row.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::graded::GradedAlgebra;
use crate::linalg::{c, hermitian_eigendecompose, re, CMatrix};

#[derive(Clone, Debug)]
pub struct SampleRng {
    inner: Xoshiro256StarStar,
    spare: Option<f64>,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(x) = self.spare.take() {
            return x;
        }
        // 1 - u lies in (0, 1], so the logarithm is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn complex_gaussian(&mut self) -> num_complex::Complex64 {
        let x = self.gaussian();
        let y = self.gaussian();
        c(x, y)
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex_gaussian();
            }
        }
        m
    }

    pub fn gaussian_hermitian(&mut self, n: usize) -> CMatrix {
        let x = self.gaussian_matrix(n, n);
        (&x + x.adjoint()) * re(0.5)
    }

    /// Random self-adjoint matrix that commutes with the grading.
    pub fn even_hermitian(&mut self, algebra: &GradedAlgebra) -> CMatrix {
        let h = self.gaussian_hermitian(algebra.dim());
        algebra.even_part(&h)
    }

    /// Random unitary `exp(iH)` with `H` from [`Self::gaussian_hermitian`].
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        let h = self.gaussian_hermitian(n);
        hermitian_eigendecompose(&h)
            .expect("sampled matrix is Hermitian")
            .apply_fn(|l| c(0.0, l).exp())
    }

    /// Grading-preserving random unitary.
    pub fn even_unitary(&mut self, algebra: &GradedAlgebra) -> CMatrix {
        let h = self.even_hermitian(algebra);
        hermitian_eigendecompose(&h)
            .expect("sampled matrix is Hermitian")
            .apply_fn(|l| c(0.0, l).exp())
    }

    /// Random positive definite even density with spectrum in `[e^-1, e]`.
    pub fn even_density(&mut self, algebra: &GradedAlgebra) -> CMatrix {
        let h = self.even_hermitian(algebra);
        let eig = hermitian_eigendecompose(&h).expect("sampled matrix is Hermitian");
        let scale = eig.max_abs().max(1e-300);
        eig.apply_fn(|l| re((-l / scale).exp()))
    }

    /// Orthogonal projector onto a random `rank`-dimensional subspace of the
    /// range of the projector `within`.
    pub fn subprojection(&mut self, within: &CMatrix, rank: usize) -> CMatrix {
        let n = within.nrows();
        let x = within * self.gaussian_matrix(n, rank);
        crate::linalg::column_space_projector(&x, 1e-10)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = SampleRng::new(42);
        let mut b = SampleRng::new(42);
        let xs: Vec<f64> = (0..16).map(|_| a.gaussian()).collect();
        let ys: Vec<f64> = (0..16).map(|_| b.gaussian()).collect();
        assert_eq!(xs, ys);
        assert_ne!(SampleRng::new(43).gaussian(), xs[0]);
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = SampleRng::new(7);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn even_samples_commute_with_grading() {
        let alg = GradedAlgebra::new(2, 3).unwrap();
        let mut rng = SampleRng::new(5);
        let h = rng.even_hermitian(&alg);
        assert!(alg.parity_defect(&h) < 1e-15);
        let u = rng.even_unitary(&alg);
        assert!((u.adjoint() * &u - crate::linalg::identity(5)).norm() < 1e-12);
        assert!(alg.parity_defect(&u) < 1e-12);
    }
}
