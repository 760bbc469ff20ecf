//! GNS representation of `|ω|`, the commutant projections `p±` with the
//! grading operator `Γ`, the modular conjugation `J` and the conjugate
//! representation `π′ = Uπ(·)U*` with `U = KJ`.
//!
//! Coordinates: let `W` be a basis of homogeneous eigenvectors of the modulus
//! kernel `ρ` with eigenvalues `λ`. The support `S = {j : λ_j > 0}` has size
//! `r` and the GNS space has dimension `N = n·r`. The vector `η(a)` has
//! coordinate `(W*aW)_ij √λ_j` at position `i·r + pos(j)` for `j ∈ S`, so the
//! unit coordinate vectors are the orthonormal elements `η(W E_ij W*)/√λ_j`.
//! Dropping `j ∉ S` is exactly the quotient by the left kernel of `|ω|`.

use crate::error::{Error, Result};
use crate::flow::ModularFlow;
use crate::graded::{Functional, GradedAlgebra, EVEN_RTOL};
use crate::jordan::{jordan_decompose, JordanData};
use crate::linalg::{
    c, column_space_projector, commutant_basis, conj, diag_real, hermitian_eigendecompose,
    identity, kron, matrix_power, matrix_units, projection_spectrum_defect, pseudo_inverse, rank,
    re, rel_diff, vec_row_major, CMatrix, CVector, EigenSystem, C64,
};

/// Relative cutoff for the null space of the Gram form and for ranks.
pub const GNS_NULL_RTOL: f64 = 1e-10;

/// Largest algebra dimension for which dense commutant computations run.
pub const COMMUTANT_MAX_DIM: usize = 4;

#[derive(Clone, Debug)]
pub struct GnsSpace {
    n: usize,
    basis: CMatrix,
    weights: Vec<f64>,
    support: Vec<usize>,
    rho: CMatrix,
    omega: CVector,
}

impl GnsSpace {
    /// GNS space of a positive functional.
    pub fn build(algebra: &GradedAlgebra, modulus: &Functional) -> Result<Self> {
        let rho = modulus.kernel();
        if rho.nrows() != algebra.dim() {
            return Err(Error::dims(format!(
                "functional on M_{} but algebra is M_{}",
                rho.nrows(),
                algebra.dim()
            )));
        }
        let eig: EigenSystem = if algebra.parity_defect(rho) <= EVEN_RTOL {
            algebra.even_eigensystem(rho)?
        } else {
            hermitian_eigendecompose(rho)?
        };
        let max = eig.max_abs();
        let min = eig.eigenvalues[0];
        if max == 0.0 || min < -GNS_NULL_RTOL * max {
            return Err(Error::NotPositive(min));
        }
        let support: Vec<usize> = (0..eig.dim())
            .filter(|&j| eig.eigenvalues[j] > GNS_NULL_RTOL * max)
            .collect();
        let mut space = Self {
            n: eig.dim(),
            basis: eig.eigenvectors,
            weights: eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect(),
            support,
            rho: rho.clone(),
            omega: CVector::zeros(0),
        };
        space.omega = space.eta(&identity(space.n));
        Ok(space)
    }

    /// GNS space of `|ω|` for a Jordan-decomposed functional.
    pub fn from_jordan(algebra: &GradedAlgebra, jd: &JordanData) -> Result<Self> {
        Self::build(algebra, &jd.modulus())
    }

    /// Algebra dimension `n`.
    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    /// Hilbert space dimension `N = n·r`.
    pub fn dim(&self) -> usize {
        self.n * self.support.len()
    }

    pub fn rank(&self) -> usize {
        self.support.len()
    }

    pub fn is_faithful(&self) -> bool {
        self.support.len() == self.n
    }

    /// Modulus kernel the space was built from.
    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// Adapted basis `W` (columns).
    pub fn adapted_basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn local(&self, a: &CMatrix) -> CMatrix {
        self.basis.adjoint() * a * &self.basis
    }

    fn index(&self, i: usize, pos: usize) -> usize {
        i * self.support.len() + pos
    }

    pub fn eta(&self, a: &CMatrix) -> CVector {
        let t = self.local(a);
        let r = self.support.len();
        let mut v = CVector::zeros(self.n * r);
        for i in 0..self.n {
            for (p, &j) in self.support.iter().enumerate() {
                v[self.index(i, p)] = t[(i, j)] * self.weights[j].sqrt();
            }
        }
        v
    }

    /// `Ω = η(1)`.
    pub fn omega(&self) -> &CVector {
        &self.omega
    }

    /// Left multiplication `π(x)`.
    pub fn pi(&self, x: &CMatrix) -> CMatrix {
        kron(&self.local(x), &identity(self.support.len()))
    }

    /// Right multiplication `η(a) ↦ η(ay)`, well defined for `y` commuting
    /// with the support projection of `ρ`.
    pub fn right_mult(&self, y: &CMatrix) -> CMatrix {
        let t = self.local(y);
        let r = self.support.len();
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.n {
            for (p, &j) in self.support.iter().enumerate() {
                for (q, &k) in self.support.iter().enumerate() {
                    let w = (self.weights[j] / self.weights[k]).sqrt();
                    m[(self.index(i, p), self.index(i, q))] = t[(k, j)] * w;
                }
            }
        }
        let _ = r;
        m
    }

    /// Columns `η(E_ij)` in row-major unit order.
    pub fn unit_vectors(&self) -> CMatrix {
        let units = matrix_units(self.n);
        let mut x = CMatrix::zeros(self.dim(), units.len());
        for (k, e) in units.iter().enumerate() {
            x.set_column(k, &self.eta(e));
        }
        x
    }

    /// `⟨η(E_ij), η(E_kl)⟩` in row-major unit order.
    pub fn gram(&self) -> CMatrix {
        let x = self.unit_vectors();
        x.adjoint() * x
    }

    /// Residuals of the representation invariants over the samples.
    pub fn residuals(&self, modulus: &Functional, samples: &[CMatrix]) -> Result<GnsResiduals> {
        let mut out = GnsResiduals::default();
        let norm = modulus.norm().max(f64::MIN_POSITIVE);
        for (k, a) in samples.iter().enumerate() {
            let b = &samples[(k + 1) % samples.len()];
            let scale = a.norm() * b.norm() * norm;
            if scale == 0.0 {
                continue;
            }
            let ip = self.eta(a).dotc(&self.eta(b));
            let want = modulus.eval(&(a.adjoint() * b))?;
            out.inner_product = out.inner_product.max((ip - want).norm() / scale);
            let (pa, pb) = (self.pi(a), self.pi(b));
            let hom = (self.pi(&(a * b)) - &pa * &pb).norm() / (pa.norm() * pb.norm());
            out.homomorphism = out.homomorphism.max(hom);
            out.star = out.star.max(rel_diff(&self.pi(&a.adjoint()), &pa.adjoint()));
            let vac = self.omega.dotc(&(&pa * &self.omega)) - modulus.eval(a)?;
            out.vacuum = out.vacuum.max(vac.norm() / (a.norm() * norm));
        }
        Ok(out)
    }

    /// `σ_min / σ_max` of `a ↦ η(a)`; positive exactly when `Ω` is separating.
    pub fn separating_margin(&self) -> f64 {
        let s = crate::linalg::singular_values(&self.unit_vectors());
        let max = s.iter().cloned().fold(0.0, f64::max);
        if s.len() < self.n * self.n || max == 0.0 {
            return 0.0;
        }
        s.iter().cloned().fold(f64::INFINITY, f64::min) / max
    }
}

#[derive(Clone, Debug, Default)]
pub struct GnsResiduals {
    pub inner_product: f64,
    pub homomorphism: f64,
    pub star: f64,
    pub vacuum: f64,
}

impl GnsResiduals {
    pub fn max(&self) -> f64 {
        self.inner_product
            .max(self.homomorphism)
            .max(self.star)
            .max(self.vacuum)
    }
}

/// Commutant projections and the grading operator `Γ = p₊ − p₋`.
#[derive(Clone, Debug)]
pub struct CommutantProjections {
    pub p_plus: CMatrix,
    pub p_minus: CMatrix,
    pub gamma: CMatrix,
}

fn ensure_same_modulus(gns: &GnsSpace, jd: &JordanData) -> Result<()> {
    let d = rel_diff(&jd.rho, gns.rho());
    if d > 1e-11 {
        return Err(Error::InconsistentInputs(format!(
            "GNS space built from a different modulus (relative difference {d:e})"
        )));
    }
    Ok(())
}

/// `p± = R(χ±)`, checked against `ω±(a) = ⟨Ω, π(a)p±Ω⟩` on matrix units.
pub fn commutant_projections(gns: &GnsSpace, jd: &JordanData) -> Result<CommutantProjections> {
    ensure_same_modulus(gns, jd)?;
    let p_plus = gns.right_mult(&jd.chi_plus);
    let p_minus = gns.right_mult(&jd.chi_minus);
    let scale = jd.modulus().norm().max(f64::MIN_POSITIVE);
    let (wp, wm) = (jd.omega_plus(), jd.omega_minus());
    let (vp, vm) = (&p_plus * gns.omega(), &p_minus * gns.omega());
    for e in matrix_units(gns.algebra_dim()) {
        let pe = gns.pi(&e);
        let om = gns.omega();
        let dp = (om.dotc(&(&pe * &vp)) - wp.eval(&e)?).norm();
        let dm = (om.dotc(&(&pe * &vm)) - wm.eval(&e)?).norm();
        if dp.max(dm) > 1e-10 * scale {
            return Err(Error::InconsistentInputs(format!(
                "ω± disagree with the vacuum formula by {:e}",
                dp.max(dm)
            )));
        }
    }
    Ok(CommutantProjections {
        gamma: &p_plus - &p_minus,
        p_plus,
        p_minus,
    })
}

impl CommutantProjections {
    /// Residuals of the projection, commutation, right-action and graded
    /// vacuum identities.
    pub fn residuals(
        &self,
        gns: &GnsSpace,
        jd: &JordanData,
        samples: &[CMatrix],
    ) -> Result<ProjectionResiduals> {
        let mut out = ProjectionResiduals {
            spectrum: projection_spectrum_defect(&self.p_plus)?
                .max(projection_spectrum_defect(&self.p_minus)?),
            completeness: (&self.p_plus + &self.p_minus - identity(gns.dim())).norm(),
            ..Default::default()
        };
        let omega = jd.omega();
        let scale = omega.norm().max(f64::MIN_POSITIVE);
        for a in samples {
            let na = a.norm();
            if na == 0.0 {
                continue;
            }
            let pa = gns.pi(a);
            let pn = pa.norm();
            for p in [&self.p_plus, &self.p_minus] {
                let comm = (p * &pa - &pa * p).norm() / pn;
                out.commutation = out.commutation.max(comm);
            }
            let ea = gns.eta(a);
            let en = ea.norm().max(f64::MIN_POSITIVE);
            let right = (&self.p_plus * &ea - gns.eta(&(a * &jd.chi_plus))).norm()
                + (&self.p_minus * &ea - gns.eta(&(a * &jd.chi_minus))).norm();
            out.right_action = out.right_action.max(right / en);
            let om = gns.omega();
            let graded = om.dotc(&(&pa * (&self.gamma * om))) - omega.eval(a)?;
            out.graded_vacuum = out.graded_vacuum.max(graded.norm() / (na * scale));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ProjectionResiduals {
    pub spectrum: f64,
    pub completeness: f64,
    pub commutation: f64,
    pub right_action: f64,
    pub graded_vacuum: f64,
}

impl ProjectionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.spectrum,
            self.completeness,
            self.commutation,
            self.right_action,
            self.graded_vacuum,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Projectors onto `H⁰± = span η(𝒜₊χ±)` and `H¹± = span η(𝒜₋χ±)`.
#[derive(Clone, Debug)]
pub struct Subspaces {
    pub h0_plus: CMatrix,
    pub h1_plus: CMatrix,
    pub h0_minus: CMatrix,
    pub h1_minus: CMatrix,
}

impl Subspaces {
    pub fn all(&self) -> [&CMatrix; 4] {
        [&self.h0_plus, &self.h1_plus, &self.h0_minus, &self.h1_minus]
    }

    /// Ranks in the order `H⁰₊, H¹₊, H⁰₋, H¹₋`.
    pub fn dims(&self) -> [usize; 4] {
        self.all()
            .map(|p| p.diagonal().iter().map(|z| z.re).sum::<f64>().round() as usize)
    }
}

pub fn subspace_split(gns: &GnsSpace, algebra: &GradedAlgebra, jd: &JordanData) -> Result<Subspaces> {
    ensure_same_modulus(gns, jd)?;
    let n = gns.algebra_dim();
    let span = |even: bool, chi: &CMatrix| -> CMatrix {
        let cols: Vec<CVector> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| algebra.unit_parity(i, j) == even)
            .map(|(i, j)| gns.eta(&(crate::linalg::unit(n, i, j) * chi)))
            .collect();
        if cols.is_empty() {
            return CMatrix::zeros(gns.dim(), gns.dim());
        }
        column_space_projector(&CMatrix::from_columns(&cols), GNS_NULL_RTOL)
    };
    let out = Subspaces {
        h0_plus: span(true, &jd.chi_plus),
        h1_plus: span(false, &jd.chi_plus),
        h0_minus: span(true, &jd.chi_minus),
        h1_minus: span(false, &jd.chi_minus),
    };
    let overlap = (&out.h0_plus * &out.h1_plus)
        .norm()
        .max((&out.h0_minus * &out.h1_minus).norm());
    let total = out.all().into_iter().fold(CMatrix::zeros(gns.dim(), gns.dim()), |acc, p| acc + p);
    let completeness = (total - identity(gns.dim())).norm();
    if overlap > 1e-9 || completeness > 1e-9 {
        return Err(Error::InconsistentInputs(format!(
            "subspace split defect: overlap {overlap:e}, completeness {completeness:e}"
        )));
    }
    Ok(out)
}

/// Antilinear operator `v ↦ M conj(v)` on GNS coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearMap {
    pub matrix: CMatrix,
}

impl AntilinearMap {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// Coordinate conjugation `K`.
    pub fn conjugation(dim: usize) -> Self {
        Self::new(identity(dim))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * crate::linalg::conj_vec(v)
    }

    /// The linear map `self ∘ first`: `M_self conj(M_first)`.
    pub fn after(&self, first: &AntilinearMap) -> CMatrix {
        &self.matrix * conj(&first.matrix)
    }

    /// The antilinear map `self ∘ x` for linear `x`.
    pub fn after_linear(&self, x: &CMatrix) -> AntilinearMap {
        AntilinearMap::new(&self.matrix * conj(x))
    }

    /// The linear map `self ∘ x ∘ self`.
    pub fn sandwich(&self, x: &CMatrix) -> CMatrix {
        &self.matrix * conj(x) * conj(&self.matrix)
    }

    /// `max_kl |⟨Ae_k, Ae_l⟩ − conj⟨e_k, e_l⟩|`.
    pub fn antiunitarity_defect(&self) -> f64 {
        let n = self.matrix.ncols();
        let g = self.matrix.adjoint() * &self.matrix - identity(n);
        g.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

fn ensure_flow_matches(gns: &GnsSpace, flow: &ModularFlow) -> Result<()> {
    let d = rel_diff(flow.rho(), gns.rho());
    if d > 1e-11 {
        return Err(Error::FlowMismatch(d));
    }
    Ok(())
}

/// Element of the algebra whose GNS vector is the `k`-th coordinate vector.
fn basis_element(gns: &GnsSpace, k: usize) -> CMatrix {
    let r = gns.rank();
    let (i, j) = (k / r, gns.support[k % r]);
    let w = &gns.basis;
    w.column(i) * w.column(j).adjoint() / re(gns.weights[j].sqrt())
}

/// `J η(a) = η(α_{i/2}(a*))`, evaluated on the adapted orthonormal basis.
pub fn modular_conjugation(gns: &GnsSpace, flow: &ModularFlow) -> Result<AntilinearMap> {
    ensure_flow_matches(gns, flow)?;
    if !gns.is_faithful() {
        return Err(Error::NotFaithful);
    }
    let n = gns.dim();
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        let a = basis_element(gns, k);
        let image = flow.evolve(&a.adjoint(), c(0.0, 0.5))?;
        m.set_column(k, &gns.eta(&image));
    }
    Ok(AntilinearMap::new(m))
}

/// `K`, `U = KJ`, and the resulting graded representation `π′ = Uπ(·)U*`.
#[derive(Clone, Debug)]
pub struct ConjugateRepresentation {
    pub k: AntilinearMap,
    pub u: CMatrix,
    pub u_adjoint: CMatrix,
    /// Vacuum `UΩ`.
    pub vacuum: CVector,
    /// `Uπ(g′)U*`.
    pub gamma: CMatrix,
}

impl ConjugateRepresentation {
    pub fn pi_prime(&self, gns: &GnsSpace, a: &CMatrix) -> CMatrix {
        &self.u * gns.pi(a) * &self.u_adjoint
    }

    /// Images of the matrix units together with grading operator and vacuum.
    pub fn graded_representation(&self, gns: &GnsSpace) -> GradedRepresentation {
        GradedRepresentation {
            images: matrix_units(gns.algebra_dim())
                .iter()
                .map(|e| self.pi_prime(gns, e))
                .collect(),
            gamma: self.gamma.clone(),
            vacuum: self.vacuum.clone(),
        }
    }
}

/// Conjugate representation for the canonical `K` (coordinate conjugation).
pub fn conjugate_representation(
    gns: &GnsSpace,
    jd: &JordanData,
    j: &AntilinearMap,
) -> Result<ConjugateRepresentation> {
    conjugate_representation_with(gns, jd, j, &AntilinearMap::conjugation(gns.dim()))
}

/// Conjugate representation for an arbitrary antiunitary involution `K`.
pub fn conjugate_representation_with(
    gns: &GnsSpace,
    jd: &JordanData,
    j: &AntilinearMap,
    k: &AntilinearMap,
) -> Result<ConjugateRepresentation> {
    ensure_same_modulus(gns, jd)?;
    let u = k.after(j);
    let u_adjoint = u.adjoint();
    let defect = (&u_adjoint * &u - identity(gns.dim())).norm();
    if defect > 1e-11 * (gns.dim() as f64).sqrt() {
        return Err(Error::NonUnitary(defect));
    }
    Ok(ConjugateRepresentation {
        vacuum: &u * gns.omega(),
        gamma: &u * gns.pi(&jd.g_prime) * &u_adjoint,
        k: k.clone(),
        u,
        u_adjoint,
    })
}

/// A representation given on matrix units (row-major), with its grading
/// operator and vacuum.
#[derive(Clone, Debug)]
pub struct GradedRepresentation {
    pub images: Vec<CMatrix>,
    pub gamma: CMatrix,
    pub vacuum: CVector,
}

impl GradedRepresentation {
    fn expectations(&self) -> (Vec<C64>, Vec<C64>) {
        let v = &self.vacuum;
        self.images
            .iter()
            .map(|x| {
                let xv = x * v;
                (v.dotc(&(&self.gamma * &xv)), v.dotc(&xv))
            })
            .unzip()
    }
}

#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub v: CMatrix,
    pub unitarity: f64,
    pub intertwining: f64,
    pub grading: f64,
    pub vacuum: f64,
}

impl Intertwiner {
    pub fn max(&self) -> f64 {
        self.unitarity
            .max(self.intertwining)
            .max(self.grading)
            .max(self.vacuum)
    }
}

/// The unitary `V π′(a)Ω′ = π″(a)Ω″` between graded representations with
/// matching graded and ungraded vacuum expectations.
pub fn intertwiner(first: &GradedRepresentation, second: &GradedRepresentation) -> Result<Intertwiner> {
    if first.images.len() != second.images.len() || first.vacuum.len() != second.vacuum.len() {
        return Err(Error::dims("representations of different shapes"));
    }
    let scale = first.vacuum.norm_squared().max(second.vacuum.norm_squared()).max(1.0);
    let (g1, u1) = first.expectations();
    let (g2, u2) = second.expectations();
    let mismatch = g1
        .iter()
        .zip(&g2)
        .chain(u1.iter().zip(&u2))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if mismatch > 1e-10 * scale {
        return Err(Error::HypothesisViolation(mismatch / scale));
    }
    let cols = |rep: &GradedRepresentation| -> CMatrix {
        let vs: Vec<CVector> = rep.images.iter().map(|x| x * &rep.vacuum).collect();
        CMatrix::from_columns(&vs)
    };
    let (x1, x2) = (cols(first), cols(second));
    let v = &x2 * pseudo_inverse(&x1, GNS_NULL_RTOL);
    let n = v.nrows();
    let intertwining = first
        .images
        .iter()
        .zip(&second.images)
        .map(|(a, b)| (&v * a - b * &v).norm() / a.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(Intertwiner {
        unitarity: (v.adjoint() * &v - identity(n)).norm(),
        intertwining,
        grading: (&v * &first.gamma - &second.gamma * &v).norm(),
        vacuum: (&v * &first.vacuum - &second.vacuum).norm(),
        v,
    })
}

/// Commutation of `Jπ(𝒜)J` with `π(𝒜)`.
#[derive(Clone, Debug)]
pub struct CommutantReport {
    pub commutator: f64,
    /// Distance of each `Jπ(E_ij)J` from the computed commutant, relative;
    /// `None` above [`COMMUTANT_MAX_DIM`].
    pub membership: Option<f64>,
}

pub fn commutant_check(gns: &GnsSpace, j: &AntilinearMap, samples: &[CMatrix]) -> Result<CommutantReport> {
    let mut commutator: f64 = 0.0;
    for (k, a) in samples.iter().enumerate() {
        let b = &samples[(k + 1) % samples.len()];
        let ja = j.sandwich(&gns.pi(a));
        let pb = gns.pi(b);
        let scale = ja.norm() * pb.norm();
        if scale > 0.0 {
            commutator = commutator.max((&ja * &pb - &pb * &ja).norm() / scale);
        }
    }
    let n = gns.algebra_dim();
    let membership = if n <= COMMUTANT_MAX_DIM {
        let basis = commutant_basis(&generators(gns), gns.dim())?;
        let vecs: Vec<CVector> = basis.iter().map(vec_row_major).collect();
        let mut worst: f64 = 0.0;
        for e in matrix_units(n) {
            let x = vec_row_major(&j.sandwich(&gns.pi(&e)));
            let mut rest = x.clone();
            for b in &vecs {
                rest -= b * b.dotc(&x);
            }
            worst = worst.max(rest.norm() / x.norm().max(f64::MIN_POSITIVE));
        }
        Some(worst)
    } else {
        None
    };
    Ok(CommutantReport {
        commutator,
        membership,
    })
}

/// `π(E_{i,i+1})`, which together with adjoints generate `π(𝒜)`.
fn generators(gns: &GnsSpace) -> Vec<CMatrix> {
    let n = gns.algebra_dim();
    if n == 1 {
        return vec![gns.pi(&identity(1))];
    }
    (0..n - 1)
        .map(|i| gns.pi(&crate::linalg::unit(n, i, i + 1)))
        .collect()
}

/// Double commutant of `π(𝒜)`: its dimension and the distance of `π(E_ij)`
/// from it. `None` above [`COMMUTANT_MAX_DIM`].
pub fn double_commutant(gns: &GnsSpace) -> Result<Option<(usize, f64)>> {
    let n = gns.algebra_dim();
    if n > COMMUTANT_MAX_DIM {
        return Ok(None);
    }
    let first = commutant_basis(&generators(gns), gns.dim())?;
    let second = commutant_basis(&first, gns.dim())?;
    let vecs: Vec<CVector> = second.iter().map(vec_row_major).collect();
    let mut worst: f64 = 0.0;
    for e in matrix_units(n) {
        let x = vec_row_major(&gns.pi(&e));
        let mut rest = x.clone();
        for b in &vecs {
            rest -= b * b.dotc(&x);
        }
        worst = worst.max(rest.norm() / x.norm());
    }
    Ok(Some((second.len(), worst)))
}

/// `Δ`, `Δ^{1/2}` and `S = JΔ^{1/2}`.
#[derive(Clone, Debug)]
pub struct ModularOperator {
    pub delta: CMatrix,
    pub delta_half: CMatrix,
    pub s: AntilinearMap,
}

/// `Δη(a) = η(ρaρ^{-1})` from the flow at `z = i`, and its polar partner.
pub fn modular_operator(gns: &GnsSpace, flow: &ModularFlow, j: &AntilinearMap) -> Result<ModularOperator> {
    ensure_flow_matches(gns, flow)?;
    if !gns.is_faithful() {
        return Err(Error::NotFaithful);
    }
    let n = gns.dim();
    let mut delta = CMatrix::zeros(n, n);
    for k in 0..n {
        let a = basis_element(gns, k);
        delta.set_column(k, &gns.eta(&flow.evolve(&a, c(0.0, 1.0))?));
    }
    let delta = (&delta + delta.adjoint()) * re(0.5);
    let delta_half = matrix_power(&delta, re(0.5))?;
    let s = j.after_linear(&delta_half);
    Ok(ModularOperator {
        delta,
        delta_half,
        s,
    })
}

impl ModularOperator {
    /// `Δ^{-it}`-implementation and Tomita relation residuals.
    pub fn residuals(&self, gns: &GnsSpace, flow: &ModularFlow, samples: &[CMatrix], times: &[f64]) -> Result<ModularResiduals> {
        let mut out = ModularResiduals {
            vacuum: (&self.delta * gns.omega() - gns.omega()).norm() / gns.omega().norm(),
            ..Default::default()
        };
        for a in samples {
            let ea = gns.eta(a);
            let en = ea.norm();
            if en == 0.0 {
                continue;
            }
            let tomita = (self.s.apply(&ea) - gns.eta(&a.adjoint())).norm() / en;
            out.tomita = out.tomita.max(tomita);
        }
        for &t in times {
            let fwd = matrix_power(&self.delta, c(0.0, -t))?;
            let back = matrix_power(&self.delta, c(0.0, t))?;
            for a in samples {
                let lhs = &fwd * gns.pi(a) * &back;
                let rhs = gns.pi(&flow.evolve(a, re(t))?);
                out.implementation = out.implementation.max(rel_diff(&lhs, &rhs));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ModularResiduals {
    pub vacuum: f64,
    pub tomita: f64,
    pub implementation: f64,
}

impl ModularResiduals {
    pub fn max(&self) -> f64 {
        self.vacuum.max(self.tomita).max(self.implementation)
    }
}

/// Everything built from a graded functional: its Jordan data, the GNS space
/// of the modulus, `p±`, `Γ` and the four-fold split.
#[derive(Clone, Debug)]
pub struct GradedGns {
    pub algebra: GradedAlgebra,
    pub jordan: JordanData,
    pub space: GnsSpace,
    pub projections: CommutantProjections,
    pub subspaces: Subspaces,
}

impl GradedGns {
    pub fn build(algebra: &GradedAlgebra, omega: &Functional) -> Result<Self> {
        let jordan = jordan_decompose(omega)?;
        let space = GnsSpace::from_jordan(algebra, &jordan)?;
        let projections = commutant_projections(&space, &jordan)?;
        let subspaces = subspace_split(&space, algebra, &jordan)?;
        Ok(Self {
            algebra: algebra.clone(),
            jordan,
            space,
            projections,
            subspaces,
        })
    }

    /// `ω±(x) = ⟨Ω, π(x)p±Ω⟩`.
    pub fn omega_pm(&self, x: &CMatrix, positive: bool) -> C64 {
        let p = if positive {
            &self.projections.p_plus
        } else {
            &self.projections.p_minus
        };
        let om = self.space.omega();
        om.dotc(&(self.space.pi(x) * (p * om)))
    }

    /// Identity residuals: `ω∓(bχ±a)` for even `a` and `ω±(bχ±a)` for odd
    /// `a`, relative to `‖a‖_F ‖b‖_F ‖ω‖`.
    pub fn identity_residual(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        let scale = a.norm() * b.norm() * self.jordan.modulus().norm();
        if scale == 0.0 {
            return 0.0;
        }
        let (even, odd) = self
            .algebra
            .parity_split(a)
            .expect("sample has the algebra's dimension");
        let (cp, cm) = (&self.jordan.chi_plus, &self.jordan.chi_minus);
        let mut worst: f64 = 0.0;
        if even.norm() > 0.0 {
            worst = worst
                .max(self.omega_pm(&(b * cp * &even), false).norm())
                .max(self.omega_pm(&(b * cm * &even), true).norm());
        }
        if odd.norm() > 0.0 {
            worst = worst
                .max(self.omega_pm(&(b * cp * &odd), true).norm())
                .max(self.omega_pm(&(b * cm * &odd), false).norm());
        }
        worst / scale
    }

    /// For `a = xχ₋` (so `ω₊(a*a) = 0`): `ω₊(aa*)` for even `x` and `ω₋(aa*)`
    /// for odd `x`, relative to `‖x‖²_F ‖ω‖`. Returns (precondition, swap).
    pub fn kernel_swap_residual(&self, x: &CMatrix) -> (f64, f64) {
        let scale = x.norm_squared() * self.jordan.modulus().norm();
        if scale == 0.0 {
            return (0.0, 0.0);
        }
        let (even, odd) = self
            .algebra
            .parity_split(x)
            .expect("sample has the algebra's dimension");
        let mut pre: f64 = 0.0;
        let mut post: f64 = 0.0;
        for (part, target_plus) in [(even, true), (odd, false)] {
            let a = part * &self.jordan.chi_minus;
            pre = pre.max(self.omega_pm(&(a.adjoint() * &a), true).norm());
            post = post.max(self.omega_pm(&(&a * a.adjoint()), target_plus).norm());
        }
        (pre / scale, post / scale)
    }
}

/// Proposition 1 residuals for `J`.
#[derive(Clone, Debug, Default)]
pub struct ConjugationResiduals {
    pub antiunitarity: f64,
    pub involution: f64,
    pub odd_swap: f64,
    pub even_fixed: f64,
    pub vacuum: f64,
    /// Rank of `{Jπ(E_ij)J Ω}`; equals `N` when `Ω` is cyclic for the commutant.
    pub commutant_cyclic_rank: usize,
}

impl ConjugationResiduals {
    pub fn max(&self) -> f64 {
        self.antiunitarity
            .max(self.involution)
            .max(self.odd_swap)
            .max(self.even_fixed)
            .max(self.vacuum)
    }
}

pub fn conjugation_residuals(gg: &GradedGns, j: &AntilinearMap) -> ConjugationResiduals {
    let gns = &gg.space;
    let s = &gg.subspaces;
    let n = gns.dim();
    let cols: Vec<CVector> = matrix_units(gns.algebra_dim())
        .iter()
        .map(|e| j.sandwich(&gns.pi(e)) * gns.omega())
        .collect();
    ConjugationResiduals {
        antiunitarity: j.antiunitarity_defect(),
        involution: (j.after(j) - identity(n)).norm(),
        odd_swap: (j.sandwich(&s.h1_plus) - &s.h1_minus)
            .norm()
            .max((j.sandwich(&s.h1_minus) - &s.h1_plus).norm()),
        even_fixed: (j.sandwich(&s.h0_plus) - &s.h0_plus)
            .norm()
            .max((j.sandwich(&s.h0_minus) - &s.h0_minus).norm()),
        vacuum: (j.apply(gns.omega()) - gns.omega()).norm(),
        commutant_cyclic_rank: rank(&CMatrix::from_columns(&cols), GNS_NULL_RTOL),
    }
}

/// Proposition 2 residuals for `π′`.
#[derive(Clone, Debug, Default)]
pub struct ConjugateResiduals {
    pub homomorphism: f64,
    pub star: f64,
    pub equivariance: f64,
    pub grading_transport: f64,
    pub graded_vacuum: f64,
    pub cyclic_rank: usize,
    pub dim: usize,
}

impl ConjugateResiduals {
    pub fn max(&self) -> f64 {
        self.homomorphism
            .max(self.star)
            .max(self.equivariance)
            .max(self.grading_transport)
            .max(self.graded_vacuum)
    }

    pub fn cyclic(&self) -> bool {
        self.cyclic_rank == self.dim
    }
}

pub fn conjugate_residuals(
    gg: &GradedGns,
    rep: &ConjugateRepresentation,
    samples: &[CMatrix],
) -> Result<ConjugateResiduals> {
    let gns = &gg.space;
    let gamma = &gg.projections.gamma;
    let omega = gg.jordan.omega();
    let scale = omega.norm().max(f64::MIN_POSITIVE);
    let mut out = ConjugateResiduals {
        grading_transport: (&rep.gamma - gamma).norm(),
        dim: gns.dim(),
        ..Default::default()
    };
    for (k, a) in samples.iter().enumerate() {
        let b = &samples[(k + 1) % samples.len()];
        let (pa, pb) = (rep.pi_prime(gns, a), rep.pi_prime(gns, b));
        let (na, nb) = (pa.norm(), pb.norm());
        if na == 0.0 || nb == 0.0 {
            continue;
        }
        let hom = (rep.pi_prime(gns, &(a * b)) - &pa * &pb).norm() / (na * nb);
        out.homomorphism = out.homomorphism.max(hom);
        out.star = out.star.max(rel_diff(&rep.pi_prime(gns, &a.adjoint()), &pa.adjoint()));
        let eq = gamma * &pa * gamma - rep.pi_prime(gns, &gg.algebra.gamma(a)?);
        out.equivariance = out.equivariance.max(eq.norm() / na);
        let om = gns.omega();
        let gv = om.dotc(&(gamma * (&pa * om))) - omega.eval(a)?;
        out.graded_vacuum = out.graded_vacuum.max(gv.norm() / (a.norm() * scale));
    }
    let cols: Vec<CVector> = matrix_units(gns.algebra_dim())
        .iter()
        .map(|e| rep.pi_prime(gns, e) * gns.omega())
        .collect();
    out.cyclic_rank = rank(&CMatrix::from_columns(&cols), GNS_NULL_RTOL);
    Ok(out)
}

/// Samples `⟨Ω, Γπ′(e)Ω⟩` for random projections `e ≤ χ±`: returns the most
/// negative value on `H₊`, the most positive on `H₋`, and the worst range
/// leakage `‖p∓π′(e)‖`.
pub fn compatibility_probe(
    gg: &GradedGns,
    rep: &ConjugateRepresentation,
    rng: &mut crate::sampling::SampleRng,
    samples: usize,
) -> (f64, f64, f64) {
    let gns = &gg.space;
    let om = gns.omega();
    let gamma = &gg.projections.gamma;
    let mut plus_min = f64::INFINITY;
    let mut minus_max = f64::NEG_INFINITY;
    let mut leak: f64 = 0.0;
    for k in 0..samples {
        for positive in [true, false] {
            let (chi, other) = if positive {
                (&gg.jordan.chi_plus, &gg.projections.p_minus)
            } else {
                (&gg.jordan.chi_minus, &gg.projections.p_plus)
            };
            let r = chi.diagonal().iter().map(|z| z.re).sum::<f64>().round() as usize;
            if r == 0 {
                continue;
            }
            let e = rng.subprojection(chi, 1 + k % r);
            let pe = rep.pi_prime(gns, &e);
            let v = om.dotc(&(gamma * (&pe * om))).re;
            if positive {
                plus_min = plus_min.min(v);
            } else {
                minus_max = minus_max.max(v);
            }
            leak = leak.max((other * &pe).norm());
        }
    }
    (plus_min, minus_max, leak)
}

/// Diagonal phase rebasing `K′ = D²·conj`, with `D = diag(e^{iθ})`; the
/// intertwiner from the canonical representation is `D²`.
pub fn phase_rebased_conjugation(dim: usize, rng: &mut crate::sampling::SampleRng) -> AntilinearMap {
    let phases: Vec<C64> = (0..dim)
        .map(|_| c(0.0, 2.0 * std::f64::consts::TAU * rng.uniform()).exp())
        .collect();
    AntilinearMap::new(CMatrix::from_diagonal(&CVector::from_vec(phases)))
}

/// Real diagonal matrix helper re-exported for fixtures.
pub fn real_diagonal(values: &[f64]) -> CMatrix {
    diag_real(values)
}
