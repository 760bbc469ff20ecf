//! A finite chain of graded matrix algebras, the increasing net of prefix
//! regions `O_k = {1..k}` with `𝒜(O_k) = M_{D_k} ⊗ 1`, restrictions of one
//! global supertrace functional to the regions, and the local probes built
//! on top of them.

use crate::error::{Error, Result};
use crate::flow::{
    graded_kms_residual, graded_upper_boundary, growth_probe, kms_residual, kms_scale,
    upper_boundary, ModularFlow, StripFunction,
};
use crate::gns::{GnsSpace, GradedGns, GNS_NULL_RTOL};
use crate::graded::{Functional, GradedAlgebra};
use crate::jordan::jordan_decompose;
use crate::linalg::{
    c, column_space_projector, hermitian_eigendecompose, identity, kron, matrix_units,
    partial_trace, projection_spectrum_defect, pseudo_inverse, re, rel_diff, trace_norm, CMatrix,
    CVector,
};
use crate::sampling::SampleRng;

/// Relative distance below which a density counts as a product state.
pub const PRODUCT_RTOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LocalNet {
    sites: Vec<GradedAlgebra>,
    site_dims: Vec<usize>,
    algebra: GradedAlgebra,
    rho: CMatrix,
    omega: Functional,
    product: bool,
}

/// Trace out every site except `site`.
pub fn site_marginal(m: &CMatrix, site_dims: &[usize], site: usize) -> CMatrix {
    let before: usize = site_dims[..site].iter().product();
    let d = site_dims[site];
    let after: usize = site_dims[site + 1..].iter().product();
    CMatrix::from_fn(d, d, |i, j| {
        let mut s = re(0.0);
        for b in 0..before {
            for a in 0..after {
                let row = (b * d + i) * after + a;
                let col = (b * d + j) * after + a;
                s += m[(row, col)];
            }
        }
        s
    })
}

pub fn build_chain(sites: &[GradedAlgebra], rho: &CMatrix) -> Result<LocalNet> {
    if sites.len() < 2 {
        return Err(Error::dims(format!(
            "a chain needs at least two sites, got {}",
            sites.len()
        )));
    }
    if let Some(s) = sites.iter().find(|s| s.dim() < 2) {
        return Err(Error::dims(format!("site dimension {} is below 2", s.dim())));
    }
    let algebra = sites[1..]
        .iter()
        .fold(sites[0].clone(), |acc, s| acc.tensor(s));
    let omega = algebra.supertrace_functional(rho)?;
    let site_dims: Vec<usize> = sites.iter().map(GradedAlgebra::dim).collect();
    let tr = crate::linalg::trace(rho).re;
    let marginals: Vec<CMatrix> = (0..sites.len())
        .map(|k| site_marginal(rho, &site_dims, k))
        .collect();
    let product_guess = marginals[1..]
        .iter()
        .fold(marginals[0].clone(), |acc, m| kron(&acc, m))
        / re(tr.powi(sites.len() as i32 - 1));
    Ok(LocalNet {
        product: rel_diff(&product_guess, rho) < PRODUCT_RTOL,
        sites: sites.to_vec(),
        site_dims,
        algebra,
        rho: rho.clone(),
        omega,
    })
}

impl LocalNet {
    /// Seeded chain: a product of unit-trace even site densities, or one
    /// unit-trace even density on the whole chain when `entangled`.
    pub fn random(sites: &[GradedAlgebra], entangled: bool, seed: u64) -> Result<Self> {
        let mut rng = SampleRng::new(seed);
        let unit_trace = |m: CMatrix| {
            let t = crate::linalg::trace(&m).re;
            m / re(t)
        };
        let rho = if entangled {
            let global = sites[1..]
                .iter()
                .fold(sites.first().cloned().ok_or(Error::dims("empty chain"))?, |a, s| a.tensor(s));
            unit_trace(rng.even_density(&global))
        } else {
            sites
                .iter()
                .map(|s| unit_trace(rng.even_density(s)))
                .reduce(|a, b| kron(&a, &b))
                .ok_or(Error::dims("empty chain"))?
        };
        build_chain(sites, &rho)
    }

    pub fn sites(&self) -> usize {
        self.sites.len()
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn site_algebra(&self, k: usize) -> &GradedAlgebra {
        &self.sites[k]
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// Global functional `str(·ρ)`.
    pub fn omega(&self) -> &Functional {
        &self.omega
    }

    pub fn is_product(&self) -> bool {
        self.product
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    fn check_region(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.sites() {
            return Err(Error::RegionOutOfRange { k, m: self.sites() });
        }
        Ok(())
    }

    /// `D_k = dim` of the first `k` sites.
    pub fn region_dim(&self, k: usize) -> Result<usize> {
        self.check_region(k)?;
        Ok(self.site_dims[..k].iter().product())
    }

    /// Grading of the region algebra `𝒜(O_k)`.
    pub fn region_algebra(&self, k: usize) -> Result<GradedAlgebra> {
        self.check_region(k)?;
        Ok(self.sites[1..k]
            .iter()
            .fold(self.sites[0].clone(), |acc, s| acc.tensor(s)))
    }

    /// `a ↦ a ⊗ 1` from `𝒜(O_k)` into the global algebra.
    pub fn embed(&self, k: usize, a: &CMatrix) -> Result<CMatrix> {
        let dk = self.region_dim(k)?;
        crate::linalg::ensure_dim(a, dk, "region element")?;
        Ok(kron(a, &identity(self.dim() / dk)))
    }

    /// `ω|_{O_k}` with kernel `T_k = tr_{>k} T`.
    pub fn restrict(&self, k: usize) -> Result<Functional> {
        self.check_region(k)?;
        Functional::new(partial_trace(self.omega.kernel(), &self.site_dims, k)?)
    }

    /// `max |ω_k(a) − ω(a ⊗ 1)| / ‖a‖_F ‖ω‖` over the region's matrix units.
    pub fn restriction_residual(&self, k: usize) -> Result<f64> {
        let local = self.restrict(k)?;
        let scale = self.omega.norm();
        let mut worst: f64 = 0.0;
        for e in matrix_units(self.region_dim(k)?) {
            let d = local.eval(&e)? - self.omega.eval(&self.embed(k, &e)?)?;
            worst = worst.max(d.norm() / scale);
        }
        Ok(worst)
    }
}

/// One entry of the modulus discrepancy table.
#[derive(Clone, Debug)]
pub struct Discrepancy {
    pub k: usize,
    pub k_outer: usize,
    /// `‖|T_k| − tr|T_{k′}|‖₁ / ‖tr|T_{k′}|‖₁`.
    pub d: f64,
    /// Same difference over `‖T_k‖₁`.
    pub d_kernel_normalized: f64,
}

/// Compares the modulus of each restriction with the restriction of an outer
/// region's modulus, for every pair `k < k′`.
pub fn local_modulus_probe(net: &LocalNet) -> Result<Vec<Discrepancy>> {
    let m = net.sites();
    let moduli: Vec<CMatrix> = (1..=m)
        .map(|k| Ok(jordan_decompose(&net.restrict(k)?)?.rho))
        .collect::<Result<_>>()?;
    let mut table = Vec::new();
    for k in 1..=m {
        let tk = net.restrict(k)?;
        for k_outer in k + 1..=m {
            let reduced = partial_trace(&moduli[k_outer - 1], &net.site_dims[..k_outer], k)?;
            let diff = trace_norm(&(&moduli[k - 1] - &reduced))?;
            let norm = trace_norm(&reduced)?;
            let kn = tk.norm();
            table.push(Discrepancy {
                k,
                k_outer,
                d: if norm > 0.0 { diff / norm } else { diff },
                d_kernel_normalized: if kn > 0.0 { diff / kn } else { f64::INFINITY },
            });
        }
    }
    Ok(table)
}

/// Structure of the global GNS space seen from one region.
#[derive(Clone, Debug)]
pub struct RegionStructure {
    pub k: usize,
    /// `dim H(O_k)`.
    pub dim: usize,
    /// `‖η(1_{O_k} ⊗ 1) − Ω‖`.
    pub vacuum: f64,
    /// `max_{k′>k} ‖Q_{k′}Q_k − Q_k‖`.
    pub containment: f64,
    /// Local route `R(P_k R_k^{-1})` against the compression `Q_k p± Q_k`.
    pub agreement: f64,
    /// Agreement of `p_{O_k±}` with the compression of `p_{O_{k′}±}`.
    pub restriction: f64,
    /// Spectral distance of the region operators from projections (reported).
    pub projection_defect: f64,
    /// `min λ(p_{O_{k+1}±} − p_{O_k±})`, nonnegative when nondecreasing (reported).
    pub monotonicity_margin: f64,
}

/// Projector onto `H(O_k) = span π(𝒜(O_k))Ω` and the region operators
/// `p_{O_k±}` in global coordinates.
fn region_operators(
    net: &LocalNet,
    gg: &GradedGns,
    k: usize,
) -> Result<(CMatrix, [CMatrix; 2], f64, f64)> {
    let gns = &gg.space;
    let dk = net.region_dim(k)?;
    let units = matrix_units(dk);
    let cols: Vec<CVector> = units
        .iter()
        .map(|e| Ok(gns.eta(&net.embed(k, e)?)))
        .collect::<Result<_>>()?;
    let x = CMatrix::from_columns(&cols);
    let q = column_space_projector(&x, GNS_NULL_RTOL);

    let region = net.region_algebra(k)?;
    let reduce = |m: &CMatrix| partial_trace(m, &net.site_dims, k);
    let local_modulus = Functional::new(reduce(&gg.jordan.rho)?)?;
    let local = GnsSpace::build(&region, &local_modulus)?;
    let inv = crate::linalg::matrix_power(local_modulus.kernel(), re(-1.0))?;
    // isometry η_k(a) ↦ η(a ⊗ 1)
    let v = &x * pseudo_inverse(&local.unit_vectors(), GNS_NULL_RTOL);
    let mut agreement: f64 = 0.0;
    let mut defect: f64 = 0.0;
    let mut ops = [CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)];
    for (slot, (part, p)) in [
        (&gg.jordan.t_plus, &gg.projections.p_plus),
        (&gg.jordan.t_minus, &gg.projections.p_minus),
    ]
    .into_iter()
    .enumerate()
    {
        let y = reduce(part)? * &inv;
        let routed = &v * local.right_mult(&y) * v.adjoint();
        let compressed = &q * p * &q;
        agreement = agreement.max((&routed - &compressed).norm());
        let herm = (&compressed + compressed.adjoint()) * re(0.5);
        // spectrum of the compression restricted to H(O_k)
        let restricted = v.adjoint() * &herm * &v;
        defect = defect.max(projection_spectrum_defect(&restricted)?);
        ops[slot] = compressed;
    }
    Ok((q, ops, agreement, defect))
}

pub fn local_gns_structure(net: &LocalNet, gg: &GradedGns) -> Result<Vec<RegionStructure>> {
    let m = net.sites();
    let mut per = Vec::with_capacity(m);
    for k in 1..=m {
        per.push(region_operators(net, gg, k)?);
    }
    let omega = gg.space.omega();
    let mut out = Vec::with_capacity(m);
    for k in 1..=m {
        let (q, ops, agreement, defect) = &per[k - 1];
        let one = identity(net.region_dim(k)?);
        let vacuum = (gg.space.eta(&net.embed(k, &one)?) - omega).norm();
        let mut containment: f64 = 0.0;
        let mut restriction: f64 = 0.0;
        for (q2, ops2, _, _) in &per[k..] {
            containment = containment.max((q2 * q - q).norm());
            for s in 0..2 {
                restriction = restriction.max((q * &ops2[s] * q - &ops[s]).norm());
            }
        }
        let monotonicity_margin = if k < m {
            let next = &per[k].1;
            (0..2)
                .map(|s| {
                    let d = &next[s] - &ops[s];
                    hermitian_eigendecompose(&((&d + d.adjoint()) * re(0.5)))
                        .map(|e| e.eigenvalues[0])
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        } else {
            f64::INFINITY
        };
        out.push(RegionStructure {
            k,
            dim: q.diagonal().iter().map(|z| z.re).sum::<f64>().round() as usize,
            vacuum,
            containment,
            agreement: *agreement,
            restriction,
            projection_defect: *defect,
            monotonicity_margin,
        });
    }
    Ok(out)
}

/// Residual classes of the modulus-KMS suite on local elements.
#[derive(Clone, Debug, Default)]
pub struct Proposition4Report {
    pub samples: usize,
    /// KMS of `|ω|` on even/even and odd/odd local pairs, through the upper
    /// boundary of the strip function.
    pub modulus_kms: f64,
    /// Identities for smoothed local elements.
    pub identities: f64,
    /// Kernel swap on `a = xχ₋` with smoothed `x`.
    pub kernel_swap: f64,
    /// `max(0, −ω±(a*a))` for smoothed `a`, relative.
    pub positivity: f64,
    /// Shifted-boundary identity `F_{a,b′}(t+i) = ω(α_t(b′)a^γ)`.
    pub shifted_boundary: f64,
    /// Largest exponent `N` returned by the growth probe on local pairs.
    pub growth_exponent: u32,
    /// Graded-KMS residual of `ω`, and of each restriction with its own
    /// reduced flow (`None` where the restricted modulus is singular).
    pub global_graded_kms: f64,
    pub region_graded_kms: Vec<Option<f64>>,
    /// `|residual(σ) − residual(0)|` at `σ = 1e-3` over the identity and swap
    /// classes.
    pub sigma_drift: f64,
}

impl Proposition4Report {
    /// Largest of the asserted residual classes.
    pub fn max(&self) -> f64 {
        [
            self.modulus_kms,
            self.identities,
            self.kernel_swap,
            self.positivity,
            self.shifted_boundary,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Smoothing width used by the suite.
pub const SUITE_SIGMA: f64 = 0.5;

pub fn proposition4_suite(
    net: &LocalNet,
    gg: &GradedGns,
    budget: usize,
    seed: u64,
) -> Result<Proposition4Report> {
    if budget == 0 {
        return Err(Error::BudgetZero);
    }
    let alg = net.algebra();
    let modulus = gg.jordan.modulus();
    let flow = ModularFlow::graded(alg, &gg.jordan.rho)?;
    let omega = net.omega();
    let mut rng = SampleRng::new(seed);
    let mut out = Proposition4Report {
        samples: budget,
        ..Default::default()
    };
    let m = net.sites();
    for s in 0..budget {
        let k = 1 + s % m;
        let dk = net.region_dim(k)?;
        let draw = |rng: &mut SampleRng| net.embed(k, &rng.gaussian_matrix(dk, dk));
        let (x, y) = (draw(&mut rng)?, draw(&mut rng)?);
        let same_parity = if s % 2 == 0 {
            (alg.even_part(&x), alg.even_part(&y))
        } else {
            (alg.odd_part(&x), alg.odd_part(&y))
        };
        let (a, b) = same_parity;
        let t = 4.0 * rng.uniform() - 2.0;
        // G_{b,a}(t + i) = |ω|(α_t(a) b)
        let g = StripFunction::new(&modulus, &flow, &b, &a)?;
        let scale = kms_scale(&modulus, &flow, &a, &b);
        if scale > 0.0 {
            let edge = upper_boundary(&modulus, &flow, &b, &a, t)?;
            out.modulus_kms = out
                .modulus_kms
                .max((g.eval(c(t, 1.0)) - edge).norm() / scale)
                .max(kms_residual(&modulus, &flow, &a, &b)?);
        }

        let z = c(2.0 * rng.uniform() - 1.0, rng.uniform());
        let xs = flow.smooth(&x, SUITE_SIGMA, z)?;
        let fine = flow.smooth(&x, 1e-3, re(0.0))?;
        out.identities = out.identities.max(gg.identity_residual(&xs, &y));
        let (pre, post) = gg.kernel_swap_residual(&xs);
        out.kernel_swap = out.kernel_swap.max(pre).max(post);
        let drift_id = (gg.identity_residual(&fine, &y) - gg.identity_residual(&x, &y)).abs();
        let drift_swap = (gg.kernel_swap_residual(&fine).1 - gg.kernel_swap_residual(&x).1).abs();
        out.sigma_drift = out.sigma_drift.max(drift_id).max(drift_swap);

        let pos_scale = xs.norm_squared() * modulus.norm();
        if pos_scale > 0.0 {
            let sq = xs.adjoint() * &xs;
            for positive in [true, false] {
                let v = gg.omega_pm(&sq, positive);
                out.positivity = out
                    .positivity
                    .max((-v.re).max(0.0) / pos_scale)
                    .max(v.im.abs() / pos_scale);
            }
        }

        let bs = flow.smooth(&y, SUITE_SIGMA, z)?;
        let f = StripFunction::new(omega, &flow, &x, &bs)?;
        let sc = kms_scale(omega, &flow, &x, &bs);
        if sc > 0.0 {
            let edge = graded_upper_boundary(omega, &flow, alg, &x, &bs, t)?;
            out.shifted_boundary = out
                .shifted_boundary
                .max((f.eval(c(t, 1.0)) - edge).norm() / sc);
            out.global_graded_kms = out
                .global_graded_kms
                .max(graded_kms_residual(omega, &flow, alg, &x, &y)?);
        }
        if s < 4 {
            let est = growth_probe(|z| f.eval(z), 20.0, 41, 5);
            out.growth_exponent = out.growth_exponent.max(est.n);
        }
    }
    for k in 1..=m {
        out.region_graded_kms.push(region_graded_kms(net, k, &mut rng)?);
    }
    Ok(out)
}

/// Graded-KMS residual of `ω|_{O_k}` under the flow of its own modulus.
fn region_graded_kms(net: &LocalNet, k: usize, rng: &mut SampleRng) -> Result<Option<f64>> {
    let local = net.restrict(k)?;
    let region = net.region_algebra(k)?;
    let jd = jordan_decompose(&local)?;
    let flow = match ModularFlow::graded(&region, &jd.rho) {
        Ok(f) => f,
        Err(Error::SingularDensity { .. }) | Err(Error::IllConditioned(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let dk = region.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let (a, b) = (rng.gaussian_matrix(dk, dk), rng.gaussian_matrix(dk, dk));
        worst = worst.max(graded_kms_residual(&local, &flow, &region, &a, &b)?);
    }
    Ok(Some(worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag_real;

    fn qubit() -> GradedAlgebra {
        GradedAlgebra::new(1, 1).unwrap()
    }

    fn ungraded_qubit() -> GradedAlgebra {
        GradedAlgebra::new(2, 0).unwrap()
    }

    #[test]
    fn construction_cases() {
        let rho = kron(&diag_real(&[0.75, 0.25]), &diag_real(&[0.6, 0.4]));
        let net = build_chain(&[qubit(), qubit()], &rho).unwrap();
        assert_eq!(net.dim(), 4);
        assert!(net.is_product());
        assert!(build_chain(&[qubit()], &diag_real(&[0.5, 0.5])).is_err());

        let sites = [qubit(), qubit()];
        let entangled = LocalNet::random(&sites, true, 3).unwrap();
        assert!(!entangled.is_product());

        let odd = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                re(0.25)
            } else if i + j == 1 {
                re(0.1)
            } else {
                re(0.0)
            }
        });
        assert!(matches!(
            build_chain(&sites, &odd),
            Err(Error::OddDensity(_))
        ));
    }

    #[test]
    fn restriction_cases() {
        let (r1, r2) = (diag_real(&[0.75, 0.25]), diag_real(&[0.6, 0.4]));
        let net = build_chain(&[qubit(), qubit()], &kron(&r1, &r2)).unwrap();
        assert!(rel_diff(net.restrict(2).unwrap().kernel(), net.omega().kernel()) == 0.0);
        let c = 0.6 - 0.4;
        let want = qubit().g() * &r1 * re(c);
        assert!((net.restrict(1).unwrap().kernel() - want).norm() < 1e-15);
        assert!(net.restriction_residual(1).unwrap() < 1e-12);
        assert!(matches!(
            net.restrict(3),
            Err(Error::RegionOutOfRange { k: 3, m: 2 })
        ));
        assert!(matches!(
            net.restrict(0),
            Err(Error::RegionOutOfRange { .. })
        ));
    }

    #[test]
    fn restriction_of_positive_kernel_is_positive() {
        let sites = [qubit(), qubit(), qubit()];
        let net = LocalNet::random(&sites, true, 5).unwrap();
        for k in 1..=3 {
            let r = partial_trace(net.rho(), net.site_dims(), k).unwrap();
            let e = hermitian_eigendecompose(&r).unwrap();
            assert!(e.eigenvalues[0] > -1e-12);
        }
    }

    #[test]
    fn discrepancy_closed_form() {
        let r1 = diag_real(&[0.75, 0.25]);
        for (site2, r2, c) in [
            (ungraded_qubit(), diag_real(&[0.6, 0.4]), 1.0),
            (qubit(), diag_real(&[0.6, 0.4]), 0.2),
            (qubit(), diag_real(&[0.3, 0.7]), 0.4),
        ] {
            let net = build_chain(&[qubit(), site2], &kron(&r1, &r2)).unwrap();
            let table = local_modulus_probe(&net).unwrap();
            assert_eq!(table.len(), 1);
            assert!((table[0].d - (1.0 - c)).abs() < 1e-12, "{table:?}");
        }
    }

    #[test]
    fn region_structure_product() {
        let sites = [qubit(), qubit()];
        let net = LocalNet::random(&sites, false, 2).unwrap();
        let gg = GradedGns::build(net.algebra(), net.omega()).unwrap();
        let regions = local_gns_structure(&net, &gg).unwrap();
        assert_eq!(regions[0].dim, 4);
        assert_eq!(regions[1].dim, 16);
        for r in &regions {
            assert!(r.vacuum < 1e-12);
            assert!(r.containment < 1e-10);
            assert!(r.agreement < 1e-10, "{r:?}");
            assert!(r.restriction < 1e-10);
        }
    }

    #[test]
    fn proposition4_product_chain() {
        let sites = [qubit(), qubit()];
        let net = LocalNet::random(&sites, false, 7).unwrap();
        let gg = GradedGns::build(net.algebra(), net.omega()).unwrap();
        let report = proposition4_suite(&net, &gg, 50, 1).unwrap();
        assert!(report.max() < 1e-9, "{report:?}");
        assert!(report.global_graded_kms < 1e-10);
        for r in report.region_graded_kms.iter().flatten() {
            assert!(*r < 1e-10);
        }
        assert_eq!(report.growth_exponent, 0);
        assert!(report.sigma_drift < 1e-6);
        assert!(matches!(
            proposition4_suite(&net, &gg, 0, 1),
            Err(Error::BudgetZero)
        ));
    }

    #[test]
    fn ungraded_chain_reduces_to_kms() {
        let sites = [ungraded_qubit(), ungraded_qubit()];
        let net = LocalNet::random(&sites, true, 4).unwrap();
        let gg = GradedGns::build(net.algebra(), net.omega()).unwrap();
        assert!(gg.projections.p_minus.norm() == 0.0);
        let report = proposition4_suite(&net, &gg, 10, 2).unwrap();
        assert!(report.max() < 1e-9);
        assert!(report.identities < 1e-15);
    }
}
