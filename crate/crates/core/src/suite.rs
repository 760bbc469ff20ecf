//! Certification suites run against a scenario, in dependency order.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::flow::{graded_kms_residual, graded_kms_sweep, kms_residual, kms_sweep, ModularFlow};
use crate::gns::{
    commutant_check, compatibility_probe, conjugate_representation, conjugate_representation_with,
    conjugate_residuals, conjugation_residuals, double_commutant, intertwiner, modular_conjugation,
    modular_operator, phase_rebased_conjugation, AntilinearMap, GradedGns,
};
use crate::graded::{Functional, GradedAlgebra};
use crate::jordan::{cauchy_schwarz, grading_from_functional, jordan_decompose, sakai_links, JordanData};
use crate::linalg::{c, hermitian_defect, matrix_units, rel_diff, trace, trace_norm, CMatrix};
use crate::net::{local_gns_structure, local_modulus_probe, proposition4_suite, site_marginal, LocalNet};
use crate::report::{DiscrepancyRow, NetSection, Record, RegionRow, Report, SciF64, ScenarioEcho};
use crate::sampling::SampleRng;
use crate::scenario::{NetSpec, Scenario, VERSION};

/// Chain used by the net checks when the scenario carries none.
pub const DEFAULT_CHAIN: &str = "+-,+-";

/// Sample budget for the Proposition 4 suite.
pub const DEFAULT_NET_BUDGET: usize = 50;

/// Algebra dimension above which GNS-level checks use a subsample.
pub const FULL_SAMPLE_MAX_DIM: usize = 4;
pub const GNS_SAMPLE_BUDGET: usize = 40;

const SMOOTHING_SIGMA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Algebra,
    Jordan,
    Flow,
    Gns,
    Prop1,
    Prop2,
    Prop3,
    Net,
    Prop4,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Algebra,
        Check::Jordan,
        Check::Flow,
        Check::Gns,
        Check::Prop1,
        Check::Prop2,
        Check::Prop3,
        Check::Net,
        Check::Prop4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Algebra => "algebra",
            Check::Jordan => "jordan",
            Check::Flow => "flow",
            Check::Gns => "gns",
            Check::Prop1 => "prop1",
            Check::Prop2 => "prop2",
            Check::Prop3 => "prop3",
            Check::Net => "net",
            Check::Prop4 => "prop4",
        }
    }

    pub fn prerequisites(self) -> &'static [Check] {
        match self {
            Check::Algebra | Check::Net => &[],
            Check::Jordan | Check::Flow => &[Check::Algebra],
            Check::Gns => &[Check::Jordan, Check::Flow],
            Check::Prop1 | Check::Prop2 | Check::Prop3 => &[Check::Gns],
            Check::Prop4 => &[Check::Net],
        }
    }

    /// Parses a comma-separated list; `all` selects everything and an empty
    /// string selects nothing.
    pub fn parse_list(list: &str) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                out.extend(Check::ALL);
            } else {
                out.push(item.parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown check {s:?}")))
    }
}

/// Requested checks plus everything they depend on, in run order.
fn closure(checks: &[Check]) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    fn visit(c: Check, out: &mut Vec<Check>) {
        for &p in c.prerequisites() {
            visit(p, out);
        }
        if !out.contains(&c) {
            out.push(c);
        }
    }
    for &c in checks {
        visit(c, &mut out);
    }
    out.sort();
    out
}

struct Context<'a> {
    scenario: &'a Scenario,
    tolerance: f64,
    net_spec: NetSpec,
    net_budget: usize,
    algebra: Option<GradedAlgebra>,
    omega: Option<Functional>,
    jordan: Option<JordanData>,
    flow: Option<ModularFlow>,
    gg: Option<GradedGns>,
    j: Option<AntilinearMap>,
    net: Option<LocalNet>,
    net_gg: Option<GradedGns>,
    net_section: Option<NetSection>,
}

/// Collects named residuals for one check.
struct Recorder<'r> {
    prefix: &'static str,
    tolerance: f64,
    records: &'r mut Vec<Record>,
    clock: Instant,
}

impl Recorder<'_> {
    fn push(&mut self, item: &str, samples: usize, residual: f64, scale: f64) {
        let seconds = self.clock.elapsed().as_secs_f64();
        self.clock = Instant::now();
        self.records.push(Record::new(
            &format!("{}.{item}", self.prefix),
            samples,
            residual,
            scale,
            self.tolerance,
            seconds,
        ));
    }
}

fn indicator(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        f64::INFINITY
    }
}

impl<'a> Context<'a> {
    fn algebra(&self) -> &GradedAlgebra {
        self.algebra.as_ref().expect("algebra check ran")
    }

    fn gns_samples(&self) -> Vec<CMatrix> {
        if self.scenario.dim() <= FULL_SAMPLE_MAX_DIM {
            self.scenario.samples()
        } else {
            self.scenario.sample_subset(GNS_SAMPLE_BUDGET)
        }
    }

    fn run(&mut self, check: Check, rec: &mut Recorder) -> Result<()> {
        match check {
            Check::Algebra => self.check_algebra(rec),
            Check::Jordan => self.check_jordan(rec),
            Check::Flow => self.check_flow(rec),
            Check::Gns => self.check_gns(rec),
            Check::Prop1 => self.check_prop1(rec),
            Check::Prop2 => self.check_prop2(rec),
            Check::Prop3 => self.check_prop3(rec),
            Check::Net => self.check_net(rec),
            Check::Prop4 => self.check_prop4(rec),
        }
    }

    fn check_algebra(&mut self, rec: &mut Recorder) -> Result<()> {
        let alg = self.scenario.algebra()?;
        let samples = self.scenario.samples();
        let mut involution: f64 = 0.0;
        let mut multiplicative: f64 = 0.0;
        let mut star: f64 = 0.0;
        let mut split: f64 = 0.0;
        for (k, a) in samples.iter().enumerate() {
            let b = &samples[(k + 1) % samples.len()];
            let na = a.norm();
            if na == 0.0 {
                continue;
            }
            let ga = alg.gamma(a)?;
            involution = involution.max((alg.gamma(&ga)? - a).norm() / na);
            let prod = alg.gamma(&(a * b))? - &ga * alg.gamma(b)?;
            multiplicative = multiplicative.max(prod.norm() / (na * b.norm()));
            star = star.max((alg.gamma(&a.adjoint())? - ga.adjoint()).norm() / na);
            let (e, o) = alg.parity_split(a)?;
            split = split
                .max((&e + &o - a).norm() / na)
                .max(alg.parity_defect(&e))
                .max((alg.gamma(&o)? + &o).norm() / na);
        }
        rec.push(
            "automorphism",
            samples.len(),
            involution.max(multiplicative).max(star).max(split),
            1.0,
        );
        let g = alg.g();
        let n = alg.dim();
        let unitary = (&g * &g - crate::linalg::identity(n)).norm() + hermitian_defect(&g);
        rec.push("grading_operator", 1, unitary, 1.0);

        let rho = self.scenario.rho();
        let flow_rho = self.scenario.flow_rho();
        let even = alg.parity_defect(rho).max(alg.parity_defect(flow_rho));
        let herm = hermitian_defect(rho).max(hermitian_defect(flow_rho));
        rec.push("density_even", 2, even.max(herm), rho.norm());
        self.algebra = Some(alg);
        Ok(())
    }

    fn check_jordan(&mut self, rec: &mut Recorder) -> Result<()> {
        let alg = self.algebra().clone();
        let rho = self.scenario.rho();
        let omega = alg.supertrace_functional(rho)?;
        let jd = jordan_decompose(&omega)?;
        let samples = self.scenario.samples();
        let tn = omega.norm();

        let structure = jd.residuals()?.max().max(jd.support_parity_defect(&alg));
        rec.push("structure", 1, structure, tn);
        let (r1, r2) = sakai_links(&omega, &jd, &samples)?;
        rec.push("links", samples.len(), r1.max(r2), tn);
        let modulus = trace_norm(&(&jd.rho - rho))? / trace_norm(rho)?;
        rec.push("modulus_kernel", 1, modulus, tn);
        let norms = (jd.modulus().norm() - tn).abs() / tn;
        rec.push("norm_equality", 1, norms, tn);
        let cs = cauchy_schwarz(&omega, &samples)?;
        rec.push("cauchy_schwarz", cs.samples, (-cs.squared_min_slack).max(0.0), tn);
        let g_prime = grading_from_functional(&jd, &alg, &samples)?.max((&jd.g_prime - alg.g()).norm());
        rec.push("grading_element", samples.len(), g_prime, 1.0);

        self.omega = Some(omega);
        self.jordan = Some(jd);
        Ok(())
    }

    fn check_flow(&mut self, rec: &mut Recorder) -> Result<()> {
        let alg = self.algebra().clone();
        let rho = self.scenario.rho();
        let omega = alg.supertrace_functional(rho)?;
        let modulus = jordan_decompose(&omega)?.modulus();
        let flow = ModularFlow::graded(&alg, self.scenario.flow_rho())?;
        let units = matrix_units(alg.dim());
        let random = self.scenario.random_samples();
        let pairs = random.len();
        let scale = flow.condition_number();

        let mut graded = graded_kms_sweep(&omega, &flow, &alg, &units, &units)?;
        let mut plain = kms_sweep(&modulus, &flow, &units, &units)?;
        for k in 0..pairs {
            let (a, b) = (&random[k], &random[(k + 1) % pairs]);
            graded = graded.max(graded_kms_residual(&omega, &flow, &alg, a, b)?);
            plain = plain.max(kms_residual(&modulus, &flow, a, b)?);
        }
        let count = units.len() * units.len() + pairs;
        rec.push("graded_kms", count, graded, scale);
        rec.push("modulus_kms", count, plain, scale);

        let mut quadrature: f64 = 0.0;
        let mut shift: f64 = 0.0;
        let mut group: f64 = 0.0;
        let z = c(0.3, 0.2);
        let w = c(-0.4, 0.1);
        for a in random.iter().take(8) {
            let closed = flow.smooth(a, SMOOTHING_SIGMA, z)?;
            let quad = flow.smooth_quadrature(a, SMOOTHING_SIGMA, z, crate::flow::QUADRATURE_NODES)?;
            quadrature = quadrature.max(rel_diff(&closed, &quad));
            let moved = flow.evolve(&closed, w)?;
            shift = shift.max(rel_diff(&moved, &flow.smooth(a, SMOOTHING_SIGMA, z + w)?));
            let two = flow.evolve(&flow.evolve(a, re_t(0.7))?, re_t(-1.9))?;
            group = group.max(rel_diff(&two, &flow.evolve(a, re_t(-1.2))?));
        }
        rec.push("smoothing_quadrature", 8, quadrature, 1.0);
        rec.push("smoothing_shift", 8, shift, 1.0);
        rec.push("group_law", 8, group, 1.0);
        self.flow = Some(flow);
        Ok(())
    }

    fn check_gns(&mut self, rec: &mut Recorder) -> Result<()> {
        let alg = self.algebra().clone();
        let omega = self.omega.clone().expect("jordan check ran");
        let gg = GradedGns::build(&alg, &omega)?;
        let samples = self.gns_samples();
        let modulus = gg.jordan.modulus();
        let scale = omega.norm();

        rec.push("representation", samples.len(), gg.space.residuals(&modulus, &samples)?.max(), scale);
        let proj = gg.projections.residuals(&gg.space, &gg.jordan, &samples)?;
        rec.push("projections", samples.len(), proj.max(), scale);

        let mut ident: f64 = 0.0;
        let mut swap: f64 = 0.0;
        for (k, a) in samples.iter().enumerate() {
            let b = &samples[(k + 1) % samples.len()];
            ident = ident.max(gg.identity_residual(a, b));
            let (pre, post) = gg.kernel_swap_residual(a);
            swap = swap.max(pre).max(post);
        }
        rec.push("identities", samples.len(), ident, scale);
        rec.push("kernel_swap", samples.len(), swap, scale);
        let dims: usize = gg.subspaces.dims().iter().sum();
        rec.push("subspace_split", 4, indicator(dims == gg.space.dim()), 1.0);
        self.gg = Some(gg);
        Ok(())
    }

    fn conjugation(&mut self) -> Result<AntilinearMap> {
        if self.j.is_none() {
            let gg = self.gg.as_ref().expect("gns check ran");
            let flow = self.flow.as_ref().expect("flow check ran");
            self.j = Some(modular_conjugation(&gg.space, flow)?);
        }
        Ok(self.j.clone().unwrap())
    }

    fn check_prop1(&mut self, rec: &mut Recorder) -> Result<()> {
        let j = self.conjugation()?;
        let gg = self.gg.as_ref().unwrap();
        let flow = self.flow.as_ref().unwrap();
        let samples = self.gns_samples();
        let res = conjugation_residuals(gg, &j);
        rec.push("conjugation", 1, res.max(), 1.0);
        rec.push(
            "commutant_cyclic",
            1,
            indicator(res.commutant_cyclic_rank == gg.space.dim()),
            1.0,
        );
        let comm = commutant_check(&gg.space, &j, &samples)?;
        rec.push("commutator", samples.len(), comm.commutator, 1.0);
        if let Some(m) = comm.membership {
            rec.push("commutant_membership", gg.space.algebra_dim().pow(2), m, 1.0);
        }
        if let Some((_, dist)) = double_commutant(&gg.space)? {
            rec.push("double_commutant", gg.space.algebra_dim().pow(2), dist, 1.0);
        }
        let op = modular_operator(&gg.space, flow, &j)?;
        let times = [0.3, -1.1];
        let mres = op.residuals(&gg.space, flow, &samples, &times)?;
        rec.push("modular_operator", samples.len() * times.len(), mres.max(), 1.0);
        Ok(())
    }

    fn check_prop2(&mut self, rec: &mut Recorder) -> Result<()> {
        let j = self.conjugation()?;
        let gg = self.gg.as_ref().unwrap();
        let samples = self.gns_samples();
        let rep = conjugate_representation(&gg.space, &gg.jordan, &j)?;
        let res = conjugate_residuals(gg, &rep, &samples)?;
        rec.push("representation", samples.len(), res.max(), 1.0);
        rec.push("cyclic", 1, indicator(res.cyclic()), 1.0);
        let mut rng = SampleRng::new(self.scenario.config.seed);
        let (plus_min, minus_max, leak) = compatibility_probe(gg, &rep, &mut rng, 16);
        let scale = gg.jordan.omega().norm();
        let sign = (-plus_min).max(0.0).max(minus_max.max(0.0)) / scale;
        rec.push("compatibility", 32, sign.max(leak), scale);
        Ok(())
    }

    fn check_prop3(&mut self, rec: &mut Recorder) -> Result<()> {
        let j = self.conjugation()?;
        let gg = self.gg.as_ref().unwrap();
        let dim = gg.space.dim();
        let first = conjugate_representation(&gg.space, &gg.jordan, &j)?.graded_representation(&gg.space);
        let mut rng = SampleRng::new(self.scenario.config.seed ^ 0x5eed);
        let k = phase_rebased_conjugation(dim, &mut rng);
        let second =
            conjugate_representation_with(&gg.space, &gg.jordan, &j, &k)?.graded_representation(&gg.space);
        let v = intertwiner(&first, &second)?;
        rec.push("intertwiner", first.images.len(), v.max(), 1.0);
        let mut flipped = second.clone();
        flipped.gamma = -flipped.gamma;
        let rejected = matches!(intertwiner(&first, &flipped), Err(Error::HypothesisViolation(_)));
        rec.push("negative_control", 1, indicator(rejected), 1.0);
        Ok(())
    }

    fn build_net(&mut self) -> Result<()> {
        if self.net.is_some() {
            return Ok(());
        }
        let sites = self.net_spec.algebras()?;
        let net = LocalNet::random(&sites, self.net_spec.entangled, self.scenario.config.seed)?;
        let gg = GradedGns::build(net.algebra(), net.omega())?;
        self.net = Some(net);
        self.net_gg = Some(gg);
        Ok(())
    }

    fn check_net(&mut self, rec: &mut Recorder) -> Result<()> {
        self.build_net()?;
        let net = self.net.as_ref().unwrap();
        let gg = self.net_gg.as_ref().unwrap();
        let m = net.sites();

        let mut restriction: f64 = 0.0;
        for k in 1..=m {
            restriction = restriction.max(net.restriction_residual(k)?);
        }
        rec.push("restriction", m, restriction, 1.0);

        let regions = local_gns_structure(net, gg)?;
        let structural = regions
            .iter()
            .map(|r| r.vacuum.max(r.containment).max(r.agreement).max(r.restriction))
            .fold(0.0, f64::max);
        rec.push("regions", m, structural, 1.0);

        let table = local_modulus_probe(net)?;
        let mut rows = Vec::with_capacity(table.len());
        let mut closed_gap: f64 = 0.0;
        for d in &table {
            let closed = if net.is_product() {
                let mut prod = 1.0;
                for site in d.k..d.k_outer {
                    let marginal = site_marginal(net.rho(), net.site_dims(), site);
                    let g = net.site_algebra(site).g();
                    prod *= (trace(&(&g * &marginal)) / trace(&marginal)).re;
                }
                let value = 1.0 - prod.abs();
                closed_gap = closed_gap.max((d.d - value).abs());
                Some(SciF64(value))
            } else {
                None
            };
            rows.push(DiscrepancyRow {
                k: d.k,
                k_outer: d.k_outer,
                d: d.d,
                d_kernel_normalized: d.d_kernel_normalized,
                closed_form: closed,
            });
        }
        if net.is_product() {
            rec.push("discrepancy_closed_form", rows.len(), closed_gap, 1.0);
        }
        self.net_section = Some(NetSection {
            product: net.is_product(),
            discrepancy: rows,
            regions: regions
                .iter()
                .map(|r| RegionRow {
                    k: r.k,
                    dim: r.dim,
                    vacuum: r.vacuum,
                    containment: r.containment,
                    agreement: r.agreement,
                    restriction: r.restriction,
                    projection_defect: r.projection_defect,
                    monotonicity_margin: r.monotonicity_margin,
                    graded_kms: None,
                })
                .collect(),
            growth_exponent: None,
            sigma_drift: None,
        });
        Ok(())
    }

    fn check_prop4(&mut self, rec: &mut Recorder) -> Result<()> {
        self.build_net()?;
        let net = self.net.as_ref().unwrap();
        let gg = self.net_gg.as_ref().unwrap();
        let r = proposition4_suite(net, gg, self.net_budget, self.scenario.config.seed)?;
        let n = r.samples;
        rec.push("modulus_kms", n, r.modulus_kms, 1.0);
        rec.push("identities", n, r.identities, 1.0);
        rec.push("kernel_swap", n, r.kernel_swap, 1.0);
        rec.push("positivity", n, r.positivity, 1.0);
        rec.push("shifted_boundary", n, r.shifted_boundary, 1.0);
        rec.push("growth_exponent", 4, r.growth_exponent as f64, 1.0);
        let mut graded = r.global_graded_kms;
        if net.is_product() {
            for v in &r.region_graded_kms {
                graded = graded.max(v.unwrap_or(f64::INFINITY));
            }
        }
        rec.push("graded_kms", n, graded, 1.0);
        if let Some(section) = self.net_section.as_mut() {
            for (row, v) in section.regions.iter_mut().zip(&r.region_graded_kms) {
                row.graded_kms = v.map(SciF64);
            }
            section.growth_exponent = Some(r.growth_exponent);
            section.sigma_drift = Some(SciF64(r.sigma_drift));
        }
        Ok(())
    }
}

fn re_t(t: f64) -> num_complex::Complex64 {
    c(t, 0.0)
}

/// Options beyond the check list.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub net: Option<NetSpec>,
    pub net_budget: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            net: None,
            net_budget: DEFAULT_NET_BUDGET,
        }
    }
}

pub fn run_suite(scenario: &Scenario, checks: &[Check], tolerance: f64) -> Report {
    run_suite_with(scenario, checks, tolerance, &SuiteOptions::default())
}

pub fn run_suite_with(scenario: &Scenario, checks: &[Check], tolerance: f64, options: &SuiteOptions) -> Report {
    let net_spec = options
        .net
        .clone()
        .or_else(|| scenario.config.net.clone())
        .unwrap_or_else(|| NetSpec::parse(DEFAULT_CHAIN, false).expect("default chain parses"));
    let order = closure(checks);
    let uses_net = order.iter().any(|c| matches!(c, Check::Net | Check::Prop4));
    let mut ctx = Context {
        scenario,
        tolerance,
        net_spec: net_spec.clone(),
        net_budget: options.net_budget,
        algebra: None,
        omega: None,
        jordan: None,
        flow: None,
        gg: None,
        j: None,
        net: None,
        net_gg: None,
        net_section: None,
    };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut failed: Vec<Check> = Vec::new();
    for check in order {
        if check.prerequisites().iter().any(|p| failed.contains(p)) {
            skipped.push(check.name().to_string());
            failed.push(check);
            continue;
        }
        let start = records.len();
        let mut rec = Recorder {
            prefix: check.name(),
            tolerance: ctx.tolerance,
            records: &mut records,
            clock: Instant::now(),
        };
        if let Err(e) = ctx.run(check, &mut rec) {
            rec.push(&format!("error: {e}"), 0, f64::INFINITY, 0.0);
        }
        if records[start..].iter().any(|r| !r.pass) {
            failed.push(check);
        }
    }
    let mut report = Report {
        version: VERSION.to_string(),
        scenario: ScenarioEcho {
            seed: scenario.config.seed,
            dim: scenario.dim(),
            grading: scenario.grading.clone(),
            config: Some(scenario.config.clone()),
            net: uses_net.then_some(net_spec),
        },
        tolerance,
        records,
        skipped,
        net: ctx.net_section,
    };
    report.sort();
    report
}

/// Runs the net checks on a seeded chain without a matrix scenario.
pub fn run_net(spec: &NetSpec, seed: u64, budget: usize, tolerance: f64) -> Result<Report> {
    let sites = spec.algebras()?;
    let global = sites[1..].iter().fold(sites[0].clone(), |a, s| a.tensor(s));
    let n_plus = global.n_plus();
    let mut config = crate::scenario::ScenarioConfig::gibbs(seed, n_plus, global.dim() - n_plus, 1.0);
    config.net = Some(spec.clone());
    config.tolerance = tolerance;
    let net = LocalNet::random(&sites, spec.entangled, seed)?;
    let scenario = Scenario {
        version: VERSION.to_string(),
        config,
        grading: global.signs().iter().map(|&s| s as i8).collect(),
        rho: crate::scenario::JsonMatrix(net.rho().clone()),
        flow_rho: None,
        samples_even: Vec::new(),
        samples_odd: Vec::new(),
    };
    let options = SuiteOptions {
        net: Some(spec.clone()),
        net_budget: budget,
    };
    let mut report = run_suite_with(&scenario, &[Check::Net, Check::Prop4], tolerance, &options);
    report.scenario.config = None;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag_real;
    use crate::scenario::{generate_scenario, ScenarioConfig};

    fn fixture() -> Scenario {
        generate_scenario(&ScenarioConfig::explicit(1, 1, 1, vec![0.75, 0.25])).unwrap()
    }

    #[test]
    fn parse_lists() {
        assert_eq!(Check::parse_list("").unwrap(), vec![]);
        assert_eq!(Check::parse_list("all").unwrap().len(), 9);
        assert_eq!(
            Check::parse_list("gns, algebra,gns").unwrap(),
            vec![Check::Algebra, Check::Gns]
        );
        assert!(matches!(Check::parse_list("nope"), Err(Error::Config(_))));
        assert_eq!(
            closure(&[Check::Prop2]),
            vec![Check::Algebra, Check::Jordan, Check::Flow, Check::Gns, Check::Prop2]
        );
    }

    #[test]
    fn fixture_passes_everything() {
        let report = run_suite(&fixture(), &Check::ALL, 1e-9);
        assert!(report.all_pass(), "{}", report.summary());
        assert!(report.skipped.is_empty());
        let names: Vec<&str> = report.records.iter().map(|r| r.name.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(report.net.is_some());
    }

    #[test]
    fn empty_checks() {
        let report = run_suite(&fixture(), &[], 1e-9);
        assert!(report.records.is_empty() && report.skipped.is_empty());
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn mismatched_flow_skips_gns() {
        let mut s = fixture();
        s.flow_rho = Some(crate::scenario::JsonMatrix(diag_real(&[0.6, 0.4])));
        let report = run_suite(&s, &[Check::Gns], 1e-9);
        assert!(!report.record("flow.graded_kms").unwrap().pass);
        assert!(report.record("flow.graded_kms").unwrap().max_residual > 1e-2);
        assert_eq!(report.skipped, vec!["gns".to_string()]);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn odd_density_fails_precondition() {
        let mut s = fixture();
        s.rho.0[(0, 1)] = c(0.1, 0.0);
        s.rho.0[(1, 0)] = c(0.1, 0.0);
        let report = run_suite(&s, &[Check::Flow], 1e-9);
        assert!(!report.record("algebra.density_even").unwrap().pass);
        assert_eq!(report.skipped, vec!["flow".to_string()]);
    }
}
