//! Seeded scenarios: a grading, an even density `ρ`, and sample elements,
//! with a JSON form in which every matrix is a row-major array of
//! `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graded::GradedAlgebra;
use crate::linalg::{c, diag_real, hermitian_eigendecompose, matrix_units, re, CMatrix};
use crate::sampling::SampleRng;

pub const VERSION: &str = concat!("graded-kms ", env!("CARGO_PKG_VERSION"));

/// Number of seeded Gaussian sample matrices per scenario.
pub const RANDOM_SAMPLES: usize = 200;

/// Largest algebra dimension accepted by the generator.
pub const MAX_DIM: usize = 16;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SPECTRAL_BOUND: f64 = 5.0;

/// Matrix with the `[[ [re, im], … ], …]` JSON layout.
#[derive(Clone, Debug, PartialEq)]
pub struct JsonMatrix(pub CMatrix);

impl Serialize for JsonMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .0
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("matrix rows have different lengths"));
        }
        Ok(JsonMatrix(CMatrix::from_fn(rows.len(), cols, |i, j| {
            c(rows[i][j][0], rows[i][j][1])
        })))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoSpec {
    /// `ρ = exp(−βH)` for a seeded even Hermitian `H`, with the spectrum of
    /// `βH` rescaled into `[−L, L]` when it exceeds the bound.
    Gibbs { beta: f64, spectral_bound: f64 },
    /// Eigenvalues for the `+` sector followed by the `−` sector, optionally
    /// rotated by a seeded even unitary.
    Explicit { eigenvalues: Vec<f64>, rotate: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    /// Per-site grading signs.
    pub sites: Vec<Vec<i8>>,
    pub entangled: bool,
}

impl NetSpec {
    /// Parses `"+-,+-,++"`: one sign string per site.
    pub fn parse(spec: &str, entangled: bool) -> Result<Self> {
        let sites = spec
            .split(',')
            .map(|site| {
                site.trim()
                    .chars()
                    .map(|ch| match ch {
                        '+' => Ok(1),
                        '-' => Ok(-1),
                        other => Err(Error::Config(format!("bad grading sign {other:?}"))),
                    })
                    .collect::<Result<Vec<i8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if sites.len() < 2 {
            return Err(Error::Config("a chain needs at least two sites".into()));
        }
        if sites.iter().any(|s| s.len() < 2) {
            return Err(Error::Config("every site needs dimension at least 2".into()));
        }
        let total: usize = sites.iter().map(Vec::len).product();
        if total > MAX_DIM {
            return Err(Error::Config(format!(
                "chain dimension {total} exceeds {MAX_DIM}"
            )));
        }
        Ok(Self { sites, entangled })
    }

    pub fn algebras(&self) -> Result<Vec<GradedAlgebra>> {
        self.sites.iter().map(|s| GradedAlgebra::from_signs(s)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_plus: usize,
    pub n_minus: usize,
    pub rho: RhoSpec,
    #[serde(default)]
    pub unit_trace: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<NetSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl ScenarioConfig {
    pub fn gibbs(seed: u64, n_plus: usize, n_minus: usize, beta: f64) -> Self {
        Self {
            seed,
            n_plus,
            n_minus,
            rho: RhoSpec::Gibbs {
                beta,
                spectral_bound: DEFAULT_SPECTRAL_BOUND,
            },
            unit_trace: false,
            net: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn explicit(seed: u64, n_plus: usize, n_minus: usize, eigenvalues: Vec<f64>) -> Self {
        Self {
            rho: RhoSpec::Explicit {
                eigenvalues,
                rotate: false,
            },
            ..Self::gibbs(seed, n_plus, n_minus, 1.0)
        }
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Config(format!(
                "dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("bad tolerance {}", self.tolerance)));
        }
        match &self.rho {
            RhoSpec::Gibbs {
                beta,
                spectral_bound,
            } => {
                if !beta.is_finite() {
                    return Err(Error::Config(format!("bad beta {beta}")));
                }
                if !(spectral_bound.is_finite() && *spectral_bound >= 0.0) {
                    return Err(Error::Config(format!(
                        "spectral bound must be finite and nonnegative, got {spectral_bound}"
                    )));
                }
            }
            RhoSpec::Explicit { eigenvalues, .. } => {
                if eigenvalues.len() != n {
                    return Err(Error::Config(format!(
                        "{} eigenvalues given for dimension {n}",
                        eigenvalues.len()
                    )));
                }
                if eigenvalues.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    return Err(Error::Config("eigenvalues must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: String,
    pub config: ScenarioConfig,
    pub grading: Vec<i8>,
    pub rho: JsonMatrix,
    /// Density driving the flow when it differs from `rho`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_rho: Option<JsonMatrix>,
    /// Even and odd parts of the seeded Gaussian samples; matrix units are
    /// implied.
    pub samples_even: Vec<JsonMatrix>,
    pub samples_odd: Vec<JsonMatrix>,
}

pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let algebra = GradedAlgebra::new(config.n_plus, config.n_minus)?;
    let n = algebra.dim();
    let mut rng = SampleRng::new(config.seed);
    let mut rho = match &config.rho {
        RhoSpec::Gibbs {
            beta,
            spectral_bound,
        } => {
            let h = rng.even_hermitian(&algebra) * re(*beta);
            let eig = hermitian_eigendecompose(&h)?;
            let top = eig.max_abs();
            let shrink = if top > *spectral_bound {
                spectral_bound / top
            } else {
                1.0
            };
            eig.apply_fn(|l| re((-l * shrink).exp()))
        }
        RhoSpec::Explicit {
            eigenvalues,
            rotate,
        } => {
            let d = diag_real(eigenvalues);
            if *rotate {
                let u = rng.even_unitary(&algebra);
                &u * d * u.adjoint()
            } else {
                d
            }
        }
    };
    rho = (&rho + rho.adjoint()) * re(0.5);
    if config.unit_trace {
        let t = crate::linalg::trace(&rho).re;
        rho /= re(t);
    }
    let mut samples_even = Vec::with_capacity(RANDOM_SAMPLES);
    let mut samples_odd = Vec::with_capacity(RANDOM_SAMPLES);
    for _ in 0..RANDOM_SAMPLES {
        let x = rng.gaussian_matrix(n, n);
        let (e, o) = algebra.parity_split(&x)?;
        samples_even.push(JsonMatrix(e));
        samples_odd.push(JsonMatrix(o));
    }
    Ok(Scenario {
        version: VERSION.to_string(),
        config: config.clone(),
        grading: algebra.signs().iter().map(|&s| s as i8).collect(),
        rho: JsonMatrix(rho),
        flow_rho: None,
        samples_even,
        samples_odd,
    })
}

impl Scenario {
    pub fn algebra(&self) -> Result<GradedAlgebra> {
        GradedAlgebra::from_signs(&self.grading)
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    /// Checks shapes after loading from disk.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::Config("empty grading".into()));
        }
        let square = |m: &JsonMatrix, what: &str| {
            if m.0.shape() != (n, n) {
                Err(Error::Config(format!(
                    "{what} is {}x{}, expected {n}x{n}",
                    m.0.nrows(),
                    m.0.ncols()
                )))
            } else {
                Ok(())
            }
        };
        square(&self.rho, "rho")?;
        if let Some(f) = &self.flow_rho {
            square(f, "flow_rho")?;
        }
        for m in self.samples_even.iter().chain(&self.samples_odd) {
            square(m, "sample")?;
        }
        self.algebra()?;
        Ok(())
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho.0
    }

    pub fn flow_rho(&self) -> &CMatrix {
        self.flow_rho.as_ref().map_or(&self.rho.0, |m| &m.0)
    }

    /// Matrix units followed by the even and odd random parts.
    pub fn samples(&self) -> Vec<CMatrix> {
        let mut out = matrix_units(self.dim());
        out.extend(self.samples_even.iter().map(|m| m.0.clone()));
        out.extend(self.samples_odd.iter().map(|m| m.0.clone()));
        out
    }

    /// Full random samples (even + odd parts recombined).
    pub fn random_samples(&self) -> Vec<CMatrix> {
        self.samples_even
            .iter()
            .zip(&self.samples_odd)
            .map(|(e, o)| &e.0 + &o.0)
            .collect()
    }

    /// A deterministic mix of matrix units and random samples of size at most
    /// `budget`, for the checks whose cost grows with the GNS dimension.
    pub fn sample_subset(&self, budget: usize) -> Vec<CMatrix> {
        let units = matrix_units(self.dim());
        let random = self.random_samples();
        let half = budget / 2;
        let stride = (units.len() / half.max(1)).max(1);
        let mut out: Vec<CMatrix> = units.into_iter().step_by(stride).take(half).collect();
        out.extend(random.into_iter().take(budget - out.len()));
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
