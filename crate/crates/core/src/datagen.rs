//! Seeded generators for the four synthetic covariance regimes and for the
//! elliptical design family `x = √p · L · z Σ^{1/2} / ‖z‖₂`.
//!
//! Every draw comes from ChaCha8 (`rand_chacha` 0.9) seeded with the 64-bit
//! instance seed. Separate ChaCha streams are used for the coefficients, the
//! noise, factor loadings and each design row, so rows can be generated in
//! parallel without changing the output.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayViewMut1, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal, StudentT, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Coefficients, DesignMatrix, ResponseVector};

/// Signal-to-noise ratio `‖β‖₂ / σ` used throughout the simulations.
pub const DEFAULT_SNR: f64 = 2.3;

/// Identifies the RNG scheme in reports; bump when any stream layout changes.
pub const GENERATOR_FINGERPRINT: &str = "hdls-datagen/1 chacha8 (rand_chacha 0.9, rand_distr 0.5)";

const STREAM_COEF: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_LOADINGS: u64 = 3;
const STREAM_ROW_BASE: u64 = 1 << 32;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    /// Independent standard normal predictors.
    I,
    /// Compound symmetry with ρ = 0.6.
    Ii,
    /// Three groups of five near-duplicate predictors.
    Iii,
    /// Five-factor model.
    Iv,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::I, Example::Ii, Example::Iii, Example::Iv];

    pub fn true_support_size(self) -> usize {
        match self {
            Example::Iii => 15,
            _ => 5,
        }
    }

    pub fn covariance(self) -> CovarianceSpec {
        match self {
            Example::I => CovarianceSpec::Identity,
            Example::Ii => CovarianceSpec::CompoundSymmetry { rho: 0.6 },
            Example::Iii => CovarianceSpec::GroupStructure {
                groups: 3,
                per_group: 5,
                jitter_sd: 0.1,
            },
            Example::Iv => CovarianceSpec::FactorModel { k: 5 },
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::I => "i",
            Example::Ii => "ii",
            Example::Iii => "iii",
            Example::Iv => "iv",
        })
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Example::I),
            "ii" | "2" => Ok(Example::Ii),
            "iii" | "3" => Ok(Example::Iii),
            "iv" | "4" => Ok(Example::Iv),
            other => Err(Error::InvalidConfig(format!("unknown example `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceSpec {
    Identity,
    CompoundSymmetry { rho: f64 },
    Ar1 { rho: f64 },
    /// `groups` latent variables, each copied into `per_group` columns with
    /// independent jitter; remaining columns are independent.
    GroupStructure {
        groups: usize,
        per_group: usize,
        jitter_sd: f64,
    },
    /// `x_j = Σ_l φ_l F_jl + η_j` with standard normal loadings `F`.
    FactorModel { k: usize },
}

impl CovarianceSpec {
    pub fn validate(&self, p: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        match *self {
            CovarianceSpec::Identity => Ok(()),
            CovarianceSpec::CompoundSymmetry { rho } if !(0.0..1.0).contains(&rho) => {
                bad(format!("compound symmetry needs rho in [0, 1), got {rho}"))
            }
            CovarianceSpec::Ar1 { rho } if !(rho > -1.0 && rho < 1.0) => {
                bad(format!("AR(1) needs rho in (-1, 1), got {rho}"))
            }
            CovarianceSpec::GroupStructure {
                groups,
                per_group,
                jitter_sd,
            } => {
                if groups * per_group > p {
                    return Err(Error::InvalidDimensions(format!(
                        "group structure needs p >= {}",
                        groups * per_group
                    )));
                }
                if !(jitter_sd > 0.0) {
                    return bad(format!("jitter sd must be positive, got {jitter_sd}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The implied `p × p` covariance. Factor loadings are drawn from `seed`.
    pub fn matrix(&self, p: usize, seed: u64) -> Result<Array2<f64>> {
        self.validate(p)?;
        let m = match *self {
            CovarianceSpec::Identity => Array2::eye(p),
            CovarianceSpec::CompoundSymmetry { rho } => {
                Array2::from_shape_fn((p, p), |(i, j)| if i == j { 1.0 } else { rho })
            }
            CovarianceSpec::Ar1 { rho } => {
                Array2::from_shape_fn((p, p), |(i, j)| rho.powi(i.abs_diff(j) as i32))
            }
            CovarianceSpec::GroupStructure {
                groups,
                per_group,
                jitter_sd,
            } => {
                let grouped = groups * per_group;
                Array2::from_shape_fn((p, p), |(i, j)| {
                    let jitter = if i == j { jitter_sd * jitter_sd } else { 0.0 };
                    if i < grouped && j < grouped {
                        if i % groups == j % groups {
                            1.0 + jitter
                        } else {
                            0.0
                        }
                    } else if i == j {
                        1.0
                    } else {
                        0.0
                    }
                })
            }
            CovarianceSpec::FactorModel { k } => {
                let f = factor_loadings(p, k, seed);
                let mut m = f.dot(&f.t());
                m.diag_mut().iter_mut().for_each(|d| *d += 1.0);
                m
            }
        };
        Ok(m)
    }
}

fn factor_loadings(p: usize, k: usize, seed: u64) -> Array2<f64> {
    let mut rng = stream(seed, STREAM_LOADINGS);
    Array2::from_shape_simple_fn((p, k), || normal(&mut rng))
}

/// Fill each row from its own stream; output does not depend on scheduling.
fn fill_rows<F>(n: usize, p: usize, seed: u64, f: F) -> Array2<f64>
where
    F: Fn(&mut ChaCha8Rng, ArrayViewMut1<'_, f64>) + Sync,
{
    let mut x = Array2::<f64>::zeros((n, p));
    x.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, row)| {
            let mut rng = stream(seed, STREAM_ROW_BASE + i as u64);
            f(&mut rng, row);
        });
    x
}

/// Draw a design with rows distributed as `N(0, Σ)` for the given spec,
/// without ever forming `Σ`.
pub fn gaussian_design(n: usize, p: usize, spec: &CovarianceSpec, seed: u64) -> Result<Array2<f64>> {
    spec.validate(p)?;
    let x = match *spec {
        CovarianceSpec::Identity => fill_rows(n, p, seed, |rng, mut row| {
            row.iter_mut().for_each(|v| *v = normal(rng));
        }),
        CovarianceSpec::CompoundSymmetry { rho } => {
            let (a, b) = ((1.0 - rho).sqrt(), rho.sqrt());
            fill_rows(n, p, seed, move |rng, mut row| {
                let shared = b * normal(rng);
                row.iter_mut().for_each(|v| *v = a * normal(rng) + shared);
            })
        }
        CovarianceSpec::Ar1 { rho } => {
            let innov = (1.0 - rho * rho).sqrt();
            fill_rows(n, p, seed, move |rng, mut row| {
                let mut prev = normal(rng);
                row[0] = prev;
                for v in row.iter_mut().skip(1) {
                    prev = rho * prev + innov * normal(rng);
                    *v = prev;
                }
            })
        }
        CovarianceSpec::GroupStructure {
            groups,
            per_group,
            jitter_sd,
        } => fill_rows(n, p, seed, move |rng, mut row| {
            let latent: Vec<f64> = (0..groups).map(|_| normal(rng)).collect();
            for (j, v) in row.iter_mut().enumerate() {
                *v = if j < groups * per_group {
                    latent[j % groups] + jitter_sd * normal(rng)
                } else {
                    normal(rng)
                };
            }
        }),
        CovarianceSpec::FactorModel { k } => {
            let f = factor_loadings(p, k, seed);
            let f = &f;
            fill_rows(n, p, seed, move |rng, mut row| {
                let phi: Array1<f64> = (0..k).map(|_| normal(rng)).collect();
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f.row(j).dot(&phi) + normal(rng);
                }
            })
        }
    };
    Ok(x)
}

/// `σ = ‖β‖₂ / snr`.
pub fn snr_calibrate(beta: &Coefficients, snr: f64) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::InvalidConfig(format!("snr must be positive, got {snr}")));
    }
    let norm = beta.beta.dot(&beta.beta).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(norm / snr)
}

/// Noise scale of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseLevel {
    Snr { snr: f64 },
    /// Fixed σ; zero gives a noiseless response.
    Sigma { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenOptions {
    pub noise: NoiseLevel,
    /// Student-t noise with this many degrees of freedom (> 2), rescaled to
    /// variance σ². `None` means Gaussian.
    pub student_t_df: Option<f64>,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            noise: NoiseLevel::Snr { snr: DEFAULT_SNR },
            student_t_df: None,
        }
    }
}

/// A generated data set together with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub x: DesignMatrix,
    pub y: ResponseVector,
    pub beta_true: Coefficients,
    pub sigma: f64,
    pub spec: CovarianceSpec,
    pub example: Example,
    pub seed: u64,
}

impl SyntheticInstance {
    pub fn true_support(&self) -> Vec<usize> {
        self.beta_true.support()
    }

    pub fn checksum(&self) -> String {
        data_checksum(&self.x, &self.y)
    }
}

/// Short SHA-256 digest of the little-endian bytes of `x` (row-major) and `y`.
pub fn data_checksum(x: &DesignMatrix, y: &ResponseVector) -> String {
    let mut h = Sha256::new();
    h.update((x.n() as u64).to_le_bytes());
    h.update((x.p() as u64).to_le_bytes());
    for v in x.view().iter() {
        h.update(v.to_le_bytes());
    }
    for v in y.view().iter() {
        h.update(v.to_le_bytes());
    }
    hex::encode(&h.finalize()[..12])
}

fn true_coefficients(which: Example, p: usize, seed: u64) -> Coefficients {
    let mut beta = Array1::<f64>::zeros(p);
    match which {
        Example::I => {
            let mut rng = stream(seed, STREAM_COEF);
            for b in beta.iter_mut().take(5) {
                let magnitude = normal(&mut rng).abs() + 1.0;
                *b = if rng.random_bool(0.5) { -magnitude } else { magnitude };
            }
        }
        Example::Ii | Example::Iv => beta.iter_mut().take(5).for_each(|b| *b = 3.0),
        Example::Iii => beta.iter_mut().take(15).for_each(|b| *b = 3.0),
    }
    Coefficients {
        beta,
        intercept: 0.0,
    }
}

/// One of the four simulation designs with `σ = ‖β‖₂ / snr`.
pub fn gen_example(which: Example, n: usize, p: usize, snr: f64, seed: u64) -> Result<SyntheticInstance> {
    let opts = GenOptions {
        noise: NoiseLevel::Snr { snr },
        ..GenOptions::default()
    };
    gen_example_with(which, n, p, &opts, seed)
}

pub fn gen_example_with(
    which: Example,
    n: usize,
    p: usize,
    opts: &GenOptions,
    seed: u64,
) -> Result<SyntheticInstance> {
    if n < 2 || p < which.true_support_size() {
        return Err(Error::InvalidDimensions(format!(
            "example {which} needs n >= 2 and p >= {}, got n = {n}, p = {p}",
            which.true_support_size()
        )));
    }
    let spec = which.covariance();
    let x = gaussian_design(n, p, &spec, seed)?;
    let beta_true = true_coefficients(which, p, seed);
    let sigma = match opts.noise {
        NoiseLevel::Snr { snr } => snr_calibrate(&beta_true, snr)?,
        NoiseLevel::Sigma { sigma } if sigma >= 0.0 && sigma.is_finite() => sigma,
        NoiseLevel::Sigma { sigma } => {
            return Err(Error::InvalidConfig(format!("sigma must be >= 0, got {sigma}")))
        }
    };

    let mut rng = stream(seed, STREAM_NOISE);
    let eps: Array1<f64> = match opts.student_t_df {
        None => (0..n).map(|_| sigma * normal(&mut rng)).collect(),
        Some(df) if df > 2.0 => {
            let t = StudentT::new(df).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            let unit = ((df - 2.0) / df).sqrt();
            (0..n).map(|_| sigma * unit * t.sample(&mut rng)).collect()
        }
        Some(df) => {
            return Err(Error::InvalidConfig(format!(
                "student-t noise needs df > 2, got {df}"
            )))
        }
    };
    let y = x.dot(&beta_true.beta) + eps;

    Ok(SyntheticInstance {
        x: DesignMatrix::new(x)?,
        y: ResponseVector::new(y)?,
        beta_true,
        sigma,
        spec,
        example: which,
        seed,
    })
}

/// Distribution of the radial multiplier `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialLaw {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `L² ~ χ²(p) / p`, which makes the rows exactly `N(0, Σ)`.
    ChiSquaredOverP,
    /// `L² ~ InverseGamma(shape, scale)`.
    InverseGamma { shape: f64, scale: f64 },
}

impl RadialLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialLaw::Constant { value } => value > 0.0 && value.is_finite(),
            RadialLaw::Uniform { lo, hi } => lo > 0.0 && hi > lo && hi.is_finite(),
            RadialLaw::ChiSquaredOverP => true,
            RadialLaw::InverseGamma { shape, scale } => shape > 0.0 && scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid radial law {self:?}")))
        }
    }

    fn sample(&self, p: usize, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            RadialLaw::Constant { value } => value,
            RadialLaw::Uniform { lo, hi } => Uniform::new(lo, hi).expect("validated").sample(rng),
            RadialLaw::ChiSquaredOverP => {
                let chi = ChiSquared::new(p as f64).expect("p >= 1");
                (chi.sample(rng) / p as f64).sqrt()
            }
            RadialLaw::InverseGamma { shape, scale } => {
                // 1 / Gamma(shape, rate = scale) ~ InverseGamma(shape, scale)
                let g = Gamma::new(shape, 1.0 / scale).expect("validated");
                (1.0 / g.sample(rng)).sqrt()
            }
        }
    }
}

/// Rows `√p · Lᵢ · zᵢ Σ^{1/2} / ‖zᵢ‖₂` with `zᵢ ~ N(0, Iₚ)` and `Lᵢ` drawn
/// independently from `law`. `Σ^{1/2}` is the transposed Cholesky factor.
pub fn sample_elliptical(
    n: usize,
    p: usize,
    spec: &CovarianceSpec,
    law: RadialLaw,
    seed: u64,
) -> Result<DesignMatrix> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidDimensions(format!(
            "elliptical sampler needs n >= 2 and p >= 1, got {n} x {p}"
        )));
    }
    law.validate()?;
    let root = match spec {
        CovarianceSpec::Identity => None,
        other => {
            let sigma = other.matrix(p, seed)?;
            Some(Cholesky::factor(sigma.view())?.lower().to_owned())
        }
    };
    let root = root.as_ref();
    let sqrt_p = (p as f64).sqrt();
    let x = fill_rows(n, p, seed, move |rng, mut row| {
        let z: Array1<f64> = (0..p).map(|_| normal(rng)).collect();
        let radius = law.sample(p, rng);
        let scale = sqrt_p * radius / z.dot(&z).sqrt();
        match root {
            None => row.assign(&(&z * scale)),
            // (z Lᵀ)_j = Σ_k L[j, k] z_k
            Some(l) => row.assign(&(l.dot(&z) * scale)),
        }
    });
    DesignMatrix::new(x)
}
