//! Laplace release of count queries.
//!
//! Noise is drawn by inverse-CDF from a ChaCha20 stream. A release is fully
//! determined by `(seed, call index)`: the seed picks the key and the call
//! index picks the ChaCha stream, so concurrent releases never share state.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kg::Graph;
use crate::sensitivity::{evaluate, CountQuery};

/// Identifies the sampler in release metadata. Bump on any change that
/// alters the output for a given seed.
pub const ALGORITHM_ID: &str = "laplace-inverse-cdf/chacha20-stream/v1";

/// The PRNG for call `call_index` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, call_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(call_index);
    rng
}

/// Inverse CDF of the centred Laplace distribution at `u ∈ (-1/2, 1/2)`.
pub fn laplace_from_uniform(scale: f64, u: f64) -> f64 {
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// One draw from Laplace(0, `scale`).
pub fn sample_laplace<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    debug_assert!(scale > 0.0);
    loop {
        let u: f64 = rng.gen::<f64>() - 0.5;
        // u = -1/2 would give an infinite draw.
        if u > -0.5 {
            return laplace_from_uniform(scale, u);
        }
    }
}

/// Privacy budget, sensitivity and seed for a release.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseSpec {
    pub epsilon: f64,
    pub sensitivity: u64,
    pub seed: u64,
}

impl ReleaseSpec {
    pub fn new(epsilon: f64, sensitivity: u64, seed: u64) -> Result<Self> {
        let spec = ReleaseSpec {
            epsilon,
            sensitivity,
            seed,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.epsilon.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidEpsilon(self.epsilon))
        }
    }

    /// `Δ / ε`.
    pub fn scale(&self) -> f64 {
        self.sensitivity as f64 / self.epsilon
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Warning {
    /// Zero sensitivity: the exact answer was released without noise.
    #[serde(rename = "SENSITIVITY_ZERO_RAW_RELEASE")]
    SensitivityZeroRawRelease,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Warning::SensitivityZeroRawRelease => "SENSITIVITY_ZERO_RAW_RELEASE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Release {
    pub noisy_value: f64,
    pub true_answer: u64,
    pub scale: f64,
    pub warnings: Vec<Warning>,
}

/// Adds Laplace noise of scale `Δ/ε` drawn from `rng` to `answer`. With
/// `Δ = 0` the answer is passed through unchanged and flagged.
pub fn release_answer<R: Rng + ?Sized>(answer: u64, spec: &ReleaseSpec, rng: &mut R) -> Result<Release> {
    spec.check()?;
    let scale = spec.scale();
    if spec.sensitivity == 0 {
        return Ok(Release {
            noisy_value: answer as f64,
            true_answer: answer,
            scale,
            warnings: vec![Warning::SensitivityZeroRawRelease],
        });
    }
    Ok(Release {
        noisy_value: answer as f64 + sample_laplace(scale, rng),
        true_answer: answer,
        scale,
        warnings: Vec::new(),
    })
}

/// Releases `q(d)` using the stream for `call_index`.
pub fn release_indexed(q: &CountQuery, d: &Graph, spec: &ReleaseSpec, call_index: u64) -> Result<Release> {
    release_answer(evaluate(q, d), spec, &mut stream_rng(spec.seed, call_index))
}

/// Releases `q(d)` as call 0 of the run seeded by `spec.seed`.
pub fn release(q: &CountQuery, d: &Graph, spec: &ReleaseSpec) -> Result<Release> {
    release_indexed(q, d, spec, 0)
}
