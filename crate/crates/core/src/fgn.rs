//! Exact simulation of fractional Gaussian noise by circulant embedding.
//!
//! The model is the stationary standardized Gaussian sequence with
//!
//! ```text
//! gamma(n) = (|n+1|^{2H} - 2|n|^{2H} + |n-1|^{2H}) / 2,    gamma(0) = 1,
//! ```
//!
//! whose covariance decays like `H(2H-1) n^{2H-2}`: long memory for
//! `H in (1/2, 1)`. The first `N` covariances embed into a circulant of size
//! `2(N-1)` whose eigenvalues are the FFT of the reflected covariance
//! sequence; synthesizing complex Gaussians in the spectral domain and
//! transforming back gives a draw with exactly the target covariance, no
//! approximation beyond floating point.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::factorial;

/// Relative threshold below which a negative circulant eigenvalue counts as
/// rounding noise and is clamped to zero.
const EIGENVALUE_CLAMP_REL: f64 = 1e-10;

/// Covariance of fractional Gaussian noise at the given lag.
///
/// The Hurst index must lie in `[1/2, 1)`; the closed lower endpoint is kept
/// as the white-noise reference point, where every positive lag vanishes.
pub fn fgn_covariance(hurst: f64, lag: usize) -> Result<f64> {
    if !(0.5..1.0).contains(&hurst) {
        return Err(Error::Domain(format!(
            "Hurst index must lie in [1/2, 1), got {hurst}"
        )));
    }
    if lag == 0 {
        return Ok(1.0);
    }
    let n = lag as f64;
    let h2 = 2.0 * hurst;
    Ok(0.5 * ((n + 1.0).powf(h2) - 2.0 * n.powf(h2) + (n - 1.0).powf(h2)))
}

/// Parameters of a fractional Gaussian noise path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct FgnModel {
    hurst: f64,
    length: usize,
}

impl FgnModel {
    /// Requires `1/2 < H < 1` strictly and at least two samples.
    pub fn new(hurst: f64, length: usize) -> Result<Self> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(Error::Domain(format!(
                "Hurst index must lie strictly inside (1/2, 1), got {hurst}"
            )));
        }
        if length < 2 {
            return Err(Error::Domain(format!(
                "path length must be at least 2, got {length}"
            )));
        }
        Ok(Self { hurst, length })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    hurst: f64,
    length: usize,
}

impl TryFrom<ModelRepr> for FgnModel {
    type Error = Error;
    fn try_from(r: ModelRepr) -> Result<Self> {
        FgnModel::new(r.hurst, r.length)
    }
}

impl From<FgnModel> for ModelRepr {
    fn from(m: FgnModel) -> Self {
        ModelRepr {
            hurst: m.hurst,
            length: m.length,
        }
    }
}

/// One sampled path together with the model and seed that produced it.
/// The same (model, seed) pair always reproduces the identical vector.
#[derive(Debug, Clone, Serialize)]
pub struct FgnPath {
    values: Vec<f64>,
    model: FgnModel,
    seed: u64,
}

impl FgnPath {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn model(&self) -> FgnModel {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One value per line, preceded by the pinned model header and any extra
    /// comment lines.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W, extra: &[String]) -> std::io::Result<()> {
        writeln!(
            w,
            "# H={} N={} seed={}",
            self.model.hurst, self.model.length, self.seed
        )?;
        for line in extra {
            writeln!(w, "# {line}")?;
        }
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    /// Raw little-endian f64 values; pair with [`FgnPath::sidecar`].
    pub fn write_binary<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn sidecar(&self) -> FgnSidecar {
        FgnSidecar {
            hurst: self.model.hurst,
            length: self.model.length,
            seed: self.seed,
            dtype: "f64".into(),
            byte_order: "little-endian".into(),
        }
    }
}

/// Description of a binary path file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FgnSidecar {
    pub hurst: f64,
    pub length: usize,
    pub seed: u64,
    pub dtype: String,
    pub byte_order: String,
}

/// Reusable sampler: the circulant eigenvalues and the FFT plan for one model.
///
/// Sampling is a pure function of the seed, so a single sampler can serve any
/// number of threads concurrently.
pub struct FgnSampler {
    model: FgnModel,
    /// `sqrt(lambda_k / M)`; the 1/sqrt(M) of the inverse transform is folded in.
    scaled_sqrt_eigenvalues: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    clamped: usize,
}

impl FgnSampler {
    pub fn new(model: FgnModel) -> Result<Self> {
        let n = model.length();
        let m = 2 * (n - 1);
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(m);
        let gamma: Vec<f64> = (0..n)
            .map(|lag| fgn_covariance(model.hurst(), lag))
            .collect::<Result<_>>()?;
        for &g in &gamma {
            buf.push(Complex::new(g, 0.0));
        }
        for j in (1..n - 1).rev() {
            buf.push(Complex::new(gamma[j], 0.0));
        }
        debug_assert_eq!(buf.len(), m);

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut buf);

        let max_eigenvalue = buf.iter().map(|c| c.re).fold(f64::MIN, f64::max);
        let min_eigenvalue = buf.iter().map(|c| c.re).fold(f64::MAX, f64::min);
        if min_eigenvalue < -EIGENVALUE_CLAMP_REL * max_eigenvalue {
            return Err(Error::Embedding {
                min_eigenvalue,
                max_eigenvalue,
            });
        }
        let clamped = buf.iter().filter(|c| c.re < 0.0).count();
        let mf = m as f64;
        let scaled_sqrt_eigenvalues = buf.iter().map(|c| (c.re.max(0.0) / mf).sqrt()).collect();
        Ok(Self {
            model,
            scaled_sqrt_eigenvalues,
            fft,
            clamped,
        })
    }

    pub fn model(&self) -> FgnModel {
        self.model
    }

    /// Number of eigenvalues that were clamped to zero from slightly negative
    /// rounding noise. Zero in practice; reported for honesty.
    pub fn clamped_eigenvalues(&self) -> usize {
        self.clamped
    }

    /// Draw the path for this seed. Bit-identical across calls and threads.
    pub fn sample(&self, seed: u64) -> FgnPath {
        let m = self.scaled_sqrt_eigenvalues.len();
        let half = m / 2;
        let sq = &self.scaled_sqrt_eigenvalues;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let mut draw = || -> f64 { normal.sample(&mut rng) };

        let mut buf = vec![Complex::new(0.0, 0.0); m];
        buf[0] = Complex::new(sq[0] * draw(), 0.0);
        for k in 1..half {
            let re = draw();
            let im = draw();
            let a = std::f64::consts::FRAC_1_SQRT_2 * sq[k];
            buf[k] = Complex::new(a * re, a * im);
            buf[m - k] = buf[k].conj();
        }
        buf[half] = Complex::new(sq[half] * draw(), 0.0);

        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut buf, &mut scratch);

        let values = buf[..self.model.length()].iter().map(|c| c.re).collect();
        FgnPath {
            values,
            model: self.model,
            seed,
        }
    }
}

/// One-shot sampling; builds a sampler and draws a single path.
pub fn sample_fgn(model: FgnModel, seed: u64) -> Result<FgnPath> {
    Ok(FgnSampler::new(model)?.sample(seed))
}

/// Exact variance of `sum_{n=1..N} H_m(Y(n))` for the fGn model:
/// `m! * sum_{|n| < N} (N - |n|) gamma(n)^m`.
pub fn variance_of_hermite_sums(hurst: f64, order: usize, length: usize) -> Result<f64> {
    if order < 1 {
        return Err(Error::Domain(format!(
            "Hermite order must be at least 1, got {order}"
        )));
    }
    if length < 1 {
        return Err(Error::Domain(format!(
            "length must be at least 1, got {length}"
        )));
    }
    let mut sum = length as f64; // gamma(0)^m = 1 with weight N
    for lag in 1..length {
        let g = fgn_covariance(hurst, lag)?;
        sum += 2.0 * (length - lag) as f64 * g.powi(order as i32);
    }
    Ok(factorial(order) * sum)
}
