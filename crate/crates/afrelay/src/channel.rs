//! Channel parameterization, Nakagami-m power-gain sampling, and reduction
//! of multiple interferers to a single equivalent one.
//!
//! A Nakagami-m faded amplitude has a Gamma-distributed power gain, so the
//! channel layer works entirely with Gamma draws: shape = fading figure,
//! mean = average SNR (or INR) of the link. All ratios are stored linear;
//! dB conversion happens at the experiment boundary.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Fading and interference parameters of one relaying hop.
///
/// `alpha` shapes the desired channel, `beta` the (single equivalent)
/// interferer; `snr_desired` and `inr` are the average linear SNR/INR of
/// the two links. All four must be strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopParams {
    pub alpha: f64,
    pub beta: f64,
    pub snr_desired: f64,
    pub inr: f64,
}

impl HopParams {
    pub fn new(alpha: f64, beta: f64, snr_desired: f64, inr: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("snr_desired", snr_desired),
            ("inr", inr),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "hop {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { alpha, beta, snr_desired, inr })
    }
}

/// A K-hop chain with its transmit power and constellation constant.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub hops: Vec<HopParams>,
    /// Transmit power P (linear).
    pub power: f64,
    /// Constellation constant l, e.g. 2 for BPSK.
    pub mod_const: f64,
}

impl SystemConfig {
    pub fn new(hops: Vec<HopParams>, power: f64, mod_const: f64) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::InvalidParameter("need at least one hop".into()));
        }
        if !power.is_finite() || power <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "power must be positive and finite, got {power}"
            )));
        }
        if !mod_const.is_finite() || mod_const <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mod_const must be positive and finite, got {mod_const}"
            )));
        }
        Ok(Self { hops, power, mod_const })
    }

    /// K identical hops.
    pub fn symmetric(hop: HopParams, hops: usize, power: f64, mod_const: f64) -> Result<Self> {
        Self::new(vec![hop; hops], power, mod_const)
    }

    pub fn num_hops(&self) -> usize {
        self.hops.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.hops.iter().all(|h| *h == self.hops[0])
    }
}

/// A group of `count` i.i.d. interferers, each with Nakagami shape `shape`
/// and average linear INR `inr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererSpec {
    pub shape: f64,
    pub inr: f64,
    pub count: u32,
}

impl InterfererSpec {
    pub fn new(shape: f64, inr: f64, count: u32) -> Result<Self> {
        if !shape.is_finite() || shape <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interferer shape must be positive, got {shape}"
            )));
        }
        if !inr.is_finite() || inr <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interferer inr must be positive, got {inr}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("interferer count must be >= 1".into()));
        }
        Ok(Self { shape, inr, count })
    }
}

/// One draw of a channel power gain: Gamma with the given shape and mean.
///
/// Marsaglia–Tsang squeeze for shape >= 1; shapes below one are boosted to
/// shape + 1 and scaled back by U^(1/shape), which keeps the non-integer
/// shapes of interest exact in distribution.
pub fn sample_power_gain<R: Rng + ?Sized>(shape: f64, mean_power: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0 && mean_power > 0.0);
    let scale = mean_power / shape;
    if shape < 1.0 {
        let boost = sample_gamma_ge1(shape + 1.0, rng);
        let u: f64 = rng.random();
        scale * boost * u.powf(1.0 / shape)
    } else {
        scale * sample_gamma_ge1(shape, rng)
    }
}

fn sample_gamma_ge1<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Collapse `count` i.i.d. interferers into the exact single equivalent:
/// the sum of i.i.d. Gamma variables is Gamma with shape m·N and mean N·γ̄.
pub fn aggregate_iid_interferers(spec: &InterfererSpec) -> (f64, f64) {
    let n = spec.count as f64;
    (spec.shape * n, spec.inr * n)
}

/// Collapse independent, non-identical interferer groups into a single
/// equivalent interferer by matching the first two moments of the sum.
/// A Gamma with shape k and mean μ has variance μ²/k, so the match is
/// shape = μ²/v, mean = μ with μ, v the summed means and variances.
pub fn aggregate_nonidentical_interferers(specs: &[InterfererSpec]) -> Result<(f64, f64)> {
    if specs.is_empty() {
        return Err(Error::EmptyInterferers);
    }
    let mut mean = 0.0;
    let mut var = 0.0;
    for s in specs {
        let n = s.count as f64;
        mean += n * s.inr;
        var += n * s.inr * s.inr / s.shape;
    }
    Ok((mean * mean / var, mean))
}
