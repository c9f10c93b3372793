//! Per-hop and end-to-end signal-to-interference ratios: exact values for
//! one channel realization, the min-based lower/upper bounds, and the
//! per-hop SIR distribution (a beta distribution of the second kind).

use crate::channel::{HopParams, SystemConfig};
use crate::error::{Error, Result};
use crate::specfun;

/// Lower and upper bounds on the end-to-end SIR of one realization.
/// `lower` is exactly `upper / K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Distribution scale a = α·γ̄_I / (P·β·γ̄_D).
///
/// The per-hop SIR distribution depends on power, SNR and INR only through
/// this ratio, which is what makes the closed forms scale-free.
pub fn sir_scale(hop: &HopParams, power: f64) -> f64 {
    hop.alpha * hop.inr / (power * hop.beta * hop.snr_desired)
}

/// Received SIR of one hop: P·|f|² / |h|².
pub fn hop_sir(power: f64, desired_gain: f64, interferer_gain: f64) -> Result<f64> {
    if desired_gain < 0.0 || !desired_gain.is_finite() {
        return Err(Error::Domain(format!(
            "desired gain must be nonnegative and finite, got {desired_gain}"
        )));
    }
    if interferer_gain <= 0.0 || !interferer_gain.is_finite() {
        return Err(Error::DegenerateInterferer);
    }
    Ok(power * desired_gain / interferer_gain)
}

/// End-to-end SIR of a K-hop chain: (Σ 1/γᵢ)⁻¹.
///
/// Returns γ₁ itself for a single hop, and 0 if any hop SIR is zero (the
/// continuous limit of the harmonic form).
pub fn end_to_end_sir(hop_sirs: &[f64]) -> Result<f64> {
    match hop_sirs {
        [] => Err(Error::InvalidParameter("need at least one hop SIR".into())),
        [only] => Ok(*only),
        _ => {
            if hop_sirs.iter().any(|&g| g == 0.0) {
                return Ok(0.0);
            }
            let inv_sum: f64 = hop_sirs.iter().map(|&g| 1.0 / g).sum();
            Ok(1.0 / inv_sum)
        }
    }
}

/// Min-based bounds: upper = min γᵢ, lower = min γᵢ / K. The end-to-end
/// SIR of the same realization always lies between them.
pub fn sir_bounds(hop_sirs: &[f64]) -> Result<SirBounds> {
    if hop_sirs.is_empty() {
        return Err(Error::InvalidParameter("need at least one hop SIR".into()));
    }
    let upper = hop_sirs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SirBounds { lower: upper / hop_sirs.len() as f64, upper })
}

/// Per-hop SIR density a(ax)^(α−1) (1+ax)^−(α+β) / B(α, β) with
/// a = [`sir_scale`].
///
/// For α < 1 the density diverges as x → 0⁺, so evaluation exactly at
/// x = 0 is a domain error; integrate on open intervals instead.
pub fn hop_sir_pdf(hop: &HopParams, power: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("pdf requires x >= 0, got {x}")));
    }
    let a = sir_scale(hop, power);
    let b = specfun::beta(hop.alpha, hop.beta)?;
    if x == 0.0 {
        if hop.alpha < 1.0 {
            return Err(Error::Domain(
                "density diverges at x = 0 for alpha < 1".into(),
            ));
        }
        return Ok(if hop.alpha > 1.0 { 0.0 } else { a / b });
    }
    let ax = a * x;
    Ok(a / b * ax.powf(hop.alpha - 1.0) * (1.0 + ax).powf(-(hop.alpha + hop.beta)))
}

/// Per-hop SIR distribution function in its hypergeometric form:
/// (ax)^α / (α B(α, β)) · ₂F₁(α, α+β; α+1; −ax).
pub fn hop_sir_cdf(hop: &HopParams, power: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("cdf requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ax = sir_scale(hop, power) * x;
    let (al, be) = (hop.alpha, hop.beta);
    let hyp = specfun::gauss_2f1_neg(al, al + be, al + 1.0, -ax)?;
    Ok(ax.powf(al) / (al * specfun::beta(al, be)?) * hyp)
}

/// Same distribution through the regularized incomplete beta function,
/// I_{ax/(1+ax)}(α, β). Kept as an independent route to [`hop_sir_cdf`];
/// the two must agree.
pub fn hop_sir_cdf_beta_route(hop: &HopParams, power: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("cdf requires x >= 0, got {x}")));
    }
    let ax = sir_scale(hop, power) * x;
    specfun::reg_inc_beta(ax / (1.0 + ax), hop.alpha, hop.beta)
}

/// Mean per-hop SIR. Finite only for β > 1; the distribution is too
/// heavy-tailed otherwise and the mean is flagged as infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanSir {
    Finite(f64),
    Infinite,
}

pub fn hop_mean_sir(hop: &HopParams, power: f64) -> MeanSir {
    if hop.beta > 1.0 {
        MeanSir::Finite(power * hop.beta * hop.snr_desired / ((hop.beta - 1.0) * hop.inr))
    } else {
        MeanSir::Infinite
    }
}

/// Index of the statistically worst hop (minimum average SIR).
///
/// Hops with β ≤ 1 have an infinite mean, where the average-SIR criterion
/// is undefined; any such hop outranks all finite-mean hops and, among
/// themselves, the largest distribution scale (stochastically smallest
/// SIR) wins. Ties go to the lowest index.
pub fn worst_hop(config: &SystemConfig) -> usize {
    #[derive(Clone, Copy)]
    enum Rank {
        InfiniteMean { scale: f64 },
        FiniteMean { mean: f64 },
    }

    fn worse(candidate: Rank, best: Rank) -> bool {
        match (candidate, best) {
            (Rank::InfiniteMean { scale: a }, Rank::InfiniteMean { scale: b }) => a > b,
            (Rank::InfiniteMean { .. }, Rank::FiniteMean { .. }) => true,
            (Rank::FiniteMean { .. }, Rank::InfiniteMean { .. }) => false,
            (Rank::FiniteMean { mean: a }, Rank::FiniteMean { mean: b }) => a < b,
        }
    }

    let rank = |hop: &HopParams| match hop_mean_sir(hop, config.power) {
        MeanSir::Finite(mean) => Rank::FiniteMean { mean },
        MeanSir::Infinite => Rank::InfiniteMean { scale: sir_scale(hop, config.power) },
    };

    let mut best_idx = 0;
    let mut best = rank(&config.hops[0]);
    for (i, hop) in config.hops.iter().enumerate().skip(1) {
        let cand = rank(hop);
        if worse(cand, best) {
            best_idx = i;
            best = cand;
        }
    }
    best_idx
}
