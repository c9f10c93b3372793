//! Closed-form end-to-end results: distribution functions of the SIR
//! bounds, outage-probability bounds, the small-x limit of the bound PDF,
//! and the diversity/coding gains they imply at high SNR.

use crate::channel::{HopParams, SystemConfig};
use crate::error::Result;
use crate::sir;
use crate::specfun;

/// Outage threshold γ_th (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub threshold: f64,
}

impl OutageQuery {
    pub fn new(threshold: f64) -> Result<Self> {
        if !threshold.is_finite() || threshold <= 0.0 {
            return Err(crate::error::Error::InvalidParameter(format!(
                "outage threshold must be positive and finite, got {threshold}"
            )));
        }
        Ok(Self { threshold })
    }
}

/// Wang–Giannakis parameterization of the limiting PDF b·x^t near x → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    /// Exponent t = α − 1.
    pub exponent: f64,
    /// Leading coefficient b = K·a^α / B(α, β).
    pub coefficient: f64,
}

impl AsymptoticParams {
    /// Leading-order CDF b·x^(t+1)/(t+1) implied by the limiting PDF.
    pub fn cdf(&self, x: f64) -> f64 {
        self.coefficient * x.powf(self.exponent + 1.0) / (self.exponent + 1.0)
    }

    /// The limiting PDF itself, b·x^t.
    pub fn pdf(&self, x: f64) -> f64 {
        self.coefficient * x.powf(self.exponent)
    }
}

/// High-SNR performance parameters: outage and error-rate curves behave
/// like (G_c · γ̄)^−G_d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    /// Diversity gain G_d (log-log slope magnitude).
    pub diversity: f64,
    /// Coding gain G_c (linear horizontal offset).
    pub coding: f64,
}

/// 1 − Π(1 − fᵢ) accumulated as −expm1(Σ ln1p(−fᵢ)), which keeps relative
/// accuracy deep in the small-outage tail. Sequential accumulation keeps
/// the general, symmetric and worst-hop routes bit-identical on identical
/// hops.
fn min_cdf_from_hops(per_hop_cdfs: impl Iterator<Item = f64>) -> f64 {
    let mut log_survival = 0.0;
    for f in per_hop_cdfs {
        log_survival += (-f).ln_1p();
    }
    -log_survival.exp_m1()
}

/// CDF of the upper bound min γᵢ: 1 − Π (1 − F_γᵢ(x)) by order statistics.
/// A single hop reduces exactly to its own CDF.
pub fn upper_bound_cdf_general(config: &SystemConfig, x: f64) -> Result<f64> {
    if config.num_hops() == 1 {
        return sir::hop_sir_cdf(&config.hops[0], config.power, x);
    }
    let cdfs = config
        .hops
        .iter()
        .map(|hop| sir::hop_sir_cdf(hop, config.power, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(min_cdf_from_hops(cdfs.into_iter()))
}

/// Upper-bound CDF for a chain of K identical hops: 1 − (1 − F(x))^K.
pub fn upper_bound_cdf_symmetric(
    hop: &HopParams,
    power: f64,
    hops: usize,
    x: f64,
) -> Result<f64> {
    let f = sir::hop_sir_cdf(hop, power, x)?;
    if hops == 1 {
        return Ok(f);
    }
    Ok(min_cdf_from_hops(std::iter::repeat_n(f, hops)))
}

/// Worst-hop approximation for non-symmetric chains: every hop replaced by
/// the one with minimum average SIR. Exposed separately from
/// [`upper_bound_cdf_general`] so the approximation error stays visible.
pub fn upper_bound_cdf_worst_hop(config: &SystemConfig, x: f64) -> Result<f64> {
    let worst = &config.hops[sir::worst_hop(config)];
    upper_bound_cdf_symmetric(worst, config.power, config.hops.len(), x)
}

/// CDF of the lower bound min γᵢ / K, which is the upper-bound CDF
/// stretched to Kx.
pub fn lower_bound_cdf_general(config: &SystemConfig, x: f64) -> Result<f64> {
    upper_bound_cdf_general(config, config.hops.len() as f64 * x)
}

pub fn lower_bound_cdf_symmetric(
    hop: &HopParams,
    power: f64,
    hops: usize,
    x: f64,
) -> Result<f64> {
    upper_bound_cdf_symmetric(hop, power, hops, hops as f64 * x)
}

pub fn lower_bound_cdf_worst_hop(config: &SystemConfig, x: f64) -> Result<f64> {
    upper_bound_cdf_worst_hop(config, config.hops.len() as f64 * x)
}

/// Analytical outage bracket at γ_th: the true outage probability lies in
/// [F_upper(γ_th), F_upper(K·γ_th)].
pub fn outage_bounds(config: &SystemConfig, query: &OutageQuery) -> Result<(f64, f64)> {
    Ok((
        upper_bound_cdf_general(config, query.threshold)?,
        lower_bound_cdf_general(config, query.threshold)?,
    ))
}

/// Small-x parameters of the upper-bound PDF for a symmetric chain:
/// t = α − 1 and b = K·a^α / B(α, β) with a = [`sir::sir_scale`].
pub fn asymptotic_params(hop: &HopParams, power: f64, hops: usize) -> Result<AsymptoticParams> {
    let a = sir::sir_scale(hop, power);
    let coefficient =
        hops as f64 * a.powf(hop.alpha) / specfun::beta(hop.alpha, hop.beta)?;
    Ok(AsymptoticParams { exponent: hop.alpha - 1.0, coefficient })
}

/// Diversity and coding gains of a symmetric K-hop chain.
///
/// G_d = α. G_c carries the 1/α-th root of a product whose factors
/// (2^(α−1), a^α, Γ(α+1/2)) overflow for large shapes, so the inner power
/// is assembled in log space.
pub fn gains(hop: &HopParams, power: f64, hops: usize, mod_const: f64) -> Result<GainReport> {
    let (al, be) = (hop.alpha, hop.beta);
    let ln_inner = 0.5 * std::f64::consts::PI.ln() + al.ln() + specfun::ln_beta(al, be)?
        - (al - 1.0) * std::f64::consts::LN_2
        - (hops as f64).ln()
        - specfun::log_gamma(al + 0.5)?;
    let coding =
        mod_const * power * be * hop.snr_desired / (al * hop.inr) * (ln_inner / al).exp();
    Ok(GainReport { diversity: al, coding })
}

/// Rayleigh-faded desired channels (α = 1): the coding gain collapses to
/// 2lPγ̄_D / (K·γ̄_I) — inversely proportional to the interference
/// accumulated over the chain and independent of the interferer shape β.
pub fn gains_rayleigh_desired(
    hop: &HopParams,
    power: f64,
    hops: usize,
    mod_const: f64,
) -> GainReport {
    GainReport {
        diversity: 1.0,
        coding: 2.0 * mod_const * power * hop.snr_desired / (hops as f64 * hop.inr),
    }
}

/// Rayleigh-faded interferers (β = 1): B(α, 1) = 1/α cancels and the
/// coding gain decreases with α.
pub fn gains_rayleigh_interference(
    hop: &HopParams,
    power: f64,
    hops: usize,
    mod_const: f64,
) -> Result<GainReport> {
    let al = hop.alpha;
    let ln_inner = 0.5 * std::f64::consts::PI.ln()
        - (al - 1.0) * std::f64::consts::LN_2
        - (hops as f64).ln()
        - specfun::log_gamma(al + 0.5)?;
    let coding =
        mod_const * power * hop.snr_desired / (al * hop.inr) * (ln_inner / al).exp();
    Ok(GainReport { diversity: al, coding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SystemConfig;

    fn unit_hop(alpha: f64, beta: f64) -> HopParams {
        HopParams::new(alpha, beta, 1.0, 1.0).unwrap()
    }

    fn sym_config(hop: HopParams, k: usize) -> SystemConfig {
        SystemConfig::symmetric(hop, k, 1.0, 2.0).unwrap()
    }

    #[test]
    fn upper_bound_cdf_basics() {
        let h = unit_hop(1.0, 1.0);
        let cfg = sym_config(h, 2);
        assert_eq!(upper_bound_cdf_general(&cfg, 0.0).unwrap(), 0.0);

        // single hop reduces to the per-hop CDF
        let single = sym_config(h, 1);
        for &x in &[0.1, 1.0, 4.0] {
            assert_eq!(
                upper_bound_cdf_general(&single, x).unwrap(),
                sir::hop_sir_cdf(&h, 1.0, x).unwrap()
            );
        }

        // α = β = a = 1, x = 1: per-hop CDF 1/2, two hops → 3/4
        assert!((upper_bound_cdf_general(&cfg, 1.0).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn symmetric_route_drops_to_hop_cdf_at_k1() {
        let h = unit_hop(1.2, 0.8);
        for &x in &[0.3, 1.0, 2.5] {
            assert_eq!(
                upper_bound_cdf_symmetric(&h, 1.0, 1, x).unwrap(),
                sir::hop_sir_cdf(&h, 1.0, x).unwrap()
            );
        }
    }

    #[test]
    fn symmetric_three_hop_closed_form() {
        // α = β = a = 1: F_sym(1) = 1/2 → 1 − (1/2)³
        let h = unit_hop(1.0, 1.0);
        let got = upper_bound_cdf_symmetric(&h, 1.0, 3, 1.0).unwrap();
        assert!((got - 0.875).abs() < 1e-14);
        assert_eq!(upper_bound_cdf_symmetric(&h, 1.0, 3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn general_and_symmetric_routes_bit_identical_on_symmetric_chains() {
        let h = unit_hop(2.3, 1.7);
        let cfg = sym_config(h, 4);
        for &x in &[0.05, 0.6, 1.9, 6.0] {
            assert_eq!(
                upper_bound_cdf_general(&cfg, x).unwrap(),
                upper_bound_cdf_symmetric(&h, 1.0, 4, x).unwrap()
            );
            assert_eq!(
                upper_bound_cdf_worst_hop(&cfg, x).unwrap(),
                upper_bound_cdf_symmetric(&h, 1.0, 4, x).unwrap()
            );
        }
    }

    #[test]
    fn worst_hop_tracks_general_product_under_asymmetry() {
        // the approximation pretends every hop looks like the worst one, so
        // at a fixed threshold it converges on the exact product as that hop
        // degrades and its own CDF comes to dominate the outage event
        let strong = HopParams::new(1.0, 2.0, 10.0, 1.0).unwrap();
        let x = 1.0;
        let rel_err = |weak_snr: f64| {
            let weak = HopParams::new(1.0, 2.0, weak_snr, 1.0).unwrap();
            let cfg = SystemConfig::new(vec![weak, strong], 1.0, 2.0).unwrap();
            let exact = upper_bound_cdf_general(&cfg, x).unwrap();
            let approx = upper_bound_cdf_worst_hop(&cfg, x).unwrap();
            (approx - exact).abs() / exact
        };
        let errs = [rel_err(2.0), rel_err(0.2), rel_err(0.02)];
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 0.01, "{errs:?}");
    }

    #[test]
    fn lower_bound_is_upper_bound_at_kx() {
        let h = unit_hop(1.0, 1.0);
        let cfg = sym_config(h, 2);
        // K = 2, x = 0.5 → F_upper(1) = 3/4
        assert!((lower_bound_cdf_general(&cfg, 0.5).unwrap() - 0.75).abs() < 1e-14);
        assert_eq!(
            lower_bound_cdf_symmetric(&h, 1.0, 2, 0.5).unwrap(),
            upper_bound_cdf_symmetric(&h, 1.0, 2, 1.0).unwrap()
        );

        let single = sym_config(h, 1);
        for &x in &[0.2, 1.0, 3.0] {
            assert_eq!(
                lower_bound_cdf_general(&single, x).unwrap(),
                upper_bound_cdf_general(&single, x).unwrap()
            );
        }
    }

    #[test]
    fn bound_cdfs_are_ordered() {
        let h = unit_hop(1.2, 0.8);
        let cfg = sym_config(h, 3);
        for &x in &[1e-3, 0.1, 1.0, 2.0] {
            let up = upper_bound_cdf_general(&cfg, x).unwrap();
            let low = lower_bound_cdf_general(&cfg, x).unwrap();
            assert!(up <= low, "x={x}: {up} > {low}");
        }
    }

    #[test]
    fn outage_bounds_examples() {
        let h = unit_hop(1.0, 1.0);
        let q = OutageQuery::new(1.0).unwrap();

        let single = sym_config(h, 1);
        let (low, high) = outage_bounds(&single, &q).unwrap();
        assert_eq!(low, high);

        let cfg = sym_config(h, 2);
        let (low, high) = outage_bounds(&cfg, &q).unwrap();
        assert!((low - 0.75).abs() < 1e-14);
        assert!((high - 8.0 / 9.0).abs() < 1e-14);
        assert!(low <= high);
    }

    #[test]
    fn asymptotic_params_examples() {
        // α = β = a = 1, K = 1 → (t, b) = (0, 1)
        let p = asymptotic_params(&unit_hop(1.0, 1.0), 1.0, 1).unwrap();
        assert_eq!(p.exponent, 0.0);
        assert!((p.coefficient - 1.0).abs() < 1e-14);

        // α = 1, β = 2, K = 2, unit SNR/INR/P: a = 1/2, B(1,2) = 1/2 → b = 2
        let p = asymptotic_params(&unit_hop(1.0, 2.0), 1.0, 2).unwrap();
        assert_eq!(p.exponent, 0.0);
        assert!((p.coefficient - 2.0).abs() < 1e-13);
    }

    #[test]
    fn asymptote_matches_cdf_near_zero() {
        for &(al, be, k) in &[(1.0, 1.0, 2), (1.2, 0.8, 3), (2.3, 1.0, 3)] {
            let h = unit_hop(al, be);
            let params = asymptotic_params(&h, 1.0, k).unwrap();
            // probe where the closed-form CDF is safely below 1e-4
            let x = (1e-6_f64 * (params.exponent + 1.0) / params.coefficient)
                .powf(1.0 / (params.exponent + 1.0));
            let cdf = upper_bound_cdf_symmetric(&h, 1.0, k, x).unwrap();
            assert!(cdf < 1e-4);
            let ratio = cdf / params.cdf(x);
            assert!((ratio - 1.0).abs() < 1e-2, "α={al} β={be} K={k}: ratio {ratio}");
        }
    }

    #[test]
    fn asymptote_matches_pdf_derivative_near_zero() {
        // finite difference of the closed-form CDF vs the limiting PDF
        let h = unit_hop(1.2, 0.8);
        let k = 3;
        let params = asymptotic_params(&h, 1.0, k).unwrap();
        let x = 1e-7;
        let dx = 1e-9;
        let fd = (upper_bound_cdf_symmetric(&h, 1.0, k, x + dx).unwrap()
            - upper_bound_cdf_symmetric(&h, 1.0, k, x - dx).unwrap())
            / (2.0 * dx);
        let rel = (fd - params.pdf(x)).abs() / params.pdf(x);
        assert!(rel < 1e-4, "rel {rel}");
    }

    #[test]
    fn gain_examples() {
        // α = 1, l = 2, P = 1, γ̄_D = 100, γ̄_I = 10, K = 2 → G_c = 20
        let h = HopParams::new(1.0, 1.0, 100.0, 10.0).unwrap();
        let g = gains(&h, 1.0, 2, 2.0).unwrap();
        assert_eq!(g.diversity, 1.0);
        assert!((g.coding - 20.0).abs() < 1e-12 * 20.0);

        let special = gains_rayleigh_desired(&h, 1.0, 2, 2.0);
        assert_eq!(special.coding, 20.0);
        assert_eq!(special.diversity, 1.0);
    }

    #[test]
    fn rayleigh_desired_reduction_is_beta_free() {
        for be in [0.8, 1.0, 2.5] {
            let h = HopParams::new(1.0, be, 100.0, 10.0).unwrap();
            let g = gains(&h, 1.0, 2, 2.0).unwrap();
            assert!(
                (g.coding - 20.0).abs() < 1e-12 * 20.0,
                "β={be}: {}",
                g.coding
            );
        }
    }

    #[test]
    fn rayleigh_interference_reduction_matches_general() {
        for al in [1.0, 1.2, 2.0, 2.3, 3.0] {
            let h = HopParams::new(al, 1.0, 100.0, 10.0).unwrap();
            let g = gains(&h, 1.0, 3, 2.0).unwrap();
            let s = gains_rayleigh_interference(&h, 1.0, 3, 2.0).unwrap();
            assert!(
                (g.coding - s.coding).abs() <= 1e-12 * s.coding,
                "α={al}: {} vs {}",
                g.coding,
                s.coding
            );
        }
    }

    #[test]
    fn doubling_hops_halves_rayleigh_coding_gain() {
        let h = HopParams::new(1.0, 1.0, 100.0, 10.0).unwrap();
        let g2 = gains_rayleigh_desired(&h, 1.0, 2, 2.0);
        let g4 = gains_rayleigh_desired(&h, 1.0, 4, 2.0);
        assert_eq!(g2.coding / g4.coding, 2.0);
    }

    #[test]
    fn coding_gain_monotonicity_grid() {
        let shapes = [0.8, 1.0, 1.5, 2.0, 3.0];
        let gc = |al: f64, be: f64, snr: f64, inr: f64, k: usize| {
            gains(&HopParams::new(al, be, snr, inr).unwrap(), 1.0, k, 2.0)
                .unwrap()
                .coding
        };
        // decreasing in α (at every β on the grid), in K, and in γ̄_I;
        // increasing in γ̄_D
        for &be in &shapes {
            for (i, &al) in shapes.iter().enumerate().skip(1) {
                assert!(gc(al, be, 100.0, 1.0, 2) < gc(shapes[i - 1], be, 100.0, 1.0, 2));
            }
        }
        for k in 2..=6 {
            assert!(gc(1.5, 1.0, 100.0, 1.0, k) < gc(1.5, 1.0, 100.0, 1.0, k - 1));
        }
        assert!(gc(1.5, 1.0, 100.0, 2.0, 2) < gc(1.5, 1.0, 100.0, 1.0, 2));
        assert!(gc(1.5, 1.0, 200.0, 1.0, 2) > gc(1.5, 1.0, 100.0, 1.0, 2));
        // the β direction flips with α: β·B(α,β)^(1/α) falls with β for
        // α < 1, is constant at α = 1, and rises for α > 1
        for (i, &be) in shapes.iter().enumerate().skip(1) {
            assert!(gc(0.8, be, 100.0, 1.0, 2) < gc(0.8, shapes[i - 1], 100.0, 1.0, 2));
            assert!(gc(2.0, be, 100.0, 1.0, 2) > gc(2.0, shapes[i - 1], 100.0, 1.0, 2));
            let flat = gc(1.0, be, 100.0, 1.0, 2);
            assert!((flat - 200.0).abs() < 1e-12 * 200.0, "{flat}");
        }
    }

    #[test]
    fn large_shape_gains_stay_finite() {
        let h = HopParams::new(40.0, 30.0, 100.0, 1.0).unwrap();
        let g = gains(&h, 1.0, 3, 2.0).unwrap();
        assert!(g.coding.is_finite() && g.coding > 0.0);
    }

    #[test]
    fn outage_query_validation() {
        assert!(OutageQuery::new(1.0).is_ok());
        assert!(OutageQuery::new(0.0).is_err());
        assert!(OutageQuery::new(f64::NAN).is_err());
    }
}
