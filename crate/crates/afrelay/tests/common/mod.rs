//! Shared numerical oracles for the integration tests: quadrature and a
//! one-sample Kolmogorov–Smirnov statistic. Deliberately independent of
//! the library's special-function implementations.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh (double exponential) quadrature over a finite interval.
/// Nodes never touch the endpoints and cluster towards them double
/// exponentially, so integrable endpoint singularities are fine.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    assert!(b > a);
    const T_MAX: f64 = 4.0;
    const MAX_LEVEL: u32 = 12;

    let half = 0.5 * (b - a);
    // node position (offset from the nearer endpoint, cancellation-free)
    // and weight at abscissa t
    let node = |t: f64| -> (f64, f64) {
        let s = FRAC_PI_2 * t.sinh();
        let u = (-2.0 * s.abs()).exp();
        let one_plus = 1.0 + u;
        let off = half * 2.0 * u / one_plus;
        let x = if t < 0.0 { a + off } else { b - off };
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * u / (one_plus * one_plus);
        (x, w)
    };

    let eval = |t: f64| -> f64 {
        let (x, w) = node(t);
        if w == 0.0 || x <= a || x >= b {
            return 0.0;
        }
        let v = w * f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    // level 0: h = 1
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut integral = h * sum;

    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        // add the new nodes at odd multiples of h
        let mut t = h;
        let mut new_sum = 0.0;
        while t <= T_MAX {
            new_sum += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        sum += new_sum;
        let refined = h * sum;
        let delta = (refined - integral).abs();
        integral = refined;
        if delta <= tol * integral.abs().max(1e-300) + 1e-300 {
            break;
        }
    }
    integral
}

const GL10_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL10_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

/// 10-point Gauss–Legendre panel; exact to machine precision on small
/// smooth panels.
pub fn gauss_legendre_panel<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS) {
        acc += w * (f(mid + half * x) + f(mid - half * x));
    }
    acc * half
}

/// ∫₀¹ x^(p−1) (1−x)^(q−1) dx split at 1/2 with the upper half reflected,
/// so each potentially singular endpoint is the exact left node of its own
/// piece (x = a + off carries no rounding at a = 0, unlike b − off).
pub fn beta_integral_by_quadrature(p: f64, q: f64) -> f64 {
    let lower = tanh_sinh(|x: f64| x.powf(p - 1.0) * (1.0 - x).powf(q - 1.0), 0.0, 0.5, 1e-13);
    let upper = tanh_sinh(|y: f64| y.powf(q - 1.0) * (1.0 - y).powf(p - 1.0), 0.0, 0.5, 1e-13);
    lower + upper
}

/// ∫₀ᵘ of the same density, reflected near whichever endpoint is closer.
pub fn beta_partial_by_quadrature(p: f64, q: f64, u: f64) -> f64 {
    if u <= 0.5 {
        tanh_sinh(|x: f64| x.powf(p - 1.0) * (1.0 - x).powf(q - 1.0), 0.0, u, 1e-13)
    } else {
        let tail =
            tanh_sinh(|y: f64| y.powf(q - 1.0) * (1.0 - y).powf(p - 1.0), 0.0, 1.0 - u, 1e-13);
        beta_integral_by_quadrature(p, q) - tail
    }
}

/// One-sample KS statistic of an ascending sample against theoretical CDF
/// values at those points.
pub fn ks_statistic_sorted(n: usize, cdf_at_sorted: &[f64]) -> f64 {
    assert_eq!(n, cdf_at_sorted.len());
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &f) in cdf_at_sorted.iter().enumerate() {
        d = d.max(f - i as f64 / nf).max((i as f64 + 1.0) / nf - f);
    }
    d
}

/// Asymptotic one-sample KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_624 / (n as f64).sqrt()
}

/// Gamma(shape, scale) CDF evaluated at every point of an ascending grid,
/// entirely by quadrature: the unnormalized density is integrated
/// incrementally across the grid and normalized by its own integral, so no
/// gamma-function implementation is involved.
pub fn gamma_cdf_by_quadrature(shape: f64, scale: f64, sorted: &[f64]) -> Vec<f64> {
    assert!(!sorted.is_empty());
    let peak = scale * (shape - 1.0).max(1.0);

    // unnormalized density, scaled near its peak to keep values moderate
    let ln_scale_ref = ((shape - 1.0) * peak.ln() - peak / scale).max(-700.0);
    let g = move |x: f64| ((shape - 1.0) * x.ln() - x / scale - ln_scale_ref).exp();

    let top = sorted[sorted.len() - 1];
    let far = (top * 2.0).max(scale * (shape + 40.0 * shape.sqrt() + 50.0));

    let mut partial = Vec::with_capacity(sorted.len());
    let mut acc = tanh_sinh(g, 0.0, sorted[0].max(1e-300), 1e-12);
    partial.push(acc);
    for w in sorted.windows(2) {
        if w[1] > w[0] {
            acc += gauss_legendre_panel(g, w[0], w[1]);
        }
        partial.push(acc);
    }
    let total = acc + gauss_legendre_tail(g, top, far);
    partial.into_iter().map(|p| p / total).collect()
}

fn gauss_legendre_tail<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64) -> f64 {
    // fixed composite rule: 64 panels resolve the exponential tail easily
    let n = 64;
    let step = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * step;
        acc += gauss_legendre_panel(f, lo, lo + step);
    }
    acc
}

/// Sample mean and unbiased variance.
pub fn mean_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
