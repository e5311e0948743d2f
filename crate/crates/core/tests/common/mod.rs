//! Shared statistical oracles for the integration suites. These stay
//! independent of the library paths they check: the KS statistic and the
//! first-principles SINR are computed from definitions, not by calling the
//! code under test.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use aeromimo::receiver::LinkBudgetContext;

/// One-sample Kolmogorov-Smirnov statistic against an analytic CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Asymptotic KS critical value at significance 0.01:
/// `c(0.01)/sqrt(n)` with `c(0.01) = 1.628`.
pub fn ks_critical_001(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Output SINR of stream `k` for an arbitrary linear combiner `W*` applied
/// to `y = H s + n`, from first principles on the signal model: signal
/// `P |[W*H]_kk|^2`, interference `P sum_{j!=k} |[W*H]_kj|^2`, noise
/// `N_o B ||row_k(W*)||^2`.
pub fn first_principles_sinr(
    w: &DMatrix<Complex64>,
    h: &DMatrix<Complex64>,
    ctx: &LinkBudgetContext,
) -> Vec<f64> {
    let wh = w * h;
    let p = ctx.p_tx_w();
    let noise_w = ctx.noise_psd_w_per_hz() * ctx.bandwidth_hz();
    (0..h.ncols())
        .map(|k| {
            let signal = p * wh[(k, k)].norm_sqr();
            let interference: f64 = (0..h.ncols())
                .filter(|&j| j != k)
                .map(|j| p * wh[(k, j)].norm_sqr())
                .sum();
            let noise: f64 = noise_w * (0..h.nrows()).map(|j| w[(k, j)].norm_sqr()).sum::<f64>();
            signal / (interference + noise)
        })
        .collect()
}
