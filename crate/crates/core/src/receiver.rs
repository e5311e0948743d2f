//! Digital combining across the AP subarrays, per-user SINRs, and
//! achievable rates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::UplinkChannel;
use crate::error::{Error, Result};

/// Per-user transmit power, system bandwidth, and the receiver noise floor.
/// `snr()` is the paper-style reference ratio `P_tx / (N_o * B)` shared by
/// both combiners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetContext {
    p_tx_w: f64,
    bandwidth_hz: f64,
    noise_psd_w_per_hz: f64,
}

impl LinkBudgetContext {
    pub fn new(p_tx_w: f64, bandwidth_hz: f64, noise_psd_w_per_hz: f64) -> Result<Self> {
        for (name, v) in [
            ("p_tx_watts", p_tx_w),
            ("bandwidth_hz", bandwidth_hz),
            ("noise_psd_w_per_hz", noise_psd_w_per_hz),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!(
                    "link budget: {name} ({v}) must be positive and finite"
                )));
            }
        }
        Ok(Self {
            p_tx_w,
            bandwidth_hz,
            noise_psd_w_per_hz,
        })
    }

    pub fn p_tx_w(&self) -> f64 {
        self.p_tx_w
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn noise_psd_w_per_hz(&self) -> f64 {
        self.noise_psd_w_per_hz
    }

    /// `P_tx / (N_o * B)`, linear.
    pub fn snr(&self) -> f64 {
        self.p_tx_w / (self.noise_psd_w_per_hz * self.bandwidth_hz)
    }
}

/// The two digital combining strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CombinerKind {
    #[serde(rename = "mmse")]
    Mmse,
    /// No digital combining; interference is handled by the analog beams
    /// alone (the SDMA-style receiver).
    #[serde(rename = "identity")]
    Identity,
}

impl CombinerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CombinerKind::Mmse => "mmse",
            CombinerKind::Identity => "identity",
        }
    }
}

/// Per-user post-combining SINRs for one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerOutput {
    pub combiner: CombinerKind,
    pub sinr_per_user: Vec<f64>,
    /// How many entries were clamped up to zero after floating-point
    /// cancellation produced a small negative value.
    pub negative_clamps: usize,
}

/// Regularized Gram matrix `H*H + I/SNR`, the Hermitian positive-definite
/// core of both MMSE expressions.
fn regularized_gram(h: &DMatrix<Complex64>, snr: f64) -> DMatrix<Complex64> {
    let n = h.ncols();
    let mut m = h.adjoint() * h;
    let reg = Complex64::new(1.0 / snr, 0.0);
    for k in 0..n {
        m[(k, k)] += reg;
    }
    m
}

fn cholesky_of_gram(
    h: &DMatrix<Complex64>,
    snr: f64,
) -> Result<nalgebra::linalg::Cholesky<Complex64, nalgebra::Dyn>> {
    nalgebra::linalg::Cholesky::new(regularized_gram(h, snr)).ok_or_else(|| {
        Error::Numerical(
            "MMSE gram matrix H*H + I/SNR failed its positive-definite factorization".into(),
        )
    })
}

/// The MMSE digital combiner `W* = (I/SNR + H*H)^{-1} H*`, computed via a
/// Cholesky solve rather than an explicit inverse.
pub fn mmse_combiner(h: &UplinkChannel, ctx: &LinkBudgetContext) -> Result<DMatrix<Complex64>> {
    let chol = cholesky_of_gram(h.matrix(), ctx.snr())?;
    Ok(chol.solve(&h.matrix().adjoint()))
}

/// Per-user MMSE SINRs `rho_k = SNR / [(H*H + I/SNR)^{-1}]_{kk} - 1`.
/// Diagonal entries of the inverse come from per-column Cholesky solves.
/// Analytically nonnegative; tiny negative values from cancellation are
/// clamped to zero and counted.
pub fn sinr_mmse(h: &UplinkChannel, ctx: &LinkBudgetContext) -> Result<CombinerOutput> {
    let n = h.n_ue();
    let snr = ctx.snr();
    let chol = cholesky_of_gram(h.matrix(), snr)?;
    let mut sinr = Vec::with_capacity(n);
    let mut clamps = 0usize;
    for k in 0..n {
        let mut e = DVector::<Complex64>::zeros(n);
        e[k] = Complex64::new(1.0, 0.0);
        let col = chol.solve(&e);
        let diag = col[k].re;
        let rho = snr / diag - 1.0;
        if rho < 0.0 {
            clamps += 1;
            sinr.push(0.0);
        } else {
            sinr.push(rho);
        }
    }
    Ok(CombinerOutput {
        combiner: CombinerKind::Mmse,
        sinr_per_user: sinr,
        negative_clamps: clamps,
    })
}

/// Per-user SINRs under identity combining: subarray `k` decodes user `k`
/// against the other users' signals arriving on its own row,
/// `rho_k = P|H_kk|^2 / (N_o B + P * sum_{j != k} |H_kj|^2)`.
pub fn sinr_sdma(h: &UplinkChannel, ctx: &LinkBudgetContext) -> Result<CombinerOutput> {
    let n = h.n_ue();
    let hm = h.matrix();
    let noise_w = ctx.noise_psd_w_per_hz() * ctx.bandwidth_hz();
    let p = ctx.p_tx_w();
    let mut sinr = Vec::with_capacity(n);
    for k in 0..n {
        let signal = p * hm[(k, k)].norm_sqr();
        let interference: f64 = (0..n)
            .filter(|&j| j != k)
            .map(|j| p * hm[(k, j)].norm_sqr())
            .sum();
        sinr.push(signal / (noise_w + interference));
    }
    Ok(CombinerOutput {
        combiner: CombinerKind::Identity,
        sinr_per_user: sinr,
        negative_clamps: 0,
    })
}

/// Shannon rates `B * log2(1 + rho)` per user, plus their sum.
pub fn achievable_rates(sinrs: &[f64], bandwidth_hz: f64) -> Result<(Vec<f64>, f64)> {
    if bandwidth_hz.is_nan() || bandwidth_hz <= 0.0 {
        return Err(Error::Domain(format!(
            "achievable_rates: bandwidth_hz ({bandwidth_hz}) must be > 0"
        )));
    }
    if sinrs.iter().any(|&s| s < 0.0 || !s.is_finite()) {
        return Err(Error::Domain(
            "achievable_rates: SINRs must be finite and nonnegative".into(),
        ));
    }
    let rates: Vec<f64> = sinrs
        .iter()
        .map(|&s| bandwidth_hz * (1.0 + s).log2())
        .collect();
    let sum = rates.iter().sum();
    Ok((rates, sum))
}
