//! Assembly of the digital uplink channel matrix from placements, array
//! designs, beamforming weights, and the atmosphere.
//!
//! Entry `(i, k)` of the matrix couples AP subarray `i` to user `k`:
//!
//! ```text
//! H[i,k] = sqrt( RQ(w_i, a_ap(b_ap,k)) * RQ(f_k, a_ue(b_ue,k)) )
//!          * sqrt(L(r_k)) * lambda * |F_ap(b_ap,k) F_ue(b_ue,k)| * e^(j*beta_ik)
//! ```
//!
//! where `RQ` is the generalized Rayleigh quotient `|w*a|^2/(w*Qw)`,
//! subarray `i` steers its weights `w_i` at user `i`, and user `k` steers
//! its weights `f_k` at the AP. Columns are independent across users;
//! magnitudes agree with the gain/Friis route exactly because the `4*pi`
//! factors cancel.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::antenna::{ArrayDesign, BeamWeights};
use crate::error::{Error, Result};
use crate::geometry::{link_bearings_yawed, LinkBearings, UePlacement, YawMode};
use crate::propagation::{path_loss, AtmosphereConfig};

/// Small-scale state of one (subarray, user) link: a single uniform phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSmallScale {
    pub phase_rad: f64,
}

impl LinkSmallScale {
    /// Draws a phase uniformly from `[0, 2*pi)`.
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            phase_rad: std::f64::consts::TAU * rng.gen::<f64>(),
        }
    }
}

/// Per-user link metadata kept for diagnostics and reporting.
#[derive(Debug, Clone)]
pub struct LinkDiagnostics {
    pub range_m: f64,
    pub bearings: LinkBearings,
    /// Gain of the user's own subarray toward the user.
    pub ap_gain: f64,
    /// Gain of the user's array toward the AP.
    pub ue_gain: f64,
}

/// The uplink digital channel for one trial: an `n_ue x n_ue` complex
/// matrix (row = AP subarray, column = user) plus per-link metadata.
#[derive(Debug, Clone)]
pub struct UplinkChannel {
    h: DMatrix<Complex64>,
    carrier_wavelength_m: f64,
    links: Vec<LinkDiagnostics>,
}

impl UplinkChannel {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    pub fn n_ue(&self) -> usize {
        self.h.ncols()
    }

    pub fn carrier_wavelength_m(&self) -> f64 {
        self.carrier_wavelength_m
    }

    pub fn links(&self) -> &[LinkDiagnostics] {
        &self.links
    }

    /// Wraps an externally built matrix; used by receiver tests on
    /// synthetic channels.
    pub fn from_matrix(h: DMatrix<Complex64>, carrier_wavelength_m: f64) -> Result<Self> {
        if h.nrows() != h.ncols() || h.is_empty() {
            return Err(Error::Domain(format!(
                "uplink channel must be square and nonempty, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        if h.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("uplink channel entries must be finite".into()));
        }
        Ok(Self {
            h,
            carrier_wavelength_m,
            links: Vec::new(),
        })
    }
}

/// Large-scale amplitude `sqrt(G_rx * G_tx * L) * lambda / (4*pi)` for one
/// link. Total over nonnegative inputs.
pub fn large_scale_coefficient(g_rx: f64, g_tx: f64, loss: f64, wavelength_m: f64) -> f64 {
    (g_rx * g_tx * loss).sqrt() * wavelength_m / (4.0 * std::f64::consts::PI)
}

/// Builds the uplink channel, drawing per-UE yaws (in `Random` mode) and
/// the small-scale phases from `rng`.
///
/// Draw order is fixed for reproducibility: yaws for users `0..n` (random
/// mode only), then phases in row-major `(subarray, user)` order.
pub fn build_uplink_channel<R: Rng + ?Sized>(
    placements: &[UePlacement],
    ap_subarray: &ArrayDesign,
    ue_array: &ArrayDesign,
    atmosphere: &AtmosphereConfig,
    wavelength_m: f64,
    yaw_mode: YawMode,
    rng: &mut R,
) -> Result<UplinkChannel> {
    let n = placements.len();
    let yaws: Vec<f64> = match yaw_mode {
        YawMode::Zero => vec![0.0; n],
        YawMode::Random => (0..n)
            .map(|_| std::f64::consts::TAU * rng.gen::<f64>())
            .collect(),
    };
    let mut phases = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            phases[(i, k)] = LinkSmallScale::draw(rng).phase_rad;
        }
    }
    build_uplink_channel_with_phases(
        placements,
        &yaws,
        ap_subarray,
        ue_array,
        atmosphere,
        wavelength_m,
        &phases,
    )
}

/// Deterministic channel construction from explicit yaws and phases.
/// `phases[(i, k)]` is the small-scale phase between subarray `i` and user
/// `k`.
pub fn build_uplink_channel_with_phases(
    placements: &[UePlacement],
    ue_yaws_rad: &[f64],
    ap_subarray: &ArrayDesign,
    ue_array: &ArrayDesign,
    atmosphere: &AtmosphereConfig,
    wavelength_m: f64,
    phases: &DMatrix<f64>,
) -> Result<UplinkChannel> {
    let n = placements.len();
    if n == 0 {
        return Err(Error::Domain("channel needs at least one user".into()));
    }
    if ue_yaws_rad.len() != n || phases.nrows() != n || phases.ncols() != n {
        return Err(Error::Domain(format!(
            "channel inputs disagree on the user count: {} placements, {} yaws, {}x{} phases",
            n,
            ue_yaws_rad.len(),
            phases.nrows(),
            phases.ncols()
        )));
    }
    if wavelength_m.is_nan() || wavelength_m <= 0.0 {
        return Err(Error::Domain(format!(
            "carrier wavelength ({wavelength_m}) must be positive"
        )));
    }
    let gamma = atmosphere.total_gamma_db_per_km();

    let bearings: Vec<LinkBearings> = placements
        .iter()
        .zip(ue_yaws_rad)
        .map(|(p, yaw)| link_bearings_yawed(p, *yaw))
        .collect();

    // One subarray per user: subarray i steers at user i, user k at the AP.
    let ap_weights: Vec<BeamWeights> = bearings
        .iter()
        .map(|b| ap_subarray.max_directivity_weights(&b.ap))
        .collect::<Result<_>>()?;
    let ue_weights: Vec<BeamWeights> = bearings
        .iter()
        .map(|b| ue_array.max_directivity_weights(&b.ue))
        .collect::<Result<_>>()?;

    // Column-constant factors: UE-side Rayleigh quotient, loss, and the
    // element intensities at both ends.
    let mut column_amp = vec![0.0f64; n];
    for k in 0..n {
        let rq_ue = ue_array.rayleigh_quotient(&ue_weights[k], &bearings[k].ue);
        let loss = path_loss(placements[k].r_m, gamma)?;
        let f2 = ap_subarray.pattern().intensity(&bearings[k].ap)
            * ue_array.pattern().intensity(&bearings[k].ue);
        column_amp[k] = (rq_ue * loss * f2).sqrt() * wavelength_m;
    }

    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let rq_ap = ap_subarray.rayleigh_quotient(&ap_weights[i], &bearings[k].ap);
            let amp = rq_ap.sqrt() * column_amp[k];
            let beta = phases[(i, k)];
            h[(i, k)] = Complex64::new(amp * beta.cos(), amp * beta.sin());
        }
    }
    if h.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Numerical(
            "uplink channel produced non-finite entries".into(),
        ));
    }

    let links = (0..n)
        .map(|k| {
            Ok(LinkDiagnostics {
                range_m: placements[k].r_m,
                bearings: bearings[k],
                ap_gain: ap_subarray.gain(&ap_weights[k], &bearings[k].ap)?,
                ue_gain: ue_array.gain(&ue_weights[k], &bearings[k].ue)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(UplinkChannel {
        h,
        carrier_wavelength_m: wavelength_m,
        links,
    })
}
