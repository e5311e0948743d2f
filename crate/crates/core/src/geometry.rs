//! Random placement of users in the spherical-cone shell below the access
//! point, and conversion of a placement to the bearings seen by each end of
//! the link.
//!
//! Global frame: the AP sits at the origin and the +z axis points toward
//! decreasing altitude, so the users' shell `theta <= theta_max`,
//! `r_min <= r <= r_max` lies below the AP. The AP arrays are boresighted
//! along +z with local x/y parallel to global x/y. UE arrays are
//! boresighted along -z; with zero yaw their local x/y are also parallel to
//! global x/y, which puts the UE-frame azimuth of the return direction at
//! `phi + pi`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::antenna::Bearing;
use crate::error::{Error, Result};

/// The spherical-cone shell in which users are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellGeometry {
    r_min_m: f64,
    r_max_m: f64,
    theta_max_rad: f64,
}

impl ShellGeometry {
    pub fn new(r_min_m: f64, r_max_m: f64, theta_max_rad: f64) -> Result<Self> {
        if !r_min_m.is_finite() || r_min_m < 0.0 {
            return Err(Error::Config(format!(
                "shell.r_min_km ({}) must be finite and >= 0",
                r_min_m / 1000.0
            )));
        }
        if !r_max_m.is_finite() || r_max_m <= r_min_m {
            return Err(Error::Config(format!(
                "shell.r_min_km ({}) must be < shell.r_max_km ({})",
                r_min_m / 1000.0,
                r_max_m / 1000.0
            )));
        }
        if theta_max_rad.is_nan()
            || theta_max_rad <= 0.0
            || theta_max_rad > std::f64::consts::FRAC_PI_2
        {
            return Err(Error::Config(format!(
                "shell.theta_max_deg ({}) must lie in (0, 90]",
                theta_max_rad.to_degrees()
            )));
        }
        Ok(Self {
            r_min_m,
            r_max_m,
            theta_max_rad,
        })
    }

    pub fn r_min_m(&self) -> f64 {
        self.r_min_m
    }

    pub fn r_max_m(&self) -> f64 {
        self.r_max_m
    }

    pub fn theta_max_rad(&self) -> f64 {
        self.theta_max_rad
    }
}

/// One user's position in AP-centered spherical coordinates (+z downward).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UePlacement {
    pub r_m: f64,
    pub theta_rad: f64,
    pub phi_rad: f64,
}

/// The link directions in each array's own frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBearings {
    /// Direction AP -> UE in the AP subarray frame.
    pub ap: Bearing,
    /// Direction UE -> AP in the UE array frame.
    pub ue: Bearing,
}

/// How UE arrays are oriented about their boresight axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum YawMode {
    /// UE local x parallel to global x. Keeps the `theta_ue = theta_ap`
    /// symmetry exact.
    #[serde(rename = "zero")]
    Zero,
    /// Independent uniform yaw per UE, drawn from the trial stream.
    #[serde(rename = "random")]
    Random,
}

impl YawMode {
    pub fn as_str(self) -> &'static str {
        match self {
            YawMode::Zero => "zero",
            YawMode::Random => "random",
        }
    }
}

/// Draws one placement uniformly over the shell volume by inverse-CDF
/// transforms of three independent uniforms, consumed in the fixed order
/// `r`, `theta`, `phi`:
///
/// * `r = (u1*(r_max^3 - r_min^3) + r_min^3)^(1/3)`
/// * `theta = acos(1 - u2*(1 - cos(theta_max)))`
/// * `phi = 2*pi*u3`
///
/// A draw that lands exactly at `r = 0` (possible only when `r_min = 0` and
/// `u1 = 0`) is rejected and `u1` redrawn, since the path loss diverges
/// there.
pub fn sample_placement<R: Rng + ?Sized>(rng: &mut R, shell: &ShellGeometry) -> UePlacement {
    let r3_min = shell.r_min_m.powi(3);
    let r3_max = shell.r_max_m.powi(3);
    let r_m = loop {
        let u1: f64 = rng.gen();
        let r = (u1 * (r3_max - r3_min) + r3_min).cbrt();
        if r > 0.0 {
            break r;
        }
    };
    let u2: f64 = rng.gen();
    let theta_rad = (1.0 - u2 * (1.0 - shell.theta_max_rad.cos())).acos();
    let u3: f64 = rng.gen();
    let phi_rad = std::f64::consts::TAU * u3;
    UePlacement {
        r_m,
        theta_rad,
        phi_rad,
    }
}

/// Bearings for a zero-yaw UE.
pub fn link_bearings(p: &UePlacement) -> LinkBearings {
    link_bearings_yawed(p, 0.0)
}

/// Bearings with the UE array yawed by `ue_yaw_rad` about its boresight.
/// The AP sees the user at `(theta, phi)`; the UE sees the AP at the same
/// polar angle with azimuth `phi - yaw + pi`.
pub fn link_bearings_yawed(p: &UePlacement, ue_yaw_rad: f64) -> LinkBearings {
    let ap = Bearing::new(p.theta_rad, p.phi_rad).expect("placement angles in range");
    let ue = Bearing::new(
        p.theta_rad,
        (p.phi_rad - ue_yaw_rad + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU),
    )
    .expect("placement angles in range");
    LinkBearings { ap, ue }
}
