//! Radiant intensity patterns of a single array element.

use serde::{Deserialize, Serialize};

use crate::antenna::Bearing;
use crate::error::{Error, Result};
use crate::propagation::SPEED_OF_LIGHT_M_PER_S;

/// Which element pattern a scenario uses. The tag is what appears in
/// configuration files; [`PatternKind::build`] instantiates the evaluable
/// pattern for a given carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternKind {
    #[serde(rename = "isotropic")]
    Isotropic,
    #[serde(rename = "hemispheric-cosine")]
    HemisphericCosine,
    #[serde(rename = "patch-two-slot")]
    PatchTwoSlot,
}

impl PatternKind {
    /// Instantiates the pattern. The patch variant is designed at the
    /// carrier on the canonical substrate (`eps_r` 2.2, 1.588 mm).
    pub fn build(self, carrier_hz: f64) -> Result<ElementPattern> {
        match self {
            PatternKind::Isotropic => Ok(ElementPattern::Isotropic),
            PatternKind::HemisphericCosine => Ok(ElementPattern::HemisphericCosine),
            PatternKind::PatchTwoSlot => {
                element_pattern_patch(PatchDesign::canonical(carrier_hz))
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Isotropic => "isotropic",
            PatternKind::HemisphericCosine => "hemispheric-cosine",
            PatternKind::PatchTwoSlot => "patch-two-slot",
        }
    }
}

/// Substrate and resonance parameters for a rectangular microstrip patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchDesign {
    pub carrier_hz: f64,
    pub substrate_rel_permittivity: f64,
    pub substrate_height_m: f64,
}

impl PatchDesign {
    /// The canonical design: RT/duroid-class substrate, `eps_r` = 2.2,
    /// height 1.588 mm, resonant at the given carrier.
    pub fn canonical(carrier_hz: f64) -> Self {
        Self {
            carrier_hz,
            substrate_rel_permittivity: 2.2,
            substrate_height_m: 1.588e-3,
        }
    }
}

/// A rectangular patch sized by the transmission-line design procedure,
/// with the dimensions needed to evaluate its two-slot far field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchElement {
    pub width_m: f64,
    pub length_m: f64,
    pub effective_length_m: f64,
    pub effective_permittivity: f64,
    pub substrate_height_m: f64,
    pub wavelength_m: f64,
}

/// Radiant intensity `|F(theta, phi)|^2` of one radiator, evaluated in the
/// element's local frame (boresight at `theta = 0`).
///
/// Patterns are unnormalized: gain computations are invariant to a common
/// positive scale of `|F|^2` because the same factor enters the coupling
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementPattern {
    /// `|F|^2 = 1` everywhere.
    Isotropic,
    /// `|F|^2 = cos(theta)` on the boresight hemisphere, zero behind.
    HemisphericCosine,
    /// Two-slot cavity model of a rectangular microstrip patch over an
    /// infinite ground plane, zero behind the ground plane.
    PatchTwoSlot(PatchElement),
}

impl ElementPattern {
    /// Evaluates the radiant intensity along a bearing. Total: nonnegative
    /// and finite for every valid bearing.
    pub fn intensity(&self, bearing: &Bearing) -> f64 {
        let theta = bearing.theta();
        match self {
            ElementPattern::Isotropic => 1.0,
            ElementPattern::HemisphericCosine => {
                if theta <= std::f64::consts::FRAC_PI_2 {
                    theta.cos()
                } else {
                    0.0
                }
            }
            ElementPattern::PatchTwoSlot(p) => patch_intensity(p, theta, bearing.phi()),
        }
    }

    pub fn kind(&self) -> PatternKind {
        match self {
            ElementPattern::Isotropic => PatternKind::Isotropic,
            ElementPattern::HemisphericCosine => PatternKind::HemisphericCosine,
            ElementPattern::PatchTwoSlot(_) => PatternKind::PatchTwoSlot,
        }
    }
}

/// Sizes a rectangular patch with the standard transmission-line design
/// procedure and returns its two-slot intensity pattern.
///
/// Width `W = c/(2f) sqrt(2/(eps_r+1))`; the effective permittivity and the
/// fringing extension `dL` follow the usual closed forms, and the resonant
/// length is `L = c/(2 f sqrt(eps_eff)) - 2 dL`.
pub fn element_pattern_patch(design: PatchDesign) -> Result<ElementPattern> {
    if !design.carrier_hz.is_finite() || design.carrier_hz <= 0.0 {
        return Err(Error::Config(format!(
            "patch design: carrier_hz ({}) must be positive and finite",
            design.carrier_hz
        )));
    }
    if design.substrate_rel_permittivity.is_nan()
        || design.substrate_rel_permittivity < 1.0
    {
        return Err(Error::Config(format!(
            "patch design: substrate_rel_permittivity ({}) must be >= 1",
            design.substrate_rel_permittivity
        )));
    }
    if design.substrate_height_m.is_nan() || design.substrate_height_m <= 0.0 {
        return Err(Error::Config(format!(
            "patch design: substrate_height_m ({}) must be > 0",
            design.substrate_height_m
        )));
    }
    let f = design.carrier_hz;
    let eps_r = design.substrate_rel_permittivity;
    let h = design.substrate_height_m;
    let wavelength = SPEED_OF_LIGHT_M_PER_S / f;
    let width = SPEED_OF_LIGHT_M_PER_S / (2.0 * f) * (2.0 / (eps_r + 1.0)).sqrt();
    let eps_eff =
        0.5 * (eps_r + 1.0) + 0.5 * (eps_r - 1.0) / (1.0 + 12.0 * h / width).sqrt();
    let dl = 0.412 * h * (eps_eff + 0.3) * (width / h + 0.264)
        / ((eps_eff - 0.258) * (width / h + 0.8));
    let length = SPEED_OF_LIGHT_M_PER_S / (2.0 * f * eps_eff.sqrt()) - 2.0 * dl;
    if length <= 0.0 {
        return Err(Error::Config(format!(
            "patch design: resonant length came out non-positive ({length:.3e} m); \
             the substrate is too thick for a patch at {f:.3e} Hz"
        )));
    }
    Ok(ElementPattern::PatchTwoSlot(PatchElement {
        width_m: width,
        length_m: length,
        effective_length_m: length + 2.0 * dl,
        effective_permittivity: eps_eff,
        substrate_height_m: h,
        wavelength_m: wavelength,
    }))
}

/// Two-slot far-field intensity. The resonant length lies along local x, so
/// the slot pair contributes `cos((k Le/2) sin(theta) cos(phi))`; each slot
/// aperture contributes sinc factors over its width (local y) and height
/// (local z), and the y-directed equivalent magnetic currents give the
/// `1 - sin^2(theta) sin^2(phi)` polarization factor.
fn patch_intensity(p: &PatchElement, theta: f64, phi: f64) -> f64 {
    if theta > std::f64::consts::FRAC_PI_2 {
        return 0.0;
    }
    let k0 = std::f64::consts::TAU / p.wavelength_m;
    let sin_t = theta.sin();
    let slot_pair = (0.5 * k0 * p.effective_length_m * sin_t * phi.cos()).cos();
    let width_taper = sinc(0.5 * k0 * p.width_m * sin_t * phi.sin());
    let height_taper = sinc(0.5 * k0 * p.substrate_height_m * theta.cos());
    let polarization = 1.0 - (sin_t * phi.sin()).powi(2);
    let field = slot_pair * width_taper * height_taper;
    polarization * field * field
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-9 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::Bearing;
    use approx::assert_relative_eq;

    fn patch_60ghz() -> ElementPattern {
        element_pattern_patch(PatchDesign::canonical(60e9)).unwrap()
    }

    #[test]
    fn canonical_design_dimensions() {
        // Transmission-line design at 10 GHz on the canonical substrate:
        // W = 11.85 mm, L = 9.05 mm.
        let ElementPattern::PatchTwoSlot(p) =
            element_pattern_patch(PatchDesign::canonical(10e9)).unwrap()
        else {
            panic!("expected patch variant");
        };
        assert_relative_eq!(p.width_m, 11.8503e-3, max_relative = 1e-4);
        assert_relative_eq!(p.length_m, 9.0534e-3, max_relative = 1e-4);
        assert_relative_eq!(p.effective_permittivity, 1.9715, max_relative = 1e-4);
    }

    #[test]
    fn boresight_is_the_pattern_maximum() {
        for f in [38.5e9, 60e9, 68e9] {
            let pat = element_pattern_patch(PatchDesign::canonical(f)).unwrap();
            let peak = pat.intensity(&Bearing::new(0.0, 0.0).unwrap());
            for t in 1..=90 {
                for p in (0..360).step_by(3) {
                    let b = Bearing::new((t as f64).to_radians(), (p as f64).to_radians())
                        .unwrap();
                    assert!(
                        pat.intensity(&b) <= peak,
                        "f={f} theta={t} phi={p} exceeds boresight"
                    );
                }
            }
        }
    }

    #[test]
    fn back_hemisphere_is_dark() {
        let pat = patch_60ghz();
        let b = Bearing::new(3.0 * std::f64::consts::FRAC_PI_4, 1.0).unwrap();
        assert_eq!(pat.intensity(&b), 0.0);
        let c = Bearing::new(std::f64::consts::PI, 0.0).unwrap();
        assert_eq!(pat.intensity(&c), 0.0);
    }

    #[test]
    fn one_degree_grid_is_nonnegative_and_finite() {
        let pat = patch_60ghz();
        for t in 0..=180 {
            for p in 0..360 {
                let b =
                    Bearing::new((t as f64).to_radians(), (p as f64).to_radians()).unwrap();
                let v = pat.intensity(&b);
                assert!(v.is_finite() && v >= 0.0, "theta={t} phi={p} gave {v}");
            }
        }
    }

    #[test]
    fn invalid_substrates_are_rejected() {
        assert!(element_pattern_patch(PatchDesign {
            carrier_hz: 0.0,
            ..PatchDesign::canonical(60e9)
        })
        .is_err());
        assert!(element_pattern_patch(PatchDesign {
            substrate_rel_permittivity: 0.5,
            ..PatchDesign::canonical(60e9)
        })
        .is_err());
        assert!(element_pattern_patch(PatchDesign {
            substrate_height_m: -1.0,
            ..PatchDesign::canonical(60e9)
        })
        .is_err());
        // Thick substrate at a very high carrier leaves no room for the
        // resonant length.
        assert!(element_pattern_patch(PatchDesign::canonical(300e9)).is_err());
    }

    #[test]
    fn hemispheric_cosine_profile() {
        let pat = ElementPattern::HemisphericCosine;
        let b = Bearing::new(1.0, 2.0).unwrap();
        assert_relative_eq!(pat.intensity(&b), 1.0f64.cos());
        let back = Bearing::new(2.0, 0.0).unwrap();
        assert_eq!(pat.intensity(&back), 0.0);
    }
}
