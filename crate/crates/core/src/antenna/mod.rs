//! Planar-array electromagnetics: steering vectors, element patterns,
//! beam-coupling matrices, gains, and closed-form max-directivity weights.
//!
//! All types are immutable after construction and safe to share across
//! threads.

pub mod pattern;
pub mod quadrature;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
pub use pattern::{element_pattern_patch, ElementPattern, PatchDesign, PatchElement, PatternKind};
pub use quadrature::SphereQuadrature;

/// Relative Frobenius tolerance for the doubled-resolution convergence check
/// applied to every coupling matrix.
pub const QUADRATURE_CONVERGENCE_TOL: f64 = 1e-6;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// A uniform square planar array in its local x-y plane. Element spacing is
/// half a wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanarArrayGeometry {
    n_x: usize,
    n_y: usize,
}

impl PlanarArrayGeometry {
    pub fn new(n_x: usize, n_y: usize) -> Result<Self> {
        if n_x < 1 || n_y < 1 {
            return Err(Error::Config(format!(
                "array geometry: n_x ({n_x}) and n_y ({n_y}) must both be >= 1"
            )));
        }
        Ok(Self { n_x, n_y })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn n_elements(&self) -> usize {
        self.n_x * self.n_y
    }

    /// Element spacing in wavelengths (fixed at one half).
    pub fn spacing_wavelengths(&self) -> f64 {
        0.5
    }
}

/// A direction in an array's local frame: polar angle `theta` in `[0, pi]`
/// measured from boresight, azimuth `phi` normalized into `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bearing {
    theta: f64,
    phi: f64,
}

impl Bearing {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Domain(format!(
                "bearing angles must be finite (theta={theta}, phi={phi})"
            )));
        }
        // acos and friends can land a hair outside [0, pi]; snap those.
        let theta = if (-1e-12..=0.0).contains(&theta) {
            0.0
        } else if (std::f64::consts::PI..std::f64::consts::PI + 1e-12).contains(&theta) {
            std::f64::consts::PI
        } else {
            theta
        };
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Domain(format!(
                "bearing theta ({theta}) must lie in [0, pi]"
            )));
        }
        let mut phi = phi.rem_euclid(std::f64::consts::TAU);
        if phi == std::f64::consts::TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Analog weights across one array's elements. Stored unnormalized: every
/// downstream formula is invariant to a nonzero complex scale.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights(DVector<Complex64>);

impl BeamWeights {
    pub fn new(w: DVector<Complex64>) -> Result<Self> {
        if w.is_empty() || w.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::Domain(
                "beam weights must be a nonzero vector".into(),
            ));
        }
        if w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("beam weights must be finite".into()));
        }
        Ok(Self(w))
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Steering vector `a = a_x (x) a_y` of a half-wavelength planar array,
/// stored x-major: entry `m * n_y + n` belongs to element `(m, n)` and
/// equals `exp(+j*pi*(m*sin(theta)cos(phi) + n*sin(theta)sin(phi)))`.
///
/// The positive sign is the conjugation applied to the bracketed
/// `exp(-j...)` element lists that define `a_x` and `a_y`.
pub fn steering_vector(geom: &PlanarArrayGeometry, bearing: &Bearing) -> DVector<Complex64> {
    let k_spacing = std::f64::consts::TAU * geom.spacing_wavelengths();
    let sin_theta = bearing.theta().sin();
    let ux = k_spacing * sin_theta * bearing.phi().cos();
    let uy = k_spacing * sin_theta * bearing.phi().sin();
    let mut out = DVector::zeros(geom.n_elements());
    for m in 0..geom.n_x() {
        let px = m as f64 * ux;
        for n in 0..geom.n_y() {
            let phase = px + n as f64 * uy;
            out[m * geom.n_y() + n] = Complex64::new(phase.cos(), phase.sin());
        }
    }
    out
}

/// The beam-coupling matrix `Q`: the outer product of steering vectors
/// weighted by the element intensity, integrated over the sphere. Hermitian
/// positive definite, with every diagonal entry equal to the pattern's
/// integrated intensity.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    q: DMatrix<Complex64>,
    n_theta: usize,
    n_phi: usize,
}

impl CouplingMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.q
    }

    /// `(n_theta, n_phi)` of the quadrature grid that built this matrix.
    pub fn quadrature_resolution(&self) -> (usize, usize) {
        (self.n_theta, self.n_phi)
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// Integrated element intensity, i.e. the shared diagonal value.
    pub fn pattern_integral(&self) -> f64 {
        self.q[(0, 0)].re
    }
}

/// Accumulates the quadrature sum for `Q` at one resolution. Only the upper
/// triangle is summed; the lower is mirrored by conjugation, so the result
/// is Hermitian by construction.
fn coupling_sum(
    geom: &PlanarArrayGeometry,
    pattern: &ElementPattern,
    grid: &SphereQuadrature,
) -> DMatrix<Complex64> {
    let n = geom.n_elements();
    let mut q = DMatrix::<Complex64>::zeros(n, n);
    for node in grid.nodes() {
        let bearing = Bearing::new(node.theta, node.phi).expect("grid node in range");
        let f2 = pattern.intensity(&bearing);
        if f2 == 0.0 {
            continue;
        }
        let a = steering_vector(geom, &bearing);
        let s = node.weight * f2;
        for i in 0..n {
            for j in i..n {
                q[(i, j)] += a[i] * a[j].conj() * s;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            q[(i, j)] = q[(j, i)].conj();
        }
    }
    q
}

fn frobenius_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Builds the coupling matrix by deterministic product quadrature and
/// verifies it against a doubled-resolution grid. Fails with diagnostics if
/// the two disagree beyond [`QUADRATURE_CONVERGENCE_TOL`], or if the result
/// violates a coupling-matrix invariant.
pub fn coupling_matrix(
    geom: &PlanarArrayGeometry,
    pattern: &ElementPattern,
    resolution: (usize, usize),
) -> Result<CouplingMatrix> {
    let (n_theta, n_phi) = resolution;
    let grid = SphereQuadrature::new(n_theta, n_phi)?;
    let q = coupling_sum(geom, pattern, &grid);
    let fine_grid = SphereQuadrature::new(2 * n_theta, 2 * n_phi)?;
    let q_fine = coupling_sum(geom, pattern, &fine_grid);
    let diff = frobenius_norm(&(&q - &q_fine)) / frobenius_norm(&q_fine);
    if diff.is_nan() || diff >= QUADRATURE_CONVERGENCE_TOL {
        return Err(Error::Numerical(format!(
            "coupling matrix quadrature did not converge: relative Frobenius change \
             {diff:.3e} between ({n_theta}, {n_phi}) and doubled resolution exceeds \
             {QUADRATURE_CONVERGENCE_TOL:.0e}; raise quadrature.n_theta/n_phi"
        )));
    }
    let herm_err = (0..q.nrows())
        .flat_map(|i| (0..q.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| (q[(i, j)] - q[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    if herm_err > 1e-12 {
        return Err(Error::Numerical(format!(
            "coupling matrix is not Hermitian (max |Q_ij - conj(Q_ji)| = {herm_err:.3e})"
        )));
    }
    let diag: Vec<f64> = (0..q.nrows()).map(|i| q[(i, i)].re).collect();
    let dmax = diag.iter().cloned().fold(f64::MIN, f64::max);
    let dmin = diag.iter().cloned().fold(f64::MAX, f64::min);
    if dmin <= 0.0 || (dmax - dmin) / dmax > 1e-9 {
        return Err(Error::Numerical(format!(
            "coupling matrix diagonal should equal the pattern integral everywhere \
             (spread {:.3e} relative)",
            (dmax - dmin) / dmax
        )));
    }
    if nalgebra::linalg::Cholesky::new(q.clone()).is_none() {
        return Err(Error::Numerical(
            "coupling matrix is not positive definite".into(),
        ));
    }
    Ok(CouplingMatrix {
        q,
        n_theta,
        n_phi,
    })
}

/// Array gain along a bearing for given weights:
/// `|w* a|^2 / (w* Q w / 4*pi) * |F|^2`. Invariant to rescaling `w` and to a
/// common positive rescale of the pattern and `Q`.
pub fn gain(
    geom: &PlanarArrayGeometry,
    pattern: &ElementPattern,
    q: &CouplingMatrix,
    w: &BeamWeights,
    bearing: &Bearing,
) -> Result<f64> {
    if w.len() != q.dim() || q.dim() != geom.n_elements() {
        return Err(Error::Domain(format!(
            "gain: weight length {} and Q dimension {} must match the array's {} elements",
            w.len(),
            q.dim(),
            geom.n_elements()
        )));
    }
    let a = steering_vector(geom, bearing);
    let wv = w.vector();
    let numer = wv.dotc(&a).norm_sqr();
    let denom = wv.dotc(&(q.matrix() * wv)).re / FOUR_PI;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::Numerical(format!(
            "gain: radiated-power quadratic form w*Qw/4pi = {denom:.3e} must be positive"
        )));
    }
    Ok(numer / denom * pattern.intensity(bearing))
}

/// Weights maximizing the generalized Rayleigh quotient
/// `w* a(b) a(b)* w / (w* Q w)`. Because the numerator matrix is rank one,
/// the principal eigenvector of `Q^{-1} a a*` is simply `Q^{-1} a`, computed
/// here through a Cholesky factorization of `Q`.
pub fn max_directivity_weights(
    geom: &PlanarArrayGeometry,
    q: &CouplingMatrix,
    bearing: &Bearing,
) -> Result<BeamWeights> {
    let chol = nalgebra::linalg::Cholesky::new(q.matrix().clone()).ok_or_else(|| {
        Error::Numerical("max_directivity_weights: Q is numerically singular".into())
    })?;
    let a = steering_vector(geom, bearing);
    BeamWeights::new(chol.solve(&a))
}

/// An array design bundled with its precomputed coupling matrix and the
/// cached factorization used for weight solves. Immutable and `Sync`;
/// build once per campaign and share.
#[derive(Debug, Clone)]
pub struct ArrayDesign {
    geometry: PlanarArrayGeometry,
    pattern: ElementPattern,
    coupling: CouplingMatrix,
    chol: nalgebra::linalg::Cholesky<Complex64, nalgebra::Dyn>,
}

impl ArrayDesign {
    pub fn new(
        geometry: PlanarArrayGeometry,
        pattern: ElementPattern,
        quadrature_resolution: (usize, usize),
    ) -> Result<Self> {
        let coupling = coupling_matrix(&geometry, &pattern, quadrature_resolution)?;
        let chol = nalgebra::linalg::Cholesky::new(coupling.matrix().clone())
            .ok_or_else(|| Error::Numerical("coupling matrix is numerically singular".into()))?;
        Ok(Self {
            geometry,
            pattern,
            coupling,
            chol,
        })
    }

    pub fn geometry(&self) -> &PlanarArrayGeometry {
        &self.geometry
    }

    pub fn pattern(&self) -> &ElementPattern {
        &self.pattern
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn steering_vector(&self, bearing: &Bearing) -> DVector<Complex64> {
        steering_vector(&self.geometry, bearing)
    }

    pub fn gain(&self, w: &BeamWeights, bearing: &Bearing) -> Result<f64> {
        gain(&self.geometry, &self.pattern, &self.coupling, w, bearing)
    }

    pub fn max_directivity_weights(&self, bearing: &Bearing) -> Result<BeamWeights> {
        let a = self.steering_vector(bearing);
        BeamWeights::new(self.chol.solve(&a))
    }

    /// Generalized Rayleigh quotient `|w* a(b)|^2 / (w* Q w)`.
    pub fn rayleigh_quotient(&self, w: &BeamWeights, bearing: &Bearing) -> f64 {
        let a = self.steering_vector(bearing);
        let wv = w.vector();
        wv.dotc(&a).norm_sqr() / wv.dotc(&(self.coupling.matrix() * wv)).re
    }
}
