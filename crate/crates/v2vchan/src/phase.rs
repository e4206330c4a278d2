//! Per-ray carrier phase as a cubic polynomial in time.
//!
//! With linearly varying speed and heading on both link ends, the phase a ray
//! accumulates along the trajectory is, to second order in the ray-angle
//! drift, a cubic polynomial `Φ(t) = A·t³ + B·t² + C·t + D`. Each side
//! contributes additively to `A`, `B`, `C` (its motion) and to `D` (the
//! projection of its antenna-element offset onto the ray direction). The
//! angle-drift Taylor coefficients `k0`, `k1`, `k2` encode how the ray angle
//! and its axis projections rotate as the terminal moves past the cluster.

use thiserror::Error;

use crate::geometry::{GeometryError, Vec2, VelocityProfile};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failure modes of the phase layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("range = {range_m} m violates `terminal-to-cluster range is finite and > 0`")]
    NonPositiveRange { range_m: f64 },
    #[error("lambda = {lambda_m} m violates `carrier wavelength is finite and > 0`")]
    NonPositiveWavelength { lambda_m: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn check_range(range_m: f64) -> Result<(), PhaseError> {
    if range_m.is_finite() && range_m > 0.0 {
        Ok(())
    } else {
        Err(PhaseError::NonPositiveRange { range_m })
    }
}

fn check_lambda(lambda_m: f64) -> Result<(), PhaseError> {
    if lambda_m.is_finite() && lambda_m > 0.0 {
        Ok(())
    } else {
        Err(PhaseError::NonPositiveWavelength { lambda_m })
    }
}

// ---------------------------------------------------------------------------
// Taylor coefficients of the ray-angle drift
// ---------------------------------------------------------------------------

/// First-order drift coefficients of one ray on one side.
///
/// * `k0`: rate of change of the ray angle itself;
/// * `k1`, `k2`: rates of change of the ray's x- and y-axis direction
///   cosines, used to project antenna offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoefficients {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
}

impl TaylorCoefficients {
    /// All coefficients of a ray at absolute angle `ray_angle` seen at range
    /// `range_m` by a terminal moving with `profile`.
    pub fn for_ray(
        profile: &VelocityProfile,
        range_m: f64,
        ray_angle: f64,
    ) -> Result<Self, PhaseError> {
        let k0 = taylor_k0(profile, range_m, ray_angle)?;
        let (k1, k2) = taylor_k12(profile, range_m, ray_angle)?;
        Ok(TaylorCoefficients { k0, k1, k2 })
    }
}

/// Drift rate of the ray angle:
/// `k0 = -v0·sin²(α - α_v)/d + b0·sin(α - α_v)`.
///
/// The first term is the apparent rotation of a static scatterer past a
/// moving observer; the second is the rotation of the ray relative to the
/// turning velocity vector.
pub fn taylor_k0(
    profile: &VelocityProfile,
    range_m: f64,
    ray_angle: f64,
) -> Result<f64, PhaseError> {
    check_range(range_m)?;
    let rel = (ray_angle - profile.alpha_v).sin();
    Ok(-profile.v0 * rel * rel / range_m + profile.b0 * rel)
}

/// Drift rates of the ray's axis projections:
/// `k1 = -(v0/d)·sin²α + b0·sin α` and `k2 = -(v0/d)·cos²α + b0·cos α`.
pub fn taylor_k12(
    profile: &VelocityProfile,
    range_m: f64,
    ray_angle: f64,
) -> Result<(f64, f64), PhaseError> {
    check_range(range_m)?;
    let (s, c) = ray_angle.sin_cos();
    let k1 = -profile.v0 * s * s / range_m + profile.b0 * s;
    let k2 = -profile.v0 * c * c / range_m + profile.b0 * c;
    Ok((k1, k2))
}

/// Instantaneous Doppler shift, in Hz, of a single-side ray:
/// `f(t) = v(t)·[cos(α - α_v) + k0·t] / λ`.
pub fn doppler_at(
    profile: &VelocityProfile,
    range_m: f64,
    ray_angle: f64,
    lambda_m: f64,
    t: f64,
) -> Result<f64, PhaseError> {
    check_lambda(lambda_m)?;
    let k0 = taylor_k0(profile, range_m, ray_angle)?;
    let v = profile.speed_at(t)?;
    Ok(v * ((ray_angle - profile.alpha_v).cos() + k0 * t) / lambda_m)
}

// ---------------------------------------------------------------------------
// Phase polynomial
// ---------------------------------------------------------------------------

/// One side's contribution to a ray: the terminal motion, the range to the
/// side's cluster, and the ray angle (departure or arrival) on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideMotion {
    pub profile: VelocityProfile,
    pub range_m: f64,
    pub ray_angle: f64,
}

/// The cubic carrier phase `Φ(t) = cubic·t³ + quadratic·t² + linear·t +
/// constant` of one ray between one transmit and one receive element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePolynomial {
    pub cubic: f64,
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
}

impl PhasePolynomial {
    /// Phase in radians at time `t`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        ((self.cubic * t + self.quadratic) * t + self.linear) * t + self.constant
    }

    /// Instantaneous frequency `Φ'(t)/2π` in Hz.
    #[inline]
    pub fn doppler_hz(&self, t: f64) -> f64 {
        ((3.0 * self.cubic * t + 2.0 * self.quadratic) * t + self.linear) / std::f64::consts::TAU
    }
}

/// Builds the cubic phase of one ray for a given pair of antenna-element
/// offsets (`antenna_mt` on the transmit side, `antenna_mr` on the receive
/// side, both in the respective terminal frame).
///
/// Both sides contribute additively:
///
/// * `cubic     = Σ (2π/3λ)·a0·k0`
/// * `quadratic = Σ (π/λ)·(a0·cos(α-α_v) + v0·k0)`
/// * `linear    = Σ (2π/λ)·(v0·cos(α-α_v) + k1·dx + k2·dy)`
/// * `constant  = Σ (2π/λ)·(cos(α)·dx + sin(α)·dy)`
///
/// With both terminals static, all motion terms vanish and only the constant
/// element-offset phase remains.
pub fn build_phase_polynomial(
    mt: &SideMotion,
    mr: &SideMotion,
    antenna_mt: Vec2,
    antenna_mr: Vec2,
    lambda_m: f64,
) -> Result<PhasePolynomial, PhaseError> {
    check_lambda(lambda_m)?;
    let k = std::f64::consts::TAU / lambda_m;

    let mut poly = PhasePolynomial {
        cubic: 0.0,
        quadratic: 0.0,
        linear: 0.0,
        constant: 0.0,
    };
    for (side, offset) in [(mt, antenna_mt), (mr, antenna_mr)] {
        let coeffs = TaylorCoefficients::for_ray(&side.profile, side.range_m, side.ray_angle)?;
        let (sin_abs, cos_abs) = side.ray_angle.sin_cos();
        let cos_rel = (side.ray_angle - side.profile.alpha_v).cos();
        let p = &side.profile;
        poly.cubic += k / 3.0 * p.a0 * coeffs.k0;
        poly.quadratic += 0.5 * k * (p.a0 * cos_rel + p.v0 * coeffs.k0);
        poly.linear += k * (p.v0 * cos_rel + coeffs.k1 * offset.x + coeffs.k2 * offset.y);
        poly.constant += k * (cos_abs * offset.x + sin_abs * offset.y);
    }
    Ok(poly)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
