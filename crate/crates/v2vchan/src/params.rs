//! Per-path delay and power marginals.
//!
//! Path delays combine the first-order geometric propagation time over both
//! hops with a slowly varying "virtual" delay that models the excess path
//! through the scattering volume. The virtual delay follows a mean-reverting
//! Gaussian AR(1) process (clamped at zero), parameterised by its long-run
//! mean, stationary standard deviation, and coherence time.
//!
//! Path powers follow a negative-exponential delay profile with lognormal
//! shadowing, normalised so that the per-frame powers sum to one.

use thiserror::Error;

use crate::geometry::{distance_linearized, ClusterGeometry, GeometryError, VelocityProfile};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failure modes of the delay/power layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("{name} = {value} violates `{invariant}`")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        invariant: &'static str,
    },
    /// The first-order geometry drove the total delay to zero or below; the
    /// scenario has left the model's validity region.
    #[error("total path delay {tau_s:.3e} s at t = {t} s violates `path delay is > 0`")]
    NonPositiveDelay { t: f64, tau_s: f64 },
    /// All path powers underflowed (or were otherwise non-normalisable).
    #[error("power normalization is degenerate: pre-normalisation sum = {sum:.3e}")]
    DegeneratePowers { sum: f64 },
    #[error("delays ({delays}) and shadowing draws ({shadows}) differ in length")]
    LengthMismatch { delays: usize, shadows: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn ensure(
    ok: bool,
    name: &'static str,
    value: f64,
    invariant: &'static str,
) -> Result<(), ParamsError> {
    if ok {
        Ok(())
    } else {
        Err(ParamsError::InvalidParameter {
            name,
            value,
            invariant,
        })
    }
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Parameters of the delay profile, shadowing, and the virtual-delay process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDelayParams {
    /// Delay scaling factor of the exponential power profile (> 1).
    pub r_tau: f64,
    /// Delay spread of the exponential power profile in seconds (> 0).
    pub sigma_tau_s: f64,
    /// Standard deviation of the lognormal shadowing term in dB (>= 0).
    pub shadow_sigma_db: f64,
    /// Initial (and long-run mean) virtual delay in seconds (>= 0).
    pub tau_virtual0_s: f64,
    /// Coherence time of the virtual-delay AR(1) process in seconds (> 0).
    pub coherence_time_s: f64,
    /// Stationary standard deviation of the virtual-delay process in
    /// seconds (>= 0).
    pub sigma_innov_s: f64,
}

impl PowerDelayParams {
    pub fn new(
        r_tau: f64,
        sigma_tau_s: f64,
        shadow_sigma_db: f64,
        tau_virtual0_s: f64,
        coherence_time_s: f64,
        sigma_innov_s: f64,
    ) -> Result<Self, ParamsError> {
        ensure(
            r_tau.is_finite() && r_tau > 1.0,
            "r_tau",
            r_tau,
            "delay scaling factor is > 1",
        )?;
        ensure(
            sigma_tau_s.is_finite() && sigma_tau_s > 0.0,
            "sigma_tau_s",
            sigma_tau_s,
            "delay spread is > 0",
        )?;
        ensure(
            shadow_sigma_db.is_finite() && shadow_sigma_db >= 0.0,
            "shadow_sigma_db",
            shadow_sigma_db,
            "shadowing deviation is >= 0",
        )?;
        ensure(
            tau_virtual0_s.is_finite() && tau_virtual0_s >= 0.0,
            "tau_virtual0_s",
            tau_virtual0_s,
            "initial virtual delay is >= 0",
        )?;
        ensure(
            coherence_time_s.is_finite() && coherence_time_s > 0.0,
            "coherence_time_s",
            coherence_time_s,
            "coherence time is > 0",
        )?;
        ensure(
            sigma_innov_s.is_finite() && sigma_innov_s >= 0.0,
            "sigma_innov_s",
            sigma_innov_s,
            "virtual-delay deviation is >= 0",
        )?;
        Ok(PowerDelayParams {
            r_tau,
            sigma_tau_s,
            shadow_sigma_db,
            tau_virtual0_s,
            coherence_time_s,
            sigma_innov_s,
        })
    }

    /// AR(1) filter coefficient `exp(-dt / coherence_time)` for a step of
    /// `dt` seconds.
    pub fn filter_coefficient(&self, dt: f64) -> f64 {
        (-dt / self.coherence_time_s).exp()
    }
}

/// Snapshot of one path's marginals at a frame instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    /// Total delay in seconds.
    pub tau_s: f64,
    /// Normalised path power.
    pub power: f64,
    /// Virtual-delay component in seconds.
    pub tau_virtual_s: f64,
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Total path delay at time `t`: the first-order ranges of both hops over the
/// speed of light, plus the current virtual delay.
pub fn delay_at(
    mt_cluster: &ClusterGeometry,
    mt_profile: &VelocityProfile,
    mr_cluster: &ClusterGeometry,
    mr_profile: &VelocityProfile,
    tau_virtual_s: f64,
    t: f64,
) -> Result<f64, ParamsError> {
    ensure(
        tau_virtual_s.is_finite() && tau_virtual_s >= 0.0,
        "tau_virtual_s",
        tau_virtual_s,
        "virtual delay is >= 0",
    )?;
    // surface time-domain violations through the geometry layer
    mt_profile.speed_at(t)?;
    mr_profile.speed_at(t)?;
    let geometric = distance_linearized(mt_cluster, mt_profile, t)
        + distance_linearized(mr_cluster, mr_profile, t);
    let tau = geometric / SPEED_OF_LIGHT + tau_virtual_s;
    if tau <= 0.0 {
        return Err(ParamsError::NonPositiveDelay { t, tau_s: tau });
    }
    Ok(tau)
}

/// Advances the virtual delay by one step of `dt` seconds using `noise`, a
/// standard-normal variate:
/// `τ' = ρ·τ + (1-ρ)·τ0 + σ·√(1-ρ²)·noise`, clamped at zero,
/// with `ρ = exp(-dt/T_c)`. The stationary law (ignoring the rare clamp) is
/// `N(τ0, σ²)` independent of the step size.
pub fn step_virtual_delay(
    tau_virtual_s: f64,
    params: &PowerDelayParams,
    dt: f64,
    noise: f64,
) -> Result<f64, ParamsError> {
    ensure(
        dt.is_finite() && dt > 0.0,
        "dt",
        dt,
        "step is finite and > 0",
    )?;
    ensure(noise.is_finite(), "noise", noise, "innovation is finite")?;
    ensure(
        tau_virtual_s.is_finite() && tau_virtual_s >= 0.0,
        "tau_virtual_s",
        tau_virtual_s,
        "virtual delay is >= 0",
    )?;
    let rho = params.filter_coefficient(dt);
    let next = rho * tau_virtual_s
        + (1.0 - rho) * params.tau_virtual0_s
        + params.sigma_innov_s * (1.0 - rho * rho).sqrt() * noise;
    Ok(next.max(0.0))
}

/// Normalised path powers for the given delays and per-path shadowing draws
/// (`shadow_db[n]` is a `N(0, shadow_sigma_db²)` variate):
/// `P'_n = exp(-τ_n·(r_τ-1)/(r_τ·σ_τ))·10^(-Z_n/10)`, `P_n = P'_n / Σ P'`.
pub fn path_powers(
    delays_s: &[f64],
    params: &PowerDelayParams,
    shadow_db: &[f64],
) -> Result<Vec<f64>, ParamsError> {
    if delays_s.len() != shadow_db.len() {
        return Err(ParamsError::LengthMismatch {
            delays: delays_s.len(),
            shadows: shadow_db.len(),
        });
    }
    if delays_s.is_empty() {
        return Err(ParamsError::InvalidParameter {
            name: "delays_s",
            value: 0.0,
            invariant: "at least one path is present",
        });
    }
    let slope = (params.r_tau - 1.0) / (params.r_tau * params.sigma_tau_s);
    let mut raw = Vec::with_capacity(delays_s.len());
    let mut sum = 0.0f64;
    for (&tau, &z) in delays_s.iter().zip(shadow_db) {
        let p = (-tau * slope).exp() * 10f64.powf(-z / 10.0);
        raw.push(p);
        sum += p;
    }
    if !sum.is_finite() || sum <= 0.0 {
        return Err(ParamsError::DegeneratePowers { sum });
    }
    for p in &mut raw {
        *p /= sum;
    }
    Ok(raw)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn params() -> PowerDelayParams {
        PowerDelayParams::new(2.0, 0.3e-6, 3.0, 100e-9, 5.0, 5e-9).unwrap()
    }

    fn symmetric_scene() -> (
        ClusterGeometry,
        VelocityProfile,
        ClusterGeometry,
        VelocityProfile,
    ) {
        (
            ClusterGeometry::new(50.0, FRAC_PI_4).unwrap(),
            VelocityProfile::new(10.0, 0.0, 0.0, 0.0).unwrap(),
            ClusterGeometry::new(50.0, 3.0 * FRAC_PI_4).unwrap(),
            VelocityProfile::new(10.0, 0.0, PI, 0.0).unwrap(),
        )
    }

    #[test]
    fn initial_delay_is_the_two_hop_time_of_flight_plus_virtual() {
        let (cmt, pmt, cmr, pmr) = symmetric_scene();
        let tau = delay_at(&cmt, &pmt, &cmr, &pmr, 100e-9, 0.0).unwrap();
        assert_relative_eq!(tau, 100.0 / SPEED_OF_LIGHT + 100e-9, max_relative = 1e-12);
    }

    #[test]
    fn delay_shrinks_while_closing_on_both_clusters() {
        let (cmt, pmt, cmr, pmr) = symmetric_scene();
        // Both terminals move with a positive radial speed component toward
        // their clusters (cos(π/4) = cos(3π/4 - π)), so the delay decreases
        // at 2·v0·cos(π/4)/c per second.
        let t0 = delay_at(&cmt, &pmt, &cmr, &pmr, 100e-9, 0.0).unwrap();
        let t1 = delay_at(&cmt, &pmt, &cmr, &pmr, 100e-9, 1.0).unwrap();
        let rate = 2.0 * 10.0 * FRAC_PI_4.cos() / SPEED_OF_LIGHT;
        assert_relative_eq!(t0 - t1, rate, max_relative = 1e-9);
    }

    #[test]
    fn vanishing_geometric_delay_is_a_model_violation() {
        // Head-on approach: the linearised two-hop range crosses zero at
        // t = 10 s; past that the delay would be non-physical.
        let cmt = ClusterGeometry::new(50.0, 0.0).unwrap();
        let pmt = VelocityProfile::new(10.0, 0.0, 0.0, 0.0).unwrap();
        let cmr = ClusterGeometry::new(50.0, 0.0).unwrap();
        let pmr = VelocityProfile::new(10.0, 0.0, 0.0, 0.0).unwrap();
        assert!(delay_at(&cmt, &pmt, &cmr, &pmr, 0.0, 4.9).is_ok());
        match delay_at(&cmt, &pmt, &cmr, &pmr, 0.0, 6.0) {
            Err(ParamsError::NonPositiveDelay { t, tau_s }) => {
                assert_eq!(t, 6.0);
                assert!(tau_s <= 0.0);
            }
            other => panic!("expected NonPositiveDelay, got {other:?}"),
        }
    }

    #[test]
    fn filter_coefficient_decays_with_the_step() {
        let p = params();
        assert_relative_eq!(p.filter_coefficient(5.0), (-1.0f64).exp());
        assert_relative_eq!(p.filter_coefficient(0.0), 1.0);
        assert!(p.filter_coefficient(50.0) < 1e-4);
    }

    #[test]
    fn virtual_delay_reverts_to_the_long_run_mean() {
        let p = params();
        // noise-free stepping from zero approaches τ0 geometrically
        let mut tau = 0.0;
        for _ in 0..200 {
            tau = step_virtual_delay(tau, &p, 5.0, 0.0).unwrap();
        }
        assert_relative_eq!(tau, 100e-9, max_relative = 1e-10);
    }

    #[test]
    fn virtual_delay_matches_its_stationary_law() {
        // With dt = T_c the chain decorrelates quickly; the sample mean and
        // variance over a long run must match N(τ0, σ²).
        let p = params();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut tau = p.tau_virtual0_s;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let n = 50_000;
        for _ in 0..n {
            let noise: f64 = rng.sample(StandardNormal);
            tau = step_virtual_delay(tau, &p, p.coherence_time_s, noise).unwrap();
            sum += tau;
            sum_sq += tau * tau;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert_relative_eq!(mean, 100e-9, max_relative = 0.01);
        assert_relative_eq!(var.sqrt(), 5e-9, max_relative = 0.05);
    }

    #[test]
    fn virtual_delay_is_clamped_at_zero() {
        let p = params();
        let tau = step_virtual_delay(1e-9, &p, 5.0, -1e6).unwrap();
        assert_eq!(tau, 0.0);
    }

    #[test]
    fn equal_delays_share_power_equally_and_sum_to_one() {
        let p = params();
        let powers = path_powers(&[400e-9; 5], &p, &[0.0; 5]).unwrap();
        for w in &powers {
            assert_relative_eq!(*w, 0.2, max_relative = 1e-12);
        }
        let total: f64 = powers.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn longer_delays_get_less_power_without_shadowing() {
        let p = params();
        let delays = [100e-9, 300e-9, 700e-9, 1500e-9];
        let powers = path_powers(&delays, &p, &[0.0; 4]).unwrap();
        for w in powers.windows(2) {
            assert!(w[0] > w[1]);
        }
        // explicit ratio: P1/P2 = exp((τ2-τ1)(r-1)/(r σ))
        let expected = ((300e-9_f64 - 100e-9) * (2.0 - 1.0) / (2.0 * 0.3e-6)).exp();
        assert_relative_eq!(powers[0] / powers[1], expected, max_relative = 1e-12);
    }

    #[test]
    fn shadowing_tilts_the_power_split() {
        let p = params();
        // +10 dB shadowing on path 0 => its raw power is 10x smaller
        let powers = path_powers(&[400e-9, 400e-9], &p, &[10.0, 0.0]).unwrap();
        assert_relative_eq!(powers[1] / powers[0], 10.0, max_relative = 1e-12);
    }

    #[test]
    fn underflowed_profiles_are_reported_as_degenerate() {
        let p = params();
        match path_powers(&[10.0, 20.0], &p, &[0.0, 0.0]) {
            Err(ParamsError::DegeneratePowers { sum }) => assert_eq!(sum, 0.0),
            other => panic!("expected DegeneratePowers, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_lengths_and_bad_parameters_are_rejected() {
        let p = params();
        assert!(matches!(
            path_powers(&[1e-9, 2e-9], &p, &[0.0]),
            Err(ParamsError::LengthMismatch {
                delays: 2,
                shadows: 1
            })
        ));
        assert!(matches!(
            path_powers(&[], &p, &[]),
            Err(ParamsError::InvalidParameter { .. })
        ));
        assert!(matches!(
            PowerDelayParams::new(1.0, 0.3e-6, 3.0, 0.0, 5.0, 5e-9),
            Err(ParamsError::InvalidParameter { name: "r_tau", .. })
        ));
        assert!(PowerDelayParams::new(2.0, 0.0, 3.0, 0.0, 5.0, 5e-9).is_err());
        assert!(PowerDelayParams::new(2.0, 0.3e-6, -1.0, 0.0, 5.0, 5e-9).is_err());
        assert!(PowerDelayParams::new(2.0, 0.3e-6, 3.0, -1e-9, 5.0, 5e-9).is_err());
        assert!(PowerDelayParams::new(2.0, 0.3e-6, 3.0, 0.0, 0.0, 5e-9).is_err());
        assert!(PowerDelayParams::new(2.0, 0.3e-6, 3.0, 0.0, 5.0, -5e-9).is_err());
        let q = params();
        assert!(step_virtual_delay(0.0, &q, 0.0, 0.0).is_err());
        assert!(step_virtual_delay(0.0, &q, 1.0, f64::NAN).is_err());
        assert!(step_virtual_delay(-1e-9, &q, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn powers_always_normalise(
            d1 in 1e-9..2e-6f64,
            d2 in 1e-9..2e-6f64,
            d3 in 1e-9..2e-6f64,
            z1 in -9.0..9.0f64,
            z2 in -9.0..9.0f64,
            z3 in -9.0..9.0f64,
        ) {
            let p = params();
            let powers = path_powers(&[d1, d2, d3], &p, &[z1, z2, z3]).unwrap();
            let total: f64 = powers.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            for w in powers {
                prop_assert!(w > 0.0 && w <= 1.0);
            }
        }

        #[test]
        fn virtual_delay_stays_non_negative(
            start in 0.0..500e-9f64,
            noise in -20.0..20.0f64,
            dt in 1e-4..10.0f64,
        ) {
            let p = params();
            let tau = step_virtual_delay(start, &p, dt, noise).unwrap();
            prop_assert!(tau >= 0.0);
            prop_assert!(tau.is_finite());
        }
    }
}
