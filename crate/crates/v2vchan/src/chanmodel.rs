//! Channel impulse-response generation.
//!
//! A simulation run is described by a [`SimulationConfig`]: carrier, sampling,
//! the two terminals (motion profile + antenna array), the per-path cluster
//! geometry, the angular concentrations, and the power/delay parameters.
//! [`generate_cir`] turns a validated configuration into a [`CirStream`] that
//! yields one [`CirFrame`] per sample instant.
//!
//! Per frame, each path carries a complex gain for every transmit/receive
//! element pair, a total delay, and a normalised power. The gain of a path is
//! a sum over `M` rays whose carrier phases follow cubic polynomials in
//! absolute time, so the fading statistics drift as the terminals accelerate
//! and turn; the rays themselves (angles and initial phases) are drawn once
//! per run from deterministic per-ray streams. Path delays combine the
//! first-order geometric ranges with a mean-reverting virtual-delay process,
//! and path powers follow an exponential delay profile with per-path
//! lognormal shadowing, renormalised to unit total power every frame.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::angles::{build_rayset, AngleDistribution, AnglesError, PathAngleSpec};
use crate::geometry::{wrap_angle, AntennaArray, ClusterGeometry, GeometryError, VelocityProfile};
use crate::params::{
    delay_at, path_powers, step_virtual_delay, ParamsError, PowerDelayParams, SPEED_OF_LIGHT,
};
use crate::phase::{build_phase_polynomial, PhaseError, PhasePolynomial, SideMotion};
use crate::rng::{derived_rng, StreamClass, MAX_PATHS, MAX_RAYS};
use crate::stats::MAX_KAPPA;

/// Default oversampling applied to the worst-case Doppler shift when no
/// explicit sample rate is configured.
pub const OVERSAMPLING_FACTOR: f64 = 16.0;

/// Lower bound on the derived sample rate, so near-static scenes still
/// produce a usable time grid.
pub const MIN_SAMPLE_RATE_HZ: f64 = 100.0;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Rejected configurations, with the violated invariant spelled out.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} = {value} violates `{invariant}`")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        invariant: &'static str,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// Failure modes of channel generation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Angles(#[from] AnglesError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

fn ensure(
    ok: bool,
    name: &'static str,
    value: f64,
    invariant: &'static str,
) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::InvalidParameter {
            name,
            value,
            invariant,
        })
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// One link end: its motion profile and its antenna array. Array element
/// offsets are expressed in the terminal's own frame, relative to the
/// reference element.
#[derive(Debug, Clone, PartialEq)]
pub struct Terminal {
    pub velocity: VelocityProfile,
    pub array: AntennaArray,
}

/// The effective scatterer cluster of one path, seen from each link end.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGeometry {
    pub mt: ClusterGeometry,
    pub mr: ClusterGeometry,
}

/// Full description of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Carrier frequency in Hz.
    pub carrier_freq_hz: f64,
    /// Output sample rate in Hz; `None` derives one from the worst-case
    /// Doppler shift (see [`OVERSAMPLING_FACTOR`] / [`MIN_SAMPLE_RATE_HZ`]).
    pub sample_rate_hz: Option<f64>,
    /// Run length in seconds.
    pub duration_s: f64,
    /// Rays summed per path.
    pub rays_per_path: usize,
    /// Master seed; every random stream in the run derives from it.
    pub seed: u64,
    /// How [`CirFrame::narrowband`] weighs each path's unit-power ray sum:
    /// `true` applies the normalised power itself as the amplitude factor
    /// (`P·h̃`, the model's stated composition, and the default), `false`
    /// applies its square root (`√P·h̃`, the conventional reading under
    /// which the combined gain has unit mean power). Per-path gains and
    /// powers are always emitted separately, so no information depends on
    /// this switch.
    pub power_as_amplitude: bool,
    /// Angular concentration of the departure rays.
    pub kappa_mt: f64,
    /// Angular concentration of the arrival rays.
    pub kappa_mr: f64,
    /// Transmitting terminal.
    pub mt: Terminal,
    /// Receiving terminal.
    pub mr: Terminal,
    /// Per-path cluster geometry; the length of this list is the number of
    /// resolvable paths.
    pub clusters: Vec<PathGeometry>,
    /// Delay-profile, shadowing, and virtual-delay parameters.
    pub power_delay: PowerDelayParams,
}

impl SimulationConfig {
    /// Checks the cross-field invariants that the individually validated
    /// components cannot express: positive carrier and duration, ray/path
    /// counts within the stream-id layout, concentrations inside the Bessel
    /// range, speeds that stay non-negative over the run, and geometric
    /// delays that stay positive through the final frame.
    pub fn validate(&self) -> Result<(), ConfigError> {
        ensure(
            self.carrier_freq_hz.is_finite() && self.carrier_freq_hz > 0.0,
            "carrier_freq_hz",
            self.carrier_freq_hz,
            "carrier frequency is finite and > 0",
        )?;
        ensure(
            self.duration_s.is_finite() && self.duration_s > 0.0,
            "duration_s",
            self.duration_s,
            "duration is finite and > 0",
        )?;
        if let Some(fs) = self.sample_rate_hz {
            ensure(
                fs.is_finite() && fs > 0.0,
                "sample_rate_hz",
                fs,
                "sample rate is finite and > 0",
            )?;
        }
        ensure(
            self.rays_per_path >= 1 && self.rays_per_path <= MAX_RAYS as usize,
            "rays_per_path",
            self.rays_per_path as f64,
            "1 <= rays_per_path <= 2^24",
        )?;
        ensure(
            !self.clusters.is_empty() && self.clusters.len() <= MAX_PATHS as usize,
            "clusters",
            self.clusters.len() as f64,
            "1 <= path count <= 2^16",
        )?;
        for (name, kappa) in [("kappa_mt", self.kappa_mt), ("kappa_mr", self.kappa_mr)] {
            ensure(
                kappa.is_finite() && (0.0..MAX_KAPPA).contains(&kappa),
                name,
                kappa,
                "concentration is finite, >= 0, and below the Bessel overflow guard",
            )?;
        }
        // speeds must not reverse inside the run
        self.mt.velocity.speed_at(self.duration_s)?;
        self.mr.velocity.speed_at(self.duration_s)?;
        // the geometric part of each delay is linear in t, so positive
        // endpoints keep every interior frame positive even if the
        // virtual-delay process is clamped to zero
        for pair in &self.clusters {
            delay_at(
                &pair.mt,
                &self.mt.velocity,
                &pair.mr,
                &self.mr.velocity,
                0.0,
                self.duration_s,
            )?;
        }
        Ok(())
    }

    /// Carrier wavelength in metres.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    /// Worst-case Doppler magnitude over the run: the two peak terminal
    /// speeds (attained at an endpoint of the run, since the ramps are
    /// linear) divided by the wavelength.
    pub fn max_doppler_hz(&self) -> f64 {
        let peak = |p: &VelocityProfile| p.v0.max(p.v0 + p.a0 * self.duration_s);
        (peak(&self.mt.velocity) + peak(&self.mr.velocity)) / self.wavelength_m()
    }

    /// The sample rate actually used: the configured one, or
    /// `OVERSAMPLING_FACTOR x` the worst-case Doppler, floored at
    /// [`MIN_SAMPLE_RATE_HZ`].
    pub fn effective_sample_rate_hz(&self) -> f64 {
        match self.sample_rate_hz {
            Some(fs) => fs,
            None => (OVERSAMPLING_FACTOR * self.max_doppler_hz()).max(MIN_SAMPLE_RATE_HZ),
        }
    }

    /// Number of frames in the run: one at `t = 0` plus one per full sample
    /// interval that fits in the duration.
    pub fn frame_count(&self) -> usize {
        (self.duration_s * self.effective_sample_rate_hz()).floor() as usize + 1
    }
}

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// One path's contribution at one sample instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFrame {
    /// Unit-mean-power ray sums (every ray contributes with modulus exactly
    /// `1/√M`), one per element pair, laid out transmit-major:
    /// `gains[p * mr_elements + q]`.
    pub gains: Vec<Complex64>,
    /// Total path delay in seconds.
    pub delay_s: f64,
    /// Normalised path power (the per-frame powers sum to 1).
    pub power: f64,
}

/// The channel at one sample instant.
#[derive(Debug, Clone, PartialEq)]
pub struct CirFrame {
    /// Sample time in seconds.
    pub t: f64,
    /// Transmit element count (gain-layout stride information).
    pub mt_elements: usize,
    /// Receive element count.
    pub mr_elements: usize,
    /// The configured narrowband weighting (see
    /// [`SimulationConfig::power_as_amplitude`]).
    pub power_as_amplitude: bool,
    /// Per-path frames, in configured path order.
    pub paths: Vec<PathFrame>,
}

impl CirFrame {
    /// Gain of path `path` between transmit element `p` and receive element
    /// `q`. Panics if any index is out of range, like slice indexing.
    pub fn gain(&self, path: usize, p: usize, q: usize) -> Complex64 {
        assert!(p < self.mt_elements && q < self.mr_elements);
        self.paths[path].gains[p * self.mr_elements + q]
    }

    /// Narrowband channel between one element pair: the sum of the path
    /// gains, each weighted by `power` or `sqrt(power)` according to the
    /// configured composition.
    pub fn narrowband(&self, p: usize, q: usize) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for path in &self.paths {
            let w = if self.power_as_amplitude {
                path.power
            } else {
                path.power.sqrt()
            };
            sum += path.gains[p * self.mr_elements + q] * w;
        }
        sum
    }
}

/// Sum of `M` unit-modulus rays, `M^{-1/2}·Σ_m exp(i(Φ_m(t) + θ_m))`, from
/// the rays' phase polynomials and initial phases.
///
/// This evaluates each phase directly at `t`. The frame generator instead
/// advances the same cubic phases by exact forward differences (see
/// [`CirStream`]); the two agree to the floating-point noise floor of the
/// accumulated phase, which the generator's tests pin down.
pub fn gain_at(polys: &[PhasePolynomial], initial_phases: &[f64], t: f64) -> Complex64 {
    debug_assert_eq!(polys.len(), initial_phases.len());
    if polys.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for (poly, theta) in polys.iter().zip(initial_phases) {
        let (s, c) = (poly.eval(t) + theta).sin_cos();
        re += c;
        im += s;
    }
    let norm = 1.0 / (polys.len() as f64).sqrt();
    Complex64::new(re * norm, im * norm)
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Streaming generator over the frames of one run.
///
/// All random draws are fixed up front (ray angles, initial phases, per-path
/// shadowing) or advanced deterministically per frame from dedicated streams
/// (virtual-delay innovations); iterating is therefore reproducible
/// bit-for-bit for a given configuration.
///
/// Each ray's cubic carrier phase is advanced across the uniform time grid
/// by forward differences — exact for polynomials — and wrapped back into
/// `(-π, π]` every frame. The wrap keeps every trigonometric argument in the
/// fast small-argument range, and costs nothing in accuracy: directly
/// evaluating a cubic at late times carries the same `|Φ|·ε` phase noise
/// that the accumulated differences do.
#[derive(Debug, Clone)]
pub struct CirStream {
    fs_hz: f64,
    frame_count: usize,
    next_frame: usize,
    rays_per_path: usize,
    mt_elements: usize,
    mr_elements: usize,
    power_as_amplitude: bool,
    mt_velocity: VelocityProfile,
    mr_velocity: VelocityProfile,
    clusters: Vec<PathGeometry>,
    power_delay: PowerDelayParams,
    /// Wrapped per-ray phases `Φ_m(t_k) + θ_m` at the current frame, laid
    /// out `[path][element pair][ray]`.
    phi: Vec<f64>,
    /// First forward differences `Φ(t_{k+1}) - Φ(t_k)` per ray.
    dphi: Vec<f64>,
    /// Second forward differences per ray.
    ddphi: Vec<f64>,
    /// Third forward differences per ray (constant for a cubic).
    dddphi: Vec<f64>,
    shadows_db: Vec<f64>,
    innovation_rngs: Vec<ChaCha8Rng>,
    tau_virtual_s: Vec<f64>,
}

impl CirStream {
    /// Sample rate of the emitted frames in Hz.
    pub fn sample_rate_hz(&self) -> f64 {
        self.fs_hz
    }

    /// Total number of frames this stream will emit.
    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    fn emit(&mut self, frame: usize) -> Result<CirFrame, ModelError> {
        let t = frame as f64 / self.fs_hz;
        let n_paths = self.clusters.len();
        if frame > 0 {
            let dt = 1.0 / self.fs_hz;
            for n in 0..n_paths {
                let noise: f64 = self.innovation_rngs[n].sample(StandardNormal);
                self.tau_virtual_s[n] =
                    step_virtual_delay(self.tau_virtual_s[n], &self.power_delay, dt, noise)?;
            }
        }
        let mut delays = Vec::with_capacity(n_paths);
        for (n, pair) in self.clusters.iter().enumerate() {
            delays.push(delay_at(
                &pair.mt,
                &self.mt_velocity,
                &pair.mr,
                &self.mr_velocity,
                self.tau_virtual_s[n],
                t,
            )?);
        }
        let powers = path_powers(&delays, &self.power_delay, &self.shadows_db)?;
        let pairs = self.mt_elements * self.mr_elements;
        let m = self.rays_per_path;
        let norm = 1.0 / (m as f64).sqrt();
        let mut paths = Vec::with_capacity(n_paths);
        for n in 0..n_paths {
            let base = n * pairs * m;
            let mut gains = Vec::with_capacity(pairs);
            for pair in 0..pairs {
                let lo = base + pair * m;
                let (mut re, mut im) = (0.0, 0.0);
                for &phase in &self.phi[lo..lo + m] {
                    let (s, c) = phase.sin_cos();
                    re += c;
                    im += s;
                }
                gains.push(Complex64::new(re * norm, im * norm));
            }
            paths.push(PathFrame {
                gains,
                delay_s: delays[n],
                power: powers[n],
            });
        }
        self.advance_phases();
        Ok(CirFrame {
            t,
            mt_elements: self.mt_elements,
            mr_elements: self.mr_elements,
            power_as_amplitude: self.power_as_amplitude,
            paths,
        })
    }

    /// Steps every ray's phase to the next frame: `Φ += ΔΦ`, then the
    /// difference chain `ΔΦ += Δ²Φ`, `Δ²Φ += Δ³Φ`. The phase is re-wrapped
    /// into `(-π, π]`; the branchy fast path covers any per-frame step below
    /// a full half-turn, with a general wrap as fallback.
    fn advance_phases(&mut self) {
        use std::f64::consts::{PI, TAU};
        let steps = self.dphi.iter_mut().zip(self.ddphi.iter_mut());
        for ((phase, (step, curve)), jerk) in self.phi.iter_mut().zip(steps).zip(&self.dddphi) {
            let mut next = *phase + *step;
            if next > PI {
                next -= TAU;
                if next > PI {
                    next = wrap_angle(next);
                }
            } else if next <= -PI {
                next += TAU;
                if next <= -PI {
                    next = wrap_angle(next);
                }
            }
            *phase = next;
            *step += *curve;
            *curve += *jerk;
        }
    }
}

impl Iterator for CirStream {
    type Item = Result<CirFrame, ModelError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_frame >= self.frame_count {
            return None;
        }
        let frame = self.next_frame;
        self.next_frame += 1;
        Some(self.emit(frame))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let remaining = self.frame_count - self.next_frame;
        (remaining, Some(remaining))
    }
}

impl ExactSizeIterator for CirStream {}

/// Validates `config` and prepares a frame stream for it: draws the ray sets
/// from the initial cluster bearings, builds every ray's cubic phase
/// polynomial per element pair, draws the per-path shadowing, and positions
/// the per-path delay-innovation streams.
pub fn generate_cir(config: &SimulationConfig) -> Result<CirStream, ModelError> {
    config.validate()?;
    let lambda = config.wavelength_m();
    let n_paths = config.clusters.len();
    let m = config.rays_per_path;
    let p_count = config.mt.array.count();
    let q_count = config.mr.array.count();

    let mut specs = Vec::with_capacity(n_paths);
    for pair in &config.clusters {
        specs.push(PathAngleSpec {
            departure: AngleDistribution::new(config.kappa_mt, pair.mt.mean_angle())?,
            arrival: AngleDistribution::new(config.kappa_mr, pair.mr.mean_angle())?,
        });
    }
    let rays = build_rayset(config.seed, &specs, m);

    // forward-difference chains of every ray's cubic phase over one sample
    // interval; exact for polynomials, so stepping them reproduces the
    // phases on the frame grid
    let fs_hz = config.effective_sample_rate_hz();
    let delta = 1.0 / fs_hz;
    let rays_total = n_paths * p_count * q_count * m;
    let mut phi = Vec::with_capacity(rays_total);
    let mut dphi = Vec::with_capacity(rays_total);
    let mut ddphi = Vec::with_capacity(rays_total);
    let mut dddphi = Vec::with_capacity(rays_total);
    for (n, pair) in config.clusters.iter().enumerate() {
        let path_rays = &rays.paths[n];
        for p in 0..p_count {
            for q in 0..q_count {
                let ant_mt = config.mt.array.element(p);
                let ant_mr = config.mr.array.element(q);
                for ray in 0..m {
                    let mt_side = SideMotion {
                        profile: config.mt.velocity,
                        range_m: pair.mt.distance_m(),
                        ray_angle: path_rays.departure[ray],
                    };
                    let mr_side = SideMotion {
                        profile: config.mr.velocity,
                        range_m: pair.mr.distance_m(),
                        ray_angle: path_rays.arrival[ray],
                    };
                    let poly = build_phase_polynomial(&mt_side, &mr_side, ant_mt, ant_mr, lambda)?;
                    phi.push(wrap_angle(poly.constant + path_rays.phases[ray]));
                    dphi.push(
                        ((poly.cubic * delta + poly.quadratic) * delta + poly.linear) * delta,
                    );
                    ddphi.push((6.0 * poly.cubic * delta + 2.0 * poly.quadratic) * delta * delta);
                    dddphi.push(6.0 * poly.cubic * delta * delta * delta);
                }
            }
        }
    }

    let mut shadows_db = Vec::with_capacity(n_paths);
    let mut innovation_rngs = Vec::with_capacity(n_paths);
    for n in 0..n_paths {
        let mut shadow_rng = derived_rng(config.seed, 0, n as u32, 0, StreamClass::Shadowing);
        let z: f64 = shadow_rng.sample(StandardNormal);
        shadows_db.push(z * config.power_delay.shadow_sigma_db);
        innovation_rngs.push(derived_rng(
            config.seed,
            0,
            n as u32,
            0,
            StreamClass::DelayInnovation,
        ));
    }

    Ok(CirStream {
        fs_hz,
        frame_count: config.frame_count(),
        next_frame: 0,
        rays_per_path: m,
        mt_elements: p_count,
        mr_elements: q_count,
        power_as_amplitude: config.power_as_amplitude,
        mt_velocity: config.mt.velocity,
        mr_velocity: config.mr.velocity,
        clusters: config.clusters.clone(),
        power_delay: config.power_delay,
        phi,
        dphi,
        ddphi,
        dddphi,
        shadows_db,
        innovation_rngs,
        tau_virtual_s: vec![config.power_delay.tau_virtual0_s; n_paths],
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
