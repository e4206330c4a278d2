//! Non-stationary vehicle-to-vehicle MIMO channel simulator.
//!
//! Two terminals move through a plane with linearly varying speed and
//! heading; scattering is described by one cluster pair per propagation
//! path, with ray angles drawn from von Mises distributions around each
//! cluster's mean direction. The crate generates the resulting
//! time-variant channel impulse response and evaluates the model's
//! space-time correlation functions three independent ways — closed form,
//! adaptive quadrature, and Monte Carlo over regenerated ray sets — so each
//! route can be checked against the others.
//!
//! # Layout
//!
//! - [`geometry`] — planar motion profiles, cluster placement, antenna
//!   arrays, and the linearized range/angle approximations.
//! - [`angles`] — von Mises sampling and per-path ray sets.
//! - [`phase`] — per-ray cubic phase polynomials and instantaneous Doppler.
//! - [`params`] — propagation delays, power-delay profile, and shadowing.
//! - [`chanmodel`] — the simulation configuration and the frame stream.
//! - [`stats`] — correlation functions (closed form, quadrature, Monte
//!   Carlo) and their numerical support (complex Bessel `I0`, adaptive
//!   Gauss–Kronrod quadrature).
//! - [`config`] — TOML documents and scenario presets.
//! - [`export`] — CSV and binary frame export.
//!
//! # Example
//!
//! ```
//! use v2vchan::config::load_config_str;
//! use v2vchan::chanmodel::generate_cir;
//!
//! let loaded = load_config_str("preset = \"opposite-direction-1\"")?;
//! let mut config = loaded.config;
//! config.duration_s = 0.01;
//! let stream = generate_cir(&config)?;
//! for frame in stream {
//!     let frame = frame?;
//!     let h = frame.narrowband(0, 0);
//!     assert!(h.norm().is_finite());
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod angles;
pub mod chanmodel;
pub mod config;
pub mod export;
pub mod geometry;
pub mod params;
pub mod phase;
mod rng;
pub mod stats;

pub use chanmodel::{generate_cir, CirFrame, CirStream, SimulationConfig};
pub use config::{load_config_path, load_config_str, LoadedConfig, ScenarioPreset};
pub use stats::{sccf_closed, stcf_closed, stcf_mc, stcf_quadrature, tacf_closed};
