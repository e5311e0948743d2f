//! Link-level Monte Carlo simulator for uplink millimeter-wave MU-MIMO
//! between aircraft.
//!
//! One airborne access point (AP) carries a bank of analog-beamformed planar
//! subarrays, one per served user. Airborne users (UEs), each with a single
//! analog-beamformed planar array, are dropped uniformly at random in a
//! spherical-cone shell below the AP. For every drop the simulator
//! synthesizes the line-of-sight uplink channel matrix from array gains,
//! range loss and atmospheric attenuation, applies MMSE or identity digital
//! combining across the subarrays, and reports per-user SINRs and Shannon
//! rates.
//!
//! The crate is organized bottom-up:
//!
//! * [`antenna`] — steering vectors, element patterns, beam-coupling
//!   matrices by spherical quadrature, gains and max-directivity weights;
//! * [`propagation`] — range/attenuation loss, Friis received power, and
//!   receiver noise spectral density;
//! * [`geometry`] — random UE placement in the shell and local-frame
//!   bearings for both ends of a link;
//! * [`channel`] — assembly of the digital uplink channel matrix;
//! * [`receiver`] — digital combining, SINRs, and achievable rates;
//! * [`montecarlo`] — seeded trial/campaign orchestration and aggregation;
//! * [`config`] — scenario configuration files and overrides;
//! * [`report`] — delimited output tables and the run manifest.
//!
//! Campaigns are deterministic: every trial derives its own RNG stream from
//! `(master_seed, n_ue, trial_index)`, so results do not depend on thread
//! count or execution order. With the default `parallel` feature trials run
//! on a rayon pool; without it, on a plain loop.

pub mod antenna;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod propagation;
pub mod receiver;
pub mod report;

pub use error::{Error, Result};
