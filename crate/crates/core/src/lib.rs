//! Two-mode parametric ("signal/idler") interferometry below and above the
//! self-oscillation threshold.
//!
//! The crate models a pair of damped mechanical modes coupled by a pump at
//! their sum frequency. In the rotating frame the slowly varying envelopes
//! obey
//!
//!   da_s/dt = (gamma_s/2) [ -a_s + mu e^(i psi) conj(a_i) ] + noise,
//!
//! and the idler equation with s <-> i. The drive ratio mu (pump amplitude
//! over its threshold value) sets the physics: mu < 1 is a phase-sensitive
//! amplifier producing two-mode squeezing, mu = 1 is threshold, mu > 1
//! self-oscillates. Everything is normalized so an undriven thermalized mode
//! has unit variance per quadrature (a = X + iY).
//!
//! Layers:
//! - [`model`]: parameter types, instantaneous Gaussian pulse maps
//!   (pair-pump and mode-mixing), closed-form variance dynamics, steady
//!   states, and the pulsed-scheme sensitivity.
//! - [`engine`]: stochastic (Euler-Maruyama) integration of the envelope
//!   equations - the two-mode linear model and the three-mode model with a
//!   dynamical pump - plus pulse sequences and parallel ensembles.
//! - [`estimators`]: ensemble statistics, squeezing in dB, power-law and
//!   growth-rate fits, finite-window spectral variances, pump depletion.
//! - [`io`]: CSV serialization of trajectories and estimates.

pub mod engine;
pub mod error;
pub mod estimators;
pub mod io;
pub mod model;

pub use error::{Error, Result};
