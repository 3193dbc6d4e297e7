//! Occupancy counting and walking-direction estimation from 8x8 thermal-array
//! frames.
//!
//! The pipeline: background subtraction ([`frames`]), connected components and
//! peak counting ([`blobs`]), an RBF support vector machine over the 4-D scene
//! descriptor ([`classify`]), and cross-correlation delay analysis of per-cell
//! time series ([`motion`]). [`synth`] generates labelled scenes and walks.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod blobs;
pub mod classify;
pub mod error;
pub mod frames;
pub mod grid;
pub mod motion;
pub mod render;
pub mod scalar;
pub mod synth;

pub use blobs::{Connectivity, FeatureConfig, FeatureVector};
pub use error::{Error, Result};
pub use grid::{Cell, Grid};
pub use scalar::Scalar;

pub type ThermalFrame = frames::ThermalFrame<f64>;
pub type SceneSequence = frames::SceneSequence<f64>;
pub type BackgroundModel = frames::BackgroundModel<f64>;
pub type ForegroundFrame = frames::ForegroundFrame<f64>;
pub type Blob = blobs::Blob<f64>;
pub type Dataset = classify::Dataset<f64>;
pub type SvmModel = classify::SvmModel<f64>;
pub type KMeansModel = classify::KMeansModel<f64>;
pub type PixelTimeSeries = motion::PixelTimeSeries<f64>;
pub type CrossCorrResult = motion::CrossCorrResult<f64>;
pub type MotionEstimate = motion::MotionEstimate<f64>;
pub type SynthConfig = synth::SynthConfig<f64>;

pub type ThermalFrame32 = frames::ThermalFrame<f32>;
pub type SvmModel32 = classify::SvmModel<f32>;
