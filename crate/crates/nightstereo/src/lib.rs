//! Low-light stereo perception pipeline on synthetic ground-truth scenes.
//!
//! The crate chains synchronized stereo capture, SNR-aware low-light
//! enhancement with a semantic-prior cross-attention stage, plane-sweep
//! stereo depth, nearest-centroid segmentation scoring and stereo visual
//! odometry, and evaluates each stage against exact synthetic ground truth.
//!
//! Modules map onto the pipeline stages:
//!
//! - [`imaging`] — float image buffers, PNM I/O, resampling and filtering.
//! - [`scenegen`] — deterministic synthetic stereo sequences with ground-truth
//!   depth, labels and poses, plus the day-to-night degradation model.
//! - [`dataflow`] — in-process publish/subscribe bus, simulated trigger
//!   source, approximate-time stereo synchronizer, pipeline runner with
//!   latency/FPS instrumentation.
//! - [`enhance`] — SNR map, local/global feature branches, SNR-guided fusion
//!   and semantic cross-attention reconstruction.
//! - [`segment`] — nearest-centroid per-pixel segmenter and pixel accuracy.
//! - [`stereo`] — ZNCC plane-sweep cost volume, winner-take-all disparity,
//!   consistency filtering and depth metrics.
//! - [`vo`] — difference-of-Gaussians keypoints, stereo matching/tracking and
//!   Gauss-Newton pose estimation over a whole sequence.
//! - [`config`] / [`cli`] — run configuration and the `nightstereo` command
//!   line entry points.
//!
//! Every operation is deterministic given its inputs and seeds; see the
//! `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod config;
pub mod dataflow;
pub mod enhance;
pub mod imaging;
pub mod report;
pub mod scenegen;
pub mod segment;
pub mod stereo;
pub mod vo;
