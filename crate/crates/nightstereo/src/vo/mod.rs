//! Keypoint detection, stereo feature matching and stereo visual odometry.
//!
//! The detector is a difference-of-Gaussians scale-space extremum search;
//! descriptors are normalized gray patches (gain/offset invariant), and the
//! pose chain comes from robust Gauss-Newton minimization of reprojection
//! error over an SE(3) twist. Everything is deterministic: no RANSAC, ties
//! broken by fixed ordering, constant-velocity fallback when tracking
//! collapses.

mod keypoints;
mod matching;
mod odometry;
mod pose;
mod solver;

pub use keypoints::{dog_keypoints, keypoint_delta, DogParams, Keypoint};
pub use matching::{describe, match_stereo, track, Descriptor, StereoMatch, TrackMatch};
pub use odometry::{
    run_vo, waypoint_translation_error, Condition, VoParams, VoRun,
};
pub use pose::{load_trajectory, save_trajectory, Pose, Trajectory};
pub use solver::{reprojection_jacobian, reprojection_residual, solve_pose_gn, GnReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VoError {
    #[error("image {0}x{1} too small for scale-space detection (need 32x32)")]
    ImageTooSmall(usize, usize),
    #[error("too few correspondences: {0} (need at least {1})")]
    TooFewPoints(usize, usize),
    #[error("degenerate geometry: normal equations are not solvable")]
    DegenerateGeometry,
    #[error("sequence is empty")]
    EmptySequence,
    #[error("waypoint frame {0} missing from trajectory")]
    MissingWaypoint(usize),
    #[error("trajectory file: {0}")]
    TrajectoryFormat(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
