//! SE(3) poses, the exponential map, and trajectory file I/O in the
//! 12-number-per-line 3x4 `[R|t]` layout (KITTI-odometry compatible).

use std::path::Path;

use nalgebra::{Matrix3, Vector3, Vector6};

use super::VoError;

/// Camera-to-world rigid transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// Applies the transform to a point.
    pub fn transform(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Composition `self * other` (apply `other` first).
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Exponential map of a 6-d twist `[omega, v]` (axis-angle, translation).
    pub fn exp(twist: &Vector6<f64>) -> Pose {
        let omega = Vector3::new(twist[0], twist[1], twist[2]);
        let v = Vector3::new(twist[3], twist[4], twist[5]);
        let theta = omega.norm();
        let k = skew(&omega);
        let k2 = k * k;
        let (a, b, c) = if theta < 1e-9 {
            // second-order Taylor expansion near zero
            (
                1.0 - theta * theta / 6.0,
                0.5 - theta * theta / 24.0,
                1.0 / 6.0 - theta * theta / 120.0,
            )
        } else {
            let t2 = theta * theta;
            (
                theta.sin() / theta,
                (1.0 - theta.cos()) / t2,
                (theta - theta.sin()) / (t2 * theta),
            )
        };
        let rotation = Matrix3::identity() + k * a + k2 * b;
        let v_mat = Matrix3::identity() + k * b + k2 * c;
        Pose {
            rotation,
            translation: v_mat * v,
        }
    }

    /// Projects the rotation part onto the closest orthonormal matrix with
    /// determinant +1 (SVD polar factor).
    pub fn orthonormalize(&mut self) {
        let svd = self.rotation.svd(true, true);
        let u = svd.u.expect("svd of 3x3 always yields u");
        let vt = svd.v_t.expect("svd of 3x3 always yields v_t");
        let mut r = u * vt;
        if r.determinant() < 0.0 {
            // flip the last singular direction to land in SO(3)
            let mut u2 = u;
            u2.column_mut(2).scale_mut(-1.0);
            r = u2 * vt;
        }
        self.rotation = r;
    }

    /// Frobenius deviation of `R^T R` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        (self.rotation.transpose() * self.rotation - Matrix3::identity()).norm()
    }
}

pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Ordered list of (frame index, camera-to-world pose); frame indices are
/// strictly increasing and the estimate frame starts at the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub poses: Vec<(usize, Pose)>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self { poses: Vec::new() }
    }

    pub fn push(&mut self, frame: usize, pose: Pose) {
        if let Some((last, _)) = self.poses.last() {
            assert!(*last < frame, "frame indices must be strictly increasing");
        }
        self.poses.push((frame, pose));
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn pose_at(&self, frame: usize) -> Option<&Pose> {
        self.poses
            .iter()
            .find(|(f, _)| *f == frame)
            .map(|(_, p)| p)
    }

    /// Total path length of the ground-track (sum of consecutive position
    /// distances).
    pub fn path_length(&self) -> f64 {
        self.poses
            .windows(2)
            .map(|w| (w[1].1.translation - w[0].1.translation).norm())
            .sum()
    }
}

impl Default for Trajectory {
    fn default() -> Self {
        Self::new()
    }
}

/// Writes one pose per line as 12 numbers, row-major 3x4 `[R|t]`.
pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<(), VoError> {
    let mut out = String::new();
    for (_, pose) in &traj.poses {
        let r = &pose.rotation;
        let t = &pose.translation;
        let row = [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t[0],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t[1],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t[2],
        ];
        let line: Vec<String> = row.iter().map(|v| format!("{v:.9e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| VoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a 12-number-per-line pose file; frame indices are assigned by line
/// order.
pub fn load_trajectory(path: &Path) -> Result<Trajectory, VoError> {
    let text = std::fs::read_to_string(path).map_err(|source| VoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut traj = Trajectory::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let nums: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let nums = nums.map_err(|e| {
            VoError::TrajectoryFormat(format!("line {}: {e}", lineno + 1))
        })?;
        if nums.len() != 12 {
            return Err(VoError::TrajectoryFormat(format!(
                "line {}: expected 12 numbers, got {}",
                lineno + 1,
                nums.len()
            )));
        }
        let rotation = Matrix3::new(
            nums[0], nums[1], nums[2], nums[4], nums[5], nums[6], nums[8], nums[9], nums[10],
        );
        let translation = Vector3::new(nums[3], nums[7], nums[11]);
        traj.push(lineno, Pose::new(rotation, translation));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector6;

    #[test]
    fn exp_zero_is_identity() {
        let p = Pose::exp(&Vector6::zeros());
        assert!(p.orthonormality_error() < 1e-12);
        assert!((p.rotation - Matrix3::identity()).norm() < 1e-12);
        assert!(p.translation.norm() < 1e-12);
    }

    #[test]
    fn exp_pure_translation() {
        let p = Pose::exp(&Vector6::new(0.0, 0.0, 0.0, 1.0, -2.0, 3.0));
        assert!((p.translation - Vector3::new(1.0, -2.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn exp_yaw_rotation() {
        let angle = 0.3f64;
        let p = Pose::exp(&Vector6::new(0.0, angle, 0.0, 0.0, 0.0, 0.0));
        // rotation about +y: z axis maps to (sin, 0, cos)
        let z = p.rotation * Vector3::new(0.0, 0.0, 1.0);
        assert!((z - Vector3::new(angle.sin(), 0.0, angle.cos())).norm() < 1e-12);
        assert!(p.orthonormality_error() < 1e-12);
    }

    #[test]
    fn compose_inverse_round_trip() {
        let a = Pose::exp(&Vector6::new(0.1, 0.2, -0.1, 1.0, 2.0, 3.0));
        let b = a.compose(&a.inverse());
        assert!(b.orthonormality_error() < 1e-12);
        assert!((b.rotation - Matrix3::identity()).norm() < 1e-12);
        assert!(b.translation.norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_projects_back() {
        let mut p = Pose::exp(&Vector6::new(0.4, -0.2, 0.7, 0.0, 0.0, 0.0));
        // perturb the rotation off the manifold
        p.rotation[(0, 0)] += 1e-4;
        assert!(p.orthonormality_error() > 1e-5);
        p.orthonormalize();
        assert!(p.orthonormality_error() < 1e-12);
        assert!(p.rotation.determinant() > 0.0);
    }

    #[test]
    fn trajectory_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("poses.txt");
        let mut traj = Trajectory::new();
        traj.push(0, Pose::identity());
        traj.push(1, Pose::exp(&Vector6::new(0.0, 0.1, 0.0, 0.5, 0.0, 1.0)));
        traj.push(2, Pose::exp(&Vector6::new(0.05, 0.2, -0.01, 1.5, 0.1, 2.0)));
        save_trajectory(&traj, &path).unwrap();
        let rt = load_trajectory(&path).unwrap();
        assert_eq!(rt.len(), 3);
        for ((_, a), (_, b)) in traj.poses.iter().zip(&rt.poses) {
            assert!((a.rotation - b.rotation).norm() < 1e-8);
            assert!((a.translation - b.translation).norm() < 1e-8);
        }
    }
}
