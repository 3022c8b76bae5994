use core::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::{symmetrize3, WorldModelError};
use crate::geometry::Point2;

#[derive(Debug, Clone, PartialEq)]
pub struct RobotPose {
    pub position: Point2,
    /// Radians in `(-π, π]`.
    pub heading: f64,
    /// Covariance over `(x, y, heading)`.
    pub covariance: Matrix3<f64>,
}

impl RobotPose {
    pub fn new(position: Point2, heading: f64, covariance: Matrix3<f64>) -> Self {
        RobotPose {
            position,
            heading: normalize_angle(heading),
            covariance,
        }
    }
}

/// Displacement measured in the robot frame since the previous tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Odometry {
    pub forward: f64,
    pub left: f64,
    pub turn: f64,
}

/// Absolute pose fix (stands in for line-based self-localization).
#[derive(Debug, Clone, PartialEq)]
pub struct PoseObservation {
    pub position: Point2,
    pub heading: f64,
    pub noise: Matrix3<f64>,
}

/// Wraps into `(-π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a - two_pi * libm::floor((a + PI) / two_pi);
    if r <= -PI {
        r += two_pi;
    }
    if r > PI {
        r -= two_pi;
    }
    r
}

pub fn integrate_odometry(pose: &RobotPose, odo: Odometry) -> RobotPose {
    let (s, c) = (libm::sin(pose.heading), libm::cos(pose.heading));
    let delta = Point2::new(c * odo.forward - s * odo.left, s * odo.forward + c * odo.left);
    RobotPose {
        position: pose.position + delta,
        heading: normalize_angle(pose.heading + odo.turn),
        covariance: pose.covariance,
    }
}

pub fn pose_update(pose: &RobotPose, obs: &PoseObservation) -> Result<RobotPose, WorldModelError> {
    let p = pose.covariance;
    let s_inv = (p + obs.noise)
        .try_inverse()
        .ok_or(WorldModelError::SingularInnovation)?;
    let k = p * s_inv;
    let innovation = Vector3::new(
        obs.position.x - pose.position.x,
        obs.position.y - pose.position.y,
        normalize_angle(obs.heading - pose.heading),
    );
    let d = k * innovation;
    let i_k = Matrix3::identity() - k;
    Ok(RobotPose {
        position: pose.position + Point2::new(d[0], d[1]),
        heading: normalize_angle(pose.heading + d[2]),
        covariance: symmetrize3(i_k * p * i_k.transpose() + k * obs.noise * k.transpose()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_wrap_into_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((normalize_angle(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-12);
        assert_eq!(normalize_angle(0.25), 0.25);
    }

    #[test]
    fn odometry_is_applied_in_robot_frame() {
        let pose = RobotPose::new(Point2::new(1.0, 1.0), PI / 2.0, Matrix3::identity());
        let out = integrate_odometry(&pose, Odometry { forward: 0.5, left: 0.0, turn: 0.1 });
        assert!(out.position.distance(Point2::new(1.0, 1.5)) < 1e-12);
        assert!((out.heading - (PI / 2.0 + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn heading_innovation_takes_the_short_way() {
        let pose = RobotPose::new(Point2::ORIGIN, PI - 0.05, Matrix3::identity());
        let obs = PoseObservation {
            position: Point2::ORIGIN,
            heading: -PI + 0.05,
            noise: Matrix3::identity(),
        };
        let out = pose_update(&pose, &obs).unwrap();
        // Halfway across the ±π seam, not back through zero.
        assert!((out.heading.abs() - PI).abs() < 1e-9);
    }
}
