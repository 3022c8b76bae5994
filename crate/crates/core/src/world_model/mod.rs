//! Per-agent world modeling.
//!
//! Every agent keeps its own [`LocalModel`] (updated from its sensors by
//! [`psi_update`]) and one reconstructed model per teammate (updated from
//! network events, or by prediction alone, through [`delta_update`]). Both
//! paths share [`predict_model`], so two agents that have seen the same event
//! stream hold bit-identical reconstructions. [`fuse`] merges the collection
//! into the [`DistributedWorldModel`] the task assignment runs on.

mod ball;
mod fusion;
mod obstacles;
mod pose;

use alloc::vec::Vec;

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};

pub use ball::{kalman_predict, kalman_update, kalman_update_velocity, roll, BallEstimate};
pub use fusion::{fuse, DistributedWorldModel};
pub use obstacles::{
    observe_obstacles, propagate_obstacles, ObstacleComponent, ObstacleModel, ObstacleObservation,
};
pub use pose::{integrate_odometry, normalize_angle, pose_update, Odometry, PoseObservation, RobotPose};

use crate::events::{Event, Payload};
use crate::geometry::Point2;
use crate::RobotId;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum WorldModelError {
    #[error("innovation covariance is not invertible")]
    SingularInnovation,
    #[error("sensor input at t={input}s predates the model at t={model}s")]
    StaleInput { input: f64, model: f64 },
    #[error("event from robot {got} applied to the model of robot {expected}")]
    EventOwnerMismatch { expected: RobotId, got: RobotId },
    #[error("no model for teammate {0}")]
    MissingTeammate(RobotId),
    #[error("more than one model for teammate {0}")]
    DuplicateTeammate(RobotId),
    #[error("robot {0} is not on the team")]
    UnknownTeammate(RobotId),
}

/// Tuning of the predictive models and the fusion rule.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct WorldModelParams {
    /// Rolling deceleration of the ball, m/s².
    pub friction: f64,
    /// Per-second growth of the ball covariance, diagonal over (x, y, vx, vy).
    pub process_noise: [f64; 4],
    /// σ² added to each obstacle covariance axis per second, m²/s.
    pub obstacle_diffusion: f64,
    /// Obstacle weight decay rate λ, 1/s.
    pub obstacle_decay: f64,
    pub min_obstacle_weight: f64,
    /// Association gate for obstacle sightings, m.
    pub obstacle_gate: f64,
    pub max_obstacles: usize,
    /// κ in the fusion score `trace(P_pos) + κ·age`, m²/s.
    pub fusion_age_weight: f64,
    /// Obstacle components closer than this are merged during fusion, m.
    pub merge_radius: f64,
    /// Per-second growth of the pose covariance over (x, y, heading).
    pub pose_process_noise: [f64; 3],
    /// Measurement variance used when a ball event is folded into a model.
    pub event_position_variance: f64,
    pub event_velocity_variance: f64,
    /// Covariance given to a pose taken from an event.
    pub event_pose_variance: [f64; 3],
    /// Covariance given to obstacles taken from an event.
    pub event_obstacle_variance: f64,
    /// Ball variance after a kickoff placement.
    pub kickoff_ball_variance: f64,
}

impl Default for WorldModelParams {
    fn default() -> Self {
        WorldModelParams {
            friction: 0.4,
            process_noise: [0.01, 0.01, 0.05, 0.05],
            obstacle_diffusion: 0.04,
            obstacle_decay: 0.1,
            min_obstacle_weight: 0.05,
            obstacle_gate: 0.7,
            max_obstacles: 14,
            fusion_age_weight: 0.5,
            merge_radius: 0.5,
            pose_process_noise: [0.002, 0.002, 0.001],
            event_position_variance: 1e-4,
            event_velocity_variance: 1e-2,
            event_pose_variance: [1e-3, 1e-3, 1e-3],
            event_obstacle_variance: 0.02,
            kickoff_ball_variance: 0.01,
        }
    }
}

impl WorldModelParams {
    pub fn process_noise_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::from(self.process_noise))
    }

    fn pose_noise_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::from(self.pose_process_noise))
    }
}

/// One robot's estimate of the world (`LM`), or another agent's
/// reconstruction of it (`OLM`) when `owner` is not the holder.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    pub owner: RobotId,
    pub ball: BallEstimate,
    pub obstacles: ObstacleModel,
    pub pose: RobotPose,
    /// Seconds since match start.
    pub timestamp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallObservation {
    pub position: Point2,
    /// Isotropic position variance, m².
    pub variance: f64,
    /// Velocity reported by the ball tracker, if any.
    pub velocity: Option<Point2>,
    pub velocity_variance: f64,
}

/// Everything a robot perceived during one tick (`I`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensorBundle {
    pub timestamp: f64,
    pub ball: Option<BallObservation>,
    pub obstacles: Vec<ObstacleObservation>,
    pub odometry: Option<Odometry>,
    pub pose: Option<PoseObservation>,
}

/// The prediction step shared by [`psi_update`] and [`delta_update`].
pub fn predict_model(model: &LocalModel, dt: f64, params: &WorldModelParams) -> LocalModel {
    let mut pose = model.pose.clone();
    pose.covariance = symmetrize3(pose.covariance + params.pose_noise_matrix() * dt);
    LocalModel {
        owner: model.owner,
        ball: kalman_predict(&model.ball, dt, params.friction, &params.process_noise_matrix()),
        obstacles: propagate_obstacles(&model.obstacles, dt, params),
        pose,
        timestamp: model.timestamp + dt,
    }
}

/// Advances the agent's own model by `dt` and folds in its perceptions.
pub fn psi_update(
    lm: &LocalModel,
    inputs: &SensorBundle,
    dt: f64,
    params: &WorldModelParams,
) -> Result<LocalModel, WorldModelError> {
    if inputs.timestamp < lm.timestamp {
        return Err(WorldModelError::StaleInput {
            input: inputs.timestamp,
            model: lm.timestamp,
        });
    }
    let mut m = predict_model(lm, dt, params);
    if let Some(odo) = inputs.odometry {
        m.pose = integrate_odometry(&m.pose, odo);
    }
    if let Some(obs) = &inputs.pose {
        m.pose = pose_update(&m.pose, obs)?;
    }
    if let Some(b) = inputs.ball {
        m.ball = kalman_update(&m.ball, b.position, &(Matrix2::identity() * b.variance))?;
        if let Some(v) = b.velocity {
            m.ball = kalman_update_velocity(&m.ball, v, &(Matrix2::identity() * b.velocity_variance))?;
        }
    }
    if !inputs.obstacles.is_empty() {
        m.obstacles = observe_obstacles(&m.obstacles, &inputs.obstacles, params);
    }
    Ok(m)
}

/// Advances a teammate model by `dt`, then applies `event` if one arrived.
pub fn delta_update(
    olm: &LocalModel,
    event: Option<&Event>,
    dt: f64,
    params: &WorldModelParams,
) -> Result<LocalModel, WorldModelError> {
    if let Some(e) = event {
        if e.sender != olm.owner {
            return Err(WorldModelError::EventOwnerMismatch {
                expected: olm.owner,
                got: e.sender,
            });
        }
    }
    let mut m = predict_model(olm, dt, params);
    let Some(event) = event else {
        return Ok(m);
    };
    let sent_at = f64::from(event.timestamp_ms) / 1000.0;
    let in_flight = (m.timestamp - sent_at).max(0.0);
    match &event.payload {
        Payload::BallFound(b) | Payload::BallUpdate(b) => {
            let pos_noise = Matrix2::identity() * params.event_position_variance;
            let vel_noise = Matrix2::identity() * params.event_velocity_variance;
            m.ball = kalman_update(&m.ball, b.position.to_point(), &pos_noise)?;
            m.ball = kalman_update_velocity(&m.ball, b.velocity.to_point(), &vel_noise)?;
            m.ball.last_seen_age = b.age_seconds() + in_flight;
        }
        Payload::PoseUpdate(p) => {
            m.pose = RobotPose::new(
                p.position.to_point(),
                p.heading_radians(),
                Matrix3::from_diagonal(&Vector3::from(params.event_pose_variance)),
            );
        }
        Payload::ObstacleUpdate(points) => {
            m.obstacles = ObstacleModel {
                components: points
                    .iter()
                    .map(|p| ObstacleComponent {
                        weight: 1.0,
                        mean: p.to_point(),
                        covariance: Matrix2::identity() * params.event_obstacle_variance,
                        opponent: true,
                    })
                    .collect(),
            };
        }
        Payload::Whistle => {
            // Play restarts from the center mark.
            m.ball = BallEstimate::at_rest(
                Point2::ORIGIN,
                params.kickoff_ball_variance,
                params.kickoff_ball_variance,
            );
        }
        Payload::ContextChange(_) => {}
    }
    Ok(m)
}

pub(crate) fn symmetrize2(m: Matrix2<f64>) -> Matrix2<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn symmetrize3(m: Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn symmetrize4(m: Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}
