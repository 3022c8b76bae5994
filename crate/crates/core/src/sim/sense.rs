use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use super::world::WorldState;
use crate::geometry::Point2;
use crate::world_model::{normalize_angle, BallObservation, ObstacleObservation, Odometry, PoseObservation, SensorBundle};

/// Reported variances never drop below this, m².
const MIN_VARIANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PerceptionParams {
    /// m.
    pub view_distance: f64,
    /// Full opening angle, rad.
    pub field_of_view: f64,
    /// Ball position noise at zero range, m.
    pub ball_noise: f64,
    /// Extra ball position noise per meter of range.
    pub ball_noise_per_meter: f64,
    /// m/s.
    pub velocity_noise: f64,
    /// m.
    pub obstacle_noise: f64,
    /// Odometry noise as a fraction of the true motion.
    pub odometry_noise: f64,
    /// Seconds between absolute pose fixes; 0 disables them.
    pub pose_fix_interval: f64,
    /// m.
    pub pose_fix_noise: f64,
    /// rad.
    pub pose_fix_heading_noise: f64,
}

impl Default for PerceptionParams {
    fn default() -> Self {
        PerceptionParams {
            view_distance: 4.0,
            field_of_view: 2.0 * core::f64::consts::FRAC_PI_3,
            ball_noise: 0.05,
            ball_noise_per_meter: 0.02,
            velocity_noise: 0.1,
            obstacle_noise: 0.1,
            odometry_noise: 0.05,
            pose_fix_interval: 1.0,
            pose_fix_noise: 0.05,
            pose_fix_heading_noise: 0.03,
        }
    }
}

impl PerceptionParams {
    /// Every noise scale set to zero.
    pub fn noiseless() -> Self {
        PerceptionParams {
            ball_noise: 0.0,
            ball_noise_per_meter: 0.0,
            velocity_noise: 0.0,
            obstacle_noise: 0.0,
            odometry_noise: 0.0,
            pose_fix_noise: 0.0,
            pose_fix_heading_noise: 0.0,
            ..PerceptionParams::default()
        }
    }
}

fn gauss<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    sigma * n
}

/// What robot `index` perceives in `world` at `now`.
pub fn sense<R: Rng>(world: &WorldState, index: usize, params: &PerceptionParams, now: f64, rng: &mut R) -> SensorBundle {
    let me = &world.robots[index];
    let visible = |p: Point2| {
        let d = p - me.position;
        let range = d.norm();
        let bearing = normalize_angle(libm::atan2(d.y, d.x) - me.heading);
        range <= params.view_distance && libm::fabs(bearing) <= 0.5 * params.field_of_view
    };

    let ball = if visible(world.ball.position) {
        let range = world.ball.position.distance(me.position);
        let sigma = params.ball_noise + params.ball_noise_per_meter * range;
        let pos = world.ball.position + Point2::new(gauss(rng, sigma), gauss(rng, sigma));
        let vel = world.ball.velocity
            + Point2::new(gauss(rng, params.velocity_noise), gauss(rng, params.velocity_noise));
        Some(BallObservation {
            position: pos,
            variance: (sigma * sigma).max(MIN_VARIANCE),
            velocity: Some(vel),
            velocity_variance: (params.velocity_noise * params.velocity_noise).max(MIN_VARIANCE),
        })
    } else {
        None
    };

    let obstacles: Vec<ObstacleObservation> = world
        .robots
        .iter()
        .enumerate()
        .filter(|&(i, r)| i != index && visible(r.position))
        .map(|(_, r)| {
            let s = params.obstacle_noise;
            ObstacleObservation {
                position: r.position + Point2::new(gauss(rng, s), gauss(rng, s)),
                opponent: r.team != me.team,
                variance: (s * s).max(MIN_VARIANCE),
            }
        })
        .collect();

    let o = me.odometry;
    let k = params.odometry_noise;
    let odometry = Odometry {
        forward: o.forward + gauss(rng, k * libm::fabs(o.forward)),
        left: o.left + gauss(rng, k * libm::fabs(o.left)),
        turn: o.turn + gauss(rng, k * libm::fabs(o.turn)),
    };

    let pose = if params.pose_fix_interval > 0.0 && is_fix_tick(world, index, params) {
        let (s, h) = (params.pose_fix_noise, params.pose_fix_heading_noise);
        Some(PoseObservation {
            position: me.position + Point2::new(gauss(rng, s), gauss(rng, s)),
            heading: normalize_angle(me.heading + gauss(rng, h)),
            noise: Matrix3::from_diagonal(&Vector3::new(
                (s * s).max(MIN_VARIANCE),
                (s * s).max(MIN_VARIANCE),
                (h * h).max(MIN_VARIANCE),
            )),
        })
    } else {
        None
    };

    SensorBundle {
        timestamp: now,
        ball,
        obstacles,
        odometry: Some(odometry),
        pose,
    }
}

/// Pose fixes come once per interval, staggered by robot.
fn is_fix_tick(world: &WorldState, index: usize, params: &PerceptionParams) -> bool {
    let period = libm::round(params.pose_fix_interval / world.tick).max(1.0) as u64;
    world.ticks % period == index as u64 % period
}
