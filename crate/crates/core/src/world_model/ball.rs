use nalgebra::{Matrix2, Matrix4, SMatrix, Vector2};

use super::{symmetrize4, WorldModelError};
use crate::geometry::Point2;

/// Filtered ball state over `(x, y, vx, vy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEstimate {
    pub position: Point2,
    pub velocity: Point2,
    pub covariance: Matrix4<f64>,
    /// Seconds since the ball was last observed.
    pub last_seen_age: f64,
}

impl BallEstimate {
    pub fn new(position: Point2, velocity: Point2, covariance: Matrix4<f64>) -> Self {
        BallEstimate {
            position,
            velocity,
            covariance,
            last_seen_age: 0.0,
        }
    }

    /// Ball resting at `position` with a diagonal covariance.
    pub fn at_rest(position: Point2, position_var: f64, velocity_var: f64) -> Self {
        let cov = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            position_var,
            position_var,
            velocity_var,
            velocity_var,
        ));
        BallEstimate::new(position, Point2::ORIGIN, cov)
    }

    pub fn position_trace(&self) -> f64 {
        self.covariance[(0, 0)] + self.covariance[(1, 1)]
    }

    fn state(&self) -> nalgebra::Vector4<f64> {
        nalgebra::Vector4::new(self.position.x, self.position.y, self.velocity.x, self.velocity.y)
    }

    fn set_state(&mut self, s: &nalgebra::Vector4<f64>) {
        self.position = Point2::new(s[0], s[1]);
        self.velocity = Point2::new(s[2], s[3]);
    }
}

/// Rolls the ball forward `dt` seconds under constant deceleration
/// `friction` (m/s²) opposing the motion; the ball stops rather than
/// reversing. The covariance grows by `process_noise · dt`.
pub fn kalman_predict(
    ball: &BallEstimate,
    dt: f64,
    friction: f64,
    process_noise: &Matrix4<f64>,
) -> BallEstimate {
    let mut out = ball.clone();
    let (position, velocity) = roll(ball.position, ball.velocity, friction, dt);
    out.position = position;
    out.velocity = velocity;
    out.covariance = symmetrize4(ball.covariance + process_noise * dt);
    out.last_seen_age = ball.last_seen_age + dt;
    out
}

/// Closed-form uniformly decelerated motion, clamped at standstill.
pub fn roll(position: Point2, velocity: Point2, friction: f64, dt: f64) -> (Point2, Point2) {
    let speed = velocity.norm();
    if speed == 0.0 || dt == 0.0 {
        return (position + velocity * dt, velocity);
    }
    if friction <= 0.0 {
        return (position + velocity * dt, velocity);
    }
    let dir = velocity * (1.0 / speed);
    let stop_time = speed / friction;
    if dt >= stop_time {
        let travel = speed * speed / (2.0 * friction);
        (position + dir * travel, Point2::ORIGIN)
    } else {
        let travel = speed * dt - 0.5 * friction * dt * dt;
        (position + dir * travel, dir * (speed - friction * dt))
    }
}

/// Position measurement update. Resets `last_seen_age`.
pub fn kalman_update(
    ball: &BallEstimate,
    observation: Point2,
    obs_noise: &Matrix2<f64>,
) -> Result<BallEstimate, WorldModelError> {
    let mut out = measurement_update(ball, 0, observation, obs_noise)?;
    out.last_seen_age = 0.0;
    Ok(out)
}

/// Velocity measurement update (e.g. from the ball perceptor's tracker).
/// Leaves `last_seen_age` untouched.
pub fn kalman_update_velocity(
    ball: &BallEstimate,
    observation: Point2,
    obs_noise: &Matrix2<f64>,
) -> Result<BallEstimate, WorldModelError> {
    measurement_update(ball, 2, observation, obs_noise)
}

/// Linear update observing the state pair starting at `offset`, in Joseph form.
fn measurement_update(
    ball: &BallEstimate,
    offset: usize,
    z: Point2,
    noise: &Matrix2<f64>,
) -> Result<BallEstimate, WorldModelError> {
    let mut h = SMatrix::<f64, 2, 4>::zeros();
    h[(0, offset)] = 1.0;
    h[(1, offset + 1)] = 1.0;
    let p = ball.covariance;
    let s = h * p * h.transpose() + noise;
    let s_inv = s
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or(WorldModelError::SingularInnovation)?;
    let k = p * h.transpose() * s_inv;
    let x = ball.state();
    let innovation = Vector2::new(z.x, z.y) - h * x;
    let x_new = x + k * innovation;
    let i_kh = Matrix4::identity() - k * h;
    let p_new = i_kh * p * i_kh.transpose() + k * noise * k.transpose();

    let mut out = ball.clone();
    out.set_state(&x_new);
    out.covariance = symmetrize4(p_new);
    Ok(out)
}
