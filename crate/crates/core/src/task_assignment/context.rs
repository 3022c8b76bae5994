use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::world_model::DistributedWorldModel;

/// When a context applies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type"))]
pub enum ContextCondition {
    Always,
    /// No team entry has seen the ball for more than `after` seconds.
    BallLost { after: f64 },
    /// Ball lies still within `radius` of the center mark.
    Kickoff { radius: f64, max_speed: f64 },
    /// Ball lies still in our half with an opponent within `radius` of it.
    OpponentSetPiece { radius: f64, max_speed: f64 },
}

impl ContextCondition {
    pub fn holds(&self, dwm: &DistributedWorldModel) -> bool {
        let ball = &dwm.ball;
        match *self {
            ContextCondition::Always => true,
            ContextCondition::BallLost { after } => dwm.min_ball_age() > after,
            ContextCondition::Kickoff { radius, max_speed } => {
                ball.position.norm() <= radius && ball.velocity.norm() <= max_speed
            }
            ContextCondition::OpponentSetPiece { radius, max_speed } => {
                ball.position.x < 0.0
                    && ball.velocity.norm() <= max_speed
                    && dwm
                        .obstacles
                        .opponents()
                        .any(|c| c.mean.distance(ball.position) <= radius)
            }
        }
    }
}

/// Coefficients of the utility function.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UtilityWeights {
    /// Weight of closeness to the task target.
    pub distance: f64,
    /// Weight of closeness to the ball, for ball-chasing tasks.
    pub ball: f64,
    /// Bonus for keeping the previous task.
    pub hysteresis: f64,
    /// Distance scale of both closeness terms, m.
    pub scale: f64,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        UtilityWeights {
            distance: 1.0,
            ball: 0.5,
            hysteresis: 0.15,
            scale: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Context {
    pub id: u8,
    pub name: String,
    pub condition: ContextCondition,
    /// Lower is checked first.
    pub priority: u8,
    pub weights: UtilityWeights,
}

/// Playing (always), SearchBall, OpponentFreeKick and OwnKickoff.
pub fn default_contexts() -> Vec<Context> {
    let base = UtilityWeights::default();
    vec![
        Context {
            id: 0,
            name: "Playing".to_string(),
            condition: ContextCondition::Always,
            priority: 3,
            weights: base,
        },
        Context {
            id: 1,
            name: "SearchBall".to_string(),
            condition: ContextCondition::BallLost { after: 5.0 },
            priority: 0,
            weights: UtilityWeights {
                ball: 0.0,
                hysteresis: 0.3,
                scale: 4.0,
                ..base
            },
        },
        Context {
            id: 2,
            name: "OpponentFreeKick".to_string(),
            condition: ContextCondition::OpponentSetPiece {
                radius: 1.0,
                max_speed: 0.05,
            },
            priority: 1,
            weights: UtilityWeights {
                ball: 0.25,
                scale: 2.0,
                ..base
            },
        },
        Context {
            id: 3,
            name: "OwnKickoff".to_string(),
            condition: ContextCondition::Kickoff {
                radius: 0.5,
                max_speed: 0.05,
            },
            priority: 2,
            weights: UtilityWeights { ball: 1.0, ..base },
        },
    ]
}

/// Highest-priority context whose condition holds; equal priorities go to
/// the earlier entry.
pub fn select_context<'a>(dwm: &DistributedWorldModel, contexts: &'a [Context]) -> Option<&'a Context> {
    contexts
        .iter()
        .filter(|c| c.condition.holds(dwm))
        .min_by_key(|c| c.priority)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::world_model::{fuse, BallEstimate, LocalModel, ObstacleComponent, ObstacleModel, RobotPose, WorldModelParams};
    use crate::RobotId;
    use nalgebra::{Matrix2, Matrix3};

    fn dwm(ball: Point2, age: f64, opponent: Option<Point2>) -> DistributedWorldModel {
        let mut b = BallEstimate::at_rest(ball, 0.01, 0.01);
        b.last_seen_age = age;
        let obstacles = ObstacleModel {
            components: opponent
                .into_iter()
                .map(|mean| ObstacleComponent {
                    weight: 1.0,
                    mean,
                    covariance: Matrix2::identity() * 0.01,
                    opponent: true,
                })
                .collect(),
        };
        let m = LocalModel {
            owner: RobotId(0),
            ball: b,
            obstacles,
            pose: RobotPose::new(Point2::ORIGIN, 0.0, Matrix3::identity()),
            timestamp: 0.0,
        };
        fuse(&[m], 1, &WorldModelParams::default()).unwrap()
    }

    fn pick(d: &DistributedWorldModel) -> String {
        select_context(d, &default_contexts()).unwrap().name.clone()
    }

    #[test]
    fn lost_ball_selects_search() {
        assert_eq!(pick(&dwm(Point2::new(2.0, 1.0), 6.0, None)), "SearchBall");
    }

    #[test]
    fn fresh_ball_falls_through_to_playing() {
        assert_eq!(pick(&dwm(Point2::new(2.0, 1.0), 0.0, None)), "Playing");
    }

    #[test]
    fn higher_priority_wins() {
        assert_eq!(pick(&dwm(Point2::ORIGIN, 0.0, None)), "OwnKickoff");
        // Lost and at the center mark: SearchBall outranks OwnKickoff.
        assert_eq!(pick(&dwm(Point2::ORIGIN, 6.0, None)), "SearchBall");
        assert_eq!(
            pick(&dwm(Point2::new(-2.0, 0.0), 0.0, Some(Point2::new(-1.5, 0.0)))),
            "OpponentFreeKick"
        );
    }

    #[test]
    fn no_unconditional_context() {
        let ctxs: Vec<_> = default_contexts().into_iter().filter(|c| c.id != 0).collect();
        assert!(select_context(&dwm(Point2::new(2.0, 1.0), 0.0, None), &ctxs).is_none());
    }
}
