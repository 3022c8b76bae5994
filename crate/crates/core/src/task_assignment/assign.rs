use alloc::vec::Vec;

use super::{Context, Role, TaskError, TaskSpec};
use crate::world_model::DistributedWorldModel;
use crate::RobotId;

/// Goalkeeper utility of robot 0; larger than any other entry can be.
pub const GOALKEEPER_UTILITY: f64 = 100.0;

/// Robots × tasks table of non-negative scores, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityMatrix {
    pub robots: Vec<RobotId>,
    /// Task id of each column.
    pub tasks: Vec<u8>,
    values: Vec<f64>,
}

impl UtilityMatrix {
    pub fn new(robots: Vec<RobotId>, tasks: Vec<u8>, values: Vec<f64>) -> Result<Self, TaskError> {
        let (rows, cols) = (robots.len(), tasks.len());
        if values.len() != rows * cols {
            return Err(TaskError::ShapeMismatch { rows, cols, values: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(TaskError::InvalidUtility {
                row: i / cols,
                col: i % cols,
                value: values[i],
            });
        }
        Ok(UtilityMatrix { robots, tasks, values })
    }

    /// Rows labelled 0..n and columns 0..m.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, TaskError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TaskError::ShapeMismatch {
                rows: rows.len(),
                cols,
                values: rows.iter().map(Vec::len).sum(),
            });
        }
        UtilityMatrix::new(
            (0..rows.len()).map(|i| RobotId(i as u8)).collect(),
            (0..cols).map(|j| j as u8).collect(),
            rows.concat(),
        )
    }

    pub fn rows(&self) -> usize {
        self.robots.len()
    }

    pub fn cols(&self) -> usize {
        self.tasks.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }
}

/// Robot → task id pairs, ordered by robot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    pub pairs: Vec<(RobotId, u8)>,
}

impl Assignment {
    pub fn task_of(&self, robot: RobotId) -> Option<u8> {
        self.pairs.iter().find(|(r, _)| *r == robot).map(|&(_, t)| t)
    }
}

/// Utility of every robot in `dwm` for every task.
///
/// `distance·e^(−d(robot, target)/scale)`, plus `ball·e^(−d(robot, ball)/scale)`
/// for ball-chasing roles, plus `hysteresis` if the robot held the same task
/// id in `previous`. The goalkeeper column is [`GOALKEEPER_UTILITY`] for
/// robot 0 and zero for everyone else.
pub fn compute_uem(
    dwm: &DistributedWorldModel,
    ctx: &Context,
    tasks: &[TaskSpec],
    previous: Option<&Assignment>,
) -> Result<UtilityMatrix, TaskError> {
    let w = &ctx.weights;
    let ball = dwm.ball.position;
    let mut values = Vec::with_capacity(dwm.models.len() * tasks.len());
    for m in &dwm.models {
        let me = m.pose.position;
        let held = previous.and_then(|p| p.task_of(m.owner));
        for t in tasks {
            let u = if t.role == Role::Goalkeeper {
                if m.owner == RobotId(0) {
                    GOALKEEPER_UTILITY
                } else {
                    0.0
                }
            } else {
                let mut u = w.distance * libm::exp(-me.distance(t.target) / w.scale);
                if t.role.chases_ball() {
                    u += w.ball * libm::exp(-me.distance(ball) / w.scale);
                }
                if held == Some(t.id) {
                    u += w.hysteresis;
                }
                u
            };
            values.push(u);
        }
    }
    UtilityMatrix::new(
        dwm.models.iter().map(|m| m.owner).collect(),
        tasks.iter().map(|t| t.id).collect(),
        values,
    )
}

/// Hands out tasks column by column: each goes to the free robot with the
/// highest utility for it, ties to the lowest robot id.
pub fn assign(uem: &UtilityMatrix) -> Result<Assignment, TaskError> {
    let (rows, cols) = (uem.rows(), uem.cols());
    if rows != cols {
        return Err(TaskError::NotSquare { rows, cols });
    }
    let mut free: Vec<bool> = alloc::vec![true; rows];
    let mut pairs = Vec::with_capacity(rows);
    for col in 0..cols {
        let mut best: Option<usize> = None;
        for row in (0..rows).filter(|&r| free[r]) {
            let better = best.is_none_or(|b| {
                let (u, v) = (uem.get(row, col), uem.get(b, col));
                u > v || (u == v && uem.robots[row] < uem.robots[b])
            });
            if better {
                best = Some(row);
            }
        }
        let row = best.expect("square matrix leaves a free robot per column");
        free[row] = false;
        pairs.push((uem.robots[row], uem.tasks[col]));
    }
    pairs.sort();
    Ok(Assignment { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::task_assignment::{default_contexts, UtilityWeights};
    use crate::world_model::{fuse, BallEstimate, LocalModel, ObstacleModel, RobotPose, WorldModelParams};
    use alloc::vec;
    use nalgebra::Matrix3;

    #[test]
    fn unambiguous_maxima() {
        let m = UtilityMatrix::from_rows(&[vec![5.0, 1.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(assign(&m).unwrap().pairs, vec![(RobotId(0), 0), (RobotId(1), 1)]);
    }

    #[test]
    fn ties_go_to_the_lowest_robot() {
        let m = UtilityMatrix::from_rows(&[vec![3.0, 1.0], vec![3.0, 2.0]]).unwrap();
        assert_eq!(assign(&m).unwrap().pairs, vec![(RobotId(0), 0), (RobotId(1), 1)]);
    }

    #[test]
    fn rejects_bad_matrices() {
        let m = UtilityMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(assign(&m), Err(TaskError::NotSquare { rows: 1, cols: 2 }));
        assert!(matches!(
            UtilityMatrix::from_rows(&[vec![1.0, -0.5]]),
            Err(TaskError::InvalidUtility { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            UtilityMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]),
            Err(TaskError::ShapeMismatch { .. })
        ));
    }

    fn team(positions: &[Point2], ball: Point2) -> DistributedWorldModel {
        let models: Vec<_> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| LocalModel {
                owner: RobotId(i as u8),
                ball: BallEstimate::at_rest(ball, 0.01, 0.01),
                obstacles: ObstacleModel::default(),
                pose: RobotPose::new(p, 0.0, Matrix3::identity()),
                timestamp: 0.0,
            })
            .collect();
        fuse(&models, models.len(), &WorldModelParams::default()).unwrap()
    }

    fn spec(id: u8, role: Role, target: Point2) -> TaskSpec {
        TaskSpec { id, role, target, mandatory: false }
    }

    #[test]
    fn robot_on_target_scores_the_distance_weight() {
        let mut ctx = default_contexts().remove(0);
        ctx.weights = UtilityWeights { distance: 0.7, ball: 0.0, hysteresis: 0.0, scale: 2.0 };
        let d = team(&[Point2::new(1.0, 1.0)], Point2::ORIGIN);
        let m = compute_uem(&d, &ctx, &[spec(3, Role::Libero, Point2::new(1.0, 1.0))], None).unwrap();
        assert_eq!(m.get(0, 0), 0.7);
    }

    #[test]
    fn equidistant_robots_score_equally() {
        let ctx = default_contexts().remove(0);
        let d = team(&[Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)], Point2::new(0.0, 2.0));
        let m = compute_uem(&d, &ctx, &[spec(1, Role::Striker, Point2::ORIGIN)], None).unwrap();
        assert_eq!(m.get(0, 0), m.get(1, 0));
    }

    #[test]
    fn utilities_match_the_formula() {
        let ctx = default_contexts().remove(0);
        let w = ctx.weights;
        let robots = [Point2::new(-4.0, 0.0), Point2::new(0.0, 1.0), Point2::new(2.0, -1.0)];
        let ball = Point2::new(1.0, 0.0);
        let d = team(&robots, ball);
        let tasks = [
            spec(0, Role::Goalkeeper, Point2::new(-4.2, 0.0)),
            spec(1, Role::Striker, ball),
            spec(4, Role::Supporter, Point2::new(-0.2, 0.0)),
        ];
        let prev = Assignment { pairs: vec![(RobotId(1), 4), (RobotId(2), 1)] };
        let m = compute_uem(&d, &ctx, &tasks, Some(&prev)).unwrap();
        for (i, r) in robots.iter().enumerate() {
            let gk = if i == 0 { GOALKEEPER_UTILITY } else { 0.0 };
            let dist = |p: Point2| libm::exp(-r.distance(p) / w.scale);
            let striker = w.distance * dist(ball) + w.ball * dist(ball) + if i == 2 { w.hysteresis } else { 0.0 };
            let sup = w.distance * dist(tasks[2].target) + if i == 1 { w.hysteresis } else { 0.0 };
            assert_eq!(m.get(i, 0), gk);
            assert!((m.get(i, 1) - striker).abs() < 1e-15);
            assert!((m.get(i, 2) - sup).abs() < 1e-15);
        }
    }
}
