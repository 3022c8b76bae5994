use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector2};

use super::{
    symmetrize2, BallEstimate, LocalModel, ObstacleComponent, ObstacleModel, WorldModelError,
    WorldModelParams,
};
use crate::geometry::Point2;
use crate::RobotId;

/// The team-wide picture one agent assembles from its own model and its
/// reconstructions of every teammate.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedWorldModel {
    /// Indexed by robot id.
    pub models: Vec<LocalModel>,
    pub ball: BallEstimate,
    /// Robot whose ball estimate was selected.
    pub ball_source: RobotId,
    pub obstacles: ObstacleModel,
    pub timestamp: f64,
}

impl DistributedWorldModel {
    pub fn model(&self, id: RobotId) -> Option<&LocalModel> {
        self.models.get(usize::from(id.0))
    }

    pub fn team_size(&self) -> usize {
        self.models.len()
    }

    /// Freshest ball sighting over all entries, seconds.
    pub fn min_ball_age(&self) -> f64 {
        self.models
            .iter()
            .map(|m| m.ball.last_seen_age)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn opponent_positions(&self) -> Vec<Point2> {
        self.obstacles.opponents().map(|c| c.mean).collect()
    }
}

/// Selection score of a ball estimate: lower is better.
pub(crate) fn ball_score(ball: &BallEstimate, params: &WorldModelParams) -> f64 {
    ball.position_trace() + params.fusion_age_weight * ball.last_seen_age
}

/// Merges one model per team member.
///
/// The fused ball is the entry with the lowest `trace(P_pos) + κ·age`
/// (ties to the lowest id). Obstacles are the union of all components with
/// same-team pairs closer than the merge radius collapsed by moment matching,
/// then capped by weight.
pub fn fuse(
    models: &[LocalModel],
    team_size: usize,
    params: &WorldModelParams,
) -> Result<DistributedWorldModel, WorldModelError> {
    let mut slots: Vec<Option<&LocalModel>> = alloc::vec![None; team_size];
    for m in models {
        let idx = usize::from(m.owner.0);
        match slots.get_mut(idx) {
            Some(slot @ None) => *slot = Some(m),
            Some(Some(_)) => return Err(WorldModelError::DuplicateTeammate(m.owner)),
            None => return Err(WorldModelError::UnknownTeammate(m.owner)),
        }
    }
    let ordered: Vec<LocalModel> = slots
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.cloned()
                .ok_or(WorldModelError::MissingTeammate(RobotId(i as u8)))
        })
        .collect::<Result<_, _>>()?;
    let Some(first) = ordered.first() else {
        return Err(WorldModelError::MissingTeammate(RobotId(0)));
    };

    let mut best = first;
    let mut best_score = ball_score(&first.ball, params);
    for m in &ordered[1..] {
        let s = ball_score(&m.ball, params);
        if s < best_score {
            best = m;
            best_score = s;
        }
    }
    let ball = best.ball.clone();
    let ball_source = best.owner;

    let mut merged: Vec<ObstacleComponent> = Vec::new();
    for c in ordered.iter().flat_map(|m| m.obstacles.components.iter()) {
        let target = merged
            .iter()
            .enumerate()
            .filter(|(_, f)| f.opponent == c.opponent && f.mean.distance(c.mean) <= params.merge_radius)
            .min_by(|(_, a), (_, b)| {
                a.mean
                    .distance_squared(c.mean)
                    .total_cmp(&b.mean.distance_squared(c.mean))
            })
            .map(|(i, _)| i);
        match target {
            Some(i) => merged[i] = moment_match(&merged[i], c),
            None => merged.push(c.clone()),
        }
    }
    let mut obstacles = ObstacleModel { components: merged };
    obstacles.truncate_by_weight(params.max_obstacles);

    let timestamp = ordered.iter().map(|m| m.timestamp).fold(f64::NEG_INFINITY, f64::max);
    Ok(DistributedWorldModel {
        models: ordered,
        ball,
        ball_source,
        obstacles,
        timestamp,
    })
}

/// Single Gaussian matching the first two moments of the weighted pair.
fn moment_match(a: &ObstacleComponent, b: &ObstacleComponent) -> ObstacleComponent {
    let w = a.weight + b.weight;
    let (wa, wb) = (a.weight / w, b.weight / w);
    let mean = a.mean * wa + b.mean * wb;
    let spread = |c: &ObstacleComponent| {
        let d = Vector2::new(c.mean.x - mean.x, c.mean.y - mean.y);
        c.covariance + d * d.transpose()
    };
    let covariance: Matrix2<f64> = spread(a) * wa + spread(b) * wb;
    ObstacleComponent {
        weight: a.weight.max(b.weight),
        mean,
        covariance: symmetrize2(covariance),
        opponent: a.opponent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world_model::RobotPose;
    use alloc::vec;
    use nalgebra::Matrix3;

    fn model(owner: u8, ball_var: f64, age: f64) -> LocalModel {
        let mut ball = BallEstimate::at_rest(Point2::new(f64::from(owner), 0.0), ball_var, 0.1);
        ball.last_seen_age = age;
        LocalModel {
            owner: RobotId(owner),
            ball,
            obstacles: ObstacleModel::default(),
            pose: RobotPose::new(Point2::ORIGIN, 0.0, Matrix3::identity()),
            timestamp: 1.0,
        }
    }

    #[test]
    fn unanimous_models_fuse_to_the_same_ball() {
        let mut a = model(0, 0.1, 1.0);
        let mut b = model(1, 0.1, 1.0);
        a.ball.position = Point2::new(2.0, 2.0);
        b.ball.position = Point2::new(2.0, 2.0);
        let dwm = fuse(&[a.clone(), b], 2, &WorldModelParams::default()).unwrap();
        assert_eq!(dwm.ball, a.ball);
        assert_eq!(dwm.ball_source, RobotId(0));
    }

    #[test]
    fn fresh_ball_beats_stale_ball() {
        let stale = model(0, 0.5, 10.0);
        let fresh = model(1, 0.01, 0.0);
        let dwm = fuse(&[stale, fresh], 2, &WorldModelParams::default()).unwrap();
        assert_eq!(dwm.ball_source, RobotId(1));
    }

    #[test]
    fn missing_and_duplicate_teammates() {
        let p = WorldModelParams::default();
        assert_eq!(
            fuse(&[model(0, 0.1, 0.0), model(2, 0.1, 0.0)], 3, &p),
            Err(WorldModelError::MissingTeammate(RobotId(1)))
        );
        assert_eq!(
            fuse(&[model(0, 0.1, 0.0), model(0, 0.1, 0.0)], 2, &p),
            Err(WorldModelError::DuplicateTeammate(RobotId(0)))
        );
    }

    #[test]
    fn nearby_obstacles_merge() {
        let comp = |x: f64, w: f64| ObstacleComponent {
            weight: w,
            mean: Point2::new(x, 0.0),
            covariance: Matrix2::identity() * 0.01,
            opponent: true,
        };
        let mut a = model(0, 0.1, 0.0);
        let mut b = model(1, 0.1, 0.0);
        a.obstacles.components = vec![comp(1.0, 1.0), comp(3.0, 0.5)];
        b.obstacles.components = vec![comp(1.2, 1.0)];
        let dwm = fuse(&[a, b], 2, &WorldModelParams::default()).unwrap();
        assert_eq!(dwm.obstacles.components.len(), 2);
        let m = &dwm.obstacles.components[0];
        assert!((m.mean.x - 1.1).abs() < 1e-12);
        // 0.01 + 0.1² spread.
        assert!((m.covariance[(0, 0)] - 0.02).abs() < 1e-12);
    }
}
