use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector2};

use super::{symmetrize2, WorldModelParams};
use crate::geometry::Point2;

/// One Gaussian of the obstacle mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleComponent {
    pub weight: f64,
    pub mean: Point2,
    pub covariance: Matrix2<f64>,
    /// Team label supplied by perception; only opponents become Voronoi sites.
    pub opponent: bool,
}

/// Gaussian-mixture obstacle model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObstacleModel {
    pub components: Vec<ObstacleComponent>,
}

impl ObstacleModel {
    pub fn opponents(&self) -> impl Iterator<Item = &ObstacleComponent> + '_ {
        self.components.iter().filter(|c| c.opponent)
    }

    /// Keeps the `max` heaviest components; equal weights keep their order.
    pub fn truncate_by_weight(&mut self, max: usize) {
        if self.components.len() <= max {
            return;
        }
        self.components
            .sort_by(|a, b| b.weight.total_cmp(&a.weight));
        self.components.truncate(max);
    }
}

/// A single obstacle sighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleObservation {
    pub position: Point2,
    pub opponent: bool,
    /// Isotropic position variance, m².
    pub variance: f64,
}

/// Diffuses and fades every component over `dt`, pruning the faint ones.
pub fn propagate_obstacles(obs: &ObstacleModel, dt: f64, params: &WorldModelParams) -> ObstacleModel {
    if dt == 0.0 {
        return obs.clone();
    }
    let decay = libm::exp(-params.obstacle_decay * dt);
    let inflate = Matrix2::identity() * (params.obstacle_diffusion * dt);
    let components = obs
        .components
        .iter()
        .map(|c| ObstacleComponent {
            weight: c.weight * decay,
            covariance: symmetrize2(c.covariance + inflate),
            ..*c
        })
        .filter(|c| c.weight >= params.min_obstacle_weight)
        .collect();
    ObstacleModel { components }
}

/// Associates each sighting to the nearest unused component of the same team
/// within the gate and applies a position update; unmatched sightings spawn
/// new components.
pub fn observe_obstacles(
    obs: &ObstacleModel,
    sightings: &[ObstacleObservation],
    params: &WorldModelParams,
) -> ObstacleModel {
    let mut out = obs.clone();
    let mut used = alloc::vec![false; out.components.len()];
    for s in sightings {
        let candidate = out
            .components
            .iter()
            .enumerate()
            .filter(|(i, c)| {
                !used.get(*i).copied().unwrap_or(true)
                    && c.opponent == s.opponent
                    && c.mean.distance(s.position) <= params.obstacle_gate
            })
            .min_by(|(_, a), (_, b)| {
                a.mean
                    .distance_squared(s.position)
                    .total_cmp(&b.mean.distance_squared(s.position))
            })
            .map(|(i, _)| i);
        let noise = Matrix2::identity() * s.variance;
        match candidate {
            Some(i) => {
                let c = &mut out.components[i];
                let gain_den = c.covariance + noise;
                if let Some(inv) = gain_den.try_inverse() {
                    let k = c.covariance * inv;
                    let innovation = Vector2::new(s.position.x - c.mean.x, s.position.y - c.mean.y);
                    let delta = k * innovation;
                    c.mean = c.mean + Point2::new(delta[0], delta[1]);
                    let i_k = Matrix2::identity() - k;
                    c.covariance = symmetrize2(i_k * c.covariance * i_k.transpose() + k * noise * k.transpose());
                }
                c.weight = 1.0;
                used[i] = true;
            }
            None => {
                out.components.push(ObstacleComponent {
                    weight: 1.0,
                    mean: s.position,
                    covariance: noise,
                    opponent: s.opponent,
                });
                used.push(true);
            }
        }
    }
    out.truncate_by_weight(params.max_obstacles);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(weight: f64) -> ObstacleModel {
        ObstacleModel {
            components: alloc::vec![ObstacleComponent {
                weight,
                mean: Point2::new(1.0, 2.0),
                covariance: Matrix2::identity() * 0.1,
                opponent: true,
            }],
        }
    }

    #[test]
    fn zero_dt_is_identity() {
        let m = one(0.7);
        assert_eq!(propagate_obstacles(&m, 0.0, &WorldModelParams::default()), m);
    }

    #[test]
    fn weight_decays_exponentially() {
        let out = propagate_obstacles(&one(1.0), 1.0, &WorldModelParams::default());
        assert!((out.components[0].weight - libm::exp(-0.1)).abs() < 1e-15);
        assert!((out.components[0].weight - 0.9048).abs() < 1e-4);
        // σ² = 0.04 per second on each axis.
        assert!((out.components[0].covariance[(0, 0)] - 0.14).abs() < 1e-15);
    }

    #[test]
    fn faint_components_are_pruned() {
        // exp(-0.1 · 30) ≈ 0.0498 < 0.05.
        let out = propagate_obstacles(&one(1.0), 30.0, &WorldModelParams::default());
        assert!(out.components.is_empty());
    }

    #[test]
    fn sightings_update_or_spawn() {
        let params = WorldModelParams::default();
        let m = one(0.4);
        let out = observe_obstacles(
            &m,
            &[
                ObstacleObservation { position: Point2::new(1.1, 2.0), opponent: true, variance: 0.1 },
                ObstacleObservation { position: Point2::new(-3.0, 0.0), opponent: false, variance: 0.1 },
            ],
            &params,
        );
        assert_eq!(out.components.len(), 2);
        assert_eq!(out.components[0].weight, 1.0);
        // Equal prior and measurement variance: halfway.
        assert!((out.components[0].mean.x - 1.05).abs() < 1e-12);
        assert!(!out.components[1].opponent);
    }
}
