//! Role assignment.
//!
//! Each robot runs the whole auction locally on its distributed world model:
//! pick a context, turn the catalog of roles into targets, keep the roles
//! whose targets are closest to a Voronoi node of the opponents, score every
//! (robot, role) pair and hand out roles greedily in priority order. Equal
//! inputs give equal outputs, which is all the team needs to agree.

mod assign;
mod context;
mod positions;

use alloc::vec::Vec;

pub use assign::{assign, compute_uem, Assignment, UtilityMatrix, GOALKEEPER_UTILITY};
pub use context::{default_contexts, select_context, Context, ContextCondition, UtilityWeights};
pub use positions::{filter_tasks, generate_positions, refine_targets};

use crate::geometry::{Field, GeometryError, Point2};
use crate::world_model::DistributedWorldModel;
use crate::RobotId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaskError {
    #[error("{mandatory} mandatory tasks do not fit a team of {team}")]
    TooManyMandatory { mandatory: usize, team: usize },
    #[error("{tasks} tasks cannot cover a team of {team}")]
    TooFewTasks { tasks: usize, team: usize },
    #[error("utility matrix is {rows}×{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("utility ({row}, {col}) is {value}, expected finite and non-negative")]
    InvalidUtility { row: usize, col: usize, value: f64 },
    #[error("utility matrix has {values} entries for {rows}×{cols}")]
    ShapeMismatch { rows: usize, cols: usize, values: usize },
    #[error("no context matches and none is unconditional")]
    NoContext,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Role {
    Goalkeeper,
    Striker,
    DefenderLeft,
    DefenderRight,
    Supporter,
    Jolly,
    Libero,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Goalkeeper,
        Role::Striker,
        Role::DefenderLeft,
        Role::DefenderRight,
        Role::Supporter,
        Role::Jolly,
        Role::Libero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Goalkeeper => "Goalkeeper",
            Role::Striker => "Striker",
            Role::DefenderLeft => "DefenderLeft",
            Role::DefenderRight => "DefenderRight",
            Role::Supporter => "Supporter",
            Role::Jolly => "Jolly",
            Role::Libero => "Libero",
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Whether the ball term of the utility applies.
    pub fn chases_ball(self) -> bool {
        self == Role::Striker
    }

    /// Where this role wants to stand given the ball position.
    pub fn target(self, ball: Point2, field: &Field) -> Point2 {
        let bounds = field.bounds();
        let b = bounds.clamp(ball);
        let (hl, hw) = (field.half_length(), field.half_width());
        let p = match self {
            Role::Goalkeeper => Point2::new(-hl + 0.3, (0.3 * b.y).clamp(-0.8, 0.8)),
            Role::Striker => b,
            Role::DefenderLeft => Point2::new(-hl * 2.0 / 3.0 + 0.25 * b.x, 0.37 * hw + 0.25 * b.y),
            Role::DefenderRight => Point2::new(-hl * 2.0 / 3.0 + 0.25 * b.x, -0.37 * hw + 0.25 * b.y),
            Role::Supporter => Point2::new(b.x - 1.2, 0.5 * b.y),
            Role::Jolly => {
                let side = if b.y >= 0.0 { -1.0 } else { 1.0 };
                Point2::new(b.x + 1.5, side * 0.5 * hw)
            }
            Role::Libero => Point2::new(-0.45 * hl + 0.25 * b.x, 0.25 * b.y),
        };
        bounds.clamp(p)
    }
}

impl core::fmt::Display for Role {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Catalog entry. A task's id is its index in the catalog; lower ids are
/// assigned first.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskTemplate {
    pub role: Role,
    /// Kept regardless of the Voronoi filter.
    pub mandatory: bool,
}

/// Goalkeeper, Striker (both mandatory), then the optional roles.
pub fn default_catalog() -> Vec<TaskTemplate> {
    Role::ALL
        .into_iter()
        .map(|role| TaskTemplate {
            role,
            mandatory: matches!(role, Role::Goalkeeper | Role::Striker),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSpec {
    pub id: u8,
    pub role: Role,
    pub target: Point2,
    pub mandatory: bool,
}

/// Targets for every catalog entry from the fused ball.
pub fn instantiate_tasks(catalog: &[TaskTemplate], dwm: &DistributedWorldModel, field: &Field) -> Vec<TaskSpec> {
    catalog
        .iter()
        .enumerate()
        .map(|(id, t)| TaskSpec {
            id: id as u8,
            role: t.role,
            target: t.role.target(dwm.ball.position, field),
            mandatory: t.mandatory,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoordinateOptions {
    /// Filter and refine tasks with the opponents' Voronoi nodes. Without
    /// it the first `n` catalog entries are used as they are.
    pub use_voronoi: bool,
    /// Fraction of the way each optional target moves toward its node.
    pub alpha: f64,
    pub field: Field,
}

impl Default for CoordinateOptions {
    fn default() -> Self {
        CoordinateOptions {
            use_voronoi: true,
            alpha: 0.5,
            field: Field::default(),
        }
    }
}

/// Result of one local auction.
#[derive(Debug, Clone, PartialEq)]
pub struct Coordination {
    pub context: u8,
    /// The `n` tasks that were handed out, by id.
    pub tasks: Vec<TaskSpec>,
    pub assignment: Assignment,
}

impl Coordination {
    pub fn task_for(&self, robot: RobotId) -> Option<&TaskSpec> {
        let id = self.assignment.task_of(robot)?;
        self.tasks.iter().find(|t| t.id == id)
    }
}

/// The full pipeline: context, positions, targets, filter, refinement,
/// utilities, greedy assignment.
pub fn coordinate(
    dwm: &DistributedWorldModel,
    contexts: &[Context],
    catalog: &[TaskTemplate],
    previous: Option<&Assignment>,
    options: &CoordinateOptions,
) -> Result<Coordination, TaskError> {
    let ctx = select_context(dwm, contexts).ok_or(TaskError::NoContext)?;
    let n = dwm.team_size();
    let all = instantiate_tasks(catalog, dwm, &options.field);
    let tasks = if options.use_voronoi {
        let diagram = generate_positions(dwm, &options.field);
        let kept = filter_tasks(&all, &diagram, n)?;
        refine_targets(&kept, &diagram, options.alpha)?
    } else {
        if all.len() < n {
            return Err(TaskError::TooFewTasks { tasks: all.len(), team: n });
        }
        all[..n].to_vec()
    };
    let uem = compute_uem(dwm, ctx, &tasks, previous)?;
    let assignment = assign(&uem)?;
    Ok(Coordination {
        context: ctx.id,
        tasks,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_shape() {
        let c = default_catalog();
        assert_eq!(c.len(), 7);
        assert_eq!(c.iter().filter(|t| t.mandatory).count(), 2);
        assert_eq!(c[0].role, Role::Goalkeeper);
        assert_eq!(c[1].role, Role::Striker);
    }

    #[test]
    fn role_names_roundtrip() {
        for r in Role::ALL {
            assert_eq!(Role::from_name(r.name()), Some(r));
        }
        assert_eq!(Role::from_name("Keeper"), None);
    }

    #[test]
    fn targets_stay_on_the_field() {
        let field = Field::default();
        let b = field.bounds();
        for ball in [Point2::new(9.0, 9.0), Point2::new(-4.5, -3.0), Point2::ORIGIN] {
            for r in Role::ALL {
                assert!(b.contains(r.target(ball, &field)), "{r} for {ball:?}");
            }
        }
        assert_eq!(Role::Striker.target(Point2::new(1.0, 2.0), &field), Point2::new(1.0, 2.0));
        assert_eq!(Role::Goalkeeper.target(Point2::ORIGIN, &field), Point2::new(-4.2, 0.0));
    }
}
