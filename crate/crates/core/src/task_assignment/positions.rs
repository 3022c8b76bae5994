use alloc::vec::Vec;

use super::{TaskError, TaskSpec};
use crate::geometry::{nearest_node, voronoi_diagram, Field, NodeKind, Point2, VoronoiDiagram, VoronoiNode};
use crate::world_model::DistributedWorldModel;

/// Voronoi diagram of the fused opponent positions, clipped to the field
/// plus margin.
///
/// Sites are clamped into the clip rectangle first. If the diagram cannot be
/// built or ends up without a node, a single fallback node at the center is
/// used, so the result always has at least one node.
pub fn generate_positions(dwm: &DistributedWorldModel, field: &Field) -> VoronoiDiagram {
    let bounds = field.clip_bounds();
    let sites: Vec<Point2> = dwm.opponent_positions().into_iter().map(|p| bounds.clamp(p)).collect();
    let mut diagram = voronoi_diagram(&sites, bounds).unwrap_or_else(|_| {
        voronoi_diagram(&[], bounds).expect("the empty diagram always exists")
    });
    if diagram.nodes.is_empty() {
        diagram.nodes.push(VoronoiNode {
            position: bounds.center(),
            kind: NodeKind::Fallback,
            sites: Vec::new(),
        });
    }
    diagram
}

/// Keeps every mandatory task and fills the remaining `n` slots with the
/// optional tasks whose targets are nearest to a Voronoi node (ties to the
/// lower id). The result is ordered by id.
pub fn filter_tasks(tasks: &[TaskSpec], diagram: &VoronoiDiagram, n: usize) -> Result<Vec<TaskSpec>, TaskError> {
    if tasks.len() < n {
        return Err(TaskError::TooFewTasks { tasks: tasks.len(), team: n });
    }
    let mandatory = tasks.iter().filter(|t| t.mandatory).count();
    if mandatory > n {
        return Err(TaskError::TooManyMandatory { mandatory, team: n });
    }
    let mut optional = tasks
        .iter()
        .filter(|t| !t.mandatory)
        .map(|t| Ok((nearest_node(diagram, t.target)?.1, t.id)))
        .collect::<Result<Vec<_>, TaskError>>()?;
    optional.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    optional.truncate(n - mandatory);

    let mut kept: Vec<TaskSpec> = tasks
        .iter()
        .filter(|t| t.mandatory || optional.iter().any(|&(_, id)| id == t.id))
        .copied()
        .collect();
    kept.sort_by_key(|t| t.id);
    Ok(kept)
}

/// Moves each optional target `alpha` of the way to its nearest node.
pub fn refine_targets(tasks: &[TaskSpec], diagram: &VoronoiDiagram, alpha: f64) -> Result<Vec<TaskSpec>, TaskError> {
    tasks
        .iter()
        .map(|t| {
            if t.mandatory {
                return Ok(*t);
            }
            let (node, _) = nearest_node(diagram, t.target)?;
            Ok(TaskSpec {
                target: t.target.lerp(diagram.nodes[node].position, alpha),
                ..*t
            })
        })
        .collect()
}
