use alloc::vec;
use alloc::vec::Vec;

use super::delaunay::{all_collinear, dedup_sites};
use super::{
    circumcenter, delaunay_triangulate, Bounds, GeometryError, Point2, Triangulation, EPS_GEOM,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NodeKind {
    /// Circumcenter of one or more Delaunay triangles, inside the bounds.
    Interior,
    /// Where a Voronoi edge leaves the clipping rectangle.
    Boundary,
    /// Stand-in node at the center of the bounds when fewer than two sites exist.
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiNode {
    pub position: Point2,
    pub kind: NodeKind,
    /// Sites this node is equidistant to, ascending.
    pub sites: Vec<usize>,
}

/// A clipped Voronoi edge `E_ij`: the segment between two nodes separating
/// sites `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoronoiEdge {
    pub nodes: (usize, usize),
    pub sites: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    /// Sites after merging near-duplicates.
    pub sites: Vec<Point2>,
    pub nodes: Vec<VoronoiNode>,
    pub edges: Vec<VoronoiEdge>,
    /// `regions[i]` is the counter-clockwise polygon of points nearest to site `i`.
    pub regions: Vec<Vec<Point2>>,
    pub bounds: Bounds,
}

impl VoronoiDiagram {
    pub fn node_positions(&self) -> impl Iterator<Item = Point2> + '_ {
        self.nodes.iter().map(|n| n.position)
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = &VoronoiNode> + '_ {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Interior)
    }
}

/// Builds the clipped diagram of `sites`, falling back to direct bisectors
/// when a triangulation does not exist.
///
/// - no site or one site: a single [`NodeKind::Fallback`] node at the center;
/// - two sites, or all collinear: clipped perpendicular bisectors;
/// - otherwise the dual of the Delaunay triangulation.
pub fn voronoi_diagram(sites: &[Point2], bounds: Bounds) -> Result<VoronoiDiagram, GeometryError> {
    let (kept, _) = dedup_sites(sites);
    if kept.len() < 2 {
        let mut builder = Builder::new(kept, bounds);
        builder.nodes.push(VoronoiNode {
            position: bounds.center(),
            kind: NodeKind::Fallback,
            sites: Vec::new(),
        });
        return Ok(builder.finish());
    }
    if all_collinear(&kept) {
        return Ok(collinear_diagram(kept, bounds));
    }
    let tri = delaunay_triangulate(&kept)?;
    voronoi_from_delaunay(&tri, bounds)
}

/// Dual of `tri`, clipped to `bounds`.
///
/// Nodes are the circumcenters that fall inside the bounds plus the points
/// where edges cross the bounds. Adjacent triangles give finite edges; hull
/// edges give rays pointing away from the triangulation.
pub fn voronoi_from_delaunay(
    tri: &Triangulation,
    bounds: Bounds,
) -> Result<VoronoiDiagram, GeometryError> {
    let pts = &tri.vertices;
    let centers = tri
        .triangles
        .iter()
        .map(|t| circumcenter(pts[t[0]], pts[t[1]], pts[t[2]]))
        .collect::<Result<Vec<_>, _>>()?;

    let mut builder = Builder::new(pts.clone(), bounds);
    let mut center_node = vec![None; centers.len()];
    for (t, &c) in centers.iter().enumerate() {
        if bounds.contains(c) {
            let mut sites = tri.triangles[t].to_vec();
            sites.sort_unstable();
            center_node[t] = Some(builder.intern(c, NodeKind::Interior, &sites));
        }
    }

    for (t, tri_v) in tri.triangles.iter().enumerate() {
        for k in 0..3 {
            let (i, j) = (tri_v[(k + 1) % 3], tri_v[(k + 2) % 3]);
            let site_pair = if i < j { (i, j) } else { (j, i) };
            match tri.adjacency[t][k] {
                Some(u) if u > t => {
                    let dir = centers[u] - centers[t];
                    builder.add_clipped(
                        centers[t],
                        dir,
                        1.0,
                        (center_node[t], center_node[u]),
                        site_pair,
                    );
                }
                Some(_) => {}
                None => {
                    // Hull edge i->j with the interior on its left: the ray
                    // heads along the right-hand normal.
                    let d = pts[j] - pts[i];
                    let outward = Point2::new(d.y, -d.x);
                    builder.add_clipped(
                        centers[t],
                        outward,
                        f64::INFINITY,
                        (center_node[t], None),
                        site_pair,
                    );
                }
            }
        }
    }
    Ok(builder.finish())
}

fn collinear_diagram(sites: Vec<Point2>, bounds: Bounds) -> VoronoiDiagram {
    let a = sites[0];
    let axis = sites
        .iter()
        .map(|&p| p - a)
        .max_by(|u, v| u.norm_squared().total_cmp(&v.norm_squared()))
        .unwrap_or(Point2::new(1.0, 0.0));
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&i, &j| {
        (sites[i] - a)
            .dot(axis)
            .total_cmp(&(sites[j] - a).dot(axis))
            .then(i.cmp(&j))
    });

    let mut builder = Builder::new(sites.clone(), bounds);
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        let mid = sites[i].midpoint(sites[j]);
        let dir = (sites[j] - sites[i]).perp();
        let pair = if i < j { (i, j) } else { (j, i) };
        builder.add_line(mid, dir, pair);
    }
    builder.finish()
}

struct Builder {
    sites: Vec<Point2>,
    bounds: Bounds,
    nodes: Vec<VoronoiNode>,
    edges: Vec<VoronoiEdge>,
}

impl Builder {
    fn new(sites: Vec<Point2>, bounds: Bounds) -> Self {
        Builder {
            sites,
            bounds,
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Returns the index of the node at `p`, merging with any existing node
    /// within [`EPS_GEOM`].
    fn intern(&mut self, p: Point2, kind: NodeKind, sites: &[usize]) -> usize {
        if let Some(idx) = self
            .nodes
            .iter()
            .position(|n| n.position.distance(p) <= EPS_GEOM)
        {
            let node = &mut self.nodes[idx];
            for &s in sites {
                if !node.sites.contains(&s) {
                    node.sites.push(s);
                }
            }
            node.sites.sort_unstable();
            if kind == NodeKind::Interior {
                node.kind = NodeKind::Interior;
            }
            return idx;
        }
        self.nodes.push(VoronoiNode {
            position: p,
            kind,
            sites: sites.to_vec(),
        });
        self.nodes.len() - 1
    }

    /// Clips `origin + t·dir`, `t ∈ [0, t_end]`, and records the surviving
    /// piece. `known` carries node ids already interned for the endpoints
    /// at `t = 0` and `t = t_end`.
    fn add_clipped(
        &mut self,
        origin: Point2,
        dir: Point2,
        t_end: f64,
        known: (Option<usize>, Option<usize>),
        sites: (usize, usize),
    ) {
        if dir.norm_squared() == 0.0 {
            return;
        }
        let Some((t0, t1)) = self.bounds.clip_parametric(origin, dir, 0.0, t_end) else {
            return;
        };
        let start = self.endpoint(origin, dir, t0, 0.0, known.0, sites);
        let end = self.endpoint(origin, dir, t1, t_end, known.1, sites);
        self.push_edge(start, end, sites);
    }

    fn add_line(&mut self, origin: Point2, dir: Point2, sites: (usize, usize)) {
        let Some((t0, t1)) =
            self.bounds
                .clip_parametric(origin, dir, f64::NEG_INFINITY, f64::INFINITY)
        else {
            return;
        };
        let pair = [sites.0, sites.1];
        let start = self.intern(origin + dir * t0, NodeKind::Boundary, &pair);
        let end = self.intern(origin + dir * t1, NodeKind::Boundary, &pair);
        self.push_edge(start, end, sites);
    }

    fn endpoint(
        &mut self,
        origin: Point2,
        dir: Point2,
        t: f64,
        t_unclipped: f64,
        known: Option<usize>,
        sites: (usize, usize),
    ) -> usize {
        match known {
            Some(id) if t == t_unclipped => id,
            _ => self.intern(origin + dir * t, NodeKind::Boundary, &[sites.0, sites.1]),
        }
    }

    fn push_edge(&mut self, a: usize, b: usize, sites: (usize, usize)) {
        if a == b {
            return;
        }
        let nodes = if a < b { (a, b) } else { (b, a) };
        if !self.edges.iter().any(|e| e.nodes == nodes) {
            self.edges.push(VoronoiEdge { nodes, sites });
        }
    }

    fn finish(self) -> VoronoiDiagram {
        let regions = (0..self.sites.len())
            .map(|i| region_polygon(&self.sites, i, self.bounds))
            .collect();
        VoronoiDiagram {
            sites: self.sites,
            nodes: self.nodes,
            edges: self.edges,
            regions,
            bounds: self.bounds,
        }
    }
}

/// The bounds rectangle cut by every bisector half-plane of site `i`.
fn region_polygon(sites: &[Point2], i: usize, bounds: Bounds) -> Vec<Point2> {
    let mut poly: Vec<Point2> = bounds.corners().to_vec();
    let si = sites[i];
    for (j, &sj) in sites.iter().enumerate() {
        if j == i || poly.is_empty() {
            continue;
        }
        // Keep p with (sj - si)·p <= (|sj|² - |si|²) / 2.
        let normal = sj - si;
        let offset = 0.5 * (sj.norm_squared() - si.norm_squared());
        poly = clip_half_plane(&poly, normal, offset);
    }
    poly
}

fn clip_half_plane(poly: &[Point2], normal: Point2, offset: f64) -> Vec<Point2> {
    let side = |p: Point2| normal.dot(p) - offset;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (k, &cur) in poly.iter().enumerate() {
        let next = poly[(k + 1) % poly.len()];
        let (sc, sn) = (side(cur), side(next));
        if sc <= 0.0 {
            out.push(cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let t = sc / (sc - sn);
            out.push(cur.lerp(next, t));
        }
    }
    out
}

/// Node closest to `p`; ties go to the lowest node index.
pub fn nearest_node(diagram: &VoronoiDiagram, p: Point2) -> Result<(usize, f64), GeometryError> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, node) in diagram.nodes.iter().enumerate() {
        let d2 = node.position.distance_squared(p);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((idx, d2));
        }
    }
    best.map(|(idx, d2)| (idx, libm::sqrt(d2)))
        .ok_or(GeometryError::EmptyDiagram)
}

/// Site whose region contains `p` (nearest site; ties to the lowest index).
/// `None` only for a diagram without sites.
pub fn region_of(diagram: &VoronoiDiagram, p: Point2) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, &s) in diagram.sites.iter().enumerate() {
        let d2 = s.distance_squared(p);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((idx, d2));
        }
    }
    best.map(|(idx, _)| idx)
}
