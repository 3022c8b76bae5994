use alloc::vec::Vec;

use super::{in_circle, orient, GeometryError, Point2, EPS_DUP};

/// A planar Delaunay triangulation.
///
/// Triangles are counter-clockwise vertex-index triples. `adjacency[t][k]`
/// is the triangle across the edge opposite vertex `k` of triangle `t`
/// (the edge `triangles[t][k+1] -> triangles[t][k+2]`), or `None` on the hull.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub vertices: Vec<Point2>,
    /// Index of the input site each vertex was taken from (after merging).
    pub source_index: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
    pub adjacency: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    /// Undirected edges, each reported once with the smaller index first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let e = if a < b { (a, b) } else { (b, a) };
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Merges sites closer than [`EPS_DUP`], keeping the first occurrence.
pub(crate) fn dedup_sites(sites: &[Point2]) -> (Vec<Point2>, Vec<usize>) {
    let mut kept: Vec<Point2> = Vec::with_capacity(sites.len());
    let mut source = Vec::with_capacity(sites.len());
    for (i, &p) in sites.iter().enumerate() {
        if kept.iter().all(|q| q.distance(p) >= EPS_DUP) {
            kept.push(p);
            source.push(i);
        }
    }
    (kept, source)
}

pub(crate) fn all_collinear(points: &[Point2]) -> bool {
    if points.len() < 3 {
        return true;
    }
    let a = points[0];
    let b = points[1];
    points[2..].iter().all(|&c| orient(a, b, c) == 0.0)
}

/// Bowyer–Watson triangulation of `sites`.
///
/// Sites closer than [`EPS_DUP`] are merged first. Exact cocircular
/// configurations are resolved toward the diagonal joining the lowest vertex
/// indices, so the output is a deterministic function of the input order.
pub fn delaunay_triangulate(sites: &[Point2]) -> Result<Triangulation, GeometryError> {
    let (vertices, source_index) = dedup_sites(sites);
    if vertices.len() < 3 {
        return Err(GeometryError::TooFewSites(vertices.len()));
    }
    if all_collinear(&vertices) {
        return Err(GeometryError::AllCollinear);
    }

    let n = vertices.len();
    let mut pts = vertices.clone();
    pts.extend_from_slice(&super_triangle(&vertices));

    let mut tris: Vec<[usize; 3]> = alloc::vec![[n, n + 1, n + 2]];
    for i in 0..n {
        insert_point(&pts, &mut tris, i);
    }
    tris.retain(|t| t.iter().all(|&v| v < n));
    pts.truncate(n);

    fill_concavities(&pts, &mut tris);
    legalize(&pts, &mut tris);

    // Canonical order: rotate each triangle so its smallest index leads, then sort.
    for t in tris.iter_mut() {
        let k = (0..3).min_by_key(|&k| t[k]).unwrap_or(0);
        t.rotate_left(k);
    }
    tris.sort_unstable();
    let adjacency = build_adjacency(&tris);

    Ok(Triangulation {
        vertices,
        source_index,
        triangles: tris,
        adjacency,
    })
}

fn super_triangle(points: &[Point2]) -> [Point2; 3] {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let c = lo.midpoint(hi);
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let r = 1.0e4 * span;
    [
        Point2::new(c.x - 2.0 * r, c.y - r),
        Point2::new(c.x + 2.0 * r, c.y - r),
        Point2::new(c.x, c.y + 2.0 * r),
    ]
}

fn insert_point(pts: &[Point2], tris: &mut Vec<[usize; 3]>, i: usize) {
    let p = pts[i];
    let mut bad = Vec::new();
    let mut keep = Vec::with_capacity(tris.len());
    for t in tris.drain(..) {
        if in_circle(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0.0 {
            bad.push(t);
        } else {
            keep.push(t);
        }
    }
    // Cavity boundary: directed edges of bad triangles whose twin is not bad.
    let mut boundary = Vec::new();
    for t in &bad {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let shared = bad.iter().any(|u| {
                (0..3).any(|m| u[m] == b && u[(m + 1) % 3] == a)
            });
            if !shared {
                boundary.push((a, b));
            }
        }
    }
    for (a, b) in boundary {
        keep.push([a, b, i]);
    }
    *tris = keep;
}

fn directed_edges(tris: &[[usize; 3]]) -> impl Iterator<Item = (usize, usize)> + '_ {
    tris.iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
}

/// Adds ears along reflex boundary vertices until the triangulated region is
/// convex. Only needed when removing the super triangle bit into the hull.
fn fill_concavities(pts: &[Point2], tris: &mut Vec<[usize; 3]>) {
    loop {
        let edges: Vec<(usize, usize)> = directed_edges(tris).collect();
        let boundary: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !edges.contains(&(b, a)))
            .collect();
        let mut added = false;
        'search: for &(a, b) in &boundary {
            for &(b2, c) in &boundary {
                if b2 != b || c == a {
                    continue;
                }
                if orient(pts[a], pts[b], pts[c]) >= 0.0 {
                    continue;
                }
                let ear = [a, c, b];
                let blocked = (0..pts.len()).any(|v| {
                    !ear.contains(&v)
                        && orient(pts[a], pts[c], pts[v]) >= 0.0
                        && orient(pts[c], pts[b], pts[v]) >= 0.0
                        && orient(pts[b], pts[a], pts[v]) >= 0.0
                });
                if !blocked {
                    tris.push(ear);
                    added = true;
                    break 'search;
                }
            }
        }
        if !added {
            return;
        }
    }
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Lawson flips until every interior edge is locally Delaunay. On exact
/// cocircularity the diagonal with the lexicographically smaller index pair
/// wins; each such flip strictly decreases the sorted edge list, so this
/// terminates.
fn legalize(pts: &[Point2], tris: &mut [[usize; 3]]) {
    loop {
        let mut flipped = false;
        'outer: for t in 0..tris.len() {
            for k in 0..3 {
                let tri = tris[t];
                let (a, b, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                // Edge b->c opposite a; the neighbor holds c->b.
                let Some((u, m)) = find_twin(tris, c, b) else {
                    continue;
                };
                let d = tris[u][(m + 2) % 3];
                let test = in_circle(pts[a], pts[b], pts[c], pts[d]);
                let flip = test > 0.0 || (test == 0.0 && sorted_pair(a, d) < sorted_pair(b, c));
                if flip {
                    tris[t] = [a, b, d];
                    tris[u] = [d, c, a];
                    flipped = true;
                    break 'outer;
                }
            }
        }
        if !flipped {
            return;
        }
    }
}

/// Triangle index and position `m` such that `tris[u][m] == a` and
/// `tris[u][m + 1] == b`.
fn find_twin(tris: &[[usize; 3]], a: usize, b: usize) -> Option<(usize, usize)> {
    tris.iter().enumerate().find_map(|(u, t)| {
        (0..3)
            .find(|&m| t[m] == a && t[(m + 1) % 3] == b)
            .map(|m| (u, m))
    })
}

fn build_adjacency(tris: &[[usize; 3]]) -> Vec<[Option<usize>; 3]> {
    tris.iter()
        .map(|t| {
            let mut adj = [None; 3];
            for (k, slot) in adj.iter_mut().enumerate() {
                let (b, c) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                *slot = find_twin(tris, c, b).map(|(u, _)| u);
            }
            adj
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn three_points_make_one_triangle() {
        let tri = delaunay_triangulate(&[p(0.0, 0.0), p(4.0, 0.0), p(2.0, 3.0)]).unwrap();
        assert_eq!(tri.triangles, vec![[0, 1, 2]]);
        assert_eq!(tri.adjacency, vec![[None, None, None]]);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let tri = delaunay_triangulate(&[p(0.0, 0.0), p(2.0, 3.0), p(4.0, 0.0)]).unwrap();
        let t = tri.triangles[0];
        assert!(orient(tri.vertices[t[0]], tri.vertices[t[1]], tri.vertices[t[2]]) > 0.0);
    }

    #[test]
    fn unit_square_uses_lowest_index_diagonal() {
        // Both diagonals are valid; 0-2 beats 1-3.
        let sq = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let tri = delaunay_triangulate(&sq).unwrap();
        assert_eq!(tri.triangles.len(), 2);
        assert!(tri.edges().contains(&(0, 2)));
        assert!(!tri.edges().contains(&(1, 3)));

        // Relabelled so that the other diagonal has the lower pair.
        let sq = [p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(0.0, 0.0)];
        let tri = delaunay_triangulate(&sq).unwrap();
        assert!(tri.edges().contains(&(0, 2)));
    }

    #[test]
    fn square_both_diagonals_have_empty_circumcircles() {
        let sq = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        for (a, b, c, d) in [(0, 1, 2, 3), (0, 2, 3, 1), (0, 1, 3, 2), (1, 2, 3, 0)] {
            assert!(in_circle(sq[a], sq[b], sq[c], sq[d]) <= 0.0);
        }
    }

    #[test]
    fn too_few_and_collinear_are_errors() {
        assert_eq!(
            delaunay_triangulate(&[p(0.0, 0.0), p(1.0, 0.0)]),
            Err(GeometryError::TooFewSites(2))
        );
        // The third point merges into the first.
        assert_eq!(
            delaunay_triangulate(&[p(0.0, 0.0), p(1.0, 0.0), p(0.001, 0.0)]),
            Err(GeometryError::TooFewSites(2))
        );
        assert_eq!(
            delaunay_triangulate(&[p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), p(3.0, 3.0)]),
            Err(GeometryError::AllCollinear)
        );
    }

    #[test]
    fn regular_polygon_cocircular_is_deterministic() {
        let pts: Vec<Point2> = (0..8)
            .map(|i| {
                let a = i as f64 * core::f64::consts::PI / 4.0;
                p(libm::round(libm::cos(a) * 1e3) / 1e3, libm::round(libm::sin(a) * 1e3) / 1e3)
            })
            .collect();
        let a = delaunay_triangulate(&pts).unwrap();
        let b = delaunay_triangulate(&pts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.triangles.len(), 6);
    }

    #[test]
    fn nearly_collinear_hull_is_covered() {
        // A thin sliver along the bottom: the super triangle would otherwise
        // swallow the hull triangle.
        let pts = [p(-4.0, 0.0), p(0.0, -1e-7), p(4.0, 0.0), p(0.0, 3.0)];
        let tri = delaunay_triangulate(&pts).unwrap();
        assert_eq!(tri.triangles.len(), 2);
    }
}
