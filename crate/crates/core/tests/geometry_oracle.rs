//! Delaunay and Voronoi output checked against brute-force definitions.

use std::time::Instant;

use dta_core::geometry::{delaunay_triangulate, region_of, voronoi_diagram, Bounds, NodeKind, Point2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn bounds() -> Bounds {
    Bounds::new(Point2::new(-5.0, -3.5), Point2::new(5.0, 3.5))
}

fn random_sites(rng: &mut ChaCha8Rng) -> Vec<Point2> {
    let n = rng.random_range(3..=11);
    (0..n)
        .map(|_| Point2::new(rng.random_range(-4.5..4.5), rng.random_range(-3.0..3.0)))
        .collect()
}

/// Circumcircle by the textbook determinant formula.
fn circumcircle(a: Point2, b: Point2, c: Point2) -> (f64, f64, f64) {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y);
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let r = ((a.x - ux).powi(2) + (a.y - uy).powi(2)).sqrt();
    (ux, uy, r)
}

fn brute_nearest(sites: &[Point2], q: Point2) -> usize {
    let mut best = 0;
    for i in 1..sites.len() {
        if q.distance_squared(sites[i]) < q.distance_squared(sites[best]) {
            best = i;
        }
    }
    best
}

/// Inside or on a counter-clockwise convex polygon, up to `TOL`.
fn in_convex_polygon(poly: &[Point2], q: Point2) -> bool {
    (0..poly.len()).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let edge = b - a;
        let cross = edge.x * (q.y - a.y) - edge.y * (q.x - a.x);
        cross >= -TOL * edge.norm().max(1.0)
    })
}

fn check_instance(sites: &[Point2], rng: &mut ChaCha8Rng) {
    let tri = delaunay_triangulate(sites).expect("random sites triangulate");
    for t in &tri.triangles {
        let [a, b, c] = t.map(|i| tri.vertices[i]);
        let (ux, uy, r) = circumcircle(a, b, c);
        for (k, &p) in tri.vertices.iter().enumerate() {
            if t.contains(&k) {
                continue;
            }
            let d = ((p.x - ux).powi(2) + (p.y - uy).powi(2)).sqrt();
            assert!(d >= r - TOL * r.max(1.0), "vertex {k} inside circumcircle of {t:?}: {d} < {r}");
        }
    }

    let diagram = voronoi_diagram(sites, bounds()).expect("diagram");
    let s = &diagram.sites;
    for node in diagram.nodes.iter().filter(|n| n.kind == NodeKind::Interior) {
        let dists: Vec<f64> = s.iter().map(|&p| p.distance(node.position)).collect();
        let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let ties = dists.iter().filter(|&&d| d - min <= TOL).count();
        assert!(ties >= 3, "node {:?} is nearest to only {ties} sites", node.position);
        for &i in &node.sites {
            assert!((dists[i] - min).abs() <= TOL);
        }
    }

    let b = bounds();
    for _ in 0..1000 {
        let q = Point2::new(rng.random_range(b.min.x..b.max.x), rng.random_range(b.min.y..b.max.y));
        let region = region_of(&diagram, q).expect("diagram has sites");
        let brute = brute_nearest(s, q);
        assert!(
            region == brute || (q.distance(s[region]) - q.distance(s[brute])).abs() <= TOL,
            "query {q:?}: region {region}, nearest {brute}"
        );
        assert!(in_convex_polygon(&diagram.regions[region], q), "query {q:?} outside region polygon {region}");
    }
}

#[test]
fn two_hundred_random_site_sets_match_the_definitions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let sites = random_sites(&mut rng);
        check_instance(&sites, &mut rng);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
}

#[test]
fn cocircular_square_splits_deterministically() {
    let sq = [
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ];
    let a = delaunay_triangulate(&sq).unwrap();
    let b = delaunay_triangulate(&sq).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.triangles.len(), 2);
    let diagram = voronoi_diagram(&sq, bounds()).unwrap();
    let center = Point2::new(0.5, 0.5);
    assert!(diagram.nodes.iter().any(|n| n.position.distance(center) < TOL));
}

fn site_set() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-4.0f64..4.0, -2.5f64..2.5), 3..=9)
}

proptest! {
    #[test]
    fn translation_moves_every_node(raw in site_set(), dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let sites: Vec<Point2> = raw.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        let by = Point2::new(dx, dy);
        let moved: Vec<Point2> = sites.iter().map(|&p| p + by).collect();
        let big = Bounds::new(Point2::new(-1e4, -1e4), Point2::new(1e4, 1e4));
        let (Ok(a), Ok(b)) = (voronoi_diagram(&sites, big), voronoi_diagram(&moved, big.translated(by))) else {
            return Ok(());
        };
        let mut pa: Vec<Point2> = a.interior_nodes().map(|n| n.position + by).collect();
        let mut pb: Vec<Point2> = b.interior_nodes().map(|n| n.position).collect();
        prop_assert_eq!(pa.len(), pb.len());
        let key = |p: &Point2| (p.x * 1e6).round() as i64;
        pa.sort_by_key(key);
        pb.sort_by_key(key);
        for (p, q) in pa.iter().zip(&pb) {
            prop_assert!(p.distance(*q) < 1e-6 * p.norm().max(1.0), "{:?} vs {:?}", p, q);
        }
    }

    #[test]
    fn every_site_owns_its_own_region(raw in site_set()) {
        let sites: Vec<Point2> = raw.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        let diagram = voronoi_diagram(&sites, bounds()).unwrap();
        for (i, &s) in diagram.sites.iter().enumerate() {
            prop_assert_eq!(region_of(&diagram, s), Some(i));
            prop_assert!(in_convex_polygon(&diagram.regions[i], s));
        }
    }
}
