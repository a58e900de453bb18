//! Random and fixed test geometry: simplices, convex polytope boundaries,
//! equilateral polygons, elementary cycles, and triangulations of S^2.
//!
//! Every generator takes the caller's RNG, so a suite seeded per trial
//! with [`crate::rng::stream_rng`] reproduces exactly.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::chain::{Chain, Term};
use crate::error::{GeomError, Result};
use crate::geom::{gram_ratio, Point, Vector};
use crate::simplex::{sample_barycentric, Simplex};

/// Minimum Gram ratio of generated random simplices. Simplices below this
/// are well defined but so badly conditioned that closed-form comparisons
/// at 1e-10 relative measure the conditioning rather than the identity.
pub const MIN_SAMPLE_QUALITY: f64 = 1e-4;

const MAX_ATTEMPTS: usize = 100_000;

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn gaussian_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Point {
    Point::new(gaussian_vec(rng, n)).expect("finite normal sample")
}

/// Uniformly distributed unit vector in R^n.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        if let Some(u) = Vector::new(gaussian_vec(rng, n))
            .expect("finite")
            .normalized()
        {
            return u;
        }
    }
}

fn exhausted(what: &str) -> GeomError {
    GeomError::InvalidArgument(format!(
        "could not generate {what} after {MAX_ATTEMPTS} attempts"
    ))
}

/// k-simplex in R^n with standard normal vertices and Gram ratio at least
/// [`MIN_SAMPLE_QUALITY`].
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize) -> Result<Simplex> {
    if k > n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: k,
        });
    }
    for _ in 0..MAX_ATTEMPTS {
        let vs: Vec<Point> = (0..=k).map(|_| gaussian_point(rng, n)).collect();
        if k == 0 || gram_ratio(&vs)? >= MIN_SAMPLE_QUALITY {
            return Simplex::new(vs);
        }
    }
    Err(exhausted("a random simplex"))
}

/// Points uniformly distributed on the sphere with the given center and radius.
pub fn sphere_points<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    center: &Point,
    radius: f64,
) -> Vec<Point> {
    (0..count)
        .map(|_| center + &unit_vector(rng, center.dim()).scaled(radius))
        .collect()
}

/// Points uniformly distributed in the unit ball of R^n.
pub fn ball_points<R: Rng + ?Sized>(rng: &mut R, count: usize, n: usize) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let r = rng.random::<f64>().powf(1.0 / n as f64);
            unit_vector(rng, n).scaled(r).to_point()
        })
        .collect()
}

fn cross2(o: &Point, a: &Point, b: &Point) -> f64 {
    let (o, a, b) = (o.coords(), a.coords(), b.coords());
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull of planar points as a positively oriented
/// 1-cycle whose pool holds only the hull vertices.
pub fn convex_hull_2d(points: &[Point]) -> Result<Chain> {
    if points.iter().any(|p| p.dim() != 2) {
        return Err(GeomError::DimensionMismatch {
            expected: 2,
            found: points[0].dim(),
        });
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| {
        a.coords()[0]
            .total_cmp(&b.coords()[0])
            .then(a.coords()[1].total_cmp(&b.coords()[1]))
    });
    pts.dedup();
    if pts.len() < 3 {
        return Err(GeomError::InvalidArgument(
            "hull needs three distinct points".into(),
        ));
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross2(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(GeomError::InvalidArgument("points are collinear".into()));
    }
    Chain::polygon(hull)
}

/// Boundary of the convex hull of points in general position in R^3, as a
/// 2-cycle of outward-oriented triangles. Brute force over all triples,
/// intended for a few dozen points. Four or more coplanar hull points
/// produce a non-simplicial facet and are rejected.
pub fn convex_hull_3d(points: &[Point]) -> Result<Chain> {
    if points.len() < 4 {
        return Err(GeomError::InvalidArgument("hull needs four points".into()));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != 3) {
        return Err(GeomError::DimensionMismatch {
            expected: 3,
            found: p.dim(),
        });
    }
    let scale = points
        .iter()
        .flat_map(|p| p.coords().iter().map(|c| c.abs()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale.powi(3);
    let m = points.len();
    let mut facets: Vec<[usize; 3]> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let e1 = &points[j] - &points[i];
                let e2 = &points[k] - &points[i];
                let normal = cross3(&e1, &e2);
                if normal.norm() <= eps {
                    continue;
                }
                let (mut pos, mut neg, mut flat) = (false, false, false);
                for (l, p) in points.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let s = normal.dot(&(p - &points[i]));
                    if s > eps {
                        pos = true;
                    } else if s < -eps {
                        neg = true;
                    } else {
                        flat = true;
                    }
                    if pos && neg {
                        break;
                    }
                }
                if pos && neg {
                    continue;
                }
                if flat {
                    return Err(GeomError::InvalidArgument(
                        "coplanar hull points; facet is not a triangle".into(),
                    ));
                }
                facets.push(if neg { [i, j, k] } else { [i, k, j] });
            }
        }
    }
    let mut used: Vec<usize> = facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut remap = vec![usize::MAX; m];
    for (new, &old) in used.iter().enumerate() {
        remap[old] = new;
    }
    let pool = used.iter().map(|&i| points[i].clone()).collect();
    let terms = facets
        .iter()
        .map(|f| Term::new(f.iter().map(|&i| remap[i]).collect(), 1))
        .collect();
    Chain::new(3, 2, pool, terms)
}

fn cross3(a: &Vector, b: &Vector) -> Vector {
    let (a, b) = (a.components(), b.components());
    Vector::new(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
    .expect("finite cross product")
}

/// Outward-oriented boundary of the convex hull of `count` random points in
/// the unit ball of R^dim (dim 2 or 3), with [`well_conditioned`] facets.
pub fn random_convex_polytope<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    count: usize,
) -> Result<Chain> {
    for _ in 0..MAX_ATTEMPTS {
        let pts = ball_points(rng, count, dim);
        let hull = match dim {
            2 => convex_hull_2d(&pts),
            3 => convex_hull_3d(&pts),
            d => return Err(GeomError::UnsupportedDimension(d)),
        };
        if let Ok(h) = hull {
            if well_conditioned(&h) {
                return Ok(h);
            }
        }
    }
    Err(exhausted("a convex polytope"))
}

/// Outward-oriented hull of `count` points on the sphere `(center, radius)`,
/// with [`well_conditioned`] facets.
pub fn inscribed_polytope<R: Rng + ?Sized>(
    rng: &mut R,
    center: &Point,
    radius: f64,
    count: usize,
) -> Result<Chain> {
    for _ in 0..MAX_ATTEMPTS {
        let pts = sphere_points(rng, count, center, radius);
        let hull = match center.dim() {
            2 => convex_hull_2d(&pts),
            3 => convex_hull_3d(&pts),
            d => return Err(GeomError::UnsupportedDimension(d)),
        };
        if let Ok(h) = hull {
            if well_conditioned(&h) {
                return Ok(h);
            }
        }
    }
    Err(exhausted("an inscribed polytope"))
}

fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = cross2(a, b, c);
    let d2 = cross2(a, b, d);
    let d3 = cross2(c, d, a);
    let d4 = cross2(c, d, b);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// True when no two non-adjacent edges of the closed polygon meet.
pub fn is_simple_polygon(points: &[Point]) -> bool {
    let m = points.len();
    for i in 0..m {
        for j in i + 1..m {
            if j == i + 1 || (i == 0 && j == m - 1) {
                continue;
            }
            if segments_cross(
                &points[i],
                &points[(i + 1) % m],
                &points[j],
                &points[(j + 1) % m],
            ) {
                return false;
            }
        }
    }
    true
}

/// Simple closed polygon with `n >= 3` edges of exactly unit length.
///
/// The first `n - 2` edges take uniform random directions; the walk is
/// closed by the two unit edges meeting the start (first of the two
/// two-link solutions). Rejection sampling repeats until closure is
/// feasible and the result is simple.
pub fn equilateral_polygon<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<Point>> {
    if n < 3 {
        return Err(GeomError::InvalidArgument(
            "polygon needs at least 3 edges".into(),
        ));
    }
    for _ in 0..MAX_ATTEMPTS {
        let mut pts = vec![Point::from([0.0, 0.0])];
        for _ in 0..n - 2 {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let step = Vector::from([theta.cos(), theta.sin()]);
            let next = pts.last().expect("non-empty") + &step;
            pts.push(next);
        }
        let last = pts.last().expect("non-empty").clone();
        let gap = &pts[0] - &last;
        let len = gap.norm();
        // stay clear of the folded and antipodal closures
        if !(1e-3..=2.0 - 1e-3).contains(&len) {
            continue;
        }
        let half = gap.scaled(0.5);
        let h = (1.0 - len * len / 4.0).sqrt();
        let perp = Vector::from([-gap.components()[1] / len, gap.components()[0] / len]);
        let mut step = half.clone();
        step.add_scaled(h, &perp);
        pts.push(&last + &step);
        if is_simple_polygon(&pts) {
            return Ok(pts);
        }
    }
    Err(exhausted("an equilateral polygon"))
}

/// Largest Gram ratio over the choice of base vertex. Needles (one short
/// edge) score well from a vertex of the short edge; flat caps score badly
/// from every vertex.
pub fn simplex_quality(vertices: &[Point]) -> Result<f64> {
    let mut best = 0.0_f64;
    let mut vs = vertices.to_vec();
    for _ in 0..vs.len() {
        best = best.max(gram_ratio(&vs)?);
        vs.rotate_left(1);
    }
    Ok(best)
}

/// True when every term of the chain has [`simplex_quality`] at least
/// [`MIN_SAMPLE_QUALITY`].
pub fn well_conditioned(chain: &Chain) -> bool {
    chain.terms().iter().all(|t| {
        let vs: Vec<Point> = t
            .vertices
            .iter()
            .map(|&i| chain.pool()[i].clone())
            .collect();
        simplex_quality(&vs).is_ok_and(|r| r >= MIN_SAMPLE_QUALITY)
    })
}

fn interior_barycentric<R: Rng + ?Sized>(rng: &mut R, k: usize, min: f64) -> Vec<f64> {
    let mut b = vec![0.0; k + 1];
    loop {
        sample_barycentric(rng, &mut b);
        if b.iter().all(|x| *x >= min) {
            return b;
        }
    }
}

/// The full-dimensional d-cycle `sum_i T[v_i <- p] - T` for a random
/// simplex T and an interior point p; every term is [`well_conditioned`].
pub fn central_triangulation_cycle<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Chain> {
    for _ in 0..MAX_ATTEMPTS {
        let t = random_simplex(rng, d, d)?;
        let p = t.point_at(&interior_barycentric(rng, d, 0.05));
        let mut pool = t.vertices().to_vec();
        pool.push(p);
        let apex = d + 1;
        let mut terms: Vec<Term> = (0..=d)
            .map(|i| {
                let mut vs: Vec<usize> = (0..=d).collect();
                vs[i] = apex;
                Term::new(vs, 1)
            })
            .collect();
        terms.push(Term::new((0..=d).collect(), -1));
        let chain = Chain::new(d, d, pool, terms)?;
        if well_conditioned(&chain) {
            return Ok(chain);
        }
    }
    Err(exhausted("a central triangulation cycle"))
}

/// Difference of two triangulations of the same region: the two diagonal
/// triangulations of a convex quadrilateral (d = 2), or the two- and
/// three-tetrahedron triangulations of a triangular bipyramid (d = 3).
/// Every term is [`well_conditioned`].
pub fn retriangulation_cycle<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Chain> {
    match d {
        2 => {
            for _ in 0..MAX_ATTEMPTS {
                let mut angles: Vec<f64> = (0..4)
                    .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
                    .collect();
                angles.sort_by(f64::total_cmp);
                let pool: Vec<Point> = angles
                    .iter()
                    .map(|a| {
                        let r = 0.7 + 0.6 * rng.random::<f64>();
                        Point::from([r * a.cos(), r * a.sin()])
                    })
                    .collect();
                let convex =
                    (0..4).all(|i| cross2(&pool[i], &pool[(i + 1) % 4], &pool[(i + 2) % 4]) > 0.05);
                if !convex {
                    continue;
                }
                let terms = vec![
                    Term::new(vec![0, 1, 2], 1),
                    Term::new(vec![0, 2, 3], 1),
                    Term::new(vec![1, 2, 3], -1),
                    Term::new(vec![1, 3, 0], -1),
                ];
                let chain = Chain::new(2, 2, pool, terms)?;
                if well_conditioned(&chain) {
                    return Ok(chain);
                }
            }
            Err(exhausted("a convex quadrilateral"))
        }
        3 => {
            for _ in 0..MAX_ATTEMPTS {
                let base = random_simplex(rng, 2, 3)?;
                let x = base.point_at(&interior_barycentric(rng, 2, 0.1));
                let u = unit_vector(rng, 3);
                let p = &x + &u.scaled(0.3 + rng.random::<f64>());
                let q = &x + &u.scaled(-(0.3 + rng.random::<f64>()));
                let mut pool = base.vertices().to_vec();
                pool.push(p);
                pool.push(q);
                // [p,a,b,c] and [q,a,b,c] with positive orientation
                let mut terms = Vec::new();
                for apex in [3usize, 4] {
                    let vs = vec![apex, 0, 1, 2];
                    let s = Simplex::new(vs.iter().map(|&i| pool[i].clone()).collect());
                    let Ok(s) = s else { break };
                    terms.push(Term::new(vs, s.signed_volume()?.signum() as i64));
                }
                if terms.len() != 2 {
                    continue;
                }
                let solid = Chain::new(3, 3, pool, terms)?;
                let boundary = solid.boundary()?;
                let (Ok(three), Ok(two)) = (
                    boundary.cone_fill(&boundary.pool()[3]),
                    boundary.cone_fill(&boundary.pool()[0]),
                ) else {
                    continue;
                };
                let cycle = three.minus(&two)?;
                if well_conditioned(&cycle) {
                    return Ok(cycle);
                }
            }
            Err(exhausted("a bipyramid flip"))
        }
        d => Err(GeomError::UnsupportedDimension(d)),
    }
}

/// Triangular bipyramid with all nine edges of unit length.
pub fn unit_bipyramid() -> Chain {
    let h = (2.0_f64 / 3.0).sqrt();
    let r = 1.0 / 3f64.sqrt();
    let mut pts: Vec<Point> = (0..3)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / 3.0;
            Point::from([r * a.cos(), r * a.sin(), 0.0])
        })
        .collect();
    pts.push(Point::from([0.0, 0.0, h]));
    pts.push(Point::from([0.0, 0.0, -h]));
    convex_hull_3d(&pts).expect("bipyramid hull")
}

/// Regular octahedron with unit edges.
pub fn unit_octahedron() -> Chain {
    let s = 1.0 / 2f64.sqrt();
    let mut pts = Vec::new();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut c = [0.0; 3];
            c[axis] = sign * s;
            pts.push(Point::from(c));
        }
    }
    convex_hull_3d(&pts).expect("octahedron hull")
}

/// Regular icosahedron with unit edges.
pub fn unit_icosahedron() -> Chain {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::new();
    for a in [1.0, -1.0] {
        for b in [phi, -phi] {
            pts.push(Point::from([0.0, a * 0.5, b * 0.5]));
            pts.push(Point::from([a * 0.5, b * 0.5, 0.0]));
            pts.push(Point::from([b * 0.5, 0.0, a * 0.5]));
        }
    }
    convex_hull_3d(&pts).expect("icosahedron hull")
}

/// Random triangulation of S^2: a convex polytope containing the origin,
/// centrally projected onto the unit sphere.
pub fn random_sphere_triangulation<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Result<Chain> {
    for _ in 0..100 {
        let pts: Vec<Point> = (0..count)
            .map(|_| {
                unit_vector(rng, 3)
                    .scaled(0.5 + rng.random::<f64>())
                    .to_point()
            })
            .collect();
        let Ok(hull) = convex_hull_3d(&pts) else {
            continue;
        };
        let origin = Point::origin(3);
        let contains_origin = hull.terms().iter().all(|t| {
            let v: Vec<&Point> = t.vertices.iter().map(|&i| &hull.pool()[i]).collect();
            let normal = cross3(&(v[1] - v[0]), &(v[2] - v[0]));
            normal.dot(&(&origin - v[0])) < 0.0
        });
        if !contains_origin {
            continue;
        }
        return hull.map_points(|p| p.to_vector().normalized().expect("nonzero").to_point());
    }
    Err(exhausted("a sphere triangulation"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn hull_2d_square_with_interior_point() {
        let pts: Vec<Point> = vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [0.5, 0.5].into(),
            [1.0, 1.0].into(),
            [0.0, 1.0].into(),
        ];
        let h = convex_hull_2d(&pts).unwrap();
        assert_eq!(h.pool().len(), 4);
        assert!(h.is_cycle());
        let filled = h.cone_fill(&Point::from([0.5, 0.5])).unwrap();
        assert!((filled.ccm().unwrap().weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_3d_is_positively_oriented_cycle() {
        let mut rng = stream_rng(5, 0);
        let h = random_convex_polytope(&mut rng, 3, 20).unwrap();
        assert!(h.is_cycle());
        let filled = h.fill(None).unwrap();
        let w = filled.ccm().unwrap().weight;
        assert!(w > 0.0 && w < 4.0 * std::f64::consts::PI / 3.0);
        // V - E + F = 2
        let f = h.terms().len();
        assert_eq!(h.pool().len() + f - 3 * f / 2, 2);
    }

    #[test]
    fn fixed_polytopes_have_unit_edges() {
        for (chain, faces) in [
            (unit_bipyramid(), 6),
            (unit_octahedron(), 8),
            (unit_icosahedron(), 20),
        ] {
            assert_eq!(chain.terms().len(), faces);
            for s in chain.facet_edge_square_sums() {
                assert!((s - 3.0).abs() < 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn equilateral_polygon_has_unit_edges() {
        let mut rng = stream_rng(3, 0);
        for n in [3, 6, 9, 12] {
            let pts = equilateral_polygon(&mut rng, n).unwrap();
            assert_eq!(pts.len(), n);
            for i in 0..n {
                assert!((pts[i].distance(&pts[(i + 1) % n]) - 1.0).abs() < 1e-14);
            }
            assert!(is_simple_polygon(&pts));
        }
    }

    #[test]
    fn generated_cycles_are_cycles() {
        let mut rng = stream_rng(9, 0);
        for d in [2, 3] {
            assert!(central_triangulation_cycle(&mut rng, d).unwrap().is_cycle());
            let c = retriangulation_cycle(&mut rng, d).unwrap();
            assert!(c.is_cycle());
            assert_eq!(c.canonicalize().terms().len(), if d == 2 { 4 } else { 5 });
        }
    }

    #[test]
    fn sphere_triangulation_on_unit_sphere() {
        let mut rng = stream_rng(4, 0);
        let t = random_sphere_triangulation(&mut rng, 16).unwrap();
        assert!(t.is_cycle());
        for p in t.pool() {
            assert!((p.to_vector().norm() - 1.0).abs() < 1e-15);
        }
    }
}
