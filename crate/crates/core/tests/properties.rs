use ccm_core::generate::simplex_quality;
use ccm_core::spherical::spherical_ccm;
use ccm_core::{
    gram_measure, signed_volume, Chain, Point, Simplex, SphericalSimplex, Term, Vector,
};
use proptest::prelude::*;

const QUALITY: f64 = 1e-4;

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0_f64, n)
}

fn points(count: usize, n: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(coords(n), count)
        .prop_map(|rows| rows.into_iter().map(|r| Point::new(r).unwrap()).collect())
}

/// k-simplices in R^n for k in 1..=max_k and n in k..=k+extra.
fn simplex_vertices(max_k: usize, extra: usize) -> impl Strategy<Value = Vec<Point>> {
    (1..=max_k, 0..=extra).prop_flat_map(|(k, e)| points(k + 1, k + e))
}

fn unit(n: usize) -> impl Strategy<Value = Vector> {
    coords(n).prop_filter_map("zero vector", |c| Vector::new(c).unwrap().normalized())
}

/// Rotation `H(a) H(b)` of R^n as two Householder reflections.
fn rotation(n: usize) -> impl Strategy<Value = (Vector, Vector)> {
    (unit(n), unit(n))
}

fn reflect(u: &Vector, x: &Vector) -> Vector {
    let mut r = x.clone();
    r.add_scaled(-2.0 * u.dot(x), u);
    r
}

fn rotate(q: &(Vector, Vector), x: &Vector) -> Vector {
    reflect(&q.0, &reflect(&q.1, x))
}

fn rigid(q: &(Vector, Vector), t: &Vector, p: &Point) -> Point {
    &rotate(q, &p.to_vector()).to_point() + t
}

fn rel(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn good(vs: &[Point]) -> bool {
    simplex_quality(vs).is_ok_and(|q| q >= QUALITY)
}

/// Distance from the origin to the affine hull of `vs`, by Gram-Schmidt.
fn origin_distance(vs: &[Vector]) -> f64 {
    let mut basis: Vec<Vector> = Vec::new();
    for v in &vs[1..] {
        let mut e = v - &vs[0];
        for _ in 0..2 {
            for b in &basis {
                let c = e.dot(b);
                e.add_scaled(-c, b);
            }
        }
        basis.push(e.normalized().unwrap());
    }
    let mut r = vs[0].clone();
    for b in &basis {
        let c = r.dot(b);
        r.add_scaled(-c, b);
    }
    r.norm()
}

proptest! {
    #![proptest_config(ProptestConfig { max_global_rejects: 100_000, ..ProptestConfig::with_cases(256) })]

    #[test]
    fn gram_measure_matches_signed_volume((d, vs) in (1..=5usize).prop_flat_map(|d| (Just(d), points(d + 1, d)))) {
        prop_assume!(good(&vs));
        let g = gram_measure(&vs).unwrap();
        let s = signed_volume(&vs).unwrap();
        prop_assert!(rel(g, s.abs()) <= 1e-12, "d={d} gram={g} det={s}");
    }

    #[test]
    fn gram_measure_permutation_and_rigid_invariant(
        (vs, perm, q, t) in simplex_vertices(4, 2).prop_flat_map(|vs| {
            let n = vs[0].dim();
            let idx: Vec<usize> = (0..vs.len()).collect();
            (Just(vs), Just(idx).prop_shuffle(), rotation(n), coords(n))
        })
    ) {
        prop_assume!(good(&vs));
        let base = gram_measure(&vs).unwrap();
        let permuted: Vec<Point> = perm.iter().map(|&i| vs[i].clone()).collect();
        prop_assert!(rel(gram_measure(&permuted).unwrap(), base) <= 1e-10);
        let t = Vector::new(t).unwrap();
        let moved: Vec<Point> = vs.iter().map(|p| rigid(&q, &t, p)).collect();
        prop_assert!(rel(gram_measure(&moved).unwrap(), base) <= 1e-10);
    }

    #[test]
    fn transposition_flips_sign((vs, i, j) in (1..=5usize).prop_flat_map(|d| (points(d + 1, d), 0..=d, 1..=d))) {
        prop_assume!(good(&vs));
        let j = (i + j) % vs.len();
        let mut swapped = vs.clone();
        swapped.swap(i, j);
        let a = signed_volume(&vs).unwrap();
        let b = signed_volume(&swapped).unwrap();
        prop_assert!(rel(a, -b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn pow_closed_forms_agree_and_are_negative(vs in simplex_vertices(6, 1)) {
        prop_assume!(good(&vs));
        let s = Simplex::new(vs).unwrap();
        let e = s.pow_edges();
        let c = s.pow_circum().unwrap();
        prop_assert!(e < 0.0 && c < 0.0);
        prop_assert!(rel(e, c) <= 1e-10);
    }

    #[test]
    fn pow_rigid_invariant_and_scales(
        (vs, q, t, s) in simplex_vertices(5, 1).prop_flat_map(|vs| {
            let n = vs[0].dim();
            (Just(vs), rotation(n), coords(n), 0.1..10.0_f64)
        })
    ) {
        prop_assume!(good(&vs));
        let k = vs.len() - 1;
        let base = Simplex::new(vs.clone()).unwrap().pow_edges();
        let t = Vector::new(t).unwrap();
        let moved = Simplex::new(vs.iter().map(|p| rigid(&q, &t, p)).collect()).unwrap();
        prop_assert!(rel(moved.pow_circum().unwrap(), base) <= 1e-10);
        let scaled = Simplex::new(vs.iter().map(|p| p.to_vector().scaled(s).to_point()).collect()).unwrap();
        prop_assert!(rel(scaled.pow_circum().unwrap(), base * s.powi(k as i32 + 2)) <= 1e-10);
    }

    #[test]
    fn facet_power_same_for_facet_and_parent_sphere(
        (vs, i, bary) in (2..=5usize).prop_flat_map(|d| {
            (points(d + 1, d), 0..=d, prop::collection::vec(0.0..1.0_f64, d))
        })
    ) {
        prop_assume!(good(&vs));
        let parent = Simplex::new(vs).unwrap();
        let facet = parent.facet(i).unwrap();
        prop_assume!(good(facet.vertices()));
        let total: f64 = bary.iter().sum();
        prop_assume!(total > 1e-3);
        let b: Vec<f64> = bary.iter().map(|x| x / total).collect();
        let x = facet.point_at(&b);
        let own = facet.circumsphere().unwrap().power_of_point(&x).unwrap();
        let outer_sphere = parent.circumsphere().unwrap();
        let outer = outer_sphere.power_of_point(&x).unwrap();
        // both powers are differences of squared lengths of size up to R^2
        let magnitude = outer_sphere.radius_sq.max(facet.scale().powi(2));
        prop_assert!((own - outer).abs() <= 1e-10 * magnitude, "{own} vs {outer}");
    }

    #[test]
    fn translation_moves_centers(
        (pool, raw_terms, u, t) in (2..=3usize).prop_flat_map(|n| {
            (
                points(6, n),
                prop::collection::vec((Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(), -3i64..=3), 1..5),
                coords(n),
                -2.0..2.0_f64,
            )
        })
    ) {
        let n = pool[0].dim();
        let terms: Vec<Term> = raw_terms
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(vs, c)| Term::new(vs[..=n].to_vec(), c))
            .collect();
        prop_assume!(!terms.is_empty());
        // well-shaped terms keep circumcenters within a few edge lengths
        prop_assume!(terms.iter().all(|t| {
            let vs: Vec<Point> = t.vertices.iter().map(|&i| pool[i].clone()).collect();
            simplex_quality(&vs).is_ok_and(|q| q >= 1e-2)
        }));
        let chain = Chain::new(n, n, pool, terms).unwrap();
        let total: f64 = chain
            .terms()
            .iter()
            .map(|t| t.coefficient.unsigned_abs() as f64 * chain.simplex(t).unwrap().volume())
            .sum();
        let u = Vector::new(u).unwrap();
        let moved = chain.translated(&u).unwrap();
        for (a, b) in [
            (chain.ccm().unwrap(), moved.ccm().unwrap()),
            (chain.centroid_of_mass().unwrap(), moved.centroid_of_mass().unwrap()),
            (chain.euler_point(t).unwrap(), moved.euler_point(t).unwrap()),
        ] {
            prop_assert!((a.weight - b.weight).abs() <= 1e-12 * total);
            // heavy cancellation between terms amplifies rounding in the point
            if a.weight.abs() >= 0.1 * total {
                let (p, q) = (a.point.unwrap(), b.point.unwrap());
                prop_assert!((&p + &u).distance(&q) <= 1e-10 * chain.scale(), "{p:?} + {u:?} vs {q:?}");
            }
        }
    }

    #[test]
    fn boundary_of_boundary_vanishes(
        (n, raw_terms) in (2..=4usize).prop_flat_map(|n| {
            (Just(n), prop::collection::vec((Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(), -3i64..=3), 0..8))
        })
    ) {
        let pool: Vec<Point> = (0..7).map(|i| Point::new(vec![i as f64; n]).unwrap()).collect();
        let terms: Vec<Term> = raw_terms
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(vs, c)| Term::new(vs[..=n].to_vec(), c))
            .collect();
        let chain = Chain::combinatorial(n, n, pool, terms).unwrap();
        let bb = chain.boundary().unwrap().boundary().unwrap().canonicalize();
        prop_assert!(bb.is_empty());
    }

    #[test]
    fn lift_center_is_half_inverse_height(vs in (1..=4usize).prop_flat_map(|d| prop::collection::vec(unit(d + 1), d + 1))) {
        let Ok(s) = SphericalSimplex::from_vectors(&vs) else { return Ok(()) };
        prop_assume!(good(s.lift().unwrap().vertices()));
        let o = s.lift().unwrap().circumsphere().unwrap().center.to_vector();
        let h = origin_distance(&vs);
        prop_assert!(rel(o.norm(), 1.0 / (2.0 * h)) <= 1e-10, "|o'|={} h={h}", o.norm());
        // o' here comes from the generic circumsphere solver; the weighted
        // circumcenter solves for it separately
        let w = s.weighted_circumcenter().unwrap();
        let dir = o.normalized().unwrap();
        let center = w.center.unwrap();
        prop_assert!((center.direction() - &dir).norm() <= 1e-10);
        prop_assert!(rel(w.mass, s.lift().unwrap().volume() * o.norm()) <= 1e-10);
    }

    #[test]
    fn spherical_ccm_rotates_with_vertices(
        (terms, q) in (1..=3usize).prop_flat_map(|d| (
            prop::collection::vec((prop::collection::vec(unit(d + 1), d + 1), -2i64..=2), 1..4),
            rotation(d + 1),
        ))
    ) {
        let mut plain = Vec::new();
        let mut turned = Vec::new();
        for (vs, c) in terms {
            if c == 0 {
                continue;
            }
            let Ok(s) = SphericalSimplex::from_vectors(&vs) else { continue };
            if !good(s.lift().unwrap().vertices()) {
                continue;
            }
            let r: Vec<Vector> = vs.iter().map(|v| rotate(&q, v)).collect();
            plain.push((s, c));
            turned.push((SphericalSimplex::from_vectors(&r).unwrap(), c));
        }
        prop_assume!(!plain.is_empty());
        let a = spherical_ccm(&plain).unwrap().vector;
        let b = spherical_ccm(&turned).unwrap().vector;
        let expected = rotate(&q, &a);
        let scale: f64 = plain.iter().map(|(s, c)| c.unsigned_abs() as f64 * s.weighted_circumcenter().unwrap().mass).sum();
        prop_assert!((&b - &expected).norm() <= 1e-10 * scale, "{b:?} vs {expected:?}");
    }
}
