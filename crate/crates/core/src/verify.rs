//! Randomized property suites, one per identity.
//!
//! Trial `i` of a suite draws its geometry from stream `(seed, i)`, so a
//! suite's outcome depends only on its configuration. Every trial yields a
//! residual and the tolerance it is held to (already scaled by the
//! geometry's size); the suite passes when no residual exceeds its
//! tolerance.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::Chain;
use crate::error::{GeomError, Result};
use crate::generate;
use crate::geom::Point;
use crate::rng::{stream_rng, StreamRng};
use crate::spherical::{spherical_cycle_residual, SphericalSimplex};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    /// Tolerance coefficient, multiplied by the per-trial scale factor.
    pub tol: f64,
}

/// One trial's residual against its scaled tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub residual: f64,
    pub allowed: f64,
}

impl Check {
    pub fn new(residual: f64, allowed: f64) -> Self {
        Check { residual, allowed }
    }

    pub fn ok(&self) -> bool {
        self.residual <= self.allowed
    }

    fn ratio(&self) -> f64 {
        if self.allowed > 0.0 {
            self.residual / self.allowed
        } else if self.residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest absolute residual over all trials.
    pub max_residual: f64,
    /// Largest residual / allowed ratio; below 1 means every trial passed.
    pub max_ratio: f64,
    pub tol: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    fn from_checks(name: &str, tol: f64, checks: &[Check]) -> Self {
        SuiteOutcome {
            name: name.to_string(),
            trials: checks.len(),
            failures: checks.iter().filter(|c| !c.ok()).count(),
            max_residual: checks.iter().map(|c| c.residual).fold(0.0, f64::max),
            max_ratio: checks.iter().map(Check::ratio).fold(0.0, f64::max),
            tol,
        }
    }
}

fn run_trials<F>(name: &str, cfg: &SuiteConfig, trial: F) -> Result<SuiteOutcome>
where
    F: Fn(usize, &mut StreamRng) -> Result<Check> + Sync,
{
    if cfg.trials == 0 {
        return Err(GeomError::InvalidArgument(
            "at least one trial required".into(),
        ));
    }
    let checks: Vec<Check> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| trial(i, &mut stream_rng(cfg.seed, i as u64)))
        .collect::<Result<_>>()?;
    Ok(SuiteOutcome::from_checks(name, cfg.tol, &checks))
}

fn pick<T: Copy>(options: &[T], i: usize) -> T {
    options[i % options.len()]
}

/// Edge form against circumradius form, `cfg.trials` simplices per
/// intrinsic dimension; ambient dimension alternates between k and k+1. A
/// non-negative value counts as a failure.
pub fn pow_forms(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    let per = cfg.trials;
    let total = SuiteConfig {
        trials: per * dims.len(),
        ..*cfg
    };
    run_trials("pow-forms", &total, |i, rng| {
        let k = dims[i / per];
        let n = k + (i % 2);
        let s = generate::random_simplex(rng, k, n)?;
        let edges = s.pow_edges();
        let circ = s.pow_circum()?;
        if !(edges < 0.0 && circ < 0.0) {
            return Ok(Check::new(f64::INFINITY, cfg.tol));
        }
        let rel = (edges - circ).abs() / edges.abs().max(circ.abs());
        Ok(Check::new(rel, cfg.tol))
    })
}

/// Monte Carlo estimate against the closed form; the residual is the
/// z-score and `cfg.tol` is the allowed number of standard errors.
pub fn pow_mc(cfg: &SuiteConfig, dims: &[usize], samples: usize) -> Result<SuiteOutcome> {
    // MC chunks parallelize internally; trials run in order
    let checks: Vec<Check> = (0..cfg.trials)
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, i as u64);
            let k = pick(dims, i);
            let s = generate::random_simplex(&mut rng, k, k)?;
            let mc_seed: u64 = rng.random();
            let est = s.pow_mc(samples, mc_seed)?;
            Ok(Check::new(est.z_score(s.pow_edges()), cfg.tol))
        })
        .collect::<Result<_>>()?;
    Ok(SuiteOutcome::from_checks("pow-mc", cfg.tol, &checks))
}

/// `|lemma_residual| <= tol * scale^(d+1)`, `cfg.trials` per dimension.
pub fn lemma(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    let per = cfg.trials;
    let total = SuiteConfig {
        trials: per * dims.len(),
        ..*cfg
    };
    run_trials("lemma", &total, |i, rng| {
        let d = dims[i / per];
        let s = generate::random_simplex(rng, d, d)?;
        let r = s.lemma_residual()?.norm();
        Ok(Check::new(r, cfg.tol * s.scale().powi(d as i32 + 1)))
    })
}

/// Both cycle moment residuals of central-triangulation and
/// retriangulation cycles, against `tol * scale^(d+1)`.
pub fn cycle_moments(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    run_trials("cycle-moments", cfg, |i, rng| {
        let d = pick(dims, i);
        let cycle = if (i / dims.len()).is_multiple_of(2) {
            generate::central_triangulation_cycle(rng, d)?
        } else {
            generate::retriangulation_cycle(rng, d)?
        };
        let (circ, diff) = cycle.cycle_moment_residuals()?;
        let r = circ.norm().max(diff.norm());
        Ok(Check::new(r, cfg.tol * cycle.scale().powi(d as i32 + 1)))
    })
}

fn random_apex(rng: &mut StreamRng, dim: usize, spread: f64) -> Point {
    let c: Vec<f64> = (0..dim)
        .map(|_| spread * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    Point::new(c).expect("finite")
}

/// A cone filling whose simplices are all [`generate::well_conditioned`]:
/// from the default apex if that qualifies, else from random apexes in the
/// cube `[-spread, spread]^n` around the pool centroid. With `skip_default`
/// only random apexes are tried.
fn conditioned_fill(
    boundary: &Chain,
    rng: &mut StreamRng,
    spread: f64,
    skip_default: bool,
) -> Result<(Point, Chain)> {
    let center = boundary.pool_centroid()?;
    if !skip_default {
        let apex = boundary.default_apex()?;
        if let Ok(f) = boundary.fill(Some(&apex)) {
            if generate::well_conditioned(&f) {
                return Ok((apex, f));
            }
        }
    }
    for _ in 0..1000 {
        let apex = &center + &random_apex(rng, boundary.ambient_dim(), spread).to_vector();
        match boundary.fill(Some(&apex)) {
            Ok(f) if generate::well_conditioned(&f) => return Ok((apex, f)),
            Ok(_) | Err(GeomError::DegenerateCone { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Err(GeomError::InvalidArgument(
        "no well-conditioned filling apex found".into(),
    ))
}

fn ccm_point(filling: &Chain) -> Result<Point> {
    filling
        .ccm()?
        .point
        .ok_or_else(|| GeomError::InvalidArgument("zero-volume filling".into()))
}

/// CCM of a random polytope boundary from two distinct apexes, the first
/// inside (the pool centroid when well conditioned) and the second drawn
/// from a cube that reaches outside the polytope; `tol * scale`.
pub fn filling_independence(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    run_trials("filling-independence", cfg, |i, rng| {
        let d = pick(dims, i);
        let count = rng.random_range(6..=24);
        let boundary = generate::random_convex_polytope(rng, d, count)?;
        let (apex_a, fill_a) = conditioned_fill(&boundary, rng, 0.2, false)?;
        let (apex_b, fill_b) = conditioned_fill(&boundary, rng, 1.5, true)?;
        if apex_a == apex_b {
            return Err(GeomError::InvalidArgument("filling apexes coincide".into()));
        }
        let gap = ccm_point(&fill_a)?.distance(&ccm_point(&fill_b)?);
        Ok(Check::new(gap, cfg.tol * boundary.scale()))
    })
}

/// CCM of a random simple equilateral polygon (6..=12 unit edges) against
/// the centroid of its lamina, both through one well-conditioned cone
/// filling; absolute tolerance.
pub fn equilateral_polygon(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    run_trials("equilateral-polygon", cfg, |_, rng| {
        let n = rng.random_range(6..=12);
        let pts = generate::equilateral_polygon(rng, n)?;
        let polygon = Chain::polygon(pts)?;
        let (_, filling) = conditioned_fill(&polygon, rng, 1.0, false)?;
        let ccm = filling.ccm()?.point;
        let lamina = filling.centroid_of_mass()?.point;
        match (ccm, lamina) {
            (Some(a), Some(b)) => Ok(Check::new(a.distance(&b), cfg.tol)),
            _ => Ok(Check::new(f64::INFINITY, cfg.tol)),
        }
    })
}

/// CCM against solid centroid for a polytope whose facets all share the
/// same edge-square sum, as an absolute distance. Fails outright if the
/// hypothesis does not hold.
pub fn equilateral_polytope_check(boundary: &Chain, tol: f64) -> Result<Check> {
    let sums = boundary.facet_edge_square_sums();
    let scale = boundary.scale();
    let (lo, hi) = sums
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(*s), hi.max(*s))
        });
    if hi - lo > 1e-9 * scale * scale {
        return Ok(Check::new(f64::INFINITY, tol));
    }
    let filling = boundary.fill(None)?;
    match (filling.ccm()?.point, filling.centroid_of_mass()?.point) {
        (Some(a), Some(b)) => Ok(Check::new(a.distance(&b), tol)),
        _ => Ok(Check::new(f64::INFINITY, tol)),
    }
}

/// Unit-edge bipyramid, octahedron and icosahedron, each under a random
/// rigid motion (trial 0 of each is left in place).
pub fn equilateral_polytope(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let shapes = [
        generate::unit_bipyramid(),
        generate::unit_octahedron(),
        generate::unit_icosahedron(),
    ];
    let total = SuiteConfig {
        trials: cfg.trials * shapes.len(),
        ..*cfg
    };
    run_trials("equilateral-polytope", &total, |i, rng| {
        let shape = &shapes[i % shapes.len()];
        let moved = if i < shapes.len() {
            shape.clone()
        } else {
            let q = random_rotation_3d(rng);
            let t = random_apex(rng, 3, 5.0).to_vector();
            shape.map_points(|p| &rotate(&q, p) + &t)?
        };
        equilateral_polytope_check(&moved, cfg.tol)
    })
}

/// `|sum Vol n| <= tol * scale^2` on random convex polytopes in R^3.
pub fn minkowski(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    run_trials("minkowski", cfg, |_, rng| {
        let count = rng.random_range(6..=30);
        let boundary = generate::random_convex_polytope(rng, 3, count)?;
        let r = boundary.minkowski_residual()?.norm();
        Ok(Check::new(r, cfg.tol * boundary.scale().powi(2)))
    })
}

/// CCM of the boundary of a polytope inscribed in a random sphere against
/// the sphere's center; `tol * radius`.
pub fn inscribed(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    run_trials("inscribed", cfg, |i, rng| {
        let d = pick(dims, i);
        let center = random_apex(rng, d, 5.0);
        let radius = 0.5 + 2.5 * rng.random::<f64>();
        let count = rng.random_range(5..=24);
        let boundary = generate::inscribed_polytope(rng, &center, radius, count)?;
        let p = boundary
            .ccm_cycle_boundary(None)?
            .point
            .ok_or_else(|| GeomError::InvalidArgument("zero-volume filling".into()))?;
        Ok(Check::new(p.distance(&center), cfg.tol * radius))
    })
}

/// `|spherical_cycle_residual| <= tol` on random triangulations of S^2.
pub fn spherical_cycle(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    run_trials("spherical-cycle", cfg, |_, rng| {
        let count = rng.random_range(6..=30);
        let tri = generate::random_sphere_triangulation(rng, count)?;
        Ok(Check::new(spherical_cycle_residual(&tri)?.norm(), cfg.tol))
    })
}

/// Relative gap between the two sides of the chordal mass identity on
/// random spherical simplices, d cycling through `dims`.
pub fn chordal_identity(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    run_trials("chordal-identity", cfg, |i, rng| {
        let d = pick(dims, i);
        let s = loop {
            let vs: Vec<_> = (0..=d).map(|_| generate::unit_vector(rng, d + 1)).collect();
            if let Ok(s) = SphericalSimplex::from_vectors(&vs) {
                if s.chordal().is_ok() {
                    break s;
                }
            }
        };
        let (a, b) = s.chordal_mass_identity()?;
        Ok(Check::new((a - b).abs() / a.abs().max(b.abs()), cfg.tol))
    })
}

/// Uniform random rotation of R^3 as a unit quaternion `[w, x, y, z]`.
pub fn random_rotation_3d<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let u = generate::unit_vector(rng, 4);
    let c = u.components();
    [c[0], c[1], c[2], c[3]]
}

/// Rotates a point of R^3 by a unit quaternion.
pub fn rotate(q: &[f64; 4], p: &Point) -> Point {
    let [w, x, y, z] = *q;
    let v = p.coords();
    let m = [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ];
    Point::new(
        m.iter()
            .map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2])
            .collect(),
    )
    .expect("finite rotation")
}
