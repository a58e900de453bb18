//! Simplices, circumspheres and the power functional.
//!
//! For a k-simplex with circumsphere (o, R) and centroid m,
//!
//! ```text
//! -Pow = Vol / ((k+1)(k+2)) * sum_{i<j} |v_i - v_j|^2
//!      = (k+1)/(k+2) * Vol * (R^2 - |o - m|^2)
//! ```
//!
//! where Pow is the integral over the simplex of the power of a point with
//! respect to the circumsphere. Both closed forms are provided alongside a
//! Monte Carlo estimate of the integral itself.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geom::{
    cofactor_normal, edge_vectors, gram_measure, gram_ratio, signed_volume, solve_linear, Matrix,
    Point, Vector, DEGENERACY_TOL,
};
use crate::rng::stream_rng;

/// Samples per independently seeded Monte Carlo chunk.
pub const MC_CHUNK: usize = 1024;

/// Minimum sample count accepted by the Monte Carlo estimators.
pub const MC_MIN_SAMPLES: usize = 100;

/// A nondegenerate k-simplex embedded in R^n, `k <= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

/// Affine subspace given by a base point and orthonormal directions.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    pub base: Point,
    pub directions: Vec<Vector>,
}

impl AffineSubspace {
    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &Point) -> f64 {
        let mut r = x - &self.base;
        for d in &self.directions {
            let c = r.dot(d);
            r.add_scaled(-c, d);
        }
        r.norm()
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }
}

/// A sphere that is full-dimensional inside its carrier subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Sphere {
    pub center: Point,
    pub radius_sq: f64,
    pub carrier: AffineSubspace,
}

impl Sphere {
    /// Full-dimensional sphere in R^n.
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(GeomError::InvalidArgument(format!(
                "invalid radius {radius}"
            )));
        }
        let n = center.dim();
        let directions = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                Vector::new(e).expect("unit vector")
            })
            .collect();
        Ok(Sphere {
            carrier: AffineSubspace {
                base: center.clone(),
                directions,
            },
            center,
            radius_sq: radius * radius,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius_sq.sqrt()
    }

    /// `|o x|^2 - R^2`, using the full ambient distance even when `x` lies
    /// outside the carrier.
    pub fn power_of_point(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.center.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.center.dim(),
                found: x.dim(),
            });
        }
        Ok(x.distance_sq(&self.center) - self.radius_sq)
    }
}

/// Free-function form of [`Sphere::power_of_point`].
pub fn power_of_point(sphere: &Sphere, x: &Point) -> Result<f64> {
    sphere.power_of_point(x)
}

/// Monte Carlo estimate of an integral over a simplex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl PowEstimate {
    /// Number of standard errors separating the estimate from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == value {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - value).abs() / self.std_error
        }
    }
}

impl Simplex {
    /// Validates dimensions and rejects vertex sets whose Gram ratio is
    /// below [`DEGENERACY_TOL`].
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(GeomError::EmptyPoint);
        }
        let n = vertices[0].dim();
        if let Some(bad) = vertices.iter().find(|v| v.dim() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        if vertices.len() > 1 {
            let ratio = gram_ratio(&vertices)?;
            if ratio.is_nan() || ratio < DEGENERACY_TOL {
                return Err(GeomError::DegenerateSimplex { ratio });
            }
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    /// k, the number of vertices minus one.
    pub fn intrinsic_dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// n, the coordinate length.
    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.intrinsic_dim() == self.ambient_dim()
    }

    /// Unsigned k-dimensional volume.
    pub fn volume(&self) -> f64 {
        gram_measure(&self.vertices).expect("validated simplex")
    }

    /// Oriented volume; only defined for full-dimensional simplices.
    pub fn signed_volume(&self) -> Result<f64> {
        signed_volume(&self.vertices)
    }

    /// Longest edge length; 0 for a single point.
    pub fn scale(&self) -> f64 {
        let mut best = 0.0_f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.distance_sq(b));
            }
        }
        best.sqrt()
    }

    /// Sum of squared lengths over all vertex pairs.
    pub fn edge_square_sum(&self) -> f64 {
        let mut sum = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                sum += a.distance_sq(b);
            }
        }
        sum
    }

    pub fn centroid(&self) -> Point {
        Point::mean(&self.vertices).expect("non-empty simplex")
    }

    /// The face that omits vertex `i`.
    pub fn facet(&self, i: usize) -> Result<Simplex> {
        if self.vertices.len() < 2 || i >= self.vertices.len() {
            return Err(GeomError::InvalidArgument(format!(
                "no facet {i} of a {}-simplex",
                self.intrinsic_dim()
            )));
        }
        let mut vs = self.vertices.clone();
        vs.remove(i);
        Simplex::new(vs)
    }

    /// The sphere through all vertices, full-dimensional in the affine hull.
    ///
    /// Equidistance from the vertices reads `e_j . (o - v_0) = |e_j|^2 / 2`
    /// for the edges `e_j = v_j - v_0`. The system is solved in coordinates
    /// of an orthonormal basis B of the edge span: with `o = v_0 + B y`,
    /// `(B^T e_j) . y = |e_j|^2 / 2`. This is the Gram system `G l = b`
    /// factored through `E = B R`, and its error grows with cond(E)
    /// rather than cond(G) = cond(E)^2.
    pub fn circumsphere(&self) -> Result<Sphere> {
        let v0 = &self.vertices[0];
        let edges = edge_vectors(&self.vertices);
        let basis = orthonormal_basis(&edges);
        let degenerate = || GeomError::DegenerateSimplex {
            ratio: gram_ratio(&self.vertices).unwrap_or(0.0),
        };
        if basis.len() != edges.len() {
            return Err(degenerate());
        }
        let carrier = AffineSubspace {
            base: v0.clone(),
            directions: basis,
        };
        if edges.is_empty() {
            return Ok(Sphere {
                center: v0.clone(),
                radius_sq: 0.0,
                carrier,
            });
        }
        let rows: Vec<Vec<f64>> = edges
            .iter()
            .map(|e| carrier.directions.iter().map(|b| b.dot(e)).collect())
            .collect();
        let rhs: Vec<f64> = edges.iter().map(|e| 0.5 * e.norm_sq()).collect();
        let y = solve_linear(&Matrix::from_rows(&rows)?, &rhs).map_err(|_| degenerate())?;
        let mut offset = Vector::zeros(v0.dim());
        for (c, b) in y.iter().zip(&carrier.directions) {
            offset.add_scaled(*c, b);
        }
        let center = v0 + &offset;
        let radius_sq = self
            .vertices
            .iter()
            .map(|v| v.distance_sq(&center))
            .sum::<f64>()
            / self.vertices.len() as f64;
        debug_assert!({
            let r = radius_sq.sqrt();
            self.vertices
                .iter()
                .all(|v| (v.distance(&center) - r).abs() <= 1e-9 * r.max(self.scale()))
        });
        Ok(Sphere {
            center,
            radius_sq,
            carrier,
        })
    }

    /// Pow from the edge-length form. A single point has Pow = 0.
    pub fn pow_edges(&self) -> f64 {
        let k = self.intrinsic_dim() as f64;
        -self.volume() * self.edge_square_sum() / ((k + 1.0) * (k + 2.0))
    }

    /// Pow from the circumradius form.
    pub fn pow_circum(&self) -> Result<f64> {
        let k = self.intrinsic_dim() as f64;
        let sphere = self.circumsphere()?;
        let om = sphere.center.distance_sq(&self.centroid());
        Ok(-(k + 1.0) / (k + 2.0) * self.volume() * (sphere.radius_sq - om))
    }

    /// Monte Carlo estimate of the integral of the power function with
    /// respect to the circumsphere.
    pub fn pow_mc(&self, samples: usize, seed: u64) -> Result<PowEstimate> {
        let sphere = self.circumsphere()?;
        self.power_integral_mc(&sphere, samples, seed)
    }

    /// Monte Carlo estimate of the integral over this simplex of the power
    /// with respect to an arbitrary sphere of the same ambient dimension.
    ///
    /// Samples are drawn in chunks of [`MC_CHUNK`], chunk `i` using stream
    /// `(seed, i)`; chunk statistics are merged in index order, so the
    /// result does not depend on thread scheduling.
    pub fn power_integral_mc(
        &self,
        sphere: &Sphere,
        samples: usize,
        seed: u64,
    ) -> Result<PowEstimate> {
        if samples < MC_MIN_SAMPLES {
            return Err(GeomError::InvalidArgument(format!(
                "at least {MC_MIN_SAMPLES} samples required, got {samples}"
            )));
        }
        if sphere.center.dim() != self.ambient_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: sphere.center.dim(),
            });
        }
        let chunks = samples.div_ceil(MC_CHUNK);
        let stats: Vec<Welford> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
                let mut rng = stream_rng(seed, chunk as u64);
                let mut acc = Welford::default();
                let mut bary = vec![0.0; self.vertices.len()];
                for _ in 0..count {
                    sample_barycentric(&mut rng, &mut bary);
                    let x = self.point_at(&bary);
                    acc.push(x.distance_sq(&sphere.center) - sphere.radius_sq);
                }
                acc
            })
            .collect();
        let total = stats.into_iter().fold(Welford::default(), Welford::merge);
        let vol = self.volume();
        let variance = if total.count > 1 {
            total.m2 / (total.count - 1) as f64
        } else {
            0.0
        };
        Ok(PowEstimate {
            mean: vol * total.mean,
            std_error: vol * (variance / total.count as f64).sqrt(),
            samples: total.count,
        })
    }

    /// `sum_i b_i v_i`.
    pub fn point_at(&self, barycentric: &[f64]) -> Point {
        let n = self.ambient_dim();
        let mut acc = vec![0.0; n];
        for (b, v) in barycentric.iter().zip(&self.vertices) {
            for (a, c) in acc.iter_mut().zip(v.coords()) {
                *a += b * c;
            }
        }
        Point::new(acc).expect("convex combination of finite points")
    }

    /// Facets paired with exterior unit normals; facet `i` omits vertex `i`.
    pub fn hyperfaces_with_normals(&self) -> Result<Vec<(Simplex, Vector)>> {
        if !self.is_full_dimensional() {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: self.intrinsic_dim(),
            });
        }
        let d = self.ambient_dim();
        (0..=d)
            .map(|i| {
                let face = self.facet(i)?;
                let to_vertex = &self.vertices[i] - &face.vertices[0];
                let raw = cofactor_normal(&edge_vectors(face.vertices()))?;
                let unit = raw
                    .normalized()
                    .ok_or(GeomError::DegenerateSimplex { ratio: 0.0 })?;
                let normal = if unit.dot(&to_vertex) > 0.0 {
                    -unit
                } else {
                    unit
                };
                Ok((face, normal))
            })
            .collect()
    }

    /// `sum_i Pow(F_i) n_i - 2 Vol (m - o)`; vanishes identically.
    pub fn lemma_residual(&self) -> Result<Vector> {
        let mut lhs = Vector::zeros(self.ambient_dim());
        for (face, normal) in self.hyperfaces_with_normals()? {
            lhs.add_scaled(face.pow_edges(), &normal);
        }
        let sphere = self.circumsphere()?;
        let om = &self.centroid() - &sphere.center;
        lhs.add_scaled(-2.0 * self.volume(), &om);
        Ok(lhs)
    }
}

/// Pow(s) from the edge-length form.
pub fn pow_simplex_edges(s: &Simplex) -> f64 {
    s.pow_edges()
}

/// Pow(s) from the circumradius form.
pub fn pow_simplex_circum(s: &Simplex) -> Result<f64> {
    s.pow_circum()
}

pub fn pow_simplex_mc(s: &Simplex, samples: usize, seed: u64) -> Result<PowEstimate> {
    s.pow_mc(samples, seed)
}

/// Uniform barycentric coordinates from sorted-uniform spacings.
pub fn sample_barycentric<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let k = out.len() - 1;
    if k == 0 {
        out[0] = 1.0;
        return;
    }
    for slot in out[..k].iter_mut() {
        *slot = rng.random::<f64>();
    }
    out[..k].sort_unstable_by(f64::total_cmp);
    let mut prev = 0.0;
    for slot in out[..k].iter_mut() {
        let cur = *slot;
        *slot = cur - prev;
        prev = cur;
    }
    out[k] = 1.0 - prev;
}

fn orthonormal_basis(vectors: &[Vector]) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.add_scaled(-c, b);
            }
        }
        if let Some(u) = w.normalized() {
            basis.push(u);
        }
    }
    basis
}

#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Welford { count, mean, m2 }
    }
}
