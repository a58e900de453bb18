//! Simplicial chains with integer coefficients over a shared vertex pool,
//! and the circumcenter-of-mass family of weighted centers.
//!
//! Orientation convention: a full-dimensional term `(sigma, c)` carries the
//! signed weight `c * signed_volume(sigma)`. A chain is *positively
//! oriented* when its total weight is positive; for a filling of a closed
//! hypersurface this means the boundary is oriented with outward normals.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geom::{cofactor_normal, edge_vectors, factorial, Point, Vector};
use crate::rng::{hash_f64s, stream_rng};
use crate::simplex::Simplex;

/// Relative weight below which a center of mass is reported as undefined.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Apex offset, relative to chain scale, for the default-filling retry.
pub const APEX_PERTURBATION: f64 = 1e-3;

/// One oriented simplex with its integer coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub vertices: Vec<usize>,
    pub coefficient: i64,
}

impl Term {
    pub fn new(vertices: Vec<usize>, coefficient: i64) -> Self {
        Term {
            vertices,
            coefficient,
        }
    }
}

/// A formal integer combination of k-simplices in R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    ambient_dim: usize,
    intrinsic_dim: usize,
    pool: Vec<Point>,
    terms: Vec<Term>,
    combinatorial_only: bool,
}

/// Signed total weight, moment, and the center when the weight is usable.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCenter {
    pub weight: f64,
    pub moment: Vector,
    pub point: Option<Point>,
}

impl WeightedCenter {
    fn from_sums(weight: f64, moment: Vector, scale: f64, k: usize) -> Self {
        let threshold = WEIGHT_TOL * scale.powi(k as i32);
        let point = (weight.abs() > threshold).then(|| moment.scaled(1.0 / weight).to_point());
        WeightedCenter {
            weight,
            moment,
            point,
        }
    }
}

fn permutation_sign_sort(indices: &mut [usize]) -> i64 {
    // insertion sort; simplices are short
    let mut sign = 1;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

impl Chain {
    /// Builds a chain after checking dimensions, index ranges, distinct
    /// indices within each term and nonzero coefficients.
    pub fn new(
        ambient_dim: usize,
        intrinsic_dim: usize,
        pool: Vec<Point>,
        terms: Vec<Term>,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(GeomError::InvalidChain(
                "ambient dimension must be at least 1".into(),
            ));
        }
        if intrinsic_dim > ambient_dim {
            return Err(GeomError::InvalidChain(format!(
                "intrinsic dimension {intrinsic_dim} exceeds ambient dimension {ambient_dim}"
            )));
        }
        if let Some(p) = pool.iter().find(|p| p.dim() != ambient_dim) {
            return Err(GeomError::DimensionMismatch {
                expected: ambient_dim,
                found: p.dim(),
            });
        }
        for (t, term) in terms.iter().enumerate() {
            if term.vertices.len() != intrinsic_dim + 1 {
                return Err(GeomError::InvalidChain(format!(
                    "term {t} has {} vertices, expected {}",
                    term.vertices.len(),
                    intrinsic_dim + 1
                )));
            }
            if term.coefficient == 0 {
                return Err(GeomError::InvalidChain(format!(
                    "term {t} has coefficient 0"
                )));
            }
            if let Some(&i) = term.vertices.iter().find(|&&i| i >= pool.len()) {
                return Err(GeomError::InvalidChain(format!(
                    "term {t} references vertex {i} outside a pool of {}",
                    pool.len()
                )));
            }
            let mut sorted = term.vertices.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(GeomError::InvalidChain(format!(
                    "term {t} repeats a vertex"
                )));
            }
        }
        Ok(Chain {
            ambient_dim,
            intrinsic_dim,
            pool,
            terms,
            combinatorial_only: false,
        })
    }

    /// A chain used only for boundary and cycle checks; metric operations
    /// return [`GeomError::CombinatorialOnly`].
    pub fn combinatorial(
        ambient_dim: usize,
        intrinsic_dim: usize,
        pool: Vec<Point>,
        terms: Vec<Term>,
    ) -> Result<Self> {
        let mut c = Chain::new(ambient_dim, intrinsic_dim, pool, terms)?;
        c.combinatorial_only = true;
        Ok(c)
    }

    /// The chain `1 * [v_0, ..., v_k]` for a single simplex.
    pub fn from_simplex(s: &Simplex) -> Self {
        let k = s.intrinsic_dim();
        Chain {
            ambient_dim: s.ambient_dim(),
            intrinsic_dim: k,
            pool: s.vertices().to_vec(),
            terms: vec![Term::new((0..=k).collect(), 1)],
            combinatorial_only: false,
        }
    }

    /// Closed polygon `p_0 p_1 ... p_{m-1}` as a 1-cycle.
    pub fn polygon(points: Vec<Point>) -> Result<Self> {
        let n = points
            .first()
            .map(Point::dim)
            .ok_or(GeomError::EmptyPoint)?;
        let m = points.len();
        if m < 2 {
            return Err(GeomError::InvalidChain(
                "polygon needs at least two vertices".into(),
            ));
        }
        let terms = (0..m).map(|i| Term::new(vec![i, (i + 1) % m], 1)).collect();
        Chain::new(n, 1, points, terms)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn pool(&self) -> &[Point] {
        &self.pool
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_combinatorial_only(&self) -> bool {
        self.combinatorial_only
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorts each term's indices (absorbing the permutation sign), merges
    /// equal vertex sets, and drops zero and repeated-vertex terms. Terms
    /// come out in lexicographic order of their index tuples.
    pub fn canonicalize(&self) -> Chain {
        let mut merged: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for term in &self.terms {
            let mut idx = term.vertices.clone();
            let sign = permutation_sign_sort(&mut idx);
            if idx.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            *merged.entry(idx).or_insert(0) += sign * term.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(vertices, coefficient)| Term {
                vertices,
                coefficient,
            })
            .collect();
        Chain {
            terms,
            ..self.shallow_clone()
        }
    }

    fn shallow_clone(&self) -> Chain {
        Chain {
            ambient_dim: self.ambient_dim,
            intrinsic_dim: self.intrinsic_dim,
            pool: self.pool.clone(),
            terms: Vec::new(),
            combinatorial_only: self.combinatorial_only,
        }
    }

    /// `d[v_0..v_k] = sum_i (-1)^i [v_0..^v_i..v_k]`, canonicalized.
    pub fn boundary(&self) -> Result<Chain> {
        if self.intrinsic_dim == 0 {
            return Err(GeomError::InvalidArgument("boundary of a 0-chain".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * (self.intrinsic_dim + 1));
        for term in &self.terms {
            for i in 0..term.vertices.len() {
                let mut face = term.vertices.clone();
                face.remove(i);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                terms.push(Term {
                    vertices: face,
                    coefficient: sign * term.coefficient,
                });
            }
        }
        let raw = Chain {
            terms,
            intrinsic_dim: self.intrinsic_dim - 1,
            ..self.shallow_clone()
        };
        Ok(raw.canonicalize())
    }

    /// True when the boundary vanishes. A 0-chain is never a cycle here.
    pub fn is_cycle(&self) -> bool {
        self.boundary().map(|b| b.is_empty()).unwrap_or(false)
    }

    /// The metric simplex for one term.
    pub fn simplex(&self, term: &Term) -> Result<Simplex> {
        if self.combinatorial_only {
            return Err(GeomError::CombinatorialOnly);
        }
        Simplex::new(
            term.vertices
                .iter()
                .map(|&i| self.pool[i].clone())
                .collect(),
        )
    }

    /// Longest edge over all terms.
    pub fn scale(&self) -> f64 {
        let mut best = 0.0_f64;
        for term in &self.terms {
            for (a, &i) in term.vertices.iter().enumerate() {
                for &j in &term.vertices[a + 1..] {
                    best = best.max(self.pool[i].distance_sq(&self.pool[j]));
                }
            }
        }
        best.sqrt()
    }

    /// Centroid of the whole vertex pool.
    pub fn pool_centroid(&self) -> Result<Point> {
        Point::mean(&self.pool)
    }

    /// Every pool vertex moved by `u`.
    pub fn translated(&self, u: &Vector) -> Result<Chain> {
        if u.dim() != self.ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim,
                found: u.dim(),
            });
        }
        Ok(Chain {
            pool: self.pool.iter().map(|p| p + u).collect(),
            terms: self.terms.clone(),
            ..self.shallow_clone()
        })
    }

    /// Every pool vertex mapped through `f`.
    pub fn map_points<F>(&self, f: F) -> Result<Chain>
    where
        F: Fn(&Point) -> Point,
    {
        let pool: Vec<Point> = self.pool.iter().map(f).collect();
        let mut out = Chain::new(
            self.ambient_dim,
            self.intrinsic_dim,
            pool,
            self.terms.clone(),
        )?;
        out.combinatorial_only = self.combinatorial_only;
        Ok(out)
    }

    /// `self - other`. Pool points of `other` that coincide exactly with a
    /// point of `self` are shared, so common faces cancel.
    pub fn minus(&self, other: &Chain) -> Result<Chain> {
        if other.ambient_dim != self.ambient_dim || other.intrinsic_dim != self.intrinsic_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.intrinsic_dim,
                found: other.intrinsic_dim,
            });
        }
        let mut pool = self.pool.clone();
        let remap: Vec<usize> = other
            .pool
            .iter()
            .map(|p| match pool.iter().position(|q| q == p) {
                Some(i) => i,
                None => {
                    pool.push(p.clone());
                    pool.len() - 1
                }
            })
            .collect();
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| Term {
            vertices: t.vertices.iter().map(|&i| remap[i]).collect(),
            coefficient: -t.coefficient,
        }));
        Ok(Chain {
            pool,
            terms,
            combinatorial_only: self.combinatorial_only || other.combinatorial_only,
            ..self.shallow_clone()
        })
    }

    /// Cone over a cycle: each term `(sigma, c)` becomes `([apex, sigma], c)`.
    ///
    /// If `apex` equals a pool vertex that index is reused, so terms through
    /// it drop as repeated-vertex terms (fan triangulation). The boundary of
    /// the result is the input cycle.
    pub fn cone_fill(&self, apex: &Point) -> Result<Chain> {
        if apex.dim() != self.ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim,
                found: apex.dim(),
            });
        }
        if self.intrinsic_dim + 1 > self.ambient_dim {
            return Err(GeomError::InvalidArgument(format!(
                "cannot cone a {}-chain inside R^{}",
                self.intrinsic_dim, self.ambient_dim
            )));
        }
        if !self.is_cycle() {
            return Err(GeomError::NotACycle);
        }
        let mut pool = self.pool.clone();
        let apex_index = match pool.iter().position(|p| p == apex) {
            Some(i) => i,
            None => {
                pool.push(apex.clone());
                pool.len() - 1
            }
        };
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut vertices = Vec::with_capacity(t.vertices.len() + 1);
                vertices.push(apex_index);
                vertices.extend_from_slice(&t.vertices);
                Term {
                    vertices,
                    coefficient: t.coefficient,
                }
            })
            .collect();
        let cone = Chain {
            pool,
            terms,
            intrinsic_dim: self.intrinsic_dim + 1,
            ..self.shallow_clone()
        }
        .canonicalize();
        if !cone.combinatorial_only {
            for (i, t) in cone.terms.iter().enumerate() {
                if cone.simplex(t).is_err() {
                    return Err(GeomError::DegenerateCone { term: i });
                }
            }
        }
        Ok(cone)
    }

    fn require_full_dimensional(&self) -> Result<()> {
        if self.intrinsic_dim != self.ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim,
                found: self.intrinsic_dim,
            });
        }
        if self.combinatorial_only {
            return Err(GeomError::CombinatorialOnly);
        }
        Ok(())
    }

    /// Signed-volume-weighted aggregate of one point per simplex.
    fn aggregate<F>(&self, point_of: F) -> Result<WeightedCenter>
    where
        F: Fn(&Simplex) -> Result<Point> + Sync,
    {
        self.require_full_dimensional()?;
        let canon = self.canonicalize();
        let contributions: Vec<(f64, Point)> = canon
            .terms
            .par_iter()
            .map(|t| {
                let s = canon.simplex(t)?;
                let w = t.coefficient as f64 * s.signed_volume()?;
                Ok((w, point_of(&s)?))
            })
            .collect::<Result<_>>()?;
        let mut weight = 0.0;
        let mut moment = Vector::zeros(self.ambient_dim);
        for (w, p) in &contributions {
            weight += w;
            moment.add_scaled(*w, &p.to_vector());
        }
        Ok(WeightedCenter::from_sums(
            weight,
            moment,
            canon.scale(),
            self.intrinsic_dim,
        ))
    }

    /// Circumcenter of mass: circumcenters weighted by signed volume.
    pub fn ccm(&self) -> Result<WeightedCenter> {
        self.aggregate(|s| Ok(s.circumsphere()?.center))
    }

    /// Centroids weighted by signed volume.
    pub fn centroid_of_mass(&self) -> Result<WeightedCenter> {
        self.aggregate(|s| Ok(s.centroid()))
    }

    /// Euler-line points `(1 - t) o + t m` weighted by signed volume.
    pub fn euler_point(&self, t: f64) -> Result<WeightedCenter> {
        if !t.is_finite() {
            return Err(GeomError::InvalidArgument(format!(
                "non-finite Euler parameter {t}"
            )));
        }
        self.aggregate(|s| Ok(s.circumsphere()?.center.lerp(&s.centroid(), t)))
    }

    /// The default filling apex: pool centroid.
    pub fn default_apex(&self) -> Result<Point> {
        self.pool_centroid()
    }

    /// Pool centroid shifted by `1e-3 * scale` along a unit direction drawn
    /// from a generator seeded with a hash of the pool coordinates.
    pub fn perturbed_apex(&self) -> Result<Point> {
        let base = self.pool_centroid()?;
        let seed = hash_f64s(self.pool.iter().flat_map(|p| p.coords()));
        let mut rng = stream_rng(seed, 0);
        let dir: Vec<f64> = (0..self.ambient_dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let dir = Vector::new(dir)?
            .normalized()
            .unwrap_or_else(|| Vector::from_axis(self.ambient_dim, 0));
        Ok(&base + &dir.scaled(APEX_PERTURBATION * self.scale()))
    }

    /// Cone filling from `apex`, or from the default apex with a single
    /// deterministic perturbation retry.
    pub fn fill(&self, apex: Option<&Point>) -> Result<Chain> {
        match apex {
            Some(a) => self.cone_fill(a),
            None => match self.cone_fill(&self.default_apex()?) {
                Err(GeomError::DegenerateCone { .. }) => self.cone_fill(&self.perturbed_apex()?),
                other => other,
            },
        }
    }

    /// Circumcenter of mass of an (n-1)-cycle through a cone filling.
    pub fn ccm_cycle_boundary(&self, apex: Option<&Point>) -> Result<WeightedCenter> {
        if self.intrinsic_dim + 1 != self.ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim - 1,
                found: self.intrinsic_dim,
            });
        }
        self.fill(apex)?.ccm()
    }

    /// `(sum c Vol o_i, sum c Vol (m_i - o_i))` for a full-dimensional cycle.
    pub fn cycle_moment_residuals(&self) -> Result<(Vector, Vector)> {
        self.require_full_dimensional()?;
        if !self.is_empty() && !self.is_cycle() {
            return Err(GeomError::NotACycle);
        }
        let circ = self.ccm()?;
        let cent = self.centroid_of_mass()?;
        let diff = &cent.moment - &circ.moment;
        Ok((circ.moment, diff))
    }

    /// Per term, the sum of squared edge lengths.
    pub fn facet_edge_square_sums(&self) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| {
                let mut sum = 0.0;
                for (a, &i) in t.vertices.iter().enumerate() {
                    for &j in &t.vertices[a + 1..] {
                        sum += self.pool[i].distance_sq(&self.pool[j]);
                    }
                }
                sum
            })
            .collect()
    }

    /// Per term, `R^2 - |o m|^2` of the facet.
    pub fn facet_radius_form(&self) -> Result<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| {
                let s = self.simplex(t)?;
                let sphere = s.circumsphere()?;
                Ok(sphere.radius_sq - sphere.center.distance_sq(&s.centroid()))
            })
            .collect()
    }

    /// `sum_i c_i Vol(F_i) n_i` over the facets of a closed (n-1)-cycle,
    /// with `n_i` the outward unit normal.
    ///
    /// Outward is read off the enclosed signed volume: when the cycle bounds
    /// negative volume every normal is flipped. A cycle enclosing no volume
    /// has no outward side and yields [`GeomError::OrientationError`].
    pub fn minkowski_residual(&self) -> Result<Vector> {
        let n = self.ambient_dim;
        if self.intrinsic_dim + 1 != n {
            return Err(GeomError::DimensionMismatch {
                expected: n - 1,
                found: self.intrinsic_dim,
            });
        }
        if self.combinatorial_only {
            return Err(GeomError::CombinatorialOnly);
        }
        if !self.is_cycle() {
            return Err(GeomError::NotACycle);
        }
        let canon = self.canonicalize();
        let apex = canon.pool_centroid()?;
        let mut enclosed = 0.0;
        let mut residual = Vector::zeros(n);
        for t in &canon.terms {
            let s = canon.simplex(t)?;
            let normal = cofactor_normal(&edge_vectors(s.vertices()))?;
            let unit = normal
                .normalized()
                .ok_or(GeomError::DegenerateSimplex { ratio: 0.0 })?;
            let c = t.coefficient as f64;
            enclosed += c * (&s.vertices()[0] - &apex).dot(&normal) / factorial(n);
            residual.add_scaled(c * s.volume(), &unit);
        }
        let scale = canon.scale();
        if enclosed.abs() <= WEIGHT_TOL * scale.powi(n as i32) {
            return Err(GeomError::OrientationError(
                "cycle encloses no volume, outward side undefined".into(),
            ));
        }
        Ok(if enclosed < 0.0 { -residual } else { residual })
    }
}
