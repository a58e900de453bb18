//! Circumcenter of mass on the unit sphere S^d in R^(d+1).
//!
//! A weighted point `(x, m)` on the sphere is the vector `m x`; a set of
//! weighted points has centroid `sum m_i x_i / |sum m_i x_i|` and total mass
//! `|sum m_i x_i|`. A spherical simplex `v_0 .. v_d` is lifted to the
//! Euclidean (d+1)-simplex `0 v_0 .. v_d`; its weighted circumcenter is
//! `(o'/|o'|, Vol' |o'|)` where `o'` and `Vol'` are the circumcenter and
//! volume of the lift.
//!
//! The mass satisfies `Vol' |o'| = ChordVol / (2(d+1))` with `ChordVol` the
//! Euclidean volume of the chordal simplex `v_0 .. v_d`. It is *not* the
//! spherical volume over `2(d+1)`; [`spherical_volume`] exists to show the
//! difference for d <= 2.

use std::f64::consts::PI;

use crate::chain::Chain;
use crate::error::{GeomError, Result};
use crate::geom::{factorial, gram_measure, solve_linear, Matrix, Point, Vector, DEGENERACY_TOL};
use crate::simplex::Simplex;

/// Allowed deviation of `|x|` from 1 for points on the sphere.
pub const UNIT_TOL: f64 = 1e-12;

/// Mass below which the spherical center is undefined.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalPoint {
    direction: Vector,
}

impl SphericalPoint {
    /// Accepts a vector whose norm is within [`UNIT_TOL`] of 1.
    pub fn new(direction: Vector) -> Result<Self> {
        let norm = direction.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(GeomError::NotOnSphere { norm });
        }
        Ok(SphericalPoint { direction })
    }

    /// Central projection of a nonzero vector.
    pub fn project(v: &Vector) -> Result<Self> {
        let direction = v
            .normalized()
            .ok_or_else(|| GeomError::InvalidArgument("cannot project the zero vector".into()))?;
        Ok(SphericalPoint { direction })
    }

    pub fn direction(&self) -> &Vector {
        &self.direction
    }

    pub fn to_point(&self) -> Point {
        self.direction.to_point()
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }
}

/// d+1 linearly independent points on S^d.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalSimplex {
    vertices: Vec<SphericalPoint>,
}

impl SphericalSimplex {
    pub fn new(vertices: Vec<SphericalPoint>) -> Result<Self> {
        let n = vertices
            .first()
            .map(SphericalPoint::dim)
            .ok_or(GeomError::EmptyPoint)?;
        if n < 2 {
            return Err(GeomError::UnsupportedDimension(n));
        }
        if vertices.len() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: vertices.len(),
            });
        }
        if let Some(v) = vertices.iter().find(|v| v.dim() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: v.dim(),
            });
        }
        let rows: Vec<Vector> = vertices.iter().map(|v| v.direction.clone()).collect();
        // unit rows, so det of the Gram matrix is already scale-relative
        let ratio = Matrix::gram(&rows).determinant();
        if ratio.is_nan() || ratio < DEGENERACY_TOL {
            return Err(GeomError::DegenerateSimplex { ratio });
        }
        Ok(SphericalSimplex { vertices })
    }

    /// Projects each vector onto the sphere before validating.
    pub fn from_vectors(vs: &[Vector]) -> Result<Self> {
        SphericalSimplex::new(
            vs.iter()
                .map(SphericalPoint::project)
                .collect::<Result<_>>()?,
        )
    }

    pub fn vertices(&self) -> &[SphericalPoint] {
        &self.vertices
    }

    /// d, the dimension of the sphere.
    pub fn intrinsic_dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices.len()
    }

    /// The Euclidean simplex spanned by the vertices themselves.
    pub fn chordal(&self) -> Result<Simplex> {
        Simplex::new(self.vertices.iter().map(SphericalPoint::to_point).collect())
    }

    /// The (d+1)-simplex `0 v_0 .. v_d` in R^(d+1).
    pub fn lift(&self) -> Result<Simplex> {
        let mut vs = Vec::with_capacity(self.vertices.len() + 1);
        vs.push(Point::origin(self.ambient_dim()));
        vs.extend(self.vertices.iter().map(SphericalPoint::to_point));
        Simplex::new(vs)
    }

    /// Sign of the lift's oriented volume: +1 when `det[v_0 .. v_d] > 0`.
    pub fn orientation(&self) -> Result<f64> {
        Ok(self.lift()?.signed_volume()?.signum())
    }

    /// Circumcenter and unsigned volume of the lift.
    ///
    /// The lift has the origin as a vertex and unit vectors for the rest,
    /// so its circumcenter solves `V o' = (1/2, .., 1/2)` with V the matrix
    /// of rows `v_i`. Solving with V (and taking `|det V|`) rather than
    /// the Gram matrix `V V^T` keeps the error proportional to cond(V).
    fn lift_center_volume(&self) -> Result<(Vector, f64)> {
        let rows: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| v.direction.components().to_vec())
            .collect();
        let v = Matrix::from_rows(&rows)?;
        let o = solve_linear(&v, &vec![0.5; rows.len()])?;
        let volume = v.determinant().abs() / factorial(rows.len());
        Ok((Vector::new(o)?, volume))
    }

    /// `(o'/|o'|, Vol' |o'|)` as the single vector `Vol' o'`.
    pub fn weighted_circumcenter(&self) -> Result<SphericalMass> {
        let (o, volume) = self.lift_center_volume()?;
        Ok(SphericalMass::from_vector(o.scaled(volume)))
    }

    /// `(Vol' |o'|, ChordVol / (2(d+1)))`.
    pub fn chordal_mass_identity(&self) -> Result<(f64, f64)> {
        let (o, volume) = self.lift_center_volume()?;
        let lhs = volume * o.norm();
        let chord: Vec<Point> = self.vertices.iter().map(SphericalPoint::to_point).collect();
        let rhs = gram_measure(&chord)? / (2.0 * (self.intrinsic_dim() as f64 + 1.0));
        Ok((lhs, rhs))
    }
}

/// A weighted point on the sphere stored as the raw vector `sum m_i x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalMass {
    pub vector: Vector,
    pub mass: f64,
    pub center: Option<SphericalPoint>,
}

impl SphericalMass {
    pub fn from_vector(vector: Vector) -> Self {
        let mass = vector.norm();
        let center = if mass > MASS_TOL {
            vector
                .normalized()
                .map(|direction| SphericalPoint { direction })
        } else {
            None
        };
        SphericalMass {
            vector,
            mass,
            center,
        }
    }
}

pub fn lift(s: &SphericalSimplex) -> Result<Simplex> {
    s.lift()
}

pub fn spherical_weighted_circumcenter(s: &SphericalSimplex) -> Result<SphericalMass> {
    s.weighted_circumcenter()
}

pub fn chordal_mass_identity(s: &SphericalSimplex) -> Result<(f64, f64)> {
    s.chordal_mass_identity()
}

/// Sum of `c_i * orientation_i * Vol'_i * o'_i` over the terms.
///
/// The orientation factor makes each term's contribution the signed
/// Euclidean moment of its lift, which is invariant under reordering the
/// vertices together with the matching coefficient sign.
pub fn spherical_ccm(terms: &[(SphericalSimplex, i64)]) -> Result<SphericalMass> {
    let dim = match terms.first() {
        Some((s, _)) => s.ambient_dim(),
        None => return Err(GeomError::InvalidArgument("empty spherical chain".into())),
    };
    let mut acc = Vector::zeros(dim);
    for (s, c) in terms {
        if s.ambient_dim() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                found: s.ambient_dim(),
            });
        }
        if *c == 0 {
            return Err(GeomError::InvalidArgument("zero coefficient".into()));
        }
        let w = s.weighted_circumcenter()?;
        acc.add_scaled(*c as f64 * s.orientation()?, &w.vector);
    }
    Ok(SphericalMass::from_vector(acc))
}

/// Spherical simplices of a d-chain in R^(d+1) whose pool lies on S^d.
pub fn spherical_terms(chain: &Chain) -> Result<Vec<(SphericalSimplex, i64)>> {
    if chain.intrinsic_dim() + 1 != chain.ambient_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: chain.ambient_dim() - 1,
            found: chain.intrinsic_dim(),
        });
    }
    let canon = chain.canonicalize();
    canon
        .terms()
        .iter()
        .map(|t| {
            let vs = t
                .vertices
                .iter()
                .map(|&i| SphericalPoint::new(canon.pool()[i].to_vector()))
                .collect::<Result<Vec<_>>>()?;
            Ok((SphericalSimplex::new(vs)?, t.coefficient))
        })
        .collect()
}

pub fn spherical_ccm_chain(chain: &Chain) -> Result<SphericalMass> {
    let terms = spherical_terms(chain)?;
    if terms.is_empty() {
        return Ok(SphericalMass::from_vector(Vector::zeros(
            chain.ambient_dim(),
        )));
    }
    spherical_ccm(&terms)
}

/// The raw vector of the spherical circumcenter of mass of a d-cycle on
/// S^d; it vanishes.
pub fn spherical_cycle_residual(cycle: &Chain) -> Result<Vector> {
    if !cycle.is_empty() && !cycle.is_cycle() {
        return Err(GeomError::NotACycle);
    }
    Ok(spherical_ccm_chain(cycle)?.vector)
}

/// Angle between two nonzero vectors, `2 atan2(|a - b|, |a + b|)` on the
/// normalized pair.
fn angle_between(a: &Vector, b: &Vector) -> Result<f64> {
    let ua = a
        .normalized()
        .ok_or(GeomError::DegenerateSimplex { ratio: 0.0 })?;
    let ub = b
        .normalized()
        .ok_or(GeomError::DegenerateSimplex { ratio: 0.0 })?;
    Ok(2.0 * (&ua - &ub).norm().atan2((&ua + &ub).norm()))
}

/// Intrinsic volume on the unit sphere: arc length for d = 1, Girard
/// excess for d = 2.
pub fn spherical_volume(s: &SphericalSimplex) -> Result<f64> {
    let v: Vec<&Vector> = s.vertices.iter().map(|p| &p.direction).collect();
    match s.intrinsic_dim() {
        1 => angle_between(v[0], v[1]),
        2 => {
            let mut angle_sum = 0.0;
            for i in 0..3 {
                let a = v[i];
                let b = v[(i + 1) % 3];
                let c = v[(i + 2) % 3];
                // tangents at a towards b and c
                let mut tb = b.clone();
                tb.add_scaled(-a.dot(b), a);
                let mut tc = c.clone();
                tc.add_scaled(-a.dot(c), a);
                angle_sum += angle_between(&tb, &tc)?;
            }
            Ok(angle_sum - PI)
        }
        d => Err(GeomError::UnsupportedDimension(d)),
    }
}
