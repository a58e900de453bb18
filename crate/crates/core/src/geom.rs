//! Small dense linear algebra over `f64`: points, vectors, pivoted
//! elimination, and k-dimensional measure of embedded simplices.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Scale-relative threshold below which pivots and Gram ratios count as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A point in R^n.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

/// A displacement or direction in R^n.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

fn check_finite(coords: &[f64]) -> Result<()> {
    if coords.is_empty() {
        return Err(GeomError::EmptyPoint);
    }
    match coords.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(GeomError::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeomError::DimensionMismatch { expected, found })
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "ambient dimension must be at least 1");
        Point(vec![0.0; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Position vector relative to the origin.
    pub fn to_vector(&self) -> Vector {
        Vector(self.0.clone())
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// Affine combination `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
        )
    }

    /// Arithmetic mean of a non-empty set of points of equal dimension.
    pub fn mean<'a, I>(points: I) -> Result<Point>
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(GeomError::EmptyPoint)?;
        let mut acc = first.0.clone();
        let mut count = 1usize;
        for p in iter {
            check_dims(acc.len(), p.dim())?;
            for (a, c) in acc.iter_mut().zip(&p.0) {
                *a += c;
            }
            count += 1;
        }
        let inv = 1.0 / count as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
        Ok(Point(acc))
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    /// Panics on non-finite or empty input; intended for literals.
    fn from(coords: [f64; N]) -> Self {
        Point::new(coords.to_vec()).expect("point literal must be finite and non-empty")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{:?}", self.0)
    }
}

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_finite(&components)?;
        Ok(Vector(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// Unit vector along coordinate axis `axis`.
    pub fn from_axis(dim: usize, axis: usize) -> Self {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        Vector(e)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_components(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: f64, other: &Vector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scaled(1.0 / n))
    }

    /// The point at the tip of this vector from the origin.
    pub fn to_point(&self) -> Point {
        Point(self.0.clone())
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(components: [f64; N]) -> Self {
        Vector::new(components.to_vec()).expect("vector literal must be finite and non-empty")
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector{:?}", self.0)
    }
}

impl Sub for &Point {
    type Output = Vector;
    fn sub(self, rhs: &Point) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add<&Vector> for &Point {
    type Output = Point;
    fn add(self, rhs: &Vector) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl AddAssign<&Vector> for Vector {
    fn add_assign(&mut self, rhs: &Vector) {
        self.add_scaled(1.0, rhs);
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scaled(s)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(mut self) -> Vector {
        self.0.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

/// Row-major dense square matrix, only as much as the solvers here need.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dims(n, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Gram matrix `E E^T` of the given rows.
    pub fn gram(rows: &[Vector]) -> Self {
        let k = rows.len();
        let mut g = Matrix::zeros(k);
        for i in 0..k {
            for j in i..k {
                let v = rows[i].dot(&rows[j]);
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }

    /// Determinant by elimination with partial pivoting. Exact zero pivots
    /// give 0; no thresholding is applied.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, a[r * n + col].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 {
                return 0.0;
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            let pivot = a[col * n + col];
            det *= pivot;
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                if factor != 0.0 {
                    for j in col..n {
                        a[r * n + j] -= factor * a[col * n + j];
                    }
                }
            }
        }
        det
    }
}

/// Solves `matrix * y = rhs` by Gaussian elimination with partial pivoting.
///
/// A pivot whose magnitude is below `1e-12` times the largest matrix entry
/// is reported as [`GeomError::SingularMatrix`].
pub fn solve_linear(matrix: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = matrix.size();
    if n == 0 {
        return Err(GeomError::InvalidArgument("empty linear system".into()));
    }
    check_dims(n, rhs.len())?;
    let scale = matrix.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return Err(GeomError::SingularMatrix { pivot: 0.0 });
    }
    let mut a = matrix.data.clone();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs < DEGENERACY_TOL * scale {
            return Err(GeomError::SingularMatrix {
                pivot: pivot_abs / scale,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor != 0.0 {
                for j in col..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut y = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| a[row * n + j] * y[j]).sum();
        y[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(y)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn check_vertex_dims(vertices: &[Point]) -> Result<usize> {
    let first = vertices.first().ok_or(GeomError::EmptyPoint)?;
    let n = first.dim();
    for v in vertices {
        check_dims(n, v.dim())?;
    }
    Ok(n)
}

/// Edge vectors `v_i - v_0` for `i = 1..=k`.
pub fn edge_vectors(vertices: &[Point]) -> Vec<Vector> {
    vertices[1..].iter().map(|v| v - &vertices[0]).collect()
}

/// Diagonal of R in a Householder QR factorization of the matrix whose
/// columns are `vectors`. `prod |r_ii| = sqrt(det G)` for the Gram matrix
/// G, with error proportional to cond(E) rather than cond(E)^2.
fn qr_diagonal(vectors: &[Vector]) -> Vec<f64> {
    let k = vectors.len();
    let mut cols: Vec<Vec<f64>> = vectors.iter().map(|v| v.0.clone()).collect();
    let n = cols.first().map_or(0, Vec::len);
    let mut diag = Vec::with_capacity(k);
    for j in 0..k {
        let norm = cols[j][j..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag.push(0.0);
            continue;
        }
        let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
        let mut u: Vec<f64> = cols[j][j..].to_vec();
        u[0] -= alpha;
        let u_sq: f64 = u.iter().map(|x| x * x).sum();
        diag.push(alpha);
        if u_sq == 0.0 {
            continue;
        }
        for col in cols.iter_mut().skip(j + 1) {
            let dot: f64 = u.iter().zip(&col[j..n]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / u_sq;
            for (c, a) in col[j..n].iter_mut().zip(&u) {
                *c -= f * a;
            }
        }
    }
    diag
}

/// `det G / prod G_ii` for the Gram matrix of the edge vectors: 1 for an
/// orthogonal frame, 0 for an affinely dependent vertex set (Hadamard).
pub fn gram_ratio(vertices: &[Point]) -> Result<f64> {
    let n = check_vertex_dims(vertices)?;
    let k = vertices.len() - 1;
    if k > n {
        return Err(GeomError::DimensionMismatch {
            expected: n + 1,
            found: vertices.len(),
        });
    }
    let edges = edge_vectors(vertices);
    let r = qr_diagonal(&edges);
    let mut ratio = 1.0;
    for (e, r) in edges.iter().zip(&r) {
        let len = e.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        ratio *= (r / len).powi(2);
    }
    Ok(ratio.min(1.0))
}

/// k-dimensional volume `sqrt(det G) / k!` of the simplex spanned by k+1
/// vertices in R^n. Degenerate input (Gram ratio below threshold) gives 0.
pub fn gram_measure(vertices: &[Point]) -> Result<f64> {
    let n = check_vertex_dims(vertices)?;
    let k = vertices.len() - 1;
    if k > n {
        return Err(GeomError::DimensionMismatch {
            expected: n + 1,
            found: vertices.len(),
        });
    }
    if k == 0 {
        return Ok(1.0);
    }
    if gram_ratio(vertices)? < DEGENERACY_TOL {
        return Ok(0.0);
    }
    let r = qr_diagonal(&edge_vectors(vertices));
    Ok(r.iter().map(|x| x.abs()).product::<f64>() / factorial(k))
}

/// Oriented volume of d+1 vertices in R^d: `det[v_1 - v_0, ..., v_d - v_0] / d!`.
pub fn signed_volume(vertices: &[Point]) -> Result<f64> {
    let d = check_vertex_dims(vertices)?;
    check_dims(d + 1, vertices.len())?;
    let rows: Vec<Vec<f64>> = edge_vectors(vertices)
        .into_iter()
        .map(Vector::into_components)
        .collect();
    Ok(Matrix::from_rows(&rows)?.determinant() / factorial(d))
}

/// Generalized cross product of `d - 1` vectors in R^d: the vector `x` with
/// `det[w, e_1, ..., e_{d-1}] = w . x` for every `w`.
pub fn cofactor_normal(edges: &[Vector]) -> Result<Vector> {
    let d = edges.len() + 1;
    for e in edges {
        check_dims(d, e.dim())?;
    }
    if d == 1 {
        return Ok(Vector(vec![1.0]));
    }
    let mut out = vec![0.0; d];
    for (j, slot) in out.iter_mut().enumerate() {
        let rows: Vec<Vec<f64>> = edges
            .iter()
            .map(|e| {
                e.0.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let minor = Matrix::from_rows(&rows)?.determinant();
        *slot = if j % 2 == 0 { minor } else { -minor };
    }
    Ok(Vector(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let id = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(solve_linear(&id, &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        let diag = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(solve_linear(&diag, &[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn solve_rejects_rank_deficient() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_linear(&m, &[1.0, 2.0]),
            Err(GeomError::SingularMatrix { .. })
        ));
        assert!(matches!(
            solve_linear(&Matrix::zeros(3), &[0.0; 3]),
            Err(GeomError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn solve_needs_pivoting() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(solve_linear(&m, &[5.0, 7.0]).unwrap(), vec![7.0, 5.0]);
    }

    #[test]
    fn solve_rhs_length_checked() {
        let m = Matrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(
            solve_linear(&m, &[1.0, 2.0]),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_measure_examples() {
        let seg = [Point::from([0.0]), Point::from([1.0])];
        assert_eq!(gram_measure(&seg).unwrap(), 1.0);
        let tri = [
            Point::from([0.0, 0.0, 0.0]),
            Point::from([1.0, 0.0, 0.0]),
            Point::from([0.0, 1.0, 0.0]),
        ];
        assert!(close(gram_measure(&tri).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn gram_measure_equilateral_matches_heron() {
        let h = 3f64.sqrt() / 2.0;
        let tri = [
            Point::from([0.0, 0.0]),
            Point::from([1.0, 0.0]),
            Point::from([0.5, h]),
        ];
        let (a, b, c) = (
            tri[0].distance(&tri[1]),
            tri[1].distance(&tri[2]),
            tri[2].distance(&tri[0]),
        );
        let s = (a + b + c) / 2.0;
        let heron = (s * (s - a) * (s - b) * (s - c)).sqrt();
        assert!(close(heron, 0.433_012_701_892_219_3, 1e-12));
        assert!(close(gram_measure(&tri).unwrap(), heron, 1e-12));
    }

    #[test]
    fn gram_measure_degenerate_and_errors() {
        let collinear = [
            Point::from([0.0, 0.0]),
            Point::from([1.0, 1.0]),
            Point::from([2.0, 2.0]),
        ];
        assert_eq!(gram_measure(&collinear).unwrap(), 0.0);
        let too_many = [Point::from([0.0]), Point::from([1.0]), Point::from([2.0])];
        assert!(matches!(
            gram_measure(&too_many),
            Err(GeomError::DimensionMismatch { .. })
        ));
        let mixed = [Point::from([0.0]), Point::from([1.0, 2.0])];
        assert!(matches!(
            gram_measure(&mixed),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn signed_volume_examples() {
        let ccw = [
            Point::from([0.0, 0.0]),
            Point::from([1.0, 0.0]),
            Point::from([0.0, 1.0]),
        ];
        assert_eq!(signed_volume(&ccw).unwrap(), 0.5);
        let cw = [
            Point::from([0.0, 0.0]),
            Point::from([0.0, 1.0]),
            Point::from([1.0, 0.0]),
        ];
        assert_eq!(signed_volume(&cw).unwrap(), -0.5);
        let tet = [
            Point::from([0.0, 0.0, 0.0]),
            Point::from([1.0, 0.0, 0.0]),
            Point::from([0.0, 1.0, 0.0]),
            Point::from([0.0, 0.0, 1.0]),
        ];
        assert!(close(signed_volume(&tet).unwrap(), 1.0 / 6.0, 1e-15));
        assert!(matches!(
            signed_volume(&tet[..3]),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cofactor_normal_is_cross_product_in_3d() {
        let x = cofactor_normal(&[Vector::from([1.0, 0.0, 0.0]), Vector::from([0.0, 1.0, 0.0])])
            .unwrap();
        assert_eq!(x.components(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn point_validation() {
        assert_eq!(Point::new(vec![]), Err(GeomError::EmptyPoint));
        assert_eq!(
            Point::new(vec![0.0, f64::NAN]),
            Err(GeomError::NonFinite { index: 1 })
        );
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }
}
