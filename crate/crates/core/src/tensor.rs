//! Algebra of the five-dimensional space of traceless symmetric 3×3 matrices.
//!
//! A [`QTensor`] is stored by its coordinates in the fixed orthonormal basis
//! `{E0, E11, E12, E21, E22}` (inner product `tr(HK)`). The matrix view is
//! built on demand, so every value is exactly symmetric and traceless up to
//! the rounding of the coordinate-to-matrix map.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;
pub const SQRT3: f64 = 1.732_050_807_568_877_2;
pub const SQRT6: f64 = 2.449_489_742_783_178;

/// Coordinate slots of the basis `{E0, E11, E12, E21, E22}`.
pub const I0: usize = 0;
pub const I11: usize = 1;
pub const I12: usize = 2;
pub const I21: usize = 3;
pub const I22: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("Veronese argument must be a unit vector, got |z| = {0}")]
    NonUnitVector(f64),
    #[error("orbit coordinates undefined: top eigenvalue gap {0:e} is below 1e-10")]
    DegenerateDirector(f64),
    #[error("matrix is not a rotation (orthogonality defect {orth:e}, det {det})")]
    NotARotation { orth: f64, det: f64 },
}

/// A point of V: a traceless symmetric 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct QTensor {
    coords: [f64; 5],
}

impl QTensor {
    pub const ZERO: QTensor = QTensor { coords: [0.0; 5] };

    pub const fn from_coords(coords: [f64; 5]) -> Self {
        Self { coords }
    }

    /// Unit basis tensor for coordinate slot `i`.
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 5];
        c[i] = 1.0;
        Self { coords: c }
    }

    pub fn coords(&self) -> [f64; 5] {
        self.coords
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// Orthogonal projection of an arbitrary 3×3 matrix onto V
    /// (symmetric part with the trace removed).
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let q13 = 0.5 * (m[(0, 2)] + m[(2, 0)]);
        let q23 = 0.5 * (m[(1, 2)] + m[(2, 1)]);
        let q12 = 0.5 * (m[(0, 1)] + m[(1, 0)]);
        Self {
            coords: [
                (2.0 * m[(2, 2)] - m[(0, 0)] - m[(1, 1)]) / SQRT6,
                SQRT2 * q13,
                SQRT2 * q23,
                (m[(0, 0)] - m[(1, 1)]) * FRAC_1_SQRT_2,
                SQRT2 * q12,
            ],
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let [c0, c11, c12, c21, c22] = self.coords;
        let d = c0 / SQRT6;
        let s = c21 * FRAC_1_SQRT_2;
        let q13 = c11 * FRAC_1_SQRT_2;
        let q23 = c12 * FRAC_1_SQRT_2;
        let q12 = c22 * FRAC_1_SQRT_2;
        Matrix3::new(-d + s, q12, q13, q12, -d - s, q23, q13, q23, 2.0 * d)
    }

    /// `|Q|² = tr(Q²)`.
    pub fn norm_sq(&self) -> f64 {
        inner(self, self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `E0 = diag(-1,-1,2)/√6`.
    pub fn e0() -> Self {
        Self::basis(I0)
    }

    /// `E1(α) = cos α E11 + sin α E12`.
    pub fn e1(alpha: f64) -> Self {
        Self::from_coords([0.0, alpha.cos(), alpha.sin(), 0.0, 0.0])
    }

    /// `E2(α) = cos 2α E21 + sin 2α E22`.
    pub fn e2(alpha: f64) -> Self {
        let t = 2.0 * alpha;
        Self::from_coords([0.0, 0.0, 0.0, t.cos(), t.sin()])
    }

    /// Uniaxial equilibrium `a·diag(-1,-1,2)` with director along the vorticity axis.
    pub fn q_star(a: f64) -> Self {
        Self::from_coords([a * SQRT6, 0.0, 0.0, 0.0, 0.0])
    }

    /// Rate-of-strain matrix of simple shear with the rate normalised to 2.
    pub fn shear_strain() -> Self {
        Self::from_coords([0.0, 0.0, 0.0, 0.0, SQRT2])
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for QTensor {
    type Output = QTensor;
    fn add(self, rhs: QTensor) -> QTensor {
        let mut c = self.coords;
        for (x, y) in c.iter_mut().zip(rhs.coords) {
            *x += y;
        }
        QTensor { coords: c }
    }
}

impl Sub for QTensor {
    type Output = QTensor;
    fn sub(self, rhs: QTensor) -> QTensor {
        let mut c = self.coords;
        for (x, y) in c.iter_mut().zip(rhs.coords) {
            *x -= y;
        }
        QTensor { coords: c }
    }
}

impl Neg for QTensor {
    type Output = QTensor;
    fn neg(self) -> QTensor {
        self * -1.0
    }
}

impl Mul<f64> for QTensor {
    type Output = QTensor;
    fn mul(self, s: f64) -> QTensor {
        QTensor {
            coords: self.coords.map(|x| x * s),
        }
    }
}

impl Mul<QTensor> for f64 {
    type Output = QTensor;
    fn mul(self, q: QTensor) -> QTensor {
        q * self
    }
}

impl AddAssign for QTensor {
    fn add_assign(&mut self, rhs: QTensor) {
        *self = *self + rhs;
    }
}

impl SubAssign for QTensor {
    fn sub_assign(&mut self, rhs: QTensor) {
        *self = *self - rhs;
    }
}

/// `⟨H, K⟩ = tr(HK)`; the basis is orthonormal so this is a coordinate dot product.
pub fn inner(h: &QTensor, k: &QTensor) -> f64 {
    h.coords
        .iter()
        .zip(k.coords.iter())
        .map(|(x, y)| x * y)
        .sum()
}

/// `[H, K]⁺ = HK + KH − (2/3) tr(HK) I`.
pub fn bracket_plus(h: &QTensor, k: &QTensor) -> QTensor {
    let (hm, km) = (h.matrix(), k.matrix());
    QTensor::from_matrix(&(hm * km + km * hm))
}

/// Conjugation action `RQRᵀ` of SO(3) on V.
pub fn conjugate(r: &Rotation, q: &QTensor) -> QTensor {
    let m = r.matrix();
    QTensor::from_matrix(&(m * q.matrix() * m.transpose()))
}

/// A proper rotation of ℝ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    m: Matrix3<f64>,
}

impl Rotation {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    /// Accepts `m` when `mᵀm = I` and `det m = 1` to 1e-13.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, TensorError> {
        let orth = (m.transpose() * m - Matrix3::identity()).abs().max();
        let det = m.determinant();
        if orth > 1e-13 || (det - 1.0).abs() > 1e-13 {
            return Err(TensorError::NotARotation { orth, det });
        }
        Ok(Self { m })
    }

    /// Rotation by `theta` about the y-axis: carries `e3` to `(sin θ, 0, cos θ)`.
    pub fn about_y(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            m: Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        }
    }

    /// Rotation by `phi` about the z-axis (the vorticity axis).
    pub fn about_z(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            m: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        }
    }

    /// Rotation by `|axis_angle|` about `axis_angle`.
    pub fn from_axis_angle(axis_angle: Vector3<f64>) -> Self {
        Self {
            m: *nalgebra::Rotation3::from_scaled_axis(axis_angle).matrix(),
        }
    }

    /// `R3(φ) R2(θ)`, the rotation carrying `e3` to the director at `(θ, φ)`.
    pub fn to_orbit_point(p: &SphericalPoint) -> Self {
        Self::about_z(p.phi).compose(&Self::about_y(p.theta))
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Self {
            m: self.m * other.m,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.m * v
    }
}

/// Spherical coordinates of a point on the uniaxial orbit.
///
/// `(θ, φ)` and `(π − θ, φ + π)` label the same orbit point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    /// Reduces `phi` to `[0, 2π)` and `theta` to `[0, π)` without changing the orbit point.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t >= PI {
            t = TAU - t;
            p += PI;
        }
        if t >= PI {
            t = 0.0;
        }
        Self {
            theta: t,
            phi: wrap_angle(p),
        }
    }

    pub fn direction(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// The other label of the same orbit point.
    pub fn double_cover_partner(&self) -> Self {
        Self::new(PI - self.theta, self.phi + PI)
    }

    /// Polar angle folded to `[0, π/2]`.
    pub fn folded_theta(&self) -> f64 {
        self.theta.min(PI - self.theta)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `V(z) = a(3zzᵀ − |z|²I)` for a unit vector `z`.
pub fn veronese(z: &Vector3<f64>, a: f64) -> Result<QTensor, TensorError> {
    let n = z.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(TensorError::NonUnitVector(n));
    }
    Ok(veronese_unchecked(z, a))
}

fn veronese_unchecked(z: &Vector3<f64>, a: f64) -> QTensor {
    let m = (z * z.transpose()) * (3.0 * a) - Matrix3::identity() * (a * z.norm_squared());
    QTensor::from_matrix(&m)
}

/// Orbit point `Z(θ, φ) = R̃3(φ) R̃2(θ) Q*`.
pub fn orbit_point(p: &SphericalPoint, a: f64) -> QTensor {
    veronese_unchecked(&p.direction(), a)
}

/// Orthonormal basis adapted to an orbit point: the fixed basis rotated by `R3(φ)R2(θ)`.
///
/// `e[I0]` spans the radial direction, `e[I11]`, `e[I12]` the tangent space of
/// the orbit, and `e[I21]`, `e[I22]` the remaining normal directions.
#[derive(Clone, Copy, Debug)]
pub struct FrameBasis {
    pub point: SphericalPoint,
    pub a: f64,
    pub z: QTensor,
    pub e: [QTensor; 5],
}

impl FrameBasis {
    /// Coordinates of `q` in this frame.
    pub fn coords_of(&self, q: &QTensor) -> [f64; 5] {
        self.e.map(|b| inner(&b, q))
    }

    /// Tensor with the given coordinates in this frame.
    pub fn from_frame_coords(&self, c: &[f64; 5]) -> QTensor {
        let mut q = QTensor::ZERO;
        for (b, x) in self.e.iter().zip(c) {
            q += *b * *x;
        }
        q
    }

    /// 5×5 matrix whose columns are the frame vectors in fixed coordinates.
    pub fn matrix(&self) -> nalgebra::Matrix5<f64> {
        let mut m = nalgebra::Matrix5::zeros();
        for (j, b) in self.e.iter().enumerate() {
            for i in 0..5 {
                m[(i, j)] = b.coord(i);
            }
        }
        m
    }
}

/// Frame basis at `Z(θ, φ)`.
pub fn frame_basis(p: &SphericalPoint, a: f64) -> FrameBasis {
    let r = Rotation::to_orbit_point(p);
    let e = [0, 1, 2, 3, 4].map(|i| conjugate(&r, &QTensor::basis(i)));
    FrameBasis {
        point: *p,
        a,
        z: e[I0] * (a * SQRT6),
        e,
    }
}

/// Isotypic summand index: rotations by `ψ` about the director act on `V_k` by angle `kψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Isotypic {
    V0,
    V1,
    V2,
}

/// Orthogonal projection of `q` onto the isotypic summand `k` of the frame.
pub fn isotypic_project(f: &FrameBasis, k: Isotypic, q: &QTensor) -> QTensor {
    let slots: &[usize] = match k {
        Isotypic::V0 => &[I0],
        Isotypic::V1 => &[I11, I12],
        Isotypic::V2 => &[I21, I22],
    };
    let mut out = QTensor::ZERO;
    for &i in slots {
        out += f.e[i] * inner(&f.e[i], q);
    }
    out
}

/// Infinitesimal rotation generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Antisymmetric generator `W_i` of rotations about axis `i`.
pub fn generator(axis: Axis) -> Matrix3<f64> {
    match axis {
        Axis::X => Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
        Axis::Y => Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0),
        Axis::Z => Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    }
}

/// `[W_i, Q] = W_i Q − Q W_i`.
pub fn commutator_w(axis: Axis, q: &QTensor) -> QTensor {
    let w = generator(axis);
    let m = q.matrix();
    QTensor::from_matrix(&(w * m - m * w))
}

/// `[W3, Q]` in closed form: rotation about z acts on `(E11, E12)` by angle 1 and on `(E21, E22)` by angle 2.
pub fn commutator_w3(q: &QTensor) -> QTensor {
    let [_, c11, c12, c21, c22] = q.coords;
    QTensor::from_coords([0.0, -c12, c11, -2.0 * c22, 2.0 * c21])
}

/// Eigen-decomposition of a real symmetric 3×3 matrix, eigenvalues descending.
#[derive(Clone, Copy, Debug)]
pub struct SymmetricEigen3 {
    pub values: [f64; 3],
    pub vectors: [Vector3<f64>; 3],
}

/// Closed-form eigenvalues from the trigonometric solution of the characteristic cubic;
/// eigenvectors from cross products of shifted rows. Falls back to cyclic Jacobi
/// rotations when the cubic's discriminant is within 1e-12 of zero.
pub fn symmetric_eigen3(m: &Matrix3<f64>) -> SymmetricEigen3 {
    let mean = m.trace() / 3.0;
    let b = m - Matrix3::identity() * mean;
    let p = ((b * b).trace() / 6.0).sqrt();
    if !(p > 0.0) {
        return jacobi_eigen3(m);
    }
    let r = ((b / p).determinant() / 2.0).clamp(-1.0, 1.0);
    if 1.0 - r * r < 1e-12 {
        return jacobi_eigen3(m);
    }
    let phi = r.acos() / 3.0;
    let l0 = mean + 2.0 * p * phi.cos();
    let l2 = mean + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let l1 = 3.0 * mean - l0 - l2;
    let v0 = null_vector(&(m - Matrix3::identity() * l0));
    let v2 = null_vector(&(m - Matrix3::identity() * l2));
    let v2 = (v2 - v0 * v0.dot(&v2)).normalize();
    let v1 = v2.cross(&v0);
    SymmetricEigen3 {
        values: [l0, l1, l2],
        vectors: [v0, v1, v2],
    }
}

fn null_vector(s: &Matrix3<f64>) -> Vector3<f64> {
    let rows = [
        s.row(0).transpose(),
        s.row(1).transpose(),
        s.row(2).transpose(),
    ];
    let cands = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ];
    let best = cands
        .iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .copied()
        .unwrap_or_else(Vector3::zeros);
    best.normalize()
}

fn jacobi_eigen3(m: &Matrix3<f64>) -> SymmetricEigen3 {
    let mut a = *m;
    let mut v = Matrix3::<f64>::identity();
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    for _ in 0..50 {
        let off = a[(0, 1)].abs() + a[(0, 2)].abs() + a[(1, 2)].abs();
        if off <= 1e-17 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq.abs() <= 1e-300 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut g = Matrix3::<f64>::identity();
            g[(p, p)] = c;
            g[(q, q)] = c;
            g[(p, q)] = s;
            g[(q, p)] = -s;
            a = g.transpose() * a * g;
            v *= g;
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    SymmetricEigen3 {
        values: idx.map(|i| a[(i, i)]),
        vectors: idx.map(|i| v.column(i).into_owned()),
    }
}

/// Orbit coordinates read off the principal eigenvector of a tensor near the orbit.
#[derive(Clone, Copy, Debug)]
pub struct OrbitCoordinates {
    pub point: SphericalPoint,
    /// Unit principal eigenvector with `n_z ≥ 0` (ties: `n_x > 0`, then `n_y > 0`).
    pub director: Vector3<f64>,
    /// Gap between the two largest eigenvalues.
    pub gap: f64,
}

/// Principal eigenvector of `q` with its eigenvalue gap (sign unnormalised).
pub fn principal_axis(q: &QTensor) -> (Vector3<f64>, f64) {
    let eig = symmetric_eigen3(&q.matrix());
    (eig.vectors[0], eig.values[0] - eig.values[1])
}

/// Flips `n` into the half-space `n_z > 0`, breaking ties by `n_x`, then `n_y`.
pub fn normalize_director(n: Vector3<f64>) -> Vector3<f64> {
    const TIE: f64 = 1e-14;
    let flip = if n.z.abs() > TIE {
        n.z < 0.0
    } else if n.x.abs() > TIE {
        n.x < 0.0
    } else {
        n.y < 0.0
    };
    if flip {
        -n
    } else {
        n
    }
}

/// `(θ, φ)` of the orbit point nearest to `q`, from its principal eigenvector.
pub fn nearest_orbit_coordinates(q: &QTensor) -> Result<OrbitCoordinates, TensorError> {
    let (n, gap) = principal_axis(q);
    if !(gap >= 1e-10) {
        return Err(TensorError::DegenerateDirector(gap));
    }
    let n = normalize_director(n);
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = if n.x.abs() < 1e-15 && n.y.abs() < 1e-15 {
        0.0
    } else {
        wrap_angle(n.y.atan2(n.x))
    };
    Ok(OrbitCoordinates {
        point: SphericalPoint { theta, phi },
        director: n,
        gap,
    })
}

/// Distance from `q` to the orbit of radius `a`, measured to the orbit point on its principal axis.
pub fn distance_to_orbit(q: &QTensor, a: f64) -> Result<f64, TensorError> {
    let c = nearest_orbit_coordinates(q)?;
    Ok((*q - orbit_point(&c.point, a)).norm())
}
