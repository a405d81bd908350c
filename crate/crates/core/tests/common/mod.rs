#![allow(dead_code)]

use nalgebra::Vector3;
use proptest::prelude::*;
use qkayak::tensor::{QTensor, Rotation, SphericalPoint};

pub fn qtensor() -> impl Strategy<Value = QTensor> {
    prop::array::uniform5(-1.0..1.0f64).prop_map(QTensor::from_coords)
}

pub fn rotation() -> impl Strategy<Value = Rotation> {
    prop::array::uniform3(-3.0..3.0f64).prop_map(|v| Rotation::from_axis_angle(Vector3::from(v)))
}

pub fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter("not near zero", |v| Vector3::from(*v).norm() > 0.1)
        .prop_map(|v| Vector3::from(v).normalize())
}

/// Points kept away from the pole, where the azimuth is undefined.
pub fn sphere_point() -> impl Strategy<Value = SphericalPoint> {
    (0.05..3.09f64, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| SphericalPoint::new(t, p))
}

pub fn dist(a: &QTensor, b: &QTensor) -> f64 {
    (*a - *b).norm()
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn quad(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    // split into panels so no single Simpson estimate aliases the oscillation
    let panels = 256;
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|i| {
            let (a, b) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
            let (fa, fb) = (f(a), f(b));
            let (m, fm, whole) = simpson(f, a, fa, b, fb);
            rec(f, a, fa, b, fb, m, fm, whole, tol / panels as f64, 16)
        })
        .sum()
}
