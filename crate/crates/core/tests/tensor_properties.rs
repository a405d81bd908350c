mod common;

use common::{dist, qtensor, rotation, sphere_point, unit_vector};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use qkayak::tensor::*;

/// `V1` component of `[H, K]⁺` in the fixed frame, from the coordinate formula.
fn v1_formula(h: &[f64; 5], k: &[f64; 5]) -> [f64; 2] {
    let r6 = 1.0 / SQRT6;
    let r2 = 1.0 / SQRT2;
    [
        r6 * (h[I0] * k[I11] + h[I11] * k[I0])
            + r2 * (h[I11] * k[I21] + h[I21] * k[I11] + h[I22] * k[I12] + h[I12] * k[I22]),
        r6 * (h[I0] * k[I12] + h[I12] * k[I0])
            + r2 * (h[I11] * k[I22] + h[I22] * k[I11] - h[I12] * k[I21] - h[I21] * k[I12]),
    ]
}

/// `DV(z)u` for the quadratic map `V(z) = a(3zzᵀ − |z|²I)`.
fn veronese_derivative(z: &Vector3<f64>, u: &Vector3<f64>, a: f64) -> QTensor {
    let m = (u * z.transpose() + z * u.transpose()) * (3.0 * a)
        - Matrix3::identity() * (2.0 * a * z.dot(u));
    QTensor::from_matrix(&m)
}

fn random_in(f: &FrameBasis, slots: &[usize], w: &[f64; 5]) -> QTensor {
    let mut q = QTensor::ZERO;
    for &i in slots {
        q += f.e[i] * w[i];
    }
    q
}

const SLOTS: [&[usize]; 3] = [&[I0], &[I11, I12], &[I21, I22]];
const KINDS: [Isotypic; 3] = [Isotypic::V0, Isotypic::V1, Isotypic::V2];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tensors_are_symmetric_and_traceless(q in qtensor(), k in qtensor(), r in rotation()) {
        for t in [q, bracket_plus(&q, &k), conjugate(&r, &q), q * 3.0 - k] {
            let m = t.matrix();
            prop_assert_eq!(m, m.transpose());
            prop_assert!(m.trace().abs() <= 1e-14);
            prop_assert!(dist(&QTensor::from_matrix(&m), &t) <= 1e-14);
        }
    }

    #[test]
    fn rotations_are_orthogonal(r in rotation(), s in rotation()) {
        for m in [*r.matrix(), *r.compose(&s).matrix(), *r.inverse().matrix()] {
            prop_assert!((m.transpose() * m - Matrix3::identity()).abs().max() < 1e-13);
            prop_assert!((m.determinant() - 1.0).abs() < 1e-13);
            prop_assert!(Rotation::from_matrix(m).is_ok());
        }
    }

    #[test]
    fn conjugation_preserves_inner_products(r in rotation(), h in qtensor(), k in qtensor()) {
        let lhs = inner(&conjugate(&r, &h), &conjugate(&r, &k));
        prop_assert!((lhs - inner(&h, &k)).abs() < 1e-13);
    }

    #[test]
    fn bracket_is_equivariant(r in rotation(), h in qtensor(), k in qtensor()) {
        let lhs = conjugate(&r, &bracket_plus(&h, &k));
        let rhs = bracket_plus(&conjugate(&r, &h), &conjugate(&r, &k));
        prop_assert!(dist(&lhs, &rhs) < 1e-12);
        prop_assert!(dist(&bracket_plus(&h, &k), &bracket_plus(&k, &h)) < 1e-15);
    }

    #[test]
    fn veronese_is_equivariant(r in rotation(), z in unit_vector(), a in 0.01..0.33f64) {
        let lhs = veronese(&r.apply(&z), a).unwrap();
        let rhs = conjugate(&r, &veronese(&z, a).unwrap());
        prop_assert!(dist(&lhs, &rhs) < 1e-12);
        prop_assert!(dist(&veronese(&-z, a).unwrap(), &veronese(&z, a).unwrap()) < 1e-15);
    }

    #[test]
    fn veronese_tangent_metric_is_eighteen_a_squared(
        z in unit_vector(), x in unit_vector(), y in unit_vector(), a in 0.01..0.33f64,
    ) {
        let u = x - z * z.dot(&x);
        let v = y - z * z.dot(&y);
        let du = veronese_derivative(&z, &u, a);
        let dv = veronese_derivative(&z, &v, a);
        prop_assert!((inner(&du, &dv) - 18.0 * a * a * u.dot(&v)).abs() < 1e-12);
        // the closed form agrees with a difference quotient of the library map along a great circle
        if u.norm() > 0.1 {
            let w = u.normalize();
            let h = 1e-5;
            let curve = |s: f64| veronese(&(z * s.cos() + w * s.sin()), a).unwrap();
            let fd = (curve(h) - curve(-h)) * (0.5 / h);
            prop_assert!(dist(&fd, &veronese_derivative(&z, &w, a)) < 1e-8);
        }
    }

    #[test]
    fn bracket_eigenstructure_on_the_orbit(p in sphere_point(), a in 0.01..0.33f64) {
        let f = frame_basis(&p, a);
        let eig = [2.0 * a, a, -2.0 * a];
        for (k, slots) in SLOTS.iter().enumerate() {
            for &i in slots.iter() {
                let lhs = bracket_plus(&f.z, &f.e[i]);
                prop_assert!(dist(&lhs, &(f.e[i] * eig[k])) < 1e-12, "slot {i}");
            }
        }
    }

    #[test]
    fn bracket_parity(p in sphere_point(), w1 in prop::array::uniform5(-1.0..1.0f64), w2 in prop::array::uniform5(-1.0..1.0f64)) {
        let f = frame_basis(&p, 0.12);
        for (i, &si) in SLOTS.iter().enumerate() {
            for (j, &sj) in SLOTS.iter().enumerate() {
                let b = bracket_plus(&random_in(&f, si, &w1), &random_in(&f, sj, &w2));
                if (i + j) % 2 == 0 {
                    prop_assert!(isotypic_project(&f, Isotypic::V1, &b).norm() < 1e-13);
                } else {
                    prop_assert!(isotypic_project(&f, Isotypic::V0, &b).norm() < 1e-13);
                    prop_assert!(isotypic_project(&f, Isotypic::V2, &b).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn v1_component_formula(h in qtensor(), k in qtensor(), p in sphere_point()) {
        let b = bracket_plus(&h, &k);
        let want = v1_formula(&h.coords(), &k.coords());
        prop_assert!((b.coord(I11) - want[0]).abs() < 1e-12);
        prop_assert!((b.coord(I12) - want[1]).abs() < 1e-12);
        // the same formula holds in any orbit frame
        let f = frame_basis(&p, 0.12);
        let (hc, kc, bc) = (f.coords_of(&h), f.coords_of(&k), f.coords_of(&b));
        let want = v1_formula(&hc, &kc);
        prop_assert!((bc[I11] - want[0]).abs() < 1e-12);
        prop_assert!((bc[I12] - want[1]).abs() < 1e-12);
    }

    #[test]
    fn double_cover_labels_agree(p in sphere_point(), a in 0.01..0.33f64) {
        let partner = p.double_cover_partner();
        prop_assert!(dist(&orbit_point(&p, a), &orbit_point(&partner, a)) < 1e-14);
        prop_assert!((0.0..std::f64::consts::PI).contains(&partner.theta));
        prop_assert!((0.0..std::f64::consts::TAU).contains(&partner.phi));
    }

    #[test]
    fn frame_basis_invariants(p in sphere_point(), a in 0.01..0.33f64) {
        let f = frame_basis(&p, a);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner(&f.e[i], &f.e[j]) - want).abs() < 1e-12);
            }
        }
        prop_assert!(dist(&f.e[I0], &(f.z * (1.0 / (a * SQRT6)))) < 1e-12);
        prop_assert!(dist(&f.z, &orbit_point(&p, a)) < 1e-12);
        let w = commutator_w(Axis::Z, &f.z);
        prop_assert!(inner(&w, &f.e[I11]).abs() < 1e-12);
        prop_assert!(dist(&w, &(f.e[I12] * (3.0 * SQRT2 * a * p.theta.sin()))) < 1e-12);
        prop_assert!(dist(&w, &commutator_w3(&f.z)) < 1e-14);
    }

    #[test]
    fn isotypic_projections_split_identity(p in sphere_point(), q in qtensor()) {
        let f = frame_basis(&p, 0.12);
        let parts = KINDS.map(|k| isotypic_project(&f, k, &q));
        prop_assert!(dist(&(parts[0] + parts[1] + parts[2]), &q) < 1e-13);
        for (i, k) in KINDS.iter().enumerate() {
            prop_assert!(dist(&isotypic_project(&f, *k, &parts[i]), &parts[i]) < 1e-13);
            for (j, part) in parts.iter().enumerate() {
                if i != j {
                    prop_assert!(isotypic_project(&f, *k, part).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn orbit_coordinates_round_trip(p in sphere_point(), a in 0.01..0.33f64) {
        let c = nearest_orbit_coordinates(&orbit_point(&p, a)).unwrap();
        let back = orbit_point(&c.point, a);
        prop_assert!(dist(&back, &orbit_point(&p, a)) < 1e-12);
        prop_assert!(c.point.theta <= std::f64::consts::FRAC_PI_2 + 1e-12);
        prop_assert!((c.director.norm() - 1.0).abs() < 1e-12);
    }
}
