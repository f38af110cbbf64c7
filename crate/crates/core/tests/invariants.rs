use proptest::prelude::*;

use vortex_atmosphere::domain::BoundaryCurve;
use vortex_atmosphere::field::vorticity::TravelingVortex;
use vortex_atmosphere::io::config::{Spacing, SweepConfig};
use vortex_atmosphere::kernels::{complete_elliptic_ke, kernel2d, kernel2d_gradient, kernel3d, kernel3d_dz};
use vortex_atmosphere::roots::bisect;
use vortex_atmosphere::solver::FieldSolver;
use vortex_atmosphere::Point;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn legendre_relation(m in 1e-6f64..1.0 - 1e-6) {
        let (k, e) = complete_elliptic_ke(m).unwrap();
        let (k1, e1) = complete_elliptic_ke(1.0 - m).unwrap();
        let lhs = e * k1 + e1 * k - k * k1;
        prop_assert!((lhs - std::f64::consts::FRAC_PI_2).abs() < 1e-13, "{lhs}");
    }

    #[test]
    fn ring_kernel_symmetric_positive_and_translation_invariant(
        r in 0.01f64..5.0, z in -3.0f64..3.0, rs in 0.01f64..5.0, zs in -3.0f64..3.0, c in -2.0f64..2.0,
    ) {
        prop_assume!((r - rs).hypot(z - zs) > 1e-6);
        let g = kernel3d(r, z, rs, zs).unwrap().value;
        prop_assert!(g > 0.0);
        prop_assert!(rel(g, kernel3d(rs, zs, r, z).unwrap().value) < 1e-13);
        prop_assert!(rel(g, kernel3d(r, z + c, rs, zs + c).unwrap().value) < 1e-12);
    }

    #[test]
    fn ring_kernel_homogeneous_of_degree_one(
        r in 0.05f64..3.0, z in -2.0f64..2.0, rs in 0.05f64..3.0, lambda in 0.1f64..10.0,
    ) {
        prop_assume!((r - rs).hypot(z) > 1e-4);
        let g = kernel3d(r, z, rs, 0.0).unwrap().value;
        let gl = kernel3d(lambda * r, lambda * z, lambda * rs, 0.0).unwrap().value;
        prop_assert!(rel(lambda * g, gl) < 1e-12);
    }

    #[test]
    fn ring_kernel_decreases_away_from_source(
        r in 0.05f64..3.0, z in 0.001f64..3.0, rs in 0.05f64..3.0,
    ) {
        prop_assert!(kernel3d_dz(r, z, rs, 0.0).unwrap() < 0.0);
    }

    #[test]
    fn plane_kernel_symmetric_odd_and_positive(
        x1 in -3.0f64..3.0, x2 in 0.01f64..3.0, y1 in -3.0f64..3.0, y2 in 0.01f64..3.0,
    ) {
        let (x, y) = (Point::new(x1, x2), Point::new(y1, y2));
        prop_assume!(x.dist(&y) > 1e-6);
        let g = kernel2d(x, y).unwrap();
        prop_assert!(g > 0.0);
        prop_assert!(rel(g, kernel2d(y, x).unwrap()) < 1e-13);
        prop_assert!(rel(g, -kernel2d(x.reflected(), y).unwrap()) < 1e-13);
        let d = kernel2d_gradient(Point::new(x1.abs() + y1, x2), Point::new(y1, y2)).unwrap();
        prop_assert!(x1.abs() < 1e-9 || d[0] < 0.0);
    }

    #[test]
    fn bisection_brackets_root(root in -5.0f64..5.0, width in 0.1f64..4.0) {
        let x = bisect(|x| (x - root).powi(3), root - width, root + 0.7 * width, 1e-12, "cubic").unwrap();
        prop_assert!((x - root).abs() <= 1e-11);
    }

    #[test]
    fn sweep_values_ordered_with_exact_endpoints(
        a in 1e-3f64..1.0, span in 1e-3f64..10.0, steps in 2usize..40, log in any::<bool>(),
    ) {
        let s = SweepConfig {
            parameter: "core_width".into(),
            range: [a, a + span],
            steps,
            spacing: if log { Spacing::Log } else { Spacing::Linear },
            bracket: 1e-3,
        };
        let v = s.values();
        prop_assert_eq!(v.len(), steps);
        prop_assert_eq!(v[0], a);
        prop_assert_eq!(v[steps - 1], a + span);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn boundary_interpolation_stays_between_nodes(
        ls in proptest::collection::vec(0.0f64..2.0, 3..20), t in 0.0f64..1.0,
    ) {
        let n = ls.len();
        let pts: Vec<[f64; 2]> = ls.iter().enumerate().map(|(k, &l)| [k as f64, l]).collect();
        let curve = BoundaryCurve { points: pts, l0_extrapolated: None, l0_axis_root: None };
        let s = t * (n - 1) as f64;
        let k = (s.floor() as usize).min(n - 2);
        let l = curve.l_at(s);
        prop_assert!(l >= ls[k].min(ls[k + 1]) - 1e-15 && l <= ls[k].max(ls[k + 1]) + 1e-15);
        prop_assert!(curve.distance(Point::new(l, s)) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Steiner-symmetric vorticity gives a stream function even in the axial
    /// coordinate, with the relative stream vanishing on the axis.
    #[test]
    fn hill_stream_even_in_axial(z in 0.0f64..3.0, r in 0.01f64..3.0) {
        let solver = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let a = solver.stream_value(Point::new(z, r));
        let b = solver.stream_value(Point::new(-z, r));
        prop_assert!(rel(a, b) < 1e-9, "{a} {b}");
        prop_assert_eq!(solver.relative_stream(Point::new(z, 0.0)), 0.0);
    }

    #[test]
    fn lamb_stream_odd_in_radial(x1 in -3.0f64..3.0, x2 in 0.01f64..3.0) {
        let solver = FieldSolver::new(TravelingVortex::lamb(1.0, 1.0).unwrap());
        let a = solver.stream_value(Point::new(x1, x2));
        let b = solver.stream_value(Point::new(-x1, x2));
        prop_assert!(rel(a, b) < 1e-9, "{a} {b}");
        prop_assert!(a > 0.0);
    }
}
