//! Structural properties of the transform and the sharp constants.

use proptest::prelude::*;

use sharp_poisson::kernel::{BallPoint, KernelParams};
use sharp_poisson::sharp::{global_sharp_constant, pointwise_sharp_constant, HolderExponents};
use sharp_poisson::specfun::hyp2f1_abc;
use sharp_poisson::sphere_oracle::QuadratureSpec;
use sharp_poisson::transform::{extremal_boundary, lp_norm, poisson_integral, BoundaryFunction};

fn kernel() -> impl Strategy<Value = KernelParams> {
    (3usize..=5, 0.0f64..3.0).prop_map(|(n, extra)| KernelParams::normalized(n, n as f64 + extra).unwrap())
}

fn axis(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_is_linear(params in kernel(), a in -3.0f64..3.0, b in -3.0f64..3.0,
                           k in 0.5f64..4.0, r in 0.0f64..0.9) {
        let n = params.n;
        let e = axis(n);
        let spec = QuadratureSpec::default();
        let x = BallPoint::radial(n, r).unwrap();
        let f1 = move |t: f64| (k * t).cos();
        let f2 = |t: f64| t * t * t - t;
        let u1 = poisson_integral(&params, &BoundaryFunction::zonal(&e, f1).unwrap(), &x, &spec).unwrap().value;
        let u2 = poisson_integral(&params, &BoundaryFunction::zonal(&e, f2).unwrap(), &x, &spec).unwrap().value;
        let combo = BoundaryFunction::zonal(&e, move |t| a * f1(t) + b * f2(t)).unwrap();
        let u = poisson_integral(&params, &combo, &x, &spec).unwrap().value;
        let scale = a.abs() * u1.abs() + b.abs() * u2.abs() + 1e-300;
        prop_assert!((u - a * u1 - b * u2).abs() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn nonnegative_data_gives_nonnegative_values(params in kernel(), shift in 0.0f64..1.0,
                                                 r in 0.0f64..0.95, tilt in 0.0f64..1.0) {
        let n = params.n;
        let mut dir = axis(n);
        dir[1] = tilt;
        let phi = BoundaryFunction::zonal(&dir, move |t| (t - shift).max(0.0)).unwrap();
        let x = BallPoint::radial(n, r).unwrap();
        let u = poisson_integral(&params, &phi, &x, &QuadratureSpec::default()).unwrap();
        prop_assert!(u.value >= -u.error);
    }

    #[test]
    fn extremal_integral_matches_kernel_power(params in kernel(), p in 1.1f64..5.0, r in 0.0f64..0.95) {
        let exps = HolderExponents::from_p(p).unwrap();
        let n = params.n;
        let nf = n as f64;
        let x = BallPoint::radial(n, r).unwrap();
        let phi0 = extremal_boundary(&params, &exps, &x).unwrap();
        let u = poisson_integral(&params, &phi0, &x, &QuadratureSpec::default()).unwrap().value;
        let q = exps.q();
        let hb = q * params.beta / 2.0;
        let direct = params.normalization_constant().unwrap()
            * (1.0 - r * r).powf(params.alpha * q)
            * hyp2f1_abc(hb, hb - nf / 2.0 + 1.0, nf / 2.0, r * r).unwrap();
        prop_assert!((u - direct).abs() <= 1e-10 * direct);
        // ‖φ₀‖_p^p equals the same integral without the constant
        let norm = lp_norm(&phi0, p, &QuadratureSpec::default()).unwrap().value;
        let c = params.normalization_constant().unwrap();
        prop_assert!((norm.powf(p) - direct / c).abs() <= 1e-10 * direct / c);
    }

    #[test]
    fn pointwise_constant_never_exceeds_global(params in kernel(), q in 1.0f64..4.0, r in 0.0f64..0.999) {
        let exps = HolderExponents::from_q(q).unwrap();
        let global = global_sharp_constant(&params, &exps).unwrap().value;
        let local = pointwise_sharp_constant(&params, &exps, r).unwrap().value;
        prop_assert!(local <= global * (1.0 + 1e-12));
    }

    #[test]
    fn value_depends_only_on_relative_position(params in kernel(), r in 0.0f64..0.9,
                                               angle in 0.0f64..std::f64::consts::PI) {
        // rotating both the data axis and the point leaves u unchanged
        let n = params.n;
        let spec = QuadratureSpec::default();
        let f = |t: f64| (2.0 * t).sin() + t * t;
        let (s, c) = angle.sin_cos();
        let mut axis_rot = vec![0.0; n];
        axis_rot[0] = c;
        axis_rot[1] = s;
        let aligned = poisson_integral(&params, &BoundaryFunction::zonal(&axis(n), f).unwrap(),
                                       &BallPoint::radial(n, r).unwrap(), &spec).unwrap().value;
        let rotated = poisson_integral(&params, &BoundaryFunction::zonal(&axis_rot, f).unwrap(),
                                       &BallPoint::along(&axis_rot, r).unwrap(), &spec).unwrap().value;
        prop_assert!((aligned - rotated).abs() <= 1e-10 * aligned.abs().max(1.0));
    }
}
