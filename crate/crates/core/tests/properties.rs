//! Property tests over the public surface.

use pimfunc::api::{build_evaluator, EvaluatorConfig, FunctionId, MethodId, MethodKind};
use pimfunc::cordic::{cordic_rotate, generate_cordic_tables, CordicMode};
use pimfunc::fixedpoint::{
    fixed_add, fixed_mul, fixed_sub, split_float, to_fixed, to_float, FixedQ3_28,
};
use pimfunc::lut::format::{from_bytes, to_bytes, TableRecord};
use pimfunc::lut::{build_llut, build_mlut};
use proptest::prelude::*;

proptest! {
    #[test]
    fn fixed_round_trip(x in -7.99f32..7.99) {
        let f = to_fixed(x).unwrap();
        prop_assert!((to_float(f) - x).abs() <= 2f32.powi(-28) + x.abs() * f32::EPSILON);
    }

    #[test]
    fn fixed_add_sub_inverse(a in -(1i32 << 30)..(1 << 30), b in -(1i32 << 30)..(1 << 30)) {
        let (a, b) = (FixedQ3_28::from_raw(a), FixedQ3_28::from_raw(b));
        let s = fixed_add(a, b).unwrap();
        prop_assert_eq!(fixed_sub(s, b).unwrap(), a);
    }

    #[test]
    fn fixed_mul_close_to_real(a in -2.8f64..2.8, b in -2.8f64..2.8) {
        let fa = pimfunc::fixedpoint::to_fixed_f64(a).unwrap();
        let fb = pimfunc::fixedpoint::to_fixed_f64(b).unwrap();
        let p = fixed_mul(fa, fb).unwrap().to_f64();
        prop_assert!((p - fa.to_f64() * fb.to_f64()).abs() <= 2f64.powi(-28));
    }

    #[test]
    fn split_reconstructs(bits in 1u32..0x7f80_0000) {
        let x = f32::from_bits(bits);
        let parts = split_float(x).unwrap();
        prop_assert!((1.0..2.0).contains(&parts.mantissa));
        prop_assert_eq!(parts.reconstruct().to_bits(), x.to_bits());
    }

    #[test]
    fn cordic_rotation_is_unit(theta in 0.0f64..1.55) {
        let t = generate_cordic_tables(CordicMode::Circular, 28).unwrap();
        let (c, s) = cordic_rotate(&t, pimfunc::fixedpoint::to_fixed_f64(theta).unwrap()).unwrap();
        let (c, s) = (c.to_f64(), s.to_f64());
        prop_assert!((c * c + s * s - 1.0).abs() < 1e-7);
        prop_assert!((c - theta.cos()).abs() < 1e-7 && (s - theta.sin()).abs() < 1e-7);
    }

    #[test]
    fn interpolated_llut_brackets_linear_function(x in 0.0f32..4.0, slope in -3.0f64..3.0) {
        let t = build_llut(|v| slope * v + 1.0, 0.0, 4.0, 256, true).unwrap();
        let y = t.query(x).unwrap() as f64;
        prop_assert!((y - (slope * x as f64 + 1.0)).abs() < 1e-5);
    }

    #[test]
    fn nearest_mlut_uses_the_closest_node(x in 0.0f32..1.0) {
        let t = build_mlut(|v| v, 0.0, 1.0, 64, false).unwrap();
        let y = t.query(x).unwrap() as f64;
        prop_assert!((y - x as f64).abs() <= 0.5 / 64.0 + 1e-6);
    }

    #[test]
    fn tables_round_trip(log_size in 4u32..12, kind in 0usize..3) {
        let method = [MethodKind::MLutInterp, MethodKind::LLut, MethodKind::DLLutInterp][kind];
        let f = if method == MethodKind::DLLutInterp { FunctionId::Tanh } else { FunctionId::Sin };
        let ev = build_evaluator(&EvaluatorConfig::new(f, MethodId::float(method), 1 << log_size)).unwrap();
        let tables: Vec<TableRecord> = ev.tables();
        let back = from_bytes(&to_bytes(&tables).unwrap()).unwrap();
        prop_assert_eq!(back, tables);
    }

    #[test]
    fn sine_methods_agree(x in 0.05f32..6.2) {
        let mut ys = Vec::new();
        for (kind, size) in [
            (MethodKind::Cordic, 28),
            (MethodKind::LLutInterp, 1 << 14),
            (MethodKind::MLutInterp, 1 << 14),
            (MethodKind::DLutInterp, 1 << 14),
            (MethodKind::CordicLut, 28),
        ] {
            let ev = build_evaluator(&EvaluatorConfig::new(FunctionId::Sin, MethodId::float(kind), size)).unwrap();
            ys.push(ev.evaluate(x).unwrap() as f64);
        }
        for y in ys {
            prop_assert!((y - (x as f64).sin()).abs() < 1e-6);
        }
    }
}
