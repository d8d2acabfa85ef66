use super::*;
use crate::expsum::m_discrete;
use alloc::vec;
use proptest::prelude::*;

fn fam(s: &str) -> Vec<HardyFunction> {
    crate::hardy::parse_family(s).unwrap()
}

fn dyadic_scales(k: u32) -> Vec<u64> {
    (1..=k).map(|j| 1u64 << j).collect()
}

#[test]
fn system_validation() {
    assert!(TorusSystem::new(vec![0.1], vec![1, 2]).is_err());
    assert!(TorusSystem::new(vec![], vec![]).is_err());
    let s = TorusSystem::new(vec![1.25, -0.25], vec![3, -1]).unwrap();
    assert_eq!(s.alphas(), &[0.25, 0.75]);
    assert_eq!(s.frequency().coords(), &[-0.25, 0.25]);
}

#[test]
fn trivial_rotation_and_observable() {
    let f = fam("t^1.5; t^2.5");
    let x0 = [0.3, 0.85];
    let s = TorusSystem::new(vec![0.0, 0.0], vec![2, -3]).unwrap();
    let tr = torus_average_trace(&s, &f, &x0, &[1, 5, 100]).unwrap();
    let want = s.observable(&x0);
    for v in &tr.values {
        assert!((v - want).norm() < 1e-13);
    }
    let s = TorusSystem::new(vec![0.3, 0.7], vec![0, 0]).unwrap();
    let tr = torus_average_trace(&s, &f, &x0, &[1, 5, 100]).unwrap();
    for v in &tr.values {
        assert_eq!(*v, Complex64::new(1.0, 0.0));
    }
}

#[test]
fn golden_rotation_averages_decay() {
    let golden = (libm::sqrt(5.0) - 1.0) / 2.0;
    let s = TorusSystem::new(vec![golden], vec![1]).unwrap();
    let tr = torus_average_trace(&s, &fam("t^1.5"), &[0.0], &[1 << 16]).unwrap();
    assert!(tr.values[0].norm() <= 0.05, "{}", tr.values[0].norm());
}

#[test]
fn trace_errors() {
    let s = TorusSystem::new(vec![0.1], vec![1]).unwrap();
    let f = fam("t^1.5");
    assert!(torus_average_trace(&s, &f, &[0.0], &[4, 2]).is_err());
    assert!(torus_average_trace(&s, &f, &[0.0], &[]).is_err());
    assert!(torus_average_trace(&s, &f, &[0.0, 0.0], &[4]).is_err());
    assert!(torus_average_trace(&s, &fam("t^1.5; t^2.5"), &[0.0], &[4]).is_err());
}

#[test]
fn lattice_average_examples() {
    let f = fam("t^1.5");
    let delta = LatticeFunction::delta(&[0]);
    assert_eq!(
        lattice_average(&delta, &f, 4, &[5], true).unwrap(),
        Complex64::new(0.25, 0.0)
    );
    assert_eq!(
        lattice_average(&delta, &f, 4, &[3], true).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert_eq!(
        lattice_average(&delta, &f, 4, &[2], false).unwrap(),
        Complex64::new(0.25, 0.0)
    );
    let ones = LatticeFunction::new(vec![-200], vec![400], vec![Complex64::new(1.0, 0.0); 400]).unwrap();
    assert_eq!(
        lattice_average(&ones, &f, 20, &[0], false).unwrap(),
        Complex64::new(1.0, 0.0)
    );
    assert!(lattice_average(&delta, &fam("t^1.5; t^2.5"), 4, &[5], true).is_err());
    assert!(lattice_average(&delta, &f, 1, &[5], true).is_err());
}

#[test]
fn lattice_average_two_dims() {
    // orbit of (t^1.5, t^2.5): (1,1), (2,5), (5,15), (8,32)
    let f = fam("t^1.5; t^2.5");
    let delta = LatticeFunction::delta(&[1, 2]);
    let got = lattice_average(&delta, &f, 4, &[6, 17], true).unwrap();
    assert_eq!(got, Complex64::new(0.25, 0.0));
    assert_eq!(
        lattice_average(&delta, &f, 4, &[3, 7], true).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert_eq!(
        lattice_average(&delta, &f, 4, &[3, 7], false).unwrap(),
        Complex64::new(0.25, 0.0)
    );
}

#[test]
fn arcs() {
    let a = TorusArc::from_bounds(0.25, 0.5).unwrap();
    assert!(a.contains(0.25) && a.contains(0.4999) && !a.contains(0.5) && !a.contains(0.1));
    let w = TorusArc::new(0.9, 0.2).unwrap();
    assert!(w.contains(0.95) && w.contains(0.05) && !w.contains(0.11) && !w.contains(0.85));
    assert!(TorusArc::from_bounds(0.5, 0.25).is_err());
    assert!(TorusArc::from_bounds(-0.1, 0.25).is_err());
}

#[test]
fn equidistribution_examples() {
    let s = TorusSystem::new(vec![libm::sqrt(2.0) - 1.0], vec![1]).unwrap();
    let f = fam("t^1.5");
    let scales = [10, 1000, 100_000];
    let full = equidistribution_trace(&s, &f, &[0.0], &[TorusArc::from_bounds(0.0, 1.0).unwrap()], &scales).unwrap();
    assert_eq!(full, vec![1.0; 3]);
    let empty = equidistribution_trace(&s, &f, &[0.0], &[TorusArc::from_bounds(0.3, 0.3).unwrap()], &scales).unwrap();
    assert_eq!(empty, vec![0.0; 3]);
    let quarter =
        equidistribution_trace(&s, &f, &[0.0], &[TorusArc::from_bounds(0.0, 0.25).unwrap()], &scales).unwrap();
    assert!((quarter[2] - 0.25).abs() < 0.02, "{}", quarter[2]);
}

#[test]
fn diagnostics_examples() {
    let c = Complex64::new(0.6, -0.8);
    let trace = AverageTrace {
        scales: vec![1, 2, 3, 4, 5],
        values: vec![c; 5],
        basepoint: vec![],
    };
    let d = convergence_diagnostics(&trace, 2.5, &[0.1, 1.0]).unwrap();
    assert!((d.variation.value - 1.0).abs() < 1e-15);
    assert!(d.jumps.iter().all(|(_, n)| *n == 0));
    assert!((d.limit - c).norm() < 1e-15);

    let f = fam("t^1.5");
    let table = OrbitTable::new(&f, 1 << 10).unwrap();
    let scales = dyadic_scales(10);
    let values = table.trace(&TorusPoint::zero(1), &scales, false).unwrap();
    let d = convergence_diagnostics(
        &AverageTrace {
            scales,
            values,
            basepoint: vec![],
        },
        3.0,
        &[0.01],
    )
    .unwrap();
    assert_eq!(d.limit, Complex64::new(1.0, 0.0));
    assert_eq!(d.jumps[0].1, 0);
    assert!(convergence_diagnostics(&trace, 2.0, &[0.1]).is_err());
}

#[test]
fn lacunary_jump_count_bound() {
    let f = fam("t^1.5");
    let rep = jump_experiment(
        &f,
        &TorusPoint::new(vec![0.3]),
        ScaleSet::Lacunary {
            lambda: 2.0,
            n_max: 1 << 16,
        },
        &[0.1],
        3.0,
    )
    .unwrap();
    assert!(rep.rows[0].count as f64 <= 5.0 * libm::pow(0.1, -2.5));
}

#[test]
fn jump_experiment_examples() {
    let f = fam("t^1.5");
    let rep = jump_experiment(
        &f,
        &TorusPoint::zero(1),
        ScaleSet::Lacunary {
            lambda: 2.0,
            n_max: 1 << 12,
        },
        &[0.4, 0.1],
        3.0,
    )
    .unwrap();
    assert!(rep.rows.iter().all(|r| r.count == 0));
    assert_eq!(rep.slope, None);

    let rep = jump_experiment(
        &f,
        &TorusPoint::new(vec![0.37]),
        ScaleSet::Lacunary {
            lambda: 2.0,
            n_max: 1 << 16,
        },
        &[0.4, 0.2, 0.1],
        3.0,
    )
    .unwrap();
    if let Some(s) = rep.slope {
        assert!(s >= -3.0, "{s}");
    }

    let f2 = fam("t^1.5; t^2.5");
    let r = 2.5;
    let rep = jump_experiment(
        &f2,
        &TorusPoint::new(vec![0.37, 0.61]),
        ScaleSet::All { n_max: 1 << 12 },
        &[0.2],
        r,
    )
    .unwrap();
    let row = &rep.rows[0];
    assert!((row.count as f64) <= libm::pow(row.vr / 0.2, r) * (1.0 + 1e-12));
}

#[test]
fn jump_experiment_classification() {
    let xi = TorusPoint::new(vec![0.2]);
    let lac = ScaleSet::Lacunary {
        lambda: 2.0,
        n_max: 256,
    };
    let all = ScaleSet::All { n_max: 256 };
    assert!(jump_experiment(&fam("t^1.5*log^1"), &xi, lac, &[0.1], 3.0).is_ok());
    assert!(matches!(
        jump_experiment(&fam("t^1.5*log^1"), &xi, all, &[0.1], 3.0),
        Err(Error::ClassificationMismatch(_))
    ));
    assert!(matches!(
        jump_experiment(&fam("t^2"), &xi, lac, &[0.1], 3.0),
        Err(Error::ClassificationMismatch(_))
    ));
    assert!(jump_experiment(&fam("t^1.5"), &xi, lac, &[0.0], 3.0).is_err());
}

#[test]
fn averages_decay_off_zero_frequency() {
    let f = fam("t^1.5");
    let table = OrbitTable::new(&f, 1 << 16).unwrap();
    let scales = dyadic_scales(16);
    for x in [0.3, 0.37, -0.11, 0.01, 0.499] {
        let tr = table.trace(&TorusPoint::new(vec![x]), &scales, false).unwrap();
        assert!(tr[tr.len() - 1].norm() <= tr[0].norm(), "xi={x}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorization_identity(
        a in 0u64..(1 << 20), b in 0u64..(1 << 20),
        ba in -5i64..=5, bb in -5i64..=5,
        x0 in 0.0f64..1.0, x1 in 0.0f64..1.0,
        n in 2u64..1500,
    ) {
        // dyadic rotations make α_i β_i exact, so the identity holds to rounding
        let s = TorusSystem::new(vec![a as f64 / (1u64 << 20) as f64, b as f64 / (1u64 << 20) as f64], vec![ba, bb]).unwrap();
        let f = fam("t^1.5; t^2.5");
        let x = [x0, x1];
        let tr = torus_average_trace(&s, &f, &x, &[n]).unwrap();
        let want = s.observable(&x) * m_discrete(&f, n, &s.frequency(), false).unwrap();
        prop_assert!((tr.values[0] - want).norm() <= 1e-12);
    }

    #[test]
    fn factorization_unit_beta(alpha in 0.0f64..1.0, sign in prop::bool::ANY, x0 in 0.0f64..1.0, n in 2u64..3000) {
        let s = TorusSystem::new(vec![alpha], vec![if sign { 1 } else { -1 }]).unwrap();
        let f = fam("t^1.7");
        let tr = torus_average_trace(&s, &f, &[x0], &[n]).unwrap();
        let want = s.observable(&[x0]) * m_discrete(&f, n, &s.frequency(), false).unwrap();
        prop_assert!((tr.values[0] - want).norm() <= 1e-12);
    }

    #[test]
    fn translation_invariance(
        a in 0u64..1024, x in 0u64..1024, v in 0u64..1024, lo in 0u64..1024, len in 0u64..1024,
    ) {
        let d = |k: u64| k as f64 / 1024.0;
        let s = TorusSystem::new(vec![d(a) + 1.0 / 4096.0 + 1.0 / 65536.0], vec![1]).unwrap();
        let f = fam("t^1.5");
        let arc = TorusArc::new(d(lo), d(len)).unwrap();
        let moved_arc = TorusArc::new(d(lo) - d(v), d(len)).unwrap();
        let scales = [10, 100, 2000];
        let shifted = equidistribution_trace(&s, &f, &[d(x) + d(v)], &[arc], &scales).unwrap();
        let moved = equidistribution_trace(&s, &f, &[d(x)], &[moved_arc], &scales).unwrap();
        prop_assert_eq!(shifted, moved);
    }

    #[test]
    fn diagnostics_consistent(x in -0.5f64..0.5, r in 2.1f64..5.0) {
        let f = fam("t^1.5");
        let table = OrbitTable::new(&f, 1 << 12).unwrap();
        let scales: Vec<u64> = (2..=1u64 << 12).step_by(7).collect();
        let values = table.trace(&TorusPoint::new(vec![x]), &scales, false).unwrap();
        let d = convergence_diagnostics(&AverageTrace { scales, values, basepoint: vec![] }, r, &[0.02, 0.1, 0.3]).unwrap();
        for (delta, c) in &d.jumps {
            prop_assert!(delta * (*c as f64).powf(1.0 / r) <= d.variation.value * (1.0 + 1e-12));
        }
    }
}
