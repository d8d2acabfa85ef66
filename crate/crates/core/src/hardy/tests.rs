use super::*;
use alloc::string::ToString;
use alloc::vec;
use proptest::prelude::*;

fn pw(c: f64) -> HardyFunction {
    HardyFunction::power(c).unwrap()
}

fn f(s: &str) -> HardyFunction {
    s.parse().unwrap()
}

#[test]
fn eval_examples() {
    assert_eq!(pw(1.5).eval(4.0).unwrap(), 8.0);
    assert_eq!(HardyFunction::monomial(1.0, 1.0, 1.0).unwrap().eval(4.0).unwrap(), 8.0);
    assert_eq!(f("t^1.5 + t^0.5").eval(9.0).unwrap(), 30.0);
}

#[test]
fn eval_domain() {
    assert!(matches!(pw(1.5).eval(1.5), Err(Error::Domain { .. })));
    assert!(pw(1.5).eval(f64::NAN).is_err());
    assert_eq!(f("2*t^1.5*log^1").eval_extended(1.0).unwrap(), 0.0);
    assert_eq!(f("2*t^1.5").eval_extended(1.0).unwrap(), 2.0);
    assert!(f("t^1.5*log^-1").eval_extended(1.0).is_err());
}

#[test]
fn derivative_examples() {
    assert_eq!(pw(1.5).derivative(1), HardyFunction::monomial(1.5, 0.5, 0.0).unwrap());
    let d = HardyFunction::monomial(1.0, 1.0, 1.0).unwrap().derivative(1);
    assert_eq!(
        d,
        HardyFunction::new(vec![
            HardyMonomial::new(1.0, 0.0, 1.0).unwrap(),
            HardyMonomial::new(1.0 / core::f64::consts::LN_2, 0.0, 0.0).unwrap(),
        ])
        .unwrap()
    );
    let p = f("3*t^2.5*log^2 + t^0.5");
    assert_eq!(p.derivative(0), p);
    assert!(f("5*t^0").derivative(1).is_zero());
    assert_eq!(f("5*t^0").derivative(1).growth_type(), f64::NEG_INFINITY);
}

#[test]
fn growth_type_examples() {
    assert_eq!(f("t^1.5*log^3").growth_type(), 1.5);
    assert_eq!(f("t^2.5 + t^0.5").growth_type(), 2.5);
    assert_eq!(f("t^0*log^1").growth_type(), 0.0);
}

#[test]
fn classify_examples() {
    let c = classify_family(&[pw(1.5), pw(2.5)]);
    assert_eq!(c.verdict, Verdict::MemberOfPPrime);
    assert!(c.violations.is_empty());

    let c = classify_family(&[f("t^2*log^1"), pw(2.5)]);
    assert_eq!(c.verdict, Verdict::MemberOfP);
    assert_eq!(c.violations, vec![String::from(VIOLATION_PPRIME)]);

    let c = classify_family(&[pw(2.0), pw(2.5)]);
    assert_eq!(c.verdict, Verdict::NotMember);
    assert!(c.violations[0].starts_with("(ii) polynomial leading term"));
}

#[test]
fn classify_other_failures() {
    let c = classify_family(&[f("t^0*log^2")]);
    assert_eq!(c.verdict, Verdict::NotMember);
    assert!(c.violations[0].starts_with("(i)"));
    let c = classify_family(&[pw(1.5), f("2*t^1.5 + t^0.2")]);
    assert_eq!(c.verdict, Verdict::NotMember);
    assert!(c.violations[0].starts_with("(iii)"));
    // a non-integer leading power hides an integer lower-order term
    assert_eq!(classify_family(&[f("t^2.5 + t^2")]).verdict, Verdict::MemberOfPPrime);
    assert_eq!(classify_family(&[]).verdict, Verdict::NotMember);
}

#[test]
fn floor_orbit_examples() {
    assert_eq!(pw(1.5).floor_orbit(4).unwrap(), vec![1, 2, 5, 8]);
    assert_eq!(pw(1.0).floor_orbit(4).unwrap(), vec![1, 2, 3, 4]);
    // oracle: n^{5/2} floors computed with exact integer square roots
    let oracle: Vec<i64> = (1..=5u64).map(|n| isqrt(n.pow(5)) as i64).collect();
    assert_eq!(oracle, vec![1, 5, 15, 32, 55]);
    assert_eq!(pw(2.5).floor_orbit(5).unwrap(), oracle);
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn icbrt(x: u128) -> u128 {
    let mut r = (x as f64).cbrt() as u128;
    while r * r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

#[test]
fn floor_orbit_perfect_powers_are_exact() {
    let p = pw(1.5);
    for n in 1..=3000u64 {
        assert_eq!(p.floor_at(n).unwrap() as u64, isqrt(n * n * n), "n = {n}");
    }
    // n^{1.25} with n = m^4 is m^5 exactly
    let p = pw(1.25);
    for m in [2u64, 3, 10, 37, 100] {
        assert_eq!(p.floor_at(m.pow(4)).unwrap(), m.pow(5) as i64, "m = {m}");
    }
    // 2/3 is not a double: 8^{0.666…6} sits just below 4, and the floor says so
    let c = 2.0 / 3.0;
    let n = 27u64;
    let below = icbrt((n as u128) * (n as u128)) as i64 - 1;
    assert_eq!(pw(c).floor_at(n).unwrap(), below);
    // large perfect squares: n^{1.5} with n = m^2
    for m in [1000u64, 4096, 65_535] {
        let n = m * m;
        assert_eq!(p_floor(1.5, n), (m * m * m) as i64);
    }
}

fn p_floor(c: f64, n: u64) -> i64 {
    pw(c).floor_at(n).unwrap()
}

#[test]
fn floor_orbit_errors() {
    assert!(matches!(f("t^1.5 - 10*t^1").floor_orbit(10), Err(Error::Domain { .. })));
    assert!(matches!(pw(3.5).floor_orbit(1 << 16), Err(Error::OrbitOverflow { .. })));
    assert!(f("t^1.5*log^-1").floor_orbit(3).is_err());
}

#[test]
fn floor_orbit_is_nondecreasing() {
    for p in [pw(1.5), pw(2.5), f("t^1.2*log^2 + 3*t^0.5"), f("0.5*t^2*log^1")] {
        let o = p.floor_orbit(2000).unwrap();
        assert!(o.windows(2).all(|w| w[0] <= w[1]), "{p}");
    }
}

#[test]
fn derivative_lowers_type_by_one() {
    for p in [
        pw(1.5),
        f("t^2.5*log^3 + t"),
        f("t*log^1"),
        f("4*t^3.25 - t^1.5*log^-2"),
    ] {
        let tau = p.growth_type();
        assert!(tau >= 1.0);
        assert_eq!(p.derivative(1).growth_type(), tau - 1.0);
    }
}

#[test]
fn central_differences_match_symbolic_derivative() {
    for p in [pw(1.5), f("t^2.5*log^3 + t"), f("2*t^1.2*log^-1 - t^0.3")] {
        let d = p.derivative(1);
        for t in [10.0, 100.0] {
            let exact = d.eval(t).unwrap();
            let mut consts = Vec::new();
            for h in [1e-3, 1e-4] {
                let fd = (p.eval(t + h).unwrap() - p.eval(t - h).unwrap()) / (2.0 * h);
                let err = (fd - exact).abs();
                assert!(err <= 1e-6 * exact.abs().max(1.0), "{p} at {t}: {err}");
                consts.push(err / (h * h));
            }
            // the h = 1e-3 step is dominated by truncation: C·h² with C of order |P'''|
            let third = p.derivative(3).eval(t).unwrap().abs();
            assert!(consts[0] <= third + 1.0, "{p}: C = {}", consts[0]);
        }
    }
}

#[test]
fn logarithmic_derivative_tends_to_type() {
    let p = pw(1.5);
    let t = 1e6;
    let ratio = t * p.derivative(1).eval(t).unwrap() / p.eval(t).unwrap();
    assert!((ratio - 1.5).abs() < 0.01);
    let q = f("t^1.5*log^2");
    let ratio = t * q.derivative(1).eval(t).unwrap() / q.eval(t).unwrap();
    assert!((ratio - 1.5).abs() < 0.2);
}

#[test]
fn normalized_growth_is_stable() {
    let p = pw(1.5);
    let a = p.eval(1e5).unwrap() / 1e5f64.powf(1.5);
    let b = p.eval(1e6).unwrap() / 1e6f64.powf(1.5);
    assert!(((a - b) / b).abs() < 1e-6);
}

#[test]
fn sign_threshold_is_sound() {
    let p = f("t^1.5 - 40*t^1.2*log^2");
    let t0 = p.sign_threshold();
    assert!(t0.is_finite() && t0 > 2.0);
    let mut t = t0;
    while t < t0 * 1e4 {
        assert!(p.eval(t).unwrap() > 0.0, "{t}");
        t *= 1.07;
    }
    assert_eq!(pw(2.5).sign_threshold(), 2.0);
}

#[test]
fn parse_and_display() {
    let p = f("1*t^1.5 + 2*t^0.5*log^1");
    assert_eq!(p.monomials().len(), 2);
    assert_eq!(p.to_string(), "1*t^1.5 + 2*t^0.5*log^1");
    assert_eq!(f("t^2.5 - t^1.5").to_string(), "1*t^2.5 + -1*t^1.5");
    assert_eq!(
        f("-3 * t ^ 1.5 * log ^ -2"),
        HardyFunction::monomial(-3.0, 1.5, -2.0).unwrap()
    );
    assert_eq!(f("t^1 + t^1"), HardyFunction::monomial(2.0, 1.0, 0.0).unwrap());
    assert_eq!(f("1e-1*t^1.5e0"), HardyFunction::monomial(0.1, 1.5, 0.0).unwrap());
    for bad in ["", "t^", "x^2", "t^1.5 +", "t^1.5 t", "t - t", "log^"] {
        assert!(bad.parse::<HardyFunction>().is_err(), "{bad:?}");
    }
    let fam = parse_family("t^1.5; t^2.5").unwrap();
    assert_eq!(fam, vec![pw(1.5), pw(2.5)]);
}

fn arb_function() -> impl Strategy<Value = HardyFunction> {
    prop::collection::vec(
        (
            prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
            prop_oneof![Just(0.0), Just(0.5), Just(1.0), Just(1.5), 0.0..4.0f64],
            prop_oneof![Just(0.0), Just(1.0), -2.0..3.0f64],
        ),
        1..4,
    )
    .prop_filter_map("nonzero", |terms| {
        let ms = terms
            .into_iter()
            .map(|(a, c, b)| HardyMonomial::new(a, c, b).unwrap())
            .collect();
        HardyFunction::new(ms).ok()
    })
}

proptest! {
    #[test]
    fn display_parse_round_trip(p in arb_function()) {
        let q: HardyFunction = p.to_string().parse().unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn monomials_are_sorted_and_unique(p in arb_function()) {
        let ms = p.monomials();
        for w in ms.windows(2) {
            prop_assert!((w[0].power, w[0].logpower) > (w[1].power, w[1].logpower));
        }
    }
}
