use std::collections::BTreeSet;

use choquard::grid::{h1_norm, Domain, GridFunction};
use choquard::verify::{moser_integral, run_suite, COVERAGE, SUITES};

/// The only invariant with a known counterexample at seed 0.
const KNOWN: &str = "scalar.limit_monotone";

#[test]
fn suites_execute_exactly_the_manifest() {
    for name in SUITES {
        let r = run_suite(name, 0).unwrap();
        let ran: BTreeSet<&str> = r.invariants.iter().copied().collect();
        let owned: BTreeSet<&str> = COVERAGE.iter().filter(|(_, s)| *s == name).map(|(i, _)| *i).collect();
        assert_eq!(ran, owned, "{name}");
        assert!(r.cases_run > 0);
        for v in &r.violations {
            assert_eq!(v.invariant, KNOWN, "{name}: {v:?}");
        }
    }
}

#[test]
fn reruns_serialize_identically() {
    for name in ["poisson_mms", "riesz_equiv", "gradient_fd"] {
        let a = run_suite(name, 5).unwrap().to_json();
        let b = run_suite(name, 5).unwrap().to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["suite"], name);
        assert_eq!(v["seed"], 5);
        assert!(v.get("wall_time").is_none());
    }
}

#[test]
fn seeds_change_the_samples() {
    let a = run_suite("poisson_mms", 1).unwrap().to_json();
    let b = run_suite("poisson_mms", 2).unwrap().to_json();
    assert_ne!(a, b);
}

#[test]
fn unknown_suite_is_an_error() {
    assert!(run_suite("everything", 0).is_err());
}

#[test]
fn moser_zero_is_the_area() {
    let d = Domain::new(2.0, 0.75, 10, 7).unwrap();
    let m = moser_integral(&GridFunction::zeros(d), 3.0).unwrap();
    assert!((m - 1.5).abs() < 1e-14, "{m}");
}

#[test]
fn moser_eigenfunction_is_refinement_stable() {
    let pi = std::f64::consts::PI;
    let at = |n: usize| {
        let d = Domain::unit_square(n).unwrap();
        let s = GridFunction::from_fn(d, |x, y| (pi * x).sin() * (pi * y).sin());
        moser_integral(&s.scaled(1.0 / h1_norm(&s)), 4.0 * pi).unwrap()
    };
    let (a, b) = (at(64), at(128));
    assert!((a - b).abs() <= 0.1 * b, "{a} {b}");
    // exp(4π u²) with |u|∞ = 1/π: between the area and e^{4/π}.
    assert!(b > 1.0 && b < (4.0 / pi).exp());
}

#[test]
fn moser_overflow_is_reported() {
    let d = Domain::unit_square(8).unwrap();
    let u = GridFunction::from_fn(d, |_, _| 100.0);
    assert!(moser_integral(&u, 1.0).is_err());
}
