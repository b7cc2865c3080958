mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rearrange_lab_core::functionals::{
    ball_convolution_h, ball_difference_i, eval_hl, eval_riesz2, kernel_pair_integral,
};
use rearrange_lab_core::integrand::{parse, Variables};
use rearrange_lab_core::necessity::{
    build_hl_counterexample, build_kernel_monotonicity_counterexample, build_riesz_counterexample,
    evaluate_hl_construction, kernel_pair_difference, RieszConstructionOptions,
};
use rearrange_lab_core::regions::{ball_radius_for_measure, unit_ball_volume};
use rearrange_lab_core::supermod::{
    check_c2_supermodular, check_strict_supermodular, check_supermodular, deficit, StrictVerdict,
    SupermodularVerdict, DEFAULT_FD_STEP,
};
use rearrange_lab_core::{
    Integrand, Kernel, LatticeSpec, Method, Region, RieszOptions, SimpleFunction,
    SupermodularityWitness,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn simple_1d() -> impl Strategy<Value = SimpleFunction> {
    any::<u64>().prop_map(|seed| common::random_1d(&mut ChaCha8Rng::seed_from_u64(seed), 8))
}

fn simple_2d() -> impl Strategy<Value = SimpleFunction> {
    any::<u64>().prop_map(|seed| common::random_2d(&mut ChaCha8Rng::seed_from_u64(seed), 3))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn union_measure_is_additive(f in simple_1d()) {
        let parts: Vec<Region> = f.pieces().iter().map(|p| p.region.clone()).collect();
        let sum: f64 = parts.iter().map(Region::measure).sum();
        let union = Region::union(parts).unwrap();
        prop_assert!((union.measure() - sum).abs() <= 1e-12 * sum.max(1.0));
    }

    #[test]
    fn ball_radius_round_trips(n in 1usize..=3, r in 1e-3f64..50.0) {
        let m = Region::ball(vec![0.0; n], r).unwrap().measure();
        prop_assert!((ball_radius_for_measure(m, n).unwrap() - r).abs() <= 1e-12 * r.max(1.0));
    }

    #[test]
    fn samples_lie_in_their_region(f in simple_2d(), seed in any::<u64>()) {
        for piece in f.pieces() {
            for x in piece.region.sample_points(64, seed).unwrap() {
                prop_assert!(piece.region.contains(&x));
            }
        }
    }

    #[test]
    fn rearrangement_is_equimeasurable(f in simple_2d(), a in 0.0f64..10.0, w in 0.0f64..5.0) {
        let star = f.rearrange();
        let before = f.layer_measure(a, a + w + 1e-9).unwrap();
        let after = star.layer_measure(a, a + w + 1e-9).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        prop_assert!((f.support_measure() - star.support_measure()).abs() <= 1e-12 * f.support_measure().max(1.0));
        prop_assert!(star.rearrange().approx_eq(&star, 1e-12));
    }

    #[test]
    fn rearrangement_decreases_along_rays(f in simple_2d(), angle in 0.0f64..std::f64::consts::TAU) {
        let star = f.rearrange();
        let mut prev = f64::INFINITY;
        for step in 0..200 {
            let r = 0.011 + 0.029 * step as f64;
            let v = star.evaluate(&[r * angle.cos(), r * angle.sin()]).unwrap();
            prop_assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn printed_expressions_reparse(
        text in prop::sample::select(vec![
            "x1*x2 - x1^2*x2^2", "min(x1,x2)", "-x1^2^0.5 + 3/(1+x2)",
            "exp(-abs(x1-x2))*sqrt(x1)", "max(x1, 2*x2) - log(1+x1*x2)", "x1 - -x2 * (x1 - x2)",
        ]),
        points in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 100),
    ) {
        let expr = parse(text, Variables::Indexed(2)).unwrap();
        let printed = expr.display(Variables::Indexed(2)).to_string();
        let again = parse(&printed, Variables::Indexed(2)).unwrap();
        for (a, b) in points {
            let (u, v) = (expr.eval(&[a, b]), again.eval(&[a, b]));
            match (u, v) {
                (Ok(u), Ok(v)) => prop_assert!(u == v || (u - v).abs() <= 1e-12 * u.abs()),
                (u, v) => prop_assert_eq!(u.is_err(), v.is_err()),
            }
        }
    }

    #[test]
    fn deficit_is_symmetric_in_coordinate_pairs(
        y in prop::collection::vec(0.0f64..4.0, 3),
        h in 0.1f64..2.0,
        k in 0.1f64..2.0,
    ) {
        let f = Integrand::parse("x1*x2*x3 - x1^2*x2 + min(x2,x3)*x1", 3).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let w = SupermodularityWitness::evaluate(&f, i, j, y.clone(), h, k).unwrap();
            let s = w.swapped();
            let back = deficit(&f, s.i, s.j, &s.y, s.h, s.k).unwrap();
            prop_assert!((w.deficit - back).abs() <= 1e-12 * w.deficit.abs().max(1.0));
        }
    }

    #[test]
    fn hl_inequality_holds_for_supermodular_integrands(
        u1 in simple_1d(), u2 in simple_1d(),
        text in prop::sample::select(vec!["x1*x2", "min(x1,x2)", "sqrt(x1*x2)"]),
    ) {
        let f = Integrand::parse(text, 2).unwrap();
        let u = vec![u1, u2];
        let star: Vec<_> = u.iter().map(SimpleFunction::rearrange).collect();
        let lhs = eval_hl(&f, &u).unwrap();
        let rhs = eval_hl(&f, &star).unwrap();
        prop_assert_eq!(lhs.method, Method::Exact1D);
        prop_assert!(lhs.value <= rhs.value + 1e-9);
    }

    #[test]
    fn riesz_inequality_holds_on_the_line(f in simple_1d(), g in simple_1d()) {
        let psi = Integrand::parse("x1*x2", 2).unwrap();
        let opts = RieszOptions::default();
        for k in [Kernel::indicator(1.0).unwrap(), Kernel::radial("exp(-r)").unwrap()] {
            let lhs = eval_riesz2(&psi, &f, &g, &k, &opts).unwrap();
            let rhs = eval_riesz2(&psi, &f.rearrange(), &g.rearrange(), &k, &opts).unwrap();
            prop_assert!(lhs.value <= rhs.value + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn monte_carlo_matches_exact_on_the_line(f in simple_1d(), seed in any::<u64>()) {
        // Lifting A, B to A x (0,1), B x (0,1) with a kernel in x1 alone
        // reproduces the 1D pair integral on the Monte Carlo path. The field
        // below is the indicator of |x1| < 1.
        let k1 = Kernel::indicator(1.0).unwrap();
        let k2 = Kernel::field("min(1, max(0, 1 - abs(x1)) * 1e300)").unwrap();
        let opts = RieszOptions { samples: 20_000, seed };
        let pieces = f.pieces();
        let (a, b) = (&pieces[0].region, &pieces[pieces.len() - 1].region);
        let exact = kernel_pair_integral(a, b, &k1, &opts).unwrap();
        let lift = |r: &Region| {
            let (lo, hi) = r.intervals_1d().unwrap()[0];
            Region::cuboid(vec![lo, 0.0], vec![hi, 1.0]).unwrap()
        };
        let mc = kernel_pair_integral(&lift(a), &lift(b), &k2, &opts).unwrap();
        let sampled = matches!(mc.method, Method::MonteCarlo { .. });
        prop_assert!(sampled);
        prop_assert!((mc.value - exact.value).abs() <= 4.0 * mc.stderr + 1e-12,
            "exact {} vs {} +- {}", exact.value, mc.value, mc.stderr);
    }

    #[test]
    fn h_is_nonincreasing_and_i_nonnegative(
        n in 1usize..=3,
        eps in 0.05f64..0.5,
        d in 0.6f64..3.0,
        kernel in prop::sample::select(vec!["indicator", "exp(-r)", "1/(1+r^3)"]),
    ) {
        let k = if kernel == "indicator" {
            Kernel::indicator(1.0).unwrap()
        } else {
            Kernel::radial(kernel).unwrap()
        };
        let mut prev = f64::INFINITY;
        for step in 0..20 {
            let h = ball_convolution_h(&k, eps, n, 0.15 * step as f64).unwrap();
            prop_assert!(h <= prev + 1e-10);
            prev = h;
        }
        let mut z = vec![0.0; n];
        z[0] = d;
        for t in [eps, 0.5, 1.0, 2.0, 4.0] {
            prop_assert!(ball_difference_i(&k, eps, &z, t, n).unwrap() >= -1e-9);
        }
    }
}

#[test]
fn i_vanishes_beyond_the_support() {
    let k = Kernel::indicator(1.0).unwrap();
    for n in 1..=3 {
        let mut z = vec![0.0; n];
        z[0] = 1.5;
        let i = ball_difference_i(&k, 0.25, &z, 1.5 + 1.25, n).unwrap();
        assert!(i.abs() <= 1e-12, "n = {n}: {i}");
    }
}

#[test]
fn i_matches_monte_carlo_in_the_plane() {
    // I(t) = K(B_t(0), B_eps) - K(B_t(z), B_eps).
    let k = Kernel::radial("exp(-r)").unwrap();
    let (eps, t, z) = (0.3, 0.8, [1.2, 0.0]);
    let opts = RieszOptions {
        samples: 400_000,
        seed: 11,
    };
    let small = Region::ball(vec![0.0, 0.0], eps).unwrap();
    let near =
        kernel_pair_integral(&Region::ball(vec![0.0, 0.0], t).unwrap(), &small, &k, &opts).unwrap();
    let far =
        kernel_pair_integral(&Region::ball(z.to_vec(), t).unwrap(), &small, &k, &opts).unwrap();
    let mc = near.value - far.value;
    let err = near.stderr.hypot(far.stderr);
    let quad = ball_difference_i(&k, eps, &z, t, 2).unwrap();
    assert!((mc - quad).abs() <= 4.0 * err, "{quad} vs {mc} +- {err}");
}

#[test]
fn witnesses_recompute_and_c2_agrees() {
    let lattice = LatticeSpec::default();
    for text in [
        "x1*x2",
        "x1*x2 - x1^2*x2^2",
        "exp(x1*x2/16)",
        "sqrt(x1*x2 + 1)",
        "x1*x2*(3 - x1 - x2)",
    ] {
        let f = Integrand::parse(text, 2).unwrap();
        let verdict = check_supermodular(&f, &lattice).unwrap();
        let c2 = check_c2_supermodular(&f, &lattice, DEFAULT_FD_STEP).unwrap();
        match &verdict {
            SupermodularVerdict::Violation { witness, .. } => {
                assert!((witness.recompute(&f).unwrap() - witness.deficit).abs() <= 1e-12);
                assert!(
                    c2.negative,
                    "{text}: lattice violation but no negative mixed difference"
                );
            }
            SupermodularVerdict::PassedOnLattice { .. } => {
                assert!(!c2.negative, "{text}: negative mixed difference {}", c2.min);
            }
        }
    }
}

#[test]
fn hl_pipeline_gap_is_minus_deficit() {
    let lattice = LatticeSpec::default();
    for text in [
        "x1*x2 - x1^2*x2^2",
        "x1*x2*(2 - x1*x2)",
        "x1*x2*(1 - x1)",
        "min(x1,x2) - x1*x2/4",
    ] {
        let f = Integrand::parse(text, 2).unwrap();
        let SupermodularVerdict::Violation { witness, .. } =
            check_supermodular(&f, &lattice).unwrap()
        else {
            panic!("{text} should violate");
        };
        for n in 1..=3 {
            let rep = build_hl_counterexample(&f, &witness, n).unwrap();
            assert!(rep.lhs.value > rep.rhs.value);
            assert!((rep.gap + witness.deficit).abs() <= 1e-9 * witness.deficit.abs().max(1.0));
            assert!(rep.certified);
        }
    }
}

#[test]
fn strictly_supermodular_construction_strictly_gains() {
    // Distinct values and positive increments: rearranging strictly helps.
    let lattice = LatticeSpec::default();
    let f = Integrand::parse("x1*x2 + x1^2*x2^2", 2).unwrap();
    assert!(matches!(
        check_strict_supermodular(&f, &lattice).unwrap(),
        StrictVerdict::StrictOnLattice { .. }
    ));
    for y in [[0.5, 1.0], [1.0, 2.0], [3.0, 0.5]] {
        let w = SupermodularityWitness::evaluate(&f, 0, 1, y.to_vec(), 0.5, 1.0).unwrap();
        let rep = evaluate_hl_construction(&f, &w, 1).unwrap();
        assert!(rep.rhs.value - rep.lhs.value > 0.0);
    }
}

#[test]
fn riesz_decomposition_and_limit() {
    let psi = Integrand::parse("x1*x2 - x1^2*x2^2", 2).unwrap();
    let w = SupermodularityWitness::evaluate(&psi, 0, 1, vec![1.0, 1.0], 1.0, 1.0).unwrap();
    for kernel in [
        Kernel::indicator(1.0).unwrap(),
        Kernel::radial("exp(-r)").unwrap(),
    ] {
        let rep =
            build_riesz_counterexample(&psi, &w, &kernel, 1, &RieszConstructionOptions::default())
                .unwrap();
        let dec = rep.decomposition.as_ref().unwrap();
        assert!(dec.agrees);
        assert!((rep.gap - dec.predicted_gap).abs() <= 1e-8);
        assert!(rep.rows.last().unwrap().gap > 0.0);
        assert!(rep.certified);
    }
}

#[test]
fn riesz_decomposition_in_the_plane() {
    let psi = Integrand::parse("x1*x2 - x1^2*x2^2", 2).unwrap();
    let w = SupermodularityWitness::evaluate(&psi, 0, 1, vec![1.0, 1.0], 1.0, 1.0).unwrap();
    let k = Kernel::indicator(1.0).unwrap();
    let opts = RieszConstructionOptions {
        r_list: Some(vec![2.0, 3.0]),
        riesz: RieszOptions {
            samples: 100_000,
            seed: 5,
        },
        ..Default::default()
    };
    let rep = build_riesz_counterexample(&psi, &w, &k, 2, &opts).unwrap();
    let dec = rep.decomposition.as_ref().unwrap();
    assert!(
        (rep.gap - dec.predicted_gap).abs() <= 4.0 * rep.stderr + 1e-8,
        "{} vs {} +- {}",
        rep.gap,
        dec.predicted_gap,
        rep.stderr
    );
    assert!(dec.i_eps.unwrap() > 0.0);
}

#[test]
fn kernel_certificate_matches_pointwise_monotonicity() {
    let psi = Integrand::parse("x1*x2", 2).unwrap();
    let opts = RieszOptions::default();
    let suite = [
        "min(abs(x1),2)",
        "1/(1+abs(x1))",
        "exp(-x1^2)",
        "abs(x1)^0.5",
        "1",
    ];
    for h in suite {
        let k = Kernel::field(h).unwrap();
        for (z1, z2) in [(0.5, 1.5), (0.3, 2.5), (1.0, 1.8)] {
            let rep = build_kernel_monotonicity_counterexample(
                &psi,
                &k,
                &[z1],
                &[z2],
                0.1,
                1.0,
                1.0,
                &opts,
            )
            .unwrap();
            let fails = kernel_pair_difference(&k, &[z1], &[z2]).unwrap() < -1e-9;
            assert_eq!(rep.certified, fails, "{h} at ({z1}, {z2}): gap {}", rep.gap);
        }
    }
}

#[test]
fn unit_ball_volumes() {
    assert_eq!(unit_ball_volume(1), 2.0);
    assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
}
