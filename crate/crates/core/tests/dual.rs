mod common;

use auglag_core::certify::inner_constants;
use auglag_core::oracle::{self, DualOracle};
use auglag_core::{AugmentedLagrangianParams, InnerProblem, StoppingCriterion};
use common::{box_point, dist, norm, sample};
use proptest::collection::vec;
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aug_lagrangian_gradient_matches_differences(
        s in sample(6),
        lam in vec(-3.0f64..3.0, 3),
        t in vec(0.0f64..1.0, 6),
        rho in 0.1f64..10.0,
    ) {
        let p = &s.problem;
        let par = AugmentedLagrangianParams::new(rho, lam[..p.m()].to_vec()).unwrap();
        let z = box_point(p.bounds(), &t, &[2]);
        let g = p.eval_aug_lagrangian_gradient(&par, &z).unwrap();
        let h = 1e-6;
        for i in 0..p.n() {
            let (mut zp, mut zm) = (z.clone(), z.clone());
            zp[i] += h;
            zm[i] -= h;
            let fd = (p.eval_aug_lagrangian(&par, &zp).unwrap() - p.eval_aug_lagrangian(&par, &zm).unwrap()) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn weak_duality_and_penalty_monotonicity(
        s in sample(6),
        lam in vec(-5.0f64..5.0, 3),
        rho in 0.1f64..5.0,
    ) {
        let p = &s.problem;
        let lam = &lam[..p.m()];
        let reference = oracle::solve_reference(p).unwrap();
        let d1 = DualOracle::new(p, rho).unwrap().evaluate(lam, None).unwrap().value;
        let d2 = DualOracle::new(p, 2.0 * rho).unwrap().evaluate(lam, None).unwrap().value;
        let scale = 1e-9 * (1.0 + reference.f_star.abs());
        prop_assert!(d1 <= reference.f_star + scale);
        prop_assert!(d1 <= d2 + scale);
        prop_assert!(d2 <= reference.f_star + scale);
        let at_star = DualOracle::new(p, rho).unwrap().evaluate(&reference.lambda_star, None).unwrap();
        prop_assert!((at_star.value - reference.f_star).abs() <= 1e-7 * (1.0 + reference.f_star.abs()));
    }

    #[test]
    fn dual_is_concave_with_lipschitz_gradient(
        s in sample(6),
        l1 in vec(-5.0f64..5.0, 3),
        l2 in vec(-5.0f64..5.0, 3),
        rho in 0.1f64..5.0,
    ) {
        let p = &s.problem;
        let (l1, l2) = (&l1[..p.m()], &l2[..p.m()]);
        let o = DualOracle::new(p, rho).unwrap();
        let (e1, e2) = (o.evaluate(l1, None).unwrap(), o.evaluate(l2, None).unwrap());
        let step: Vec<f64> = l2.iter().zip(l1).map(|(a, b)| a - b).collect();
        let lin = e1.value + dot(&e1.gradient, &step);
        let tol = 1e-8 * (1.0 + e1.value.abs() + e2.value.abs());
        prop_assert!(e2.value <= lin + tol);
        prop_assert!(e2.value >= lin - 0.5 / rho * dot(&step, &step) - tol);
        prop_assert!(dist(&e1.gradient, &e2.gradient) <= norm(&step) / rho + 1e-8);
    }

    #[test]
    fn dual_function_value_agrees_with_oracle(
        s in sample(6),
        lam in vec(-5.0f64..5.0, 3),
        rho in 0.1f64..5.0,
    ) {
        let p = &s.problem;
        let lam = lam[..p.m()].to_vec();
        let exact = DualOracle::new(p, rho).unwrap().evaluate(&lam, None).unwrap().value;
        let approx = p.dual_function_value(&AugmentedLagrangianParams::new(rho, lam).unwrap(), 1e-4).unwrap();
        prop_assert!(approx >= exact - 1e-9 * (1.0 + exact.abs()));
        prop_assert!(approx - exact <= 1e-6 * (1.0 + exact.abs()));
    }

    /// Function gap, VI gap, normal-cone distance and solution distance at arbitrary box points.
    #[test]
    fn criterion_implications(
        s in sample(6),
        lam in vec(-3.0f64..3.0, 3),
        t in vec(0.0f64..1.0, 6),
        pin in vec(any::<u8>(), 6),
        rho in 0.5f64..5.0,
    ) {
        let p = &s.problem;
        let lam = &lam[..p.m()];
        let inner = InnerProblem::new(p, rho).unwrap();
        let c = *inner.constants();
        let reference = oracle::inner_reference(p, rho, lam).unwrap();
        let z = box_point(p.bounds(), &t, &pin);
        let par = AugmentedLagrangianParams::new(rho, lam.to_vec()).unwrap();
        let g = p.eval_aug_lagrangian_gradient(&par, &z).unwrap();
        let gap = (p.eval_aug_lagrangian(&par, &z).unwrap() - reference.value).max(0.0);
        let vi = p.bounds().variational_gap(&z, &g);
        let ncd = p.bounds().normal_cone_distance(&z, &g, 1e-12).unwrap().distance;
        let tol = 1e-8 * (1.0 + vi.abs() + gap);

        // function gap ε² ⇒ VI at ε² + √(2L_p)R_p ε
        let e = gap.sqrt();
        prop_assert!(vi <= e * e + (2.0 * c.l_p).sqrt() * c.r_p * e + tol);
        // normal-cone distance ε ⇒ VI at R_p ε
        prop_assert!(vi <= c.r_p * ncd + tol);
        if c.sigma_p > 1e-6 {
            // ⇒ function gap 2ε²/σ_p ⇒ solution distance √(2/σ_p)·√gap
            prop_assert!(gap <= 2.0 * ncd * ncd / c.sigma_p + tol);
            prop_assert!(dist(&z, &reference.z_star) <= (2.0 * gap / c.sigma_p).sqrt() + 1e-6);
            prop_assert!(p.bounds().strong_convexity_gap_bound(&z, &g, c.sigma_p) >= gap - tol);
        }
    }

    /// `‖A(z̄ − z*)‖ ≤ √(2 L_d · VI(z̄))`, so a VI level `C_Z ε_in` gives the gradient-error bound.
    #[test]
    fn gradient_error_bound(
        s in sample(6),
        lam in vec(-3.0f64..3.0, 3),
        rho in 0.2f64..5.0,
        log_eps in -8.0f64..-2.0,
    ) {
        let p = &s.problem;
        let lam = &lam[..p.m()];
        let consts = inner_constants(p, rho).unwrap();
        let inner = InnerProblem::with_constants(p, rho, consts).unwrap();
        let eps_in = 10f64.powf(log_eps);
        let sol = inner
            .solve(lam, StoppingCriterion::variational(eps_in).unwrap(), &inner.default_start(), 1_000_000)
            .unwrap();
        prop_assert!(sol.variational_gap <= consts.c_z() * eps_in);
        let exact = DualOracle::new(p, rho).unwrap().evaluate(lam, None).unwrap();
        let err = dist(&sol.approx_dual_gradient, &exact.gradient);
        prop_assert!(err <= (2.0 / rho * consts.c_z() * eps_in).sqrt() + 1e-9);
        prop_assert!(sol.approx_dual_value >= exact.value - 1e-9 * (1.0 + exact.value.abs()));
    }
}
