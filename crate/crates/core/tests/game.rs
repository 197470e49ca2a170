mod common;

use common::{random_alpha, random_instance, scaled};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacelog::game::{
    design_costs, maximin_value, omega_contains_costs, solve_scenario1, solve_scenario2, solve_scenario3, theta_star_from_costs,
    welfare_from_costs, CostSource, CurveSet, SearchOptions, UtilityPoint,
};

fn opts(resolution: f64) -> SearchOptions {
    SearchOptions::default().with_resolution(resolution).with_workers(1)
}

fn rel_close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * scale.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// The equal split gives every player the same utility and stays in the
    /// feasible domain whenever the surplus is nonnegative.
    #[test]
    fn equal_split_equalises(seed in any::<u64>(), k in 1usize..=3) {
        let set = random_instance(seed, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let alpha = random_alpha(&mut rng, k);
        let q = set.baseline();
        let costs = design_costs(&set, &alpha).unwrap();
        let u = welfare_from_costs(q, &costs);
        match theta_star_from_costs(q, &costs, &alpha, &set.disagreement()) {
            Some(theta) => {
                prop_assert!(u >= -1e-9 * q);
                let p = UtilityPoint::from_costs(q, costs.clone(), &alpha, &theta, &set.disagreement());
                for v in p.utilities() {
                    prop_assert!(rel_close(v, u / (k + 1) as f64, 1e-9, q), "{v} vs {}", u / (k + 1) as f64);
                }
                prop_assert!(omega_contains_costs(q, &costs, &alpha, &theta));
            }
            None => prop_assert!(u < 0.0),
        }
    }

    /// Incentives only move money between players.
    #[test]
    fn welfare_ignores_incentives(seed in any::<u64>(), k in 1usize..=3) {
        let set = random_instance(seed, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e7a);
        let alpha = random_alpha(&mut rng, k);
        let q = set.baseline();
        let costs = design_costs(&set, &alpha).unwrap();
        let u = welfare_from_costs(q, &costs);
        for _ in 0..5 {
            let theta: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0)).collect();
            let p = UtilityPoint::from_costs(q, costs.clone(), &alpha, &theta, &set.disagreement());
            prop_assert!(rel_close(p.utilities().iter().sum::<f64>(), u, 1e-12, q));
            prop_assert!(rel_close(p.coordinator_expense() + p.u_o, q, 1e-12, q));
        }
    }

    /// Measuring all costs in another currency unit changes nothing but the
    /// unit of the utilities.
    #[test]
    fn designs_are_scale_free(seed in any::<u64>(), k in 1usize..=2, c in 0.5f64..100.0) {
        let set = random_instance(seed, k);
        let big = scaled(&set, c);
        let (a, b) = (solve_scenario1(&set, &opts(0.05)), solve_scenario1(&big, &opts(0.05)));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.alpha(), b.alpha());
                for (x, y) in a.theta().iter().zip(b.theta()) {
                    prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}");
                }
                for (x, y) in a.point.utilities().iter().zip(b.point.utilities()) {
                    prop_assert!(rel_close(x * c, y, 1e-9, b.point.baseline));
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    /// Fixing either coefficient at the bargaining design gives back the
    /// other one.
    #[test]
    fn scenarios_agree(seed in any::<u64>(), k in 1usize..=2) {
        let set = random_instance(seed, k);
        let Ok(nbs) = solve_scenario1(&set, &opts(0.05)) else { return Ok(()) };
        let s2 = solve_scenario2(&set, nbs.alpha()).unwrap();
        prop_assert_eq!(s2.theta(), nbs.theta());
        if nbs.point.nash_product.unwrap_or(0.0) > 0.0 {
            let s3 = solve_scenario3(&set, nbs.theta(), &opts(0.05)).unwrap();
            let near = s3.ties.iter().any(|t| t.alpha.iter().zip(nbs.alpha()).all(|(x, y)| (x - y).abs() <= 0.05 + 1e-9));
            prop_assert!(near, "scenario 3 gave {:?}, bargaining {:?}", s3.alpha(), nbs.alpha());
        }
    }

    /// No random feasible design beats the bargaining design on the Nash
    /// product or on the smallest utility.
    #[test]
    fn bargaining_design_dominates(seed in any::<u64>(), k in 1usize..=2) {
        let set = random_instance(seed, k);
        let Ok(nbs) = solve_scenario1(&set, &opts(0.05)) else { return Ok(()) };
        let best = nbs.point.nash_product.unwrap_or(0.0);
        let floor = maximin_value(&nbs.point);
        let q = set.baseline();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd0d0);
        for _ in 0..200 {
            // participation on the search lattice, incentives anywhere
            let alpha: Vec<f64> = random_alpha(&mut rng, k).iter().map(|a| (a * 20.0).floor() / 20.0).collect();
            let theta: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0)).collect();
            let p = UtilityPoint::evaluate(&set, &alpha, &theta).unwrap();
            if let Some(np) = p.nash_product {
                prop_assert!(np <= best * (1.0 + 1e-9) + 1e-12, "{np} > {best} at {alpha:?} {theta:?}");
                prop_assert!(maximin_value(&p) <= floor + 1e-9 * q);
            }
        }
    }
}

#[test]
fn unprofitable_players_are_rejected() {
    let set = CurveSet::linear(100.0, &[120.0]);
    assert!(solve_scenario1(&set, &opts(0.1)).is_err());
    assert!(solve_scenario2(&set, &[0.5]).is_err());
    assert!(solve_scenario3(&set, &[0.5], &opts(0.1)).is_err());
}

#[test]
fn symmetric_players_get_symmetric_designs() {
    let set = CurveSet::linear(100.0, &[60.0, 60.0, 60.0]);
    let d = solve_scenario1(&set, &opts(0.25)).unwrap();
    // every permutation of a tie is itself a tie
    for t in &d.ties {
        let mut rev = t.alpha.clone();
        rev.reverse();
        assert!(d.ties.iter().any(|u| u.alpha == rev));
    }
    let ties_are_sorted = d.ties.windows(2).all(|w| w[0].alpha <= w[1].alpha);
    assert!(ties_are_sorted);
}
