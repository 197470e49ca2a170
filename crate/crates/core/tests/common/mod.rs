#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacelog::game::{CostCurve, CurveSet, CurveSource};

/// Increasing piecewise-linear cost with knots every 0.1 and occasional
/// jumps, ending at `end`. Jumps sit just after a knot so that every
/// multiple of 0.01 evaluates on a linear piece.
pub fn random_curve(rng: &mut ChaCha8Rng, name: &str, end: f64) -> CostCurve {
    let mut pts = vec![(0.0, 0.0)];
    let mut raw = Vec::new();
    for i in 1..=10 {
        let slope: f64 = rng.gen_range(0.3..1.7);
        let jump: f64 = if rng.gen_bool(0.25) { rng.gen_range(0.5..3.0) } else { 0.0 };
        raw.push((i, slope, jump));
    }
    let total: f64 = raw.iter().map(|(_, s, j)| s + j).sum();
    let mut c = 0.0;
    for (i, slope, jump) in raw {
        let prev = (i - 1) as f64 / 10.0;
        if jump > 0.0 {
            c += jump * end / total;
            pts.push((prev + 0.001, c));
        }
        c += slope * end / total;
        pts.push((i as f64 / 10.0, c));
    }
    pts.last_mut().unwrap().1 = end;
    CostCurve::from_pairs(name, &pts, CurveSource::UserSupplied).unwrap()
}

/// A game with `k` commercial players on random curves. The coordinator's
/// curve ends at Q; each player's ends between 0.3 Q and 1.3 Q.
pub fn random_instance(seed: u64, k: usize) -> CurveSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: f64 = rng.gen_range(50.0..5_000.0);
    let coordinator = random_curve(&mut rng, "coordinator", q);
    let players = (1..=k)
        .map(|i| {
            let end = q * rng.gen_range(0.3..1.3);
            random_curve(&mut rng, &format!("player-{i}"), end)
        })
        .collect();
    CurveSet::new(q, coordinator, players)
}

/// Random point of the participation simplex with every entry positive.
pub fn random_alpha(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w[..k].iter().map(|x| x / s).collect()
}

pub fn scaled(set: &CurveSet, c: f64) -> CurveSet {
    let scale = |curve: &CostCurve| {
        let pts: Vec<(f64, f64)> = curve.samples.iter().map(|s| (s.alpha, s.cost * c)).collect();
        CostCurve::from_pairs(curve.player.clone(), &pts, CurveSource::UserSupplied).unwrap()
    };
    CurveSet::new(set.baseline * c, scale(&set.coordinator), set.players.iter().map(scale).collect())
}
