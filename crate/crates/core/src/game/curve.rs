use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveSource {
    MilpEvaluated,
    UserSupplied,
}

/// One sample of a cost curve. `cost` is `+inf` when the assignment cannot
/// be completed; unevaluated samples are kept but ignored by interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    pub cost: f64,
    pub evaluated: bool,
}

impl CurvePoint {
    pub fn new(alpha: f64, cost: f64) -> Self {
        CurvePoint { alpha, cost, evaluated: true }
    }

    pub fn unevaluated(alpha: f64) -> Self {
        CurvePoint { alpha, cost: f64::NAN, evaluated: false }
    }
}

/// Mission cost of one player as a function of its own deployment share,
/// linear between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub player: String,
    pub samples: Vec<CurvePoint>,
    pub source: CurveSource,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    alpha: f64,
    cost: Option<f64>,
    feasible: bool,
}

impl CostCurve {
    pub fn new(player: impl Into<String>, samples: Vec<CurvePoint>, source: CurveSource) -> Result<Self, Error> {
        let player = player.into();
        if samples.is_empty() {
            return Err(Error::Argument(format!("curve `{player}` has no samples")));
        }
        for w in samples.windows(2) {
            if !(w[0].alpha < w[1].alpha) {
                return Err(Error::Argument(format!("curve `{player}`: alpha values must be strictly increasing")));
            }
        }
        for s in &samples {
            if !(0.0..=1.0).contains(&s.alpha) {
                return Err(Error::Argument(format!("curve `{player}`: alpha {} is outside [0, 1]", s.alpha)));
            }
            if s.evaluated && !(s.cost >= 0.0) {
                return Err(Error::Argument(format!("curve `{player}`: cost {} at alpha {} must be >= 0 or inf", s.cost, s.alpha)));
            }
        }
        Ok(CostCurve { player, samples, source })
    }

    /// Curve from (alpha, cost) pairs.
    pub fn from_pairs(player: impl Into<String>, pairs: &[(f64, f64)], source: CurveSource) -> Result<Self, Error> {
        Self::new(player, pairs.iter().map(|&(a, c)| CurvePoint::new(a, c)).collect(), source)
    }

    /// `J(a) = cost_at_one * a`.
    pub fn linear(player: impl Into<String>, cost_at_one: f64) -> Self {
        Self::from_pairs(player, &[(0.0, 0.0), (1.0, cost_at_one)], CurveSource::UserSupplied)
            .expect("linear curve is well formed")
    }

    /// Interpolated cost; `+inf` outside the sampled range or next to an
    /// infeasible sample.
    pub fn eval(&self, alpha: f64) -> f64 {
        let pts: Vec<&CurvePoint> = self.samples.iter().filter(|s| s.evaluated).collect();
        let tol = 1e-12;
        if let Some(p) = pts.iter().find(|p| (p.alpha - alpha).abs() <= tol) {
            return p.cost;
        }
        let Some(hi) = pts.iter().position(|p| p.alpha > alpha) else { return f64::INFINITY };
        if hi == 0 {
            return f64::INFINITY;
        }
        let (a, b) = (pts[hi - 1], pts[hi]);
        if !a.cost.is_finite() || !b.cost.is_finite() {
            return f64::INFINITY;
        }
        let t = (alpha - a.alpha) / (b.alpha - a.alpha);
        a.cost + t * (b.cost - a.cost)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            let row = CsvRow {
                alpha: s.alpha,
                cost: (s.evaluated && s.cost.is_finite()).then_some(s.cost),
                feasible: s.evaluated && s.cost.is_finite(),
            };
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `alpha,cost,feasible` rows. Infeasible rows become `+inf`;
    /// feasible rows without a cost are unevaluated.
    pub fn read_csv<R: Read>(player: impl Into<String>, input: R, source: CurveSource) -> Result<Self, Error> {
        let mut r = csv::Reader::from_reader(input);
        let mut samples = Vec::new();
        for row in r.deserialize() {
            let row: CsvRow = row.map_err(|e| Error::Parse(e.to_string()))?;
            samples.push(match (row.feasible, row.cost) {
                (false, _) => CurvePoint::new(row.alpha, f64::INFINITY),
                (true, Some(c)) => CurvePoint::new(row.alpha, c),
                (true, None) => CurvePoint::unevaluated(row.alpha),
            });
        }
        Self::new(player, samples, source)
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv_file(player: impl Into<String>, path: impl AsRef<Path>) -> Result<Self, Error> {
        Self::read_csv(player, std::fs::File::open(path)?, CurveSource::UserSupplied)
    }
}

/// Everything the game needs without a network model: the baseline cost
/// and one curve per player.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub baseline: f64,
    /// Coordinator cost against its own share `1 - sum(alpha)`.
    pub coordinator: CostCurve,
    pub players: Vec<CostCurve>,
    /// Disagreement utilities, coordinator first. Empty means all zero.
    pub disagreement: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    baseline: f64,
    #[serde(default)]
    disagreement: Vec<f64>,
    curves: Vec<CurveEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveEntry {
    player: String,
    #[serde(default)]
    coordinator: bool,
    alpha: Vec<f64>,
    /// A negative cost marks an infeasible sample.
    cost: Vec<f64>,
}

impl CurveSet {
    pub fn new(baseline: f64, coordinator: CostCurve, players: Vec<CostCurve>) -> Self {
        CurveSet { baseline, coordinator, players, disagreement: Vec::new() }
    }

    /// Coordinator `J_o(b) = Q b` and one linear curve per player.
    pub fn linear(baseline: f64, player_costs_at_one: &[f64]) -> Self {
        let players =
            player_costs_at_one.iter().enumerate().map(|(k, &c)| CostCurve::linear(format!("player-{}", k + 1), c)).collect();
        CurveSet::new(baseline, CostCurve::linear("coordinator", baseline), players)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        let file: CurveFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut coordinator = None;
        let mut players = Vec::new();
        for c in file.curves {
            if c.alpha.len() != c.cost.len() {
                return Err(Error::Parse(format!("curve `{}`: alpha and cost lengths differ", c.player)));
            }
            let pts = c
                .alpha
                .iter()
                .zip(&c.cost)
                .map(|(&a, &j)| CurvePoint::new(a, if j < 0.0 { f64::INFINITY } else { j }))
                .collect();
            let curve = CostCurve::new(c.player, pts, CurveSource::UserSupplied)?;
            if c.coordinator {
                if coordinator.replace(curve).is_some() {
                    return Err(Error::Parse("exactly one coordinator curve is required".into()));
                }
            } else {
                players.push(curve);
            }
        }
        let coordinator = coordinator.ok_or_else(|| Error::Parse("exactly one coordinator curve is required".into()))?;
        if !(file.baseline > 0.0) {
            return Err(Error::Parse(format!("baseline must be > 0 (got {})", file.baseline)));
        }
        if !file.disagreement.is_empty() && file.disagreement.len() != players.len() + 1 {
            return Err(Error::Parse("disagreement needs one value per player, coordinator first".into()));
        }
        Ok(CurveSet { baseline: file.baseline, coordinator, players, disagreement: file.disagreement })
    }

    pub fn to_toml_string(&self) -> String {
        let entry = |c: &CostCurve, coordinator: bool| {
            let pts: Vec<&CurvePoint> = c.samples.iter().filter(|s| s.evaluated).collect();
            CurveEntry {
                player: c.player.clone(),
                coordinator,
                alpha: pts.iter().map(|s| s.alpha).collect(),
                cost: pts.iter().map(|s| if s.cost.is_finite() { s.cost } else { -1.0 }).collect(),
            }
        };
        let mut curves = vec![entry(&self.coordinator, true)];
        curves.extend(self.players.iter().map(|c| entry(c, false)));
        let file = CurveFile { baseline: self.baseline, disagreement: self.disagreement.clone(), curves };
        toml::to_string_pretty(&file).expect("curve sets serialise")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let c = CostCurve::from_pairs("p", &[(0.0, 0.0), (0.5, 10.0), (1.0, 40.0)], CurveSource::UserSupplied).unwrap();
        assert_eq!(c.eval(0.25), 5.0);
        assert_eq!(c.eval(0.75), 25.0);
        assert_eq!(c.eval(1.0), 40.0);
        let gap =
            CostCurve::from_pairs("p", &[(0.0, 0.0), (0.5, f64::INFINITY), (1.0, 40.0)], CurveSource::UserSupplied).unwrap();
        assert_eq!(gap.eval(0.25), f64::INFINITY);
        assert_eq!(gap.eval(1.0), 40.0);
        let short = CostCurve::from_pairs("p", &[(0.2, 1.0), (0.4, 2.0)], CurveSource::UserSupplied).unwrap();
        assert_eq!(short.eval(0.1), f64::INFINITY);
        assert_eq!(short.eval(0.5), f64::INFINITY);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(CostCurve::from_pairs("p", &[(0.5, 0.0), (0.5, 1.0)], CurveSource::UserSupplied).is_err());
        assert!(CostCurve::from_pairs("p", &[(0.0, -1.0)], CurveSource::UserSupplied).is_err());
        assert!(CostCurve::from_pairs("p", &[(1.5, 1.0)], CurveSource::UserSupplied).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = CostCurve::from_pairs("p", &[(0.0, 0.0), (0.5, f64::INFINITY), (1.0, 40.0)], CurveSource::UserSupplied)
            .unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("alpha,cost,feasible\n"));
        let back = CostCurve::read_csv("p", buf.as_slice(), CurveSource::UserSupplied).unwrap();
        assert_eq!(back.eval(1.0), 40.0);
        assert_eq!(back.eval(0.5), f64::INFINITY);
    }

    #[test]
    fn toml_round_trip() {
        let set = CurveSet::linear(100.0, &[60.0, 30.0]);
        let back = CurveSet::from_toml_str(&set.to_toml_string()).unwrap();
        assert_eq!(back, set);
    }
}
