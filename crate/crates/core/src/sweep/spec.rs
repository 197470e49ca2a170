use serde::{Deserialize, Serialize};

use crate::error::Error;

/// What an axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisVariable {
    /// Participation coefficient of a commercial seat.
    Alpha,
    /// Incentive coefficient of a commercial seat.
    Theta,
    /// Total deployment demand D, kg per window.
    Demand,
    /// ISRU plant mass of a seat, kg.
    PlantMass,
    /// Spacecraft per mission of a seat.
    Fleet,
}

impl AxisVariable {
    pub fn is_structural(self) -> bool {
        matches!(self, AxisVariable::Demand | AxisVariable::PlantMass | AxisVariable::Fleet)
    }

    fn slug(self) -> &'static str {
        match self {
            AxisVariable::Alpha => "alpha",
            AxisVariable::Theta => "theta",
            AxisVariable::Demand => "demand",
            AxisVariable::PlantMass => "plant_mass",
            AxisVariable::Fleet => "fleet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub variable: AxisVariable,
    /// Game seat: 0 is the coordinator, 1..=K the commercial players.
    /// Defaults to 1 for per-player variables.
    #[serde(default)]
    pub seat: Option<usize>,
    #[serde(default)]
    pub from: Option<f64>,
    #[serde(default)]
    pub to: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    /// Explicit values; overrides the range.
    #[serde(default)]
    pub values: Vec<f64>,
}

impl Axis {
    pub fn range(variable: AxisVariable, seat: Option<usize>, from: f64, to: f64, step: f64) -> Self {
        Axis { variable, seat, from: Some(from), to: Some(to), step: Some(step), values: Vec::new() }
    }

    pub fn list(variable: AxisVariable, seat: Option<usize>, values: Vec<f64>) -> Self {
        Axis { variable, seat, from: None, to: None, step: None, values }
    }

    pub fn seat(&self) -> usize {
        match self.variable {
            AxisVariable::Demand => 0,
            _ => self.seat.unwrap_or(1),
        }
    }

    /// Column name in outputs, e.g. `alpha_1` or `demand`.
    pub fn name(&self) -> String {
        match self.variable {
            AxisVariable::Demand => "demand".into(),
            v => format!("{}_{}", v.slug(), self.seat()),
        }
    }

    /// Grid values: `from + i step` up to `to`, snapped to 1e-12.
    pub fn points(&self) -> Result<Vec<f64>, Error> {
        if !self.values.is_empty() {
            return Ok(self.values.clone());
        }
        let (Some(from), Some(to), Some(step)) = (self.from, self.to, self.step) else {
            return Err(Error::Argument(format!("axis {} needs `values` or `from`, `to` and `step`", self.name())));
        };
        if !(step > 0.0) || !(to >= from) {
            return Err(Error::Argument(format!("axis {}: need step > 0 and to >= from", self.name())));
        }
        let n = ((to - from) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12).collect())
    }
}

/// Which coefficients are decided by the search at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Participation and incentives both chosen by the bargaining solution.
    Scenario1,
    /// Participation from the axes or defaults, incentives split the surplus.
    Scenario2,
    /// Both coefficients from the axes or defaults.
    Scenario3,
}

/// Derived quantities that may be requested in structured output.
pub const QUANTITIES: [&str; 7] = ["utilities", "welfare", "nash_product", "expense", "incentive_paid", "costs", "coefficients"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_name")]
    pub name: String,
    /// Inferred from the axes when absent: scenario 3 with a theta axis,
    /// scenario 2 otherwise.
    #[serde(default)]
    pub mode: Option<SweepMode>,
    pub axes: Vec<Axis>,
    /// Participation for seats without an alpha axis; zero when empty.
    #[serde(default)]
    pub alpha: Vec<f64>,
    /// Incentives for seats without a theta axis (scenario 3).
    #[serde(default)]
    pub theta: Vec<f64>,
    /// Lattice step of the scenario 1 search.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_true")]
    pub cache: bool,
    /// Quantities kept in the structured output; all when empty.
    #[serde(default)]
    pub quantities: Vec<String>,
}

fn default_name() -> String {
    "sweep".into()
}

fn default_resolution() -> f64 {
    0.02
}

fn default_true() -> bool {
    true
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        SweepSpec {
            name: default_name(),
            mode: None,
            axes,
            alpha: Vec::new(),
            theta: Vec::new(),
            resolution: default_resolution(),
            cache: true,
            quantities: Vec::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, Error> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn mode(&self) -> SweepMode {
        self.mode.unwrap_or(if self.axes.iter().any(|a| a.variable == AxisVariable::Theta) {
            SweepMode::Scenario3
        } else {
            SweepMode::Scenario2
        })
    }

    /// Checks the spec against a game with `k` commercial seats.
    pub fn validate(&self, k: usize) -> Result<(), Error> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Argument("a sweep has one or two axes".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for a in &self.axes {
            if !seen.insert((a.variable, a.seat())) {
                return Err(Error::Argument(format!("axis {} appears twice", a.name())));
            }
            let seat = a.seat();
            let max_seat = if matches!(a.variable, AxisVariable::Alpha | AxisVariable::Theta) { k } else { k.max(1) };
            let min_seat = if matches!(a.variable, AxisVariable::Alpha | AxisVariable::Theta) { 1 } else { 0 };
            if a.variable != AxisVariable::Demand && !(min_seat..=max_seat).contains(&seat) {
                return Err(Error::Argument(format!("axis {}: seat {seat} does not exist", a.name())));
            }
            let pts = a.points()?;
            let ok = match a.variable {
                AxisVariable::Alpha => pts.iter().all(|x| (0.0..=1.0).contains(x)),
                AxisVariable::Theta | AxisVariable::PlantMass => pts.iter().all(|x| *x >= 0.0),
                AxisVariable::Demand => pts.iter().all(|x| *x > 0.0),
                AxisVariable::Fleet => pts.iter().all(|x| *x >= 1.0 && x.fract() == 0.0),
            };
            if !ok {
                return Err(Error::Argument(format!("axis {}: values outside the variable's domain", a.name())));
            }
        }
        let mode = self.mode();
        let has = |v: AxisVariable| self.axes.iter().any(|a| a.variable == v);
        match mode {
            SweepMode::Scenario1 if has(AxisVariable::Alpha) || has(AxisVariable::Theta) => {
                return Err(Error::Argument("scenario 1 sweeps choose both coefficients; use structural axes only".into()))
            }
            SweepMode::Scenario2 if has(AxisVariable::Theta) => {
                return Err(Error::Argument("scenario 2 sweeps set theta by the equal split; drop the theta axis".into()))
            }
            _ => {}
        }
        if !self.alpha.is_empty() && self.alpha.len() != k {
            return Err(Error::Argument(format!("`alpha` needs {k} values")));
        }
        if !self.theta.is_empty() && self.theta.len() != k {
            return Err(Error::Argument(format!("`theta` needs {k} values")));
        }
        if mode == SweepMode::Scenario3 {
            let covered = (1..=k).all(|s| !self.theta.is_empty() || self.axes.iter().any(|a| a.variable == AxisVariable::Theta && a.seat() == s));
            if !covered {
                return Err(Error::Argument("scenario 3 sweeps need theta for every seat".into()));
            }
        }
        if !(self.resolution > 0.0 && self.resolution <= 1.0) {
            return Err(Error::Argument("resolution must be in (0, 1]".into()));
        }
        for q in &self.quantities {
            if !QUANTITIES.contains(&q.as_str()) {
                return Err(Error::Argument(format!("unknown quantity `{q}` (known: {})", QUANTITIES.join(", "))));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let spec = SweepSpec::from_toml_str(
            r#"
            name = "contour"
            [[axes]]
            variable = "alpha"
            from = 0.0
            to = 1.0
            step = 0.1
            [[axes]]
            variable = "theta"
            from = 0.0
            to = 1.2
            step = 0.3
            "#,
        )
        .unwrap();
        assert_eq!(spec.mode(), SweepMode::Scenario3);
        assert_eq!(spec.axes[0].points().unwrap().len(), 11);
        assert_eq!(spec.axes[0].points().unwrap()[3], 0.3);
        assert_eq!(spec.axes[1].points().unwrap(), vec![0.0, 0.3, 0.6, 0.9, 1.2]);
        assert_eq!(spec.axes[1].name(), "theta_1");
        spec.validate(1).unwrap();
        assert!(spec.validate(0).is_err());
    }

    #[test]
    fn rejects_conflicts() {
        let mut spec = SweepSpec::new(vec![Axis::range(AxisVariable::Theta, None, 0.0, 1.0, 0.5)]);
        spec.mode = Some(SweepMode::Scenario2);
        assert!(spec.validate(1).is_err());
        let spec = SweepSpec::new(vec![Axis::list(AxisVariable::Alpha, None, vec![1.5])]);
        assert!(spec.validate(1).is_err());
        let spec = SweepSpec::new(vec![Axis::list(AxisVariable::Fleet, Some(0), vec![2.5])]);
        assert!(spec.validate(1).is_err());
    }
}
