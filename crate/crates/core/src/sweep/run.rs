use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};
use spacelog_milp::SolveStats;

use crate::error::Error;
use crate::formulation::CostSettings;
use crate::game::{
    check_simplex, design_costs, solve_scenario1, theta_star_from_costs, CostSource, CurveSet, MilpCostEvaluator,
    SearchOptions, UtilityPoint,
};
use crate::model::{validate_scenario, ScenarioConfig};
use crate::par::parallel_map;

use super::spec::{AxisVariable, SweepMode, SweepSpec};

/// What a sweep prices designs with.
#[derive(Debug, Clone, Copy)]
pub enum SweepBase<'a> {
    /// The network model; structural axes rebuild it per grid value.
    Model { cfg: &'a ScenarioConfig, settings: &'a CostSettings },
    /// Fixed cost curves; only coefficient axes are allowed.
    Curves(&'a CurveSet),
}

impl SweepBase<'_> {
    pub fn num_commercial(&self) -> usize {
        match self {
            SweepBase::Model { cfg, .. } => cfg.num_commercial(),
            SweepBase::Curves(c) => c.players.len(),
        }
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub axes: Vec<f64>,
    pub feasible: bool,
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
    pub baseline: f64,
    pub u_o: f64,
    pub u_p: Vec<f64>,
    pub welfare: f64,
    pub nash_product: Option<f64>,
    /// Coordinator mission cost plus incentives paid.
    pub expense: f64,
    pub incentive_paid: f64,
    pub j_o: f64,
    pub j_p: Vec<f64>,
    /// Why the point could not be evaluated.
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(axes: Vec<f64>, k: usize, error: String) -> Self {
        SweepRecord {
            axes,
            feasible: false,
            alpha: vec![f64::NAN; k],
            theta: vec![f64::NAN; k],
            baseline: f64::NAN,
            u_o: f64::NAN,
            u_p: vec![f64::NAN; k],
            welfare: f64::NAN,
            nash_product: None,
            expense: f64::NAN,
            incentive_paid: f64::NAN,
            j_o: f64::NAN,
            j_p: vec![f64::NAN; k],
            error: Some(error),
        }
    }

    fn from_point(axes: Vec<f64>, p: &UtilityPoint, feasible: bool) -> Self {
        SweepRecord {
            axes,
            feasible,
            alpha: p.alpha.clone(),
            theta: p.theta.clone(),
            baseline: p.baseline,
            u_o: p.u_o,
            u_p: p.u_p.clone(),
            welfare: p.welfare,
            nash_product: if feasible { p.nash_product } else { None },
            expense: p.coordinator_expense(),
            incentive_paid: p.incentive_paid(),
            j_o: p.costs[0],
            j_p: p.costs[1..].to_vec(),
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub name: String,
    pub axis_names: Vec<String>,
    pub num_commercial: usize,
    pub records: Vec<SweepRecord>,
    #[serde(skip)]
    pub stats: SolveStats,
    /// Cost evaluations that ran the solver.
    pub solves: usize,
}

/// Structural values of one grid point, in axis order.
type StructKey = Vec<(AxisVariable, usize, u64)>;

/// Applies structural axis values to a copy of the scenario.
pub fn apply_structure(cfg: &ScenarioConfig, values: &[(AxisVariable, usize, f64)]) -> Result<ScenarioConfig, Error> {
    let mut c = cfg.clone();
    let mut seats = vec![c.coordinator_index().ok_or_else(|| Error::Argument("scenario has no coordinator".into()))?];
    seats.extend(c.commercial_indices());
    for &(var, seat, v) in values {
        let player = *seats.get(seat).ok_or_else(|| Error::Argument(format!("seat {seat} does not exist")))?;
        match var {
            AxisVariable::Demand => c.deployment_demand_total = v,
            AxisVariable::PlantMass => c.players[player].isru_plant_mass = v,
            AxisVariable::Fleet => c.players[player].fleet_per_mission = v as u32,
            AxisVariable::Alpha | AxisVariable::Theta => {}
        }
    }
    let diags = validate_scenario(&c);
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    Ok(c)
}

/// Evaluates every grid point, row-major over the axes (the first axis
/// varies slowest). Points with `sum(alpha) > 1` are skipped. Per-point
/// failures are recorded in the row.
pub fn run_sweep(base: SweepBase, spec: &SweepSpec, workers: usize) -> Result<SweepResult, Error> {
    let k = base.num_commercial();
    spec.validate(k)?;
    let axes_pts: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.points()).collect::<Result<_, _>>()?;
    let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
    for pts in &axes_pts {
        grid = grid.into_iter().flat_map(|g| pts.iter().map(move |&v| [g.clone(), vec![v]].concat())).collect();
    }
    let mode = spec.mode();
    let default_alpha = if spec.alpha.is_empty() { vec![0.0; k] } else { spec.alpha.clone() };
    let alpha_of = |g: &[f64]| {
        let mut a = default_alpha.clone();
        for (ax, &v) in spec.axes.iter().zip(g) {
            if ax.variable == AxisVariable::Alpha {
                a[ax.seat() - 1] = v;
            }
        }
        a
    };
    grid.retain(|g| mode == SweepMode::Scenario1 || alpha_of(g).iter().sum::<f64>() <= 1.0 + 1e-9);

    let struct_of = |g: &[f64]| -> StructKey {
        spec.axes
            .iter()
            .zip(g)
            .filter(|(a, _)| a.variable.is_structural())
            .map(|(a, &v)| (a.variable, a.seat(), v.to_bits()))
            .collect()
    };
    if matches!(base, SweepBase::Curves(_)) && spec.axes.iter().any(|a| a.variable.is_structural()) {
        return Err(Error::Argument("structural axes need a scenario config, not cost curves".into()));
    }

    // one cost source per distinct structure
    let mut keys: Vec<StructKey> = Vec::new();
    for g in &grid {
        let key = struct_of(g);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let evaluators: Vec<Result<MilpCostEvaluator, String>> = match base {
        SweepBase::Model { cfg, settings } => parallel_map(&keys, workers, |key| {
            let vals: Vec<(AxisVariable, usize, f64)> = key.iter().map(|&(v, s, b)| (v, s, f64::from_bits(b))).collect();
            let c = apply_structure(cfg, &vals).map_err(|e| e.to_string())?;
            let e = MilpCostEvaluator::new(c, settings.clone()).map_err(|e| e.to_string())?;
            Ok(if spec.cache { e } else { e.without_cache() })
        }),
        SweepBase::Curves(_) => Vec::new(),
    };
    let index: HashMap<StructKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();

    let inner = SearchOptions { resolution: spec.resolution, workers: 1, ..SearchOptions::default() };
    let eval_point = |g: &Vec<f64>| -> SweepRecord {
        let src: &dyn CostSource = match base {
            SweepBase::Curves(c) => c,
            SweepBase::Model { .. } => match &evaluators[index[&struct_of(g)]] {
                Ok(e) => e,
                Err(msg) => return SweepRecord::failed(g.clone(), k, msg.clone()),
            },
        };
        match point_for(src, spec, mode, &alpha_of(g), g, &inner) {
            Ok((p, feasible)) => SweepRecord::from_point(g.clone(), &p, feasible),
            Err(e) => SweepRecord::failed(g.clone(), k, e.to_string()),
        }
    };
    let records = parallel_map(&grid, workers, eval_point);

    let mut stats = SolveStats::default();
    let mut solves = 0;
    for e in evaluators.iter().flatten() {
        stats.absorb(&e.stats());
        solves += e.solves();
    }
    Ok(SweepResult {
        name: spec.name.clone(),
        axis_names: spec.axes.iter().map(|a| a.name()).collect(),
        num_commercial: k,
        records,
        stats,
        solves,
    })
}

/// The design at one grid point and whether it lies in the feasible domain.
/// Without an equal split (negative welfare) players are paid break-even.
fn point_for(
    src: &dyn CostSource,
    spec: &SweepSpec,
    mode: SweepMode,
    alpha: &[f64],
    g: &[f64],
    inner: &SearchOptions,
) -> Result<(UtilityPoint, bool), Error> {
    let q = src.baseline();
    let r = src.disagreement();
    match mode {
        SweepMode::Scenario1 => match solve_scenario1(src, inner) {
            Ok(d) => Ok((d.point, true)),
            Err(Error::NoBeneficialDesign(_)) => {
                let zero = vec![0.0; alpha.len()];
                let costs = design_costs(src, &zero)?;
                Ok((UtilityPoint::from_costs(q, costs, &zero, &zero, &r), false))
            }
            Err(e) => Err(e),
        },
        SweepMode::Scenario2 => {
            check_simplex(alpha, src.num_commercial())?;
            let costs = design_costs(src, alpha)?;
            match theta_star_from_costs(q, &costs, alpha, &r) {
                Some(theta) => {
                    let p = UtilityPoint::from_costs(q, costs, alpha, &theta, &r);
                    let ok = p.is_feasible();
                    Ok((p, ok))
                }
                None => {
                    let theta: Vec<f64> = alpha
                        .iter()
                        .enumerate()
                        .map(|(i, &a)| if a > 0.0 { costs[i + 1] / (a * q) } else { 0.0 })
                        .collect();
                    Ok((UtilityPoint::from_costs(q, costs, alpha, &theta, &r), false))
                }
            }
        }
        SweepMode::Scenario3 => {
            let mut theta = if spec.theta.is_empty() { vec![0.0; alpha.len()] } else { spec.theta.clone() };
            for (ax, &v) in spec.axes.iter().zip(g) {
                if ax.variable == AxisVariable::Theta {
                    theta[ax.seat() - 1] = v;
                }
            }
            let costs = design_costs(src, alpha)?;
            let p = UtilityPoint::from_costs(q, costs, alpha, &theta, &r);
            let ok = p.is_feasible() && crate::game::omega_contains_costs(q, &p.costs, alpha, &theta);
            Ok((p, ok))
        }
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

/// CSV with columns: axis names, feasible, u_o, u_p1..u_pK, welfare,
/// nash_product, expense, incentive_paid, J_o, J_p1..J_pK. Non-finite
/// values are left empty.
pub fn write_sweep_csv<W: Write>(out: W, result: &SweepResult) -> Result<(), Error> {
    let k = result.num_commercial;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = result.axis_names.clone();
    header.push("feasible".into());
    header.push("u_o".into());
    header.extend((1..=k).map(|i| format!("u_p{i}")));
    header.extend(["welfare", "nash_product", "expense", "incentive_paid", "J_o"].map(String::from));
    header.extend((1..=k).map(|i| format!("J_p{i}")));
    w.write_record(&header)?;
    for r in &result.records {
        let mut row: Vec<String> = r.axes.iter().map(|&x| num(x)).collect();
        row.push(r.feasible.to_string());
        row.push(num(r.u_o));
        row.extend(r.u_p.iter().map(|&x| num(x)));
        row.push(num(r.welfare));
        row.push(r.nash_product.map_or(String::new(), num));
        row.push(num(r.expense));
        row.push(num(r.incentive_paid));
        row.push(num(r.j_o));
        row.extend(r.j_p.iter().map(|&x| num(x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn jnum(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn jvec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| jnum(x)).collect())
}

/// The same records as JSON, restricted to `quantities` (all when empty).
pub fn sweep_json(result: &SweepResult, quantities: &[String]) -> Value {
    let want = |q: &str| quantities.is_empty() || quantities.iter().any(|x| x == q);
    let records: Vec<Value> = result
        .records
        .iter()
        .map(|r| {
            let mut m = Map::new();
            let axes: Map<String, Value> = result.axis_names.iter().cloned().zip(r.axes.iter().map(|&x| jnum(x))).collect();
            m.insert("axes".into(), Value::Object(axes));
            m.insert("feasible".into(), Value::Bool(r.feasible));
            if want("coefficients") {
                m.insert("alpha".into(), jvec(&r.alpha));
                m.insert("theta".into(), jvec(&r.theta));
            }
            if want("utilities") {
                m.insert("u_o".into(), jnum(r.u_o));
                m.insert("u_p".into(), jvec(&r.u_p));
            }
            if want("welfare") {
                m.insert("welfare".into(), jnum(r.welfare));
            }
            if want("nash_product") {
                m.insert("nash_product".into(), r.nash_product.map_or(Value::Null, jnum));
            }
            if want("expense") {
                m.insert("expense".into(), jnum(r.expense));
            }
            if want("incentive_paid") {
                m.insert("incentive_paid".into(), jnum(r.incentive_paid));
            }
            if want("costs") {
                m.insert("baseline".into(), jnum(r.baseline));
                m.insert("J_o".into(), jnum(r.j_o));
                m.insert("J_p".into(), jvec(&r.j_p));
            }
            if let Some(e) = &r.error {
                m.insert("error".into(), Value::String(e.clone()));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "name": result.name,
        "axes": result.axis_names,
        "num_commercial": result.num_commercial,
        "records": records,
    })
}

pub fn write_sweep_json<W: Write>(mut out: W, result: &SweepResult, quantities: &[String]) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(&sweep_json(result, quantities)).expect("json values serialise");
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}
