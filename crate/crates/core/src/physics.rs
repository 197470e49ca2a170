//! Closed-form physics used by the transport and ISRU transformations.

use crate::error::Error;

/// Standard gravity, m/s^2.
pub const G0: f64 = 9.80665;

/// Water electrolysis splits 1 kg of water into 1/9 kg H2 and 8/9 kg O2.
pub const H2_MASS_FRACTION: f64 = 1.0 / 9.0;
pub const O2_MASS_FRACTION: f64 = 8.0 / 9.0;

/// Fraction of the departing wet mass burned for a manoeuvre.
pub fn burn_fraction(delta_v_km_s: f64, isp: f64) -> f64 {
    1.0 - (-delta_v_km_s * 1000.0 / (G0 * isp)).exp()
}

/// Propellant consumed by the rocket equation: `wet * (1 - exp(-dv / (g0 isp)))`.
///
/// ```
/// let burned = spacelog::physics::propellant_burn(100_000.0, 2.52, 420.0).unwrap();
/// assert!((burned - 45_764.24).abs() < 0.01);
/// ```
pub fn propellant_burn(wet_mass: f64, delta_v_km_s: f64, isp: f64) -> Result<f64, Error> {
    if !(wet_mass >= 0.0) || !(delta_v_km_s >= 0.0) {
        return Err(Error::Argument(format!("wet mass and delta-v must be >= 0 (got {wet_mass}, {delta_v_km_s})")));
    }
    if !(isp > 0.0) {
        return Err(Error::Argument(format!("isp must be > 0 (got {isp})")));
    }
    Ok(wet_mass * burn_fraction(delta_v_km_s, isp))
}

/// Propellant split of a burn by mass: (H2, O2).
pub fn burn_split(burn: f64, ox_fuel_ratio: f64) -> (f64, f64) {
    (burn / (1.0 + ox_fuel_ratio), burn * ox_fuel_ratio / (1.0 + ox_fuel_ratio))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsruYield {
    pub water: f64,
    pub h2: f64,
    pub o2_usable: f64,
    pub o2_excess: f64,
}

impl IsruYield {
    pub fn usable_propellant(&self) -> f64 {
        self.h2 + self.o2_usable
    }
}

/// Output of a water-ISRU plant over `duration_days`. Oxygen beyond the
/// burn mixture ratio is reported as excess.
pub fn isru_yield(plant_mass: f64, duration_days: f64, productivity: f64, ox_fuel_ratio: f64) -> IsruYield {
    let water = plant_mass.max(0.0) * productivity.max(0.0) * duration_days.max(0.0) / 365.0;
    let h2 = water * H2_MASS_FRACTION;
    let o2 = water * O2_MASS_FRACTION;
    let o2_usable = o2.min(ox_fuel_ratio * h2);
    IsruYield { water, h2, o2_usable, o2_excess: o2 - o2_usable }
}

/// Spares needed per year to keep a plant running.
pub fn maintenance_demand(plant_mass: f64, rate: f64) -> f64 {
    plant_mass.max(0.0) * rate.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burn_examples() {
        assert_eq!(propellant_burn(100_000.0, 0.0, 420.0).unwrap(), 0.0);
        // independent evaluation of the exponential
        let e1 = 100_000.0 * (1.0 - (-2520.0f64 / (9.80665 * 420.0)).exp());
        assert!((propellant_burn(100_000.0, 2.52, 420.0).unwrap() - e1).abs() < 1e-9);
        // closed form gives 45,764.2 kg; 45,758 is a loose rounding of it
        assert!((e1 - 45_764.24).abs() < 0.01);
        assert!((e1 - 45_758.0).abs() / 45_758.0 < 2e-4);
        let e2 = propellant_burn(60_000.0, 3.77, 420.0).unwrap();
        assert!((e2 - 35_976.0).abs() < 1.0, "{e2}");
        assert!(propellant_burn(-1.0, 1.0, 420.0).is_err());
        assert!(propellant_burn(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn isru_examples() {
        let y = isru_yield(10_000.0, 365.0, 5.0, 5.5);
        assert!((y.water - 50_000.0).abs() < 1e-9);
        assert!((y.h2 - 5_555.555_6).abs() < 1e-3);
        assert!((y.o2_usable - 30_555.555_6).abs() < 1e-3);
        assert!((y.o2_excess - 13_888.888_9).abs() < 1e-3);
        assert!((y.usable_propellant() - 36_111.1).abs() < 0.1);
        assert_eq!(isru_yield(0.0, 100.0, 5.0, 5.5).usable_propellant(), 0.0);
        assert_eq!(isru_yield(10_000.0, 0.0, 5.0, 5.5).usable_propellant(), 0.0);
    }

    #[test]
    fn maintenance_examples() {
        assert_eq!(maintenance_demand(10_000.0, 0.05), 500.0);
        assert_eq!(maintenance_demand(10_000.0, 0.0), 0.0);
        assert_eq!(maintenance_demand(20_000.0, 0.05), 1_000.0);
    }
}
