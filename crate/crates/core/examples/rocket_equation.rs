//! Propellant physics used by the network model: burns on each transport
//! leg of the lunar network and the yield of a water ISRU plant.

use spacelog::physics::{burn_split, isru_yield, maintenance_demand, propellant_burn};

fn main() -> Result<(), spacelog::Error> {
    let (isp, ratio) = (420.0, 5.5);
    println!("{:<12}{:>10}{:>14}{:>12}{:>12}", "leg", "dv km/s", "propellant", "h2", "o2");
    for (leg, dv) in [("LEO-EML1", 3.77), ("EML1-Moon", 2.52)] {
        // fully fuelled tanker carrying 10 t
        let wet = 6_000.0 + 54_000.0 + 10_000.0;
        let burn = propellant_burn(wet, dv, isp)?;
        let (h2, o2) = burn_split(burn, ratio);
        println!("{leg:<12}{dv:>10.2}{burn:>14.1}{h2:>12.1}{o2:>12.1}");
    }

    println!();
    for plant in [5_000.0, 10_000.0, 20_000.0] {
        let y = isru_yield(plant, 365.0, 5.0, ratio);
        println!(
            "{:>6.0} kg plant: {:.0} kg water/yr -> {:.1} kg usable propellant, {:.1} kg O2 vented, {:.0} kg spares/yr",
            plant,
            y.water,
            y.usable_propellant(),
            y.o2_excess,
            maintenance_demand(plant, 0.05)
        );
    }
    Ok(())
}
