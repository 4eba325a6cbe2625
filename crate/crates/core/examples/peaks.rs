//! Peak and trough times of individual waves, straight from the parameters.

use fmm::{FmmModel, WaveParams};

fn main() -> fmm::Result<()> {
    let waves = vec![
        WaveParams::new(2.0, 1.5, 0.2, 0.1)?,
        WaveParams::new(2.0, 3.4, 2.3, 0.2)?,
        WaveParams::new(1.0, 0.5, 0.0, 1.0)?,
    ];
    let model = FmmModel::new(0.0, waves)?;

    println!("{:>8} {:>8} {:>8} {:>8}", "tU", "ZU", "tL", "ZL");
    for p in &model.peaks(true)?.waves {
        println!(
            "{:8.4} {:8.4} {:8.4} {:8.4}",
            p.t_upper, p.z_upper, p.t_lower, p.z_lower
        );
    }

    // unwrapped times differ from the wrapped ones by whole periods
    let (tu, tl) = model.waves[0].peak_trough(false)?;
    println!("unwrapped wave 1: tU={tu:.4} tL={tl:.4}");
    Ok(())
}
