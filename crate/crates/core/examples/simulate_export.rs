//! Generate data to CSV, read it back, fit, and export JSON and CSV results.

use std::fs;

use fmm::io::{read_csv, write_result, CsvOptions, ResultFormat};
use fmm::{fit, FitConfig, GenSpec};

fn main() -> fmm::Result<()> {
    let dir = std::env::temp_dir().join("fmm-simulate-export");
    fs::create_dir_all(&dir).map_err(|source| fmm::FmmError::Io {
        path: dir.clone(),
        source,
    })?;
    let write = |name: &str, bytes: &[u8]| {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|source| fmm::FmmError::Io {
            path: path.clone(),
            source,
        })?;
        println!("wrote {}", path.display());
        Ok::<_, fmm::FmmError>(path)
    };

    let spec = GenSpec::new(
        5.0,
        vec![3.0, 1.0],
        vec![2.0, 4.5],
        vec![3.0, 1.0],
        vec![0.05, 0.3],
    )
    .with_noise(0.2, Some(3));
    let sim = fmm::generate(&spec)?;
    let rows = sim.t.iter().zip(&sim.y).map(|(t, y)| vec![*t, *y]);
    let csv = write("data.csv", &fmm::io::csv_table(&["time", "value"], rows))?;

    let data = read_csv(&csv, &CsvOptions::default())?;
    let result = fit(&data, &FitConfig::new(2))?;

    write("fit.json", &write_result(&result, ResultFormat::Json)?)?;
    write(
        "fitted.csv",
        &write_result(&result, ResultFormat::CsvFitted)?,
    )?;
    write(
        "components.csv",
        &write_result(&result, ResultFormat::CsvComponents)?,
    )?;
    println!("R2_total = {:.4}, SSE = {:.4}", result.r2_total, result.sse);
    Ok(())
}
