//! Sweeps reservoir size and M on Freedman, then summarizes and writes plot
//! series plus an SVG chart into a temporary directory.

use weakboost::harness::report::{plot_curves, render_svg, summarize, write_plotdata, write_summary};
use weakboost::harness::{sweep, write_records, Settings, SweepGrid};

fn main() -> weakboost::Result<()> {
    let mut settings = Settings::new();
    settings.apply_overrides(&[
        "benchmark=freedman",
        "method=single,boost",
        "n_reservoir=10,20,40,80",
        "M=2,6",
        "repetitions=5",
    ])?;
    let grid = SweepGrid::from_settings(&settings)?;
    let out = sweep(&grid)?;

    let dir = std::env::temp_dir().join("weakboost_sweep_report");
    std::fs::create_dir_all(&dir).ok();
    let csv = std::fs::File::create(dir.join("results.csv")).expect("create results.csv");
    write_records(&out.records, csv)?;

    write_summary(&summarize(&out.records), std::io::stdout().lock())?;
    let curves = plot_curves(&out.records);
    for p in write_plotdata(&curves, &dir)? {
        println!("wrote {}", p.display());
    }
    std::fs::write(dir.join("chart.svg"), render_svg(&curves, "freedman")).expect("write svg");
    println!("wrote {}", dir.join("chart.svg").display());
    Ok(())
}
