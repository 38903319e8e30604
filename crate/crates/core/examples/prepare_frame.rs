//! Daily returns to monthly log-RV, quarterly/annual aggregates and the joined frame.

use qrc_vol::dataset::{compute_monthly_log_rv, assemble_frame, SyntheticMarket, SyntheticSpec};

fn main() -> qrc_vol::Result<()> {
    let market = SyntheticMarket::generate(&SyntheticSpec::long_history(1))?;
    let rv = compute_monthly_log_rv(&market.daily)?;
    println!("{} monthly log-RV values, {} thin months", rv.log_rv.len(), rv.thin_months.len());

    let prepared = assemble_frame(&rv, &market.features)?;
    let frame = &prepared.frame;
    println!("frame: {} rows, {} .. {}", frame.len(), frame.months()[0], frame.months()[frame.len() - 1]);
    for name in ["RV", "RVq", "RVa", "MKT"] {
        let col = frame.column(name)?;
        println!("{name:>4} first row {:+.4}, last row {:+.4}", col[0], col[col.len() - 1]);
    }
    for w in &prepared.warnings {
        println!("warning: {w}");
    }

    let dir = tempfile_dir();
    let path = dir.join("frame.csv");
    frame.write_csv(&path)?;
    let back = qrc_vol::dataset::load_frame(&path)?;
    assert_eq!(&back, frame);
    println!("round-tripped through {}", path.display());
    Ok(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join("qrc-vol-prepare-example");
    std::fs::create_dir_all(&d).unwrap();
    d
}
