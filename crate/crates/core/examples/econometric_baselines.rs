//! AR, HAR, HARX and ARMAX fitted on one training span.

use qrc_vol::dataset::{SyntheticMarket, SyntheticSpec};
use qrc_vol::econ::{fit_spec, LinearSpec};

fn main() -> qrc_vol::Result<()> {
    let frame = SyntheticMarket::generate(&SyntheticSpec::long_history(2))?.prepare()?.frame;
    let train = 0..570;
    let target = 570;
    for (name, spec) in [
        ("AR1", LinearSpec::ar(1)),
        ("AR3", LinearSpec::ar(3)),
        ("HAR", LinearSpec::har()),
        ("HARX", LinearSpec::harx()),
        ("ARMAX", LinearSpec::armax()),
    ] {
        let fitted = fit_spec(&spec, &frame, train.clone())?;
        let m = &fitted.model;
        println!(
            "{name:<6} {} regressors, MA {:?}, sigma2 {:.4}, forecast {:+.4} (actual {:+.4})",
            m.names.len(),
            m.ma,
            m.residual_variance,
            fitted.forecast_one_step(&frame, target)?,
            frame.log_rv()[target]
        );
    }
    Ok(())
}
