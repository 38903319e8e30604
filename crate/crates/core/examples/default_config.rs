//! Print the built-in run configuration as TOML, a starting point for `--config`.

fn main() -> qrc_vol::Result<()> {
    print!("{}", qrc_vol::pipeline::RunConfig::default().to_toml()?);
    Ok(())
}
