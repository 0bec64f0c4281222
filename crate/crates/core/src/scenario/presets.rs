//! Built-in scenarios for the five published figures.

use super::ScenarioConfig;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

fn scenario(route: &str, n: u64, t: &str, alpha: f64, lambda: f64, ratio: f64) -> String {
    format!(
        "route = \"{route}\"\nN = {n}\nT = \"{t}\"\nalpha = {alpha:?}\nlambda_y = {lambda:?}\nlambda_z = {lambda:?}\n\
         omega_ratio = {ratio:?}\nexcited = [{{ offset = \"0 Omega\", dipole_sq = 1.0 }}]\ngrid = \"auto\"\n"
    )
}

/// Named scenarios making up a figure preset, in plotting order.
pub fn preset(name: &str) -> Result<Vec<(String, ScenarioConfig)>> {
    let texts: Vec<(String, String)> = match name {
        "fig1" => [1.0, 5.0, 20.0]
            .iter()
            .map(|&l| (format!("fig1_lambda{l}"), scenario("exact", 20, "0 EF", 8.0, l, 1.0)))
            .collect(),
        "fig2" => vec![("fig2".into(), scenario("compare", 35, "0 EF", 9.0, 1.0, 1.0))],
        "fig3" => vec![("fig3".into(), scenario("compare", 196, "0 EF", 9.0, 5.0, 1.0))],
        "fig4" => [0.1, 0.25, 0.5]
            .iter()
            .map(|&t| (format!("fig4_t{t}"), scenario("tf_finite", 10667, &format!("{t} EF"), 9.0, 1.0, 1.0)))
            .collect(),
        "fig5" => [0.8, 1.0, 1.2]
            .iter()
            .map(|&r| (format!("fig5_ratio{r:?}"), scenario("tf_finite", 10667, "0.25 EF", 9.0, 1.0, r)))
            .collect(),
        other => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{other}`, expected one of {PRESET_NAMES:?}"),
            ))
        }
    };
    texts
        .into_iter()
        .map(|(label, text)| ScenarioConfig::from_toml_str(&text).map(|c| (label, c)))
        .collect()
}
