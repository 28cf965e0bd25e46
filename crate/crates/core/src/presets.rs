//! Scenario files and the twelve built-in trials.
//!
//! Every preset shares one geometry: observer at the origin, 600 s north at
//! 5 m/s then 600 s east at 5 m/s, 121 samples 10 s apart, and the target
//! initially due north (`b0 = 0`). Only range, course, speed and noise vary.

use std::path::Path;

use crate::error::{Result, TmaError};
use crate::kinematics::Scenario;

const PRESETS: [(&str, &str); 12] = [
    ("trial01", include_str!("../presets/trial01.toml")),
    ("trial02", include_str!("../presets/trial02.toml")),
    ("trial03", include_str!("../presets/trial03.toml")),
    ("trial04", include_str!("../presets/trial04.toml")),
    ("trial05", include_str!("../presets/trial05.toml")),
    ("trial06", include_str!("../presets/trial06.toml")),
    ("trial07", include_str!("../presets/trial07.toml")),
    ("trial08", include_str!("../presets/trial08.toml")),
    ("trial09", include_str!("../presets/trial09.toml")),
    ("trial10", include_str!("../presets/trial10.toml")),
    ("trial11", include_str!("../presets/trial11.toml")),
    ("trial12", include_str!("../presets/trial12.toml")),
];

/// Names of all presets, in trial order.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// Raw TOML text of a preset.
pub fn preset_source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
        .ok_or_else(|| TmaError::UnknownPreset(name.to_string()))
}

/// Parsed and validated preset.
pub fn preset(name: &str) -> Result<Scenario> {
    parse_scenario(preset_source(name)?)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let s: Scenario = toml::from_str(text)?;
    s.validate()?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn scenario_to_toml(s: &Scenario) -> Result<String> {
    Ok(toml::to_string_pretty(s)?)
}
