//! Built-in scenarios, selectable with `--preset <name>`.

use crate::error::{CliError, CliResult};

pub const PRESETS: &[(&str, &str)] = &[
    ("roc-nb1", include_str!("../presets/roc-nb1.json")),
    ("roc", include_str!("../presets/roc.json")),
    (
        "roc-time-bandwidth",
        include_str!("../presets/roc-time-bandwidth.json"),
    ),
    ("sense-plan", include_str!("../presets/sense-plan.json")),
    (
        "sense-plan-targets",
        include_str!("../presets/sense-plan-targets.json"),
    ),
    (
        "simulate-genie",
        include_str!("../presets/simulate-genie.json"),
    ),
    (
        "simulate-sleep",
        include_str!("../presets/simulate-sleep.json"),
    ),
    (
        "simulate-myopic",
        include_str!("../presets/simulate-myopic.json"),
    ),
    ("simulate-dp", include_str!("../presets/simulate-dp.json")),
    ("sweep", include_str!("../presets/sweep.json")),
    ("train", include_str!("../presets/train.json")),
];

pub fn get(name: &str) -> CliResult<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!(
                "unknown preset `{name}`; available: {}",
                names.join(", ")
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;

    #[test]
    fn every_preset_loads() {
        for (name, text) in PRESETS {
            ScenarioConfig::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_preset_lists_names() {
        let err = get("nope").unwrap_err().to_string();
        assert!(err.contains("roc-nb1"));
    }
}
