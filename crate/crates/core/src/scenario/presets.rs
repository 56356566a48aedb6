//! Scenario presets for every figure of the study, shipped with the crate.

use crate::error::{Error, Result};

use super::config::Scenario;

/// `(name, TOML text)` of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1", include_str!("../../presets/fig1.toml")),
    ("fig2-T12000", include_str!("../../presets/fig2-T12000.toml")),
    ("fig2-T4000", include_str!("../../presets/fig2-T4000.toml")),
    ("fig3a", include_str!("../../presets/fig3a.toml")),
    ("fig3b", include_str!("../../presets/fig3b.toml")),
    ("fig3c", include_str!("../../presets/fig3c.toml")),
    ("fig3d", include_str!("../../presets/fig3d.toml")),
    ("fig3e", include_str!("../../presets/fig3e.toml")),
    ("fig3f", include_str!("../../presets/fig3f.toml")),
    ("fig4a", include_str!("../../presets/fig4a.toml")),
    ("fig4b", include_str!("../../presets/fig4b.toml")),
    ("fig4c", include_str!("../../presets/fig4c.toml")),
    ("fig4d", include_str!("../../presets/fig4d.toml")),
    ("fig4e", include_str!("../../presets/fig4e.toml")),
    ("fig4f", include_str!("../../presets/fig4f.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("fig7", include_str!("../../presets/fig7.toml")),
    ("fig8", include_str!("../../presets/fig8.toml")),
    ("fig9", include_str!("../../presets/fig9.toml")),
];

/// Parses preset `name` with overrides applied.
pub fn preset(name: &str, overrides: &[String]) -> Result<Scenario> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
    Scenario::from_toml(text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for (name, _) in PRESETS {
            let s = preset(name, &[]).unwrap();
            assert_eq!(s.name.as_deref(), Some(*name));
            let mode = s.resolve_mode(None).unwrap();
            s.validate(mode).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
