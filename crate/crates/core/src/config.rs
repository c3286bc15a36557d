//! Plain-text model files.
//!
//! The format is line oriented: `[section]` headers, `key = value` pairs,
//! and `#` comments (whole-line or trailing). Keys are unique within a
//! section. A model file holds exactly one of `[channels]` or `[potential]`.
//!
//! ```text
//! [channels]
//! model = landau_zener
//! delta = 0.1
//! alpha = 0.4
//! width = 0.5
//! r_x = 1.5
//! mass = 10
//! z1z2 = 0
//! l = 0
//! energy = 1
//! hbar = 1
//! r_max = 15.5
//! ```
//!
//! Potentials use `kind = harmonic | cubic | power_wall` with `omega`, `g`
//! or `half_width`/`depth`/`exponent` respectively.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::channels::{ChannelModel, ChannelSystem};
use crate::wkb::{PotentialKind, PotentialModel};

/// The bundled avoided-crossing model file.
pub const LANDAU_ZENER_MODEL: &str = include_str!("../models/landau_zener.conf");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = ConfigError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// Column of the first character of the value (1-based).
    pub value_column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn require(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| {
            ConfigError::Validation(format!("missing key `{key}` in [{}]", self.name))
        })
    }

    fn number(&self, key: &str) -> Result<f64> {
        let e = self.require(key)?;
        e.value.parse::<f64>().map_err(|_| ConfigError::Parse {
            line: e.line,
            column: e.value_column,
            message: format!("`{key}` expects a number, found `{}`", e.value),
        })
    }

    fn integer(&self, key: &str) -> Result<u32> {
        let e = self.require(key)?;
        e.value.parse::<u32>().map_err(|_| ConfigError::Parse {
            line: e.line,
            column: e.value_column,
            message: format!("`{key}` expects a non-negative integer, found `{}`", e.value),
        })
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(ConfigError::Parse {
                    line: e.line,
                    column: 1,
                    message: format!("unknown key `{}` in [{}]", e.key, self.name),
                });
            }
        }
        Ok(())
    }
}

/// A parsed but not yet interpreted document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| ConfigError::Parse {
            line,
            column,
            message,
        };
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(err(indent + trimmed.len(), "expected `]` to close the section header".into()));
            };
            let name = name.trim();
            if !is_identifier(name) {
                return Err(err(indent + 2, format!("invalid section name `{name}`")));
            }
            if doc.section(name).is_some() {
                return Err(err(indent + 2, format!("duplicate section [{name}]")));
            }
            doc.sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return Err(err(indent + 1, "expected `key = value` or `[section]`".into()));
        };
        let key = trimmed[..eq].trim();
        if !is_identifier(key) {
            return Err(err(indent + 1, format!("invalid key `{key}`")));
        }
        let after = &trimmed[eq + 1..];
        let value = after.trim();
        if value.is_empty() {
            return Err(err(indent + eq + 2, format!("missing value for `{key}`")));
        }
        let value_column = indent + eq + 2 + (after.len() - after.trim_start().len());
        let Some(section) = doc.sections.last_mut() else {
            return Err(err(indent + 1, "key outside of any section".into()));
        };
        if section.get(key).is_some() {
            return Err(err(indent + 1, format!("duplicate key `{key}` in [{}]", section.name)));
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
            value_column,
        });
    }
    Ok(doc)
}

/// A model read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModel {
    Channels(ChannelSystem),
    Potential(PotentialModel),
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<LoadedModel> {
    let doc = parse_document(text)?;
    match (doc.section("channels"), doc.section("potential")) {
        (Some(s), None) => {
            if let Some(extra) = doc.sections.iter().find(|x| x.name != "channels") {
                return Err(unexpected_section(extra));
            }
            channels_from(s).map(LoadedModel::Channels)
        }
        (None, Some(s)) => {
            if let Some(extra) = doc.sections.iter().find(|x| x.name != "potential") {
                return Err(unexpected_section(extra));
            }
            potential_from(s).map(LoadedModel::Potential)
        }
        (Some(_), Some(s)) => Err(ConfigError::Parse {
            line: s.line,
            column: 1,
            message: "a model file holds either [channels] or [potential], not both".into(),
        }),
        (None, None) => Err(ConfigError::Validation(
            "no [channels] or [potential] section found".into(),
        )),
    }
}

fn unexpected_section(s: &Section) -> ConfigError {
    ConfigError::Parse {
        line: s.line,
        column: 1,
        message: format!("unexpected section [{}]", s.name),
    }
}

const SYSTEM_KEYS: [&str; 7] = ["model", "mass", "z1z2", "l", "energy", "hbar", "r_max"];

fn channels_from(s: &Section) -> Result<ChannelSystem> {
    let kind = s.require("model")?;
    let (model, extra): (ChannelModel, &[&str]) = match kind.value.as_str() {
        "landau_zener" => (
            ChannelModel::LandauZener {
                delta: s.number("delta")?,
                alpha: s.number("alpha")?,
                width: s.number("width")?,
                r_x: s.number("r_x")?,
            },
            &["delta", "alpha", "width", "r_x"],
        ),
        "rabi" => (
            ChannelModel::Rabi {
                gap: s.number("gap")?,
                strength: s.number("strength")?,
                r_c: s.number("r_c")?,
                width: s.number("width")?,
            },
            &["gap", "strength", "r_c", "width"],
        ),
        other => {
            return Err(ConfigError::Parse {
                line: kind.line,
                column: kind.value_column,
                message: format!("unknown channel model `{other}` (expected landau_zener or rabi)"),
            })
        }
    };
    let allowed: Vec<&str> = SYSTEM_KEYS.iter().chain(extra).copied().collect();
    s.only(&allowed)?;
    let hbar = match s.get("hbar") {
        Some(_) => s.number("hbar")?,
        None => 1.0,
    };
    let z1z2 = match s.get("z1z2") {
        Some(_) => s.number("z1z2")?,
        None => 0.0,
    };
    let l = match s.get("l") {
        Some(_) => s.integer("l")?,
        None => 0,
    };
    ChannelSystem::new(
        model,
        s.number("mass")?,
        z1z2,
        l,
        s.number("energy")?,
        hbar,
        s.number("r_max")?,
    )
    .map_err(|e| ConfigError::Validation(e.to_string()))
}

fn potential_from(s: &Section) -> Result<PotentialModel> {
    let kind = s.require("kind")?;
    let built = match kind.value.as_str() {
        "harmonic" => {
            s.only(&["kind", "omega"])?;
            PotentialModel::harmonic(s.number("omega")?)
        }
        "cubic" => {
            s.only(&["kind", "g"])?;
            PotentialModel::cubic(s.number("g")?)
        }
        "power_wall" => {
            s.only(&["kind", "half_width", "depth", "exponent"])?;
            PotentialModel::power_wall(s.number("half_width")?, s.number("depth")?, s.integer("exponent")?)
        }
        other => {
            return Err(ConfigError::Parse {
                line: kind.line,
                column: kind.value_column,
                message: format!("unknown potential kind `{other}` (expected harmonic, cubic or power_wall)"),
            })
        }
    };
    built.map_err(|e| ConfigError::Validation(e.to_string()))
}

/// Writes a model back in the file format. Closure-based models have no
/// textual form.
pub fn serialize_model(model: &LoadedModel) -> Result<String> {
    let mut out = String::new();
    match model {
        LoadedModel::Channels(sys) => {
            out.push_str("[channels]\n");
            match &sys.model {
                ChannelModel::LandauZener {
                    delta,
                    alpha,
                    width,
                    r_x,
                } => {
                    let _ = write!(
                        out,
                        "model = landau_zener\ndelta = {delta:?}\nalpha = {alpha:?}\nwidth = {width:?}\nr_x = {r_x:?}\n"
                    );
                }
                ChannelModel::Rabi {
                    gap,
                    strength,
                    r_c,
                    width,
                } => {
                    let _ = write!(
                        out,
                        "model = rabi\ngap = {gap:?}\nstrength = {strength:?}\nr_c = {r_c:?}\nwidth = {width:?}\n"
                    );
                }
                ChannelModel::Custom(_) => {
                    return Err(ConfigError::Validation("custom channel models cannot be serialized".into()))
                }
            }
            let _ = write!(
                out,
                "mass = {:?}\nz1z2 = {:?}\nl = {}\nenergy = {:?}\nhbar = {:?}\nr_max = {:?}\n",
                sys.mass, sys.z1z2, sys.l, sys.energy, sys.hbar, sys.r_max
            );
        }
        LoadedModel::Potential(v) => {
            out.push_str("[potential]\n");
            match &v.kind {
                PotentialKind::Harmonic { omega } => {
                    let _ = write!(out, "kind = harmonic\nomega = {omega:?}\n");
                }
                PotentialKind::Cubic { g } => {
                    let _ = write!(out, "kind = cubic\ng = {g:?}\n");
                }
                PotentialKind::PowerWall {
                    half_width,
                    depth,
                    exponent,
                } => {
                    let _ = write!(
                        out,
                        "kind = power_wall\nhalf_width = {half_width:?}\ndepth = {depth:?}\nexponent = {exponent}\n"
                    );
                }
                PotentialKind::Custom(_) => {
                    return Err(ConfigError::Validation("custom potentials cannot be serialized".into()))
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_model_loads() {
        let LoadedModel::Channels(sys) = parse_model(LANDAU_ZENER_MODEL).unwrap() else {
            panic!("expected a channel model");
        };
        assert_eq!(sys, ChannelSystem::landau_zener(1.0).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_document("[a]\nx = 1\n  y 2\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 3,
                column: 3,
                message: "expected `key = value` or `[section]`".into()
            }
        );
        let err = parse_model("[potential]\nkind = cubic\ng =   abc\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, column: 7, .. }), "{err:?}");
        let err = parse_document("x = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, column: 1, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let doc = parse_document("# header\n\n[s] # trailing\nk = v # note\n").unwrap();
        assert_eq!(doc.sections[0].entries[0].value, "v");
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(parse_document("[s]\nk = 1\nk = 2\n").is_err());
        assert!(parse_document("[s]\n[s]\n").is_err());
    }
}
