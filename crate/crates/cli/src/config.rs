//! Scenario configuration files.
//!
//! A config is a TOML document with `radio`, `coding`, `classes`,
//! `admission`, `policies` and `scenario` sections. Unknown keys are
//! rejected. Parse errors carry the line and column; validation errors carry
//! the dotted path of the offending field.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Deserialize;

use wcdma_cac::cac::{AdmissionPolicy, PolicyKind};
use wcdma_cac::coding::{
    required_ebn0, BerModel, CodingScheme, CurveTable, EbN0Target, SchemeKind,
};
use wcdma_cac::load::{BoundaryRule, Direction, LoadFactor, RadioParams, ServiceClass};
use wcdma_cac::sim::{ArrivalOrder, Scenario};

/// The configuration shipped with the tool.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl fmt::Display) -> ConfigError {
    ConfigError::Field {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Tabulated voice activity factor 0.58.
    Table1,
    /// Voice activity factor 0.67, matching the published load curves.
    #[default]
    PaperFigures,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::PaperFigures => "paper-figures",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table1" => Ok(Preset::Table1),
            "paper-figures" => Ok(Preset::PaperFigures),
            _ => Err(format!(
                "unknown preset `{s}` (expected `table1` or `paper-figures`)"
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: Option<Preset>,
    pub radio: RadioConfig,
    #[serde(default)]
    pub coding: IndexMap<String, CodingConfig>,
    pub classes: Vec<ClassConfig>,
    pub admission: AdmissionConfig,
    #[serde(default)]
    pub policies: Vec<PolicyConfig>,
    pub scenario: Option<ScenarioSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    pub chip_rate_w: f64,
    pub interference_i: f64,
    pub orthogonality_alpha: f64,
    /// Interference ratio for the uplink formula, if it differs.
    pub interference_ul: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CodingConfig {
    AnalyticBpsk,
    CurveTable { points: Vec<(f64, f64)> },
}

/// A number, or one number per preset.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PresetValue {
    Fixed(f64),
    PerPreset(IndexMap<String, f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub name: String,
    pub bit_rate_r: f64,
    pub activity_v: PresetValue,
    pub ber_target: f64,
    /// Eb/N0 per scheme; schemes not listed are resolved from `ber_target`.
    #[serde(default)]
    pub ebn0_db: IndexMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RuleConfig {
    #[default]
    StrictNewLoad,
    AdmitIfOldBelow,
}

impl From<RuleConfig> for BoundaryRule {
    fn from(r: RuleConfig) -> Self {
        match r {
            RuleConfig::StrictNewLoad => BoundaryRule::StrictNewLoad,
            RuleConfig::AdmitIfOldBelow => BoundaryRule::AdmitIfOldBelow,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionConfig {
    #[default]
    Downlink,
    Uplink,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissionConfig {
    pub total_threshold: f64,
    #[serde(default)]
    pub boundary_rule: RuleConfig,
    #[serde(default)]
    pub direction: DirectionConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKindConfig {
    SingleThreshold,
    Partitioned,
    UtilityShared,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub name: Option<String>,
    pub kind: PolicyKindConfig,
    #[serde(default)]
    pub partitions: IndexMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrderConfig {
    #[default]
    Interleaved,
    Shuffled,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub scheme: String,
    pub offered_users: usize,
    pub mix: IndexMap<String, f64>,
    #[serde(default)]
    pub arrival_order: OrderConfig,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("shipped config parses")
    }

    /// Validates everything and fixes the preset. `preset` overrides the
    /// file's own `preset` key.
    pub fn resolve(&self, preset: Option<Preset>) -> Result<Resolved, ConfigError> {
        let preset = preset.or(self.preset).unwrap_or_default();
        let radio = self.resolve_radio()?;
        let schemes = self.resolve_coding()?;
        let mut classes = Vec::with_capacity(self.classes.len());
        for (i, c) in self.classes.iter().enumerate() {
            let path = format!("classes[{i}]");
            if classes.iter().any(|o: &ClassDef| o.name == c.name) {
                return Err(field(
                    format!("{path}.name"),
                    format!("duplicate class `{}`", c.name),
                ));
            }
            classes.push(ClassDef::resolve(c, preset, &path)?);
        }
        let a = &self.admission;
        let threshold = LoadFactor::new(a.total_threshold)
            .ok()
            .filter(|t| t.value() > 0.0 && t.value() <= 1.0)
            .ok_or_else(|| field("admission.total_threshold", "must be in (0, 1]"))?;
        let direction = match a.direction {
            DirectionConfig::Downlink => Direction::Downlink,
            DirectionConfig::Uplink => Direction::Uplink,
        };
        let mut policies = Vec::with_capacity(self.policies.len());
        for (i, p) in self.policies.iter().enumerate() {
            let kind = match p.kind {
                PolicyKindConfig::SingleThreshold => PolicyKind::SingleThreshold,
                PolicyKindConfig::Partitioned => PolicyKind::Partitioned,
                PolicyKindConfig::UtilityShared => PolicyKind::UtilityShared,
            };
            let path = format!("policies[{i}]");
            for name in p.partitions.keys() {
                if !classes.iter().any(|c| &c.name == name) {
                    return Err(field(format!("{path}.partitions.{name}"), "no such class"));
                }
            }
            let policy = AdmissionPolicy::new(
                kind,
                threshold.value(),
                p.partitions.iter().map(|(k, v)| (k.as_str(), *v)),
            )
            .map_err(|e| field(&path, e))?
            .with_direction(direction);
            let name = p.name.clone().unwrap_or_else(|| kind.as_str().to_string());
            if policies.iter().any(|(n, _): &(String, _)| *n == name) {
                return Err(field(
                    format!("{path}.name"),
                    format!("duplicate policy `{name}`"),
                ));
            }
            policies.push((name, policy));
        }
        let scenario = match &self.scenario {
            None => None,
            Some(s) => Some(self.resolve_scenario(s, &schemes, &classes)?),
        };
        Ok(Resolved {
            preset,
            radio,
            schemes,
            classes,
            threshold,
            rule: a.boundary_rule.into(),
            direction,
            policies,
            scenario,
        })
    }

    fn resolve_radio(&self) -> Result<RadioParams, ConfigError> {
        let r = &self.radio;
        let radio = RadioParams::new(r.chip_rate_w, r.interference_i, r.orthogonality_alpha)
            .map_err(|e| field("radio", e))?;
        match r.interference_ul {
            Some(i) => radio
                .with_uplink_interference(i)
                .map_err(|e| field("radio.interference_ul", e)),
            None => Ok(radio),
        }
    }

    fn resolve_coding(&self) -> Result<Vec<CodingScheme>, ConfigError> {
        if self.coding.is_empty() {
            return Ok(CodingScheme::defaults().into());
        }
        let mut out = Vec::with_capacity(self.coding.len());
        for (key, c) in &self.coding {
            let path = format!("coding.{key}");
            let kind = parse_scheme(key, &path)?;
            let model = match c {
                CodingConfig::AnalyticBpsk => BerModel::AnalyticBpsk,
                CodingConfig::CurveTable { points } => BerModel::CurveTable(
                    CurveTable::from_pairs(points)
                        .map_err(|e| field(format!("{path}.points"), e))?,
                ),
            };
            out.push(CodingScheme::new(kind, model).map_err(|e| field(&path, e))?);
        }
        Ok(out)
    }

    fn resolve_scenario(
        &self,
        s: &ScenarioSection,
        schemes: &[CodingScheme],
        classes: &[ClassDef],
    ) -> Result<ScenarioDef, ConfigError> {
        let scheme = parse_scheme(&s.scheme, "scenario.scheme")?;
        if !schemes.iter().any(|c| c.kind() == scheme) {
            return Err(field(
                "scenario.scheme",
                format!("scheme `{scheme}` is not configured"),
            ));
        }
        for name in s.mix.keys() {
            if !classes.iter().any(|c| &c.name == name) {
                return Err(field(format!("scenario.mix.{name}"), "no such class"));
            }
        }
        let sum: f64 = s.mix.values().sum();
        if s.mix.values().any(|f| !(0.0..=1.0).contains(f)) || (sum - 1.0).abs() > 1e-9 {
            return Err(field(
                "scenario.mix",
                format!("fractions must lie in [0, 1] and sum to 1 (sum is {sum})"),
            ));
        }
        let arrival_order = match (s.arrival_order, s.seed) {
            (OrderConfig::Interleaved, None) => ArrivalOrder::Interleaved,
            (OrderConfig::Shuffled, Some(seed)) => ArrivalOrder::Shuffled(seed),
            (OrderConfig::Shuffled, None) => {
                return Err(field(
                    "scenario.seed",
                    "required when arrival_order = \"shuffled\"",
                ))
            }
            (OrderConfig::Interleaved, Some(_)) => {
                return Err(field(
                    "scenario.seed",
                    "only valid when arrival_order = \"shuffled\"",
                ))
            }
        };
        Ok(ScenarioDef {
            scheme,
            offered_users: s.offered_users,
            mix: s.mix.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            arrival_order,
        })
    }
}

fn parse_scheme(s: &str, path: &str) -> Result<SchemeKind, ConfigError> {
    SchemeKind::parse(s).ok_or_else(|| {
        field(
            path,
            format!("unknown scheme `{s}` (expected uncoded, block or convolutional)"),
        )
    })
}

/// A service class before its Eb/N0 is fixed by a coding scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDef {
    pub name: String,
    pub bit_rate_r: f64,
    pub activity_v: f64,
    pub ber_target: f64,
    pub ebn0_db: Vec<(SchemeKind, EbN0Target)>,
    path: String,
}

impl ClassDef {
    fn resolve(c: &ClassConfig, preset: Preset, path: &str) -> Result<Self, ConfigError> {
        let activity_v = match &c.activity_v {
            PresetValue::Fixed(v) => *v,
            PresetValue::PerPreset(map) => {
                for k in map.keys() {
                    k.parse::<Preset>()
                        .map_err(|e| field(format!("{path}.activity_v.{k}"), e))?;
                }
                *map.get(preset.as_str()).ok_or_else(|| {
                    field(
                        format!("{path}.activity_v"),
                        format!("no value for preset `{}`", preset.as_str()),
                    )
                })?
            }
        };
        let mut ebn0_db = Vec::with_capacity(c.ebn0_db.len());
        for (k, db) in &c.ebn0_db {
            let p = format!("{path}.ebn0_db.{k}");
            let kind = parse_scheme(k, &p)?;
            ebn0_db.push((kind, EbN0Target::new(*db).map_err(|e| field(&p, e))?));
        }
        let def = Self {
            name: c.name.clone(),
            bit_rate_r: c.bit_rate_r,
            activity_v,
            ber_target: c.ber_target,
            ebn0_db,
            path: path.to_string(),
        };
        // validate the scalar fields once, with a placeholder operating point
        def.build(EbN0Target::new(0.0).expect("in range"))?;
        Ok(def)
    }

    fn build(&self, ebn0: EbN0Target) -> Result<ServiceClass, ConfigError> {
        ServiceClass::new(
            self.name.clone(),
            self.bit_rate_r,
            self.activity_v,
            self.ber_target,
            ebn0,
        )
        .map_err(|e| field(&self.path, e))
    }

    /// The class operated at `scheme`: the configured Eb/N0 for that scheme
    /// if given, otherwise the minimum meeting the class BER target.
    pub fn service(&self, scheme: &CodingScheme) -> Result<ServiceClass, ConfigError> {
        let ebn0 = match self.ebn0_db.iter().find(|(k, _)| *k == scheme.kind()) {
            Some((_, t)) => *t,
            None => required_ebn0(scheme, self.ber_target).map_err(|e| {
                field(
                    format!("{}.ber_target", self.path),
                    format!("{} scheme: {e}", scheme.kind()),
                )
            })?,
        };
        self.build(ebn0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDef {
    pub scheme: SchemeKind,
    pub offered_users: usize,
    pub mix: Vec<(String, f64)>,
    pub arrival_order: ArrivalOrder,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub preset: Preset,
    pub radio: RadioParams,
    pub schemes: Vec<CodingScheme>,
    pub classes: Vec<ClassDef>,
    pub threshold: LoadFactor,
    pub rule: BoundaryRule,
    pub direction: Direction,
    pub policies: Vec<(String, AdmissionPolicy)>,
    pub scenario: Option<ScenarioDef>,
}

impl Resolved {
    pub fn scheme(&self, kind: SchemeKind) -> Result<&CodingScheme, ConfigError> {
        self.schemes
            .iter()
            .find(|s| s.kind() == kind)
            .ok_or_else(|| field("coding", format!("scheme `{kind}` is not configured")))
    }

    pub fn class(&self, name: &str) -> Result<&ClassDef, ConfigError> {
        self.classes
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| field("classes", format!("no class named `{name}`")))
    }

    /// The configured scenario with the first policy, ready to run. The
    /// classes in the mix take their Eb/N0 from the scenario's scheme.
    pub fn scenario(&self, scheme: Option<SchemeKind>) -> Result<Scenario, ConfigError> {
        let def = self
            .scenario
            .as_ref()
            .ok_or_else(|| field("scenario", "section is missing"))?;
        let (_, policy) = self
            .policies
            .first()
            .ok_or_else(|| field("policies", "at least one policy is required"))?;
        let coding = self.scheme(scheme.unwrap_or(def.scheme))?;
        let classes = def
            .mix
            .iter()
            .map(|(name, _)| self.class(name)?.service(coding))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scenario {
            radio: self.radio,
            classes,
            policy: policy.clone(),
            boundary_rule: self.rule,
            mix: def.mix.clone(),
            offered_users: def.offered_users,
            arrival_order: def.arrival_order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(replace: &str, by: &str) -> String {
        assert!(DEFAULT_CONFIG.contains(replace), "{replace}");
        DEFAULT_CONFIG.replacen(replace, by, 1)
    }

    fn resolve_err(text: &str) -> String {
        let cfg = match ScenarioConfig::parse(text) {
            Ok(c) => c,
            Err(e) => return e.to_string(),
        };
        cfg.resolve(None).unwrap_err().to_string()
    }

    #[test]
    fn builtin_resolves_with_table_values() {
        let r = ScenarioConfig::builtin().resolve(None).unwrap();
        assert_eq!(r.preset, Preset::PaperFigures);
        assert_eq!(r.radio.chip_rate_w(), 3.84e6);
        assert_eq!(r.radio.interference_i(), 0.55);
        assert_eq!(r.radio.orthogonality_alpha(), 0.9);
        let voice = r.class("voice").unwrap();
        assert_eq!(voice.activity_v, 0.67);
        assert_eq!(voice.bit_rate_r, 12200.0);
        let video = r.class("video").unwrap();
        assert_eq!(video.bit_rate_r, 64000.0);
        assert_eq!(video.activity_v, 1.0);
        assert_eq!(r.threshold.value(), 0.7);
        let kinds: Vec<_> = r.schemes.iter().map(|s| s.kind()).collect();
        assert_eq!(kinds, SchemeKind::ALL);
        let conv = r.scheme(SchemeKind::Convolutional).unwrap();
        assert_eq!(video.service(conv).unwrap().ebn0().value_db(), 6.5);
        assert_eq!(r.policies.len(), 2);
        let s = r.scenario(None).unwrap();
        assert_eq!(s.offered_users, 50);
        assert_eq!(s.mix[0], ("voice".to_string(), 0.8));
    }

    #[test]
    fn preset_selects_activity() {
        let cfg = ScenarioConfig::builtin();
        let t1 = cfg.resolve(Some(Preset::Table1)).unwrap();
        assert_eq!(t1.class("voice").unwrap().activity_v, 0.58);
        let text = with("preset = \"paper-figures\"", "preset = \"table1\"");
        let r = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(
            r.resolve(None).unwrap().class("voice").unwrap().activity_v,
            0.58
        );
        assert_eq!(
            r.resolve(Some(Preset::PaperFigures))
                .unwrap()
                .class("voice")
                .unwrap()
                .activity_v,
            0.67
        );
    }

    #[test]
    fn missing_ebn0_resolves_from_ber_target() {
        let text = with(
            "ebn0_db = { uncoded = 6.7, block = 5.7, convolutional = 5.0 }\n",
            "",
        );
        let r = ScenarioConfig::parse(&text).unwrap().resolve(None).unwrap();
        let voice = r.class("voice").unwrap();
        let unc = voice
            .service(r.scheme(SchemeKind::Uncoded).unwrap())
            .unwrap();
        assert!((unc.ebn0().value_db() - 6.79).abs() < 0.05);
        let block = voice.service(r.scheme(SchemeKind::Block).unwrap()).unwrap();
        assert_eq!(block.ebn0().value_db(), 5.7);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let e = resolve_err(&with(
            "chip_rate_w = 3.84e6",
            "chip_rate_w = 3.84e6\nchip_rate = 1",
        ));
        assert!(e.contains("chip_rate"), "{e}");
        assert!(e.contains("line"), "{e}");
        let e = resolve_err(&format!("{DEFAULT_CONFIG}\nextra = 1\n"));
        assert!(e.contains("extra"), "{e}");
    }

    #[test]
    fn field_addressed_errors() {
        let e = resolve_err(&with("activity_v = 1.0", "activity_v = 1.5"));
        assert!(e.starts_with("classes[1]"), "{e}");
        let e = resolve_err(&with(
            "mix = { voice = 0.8, video = 0.2 }",
            "mix = { voice = 0.8, video = 0.3 }",
        ));
        assert!(e.starts_with("scenario.mix"), "{e}");
        let e = resolve_err(&with(
            "points = [[5.7, 1e-3], [8.4, 1e-5]]",
            "points = [[5.7, 1e-5], [8.4, 1e-3]]",
        ));
        assert!(e.starts_with("coding.block.points"), "{e}");
        let e = resolve_err(&with("[coding.block]", "[coding.turbo]"));
        assert!(e.starts_with("coding.turbo"), "{e}");
        let e = resolve_err(&with(
            "partitions = { voice = 0.56, video = 0.14 }",
            "partitions = { voice = 0.6, video = 0.14 }",
        ));
        assert!(e.starts_with("policies[0]"), "{e}");
        let e = resolve_err(&with(
            "partitions = { voice = 0.56, video = 0.14 }",
            "partitions = { voice = 0.56, data = 0.14 }",
        ));
        assert!(e.starts_with("policies[0].partitions.data"), "{e}");
        let e = resolve_err(&with(
            "arrival_order = \"interleaved\"",
            "arrival_order = \"shuffled\"",
        ));
        assert!(e.starts_with("scenario.seed"), "{e}");
        let e = resolve_err(&with("total_threshold = 0.7", "total_threshold = 1.7"));
        assert!(e.starts_with("admission.total_threshold"), "{e}");
        let e = resolve_err(&with("table1 = 0.58, ", "tabel1 = 0.58, "));
        assert!(e.starts_with("classes[0].activity_v.tabel1"), "{e}");
    }

    #[test]
    fn minimal_config_uses_default_schemes() {
        let text = r#"
[radio]
chip_rate_w = 3.84e6
interference_i = 0.55
orthogonality_alpha = 0.9

[[classes]]
name = "video"
bit_rate_r = 64000
activity_v = 1.0
ber_target = 1e-5

[admission]
total_threshold = 0.7
"#;
        let r = ScenarioConfig::parse(text).unwrap().resolve(None).unwrap();
        assert_eq!(r.schemes.len(), 3);
        assert!(r.scenario(None).is_err());
        let video = r.class("video").unwrap();
        let block = video.service(r.scheme(SchemeKind::Block).unwrap()).unwrap();
        assert_eq!(block.ebn0().value_db(), 8.4);
    }
}
