//! Experiment configuration files.
//!
//! A config is a flat list of `key = value` lines with dotted keys, read
//! as TOML. Every key is optional; omitted keys take the defaults below,
//! which reproduce the reference heat experiment.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `c0` | `0.5` | Robin coefficient |
//! | `nx` | `11` | grid nodes (Δx = 1/(nx−1)) |
//! | `dt` | `1e-4` | time step |
//! | `horizon` | `3.0` | final time |
//! | `branch` | `1` | eigen branch of the sliding variable |
//! | `scheme` | `"explicit"` | `"explicit"` or `"implicit"` (backward Euler) |
//! | `robin` | `"corrected"` | `"corrected"` or `"centered"` ghost node |
//! | `snapshot_stride` | `100` | field snapshot every N steps, `0` = none |
//! | `law` | `"smc"` | `"smc"`, `"st"` or `"open"` |
//! | `sign` | `"implicit"` | SMC selection, `"implicit"` or `"explicit"` |
//! | `z0` | `[0, 0, 0, 10]` | polynomial coefficients, ascending powers |
//! | `z0.kind` | | `"table"` (with `z0.values`) or `"eigenfunction"` (with `z0.branch`, `z0.scale`) |
//! | `disturbance.kind` | `"sinusoid"` | `"zero"`, `"constant"`, `"sinusoid"`, `"table"` |
//! | `disturbance.amplitude` | `2.0` | amplitude, or the value of a constant |
//! | `disturbance.omega` | `1.0` | angular frequency |
//! | `disturbance.phase` | `0.0` | phase |
//! | `disturbance.step`, `disturbance.values` | | table sampling |
//! | `disturbance.kd`, `disturbance.c` | | certified bounds for tables |
//! | `gains.k` | `2.5` | SMC gain |
//! | `gains.alpha`, `gains.beta` | `2.2`, `2.5` | super-twisting gains |
//! | `gains.v0` | `0.0` | super-twisting integrator at t = 0 |
//! | `metrics.band`, `metrics.dwell` | `1e-3`, `0.05` | reaching detection |
//! | `metrics.decay_offset` | `0.2` | decay fit starts this long after reaching |
//! | `reduced.sigma0` | σ(0) of `z0` | reduced-model initial σ |
//! | `reduced.w0` | `B*φ d(0) + v0` | reduced super-twisting initial w |
//! | `reduced.dt` | `1e-5` | reduced-model step |
//! | `reduced.horizon` | `horizon` | reduced-model final time |
//! | `reduced.stride` | `1` | write every N-th reduced sample |

use std::path::Path;

use serde::Deserialize;

use crate::controllers::{ControlLaw, SignMode, SmcGains, StGains, StState};
use crate::error::{Error, Result};
use crate::heat_sim::{DisturbanceSpec, InitialProfile, RobinClosure, SimConfig, TimeScheme};

/// Control law selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Smc,
    St,
    Open,
}

impl LawKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LawKind::Smc => "smc",
            LawKind::St => "st",
            LawKind::Open => "open",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSettings {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub v0: f64,
    pub sign: SignMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSettings {
    pub band: f64,
    pub dwell: f64,
    pub decay_offset: f64,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self { band: 1e-3, dwell: 0.05, decay_offset: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSettings {
    pub sigma0: Option<f64>,
    pub w0: Option<f64>,
    pub dt: f64,
    pub horizon: Option<f64>,
    pub stride: usize,
}

/// Everything that determines one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sim: SimConfig<f64>,
    pub law: LawKind,
    pub gains: GainSettings,
    pub metrics: MetricSettings,
    pub reduced: ReducedSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::reference(),
            law: LawKind::Smc,
            gains: GainSettings { k: 2.5, alpha: 2.2, beta: 2.5, v0: 0.0, sign: SignMode::Implicit },
            metrics: MetricSettings::default(),
            reduced: ReducedSettings { sigma0: None, w0: None, dt: 1e-5, horizon: None, stride: 1 },
        }
    }
}

impl ExperimentConfig {
    pub fn smc_gains(&self) -> Result<SmcGains<f64>> {
        SmcGains::new(self.gains.k)
    }

    pub fn st_gains(&self) -> Result<StGains<f64>> {
        StGains::new(self.gains.alpha, self.gains.beta)
    }

    pub fn control_law(&self) -> Result<ControlLaw<f64>> {
        Ok(match self.law {
            LawKind::Open => ControlLaw::Open,
            LawKind::Smc => ControlLaw::Smc { gains: self.smc_gains()?, mode: self.gains.sign },
            LawKind::St => ControlLaw::SuperTwisting { gains: self.st_gains()?, initial: StState { v: self.gains.v0 } },
        })
    }

    pub fn with_law(&self, law: LawKind) -> Self {
        Self { law, ..self.clone() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        ConfigDocument::parse(text)?.to_config()
    }

    pub fn load(path: &Path) -> Result<Self> {
        ConfigDocument::load(path)?.to_config()
    }
}

/// Parsed but not yet interpreted config, so that overrides can be layered
/// on top before conversion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDocument {
    table: toml::Table,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let table = text.parse::<toml::Table>().map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self { table })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Sets a dotted key. `value` is read as a TOML value; anything that does
    /// not parse (e.g. `explicit`) is taken as a bare string.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parsed = format!("v = {value}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        let mut parts: Vec<&str> = key.split('.').collect();
        let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::Config(format!("empty key `{key}`")))?;
        let mut table = &mut self.table;
        for part in parts {
            let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            if !entry.is_table() {
                // e.g. `z0 = [..]` being replaced by `z0.kind = ..`
                *entry = toml::Value::Table(toml::Table::new());
            }
            table = entry.as_table_mut().expect("just made a table");
        }
        table.insert(leaf.to_string(), parsed);
        Ok(())
    }

    /// Applies `key=value` assignments.
    pub fn apply_overrides<'a>(&mut self, assignments: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for a in assignments {
            let (k, v) = a.split_once('=').ok_or_else(|| Error::Config(format!("override `{a}` is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let raw: RawConfig = toml::Value::Table(self.table.clone())
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        raw.into_config()
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    c0: f64,
    nx: usize,
    dt: f64,
    horizon: f64,
    branch: usize,
    scheme: String,
    robin: String,
    snapshot_stride: usize,
    law: LawKind,
    sign: String,
    z0: RawProfile,
    disturbance: RawDisturbance,
    gains: RawGains,
    metrics: RawMetrics,
    reduced: RawReduced,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            c0: 0.5,
            nx: 11,
            dt: 1e-4,
            horizon: 3.0,
            branch: 1,
            scheme: "explicit".into(),
            robin: "corrected".into(),
            snapshot_stride: 100,
            law: LawKind::Smc,
            sign: "implicit".into(),
            z0: RawProfile::Coefficients(vec![0.0, 0.0, 0.0, 10.0]),
            disturbance: RawDisturbance::default(),
            gains: RawGains::default(),
            metrics: RawMetrics::default(),
            reduced: RawReduced::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawProfile {
    Coefficients(Vec<f64>),
    Tagged(TaggedProfile),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum TaggedProfile {
    Polynomial {
        coefficients: Vec<f64>,
    },
    Table {
        values: Vec<f64>,
    },
    Eigenfunction {
        #[serde(default)]
        branch: usize,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawDisturbance {
    kind: String,
    amplitude: f64,
    omega: f64,
    phase: f64,
    step: Option<f64>,
    values: Option<Vec<f64>>,
    kd: Option<f64>,
    c: Option<f64>,
}

impl Default for RawDisturbance {
    fn default() -> Self {
        Self {
            kind: "sinusoid".into(),
            amplitude: 2.0,
            omega: 1.0,
            phase: 0.0,
            step: None,
            values: None,
            kd: None,
            c: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGains {
    k: f64,
    alpha: f64,
    beta: f64,
    v0: f64,
}

impl Default for RawGains {
    fn default() -> Self {
        Self { k: 2.5, alpha: 2.2, beta: 2.5, v0: 0.0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawMetrics {
    band: f64,
    dwell: f64,
    decay_offset: f64,
}

impl Default for RawMetrics {
    fn default() -> Self {
        let m = MetricSettings::default();
        Self { band: m.band, dwell: m.dwell, decay_offset: m.decay_offset }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawReduced {
    sigma0: Option<f64>,
    w0: Option<f64>,
    dt: f64,
    horizon: Option<f64>,
    stride: usize,
}

impl Default for RawReduced {
    fn default() -> Self {
        Self { sigma0: None, w0: None, dt: 1e-5, horizon: None, stride: 1 }
    }
}

impl RawConfig {
    fn into_config(self) -> Result<ExperimentConfig> {
        let scheme = match self.scheme.as_str() {
            "explicit" => TimeScheme::ExplicitEuler,
            "implicit" => TimeScheme::BackwardEuler,
            other => return Err(Error::Config(format!("scheme: unknown value `{other}`"))),
        };
        let robin = match self.robin.as_str() {
            "corrected" => RobinClosure::Corrected,
            "centered" => RobinClosure::Centered,
            other => return Err(Error::Config(format!("robin: unknown value `{other}`"))),
        };
        let sign = match self.sign.as_str() {
            "implicit" => SignMode::Implicit,
            "explicit" => SignMode::Explicit,
            other => return Err(Error::Config(format!("sign: unknown value `{other}`"))),
        };
        let initial = match self.z0 {
            RawProfile::Coefficients(c) | RawProfile::Tagged(TaggedProfile::Polynomial { coefficients: c }) => {
                InitialProfile::Polynomial(c)
            }
            RawProfile::Tagged(TaggedProfile::Table { values }) => InitialProfile::Table(values),
            RawProfile::Tagged(TaggedProfile::Eigenfunction { branch, scale }) => {
                InitialProfile::Eigenfunction { branch, scale }
            }
        };
        let d = self.disturbance;
        let disturbance = match d.kind.as_str() {
            "zero" => DisturbanceSpec::zero(),
            "constant" => DisturbanceSpec::constant(d.amplitude),
            "sinusoid" => DisturbanceSpec::sinusoid_with_phase(d.amplitude, d.omega, d.phase),
            "table" => {
                let values = d.values.ok_or_else(|| Error::Config("disturbance.values required for a table".into()))?;
                let step = d.step.ok_or_else(|| Error::Config("disturbance.step required for a table".into()))?;
                let kd = d.kd.ok_or_else(|| Error::Config("disturbance.kd required for a table".into()))?;
                DisturbanceSpec::table(step, values, kd, d.c)?
            }
            other => return Err(Error::Config(format!("disturbance.kind: unknown value `{other}`"))),
        };
        let sim = SimConfig {
            c0: self.c0,
            n_nodes: self.nx,
            dt: self.dt,
            horizon: self.horizon,
            initial,
            disturbance,
            branch: self.branch,
            scheme,
            robin,
            snapshot_stride: (self.snapshot_stride > 0).then_some(self.snapshot_stride),
        };
        sim.validate()?;
        let m = self.metrics;
        if !(m.band > 0.0 && m.dwell > 0.0 && m.decay_offset >= 0.0) {
            return Err(Error::Config("metrics.band and metrics.dwell must be positive".into()));
        }
        let r = self.reduced;
        if !(r.dt > 0.0) || r.stride == 0 {
            return Err(Error::Config("reduced.dt and reduced.stride must be positive".into()));
        }
        Ok(ExperimentConfig {
            sim,
            law: self.law,
            gains: GainSettings {
                k: self.gains.k,
                alpha: self.gains.alpha,
                beta: self.gains.beta,
                v0: self.gains.v0,
                sign,
            },
            metrics: MetricSettings { band: m.band, dwell: m.dwell, decay_offset: m.decay_offset },
            reduced: ReducedSettings { sigma0: r.sigma0, w0: r.w0, dt: r.dt, horizon: r.horizon, stride: r.stride },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat_sim::DisturbanceKind;

    #[test]
    fn empty_file_gives_reference_experiment() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn dotted_keys_and_types() {
        let text = r#"
c0 = 0.7
nx = 21
dt = 5e-5
horizon = 1.5
law = "st"
sign = "explicit"
z0.kind = "eigenfunction"
z0.branch = 0
disturbance.kind = "constant"
disturbance.amplitude = -1.0
gains.alpha = 3.0
gains.v0 = 0.25
metrics.band = 2e-3
"#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.sim.c0, 0.7);
        assert_eq!(c.sim.n_nodes, 21);
        assert_eq!(c.law, LawKind::St);
        assert_eq!(c.gains.sign, SignMode::Explicit);
        assert_eq!(c.sim.initial, InitialProfile::Eigenfunction { branch: 0, scale: 1.0 });
        assert_eq!(c.sim.disturbance.kind(), &DisturbanceKind::Constant { value: -1.0 });
        assert_eq!(c.gains.alpha, 3.0);
        assert_eq!(c.gains.v0, 0.25);
        assert_eq!(c.metrics.band, 2e-3);
        assert!(matches!(c.control_law().unwrap(), ControlLaw::SuperTwisting { .. }));
    }

    #[test]
    fn overrides_layer_on_top() {
        let mut doc = ConfigDocument::parse("z0 = [1.0]\ngains.k = 3.0").unwrap();
        doc.apply_overrides(["gains.k=2.0", "sign = explicit", "z0.kind=table", "nx=3"]).unwrap();
        doc.set("z0.values", "[1, 2, 3]").unwrap();
        let c = doc.to_config().unwrap();
        assert_eq!(c.gains.k, 2.0);
        assert_eq!(c.gains.sign, SignMode::Explicit);
        assert_eq!(c.sim.initial, InitialProfile::Table(vec![1.0, 2.0, 3.0]));
    }

    #[test]
    fn typos_and_bad_values_are_errors() {
        assert!(ExperimentConfig::from_toml_str("gains.kk = 1.0").is_err());
        assert!(ExperimentConfig::from_toml_str("scheme = \"rk4\"").is_err());
        assert!(ExperimentConfig::from_toml_str("dt = 0.01").is_err());
        assert!(ExperimentConfig::from_toml_str("disturbance.kind = \"table\"").is_err());
        assert!(ConfigDocument::default().apply_overrides(["novalue"]).is_err());
    }

    #[test]
    fn table_disturbance_from_file() {
        let c = ExperimentConfig::from_toml_str(
            "disturbance.kind = \"table\"\ndisturbance.step = 0.5\ndisturbance.values = [0.0, 1.0]\ndisturbance.kd = 1.0\ndisturbance.c = 2.0",
        )
        .unwrap();
        assert_eq!(c.sim.disturbance.c(), Some(2.0));
        assert_eq!(c.sim.disturbance.value(0.25), 0.5);
    }
}
