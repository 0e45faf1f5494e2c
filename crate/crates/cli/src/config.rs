//! Run configuration. One TOML file drives every command; the seed can be
//! overridden on the command line, and the override is what gets echoed in
//! the report, since it is what actually seeded the run.

use cyclink_core::family::{CyclicFamilySpec, SpecViolation};
use cyclink_core::Tolerances;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed for every derived random stream. Mandatory: a report
    /// without its seed cannot be reproduced.
    pub seed: u64,
    /// Default output path. `--out` takes precedence but is not echoed, so
    /// the report does not depend on where it is written.
    pub out: Option<String>,
    pub spec: SpecConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    /// Accept exponents that violate the family assumptions (some b_j >= 1,
    /// some a_k >= 2). Structural problems still reject.
    #[serde(default)]
    pub relaxed: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Family parameters, each in [0, 1].
    pub t: Vec<f64>,
    /// Sphere radii, positive.
    pub r: Vec<f64>,
    /// Fiber levels for the eta0 probe, positive.
    pub eta: Vec<f64>,
    /// Curve parameters for trace, each > -1.
    pub s: Vec<f64>,
    pub samples_per_cell: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t: Vec::new(),
            r: Vec::new(),
            eta: Vec::new(),
            s: Vec::new(),
            samples_per_cell: 50,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub sigma_min: f64,
    pub newton: f64,
    pub zero_threshold: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        ToleranceConfig {
            sigma_min: t.sigma_rel,
            newton: t.newton,
            zero_threshold: t.zero_rel,
        }
    }
}

impl ToleranceConfig {
    pub fn to_tolerances(&self) -> Tolerances {
        Tolerances {
            sigma_rel: self.sigma_min,
            newton: self.newton,
            zero_rel: self.zero_threshold,
        }
    }
}

fn join_violations(v: Vec<SpecViolation>) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("invalid spec: {}", parts.join("; "))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        // toml errors carry line/column positions.
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// The spec under the configured validation mode.
    pub fn family_spec(&self) -> Result<CyclicFamilySpec, String> {
        let a = self.spec.a.clone();
        let b = self.spec.b.clone();
        let r = if self.spec.relaxed {
            CyclicFamilySpec::new_relaxed(a, b)
        } else {
            CyclicFamilySpec::new(a, b)
        };
        r.map_err(join_violations)
    }

    /// Shape-checked spec that tolerates assumption violations. The weights
    /// command reports violations instead of refusing to run.
    pub fn relaxed_spec(&self) -> Result<CyclicFamilySpec, String> {
        CyclicFamilySpec::new_relaxed(self.spec.a.clone(), self.spec.b.clone())
            .map_err(join_violations)
    }
}
