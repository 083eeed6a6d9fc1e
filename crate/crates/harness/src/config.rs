//! Campaign configuration: a single JSON object.

use std::path::{Path, PathBuf};

use opjensen_core::convex_catalog::parse_function;
use opjensen_core::jensen_checks::{Branch, CheckName};
use opjensen_core::linalg::ToleranceConfig;
use opjensen_core::positive_maps::MapKind;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// `3` or `[2, 4]`; a bare number means d1 = d2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimSpec {
    Square(usize),
    Pair(usize, usize),
}

impl DimSpec {
    pub fn pair(&self) -> (usize, usize) {
        match *self {
            DimSpec::Square(d) => (d, d),
            DimSpec::Pair(d1, d2) => (d1, d2),
        }
    }
}

fn default_dims() -> Vec<DimSpec> {
    vec![DimSpec::Pair(2, 2)]
}

fn default_functions() -> Vec<String> {
    vec!["square".into()]
}

fn default_map_kinds() -> Vec<String> {
    vec!["ucp_stinespring".into()]
}

fn default_weights() -> Vec<(f64, f64)> {
    vec![(1.0, 1.0)]
}

fn default_branches() -> Vec<Branch> {
    vec![Branch::Normalized, Branch::Subnormalized]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub checks: Vec<String>,
    /// Trials per check, spread round-robin over that check's parameter cells.
    pub trials: usize,
    #[serde(default = "default_dims")]
    pub dims: Vec<DimSpec>,
    #[serde(default = "default_functions")]
    pub functions: Vec<String>,
    #[serde(default = "default_map_kinds")]
    pub map_kinds: Vec<String>,
    #[serde(default = "default_weights")]
    pub weights: Vec<(f64, f64)>,
    /// Branches of the partial-trace inequality to cover.
    #[serde(default = "default_branches")]
    pub branches: Vec<Branch>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    /// JSON Lines report; the CSV summary goes next to it with a `.csv` extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Every check at d ≤ 4 over the main function families and all map kinds.
    pub fn default_campaign() -> Self {
        Self {
            checks: CheckName::ALL.iter().map(|c| c.as_str().to_string()).collect(),
            trials: 1000,
            dims: vec![
                DimSpec::Pair(2, 2),
                DimSpec::Pair(3, 2),
                DimSpec::Pair(2, 4),
                DimSpec::Pair(4, 3),
            ],
            functions: ["square", "abs", "exp", "hinge:0", "shifted_square:-1", "power:1.5", "inv"]
                .map(String::from)
                .to_vec(),
            map_kinds: MapKind::ALL.iter().map(|k| k.as_str().to_string()).collect(),
            weights: vec![(1.0, 1.0), (0.3, 2.5)],
            branches: default_branches(),
            master_seed: 20240601,
            tolerances: ToleranceConfig::default(),
            out_path: None,
        }
    }

    pub fn validate(&self) -> Result<Validated, HarnessError> {
        if self.checks.is_empty() {
            return Err(HarnessError::Usage("config lists no checks".into()));
        }
        if let Some(dup) = self.checks.iter().enumerate().find(|(i, c)| self.checks[..*i].contains(c)) {
            return Err(HarnessError::Usage(format!("check `{}` is listed twice", dup.1)));
        }
        if self.trials == 0 {
            return Err(HarnessError::Usage("trials must be at least 1".into()));
        }
        for (name, empty) in [
            ("dims", self.dims.is_empty()),
            ("functions", self.functions.is_empty()),
            ("map_kinds", self.map_kinds.is_empty()),
            ("weights", self.weights.is_empty()),
            ("branches", self.branches.is_empty()),
        ] {
            if empty {
                return Err(HarnessError::Usage(format!("`{name}` must not be empty")));
            }
        }
        if let Some(d) = self.dims.iter().find(|d| d.pair().0 == 0 || d.pair().1 == 0) {
            return Err(HarnessError::Usage(format!("dimensions must be positive, got {d:?}")));
        }
        if let Some(w) = self.weights.iter().find(|(a, b)| !(*a > 0.0 && *b > 0.0) || !a.is_finite() || !b.is_finite()) {
            return Err(HarnessError::Usage(format!("trace weights must be positive, got {w:?}")));
        }
        self.tolerances.validate().map_err(|e| HarnessError::Usage(e.to_string()))?;
        let usage = |e: opjensen_core::Error| HarnessError::Usage(e.to_string());
        let checks = self
            .checks
            .iter()
            .map(|c| CheckName::parse(c).map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        let functions = self
            .functions
            .iter()
            .map(|f| parse_function(f).map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        let map_kinds = self
            .map_kinds
            .iter()
            .map(|k| MapKind::parse(k).map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Validated {
            checks,
            functions,
            map_kinds,
        })
    }
}

/// Catalog lookups resolved from the names in a config.
pub struct Validated {
    pub checks: Vec<CheckName>,
    pub functions: Vec<opjensen_core::convex_catalog::ScalarFunction>,
    pub map_kinds: Vec<MapKind>,
}
