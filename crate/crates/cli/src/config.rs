//! TOML run configuration. Every key is optional; command-line flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::field::{FieldSpec, HarmonicSpec, ProfileSpec};
use crate::{Failure, Format};

#[derive(Clone, Debug, Default, Deserialize)]
pub struct Config {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    #[serde(default)]
    pub fault: FaultConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub expand: ExpandConfig,
    #[serde(default)]
    pub tsm: TsmConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub zeros: ZerosConfig,
    #[serde(default)]
    pub heisenberg: HeisenbergConfig,
}

/// Test fixtures that deliberately break a component.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct FaultConfig {
    #[serde(default)]
    pub corrupt_laguerre: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct VerifyConfig {
    pub pq_max: Option<usize>,
    pub k_max: Option<usize>,
    pub n_max: Option<usize>,
    pub orthogonality: Option<bool>,
    pub grid_steps: Option<usize>,
    pub grid_extent: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct ExpandConfig {
    pub k: Option<usize>,
    pub radius: Option<f64>,
    pub q_max: Option<usize>,
    pub angular_degree: Option<usize>,
    pub radial_order: Option<usize>,
    /// Points as `[re_1, im_1, re_2, im_2, ...]`.
    pub probes: Option<Vec<Vec<f64>>>,
    pub save_grid: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct TsmConfig {
    pub radius: Option<f64>,
    pub points: Option<Vec<Vec<f64>>>,
    pub weight: Option<HarmonicSpec>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct ExperimentConfig {
    pub sphere: Option<SphereSection>,
    pub cone: Option<ConeSection>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SphereSection {
    /// Dimension of the weight's space (default 1).
    pub n: Option<usize>,
    pub profile: ProfileSpec,
    pub weight: HarmonicSpec,
    pub sphere_radii: Vec<f64>,
    pub k_max: usize,
    pub measure_radii: Option<Vec<f64>>,
    pub points_per_sphere: Option<usize>,
    pub noise_floor: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ConeSection {
    /// Directions as `[re_1, im_1, re_2, im_2]`.
    pub directions: Vec<Vec<f64>>,
    pub k_max: usize,
    pub t_max: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub zero_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct ZerosConfig {
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub k_max: Option<usize>,
    pub n: Option<usize>,
    pub x_max: Option<f64>,
    pub resolution: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct HeisenbergConfig {
    pub lambda: Option<f64>,
    pub z_nodes: Option<usize>,
    pub z_extent: Option<f64>,
    pub t_nodes: Option<usize>,
    pub t_extent: Option<f64>,
}

/// Parses a config, listing every unknown key and the first type error by path.
pub fn parse(text: &str) -> Result<Config, Failure> {
    let mut unknown = Vec::new();
    let de = toml::Deserializer::new(text);
    let mut record = |path: serde_ignored::Path<'_>| unknown.push(path.to_string());
    let ignored = serde_ignored::Deserializer::new(de, &mut record);
    let parsed: Result<Config, _> = serde_path_to_error::deserialize(ignored);
    let mut problems: Vec<String> = unknown.iter().map(|p| format!("{p}: unknown key")).collect();
    let cfg = match parsed {
        Ok(c) => Some(c),
        Err(e) => {
            let path = e.path().to_string();
            let msg = e.into_inner().message().trim().to_string();
            problems.push(format!("{}: {msg}", if path.is_empty() || path == "." { "<root>".into() } else { path }));
            None
        }
    };
    match (cfg, problems.is_empty()) {
        (Some(c), true) => Ok(c),
        _ => Err(Failure::Usage(format!("config schema violations:\n  {}", problems.join("\n  ")))),
    }
}

pub fn load(path: Option<&Path>) -> Result<(Config, Option<PathBuf>), Failure> {
    match path {
        None => Ok((Config::default(), None)),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", p.display())))?;
            let cfg = parse(&text).map_err(|f| match f {
                Failure::Usage(m) => Failure::Usage(format!("{}: {m}", p.display())),
                other => other,
            })?;
            Ok((cfg, Some(p.to_path_buf())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_listed_with_paths() {
        let err = parse("seed = 3\n[verify]\npq_max = 2\nbogus = 1\n[expand]\nradius = 1.0\nextra = true\n").unwrap_err();
        let Failure::Usage(m) = err else { panic!() };
        assert!(m.contains("verify.bogus"), "{m}");
        assert!(m.contains("expand.extra"), "{m}");
    }

    #[test]
    fn type_errors_name_the_path() {
        let Failure::Usage(m) = parse("[zeros]\nk1 = \"three\"\n").unwrap_err() else { panic!() };
        assert!(m.contains("zeros.k1"), "{m}");
    }

    #[test]
    fn full_config_parses() {
        let c = parse(
            r#"
seed = 7
format = "csv"
[fault]
corrupt_laguerre = true
[field]
n = 1
[[field.components]]
profile = { kind = "gaussian", c = 1.0, a = 0.5 }
harmonic = { basis = [1, 0, 0] }
coefficient = [0.5, -0.25]
[experiment.cone]
directions = [[1.0, 0.0, 0.0, 0.0]]
k_max = 2
"#,
        )
        .unwrap();
        assert_eq!(c.seed, Some(7));
        assert!(c.fault.corrupt_laguerre);
        assert_eq!(c.field.unwrap().components.len(), 1);
        assert_eq!(c.experiment.cone.unwrap().k_max, 2);
    }
}
