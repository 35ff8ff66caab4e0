//! Experiment configuration: JSON file with full command-line override.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use exsca_core::geometry::{
    ApcaConfig, ArrayLayout, ExscaConfig, GeneralizedConfig, SubarraySpec,
};

pub const OUT_DIR_ENV: &str = "EXSCA_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Apca,
    Exsca,
    Generalized,
    Hybrid2d,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "apca" => Ok(Family::Apca),
            "exsca" => Ok(Family::Exsca),
            "generalized" => Ok(Family::Generalized),
            "hybrid2d" => Ok(Family::Hybrid2d),
            other => Err(format!(
                "unknown family '{other}' (expected apca|exsca|generalized|hybrid2d)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Exsca,
    Nyquist,
}

impl std::str::FromStr for FactorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exsca" => Ok(FactorKind::Exsca),
            "nyquist" => Ok(FactorKind::Nyquist),
            other => Err(format!("unknown factor kind '{other}' (exsca|nyquist)")),
        }
    }
}

/// One subarray of a generalized configuration, as written in config files
/// or in the `--subarrays` flag (`elements:spacing:compression:sparsity:periods:shift`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubarrayParams {
    pub elements: u32,
    pub spacing: u32,
    #[serde(default = "one_u32")]
    pub compression: u32,
    #[serde(default = "one_u32")]
    pub sparsity: u32,
    #[serde(default = "one_u32")]
    pub periods: u32,
    #[serde(default)]
    pub shift: i64,
}

fn one_u32() -> u32 {
    1
}

impl std::str::FromStr for SubarrayParams {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(format!(
                "subarray '{s}' must have 6 fields elements:spacing:compression:sparsity:periods:shift"
            ));
        }
        let num = |i: usize| -> Result<u32, String> {
            parts[i]
                .parse()
                .map_err(|e| format!("subarray field '{}': {e}", parts[i]))
        };
        Ok(SubarrayParams {
            elements: num(0)?,
            spacing: num(1)?,
            compression: num(2)?,
            sparsity: num(3)?,
            periods: num(4)?,
            shift: parts[5]
                .parse()
                .map_err(|e| format!("subarray shift '{}': {e}", parts[5]))?,
        })
    }
}

impl SubarrayParams {
    pub fn to_spec(self) -> exsca_core::Result<SubarraySpec> {
        SubarraySpec::new(
            self.elements,
            self.spacing,
            self.compression,
            self.sparsity,
            self.periods,
            self.shift,
        )
    }
}

/// Full experiment description. Unknown keys in config files are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub family: Family,
    pub m: u32,
    pub n: u32,
    pub shift: i64,
    pub sparsity: u32,
    pub displaced: bool,
    pub subarrays: Vec<SubarrayParams>,
    pub peaks: Vec<f64>,
    pub peaks_2d: Vec<[f64; 2]>,
    pub amplitudes: Option<Vec<f64>>,
    pub noise_variance: f64,
    pub bandwidth: f64,
    pub snapshots: usize,
    pub trials: usize,
    pub seed: u64,
    pub grid: usize,
    pub grid_2d: usize,
    pub band: [f64; 2],
    /// Overall window scale constant (divides raw bias windows).
    pub scale: f64,
    pub dim1: FactorKind,
    pub dim2: FactorKind,
    pub out_dir: Option<PathBuf>,
    pub strict: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Apca,
            m: 4,
            n: 3,
            shift: 0,
            sparsity: 2,
            displaced: false,
            subarrays: Vec::new(),
            peaks: vec![0.1, 0.3, 0.6],
            peaks_2d: vec![[0.1, 0.0], [0.3, 0.0], [0.6, 0.0]],
            amplitudes: None,
            noise_variance: 0.0,
            bandwidth: 0.0,
            snapshots: 10,
            trials: 100,
            seed: 42,
            grid: 4096,
            grid_2d: 256,
            band: [0.0, 1.0],
            scale: 1.0,
            dim1: FactorKind::Exsca,
            dim2: FactorKind::Exsca,
            out_dir: None,
            strict: false,
        }
    }
}

impl ExperimentConfig {
    /// Output directory: explicit flag/config, else the environment
    /// variable, else `./out`.
    pub fn resolve_out_dir(&self) -> PathBuf {
        if let Some(dir) = &self.out_dir {
            return dir.clone();
        }
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from("out")
    }

    pub fn apca(&self) -> exsca_core::Result<ApcaConfig> {
        if self.displaced {
            ApcaConfig::displaced(self.m, self.n, self.shift)
        } else {
            ApcaConfig::new(self.m, self.n, self.shift)
        }
    }

    pub fn exsca(&self) -> exsca_core::Result<ExscaConfig> {
        if self.displaced {
            ExscaConfig::displaced(self.m, self.n, self.sparsity, self.shift)
        } else {
            ExscaConfig::new(self.m, self.n, self.sparsity, self.shift)
        }
    }

    pub fn generalized(&self) -> exsca_core::Result<GeneralizedConfig> {
        let specs = self
            .subarrays
            .iter()
            .map(|p| p.to_spec())
            .collect::<exsca_core::Result<Vec<_>>>()?;
        GeneralizedConfig::new(specs)
    }

    /// Layout and snapshot period of the configured 1D family.
    pub fn layout_and_period(&self) -> exsca_core::Result<(ArrayLayout, usize)> {
        match self.family {
            Family::Apca => {
                let cfg = self.apca()?;
                let layout = exsca_core::geometry::positions_apca(&cfg);
                let span = *layout.union.positions().last().unwrap() as usize;
                Ok((layout, cfg.period().max(span + 1)))
            }
            Family::Exsca => {
                let cfg = self.exsca()?;
                let layout = exsca_core::geometry::positions_exsca(&cfg);
                let span = *layout.union.positions().last().unwrap() as usize;
                Ok((layout, cfg.period().max(span + 1)))
            }
            Family::Generalized => {
                let cfg = self.generalized()?;
                Ok((exsca_core::geometry::positions_generalized(&cfg), cfg.period()))
            }
            Family::Hybrid2d => Err(exsca_core::Error::InvalidParameter(
                "hybrid2d has no 1D layout".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let cfg = ExperimentConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.m, cfg.m);
        assert_eq!(back.family, cfg.family);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"famly": "apca"}"#);
        assert!(err.is_err());
    }

    #[test]
    fn subarray_flag_parsing() {
        let p: SubarrayParams = "2:15:1:3:3:0".parse().unwrap();
        assert_eq!(p.elements, 2);
        assert_eq!(p.spacing, 15);
        assert_eq!(p.sparsity, 3);
        assert_eq!(p.periods, 3);
        assert!("2:15:1".parse::<SubarrayParams>().is_err());
    }
}
