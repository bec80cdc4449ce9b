use std::path::{Path, PathBuf};

use novascape::corpus::FilterConfig;
use novascape::landscape::CentroidWeighting;
use novascape::metrics::ComparisonSet;
use novascape::stats::ModelSpec;
use novascape::synth::SynthConfig;
use serde::{Deserialize, Serialize};

use crate::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LandscapeConfig {
    /// Snapshot years; empty means the last corpus year only.
    pub snapshot_years: Vec<i32>,
    pub min_type_count: u64,
    pub cf_share_threshold: f64,
    pub seed: u64,
    pub centroid_weighting: CentroidWeighting,
}

impl Default for LandscapeConfig {
    fn default() -> Self {
        Self {
            snapshot_years: Vec::new(),
            min_type_count: 6,
            cf_share_threshold: 0.5,
            seed: 42,
            centroid_weighting: CentroidWeighting::Records,
        }
    }
}

/// Everything a run needs, loadable from one JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Feature registry; the built-in 51-feature list when absent.
    pub registry_path: Option<PathBuf>,
    /// Corpus CSV; when absent, `report` generates one from `synth`.
    pub corpus_path: Option<PathBuf>,
    pub filter: FilterConfig,
    pub spans: Vec<u32>,
    pub comparison_set: ComparisonSet,
    /// Last year with complete forward coverage; the last corpus year when
    /// absent.
    pub last_complete_year: Option<i32>,
    /// Custom models; the standard table set when absent.
    pub models: Option<Vec<ModelSpec>>,
    pub landscape: LandscapeConfig,
    pub synth: SynthConfig,
    /// Not echoed into outputs so that runs into different directories stay
    /// byte-identical.
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            registry_path: None,
            corpus_path: None,
            filter: FilterConfig::default(),
            spans: vec![1, 2, 5],
            comparison_set: ComparisonSet::Filtered,
            last_complete_year: None,
            models: None,
            landscape: LandscapeConfig::default(),
            synth: SynthConfig::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Reads a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.registry_path, &mut cfg.corpus_path].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.spans.is_empty() {
            return Err(PipelineError::Input("spans must not be empty".into()));
        }
        if self.spans.contains(&0) {
            return Err(PipelineError::Input("spans must be positive".into()));
        }
        for p in [&self.registry_path, &self.corpus_path].into_iter().flatten() {
            if !p.exists() {
                return Err(PipelineError::Input(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_object() {
        let cfg: PipelineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert_eq!(cfg.landscape.seed, 42);
        assert_eq!(cfg.spans, vec![1, 2, 5]);
    }

    #[test]
    fn relative_paths_resolve_against_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"corpus_path": "games.csv", "spans": [2]}"#).unwrap();
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.corpus_path.unwrap(), dir.path().join("games.csv"));
        assert_eq!(cfg.spans, vec![2]);
    }

    #[test]
    fn empty_spans_rejected() {
        let cfg = PipelineConfig { spans: vec![], ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
