//! Flat `key=value` experiment configuration. Every key has a default;
//! unknown keys are rejected. Defaults follow the shared hyperparameter
//! tables; experiment runners resolve the per-family values for anything
//! left unset.

use std::path::{Path, PathBuf};

use graphsr_core::{Error, Result};

#[derive(Debug, Clone)]
pub struct Config {
    /// node_vs_edge | simulated_sr | connectome_sr | sensitivity
    pub experiment: String,
    /// scenario name(s) for simulated runs, e.g. "sbm-degree" or "all"
    pub scenario: String,
    /// model selector: "all" or a comma-separated list
    pub models: String,
    pub out_dir: PathBuf,
    pub data_dir: Option<PathBuf>,
    pub seed: u64,
    pub seeds: Option<usize>,
    pub folds: usize,
    pub batch_size: usize,
    pub lr: Option<f64>,
    pub lr_search: bool,
    pub max_epochs: Option<usize>,
    pub warmup: Option<usize>,
    pub patience: Option<usize>,
    pub hidden: Option<usize>,
    pub heads: usize,
    pub dropout: f64,
    pub n_h: usize,
    pub n_l: usize,
    pub samples: usize,
    /// toy experiment split sizes
    pub toy_train: usize,
    pub toy_val: usize,
    pub toy_test: usize,
    /// connectome inputs; generated stand-ins are used when unset
    pub lr_matrix: Option<PathBuf>,
    pub hr_matrix: Option<PathBuf>,
    pub rescale: bool,
    pub subjects: usize,
    /// HR initialization scales for the sensitivity protocol
    pub scales: Vec<f64>,
    pub hr_scale: f64,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            experiment: "simulated_sr".to_string(),
            scenario: "sbm-degree".to_string(),
            models: "all".to_string(),
            out_dir: PathBuf::from("results"),
            data_dir: None,
            seed: 0,
            seeds: None,
            folds: 3,
            batch_size: 16,
            lr: None,
            lr_search: false,
            max_epochs: None,
            warmup: None,
            patience: None,
            hidden: None,
            heads: 4,
            dropout: 0.2,
            n_h: 64,
            n_l: 32,
            samples: 128,
            toy_train: 128,
            toy_val: 32,
            toy_test: 32,
            lr_matrix: None,
            hr_matrix: None,
            rescale: false,
            subjects: 96,
            scales: vec![1.0, 10.0, 100.0],
            hr_scale: 1.0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("config key {key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::invalid(format!(
            "config key {key}: expected a boolean, got {value:?}"
        ))),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "experiment" => cfg.experiment = value.to_string(),
                "scenario" => cfg.scenario = value.to_string(),
                "models" => cfg.models = value.to_string(),
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "data_dir" => cfg.data_dir = Some(PathBuf::from(value)),
                "seed" => cfg.seed = parse_num(key, value)?,
                "seeds" => cfg.seeds = Some(parse_num(key, value)?),
                "folds" => cfg.folds = parse_num(key, value)?,
                "batch_size" => cfg.batch_size = parse_num(key, value)?,
                "lr" => cfg.lr = Some(parse_num(key, value)?),
                "lr_search" => cfg.lr_search = parse_bool(key, value)?,
                "max_epochs" => cfg.max_epochs = Some(parse_num(key, value)?),
                "warmup" => cfg.warmup = Some(parse_num(key, value)?),
                "patience" => cfg.patience = Some(parse_num(key, value)?),
                "hidden" => cfg.hidden = Some(parse_num(key, value)?),
                "heads" => cfg.heads = parse_num(key, value)?,
                "dropout" => cfg.dropout = parse_num(key, value)?,
                "n_h" => cfg.n_h = parse_num(key, value)?,
                "n_l" => cfg.n_l = parse_num(key, value)?,
                "samples" => cfg.samples = parse_num(key, value)?,
                "toy_train" => cfg.toy_train = parse_num(key, value)?,
                "toy_val" => cfg.toy_val = parse_num(key, value)?,
                "toy_test" => cfg.toy_test = parse_num(key, value)?,
                "lr_matrix" => cfg.lr_matrix = Some(PathBuf::from(value)),
                "hr_matrix" => cfg.hr_matrix = Some(PathBuf::from(value)),
                "rescale" => cfg.rescale = parse_bool(key, value)?,
                "subjects" => cfg.subjects = parse_num(key, value)?,
                "hr_scale" => cfg.hr_scale = parse_num(key, value)?,
                "scales" => {
                    cfg.scales = value
                        .split(',')
                        .map(|s| parse_num::<f64>("scales", s.trim()))
                        .collect::<Result<Vec<f64>>>()?;
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "unknown config key {key:?} (line {})",
                        lineno + 1
                    )));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Config::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::invalid("folds must be at least 2".to_string()));
        }
        if let (Some(w), Some(e)) = (self.warmup, self.max_epochs) {
            if w >= e {
                return Err(Error::invalid(format!(
                    "warmup ({w}) must be below max_epochs ({e})"
                )));
            }
        }
        if self.patience == Some(0) {
            return Err(Error::invalid("patience must be at least 1".to_string()));
        }
        if self.n_l == 0 || self.n_l > self.n_h {
            return Err(Error::invalid(format!(
                "n_l = {} must be in 1..=n_h = {}",
                self.n_l, self.n_h
            )));
        }
        Ok(())
    }

    /// Echo of every key in a stable order, written into result manifests.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("experiment", self.experiment.clone());
        kv("scenario", self.scenario.clone());
        kv("models", self.models.clone());
        kv("out_dir", self.out_dir.display().to_string());
        kv(
            "data_dir",
            self.data_dir
                .as_ref()
                .map_or("unset".to_string(), |p| p.display().to_string()),
        );
        kv("seed", self.seed.to_string());
        kv(
            "seeds",
            self.seeds.map_or("default".to_string(), |v| v.to_string()),
        );
        kv("folds", self.folds.to_string());
        kv("batch_size", self.batch_size.to_string());
        kv("lr", self.lr.map_or("default".to_string(), |v| v.to_string()));
        kv("lr_search", self.lr_search.to_string());
        kv(
            "max_epochs",
            self.max_epochs.map_or("default".to_string(), |v| v.to_string()),
        );
        kv(
            "warmup",
            self.warmup.map_or("default".to_string(), |v| v.to_string()),
        );
        kv(
            "patience",
            self.patience.map_or("default".to_string(), |v| v.to_string()),
        );
        kv(
            "hidden",
            self.hidden.map_or("default".to_string(), |v| v.to_string()),
        );
        kv("heads", self.heads.to_string());
        kv("dropout", self.dropout.to_string());
        kv("n_h", self.n_h.to_string());
        kv("n_l", self.n_l.to_string());
        kv("samples", self.samples.to_string());
        kv("toy_train", self.toy_train.to_string());
        kv("toy_val", self.toy_val.to_string());
        kv("toy_test", self.toy_test.to_string());
        kv(
            "lr_matrix",
            self.lr_matrix
                .as_ref()
                .map_or("unset".to_string(), |p| p.display().to_string()),
        );
        kv(
            "hr_matrix",
            self.hr_matrix
                .as_ref()
                .map_or("unset".to_string(), |p| p.display().to_string()),
        );
        kv("rescale", self.rescale.to_string());
        kv("subjects", self.subjects.to_string());
        kv(
            "scales",
            self.scales
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("hr_scale", self.hr_scale.to_string());
        s
    }

    /// Worker cap from the GSR_THREADS environment variable (default 1).
    pub fn threads() -> usize {
        std::env::var("GSR_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&t| t >= 1)
            .unwrap_or(1)
    }
}
