//! Checkpoint persistence: parameter matrices next to a JSON sidecar that
//! records everything needed to rebuild the model.

use std::path::{Path, PathBuf};

use graphsr_core::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::experiments::{AnySr, SrHyper};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub model: String,
    pub n_l: usize,
    pub n_h: usize,
    pub in_dim: usize,
    pub hidden: usize,
    pub heads: usize,
    pub dropout: f64,
    pub hr_scale: f64,
    /// seed used for the (re-creatable) random initialization
    pub init_seed: u64,
}

fn meta_path(checkpoint: &Path) -> PathBuf {
    let mut s = checkpoint.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn save_checkpoint(path: &Path, meta: &CheckpointMeta, model: &AnySr) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.display().to_string(),
                source,
            })?;
        }
    }
    model.params().save(path)?;
    let text = serde_json::to_string_pretty(meta)
        .map_err(|e| Error::invalid(format!("meta serialization failed: {e}")))?;
    std::fs::write(meta_path(path), text).map_err(|source| Error::Io {
        path: meta_path(path).display().to_string(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<(CheckpointMeta, AnySr)> {
    let mpath = meta_path(path);
    let text = std::fs::read_to_string(&mpath).map_err(|source| Error::Io {
        path: mpath.display().to_string(),
        source,
    })?;
    let meta: CheckpointMeta = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: mpath.display().to_string(),
        line: 0,
        detail: e.to_string(),
    })?;
    let hp = SrHyper {
        hidden: meta.hidden,
        heads: meta.heads,
        dropout: meta.dropout,
        batch_size: 1,
        lr: 0.0,
        max_epochs: 1,
        warmup: 0,
        patience: 1,
        hr_scale: meta.hr_scale,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(meta.init_seed);
    let mut model = AnySr::init(&meta.model, meta.n_l, meta.n_h, meta.in_dim, &hp, &mut rng)?;
    model.params_mut().load(path)?;
    Ok((meta, model))
}
