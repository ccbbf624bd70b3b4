use crate::error::{Error, Result};
use crate::groups::{ball, BallIndex, GroupSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Where a ball came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallSource {
    Cache,
    Built,
}

#[derive(Serialize, Deserialize)]
struct CachedBall {
    key: String,
    group: String,
    radius: usize,
    elements: Vec<String>,
    depth: Vec<usize>,
}

/// Content address of `(family, generators, R)`.
pub fn cache_key(spec: &GroupSpec, radius: usize) -> String {
    let gens: Vec<String> = spec.generators().iter().map(|g| spec.format(g)).collect();
    let text = format!("{}|{}|{}", spec.family, gens.join(","), radius);
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn cache_path(dir: &Path, spec: &GroupSpec, radius: usize) -> PathBuf {
    dir.join(format!("ball-{}.json", cache_key(spec, radius)))
}

pub fn save_ball(dir: &Path, spec: &GroupSpec, b: &BallIndex) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let record = CachedBall {
        key: cache_key(spec, b.radius),
        group: spec.to_string(),
        radius: b.radius,
        elements: b.elements().iter().map(|e| spec.format(e)).collect(),
        depth: b.depths().to_vec(),
    };
    let path = cache_path(dir, spec, b.radius);
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec(&record)?)?;
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

/// `Ok(None)` on a miss; an error when the file exists but is unusable.
pub fn load_ball(dir: &Path, spec: &GroupSpec, radius: usize) -> Result<Option<BallIndex>> {
    let path = cache_path(dir, spec, radius);
    if !path.exists() {
        return Ok(None);
    }
    let bytes = std::fs::read(&path)?;
    let record: CachedBall = serde_json::from_slice(&bytes)?;
    if record.key != cache_key(spec, radius) || record.radius != radius {
        return Err(Error::InvalidInput(format!("cache entry {} does not match its key", path.display())));
    }
    let elements = record.elements.iter().map(|w| spec.parse_word(w)).collect::<Result<Vec<_>>>()?;
    Ok(Some(BallIndex::from_parts(spec, radius, elements, record.depth)?))
}

/// Load `B_R` from `dir` or enumerate it (and store it when `dir` is set).
/// Unreadable cache entries are rebuilt with a warning.
pub fn load_or_build(
    spec: &GroupSpec,
    radius: usize,
    cap: usize,
    dir: Option<&Path>,
) -> Result<(BallIndex, BallSource)> {
    let start = Instant::now();
    if let Some(d) = dir {
        match load_ball(d, spec, radius) {
            Ok(Some(b)) => {
                log::info!("ball {spec} R={radius}: {} elements from cache in {:?}", b.len(), start.elapsed());
                return Ok((b, BallSource::Cache));
            }
            Ok(None) => {}
            Err(e) => log::warn!("ball cache entry for {spec} R={radius} is corrupt ({e}); rebuilding"),
        }
    }
    let b = ball(spec, radius, cap)?;
    log::info!("ball {spec} R={radius}: {} elements built by BFS in {:?}", b.len(), start.elapsed());
    if let Some(d) = dir {
        save_ball(d, spec, &b)?;
    }
    Ok((b, BallSource::Built))
}
