//! Enumeration caches on disk, one JSON file per
//! (machine hash, budget, node limit, root).

use std::fs;
use std::path::{Path, PathBuf};

use omegalab_core::enumerate::{EnumerationCache, EnumerationLimits, FrontierNode, FrontierReason};
use omegalab_core::{BitString, PrefixMachine};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::enumerate_parallel;

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "OMEGALAB_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub machine_name: String,
    pub machine_hash: String,
    pub budget: u64,
    pub max_nodes: usize,
    pub root: String,
    pub exact: bool,
    pub diverged: u64,
    /// `[program, output]`, programs in shortlex order.
    pub halted: Vec<(String, String)>,
    pub frontier: FrontierSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierSummary {
    pub out_of_budget: usize,
    pub node_limit: usize,
    pub nodes: Vec<(String, Reason)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    OutOfBudget,
    NodeLimit,
}

impl From<FrontierReason> for Reason {
    fn from(r: FrontierReason) -> Self {
        match r {
            FrontierReason::OutOfBudget => Reason::OutOfBudget,
            FrontierReason::NodeLimit => Reason::NodeLimit,
        }
    }
}

impl From<Reason> for FrontierReason {
    fn from(r: Reason) -> Self {
        match r {
            Reason::OutOfBudget => FrontierReason::OutOfBudget,
            Reason::NodeLimit => FrontierReason::NodeLimit,
        }
    }
}

impl CacheFile {
    pub fn from_cache(cache: &EnumerationCache, limits: EnumerationLimits) -> Self {
        let count = |reason| cache.frontier.iter().filter(|n| n.reason == reason).count();
        CacheFile {
            version: CACHE_VERSION,
            machine_name: cache.machine_name.clone(),
            machine_hash: cache.machine_hash.clone(),
            budget: cache.budget,
            max_nodes: limits.max_nodes,
            root: cache.root.to_string(),
            exact: cache.exact,
            diverged: cache.diverged,
            halted: cache
                .halted
                .iter()
                .map(|(p, o)| (p.to_string(), o.to_string()))
                .collect(),
            frontier: FrontierSummary {
                out_of_budget: count(FrontierReason::OutOfBudget),
                node_limit: count(FrontierReason::NodeLimit),
                nodes: cache
                    .frontier
                    .iter()
                    .map(|n| (n.consumed.to_string(), n.reason.into()))
                    .collect(),
            },
        }
    }

    pub fn into_cache(self) -> Result<EnumerationCache, String> {
        if self.version != CACHE_VERSION {
            return Err(format!("version {} (expected {CACHE_VERSION})", self.version));
        }
        let bits = |s: &str| s.parse::<BitString>().map_err(|e| e.to_string());
        let halted = self
            .halted
            .iter()
            .map(|(p, o)| Ok((bits(p)?, bits(o)?)))
            .collect::<Result<_, String>>()?;
        let mut frontier = self
            .frontier
            .nodes
            .iter()
            .map(|(c, r)| {
                Ok(FrontierNode {
                    consumed: bits(c)?,
                    reason: (*r).into(),
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        frontier.sort();
        if self.exact != frontier.is_empty() {
            return Err("exact flag disagrees with the frontier".into());
        }
        Ok(EnumerationCache {
            machine_name: self.machine_name,
            machine_hash: self.machine_hash,
            budget: self.budget,
            root: bits(&self.root)?,
            halted,
            frontier,
            diverged: self.diverged,
            exact: self.exact,
        })
    }
}

pub fn cache_to_json(cache: &EnumerationCache, limits: EnumerationLimits) -> String {
    let mut text = serde_json::to_string(&CacheFile::from_cache(cache, limits)).expect("cache serializes");
    text.push('\n');
    text
}

pub fn cache_from_json(text: &str, path: &Path) -> Result<EnumerationCache> {
    let file: CacheFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    file.into_cache().map_err(|reason| Error::BadCache {
        path: path.into(),
        reason,
    })
}

/// A directory of cache files. Files are written once and never replaced.
#[derive(Debug, Clone)]
pub struct CacheStore {
    dir: PathBuf,
}

impl CacheStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CacheStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, machine: &PrefixMachine, root: &BitString, limits: EnumerationLimits) -> PathBuf {
        let hash = machine.fingerprint();
        let mut name = format!("{}-b{}-n{}", &hash[..16], limits.budget, limits.max_nodes);
        if !root.is_empty() {
            name.push_str(&format!("-r{root}"));
        }
        self.dir.join(name + ".json")
    }

    pub fn load(
        &self,
        machine: &PrefixMachine,
        root: &BitString,
        limits: EnumerationLimits,
    ) -> Result<Option<EnumerationCache>> {
        let path = self.path_for(machine, root, limits);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        let cache = cache_from_json(&text, &path)?;
        if cache.machine_hash != machine.fingerprint() || cache.budget != limits.budget || &cache.root != root {
            return Err(Error::BadCache {
                path,
                reason: "written for a different machine or budget".into(),
            });
        }
        Ok(Some(cache))
    }

    pub fn store(
        &self,
        cache: &EnumerationCache,
        machine: &PrefixMachine,
        limits: EnumerationLimits,
    ) -> Result<PathBuf> {
        let path = self.path_for(machine, &cache.root, limits);
        if path.exists() {
            return Ok(path);
        }
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, cache_to_json(cache, limits)).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    /// Loads the cache if present, otherwise enumerates and stores it.
    pub fn obtain(
        &self,
        machine: &PrefixMachine,
        root: &BitString,
        limits: EnumerationLimits,
        threads: usize,
    ) -> Result<EnumerationCache> {
        if let Some(cache) = self.load(machine, root, limits)? {
            return Ok(cache);
        }
        let cache = enumerate_parallel(machine, root, limits, threads);
        self.store(&cache, machine, limits)?;
        Ok(cache)
    }
}
