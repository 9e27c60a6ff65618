//! Append-only JSON-lines store of computed levels.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: u32,
    pub spec_hash: String,
    pub spec_name: String,
    pub p: u32,
    pub k: u32,
    /// Ramification invariant, for towers whose terms are all Teichmüller lifts.
    pub d: Option<u64>,
    pub level: usize,
    pub genus: u64,
    /// `a^(1), ..., a^(R)`.
    pub kernels: Vec<usize>,
    pub wall_time: f64,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn powers(&self) -> usize {
        self.kernels.len()
    }

    fn key(&self) -> (String, usize, usize) {
        (self.spec_hash.clone(), self.level, self.powers())
    }
}

/// Records in `results.jsonl` under a data directory; appends are serialized.
pub struct Store {
    path: PathBuf,
    lock: Mutex<()>,
}

impl Store {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Store { path, lock: Mutex::new(()) })
    }

    pub fn in_dir(dir: &Path) -> Result<Self> {
        Self::open(dir.join("results.jsonl"))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, rec: &ResultRecord) -> Result<()> {
        let line = serde_json::to_string(rec)?;
        let _guard = self.lock.lock().expect("store lock poisoned");
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{line}")?;
        Ok(())
    }

    /// Every record in file order.
    pub fn load(&self) -> Result<Vec<ResultRecord>> {
        let f = match fs::File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value =
                serde_json::from_str(&line).with_context(|| format!("{}:{}: not JSON", self.path.display(), i + 1))?;
            let schema = value.get("schema").and_then(|s| s.as_u64());
            if schema != Some(SCHEMA_VERSION as u64) {
                bail!("{}:{}: unsupported record schema {:?}", self.path.display(), i + 1, schema);
            }
            out.push(serde_json::from_value(value).with_context(|| format!("{}:{}", self.path.display(), i + 1))?);
        }
        Ok(out)
    }

    /// One record per (spec, level, number of powers); later appends win.
    pub fn latest(&self) -> Result<Vec<ResultRecord>> {
        let mut order = Vec::new();
        let mut map: HashMap<(String, usize, usize), ResultRecord> = HashMap::new();
        for rec in self.load()? {
            let key = rec.key();
            if !map.contains_key(&key) {
                order.push(key.clone());
            }
            map.insert(key, rec);
        }
        Ok(order.into_iter().filter_map(|k| map.remove(&k)).collect())
    }

    /// Latest record for a level with at least `powers` kernel dimensions.
    pub fn query(&self, spec_hash: &str, level: usize, powers: usize) -> Result<Option<ResultRecord>> {
        Ok(self
            .load()?
            .into_iter()
            .rev()
            .find(|r| r.spec_hash == spec_hash && r.level == level && r.powers() >= powers))
    }

    /// Latest records of a spec, sorted by level.
    pub fn for_spec(&self, spec_hash: &str) -> Result<Vec<ResultRecord>> {
        let mut by_level: HashMap<usize, ResultRecord> = HashMap::new();
        for rec in self.load()?.into_iter().filter(|r| r.spec_hash == spec_hash) {
            by_level.insert(rec.level, rec);
        }
        let mut v: Vec<_> = by_level.into_values().collect();
        v.sort_by_key(|r| r.level);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(level: usize, kernels: Vec<usize>) -> ResultRecord {
        ResultRecord {
            schema: SCHEMA_VERSION,
            spec_hash: "abc".into(),
            spec_name: "t".into(),
            p: 2,
            k: 1,
            d: Some(7),
            level,
            genus: 3,
            kernels,
            wall_time: 0.5,
            tool_version: "0".into(),
            timestamp: 1,
        }
    }

    #[test]
    fn append_load_query() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::in_dir(dir.path()).unwrap();
        assert!(store.load().unwrap().is_empty());
        let a = rec(1, vec![2]);
        store.append(&a).unwrap();
        assert_eq!(store.load().unwrap(), vec![a.clone()]);
        assert!(store.query("zzz", 1, 1).unwrap().is_none());
        let mut b = a.clone();
        b.wall_time = 0.25;
        store.append(&b).unwrap();
        assert_eq!(store.query("abc", 1, 1).unwrap(), Some(b.clone()));
        assert_eq!(store.latest().unwrap(), vec![b]);
        assert!(store.query("abc", 1, 2).unwrap().is_none());
    }

    #[test]
    fn schema_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::in_dir(dir.path()).unwrap();
        fs::write(store.path(), "{\"schema\": 99}\n").unwrap();
        assert!(store.load().is_err());
    }
}
