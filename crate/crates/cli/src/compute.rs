use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use zptower::analysis::KernelProfile;
use zptower::cartier::{cartier_matrix, CartierTables};
use zptower::tower::{genus, BuildOptions, TowerSpec, TowerState};

use crate::store::{ResultRecord, Store, SCHEMA_VERSION};

#[derive(Clone, Debug)]
pub struct ComputeOptions {
    pub levels: usize,
    /// Number of powers of the Cartier operator.
    pub powers: usize,
    /// Recompute even when the store already has the level.
    pub force: bool,
}

/// Cache directories under a data directory.
#[derive(Clone, Debug)]
pub struct DataDir {
    pub root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    pub fn witt(&self) -> PathBuf {
        self.root.join("witt")
    }

    pub fn cartier(&self) -> PathBuf {
        self.root.join("cartier")
    }

    pub fn store(&self) -> Result<Store> {
        Store::in_dir(&self.root)
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn record(spec: &TowerSpec, level: usize, genus: u64, kernels: Vec<usize>, wall_time: f64) -> ResultRecord {
    ResultRecord {
        schema: SCHEMA_VERSION,
        spec_hash: spec.spec_hash(),
        spec_name: spec.name.clone(),
        p: spec.p(),
        k: spec.field.k(),
        d: spec.basic_invariant(),
        level,
        genus,
        kernels,
        wall_time,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: now(),
    }
}

/// Kernel dimensions for levels `1..=n` without touching any cache.
pub fn compute_levels(spec: &TowerSpec, n: usize, powers: usize) -> Result<Vec<ResultRecord>> {
    compute_with(spec, n, powers, None)
}

fn compute_with(spec: &TowerSpec, n: usize, powers: usize, data: Option<&DataDir>) -> Result<Vec<ResultRecord>> {
    let t0 = Instant::now();
    let opts = BuildOptions { witt_cache: data.map(DataDir::witt) };
    let state = TowerState::build_with(spec, n, &opts)?;
    let tables = match data {
        Some(d) => CartierTables::build_cached(&state, n, &d.cartier(), &spec.spec_hash())?,
        None => CartierTables::build(&state, n)?,
    };
    let mut setup = t0.elapsed().as_secs_f64();
    let mut out = Vec::with_capacity(n);
    for level in 1..=n {
        let t = Instant::now();
        let cm = cartier_matrix(&state, &tables, level)?;
        let profile = KernelProfile::from_matrix(&cm, powers)?;
        out.push(record(spec, level, state.genus(level), profile.kernels, t.elapsed().as_secs_f64() + setup));
        setup = 0.0;
    }
    Ok(out)
}

/// Builds levels through `opts.levels`, reusing stored results and caches, and appends new records.
pub fn run_compute(spec: &TowerSpec, opts: &ComputeOptions, data: &DataDir) -> Result<Vec<ResultRecord>> {
    let store = data.store()?;
    if opts.levels == 0 {
        let rec = record(spec, 0, 0, vec![0; opts.powers], 0.0);
        store.append(&rec)?;
        return Ok(vec![rec]);
    }
    let hash = spec.spec_hash();
    let mut cached = Vec::with_capacity(opts.levels);
    if !opts.force {
        for level in 1..=opts.levels {
            match store.query(&hash, level, opts.powers)? {
                Some(mut r) => {
                    r.kernels.truncate(opts.powers);
                    cached.push(r);
                }
                None => break,
            }
        }
    }
    if cached.len() == opts.levels {
        return Ok(cached);
    }
    let fresh = compute_with(spec, opts.levels, opts.powers, Some(data))?;
    let mut out = Vec::with_capacity(opts.levels);
    for rec in fresh {
        if let Some(c) = cached.iter().find(|c| c.level == rec.level) {
            out.push(c.clone());
        } else {
            store.append(&rec)?;
            out.push(rec);
        }
    }
    Ok(out)
}

/// Genus through level n from the ramification data alone.
pub fn genus_table(spec: &TowerSpec, n: usize) -> Result<Vec<u64>> {
    (1..=n).map(|l| Ok(genus(spec, l)?)).collect()
}

pub fn default_data_dir() -> &'static Path {
    Path::new("zptower-data")
}
