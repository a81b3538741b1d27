//! Append-only JSON Lines store of signed contributions.
//!
//! Each record is keyed by the partition and a hash of the chart
//! description together with [`CONVENTION_TAG`], so recalibrating a
//! convention silently invalidates old entries instead of reusing them.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{FormProduct, LinearForm};
use crate::error::{Error, Result};

/// Bumped whenever a sign or weight convention changes.
pub const CONVENTION_TAG: &str = "dt4-vertex-v1";

pub const CACHE_FILE: &str = "contributions.jsonl";

/// Hash of the chart description and convention tag.
pub fn geometry_hash(description: &str) -> String {
    let mut h = Sha256::new();
    h.update(CONVENTION_TAG.as_bytes());
    h.update(b"\n");
    h.update(description.as_bytes());
    let digest = h.finalize();
    digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub partition: String,
    pub geometry: String,
    /// Absolute value of the scalar factor.
    pub numerator: String,
    /// `[[c_s1, c_s2, c_s3, c_m], multiplicity]`, negative multiplicities
    /// being denominator factors.
    pub factors: Vec<(Vec<String>, i64)>,
    pub sign: i8,
}

impl CacheRecord {
    pub fn new(partition: &str, geometry: &str, value: &FormProduct) -> Self {
        let scalar = value.scalar();
        let factors = value
            .factors()
            .map(|(f, k)| (f.coeffs().iter().map(|c| c.to_string()).collect(), k))
            .collect();
        CacheRecord {
            partition: partition.to_string(),
            geometry: geometry.to_string(),
            numerator: scalar.abs().to_string(),
            factors,
            sign: if scalar.is_negative() { -1 } else { 1 },
        }
    }

    pub fn value(&self) -> Result<FormProduct> {
        let parse = |s: &str| s.parse::<BigRational>().map_err(|e| Error::Cache(format!("bad rational `{s}`: {e}")));
        let mut out = FormProduct::one();
        let mut scalar = parse(&self.numerator)?;
        if scalar.is_zero() {
            return Err(Error::Cache("zero scalar in cache record".into()));
        }
        if self.sign < 0 {
            scalar = -scalar;
        }
        out.scale(&scalar);
        for (coeffs, k) in &self.factors {
            let c: Vec<BigRational> = coeffs.iter().map(|s| parse(s)).collect::<Result<_>>()?;
            let c: [BigRational; 4] =
                c.try_into().map_err(|_| Error::Cache("a form needs four coefficients".into()))?;
            out.push(&LinearForm::from_coeffs(c), *k).map_err(|e| Error::Cache(e.to_string()))?;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// In-memory index over the cache file, written back by appending.
#[derive(Debug)]
pub struct ContributionCache {
    path: PathBuf,
    entries: HashMap<(String, String), FormProduct>,
}

impl ContributionCache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        if path.exists() {
            let file = File::open(&path).map_err(|e| Error::Cache(e.to_string()))?;
            for (idx, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::Cache(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                // a torn final line from an interrupted run is skipped, not fatal
                let Ok(rec) = serde_json::from_str::<CacheRecord>(&line) else {
                    continue;
                };
                let value = rec.value().map_err(|e| Error::Cache(format!("line {}: {e}", idx + 1)))?;
                entries.insert((rec.geometry, rec.partition), value);
            }
        }
        Ok(ContributionCache { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, geometry: &str, partition: &str) -> Option<&FormProduct> {
        self.entries.get(&(geometry.to_string(), partition.to_string()))
    }

    /// Append entries not already present. Existing keys are left alone.
    pub fn extend(&mut self, records: impl IntoIterator<Item = CacheRecord>) -> Result<()> {
        let mut fresh = Vec::new();
        for rec in records {
            let key = (rec.geometry.clone(), rec.partition.clone());
            if self.entries.contains_key(&key) {
                continue;
            }
            self.entries.insert(key, rec.value()?);
            fresh.push(rec);
        }
        if fresh.is_empty() {
            return Ok(());
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::Cache(format!("{}: {e}", self.path.display())))?;
        let mut buf = String::new();
        for rec in fresh {
            buf.push_str(&serde_json::to_string(&rec).map_err(|e| Error::Cache(e.to_string()))?);
            buf.push('\n');
        }
        file.write_all(buf.as_bytes()).map_err(|e| Error::Cache(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::SolidPartition;
    use crate::vertex::{contribution_factors, Chart};

    #[test]
    fn roundtrip_and_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let pi: SolidPartition = "0,0,0,0;0,0,0,1".parse().unwrap();
        let value = contribution_factors(&pi, &Chart::standard()).unwrap();
        let key = geometry_hash(&Chart::standard().describe());
        let rec = CacheRecord::new(&pi.to_string(), &key, &value);
        assert_eq!(rec.value().unwrap(), value);
        {
            let mut cache = ContributionCache::open(dir.path()).unwrap();
            cache.extend([rec.clone(), rec.clone()]).unwrap();
        }
        let text = fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap();
        assert_eq!(text.lines().count(), 1);
        let cache = ContributionCache::open(dir.path()).unwrap();
        assert_eq!(cache.get(&key, &pi.to_string()), Some(&value));
        assert_ne!(geometry_hash("a"), geometry_hash("b"));
    }

    #[test]
    fn torn_line_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(CACHE_FILE), "{\"partition\": \"0,0,0").unwrap();
        assert!(ContributionCache::open(dir.path()).unwrap().is_empty());
    }
}
