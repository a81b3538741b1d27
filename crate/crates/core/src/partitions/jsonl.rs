use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::SolidPartition;
use crate::error::{Error, Result};

/// One line of a partition cache: `{"n": 2, "boxes": [[0,0,0,0],[1,0,0,0]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub n: usize,
    pub boxes: SolidPartition,
}

pub fn write_jsonl<W: Write>(mut out: W, partitions: &[SolidPartition]) -> Result<()> {
    for p in partitions {
        let rec = PartitionRecord { n: p.size(), boxes: p.clone() };
        let line = serde_json::to_string(&rec).map_err(|e| Error::Cache(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::Cache(e.to_string()))?;
    }
    Ok(())
}

/// Read records back, checking that each `n` matches its box count.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<SolidPartition>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Cache(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PartitionRecord =
            serde_json::from_str(&line).map_err(|e| Error::Cache(format!("line {}: {e}", idx + 1)))?;
        if rec.n != rec.boxes.size() {
            return Err(Error::Cache(format!("line {}: n = {} but {} boxes", idx + 1, rec.n, rec.boxes.size())));
        }
        out.push(rec.boxes);
    }
    Ok(out)
}
