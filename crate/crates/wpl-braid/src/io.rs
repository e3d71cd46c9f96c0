//! File formats and run configuration.
//!
//! Sequences travel as JSON objects `{ "weights": [...], "classes": [[...],
//! ...] }` with each class a plain integer array of length `n`. Reports are
//! serialized with stable field order so golden-file comparisons work.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ktheory::{EulerLattice, K0Class};
use crate::sequences::ExcSeq;
use crate::weights::WeightType;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub weights: Vec<i64>,
    pub classes: Vec<Vec<i64>>,
}

impl SequenceFile {
    pub fn from_seq(lat: &EulerLattice, s: &ExcSeq) -> Self {
        SequenceFile {
            weights: lat.weight_type().weights().to_vec(),
            classes: s.entries.iter().map(|e| e.coeffs.clone()).collect(),
        }
    }

    /// Validates the schema against a weight type and produces the
    /// sequence. Errors name the first offending field.
    pub fn into_seq(self, w: &WeightType) -> Result<ExcSeq> {
        if self.weights != w.weights() {
            return Err(Error::MalformedInput(format!(
                "field weights: {:?} does not match the requested type {:?}",
                self.weights,
                w.weights()
            )));
        }
        if self.classes.len() < 2 {
            return Err(Error::MalformedInput(format!(
                "field classes: need at least 2 entries, got {}",
                self.classes.len()
            )));
        }
        let n = w.n();
        for (k, c) in self.classes.iter().enumerate() {
            if c.len() != n {
                return Err(Error::MalformedInput(format!(
                    "field classes[{k}]: length {} does not match n = {n}",
                    c.len()
                )));
            }
        }
        Ok(ExcSeq::new(
            self.classes
                .into_iter()
                .map(|coeffs| K0Class { coeffs })
                .collect(),
        ))
    }
}

pub fn read_sequence(path: &Path, w: &WeightType) -> Result<ExcSeq> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    let file: SequenceFile = serde_json::from_str(&text)
        .map_err(|e| Error::MalformedInput(format!("bad sequence JSON in {}: {e}", path.display())))?;
    file.into_seq(w)
}

pub fn write_sequence(path: &Path, lat: &EulerLattice, s: &ExcSeq) -> Result<()> {
    let file = SequenceFile::from_seq(lat, s);
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::MalformedInput(format!("serialization failed: {e}")))?;
    fs::write(path, text)
        .map_err(|e| Error::MalformedInput(format!("cannot write {}: {e}", path.display())))
}

/// Everything a run depends on; embedded in the output of randomized
/// commands so transcripts are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub weights: Vec<i64>,
    pub subcommand: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub words: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_len: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// A lattice dump for machine consumption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDump {
    pub weights: Vec<i64>,
    pub n: usize,
    pub p: i64,
    pub gram: Vec<Vec<i64>>,
    pub deg: Vec<i64>,
    pub omega_matrix: Vec<Vec<i64>>,
    pub genus2: i64,
}

impl LatticeDump {
    pub fn from_lattice(lat: &EulerLattice) -> Self {
        LatticeDump {
            weights: lat.weight_type().weights().to_vec(),
            n: lat.n(),
            p: lat.p(),
            gram: lat.gram().clone(),
            deg: lat.degvec().to_vec(),
            omega_matrix: lat.omega_matrix().clone(),
            genus2: lat.genus2(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::canonical_sequence;

    #[test]
    fn sequence_round_trip() {
        let w = WeightType::new(vec![2, 3]).unwrap();
        let lat = EulerLattice::new(w.clone()).unwrap();
        let kappa = canonical_sequence(&lat);
        let dir = std::env::temp_dir().join("wpl_braid_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("kappa.json");
        write_sequence(&path, &lat, &kappa).unwrap();
        let back = read_sequence(&path, &w).unwrap();
        assert_eq!(back, kappa);
    }

    #[test]
    fn schema_errors_name_fields() {
        let w = WeightType::new(vec![2, 2]).unwrap();
        let bad = SequenceFile {
            weights: vec![2, 2],
            classes: vec![vec![1, 0, 0, 0], vec![0, 1, 0]],
        };
        match bad.into_seq(&w) {
            Err(Error::MalformedInput(msg)) => assert!(msg.contains("classes[1]"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
        let wrong_weights = SequenceFile {
            weights: vec![2, 3],
            classes: vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]],
        };
        match wrong_weights.into_seq(&w) {
            Err(Error::MalformedInput(msg)) => assert!(msg.contains("weights"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn lattice_dump_fields() {
        let lat = EulerLattice::new(WeightType::new(vec![2, 2]).unwrap()).unwrap();
        let dump = LatticeDump::from_lattice(&lat);
        let json = serde_json::to_string(&dump).unwrap();
        // stable key order
        let w_pos = json.find("\"weights\"").unwrap();
        let n_pos = json.find("\"n\"").unwrap();
        let g_pos = json.find("\"genus2\"").unwrap();
        assert!(w_pos < n_pos && n_pos < g_pos);
        assert_eq!(dump.p, 2);
    }
}
