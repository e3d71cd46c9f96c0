//! Exceptional sequences as tuples of Grothendieck classes.
//!
//! Validity is the class-level shadow of the categorical definition: unit
//! self-pairing, vanishing backwards pairing, and (for full sequences) a
//! unimodular coordinate matrix. Tuples produced by mutation from the
//! canonical sequence are genuinely exceptional; arbitrary tuples passing
//! these checks are combinatorial exceptional sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ktheory::{EulerLattice, K0Class};
use crate::linalg::det_bareiss;

/// An ordered tuple of classes, between 2 and `n` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExcSeq {
    pub entries: Vec<K0Class>,
}

impl ExcSeq {
    pub fn new(entries: Vec<K0Class>) -> Self {
        ExcSeq { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stable injective byte encoding of the coordinate tuple; equal
    /// sequences have equal fingerprints and conversely.
    pub fn fingerprint(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.entries.len() * 8 * 4);
        out.extend_from_slice(&(self.entries.len() as u64).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&(e.coeffs.len() as u64).to_le_bytes());
            for &c in &e.coeffs {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        out
    }
}

/// One failed validity condition, with the offending value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// `chi(e_i, e_i) != 1` (1-based position).
    SelfPairing { position: usize, chi: i64 },
    /// `chi(e_j, e_i) != 0` for `j > i` (1-based positions).
    BackwardPairing { i: usize, j: usize, chi: i64 },
    /// Full-length tuple whose coordinate matrix is not unimodular.
    NotUnimodular { det: i64 },
    /// Length outside `2..=n` or entry of wrong dimension.
    Shape { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// The canonical sequence: the `n` basis classes in tilting order.
pub fn canonical_sequence(lat: &EulerLattice) -> ExcSeq {
    ExcSeq::new((0..lat.n()).map(|k| lat.basis_class(k)).collect())
}

/// The sequence `(O, O(c), then each arm's simples in descending index)`.
/// The within-arm order is the one that passes validation under the
/// adopted translate convention.
pub fn det2_sequence(lat: &EulerLattice) -> Result<ExcSeq> {
    let mut entries = vec![lat.basis_class(0), lat.basis_class(lat.n() - 1)];
    for arm in 1..=lat.weight_type().t() {
        let p_i = lat.weight_type().weight(arm)?;
        for j in (1..p_i).rev() {
            entries.push(lat.simple_class(arm, j)?);
        }
    }
    Ok(ExcSeq::new(entries))
}

/// Checks the validity conditions and reports every failure.
pub fn validate_sequence(lat: &EulerLattice, s: &ExcSeq) -> Result<ValidationReport> {
    let mut violations = Vec::new();
    let m = s.len();
    if m < 2 || m > lat.n() {
        violations.push(Violation::Shape {
            detail: format!("length {} outside 2..={}", m, lat.n()),
        });
    }
    for (k, e) in s.entries.iter().enumerate() {
        if e.len() != lat.n() {
            violations.push(Violation::Shape {
                detail: format!("entry {} has dimension {}, expected {}", k + 1, e.len(), lat.n()),
            });
        }
    }
    if !violations.is_empty() {
        return Ok(ValidationReport {
            ok: false,
            violations,
        });
    }
    for i in 0..m {
        let chi = lat.euler_form(&s.entries[i], &s.entries[i])?;
        if chi != 1 {
            violations.push(Violation::SelfPairing {
                position: i + 1,
                chi,
            });
        }
    }
    for j in 0..m {
        for i in 0..j {
            let chi = lat.euler_form(&s.entries[j], &s.entries[i])?;
            if chi != 0 {
                violations.push(Violation::BackwardPairing {
                    i: i + 1,
                    j: j + 1,
                    chi,
                });
            }
        }
    }
    if m == lat.n() {
        let rows: Vec<Vec<i64>> = s.entries.iter().map(|e| e.coeffs.clone()).collect();
        let det = det_bareiss(&rows)?;
        if det.abs() != 1 {
            violations.push(Violation::NotUnimodular { det });
        }
    }
    Ok(ValidationReport {
        ok: violations.is_empty(),
        violations,
    })
}

pub fn is_valid(lat: &EulerLattice, s: &ExcSeq) -> Result<bool> {
    Ok(validate_sequence(lat, s)?.ok)
}

/// Hom and Ext dimensions of the pair `(e_i, e_j)` for `i < j` (1-based):
/// `(max(chi,0), max(-chi,0))`. In a valid sequence at most one is nonzero.
pub fn pair_dims(lat: &EulerLattice, s: &ExcSeq, i: usize, j: usize) -> Result<(i64, i64)> {
    if i == 0 || j > s.len() || i >= j {
        return Err(Error::MalformedInput(format!(
            "need 1 <= i < j <= {}, got ({i},{j})",
            s.len()
        )));
    }
    let chi = lat.euler_form(&s.entries[i - 1], &s.entries[j - 1])?;
    Ok((chi.max(0), (-chi).max(0)))
}

/// What a rank-0 class is, if anything recognizable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Rank0Class {
    /// Sum of `len` consecutive tube simples starting at `S_{arm,start}`
    /// (indices mod the arm weight); simple exactly when `len == 1`.
    Tube { arm: usize, start: i64, len: i64 },
    OrdinarySimple,
    NotRank0,
    Unrecognized,
}

/// Matches a class against the window sums of tube simples and against the
/// ordinary-point simple class.
pub fn classify_rank0(lat: &EulerLattice, a: &K0Class) -> Result<Rank0Class> {
    if lat.rank_of(a)? != 0 {
        return Ok(Rank0Class::NotRank0);
    }
    if *a == lat.ordinary_simple_class() {
        return Ok(Rank0Class::OrdinarySimple);
    }
    for arm in 1..=lat.weight_type().t() {
        let p_i = lat.weight_type().weight(arm)?;
        for start in 0..p_i {
            let mut acc = K0Class::zero(lat.n());
            for len in 1..p_i {
                acc = acc.add(&lat.simple_class(arm, start + len - 1)?)?;
                if acc == *a {
                    return Ok(Rank0Class::Tube { arm, start, len });
                }
            }
        }
    }
    Ok(Rank0Class::Unrecognized)
}
