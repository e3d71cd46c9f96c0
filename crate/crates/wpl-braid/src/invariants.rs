//! The determinant invariant and packaged structural checks.
//!
//! For a list of `n` integer linear functionals and a full sequence, the
//! matrix with entry `(i, j)` the i-th functional of the j-th entry has a
//! determinant that mutation changes at most in sign. With the default
//! functionals (rank, degree, then the Euler pairings against the tube
//! simples) its absolute value is the lcm of the weights.

use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{cadd, cmul, Error, Result};
use crate::ktheory::{EulerLattice, K0Class};
use crate::linalg::det_bareiss;
use crate::mutation::{apply_word, random_word, rotation_word, BraidWord};
use crate::sequences::ExcSeq;

/// An ordered list of `n` linear functionals, each stored as a covector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalSet {
    pub covectors: Vec<Vec<i64>>,
}

impl FunctionalSet {
    /// Rank, degree, then `chi(-, S_{i,j})` for `j = 1..p_i-1` per arm.
    pub fn default_set(lat: &EulerLattice) -> Result<FunctionalSet> {
        let n = lat.n();
        let mut covectors = vec![lat.rankvec().to_vec(), lat.degvec().to_vec()];
        for arm in 1..=lat.weight_type().t() {
            let p_i = lat.weight_type().weight(arm)?;
            for j in 1..p_i {
                let s = lat.simple_class(arm, j)?;
                // covector k |-> chi(e_k, s)
                let mut cov = vec![0i64; n];
                for (k, slot) in cov.iter_mut().enumerate() {
                    *slot = lat.euler_form(&lat.basis_class(k), &s)?;
                }
                covectors.push(cov);
            }
        }
        debug_assert_eq!(covectors.len(), n);
        Ok(FunctionalSet { covectors })
    }

    /// The standard basis covectors; the invariant matrix is then the
    /// coordinate matrix of the sequence.
    pub fn standard_basis(n: usize) -> FunctionalSet {
        FunctionalSet {
            covectors: (0..n)
                .map(|k| {
                    let mut v = vec![0i64; n];
                    v[k] = 1;
                    v
                })
                .collect(),
        }
    }

    pub fn apply(&self, i: usize, a: &K0Class) -> Result<i64> {
        let cov = &self.covectors[i];
        if cov.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: cov.len(),
                got: a.len(),
            });
        }
        let mut acc = 0i64;
        for (&c, &x) in cov.iter().zip(&a.coeffs) {
            acc = cadd(acc, cmul(c, x)?)?;
        }
        Ok(acc)
    }
}

/// `M[i][j] = f_i(E_j)` for a full sequence.
pub fn invariant_matrix(
    lat: &EulerLattice,
    s: &ExcSeq,
    fs: &FunctionalSet,
) -> Result<Vec<Vec<i64>>> {
    if s.len() != lat.n() {
        return Err(Error::MalformedInput(format!(
            "invariant matrix needs a full sequence of length {}, got {}",
            lat.n(),
            s.len()
        )));
    }
    if fs.covectors.len() != lat.n() {
        return Err(Error::MalformedInput(format!(
            "functional set has {} entries, expected {}",
            fs.covectors.len(),
            lat.n()
        )));
    }
    let n = lat.n();
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, e) in s.entries.iter().enumerate() {
            row[j] = fs.apply(i, e)?;
        }
    }
    Ok(m)
}

/// Exact determinant of the invariant matrix.
pub fn invariant_determinant(lat: &EulerLattice, s: &ExcSeq, fs: &FunctionalSet) -> Result<i64> {
    det_bareiss(&invariant_matrix(lat, s, fs)?)
}

/// Outcome of the helix identity check on one sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelixReport {
    /// Iterated left mutations: the full rotation equals
    /// `(tau E_n, E_1, ..., E_{n-1})`.
    pub forward: bool,
    /// Iterated right mutations: the inverse rotation equals
    /// `(E_2, ..., E_n, tau^{-1} E_1)`.
    pub backward: bool,
    pub pass: bool,
}

/// Verifies both helix identities by computing each side explicitly.
pub fn helix_check(lat: &EulerLattice, s: &ExcSeq) -> Result<HelixReport> {
    let m = s.len();
    let forward_word = rotation_word(m);
    let got_f = apply_word(lat, s, &forward_word)?;
    let mut expect_f = Vec::with_capacity(m);
    expect_f.push(lat.tau(&s.entries[m - 1])?);
    expect_f.extend_from_slice(&s.entries[..m - 1]);
    let forward = got_f.entries == expect_f;

    let backward_word = BraidWord::new((1..m as i32).map(|i| -i).collect());
    let got_b = apply_word(lat, s, &backward_word)?;
    let mut expect_b = Vec::with_capacity(m);
    expect_b.extend_from_slice(&s.entries[1..]);
    expect_b.push(lat.tau_inv(&s.entries[0])?);
    let backward = got_b.entries == expect_b;

    Ok(HelixReport {
        forward,
        backward,
        pass: forward && backward,
    })
}

/// One relation instance exercised by the suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTrial {
    pub kind: String,
    pub context_word: BraidWord,
    pub slots: Vec<i32>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub trials: u32,
    pub seed: u64,
    pub pass: bool,
    pub transcript: Vec<RelationTrial>,
    pub first_failure: Option<usize>,
}

/// Randomized check of both braid relation families and inverse round
/// trips at sequence level. Deterministic for a fixed seed.
pub fn braid_relation_suite(
    lat: &EulerLattice,
    s: &ExcSeq,
    trials: u32,
    seed: u64,
) -> Result<RelationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = s.len();
    if m < 2 {
        return Err(Error::MalformedInput(
            "relation suite needs at least 2 entries".into(),
        ));
    }
    let mut transcript = Vec::new();
    let mut first_failure = None;
    for trial in 0..trials {
        let context = random_word(&mut rng, (trial % 7) as usize, m);
        let base = apply_word(lat, s, &context)?;

        // adjacent braid relation, including the boundary slot; with only
        // one slot there is no adjacent relation to test
        let mut pass_adj = true;
        if m >= 3 {
            let i = 1 + (trial as i32 % (m as i32 - 2).max(1));
            let lhs = apply_word(lat, &base, &BraidWord::new(vec![i, i + 1, i]))?;
            let rhs = apply_word(lat, &base, &BraidWord::new(vec![i + 1, i, i + 1]))?;
            pass_adj = lhs == rhs;
            transcript.push(RelationTrial {
                kind: "adjacent".into(),
                context_word: context.clone(),
                slots: vec![i, i + 1],
                pass: pass_adj,
            });
        }

        // commuting relation when the slot range allows one
        let mut pass_comm = true;
        if m >= 4 {
            let max_i = m as i32 - 3;
            let ci = 1 + (trial as i32 % max_i.max(1)).min(max_i - 1).max(0);
            let cj = ci + 2 + (trial as i32 % (m as i32 - 1 - ci - 1).max(1));
            let cj = cj.min(m as i32 - 1);
            let lhs = apply_word(lat, &base, &BraidWord::new(vec![ci, cj]))?;
            let rhs = apply_word(lat, &base, &BraidWord::new(vec![cj, ci]))?;
            pass_comm = lhs == rhs;
            transcript.push(RelationTrial {
                kind: "commuting".into(),
                context_word: context.clone(),
                slots: vec![ci, cj],
                pass: pass_comm,
            });
        }

        // inverse round trips, including the boundary slot m-1
        let k = 1 + (trial as i32 % (m as i32 - 1));
        let rt1 = apply_word(lat, &base, &BraidWord::new(vec![k, -k]))?;
        let rt2 = apply_word(lat, &base, &BraidWord::new(vec![-k, k]))?;
        let pass_inv = rt1 == base && rt2 == base;
        transcript.push(RelationTrial {
            kind: "inverse".into(),
            context_word: context,
            slots: vec![k],
            pass: pass_inv,
        });

        if !(pass_adj && pass_comm && pass_inv) && first_failure.is_none() {
            first_failure = Some(trial as usize);
        }
    }
    Ok(RelationReport {
        trials,
        seed,
        pass: first_failure.is_none(),
        transcript,
        first_failure,
    })
}
