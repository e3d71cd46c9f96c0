//! The grading group of a weighted projective line.
//!
//! For a weight sequence `p = (p_1, ..., p_t)` the group is generated by
//! `x_1, ..., x_t` subject to `p_1 x_1 = ... = p_t x_t = c`, where `c` is the
//! canonical element. Every element has a unique normal form
//! `l*c + sum(l_i x_i)` with `0 <= l_i < p_i`; [`LVec`] stores exactly that
//! normal form, so equality is componentwise. `t = 0` is allowed and models
//! the projective line itself.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{cadd, cmul, cneg, Error, Result};

/// A weight sequence together with the derived constants: `p` is the least
/// common multiple of the weights (1 when there are none) and `n` the rank
/// of the Grothendieck group, `2 + sum(p_i - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightType {
    weights: Vec<i64>,
    p: i64,
    n: usize,
}

impl WeightType {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.iter().any(|&w| w < 2) {
            return Err(Error::MalformedInput(format!(
                "weights must all be >= 2, got {weights:?}"
            )));
        }
        let mut p: i64 = 1;
        for &w in &weights {
            p = p.checked_mul(w / p.gcd(&w)).ok_or(Error::Overflow)?;
        }
        let mut n: usize = 2;
        for &w in &weights {
            n += (w - 1) as usize;
        }
        Ok(WeightType { weights, p, n })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Number of weighted points.
    pub fn t(&self) -> usize {
        self.weights.len()
    }

    /// lcm of the weights; the degree of the canonical twist.
    pub fn p(&self) -> i64 {
        self.p
    }

    /// Rank of the Grothendieck group.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of arm `i` (1-based).
    pub fn weight(&self, arm: usize) -> Result<i64> {
        if arm == 0 || arm > self.weights.len() {
            return Err(Error::ArmOutOfRange {
                arm,
                t: self.weights.len(),
            });
        }
        Ok(self.weights[arm - 1])
    }

    /// Reduce an arbitrary integer combination `l*c + sum(raw_i x_i)` to
    /// normal form, carrying `floor(raw_i / p_i)` copies of the relation
    /// `p_i x_i = c` into the `c`-coefficient.
    pub fn normal_form(&self, l: i64, arm: &[i64]) -> Result<LVec> {
        if arm.len() != self.weights.len() {
            return Err(Error::MalformedInput(format!(
                "arm list has length {}, expected {}",
                arm.len(),
                self.weights.len()
            )));
        }
        let mut c = l;
        let mut norm = Vec::with_capacity(arm.len());
        for (&a, &w) in arm.iter().zip(&self.weights) {
            c = cadd(c, a.div_euclid(w))?;
            norm.push(a.rem_euclid(w));
        }
        Ok(LVec {
            w: self.clone(),
            l: c,
            arm: norm,
        })
    }

    pub fn zero(&self) -> LVec {
        LVec {
            w: self.clone(),
            l: 0,
            arm: vec![0; self.weights.len()],
        }
    }

    /// The canonical element `c`.
    pub fn canonical_element(&self) -> LVec {
        LVec {
            w: self.clone(),
            l: 1,
            arm: vec![0; self.weights.len()],
        }
    }

    /// The dualizing element `(t-2)c - sum(x_i)`, in normal form.
    pub fn dualizing_element(&self) -> LVec {
        let t = self.weights.len() as i64;
        let arm: Vec<i64> = self.weights.iter().map(|&w| w - 1).collect();
        // (t-2)c - sum x_i = (t-2-t)c + sum (p_i-1)x_i
        LVec {
            w: self.clone(),
            l: t - 2 - t,
            arm,
        }
    }

    /// Generator `x_i` (1-based arm index).
    pub fn generator(&self, arm: usize) -> Result<LVec> {
        if arm == 0 || arm > self.weights.len() {
            return Err(Error::ArmOutOfRange {
                arm,
                t: self.weights.len(),
            });
        }
        let mut v = vec![0; self.weights.len()];
        v[arm - 1] = 1;
        Ok(LVec {
            w: self.clone(),
            l: 0,
            arm: v,
        })
    }
}

/// An element of the grading group, always held in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LVec {
    w: WeightType,
    l: i64,
    arm: Vec<i64>,
}

impl LVec {
    pub fn weight_type(&self) -> &WeightType {
        &self.w
    }

    /// Coefficient of the canonical element in normal form.
    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn arm_coeffs(&self) -> &[i64] {
        &self.arm
    }

    fn check_same(&self, other: &LVec) -> Result<()> {
        if self.w != other.w {
            return Err(Error::WeightMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &LVec) -> Result<LVec> {
        self.check_same(other)?;
        let arm: Vec<i64> = self
            .arm
            .iter()
            .zip(&other.arm)
            .map(|(&a, &b)| cadd(a, b))
            .collect::<Result<_>>()?;
        self.w.normal_form(cadd(self.l, other.l)?, &arm)
    }

    pub fn neg(&self) -> Result<LVec> {
        let arm: Vec<i64> = self.arm.iter().map(|&a| cneg(a)).collect::<Result<_>>()?;
        self.w.normal_form(cneg(self.l)?, &arm)
    }

    pub fn sub(&self, other: &LVec) -> Result<LVec> {
        self.add(&other.neg()?)
    }

    pub fn scale(&self, k: i64) -> Result<LVec> {
        let arm: Vec<i64> = self.arm.iter().map(|&a| cmul(k, a)).collect::<Result<_>>()?;
        self.w.normal_form(cmul(k, self.l)?, &arm)
    }

    /// Dimension of the graded piece `S_z`: `l + 1` when `l >= -1`, else 0.
    /// This is `dim Hom(O(x), O(x+z))` for any line bundle twist `x`.
    pub fn graded_dim(&self) -> i64 {
        (self.l + 1).max(0)
    }

    /// The degree homomorphism: `l*p + sum(l_i * p/p_i)`.
    pub fn degree(&self) -> Result<i64> {
        let p = self.w.p();
        let mut d = cmul(self.l, p)?;
        for (&a, &w) in self.arm.iter().zip(self.w.weights()) {
            d = cadd(d, cmul(a, p / w)?)?;
        }
        Ok(d)
    }

    /// Membership in the cone of non-negative elements, equivalently `l >= 0`
    /// in normal form.
    pub fn is_effective(&self) -> bool {
        self.l >= 0
    }

    pub fn is_zero(&self) -> bool {
        self.l == 0 && self.arm.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for LVec {
    /// Text form `l;l1,l2,...,lt`, e.g. `-2;1,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.l)?;
        let parts: Vec<String> = self.arm.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses the `l;l1,...,lt` text form against a given weight type.
pub fn parse_lvec(s: &str, w: &WeightType) -> Result<LVec> {
    let (head, tail) = match s.split_once(';') {
        Some((h, t)) => (h, t),
        None => (s, ""),
    };
    let l: i64 = head
        .trim()
        .parse()
        .map_err(|_| Error::MalformedInput(format!("bad c-coefficient in {s:?}")))?;
    let arm: Vec<i64> = if tail.trim().is_empty() {
        // "l;" and bare "l" leave every arm coefficient zero
        vec![0; w.t()]
    } else {
        tail.split(',')
            .map(|a| {
                a.trim()
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad arm coefficient in {s:?}")))
            })
            .collect::<Result<_>>()?
    };
    w.normal_form(l, &arm)
}

impl FromStr for WeightType {
    type Err = Error;

    /// Comma list such as `2,3,5`; the empty string gives the weightless type.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return WeightType::new(Vec::new());
        }
        let weights: Vec<i64> = s
            .split(',')
            .map(|w| {
                w.trim()
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad weight {w:?}")))
            })
            .collect::<Result<_>>()?;
        WeightType::new(weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wt(ws: &[i64]) -> WeightType {
        WeightType::new(ws.to_vec()).unwrap()
    }

    #[test]
    fn derived_constants() {
        let w = wt(&[2, 3, 5]);
        assert_eq!(w.p(), 30);
        assert_eq!(w.n(), 2 + 1 + 2 + 4);
        let p1 = wt(&[]);
        assert_eq!(p1.p(), 1);
        assert_eq!(p1.n(), 2);
        assert!(WeightType::new(vec![1, 2]).is_err());
    }

    #[test]
    fn normal_form_carries() {
        let w = wt(&[2, 3]);
        let z = w.normal_form(0, &[0, 5]).unwrap();
        assert_eq!((z.l(), z.arm_coeffs()), (1, &[0, 2][..]));

        let w22 = wt(&[2, 2]);
        let z = w22.normal_form(0, &[-1, -1]).unwrap();
        assert_eq!((z.l(), z.arm_coeffs()), (-2, &[1, 1][..]));

        let z = w22.normal_form(0, &[0, 0]).unwrap();
        assert!(z.is_zero());

        assert!(w22.normal_form(0, &[1]).is_err());
    }

    #[test]
    fn group_ops() {
        let w = wt(&[2, 2]);
        let x1 = w.generator(1).unwrap();
        let c = x1.add(&x1).unwrap();
        assert_eq!(c, w.canonical_element());
        let nx1 = x1.neg().unwrap();
        assert_eq!((nx1.l(), nx1.arm_coeffs()), (-1, &[1, 0][..]));
        assert!(x1.add(&nx1).unwrap().is_zero());

        let w23 = wt(&[2, 3]);
        let x2 = w23.generator(2).unwrap();
        let two_x2 = x2.scale(2).unwrap();
        assert_eq!((two_x2.l(), two_x2.arm_coeffs()), (0, &[0, 2][..]));
        assert!(x1.add(&x2).is_err());
    }

    #[test]
    fn dualizing_element_normal_form() {
        let w = wt(&[2, 2]);
        let omega = w.dualizing_element();
        assert_eq!((omega.l(), omega.arm_coeffs()), (-2, &[1, 1][..]));
        // matches normalizing (t-2)c - sum x_i directly
        let by_hand = w
            .canonical_element()
            .scale(0)
            .unwrap()
            .sub(&w.generator(1).unwrap())
            .unwrap()
            .sub(&w.generator(2).unwrap())
            .unwrap();
        assert_eq!(omega, by_hand);

        let w236 = wt(&[2, 3, 6]);
        let alt = w236
            .canonical_element()
            .sub(&w236.generator(1).unwrap())
            .unwrap()
            .sub(&w236.generator(2).unwrap())
            .unwrap()
            .sub(&w236.generator(3).unwrap())
            .unwrap();
        assert_eq!(w236.dualizing_element(), alt);

        let p1 = wt(&[]);
        assert_eq!(p1.dualizing_element().l(), -2);
    }

    #[test]
    fn graded_dims() {
        let w = wt(&[2, 2]);
        assert_eq!(w.canonical_element().graded_dim(), 2);
        assert_eq!(w.zero().graded_dim(), 1);
        assert_eq!(w.dualizing_element().graded_dim(), 0);
    }

    #[test]
    fn degrees() {
        let w = wt(&[2, 2]);
        assert_eq!(w.canonical_element().degree().unwrap(), 2);
        let w23 = wt(&[2, 3]);
        assert_eq!(w23.generator(2).unwrap().degree().unwrap(), 2);
        assert_eq!(w23.zero().degree().unwrap(), 0);
    }

    #[test]
    fn effectivity() {
        let w = wt(&[2, 2]);
        assert!(w.canonical_element().is_effective());
        assert!(!w.dualizing_element().is_effective());
        assert!(w.generator(1).unwrap().is_effective());
    }

    #[test]
    fn text_round_trip() {
        let w = wt(&[2, 2]);
        let omega = w.dualizing_element();
        assert_eq!(omega.to_string(), "-2;1,1");
        assert_eq!(parse_lvec("-2;1,1", &w).unwrap(), omega);
        let p1 = wt(&[]);
        assert_eq!(parse_lvec("-2", &p1).unwrap(), p1.dualizing_element());
    }

    fn arb_raw() -> impl Strategy<Value = (Vec<i64>, i64, Vec<i64>)> {
        prop::sample::select(vec![
            vec![],
            vec![2],
            vec![2, 2],
            vec![2, 3],
            vec![3, 3],
            vec![2, 3, 5],
        ])
        .prop_flat_map(|ws| {
            let t = ws.len();
            (
                Just(ws),
                -50i64..50,
                prop::collection::vec(-50i64..50, t),
            )
        })
    }

    proptest! {
        #[test]
        fn normal_form_idempotent((ws, l, arm) in arb_raw()) {
            let w = wt(&ws);
            let z = w.normal_form(l, &arm).unwrap();
            let again = w.normal_form(z.l(), z.arm_coeffs()).unwrap();
            prop_assert_eq!(z, again);
        }

        #[test]
        fn abelian_group_laws((ws, l, arm) in arb_raw(), l2 in -50i64..50, l3 in -50i64..50) {
            let w = wt(&ws);
            let a = w.normal_form(l, &arm).unwrap();
            let arm2: Vec<i64> = arm.iter().map(|x| x.wrapping_mul(3) % 7).collect();
            let arm3: Vec<i64> = arm.iter().map(|x| x.wrapping_add(l2) % 5).collect();
            let b = w.normal_form(l2, &arm2).unwrap();
            let c = w.normal_form(l3, &arm3).unwrap();
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert!(a.add(&a.neg().unwrap()).unwrap().is_zero());
        }

        #[test]
        fn degree_is_homomorphism((ws, l, arm) in arb_raw(), l2 in -50i64..50) {
            let w = wt(&ws);
            let a = w.normal_form(l, &arm).unwrap();
            let arm2: Vec<i64> = arm.iter().map(|x| x.wrapping_sub(l2) % 11).collect();
            let b = w.normal_form(l2, &arm2).unwrap();
            prop_assert_eq!(
                a.add(&b).unwrap().degree().unwrap(),
                a.degree().unwrap() + b.degree().unwrap()
            );
        }

        #[test]
        fn graded_dim_vs_effectivity((ws, l, arm) in arb_raw()) {
            let w = wt(&ws);
            let z = w.normal_form(l, &arm).unwrap();
            if z.graded_dim() > 0 {
                prop_assert!(z.is_effective());
            }
            if z.l() == -1 {
                prop_assert_eq!(z.graded_dim(), 0);
            }
        }
    }
}
