//! Utility functions on worlds and aggregation functions over world
//! sequences.
//!
//! The three sequence scores are the mean utility, the blame score (sum of
//! the negative utilities after the first world, normalised by the number of
//! negative-utility positions in the whole sequence) and the occurrence-
//! discounted variant of the blame score. A plain sum is kept as the naive
//! "maximise net utility" baseline; it deliberately breaks the `[-1, 1]`
//! range contract and is flagged as such in every output.
//!
//! `|K|` counts *positions* with negative utility, index 0 included. The
//! set-of-worlds reading does not reproduce the published sequence values;
//! the multiset reading does, on every row.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::WorldSequence;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UtilityError {
    #[error("utility for world '{0}' is outside [-1, 1]")]
    OutOfRange(String),
    #[error("no utility assigned to world '{0}'")]
    MissingWorld(String),
}

/// A total mapping from world ids to utilities in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityFunction<S> {
    values: BTreeMap<String, S>,
}

impl<S: Scalar> UtilityFunction<S> {
    pub fn new<I, K>(values: I) -> Result<Self, UtilityError>
    where
        I: IntoIterator<Item = (K, S)>,
        K: Into<String>,
    {
        let values: BTreeMap<String, S> = values.into_iter().map(|(k, v)| (k.into(), v)).collect();
        for (id, v) in &values {
            if *v < -S::one() || *v > S::one() {
                return Err(UtilityError::OutOfRange(id.clone()));
            }
        }
        Ok(UtilityFunction { values })
    }

    pub fn get(&self, world: &str) -> Result<&S, UtilityError> {
        self.values
            .get(world)
            .ok_or_else(|| UtilityError::MissingWorld(world.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &S)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Restriction of this function to the worlds of a smaller universe.
    pub fn restrict_to<'a, I: IntoIterator<Item = &'a str>>(&self, worlds: I) -> Self {
        let keep: Vec<&str> = worlds.into_iter().collect();
        UtilityFunction {
            values: self
                .values
                .iter()
                .filter(|(k, _)| keep.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

fn min_zero<S: Scalar>(v: &S) -> S {
    if *v < S::zero() {
        v.clone()
    } else {
        S::zero()
    }
}

/// Number of positions (index 0 included) whose world has strictly negative
/// utility — the multiset |K|.
pub fn negative_count<S: Scalar, K: PartialEq>(worlds: &[K], u: impl Fn(&K) -> S) -> usize {
    worlds.iter().filter(|w| u(w) < S::zero()).count()
}

/// Mean utility over the sequence entries.
pub fn sigma_mean_core<S: Scalar, K: PartialEq>(worlds: &[K], u: impl Fn(&K) -> S) -> S {
    let sum = worlds.iter().fold(S::zero(), |acc, w| acc + u(w));
    sum / S::from_usize(worlds.len()).expect("sequence length fits in the scalar")
}

/// Sum of the entries' utilities (naive baseline, unbounded).
pub fn sigma_sum_core<S: Scalar, K: PartialEq>(worlds: &[K], u: impl Fn(&K) -> S) -> S {
    worlds.iter().fold(S::zero(), |acc, w| acc + u(w))
}

/// Blame score: 0 when no position is negative, otherwise the sum over
/// indices i >= 1 of min(0, u(w_i)) / |K|.
pub fn sigma_blame_core<S: Scalar, K: PartialEq>(worlds: &[K], u: impl Fn(&K) -> S) -> S {
    let k = negative_count(worlds, &u);
    if k == 0 {
        return S::zero();
    }
    let k = S::from_usize(k).expect("|K| fits in the scalar");
    worlds[1..]
        .iter()
        .fold(S::zero(), |acc, w| acc + min_zero(&u(w)) / k.clone())
}

/// Occurrence-discounted blame score: each negative term is further divided
/// by the number of occurrences of its world in the prefix up to and
/// including its position.
pub fn sigma_occ_core<S: Scalar, K: PartialEq>(worlds: &[K], u: impl Fn(&K) -> S) -> S {
    let k = negative_count(worlds, &u);
    if k == 0 {
        return S::zero();
    }
    let k = S::from_usize(k).expect("|K| fits in the scalar");
    let mut total = S::zero();
    for (i, w) in worlds.iter().enumerate().skip(1) {
        let term = min_zero(&u(w));
        if !term.is_zero() {
            let occ_prefix = worlds[..=i].iter().filter(|x| *x == w).count();
            let discount = k.clone() * S::from_usize(occ_prefix).expect("occ fits in the scalar");
            total = total + term / discount;
        }
    }
    total
}

/// The aggregation functions exposed by the tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    Mean,
    Blame,
    Occ,
    /// Naive net-utility baseline, not one of the bounded aggregation functions
    /// and exempt from the range contract.
    Sum,
}

impl Aggregator {
    pub const ALL: [Aggregator; 4] = [
        Aggregator::Mean,
        Aggregator::Blame,
        Aggregator::Occ,
        Aggregator::Sum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::Blame => "blame",
            Aggregator::Occ => "occ",
            Aggregator::Sum => "sum",
        }
    }

    pub fn parse(name: &str) -> Option<Aggregator> {
        Aggregator::ALL.iter().copied().find(|a| a.name() == name)
    }

    /// True for the aggregation functions the range contract applies to.
    pub fn is_conforming(&self) -> bool {
        !matches!(self, Aggregator::Sum)
    }

    /// Evaluates this aggregator on a resolver from keys to utilities.
    pub fn evaluate_core<S: Scalar, K: PartialEq>(&self, worlds: &[K], u: impl Fn(&K) -> S) -> S {
        match self {
            Aggregator::Mean => sigma_mean_core(worlds, u),
            Aggregator::Blame => sigma_blame_core(worlds, u),
            Aggregator::Occ => sigma_occ_core(worlds, u),
            Aggregator::Sum => sigma_sum_core(worlds, u),
        }
    }

    /// Evaluates this aggregator on a validated sequence.
    pub fn evaluate<S: Scalar>(
        &self,
        seq: &WorldSequence,
        u: &UtilityFunction<S>,
    ) -> Result<S, UtilityError> {
        for id in seq.ids() {
            u.get(id)?;
        }
        Ok(self.evaluate_core(seq.ids(), |id| {
            u.get(id).expect("totality checked above").clone()
        }))
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma_{}", self.name())
    }
}

pub fn sigma_mean<S: Scalar>(
    seq: &WorldSequence,
    u: &UtilityFunction<S>,
) -> Result<S, UtilityError> {
    Aggregator::Mean.evaluate(seq, u)
}

pub fn sigma_blame<S: Scalar>(
    seq: &WorldSequence,
    u: &UtilityFunction<S>,
) -> Result<S, UtilityError> {
    Aggregator::Blame.evaluate(seq, u)
}

pub fn sigma_occ<S: Scalar>(
    seq: &WorldSequence,
    u: &UtilityFunction<S>,
) -> Result<S, UtilityError> {
    Aggregator::Occ.evaluate(seq, u)
}

pub fn sigma_sum<S: Scalar>(
    seq: &WorldSequence,
    u: &UtilityFunction<S>,
) -> Result<S, UtilityError> {
    Aggregator::Sum.evaluate(seq, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::scenario::{fig1_system, fig1_utilities};
    use num_traits::Zero;

    fn seq(ids: &[&str]) -> WorldSequence {
        fig1_system()
            .validate_sequence(&ids.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn utility_range_is_enforced() {
        let err = UtilityFunction::new([("w1", rat(3, 2))]).unwrap_err();
        assert_eq!(err, UtilityError::OutOfRange("w1".to_string()));
        assert!(UtilityFunction::new([("w1", rat(-1, 1)), ("w2", rat(1, 1))]).is_ok());
    }

    #[test]
    fn mean_values_from_fig1() {
        let u = fig1_utilities();
        assert_eq!(sigma_mean(&seq(&["w2"]), &u).unwrap(), rat(-1, 5));
        assert_eq!(
            sigma_mean(&seq(&["w2", "w1", "w3"]), &u).unwrap(),
            rat(4, 15)
        );
        assert_eq!(
            sigma_mean(&seq(&["w2", "w1", "w2"]), &u).unwrap(),
            rat(1, 30)
        );
        assert_eq!(
            sigma_mean(&seq(&["w2", "w1", "w2", "w1"]), &u).unwrap(),
            rat(3, 20)
        );
    }

    #[test]
    fn negative_count_is_multiset_over_positions() {
        let u = fig1_utilities();
        let count = |ids: &[&str]| negative_count(seq(ids).ids(), |id| *u.get(id).unwrap());
        assert_eq!(count(&["w2", "w1", "w2"]), 2);
        assert_eq!(count(&["w2", "w1", "w2", "w4"]), 3);
        assert_eq!(count(&["w1", "w3"]), 0);
    }

    #[test]
    fn blame_values_from_fig1() {
        let u = fig1_utilities();
        assert_eq!(sigma_blame(&seq(&["w2"]), &u).unwrap(), Rational::zero());
        assert_eq!(sigma_blame(&seq(&["w2", "w4"]), &u).unwrap(), rat(-3, 20));
        assert_eq!(
            sigma_blame(&seq(&["w2", "w1", "w2"]), &u).unwrap(),
            rat(-1, 10)
        );
        assert_eq!(
            sigma_blame(&seq(&["w2", "w1", "w2", "w4"]), &u).unwrap(),
            rat(-1, 6)
        );
        assert_eq!(
            sigma_blame(&seq(&["w2", "w1", "w2", "w1", "w2"]), &u).unwrap(),
            rat(-2, 15)
        );
    }

    #[test]
    fn occ_values_from_fig1() {
        let u = fig1_utilities();
        assert_eq!(
            sigma_occ(&seq(&["w2", "w1", "w2"]), &u).unwrap(),
            rat(-1, 20)
        );
        assert_eq!(
            sigma_occ(&seq(&["w2", "w1", "w2", "w1", "w2"]), &u).unwrap(),
            rat(-1, 18)
        );
        assert_eq!(
            sigma_occ(&seq(&["w2", "w1", "w2", "w4"]), &u).unwrap(),
            rat(-2, 15)
        );
        assert_eq!(
            sigma_occ(&seq(&["w1", "w3"]), &u).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn sum_baseline() {
        let u = fig1_utilities();
        assert_eq!(sigma_sum(&seq(&["w1", "w3"]), &u).unwrap(), rat(1, 1));
        assert_eq!(
            sigma_sum(&seq(&["w1", "w2", "w1", "w3"]), &u).unwrap(),
            rat(13, 10)
        );
        assert_eq!(sigma_sum(&seq(&["w2"]), &u).unwrap(), rat(-1, 5));
        assert!(!Aggregator::Sum.is_conforming());
    }

    #[test]
    fn headline_inequality() {
        let u = fig1_utilities();
        let short = seq(&["w2", "w1"]);
        let cycled = seq(&["w2", "w1", "w2", "w1"]);
        assert!(sigma_blame(&short, &u).unwrap() > sigma_blame(&cycled, &u).unwrap());
        assert!(sigma_occ(&short, &u).unwrap() > sigma_occ(&cycled, &u).unwrap());
        assert_eq!(sigma_blame(&cycled, &u).unwrap(), rat(-1, 10));
        assert_eq!(sigma_occ(&cycled, &u).unwrap(), rat(-1, 20));
    }

    #[test]
    fn missing_world_is_reported() {
        let u: UtilityFunction<Rational> = UtilityFunction::new([("w1", rat(1, 2))]).unwrap();
        let err = sigma_mean(&seq(&["w1", "w2"]), &u).unwrap_err();
        assert_eq!(err, UtilityError::MissingWorld("w2".to_string()));
    }
}
