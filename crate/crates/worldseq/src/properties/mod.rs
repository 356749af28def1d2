//! The nine aggregation-function properties, instance checking, and bounded
//! counterexample search.
//!
//! Each property is checked literally as stated, with exact arithmetic. The
//! published satisfaction table ships with the tool as *data* (see
//! [`claims`]): every cell is treated as a claim to confirm or refute by
//! bounded search, and a verdict that contradicts the claim is flagged as a
//! discrepancy instead of being suppressed.

pub mod claims;
pub mod search;

use std::fmt;

use thiserror::Error;

use crate::aggregate::{Aggregator, UtilityFunction};
use crate::model::{TransitionSystem, WorldSequence};
use crate::scalar::Scalar;

pub use search::{satisfaction_matrix, search_counterexample, Matrix, SearchConfig, SearchMode};

/// The nine properties, in the published-table row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyId {
    NonRecovery,
    LossConservation,
    Redundancy,
    Independence,
    DecreasingBenefits,
    IncreasingLosses,
    ZeroInitialisation,
    ValueInitialisation,
    WeakAdditivity,
}

impl PropertyId {
    pub const ALL: [PropertyId; 9] = [
        PropertyId::NonRecovery,
        PropertyId::LossConservation,
        PropertyId::Redundancy,
        PropertyId::Independence,
        PropertyId::DecreasingBenefits,
        PropertyId::IncreasingLosses,
        PropertyId::ZeroInitialisation,
        PropertyId::ValueInitialisation,
        PropertyId::WeakAdditivity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PropertyId::NonRecovery => "non_recovery",
            PropertyId::LossConservation => "loss_conservation",
            PropertyId::Redundancy => "redundancy",
            PropertyId::Independence => "independence",
            PropertyId::DecreasingBenefits => "decreasing_benefits",
            PropertyId::IncreasingLosses => "increasing_losses",
            PropertyId::ZeroInitialisation => "zero_initialisation",
            PropertyId::ValueInitialisation => "value_initialisation",
            PropertyId::WeakAdditivity => "weak_additivity",
        }
    }

    /// Row label matching the published table.
    pub fn label(&self) -> &'static str {
        match self {
            PropertyId::NonRecovery => "Non-recovery",
            PropertyId::LossConservation => "Loss conservation",
            PropertyId::Redundancy => "Redundancy",
            PropertyId::Independence => "Independence",
            PropertyId::DecreasingBenefits => "Dec. benefits",
            PropertyId::IncreasingLosses => "Inc. losses",
            PropertyId::ZeroInitialisation => "Zero initialisation",
            PropertyId::ValueInitialisation => "Value initialisation",
            PropertyId::WeakAdditivity => "Weak additivity",
        }
    }

    pub fn parse(name: &str) -> Option<PropertyId> {
        PropertyId::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// (number of bound sequences, number of bound worlds) a witness carries.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            PropertyId::NonRecovery => (3, 0),
            PropertyId::LossConservation | PropertyId::Redundancy => (2, 0),
            PropertyId::Independence => (1, 1),
            PropertyId::DecreasingBenefits | PropertyId::IncreasingLosses => (1, 2),
            PropertyId::ZeroInitialisation | PropertyId::ValueInitialisation => (0, 1),
            PropertyId::WeakAdditivity => (1, 1),
        }
    }

    /// Names of the bound sequences, in witness order.
    pub fn seq_names(&self) -> &'static [&'static str] {
        match self {
            PropertyId::NonRecovery => &["S1", "S2", "S3"],
            PropertyId::LossConservation | PropertyId::Redundancy => &["S1", "S2"],
            PropertyId::Independence
            | PropertyId::DecreasingBenefits
            | PropertyId::IncreasingLosses => &["S1"],
            PropertyId::WeakAdditivity => &["S"],
            _ => &[],
        }
    }

    /// Names of the bound worlds, in witness order.
    pub fn world_names(&self) -> &'static [&'static str] {
        match self {
            PropertyId::Independence => &["w'"],
            PropertyId::DecreasingBenefits | PropertyId::IncreasingLosses => &["w", "w'"],
            PropertyId::ZeroInitialisation
            | PropertyId::ValueInitialisation
            | PropertyId::WeakAdditivity => &["w"],
            _ => &[],
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which direction the increasing-losses conclusion is checked in. The
/// printed inequality (`>`) contradicts the prose ("disadvantages should be
/// increasing"); both are supported and the matrix reports the prose variant
/// in a footnote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossesVariant {
    Printed,
    Prose,
}

/// Optional reinterpretations of ambiguous property statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Variants {
    pub losses: LossesVariant,
    /// When set, redundancy's strict inequality is only required when
    /// sigma(S1) differs from sigma(S1 + S2); the literal unconditional form
    /// is falsified by zero-difference witnesses.
    pub redundancy_precondition: bool,
}

impl Default for Variants {
    fn default() -> Self {
        Variants {
            losses: LossesVariant::Printed,
            redundancy_precondition: false,
        }
    }
}

/// A concrete instantiation of a property's quantified variables.
#[derive(Debug, Clone)]
pub struct Witness<S> {
    pub system: TransitionSystem,
    pub u: UtilityFunction<S>,
    pub seqs: Vec<WorldSequence>,
    pub worlds: Vec<String>,
}

impl<S: Scalar> Witness<S> {
    /// Human-readable bindings, e.g. `S1 = [a, b], w = a`.
    pub fn describe(&self, property: PropertyId) -> String {
        let mut parts: Vec<String> = property
            .seq_names()
            .iter()
            .zip(&self.seqs)
            .map(|(name, seq)| format!("{name} = {seq}"))
            .collect();
        parts.extend(
            property
                .world_names()
                .iter()
                .zip(&self.worlds)
                .map(|(name, w)| format!("{name} = {w}")),
        );
        let utilities: Vec<String> = self
            .u
            .iter()
            .map(|(id, v)| format!("u({id}) = {v}"))
            .collect();
        format!("{}; {}", parts.join(", "), utilities.join(", "))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness has {got_seqs} sequences and {got_worlds} worlds, but {property} binds {want_seqs} and {want_worlds}")]
    Arity {
        property: PropertyId,
        want_seqs: usize,
        want_worlds: usize,
        got_seqs: usize,
        got_worlds: usize,
    },
    #[error("malformed witness: {0}")]
    Malformed(String),
}

/// Result of checking one property instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Holds,
    Violated { details: String },
}

impl CheckOutcome {
    pub fn is_violated(&self) -> bool {
        matches!(self, CheckOutcome::Violated { .. })
    }
}

fn violated<S: fmt::Display>(relation: &str, lhs: S, rhs: S) -> CheckOutcome {
    CheckOutcome::Violated {
        details: format!("required {relation}, got {lhs} vs {rhs}"),
    }
}

/// Evaluates one property on one witness, literally as stated and with
/// exact arithmetic.
pub fn check_instance<S: Scalar>(
    property: PropertyId,
    aggregator: Aggregator,
    witness: &Witness<S>,
    variants: &Variants,
) -> Result<CheckOutcome, WitnessError> {
    let (want_seqs, want_worlds) = property.arity();
    if witness.seqs.len() != want_seqs || witness.worlds.len() != want_worlds {
        return Err(WitnessError::Arity {
            property,
            want_seqs,
            want_worlds,
            got_seqs: witness.seqs.len(),
            got_worlds: witness.worlds.len(),
        });
    }
    let ts = &witness.system;
    for seq in &witness.seqs {
        ts.validate_sequence(seq.ids())
            .map_err(|e| WitnessError::Malformed(e.to_string()))?;
    }
    for w in &witness.worlds {
        if ts.world(w).is_none() {
            return Err(WitnessError::Malformed(format!("unknown world '{w}'")));
        }
    }
    let sigma = |seq: &WorldSequence| -> Result<S, WitnessError> {
        aggregator
            .evaluate(seq, &witness.u)
            .map_err(|e| WitnessError::Malformed(e.to_string()))
    };
    let concat = |a: &WorldSequence, b: &WorldSequence| -> Result<WorldSequence, WitnessError> {
        ts.concat(a, b).map_err(|e| {
            WitnessError::Malformed(format!("required concatenation is not a sequence: {e}"))
        })
    };
    let singleton = |w: &str| -> WorldSequence {
        ts.validate_sequence(&[w.to_string()])
            .expect("a single known world is always a sequence")
    };

    let outcome = match property {
        PropertyId::NonRecovery => {
            let (s1, s2, s3) = (&witness.seqs[0], &witness.seqs[1], &witness.seqs[2]);
            let joined = concat(s3, s2)?;
            if sigma(s1)? >= sigma(s3)? && sigma(s1)? < sigma(&joined)? {
                violated("sigma(S1) >= sigma(S3+S2)", sigma(s1)?, sigma(&joined)?)
            } else {
                CheckOutcome::Holds
            }
        }
        PropertyId::LossConservation => {
            let (s1, s2) = (&witness.seqs[0], &witness.seqs[1]);
            let joined = concat(s1, s2)?;
            if sigma(s1)? >= sigma(&joined)? && sigma(s2)? > S::zero() {
                violated("sigma(S2) <= 0", sigma(s2)?, S::zero())
            } else {
                CheckOutcome::Holds
            }
        }
        PropertyId::Redundancy => {
            let (s1, s2) = (&witness.seqs[0], &witness.seqs[1]);
            let once = concat(s1, s2)?;
            let twice = concat(&once, s2)?;
            let first = sigma(s1)? - sigma(&once)?;
            let second = sigma(&once)? - sigma(&twice)?;
            let vacuous = variants.redundancy_precondition && first.is_zero();
            if vacuous || first.abs() > second.abs() {
                CheckOutcome::Holds
            } else {
                violated(
                    "|sigma(S1) - sigma(S1+S2)| > |sigma(S1+S2) - sigma(S1+S2+S2)|",
                    first.abs(),
                    second.abs(),
                )
            }
        }
        PropertyId::Independence => {
            let s1 = &witness.seqs[0];
            let deleted = &witness.worlds[0];
            if s1.ids().contains(deleted) {
                return Err(WitnessError::Malformed(format!(
                    "world '{deleted}' occurs in S1 and cannot be deleted"
                )));
            }
            let restricted_ts = ts
                .without_world(deleted)
                .map_err(|e| WitnessError::Malformed(e.to_string()))?;
            let restricted_seq = restricted_ts
                .validate_sequence(s1.ids())
                .map_err(|e| WitnessError::Malformed(e.to_string()))?;
            let restricted_u = witness.u.restrict_to(restricted_ts.world_ids());
            let full = sigma(s1)?;
            let restricted = aggregator
                .evaluate(&restricted_seq, &restricted_u)
                .map_err(|e| WitnessError::Malformed(e.to_string()))?;
            if full == restricted {
                CheckOutcome::Holds
            } else {
                violated(
                    "sigma unchanged by deleting a non-occurring world",
                    full,
                    restricted,
                )
            }
        }
        PropertyId::DecreasingBenefits => {
            let s1 = &witness.seqs[0];
            let once = concat(s1, &singleton(&witness.worlds[0]))?;
            let twice = concat(&once, &singleton(&witness.worlds[1]))?;
            let (v0, v1, v2) = (sigma(s1)?, sigma(&once)?, sigma(&twice)?);
            if v0 < v1 && v1 < v2 && v2.clone() - v1.clone() >= v1.clone() - v0 {
                violated(
                    "second gain < first gain",
                    v2.clone() - v1.clone(),
                    v1 - sigma(s1)?,
                )
            } else {
                CheckOutcome::Holds
            }
        }
        PropertyId::IncreasingLosses => {
            let s1 = &witness.seqs[0];
            let once = concat(s1, &singleton(&witness.worlds[0]))?;
            let twice = concat(&once, &singleton(&witness.worlds[1]))?;
            let (v0, v1, v2) = (sigma(s1)?, sigma(&once)?, sigma(&twice)?);
            if v0 > v1 && v1 > v2 {
                let second = v2 - v1.clone();
                let first = v1 - v0;
                let ok = match variants.losses {
                    LossesVariant::Printed => second > first,
                    LossesVariant::Prose => second < first,
                };
                if ok {
                    CheckOutcome::Holds
                } else {
                    let relation = match variants.losses {
                        LossesVariant::Printed => "second difference > first difference",
                        LossesVariant::Prose => "second difference < first difference",
                    };
                    violated(relation, second, first)
                }
            } else {
                CheckOutcome::Holds
            }
        }
        PropertyId::ZeroInitialisation => {
            let v = sigma(&singleton(&witness.worlds[0]))?;
            if v.is_zero() {
                CheckOutcome::Holds
            } else {
                violated("sigma([w]) = 0", v, S::zero())
            }
        }
        PropertyId::ValueInitialisation => {
            let w = &witness.worlds[0];
            let v = sigma(&singleton(w))?;
            let uw = witness
                .u
                .get(w)
                .map_err(|e| WitnessError::Malformed(e.to_string()))?
                .clone();
            if v == uw {
                CheckOutcome::Holds
            } else {
                violated("sigma([w]) = u(w)", v, uw)
            }
        }
        PropertyId::WeakAdditivity => {
            let s = &witness.seqs[0];
            let w = &witness.worlds[0];
            let uw = witness
                .u
                .get(w)
                .map_err(|e| WitnessError::Malformed(e.to_string()))?
                .clone();
            let extended = concat(s, &singleton(w))?;
            let (before, after) = (sigma(s)?, sigma(&extended)?);
            if uw >= S::zero() && after < before {
                violated("sigma(S+[w]) >= sigma(S) for u(w) >= 0", after, before)
            } else if uw <= S::zero() && after > before {
                violated("sigma(S+[w]) <= sigma(S) for u(w) <= 0", after, before)
            } else {
                CheckOutcome::Holds
            }
        }
    };
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, ArcMode, Literal, TransitionSystem, World};
    use crate::scalar::{rat, Rational};
    use crate::scenario::{fig1_system, fig1_utilities};

    fn witness(seqs: &[&[&str]], worlds: &[&str]) -> Witness<Rational> {
        let ts = fig1_system();
        let seqs = seqs
            .iter()
            .map(|ids| {
                ts.validate_sequence(&ids.iter().map(|s| s.to_string()).collect::<Vec<_>>())
                    .unwrap()
            })
            .collect();
        Witness {
            system: ts,
            u: fig1_utilities(),
            seqs,
            worlds: worlds.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn zero_initialisation_holds_for_blame_on_w2() {
        let w = witness(&[], &["w2"]);
        let outcome = check_instance(
            PropertyId::ZeroInitialisation,
            Aggregator::Blame,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert_eq!(outcome, CheckOutcome::Holds);
    }

    #[test]
    fn value_initialisation_holds_for_mean_on_w2() {
        let w = witness(&[], &["w2"]);
        let outcome = check_instance(
            PropertyId::ValueInitialisation,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert_eq!(outcome, CheckOutcome::Holds);
        let blame = check_instance(
            PropertyId::ValueInitialisation,
            Aggregator::Blame,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert!(blame.is_violated());
    }

    #[test]
    fn non_recovery_violated_for_mean_on_fig1() {
        // sigma_mean([w2]) = -0.2 >= itself, yet appending [w1] lifts the
        // score to 0.15.
        let w = witness(&[&["w2"], &["w1"], &["w2"]], &[]);
        let outcome = check_instance(
            PropertyId::NonRecovery,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert!(outcome.is_violated());
    }

    #[test]
    fn loss_conservation_violated_for_mean_on_fig1() {
        // S1 = S2 = [w2, w1]: sigma(S1) = 0.15 = sigma(S1+S2), so the
        // premise holds, yet sigma(S2) = 0.15 > 0.
        let w = witness(&[&["w2", "w1"], &["w2", "w1"]], &[]);
        let outcome = check_instance(
            PropertyId::LossConservation,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap();
        // sigma([w2,w1]) = 0.15, sigma([w2,w1,w2,w1]) = 0.15, premise holds,
        // sigma(S2) = 0.15 > 0: violated.
        assert!(outcome.is_violated());
    }

    #[test]
    fn independence_holds_on_fig1() {
        let w = witness(&[&["w2", "w1"]], &["w4"]);
        for agg in [Aggregator::Mean, Aggregator::Blame, Aggregator::Occ] {
            let outcome =
                check_instance(PropertyId::Independence, agg, &w, &Variants::default()).unwrap();
            assert_eq!(outcome, CheckOutcome::Holds);
        }
    }

    #[test]
    fn independence_rejects_occurring_world() {
        let w = witness(&[&["w2", "w1"]], &["w2"]);
        let err = check_instance(
            PropertyId::Independence,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap_err();
        assert!(matches!(err, WitnessError::Malformed(_)));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let w = witness(&[&["w1"]], &[]);
        let err = check_instance(
            PropertyId::NonRecovery,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap_err();
        assert!(matches!(err, WitnessError::Arity { .. }));
    }

    #[test]
    fn invalid_concatenation_is_malformed() {
        // (w3, w1) is not an arc, so S3 + S2 leaves the sequence set.
        let w = witness(&[&["w1"], &["w1"], &["w1", "w3"]], &[]);
        let err = check_instance(
            PropertyId::NonRecovery,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap_err();
        assert!(matches!(err, WitnessError::Malformed(_)));
    }

    #[test]
    fn redundancy_zero_difference_witness() {
        // One world with a self-loop and utility 0: repeating S2 = [a] never
        // moves the score, so the strict inequality |0| > |0| fails; the
        // precondition variant makes the instance vacuous instead.
        let ts = TransitionSystem::build(
            vec![World::new("a", ["p"])],
            vec![Action::new(
                "loop",
                Vec::<String>::new(),
                [Literal::pos("p")],
            )],
            "a",
            ArcMode::Derived,
            &[],
        )
        .unwrap();
        let seqs = vec![
            ts.validate_sequence(&["a".to_string()]).unwrap(),
            ts.validate_sequence(&["a".to_string()]).unwrap(),
        ];
        let w = Witness {
            system: ts,
            u: UtilityFunction::new([("a", Rational::from_integer(0))]).unwrap(),
            seqs,
            worlds: vec![],
        };
        let literal = check_instance(
            PropertyId::Redundancy,
            Aggregator::Blame,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert!(literal.is_violated());
        let with_precondition = check_instance(
            PropertyId::Redundancy,
            Aggregator::Blame,
            &w,
            &Variants {
                redundancy_precondition: true,
                ..Variants::default()
            },
        )
        .unwrap();
        assert_eq!(with_precondition, CheckOutcome::Holds);
    }

    #[test]
    fn weak_additivity_for_blame_holds_on_simple_extension() {
        let w = witness(&[&["w2", "w1"]], &["w3"]);
        let outcome = check_instance(
            PropertyId::WeakAdditivity,
            Aggregator::Blame,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert_eq!(outcome, CheckOutcome::Holds);
    }

    #[test]
    fn increasing_losses_variants_disagree() {
        // sigma_mean strictly decreasing along [w1], [w1,w2], [w1,w2,w4]:
        // 0.5, 0.15, 0. Differences: -0.35 then -0.15... second > first, so
        // the printed form holds here and the prose form is violated.
        let w = witness(&[&["w1"]], &["w2", "w4"]);
        let printed = check_instance(
            PropertyId::IncreasingLosses,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert_eq!(printed, CheckOutcome::Holds);
        let prose = check_instance(
            PropertyId::IncreasingLosses,
            Aggregator::Mean,
            &w,
            &Variants {
                losses: LossesVariant::Prose,
                ..Variants::default()
            },
        )
        .unwrap();
        assert!(prose.is_violated());
    }

    #[test]
    fn decreasing_benefits_example() {
        // mean along [w2], [w2, w1], [w2, w1, w3]: -0.2, 0.15, 0.266...
        // gains 0.35 then 0.116...: second < first, property holds here.
        let w = witness(&[&["w2"]], &["w1", "w3"]);
        let outcome = check_instance(
            PropertyId::DecreasingBenefits,
            Aggregator::Mean,
            &w,
            &Variants::default(),
        )
        .unwrap();
        assert_eq!(outcome, CheckOutcome::Holds);
    }

    #[test]
    fn mean_sequence_values_check() {
        let u = fig1_utilities();
        let ts = fig1_system();
        let seq = ts
            .validate_sequence(&[
                "w2".to_string(),
                "w1".to_string(),
                "w2".to_string(),
                "w4".to_string(),
            ])
            .unwrap();
        assert_eq!(Aggregator::Mean.evaluate(&seq, &u).unwrap(), rat(-1, 20));
    }
}
