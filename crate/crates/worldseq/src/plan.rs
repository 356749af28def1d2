//! Bounded-horizon enumeration of world sequences and selection of
//! score-maximal ones.
//!
//! The blame-aware aggregators are non-Markovian (they depend on occurrence
//! counts and on the global number of negative positions), so per-state
//! value iteration is unsound here; sequences are enumerated exhaustively
//! instead, which is cheap at desk scale.

use thiserror::Error;

use crate::aggregate::{Aggregator, UtilityFunction};
use crate::model::{ModelError, TransitionSystem, WorldSequence};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("start world '{0}' is not in the system")]
    UnknownStart(String),
    #[error("top_k must be at least 1")]
    ZeroTopK,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Utility(String),
}

/// A planning request: score every sequence from the initial world with at
/// most `horizon` transitions and keep the best `top_k`.
#[derive(Debug, Clone)]
pub struct PlanQuery<S> {
    pub aggregator: Aggregator,
    pub u: UtilityFunction<S>,
    pub horizon: usize,
    pub top_k: usize,
}

/// One scored sequence together with its maximal-action trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPlan<S> {
    pub rank: usize,
    pub sequence: WorldSequence,
    pub actions: Vec<String>,
    pub score: S,
}

/// Every valid sequence starting at `start` with at most `horizon`
/// transitions, ordered by increasing length and then lexicographically by
/// world ids. Includes the singleton `[start]`.
pub fn enumerate_sequences(
    system: &TransitionSystem,
    start: &str,
    horizon: usize,
) -> Result<Vec<WorldSequence>, PlanError> {
    if system.world(start).is_none() {
        return Err(PlanError::UnknownStart(start.to_string()));
    }
    let mut result = Vec::new();
    let mut frontier: Vec<Vec<String>> = vec![vec![start.to_string()]];
    for _ in 0..=horizon {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for ids in &frontier {
            result.push(
                system
                    .validate_sequence(ids)
                    .expect("enumeration follows arcs"),
            );
            let last = ids.last().expect("non-empty");
            for succ in system.successors(last) {
                let mut extended = ids.clone();
                extended.push(succ.to_string());
                next.push(extended);
            }
        }
        frontier = next;
    }
    Ok(result)
}

/// Scores every enumerated sequence and returns the `top_k` best. Ties break
/// towards shorter sequences, then lexicographic world ids.
pub fn best_sequence<S: Scalar + Ord>(
    system: &TransitionSystem,
    query: &PlanQuery<S>,
) -> Result<Vec<RankedPlan<S>>, PlanError> {
    if query.top_k == 0 {
        return Err(PlanError::ZeroTopK);
    }
    let mut scored: Vec<(S, WorldSequence)> =
        enumerate_sequences(system, system.initial(), query.horizon)?
            .into_iter()
            .map(|seq| {
                let score = query
                    .aggregator
                    .evaluate(&seq, &query.u)
                    .map_err(|e| PlanError::Utility(e.to_string()))?;
                Ok((score, seq))
            })
            .collect::<Result<_, PlanError>>()?;
    scored.sort_by(|(sa, a), (sb, b)| {
        sb.cmp(sa)
            .then_with(|| a.ids().len().cmp(&b.ids().len()))
            .then_with(|| a.ids().cmp(b.ids()))
    });
    Ok(scored
        .into_iter()
        .take(query.top_k)
        .enumerate()
        .map(|(i, (score, sequence))| {
            let actions = system
                .action_trace(&sequence)
                .iter()
                .map(|a| a.name.clone())
                .collect();
            RankedPlan {
                rank: i + 1,
                sequence,
                actions,
                score,
            }
        })
        .collect())
}
