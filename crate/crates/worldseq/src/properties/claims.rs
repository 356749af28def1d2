//! The published satisfaction table, shipped as data (version 1).
//!
//! These cells are claims to be confirmed or refuted by bounded search; they
//! are never used as test oracles. The sum baseline has no published column.

use super::PropertyId;
use crate::aggregate::Aggregator;

/// Version tag of the claims table embedded below.
pub const CLAIMS_VERSION: &str = "1";

/// Published claim for one (property, aggregator) cell: `Some(true)` for a
/// check mark, `Some(false)` for a cross, `None` where the source table has
/// no column.
pub fn published_claim(property: PropertyId, aggregator: Aggregator) -> Option<bool> {
    use Aggregator::*;
    use PropertyId::*;
    let claim = match (property, aggregator) {
        (NonRecovery, Mean) => false,
        (NonRecovery, Blame) | (NonRecovery, Occ) => true,
        (LossConservation, Mean) => false,
        (LossConservation, Blame) | (LossConservation, Occ) => true,
        (Redundancy, Mean) | (Redundancy, Blame) => false,
        (Redundancy, Occ) => true,
        (Independence, _) if aggregator != Sum => true,
        (DecreasingBenefits, Mean) => false,
        (DecreasingBenefits, Blame) | (DecreasingBenefits, Occ) => true,
        (IncreasingLosses, _) if aggregator != Sum => false,
        (ZeroInitialisation, Mean) => false,
        (ZeroInitialisation, Blame) | (ZeroInitialisation, Occ) => true,
        (ValueInitialisation, Mean) => true,
        (ValueInitialisation, Blame) | (ValueInitialisation, Occ) => false,
        (WeakAdditivity, _) if aggregator != Sum => true,
        (_, Sum) => return None,
        _ => unreachable!("all cells covered"),
    };
    Some(claim)
}
