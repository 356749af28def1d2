//! Propositional possible-worlds formalism: worlds, actions, accessibility,
//! action fusion, closure, transition systems, and world sequences.
//!
//! A world is the set of propositions true in it; absent propositions are
//! false (negation by default). An action pairs prerequisite propositions
//! with consequence literals, and a world `w'` is directly accessible from
//! `w` when some action applicable in `w` has all its consequences satisfied
//! by `w'`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Errors raised while building transition systems or validating sequences.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown world id '{0}'")]
    UnknownWorld(String),
    #[error("initial world '{0}' is not a declared world")]
    MissingInitial(String),
    #[error("explicit arc ({from}, {to}) is invalid: {reason}")]
    InvalidArc {
        from: String,
        to: String,
        reason: String,
    },
    #[error("sequence breaks at step {0}: no arc between consecutive worlds")]
    BrokenTransition(usize),
    #[error("sequence must be non-empty")]
    EmptySequence,
    #[error("fusing actions for ({from}, {to}) produced contradictory literals on '{prop}'")]
    InconsistentFusion {
        from: String,
        to: String,
        prop: String,
    },
}

/// A literal over a proposition: the proposition itself or its default
/// negation (written `!p` in scenario files).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub prop: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(prop: impl Into<String>) -> Self {
        Literal {
            prop: prop.into(),
            positive: true,
        }
    }

    pub fn neg(prop: impl Into<String>) -> Self {
        Literal {
            prop: prop.into(),
            positive: false,
        }
    }

    /// Parses `p` / `!p` syntax.
    pub fn parse(text: &str) -> Self {
        match text.strip_prefix('!') {
            Some(rest) => Literal::neg(rest),
            None => Literal::pos(text),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.prop)
        } else {
            write!(f, "!{}", self.prop)
        }
    }
}

/// A possible world: an id plus the set of propositions true in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub id: String,
    pub props: BTreeSet<String>,
}

impl World {
    pub fn new<I, P>(id: impl Into<String>, props: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<String>,
    {
        World {
            id: id.into(),
            props: props.into_iter().map(Into::into).collect(),
        }
    }

    /// Negation-by-default satisfaction of a single literal.
    pub fn satisfies_literal(&self, lit: &Literal) -> bool {
        self.props.contains(&lit.prop) == lit.positive
    }
}

/// An action: prerequisite propositions and consequence literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub pre: BTreeSet<String>,
    pub post: BTreeSet<Literal>,
}

impl Action {
    pub fn new<I, P, J>(name: impl Into<String>, pre: I, post: J) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<String>,
        J: IntoIterator<Item = Literal>,
    {
        Action {
            name: name.into(),
            pre: pre.into_iter().map(Into::into).collect(),
            post: post.into_iter().collect(),
        }
    }
}

/// True iff every prerequisite of `action` holds in `world`.
pub fn is_applicable(action: &Action, world: &World) -> bool {
    action.pre.iter().all(|p| world.props.contains(p))
}

/// True iff `world` satisfies every literal of `literals` under negation by
/// default.
pub fn satisfies<'a, I>(world: &World, literals: I) -> bool
where
    I: IntoIterator<Item = &'a Literal>,
{
    literals.into_iter().all(|l| world.satisfies_literal(l))
}

/// True iff some action in `actions` is applicable in `from` and has its
/// consequences satisfied by `to`.
pub fn directly_accessible(from: &World, to: &World, actions: &[Action]) -> bool {
    actions
        .iter()
        .any(|a| is_applicable(a, from) && satisfies(to, &a.post))
}

/// Fuses every action mapping `from` to `to` into the maximal action for the
/// arc, or `None` when the arc is not accessible. Constituent names are
/// joined with `+` in lexicographic order.
pub fn maximal_action(
    from: &World,
    to: &World,
    actions: &[Action],
) -> Result<Option<Action>, ModelError> {
    let mut matching: Vec<&Action> = actions
        .iter()
        .filter(|a| is_applicable(a, from) && satisfies(to, &a.post))
        .collect();
    if matching.is_empty() {
        return Ok(None);
    }
    matching.sort_by(|a, b| a.name.cmp(&b.name));
    if matching.len() == 1 {
        return Ok(Some(matching[0].clone()));
    }
    let name = matching
        .iter()
        .map(|a| a.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let pre: BTreeSet<String> = matching
        .iter()
        .flat_map(|a| a.pre.iter().cloned())
        .collect();
    let post: BTreeSet<Literal> = matching
        .iter()
        .flat_map(|a| a.post.iter().cloned())
        .collect();
    // Every constituent post is satisfied by the same `to` world, so a
    // contradictory pair p / !p cannot arise; keep the check as an assertion.
    for lit in &post {
        if !lit.positive && post.contains(&Literal::pos(lit.prop.clone())) {
            return Err(ModelError::InconsistentFusion {
                from: from.id.clone(),
                to: to.id.clone(),
                prop: lit.prop.clone(),
            });
        }
    }
    Ok(Some(Action { name, pre, post }))
}

/// Least superset of `seed` closed under direct accessibility within
/// `universe`, computed by worklist iteration.
pub fn closure(seed: &[&World], actions: &[Action], universe: &[World]) -> BTreeSet<String> {
    let mut reached: BTreeSet<String> = seed.iter().map(|w| w.id.clone()).collect();
    let mut queue: VecDeque<&World> = seed.iter().copied().collect();
    while let Some(w) = queue.pop_front() {
        for candidate in universe {
            if !reached.contains(&candidate.id) && directly_accessible(w, candidate, actions) {
                reached.insert(candidate.id.clone());
                queue.push_back(candidate);
            }
        }
    }
    reached
}

/// How the accessibility relation of a transition system is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcMode {
    /// Arcs are all pairs (w, w') with w' directly accessible from w.
    Derived,
    /// Arcs are listed explicitly and validated against the actions.
    Explicit,
}

/// A transition system: worlds, actions, accessibility arcs labelled with
/// their maximal actions, and an initial world.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    worlds: Vec<World>,
    actions: Vec<Action>,
    arcs: BTreeMap<(String, String), Action>,
    initial: String,
}

impl TransitionSystem {
    /// Builds a transition system. In [`ArcMode::Derived`] the arc set is the
    /// full direct-accessibility relation; in [`ArcMode::Explicit`] the given
    /// arcs are validated and labelled. Worlds are kept sorted by id and arcs
    /// by (from, to), so construction is deterministic.
    pub fn build(
        worlds: Vec<World>,
        actions: Vec<Action>,
        initial: &str,
        mode: ArcMode,
        explicit_arcs: &[(String, String)],
    ) -> Result<Self, ModelError> {
        let mut worlds = worlds;
        worlds.sort_by(|a, b| a.id.cmp(&b.id));
        if !worlds.iter().any(|w| w.id == initial) {
            return Err(ModelError::MissingInitial(initial.to_string()));
        }
        let mut arcs = BTreeMap::new();
        match mode {
            ArcMode::Derived => {
                for from in &worlds {
                    for to in &worlds {
                        if let Some(label) = maximal_action(from, to, &actions)? {
                            arcs.insert((from.id.clone(), to.id.clone()), label);
                        }
                    }
                }
            }
            ArcMode::Explicit => {
                for (from_id, to_id) in explicit_arcs {
                    let from = worlds
                        .iter()
                        .find(|w| &w.id == from_id)
                        .ok_or_else(|| ModelError::UnknownWorld(from_id.clone()))?;
                    let to = worlds
                        .iter()
                        .find(|w| &w.id == to_id)
                        .ok_or_else(|| ModelError::UnknownWorld(to_id.clone()))?;
                    match maximal_action(from, to, &actions)? {
                        Some(label) => {
                            arcs.insert((from_id.clone(), to_id.clone()), label);
                        }
                        None => {
                            return Err(ModelError::InvalidArc {
                                from: from_id.clone(),
                                to: to_id.clone(),
                                reason: "no applicable action reaches the target world".into(),
                            })
                        }
                    }
                }
            }
        }
        Ok(TransitionSystem {
            worlds,
            actions,
            arcs,
            initial: initial.to_string(),
        })
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn world(&self, id: &str) -> Option<&World> {
        self.worlds.iter().find(|w| w.id == id)
    }

    pub fn world_ids(&self) -> impl Iterator<Item = &str> {
        self.worlds.iter().map(|w| w.id.as_str())
    }

    pub fn has_arc(&self, from: &str, to: &str) -> bool {
        self.arcs.contains_key(&(from.to_string(), to.to_string()))
    }

    /// Maximal-action label of the arc (from, to), if the arc exists.
    pub fn label(&self, from: &str, to: &str) -> Option<&Action> {
        self.arcs.get(&(from.to_string(), to.to_string()))
    }

    /// Arcs in (from, to) order.
    pub fn arcs(&self) -> impl Iterator<Item = (&str, &str, &Action)> {
        self.arcs
            .iter()
            .map(|((f, t), a)| (f.as_str(), t.as_str(), a))
    }

    /// Successor ids of `from`, sorted.
    pub fn successors<'a>(&'a self, from: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.arcs
            .iter()
            .filter(move |((f, _), _)| f == from)
            .map(|((_, t), _)| t.as_str())
    }

    /// Validates a list of world ids as a sequence of this system: every
    /// consecutive pair must be an arc.
    pub fn validate_sequence(&self, ids: &[String]) -> Result<WorldSequence, ModelError> {
        if ids.is_empty() {
            return Err(ModelError::EmptySequence);
        }
        for id in ids {
            if self.world(id).is_none() {
                return Err(ModelError::UnknownWorld(id.clone()));
            }
        }
        for (i, pair) in ids.windows(2).enumerate() {
            if !self.has_arc(&pair[0], &pair[1]) {
                return Err(ModelError::BrokenTransition(i));
            }
        }
        Ok(WorldSequence { ids: ids.to_vec() })
    }

    /// The unique maximal-action trace of a valid sequence.
    pub fn action_trace(&self, seq: &WorldSequence) -> Vec<&Action> {
        seq.ids
            .windows(2)
            .map(|pair| {
                self.label(&pair[0], &pair[1])
                    .expect("validated sequence must follow arcs")
            })
            .collect()
    }

    /// Concatenation of two sequences, revalidated; the junction pair must be
    /// an arc for the result to be a sequence of this system.
    pub fn concat(
        &self,
        s1: &WorldSequence,
        s2: &WorldSequence,
    ) -> Result<WorldSequence, ModelError> {
        let mut ids = s1.ids.clone();
        ids.extend(s2.ids.iter().cloned());
        self.validate_sequence(&ids)
    }

    /// Copy of this system with one world removed (and every arc touching
    /// it). Used by the independence property.
    pub fn without_world(&self, id: &str) -> Result<TransitionSystem, ModelError> {
        if self.world(id).is_none() {
            return Err(ModelError::UnknownWorld(id.to_string()));
        }
        let worlds: Vec<World> = self.worlds.iter().filter(|w| w.id != id).cloned().collect();
        // Deleting the initial world reassigns w0 to the first remaining one;
        // the aggregators never read it.
        let initial = if self.initial == id {
            worlds
                .first()
                .ok_or_else(|| ModelError::MissingInitial(id.to_string()))?
                .id
                .clone()
        } else {
            self.initial.clone()
        };
        let arcs = self
            .arcs
            .iter()
            .filter(|((f, t), _)| f != id && t != id)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(TransitionSystem {
            worlds,
            actions: self.actions.clone(),
            arcs,
            initial,
        })
    }
}

/// A validated, non-empty sequence of world ids. Its size is the number of
/// transitions, one less than the number of entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldSequence {
    ids: Vec<String>,
}

impl WorldSequence {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Number of transitions: |S| = n for S = [w0, ..., wn].
    pub fn size(&self) -> usize {
        self.ids.len() - 1
    }

    pub fn first(&self) -> &str {
        &self.ids[0]
    }

    pub fn last(&self) -> &str {
        self.ids.last().expect("sequence is non-empty")
    }
}

impl fmt::Display for WorldSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.ids.join(", "))
    }
}

/// Number of occurrences of `world` in `seq`.
pub fn occ(world: &str, seq: &WorldSequence) -> usize {
    seq.ids.iter().filter(|id| *id == world).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::fig1_system;

    fn example1() -> (Vec<World>, Vec<Action>) {
        let worlds = vec![
            World::new("w1", ["p1"]),
            World::new("w2", ["p2"]),
            World::new("w3", ["p1", "p3"]),
            World::new("w4", ["p2", "p3"]),
        ];
        let actions = vec![
            Action::new("a1", ["p1"], [Literal::neg("p1"), Literal::pos("p2")]),
            Action::new("a2", ["p2"], [Literal::neg("p2"), Literal::pos("p1")]),
            Action::new("a3", Vec::<String>::new(), [Literal::pos("p3")]),
        ];
        (worlds, actions)
    }

    #[test]
    fn applicability() {
        let (worlds, actions) = example1();
        let w1 = &worlds[0];
        assert!(is_applicable(&actions[0], w1));
        assert!(is_applicable(&actions[2], w1));
        assert!(is_applicable(&actions[2], &worlds[1]));
        assert!(!is_applicable(&actions[1], w1));
    }

    #[test]
    fn satisfaction_under_negation_by_default() {
        let (worlds, _) = example1();
        let w2 = &worlds[1];
        let w3 = &worlds[2];
        assert!(satisfies(w2, &[Literal::neg("p1"), Literal::pos("p2")]));
        assert!(satisfies(w2, &[]));
        assert!(!satisfies(w3, &[Literal::neg("p1")]));
    }

    #[test]
    fn direct_accessibility_example1() {
        let (worlds, actions) = example1();
        let [w1, w2, _w3, w4] = [&worlds[0], &worlds[1], &worlds[2], &worlds[3]];
        assert!(directly_accessible(w1, w2, &actions));
        // w4 = {p2, p3} is reached from w1 via a3 (its consequence {p3} holds
        // in w4 and p2 may change freely under the permissive semantics).
        assert!(directly_accessible(w1, w4, &actions));
    }

    #[test]
    fn direct_accessibility_example2() {
        let worlds = [
            World::new("w1", ["p1"]),
            World::new("w2", ["p2", "p3"]),
            World::new("w3", ["p2", "p4"]),
        ];
        let actions = vec![Action::new(
            "a",
            ["p1"],
            [Literal::neg("p1"), Literal::pos("p2")],
        )];
        assert!(directly_accessible(&worlds[0], &worlds[1], &actions));
        assert!(directly_accessible(&worlds[0], &worlds[2], &actions));
        assert!(!directly_accessible(&worlds[1], &worlds[2], &actions));
    }

    #[test]
    fn fusion_example3() {
        let w = World::new("w1", ["p1"]);
        let w_prime = World::new("w2", ["p2", "p3"]);
        let actions = vec![
            Action::new("a1", ["p1"], [Literal::neg("p1"), Literal::pos("p2")]),
            Action::new("a2", ["p1"], [Literal::neg("p1"), Literal::pos("p3")]),
        ];
        let fused = maximal_action(&w, &w_prime, &actions).unwrap().unwrap();
        assert_eq!(fused.name, "a1+a2");
        assert_eq!(fused.pre, ["p1".to_string()].into_iter().collect());
        assert_eq!(
            fused.post,
            [Literal::neg("p1"), Literal::pos("p2"), Literal::pos("p3")]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn fusion_singleton_and_absent() {
        let (worlds, actions) = example1();
        let w2 = &worlds[1];
        let w1 = &worlds[0];
        let only = maximal_action(w2, w1, &actions).unwrap().unwrap();
        assert_eq!(only, actions[1]);
        // a3 has an empty precondition and its effect p3 holds in w3, so the
        // self-loop on w3 = {p1, p3} is labelled by a3 alone; a1's effect
        // !p1 rules a1 out of the fusion.
        let w3 = &worlds[2];
        let loop_action = maximal_action(w3, w3, &actions).unwrap().unwrap();
        assert_eq!(loop_action, actions[2]);
        // from w3 to w2 = {p2} only a1 contributes: its effect !p1 & p2 holds
        // in w2 while a3's p3 does not, so the fusion degenerates to a1
        let w2 = &worlds[1];
        let to_w2 = maximal_action(w3, w2, &actions).unwrap().unwrap();
        assert_eq!(to_w2.name, "a1");
    }

    #[test]
    fn fusion_example1_w2_to_w3() {
        let (worlds, actions) = example1();
        let fused = maximal_action(&worlds[1], &worlds[2], &actions)
            .unwrap()
            .unwrap();
        assert_eq!(fused.name, "a2+a3");
        assert_eq!(fused.pre, ["p2".to_string()].into_iter().collect());
        assert_eq!(
            fused.post,
            [Literal::neg("p2"), Literal::pos("p1"), Literal::pos("p3")]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn closure_example1() {
        let (worlds, actions) = example1();
        let from_w1 = closure(&[&worlds[0]], &actions, &worlds);
        let all: BTreeSet<String> = ["w1", "w2", "w3", "w4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(from_w1, all);
        assert!(closure(&[], &actions, &worlds).is_empty());
        let from_w3 = closure(&[&worlds[2]], &actions, &worlds);
        assert_eq!(from_w3, all);
    }

    #[test]
    fn build_example4() {
        let worlds = vec![
            World::new("w1", ["p1"]),
            World::new("w2", ["p2"]),
            World::new("w3", ["p2", "p3"]),
        ];
        let actions = vec![
            Action::new("a1", ["p1"], [Literal::neg("p1"), Literal::pos("p2")]),
            Action::new(
                "a2",
                ["p1"],
                [Literal::neg("p1"), Literal::pos("p2"), Literal::pos("p3")],
            ),
        ];
        let ts = TransitionSystem::build(worlds, actions, "w1", ArcMode::Derived, &[]).unwrap();
        let arcs: Vec<(String, String)> = ts
            .arcs()
            .map(|(f, t, _)| (f.to_string(), t.to_string()))
            .collect();
        assert_eq!(
            arcs,
            vec![
                ("w1".to_string(), "w2".to_string()),
                ("w1".to_string(), "w3".to_string())
            ]
        );
        assert_eq!(ts.label("w1", "w2").unwrap().name, "a1");
    }

    #[test]
    fn fig1_explicit_arcs_and_labels() {
        let ts = fig1_system();
        let arcs: Vec<(&str, &str, &str)> =
            ts.arcs().map(|(f, t, a)| (f, t, a.name.as_str())).collect();
        assert_eq!(
            arcs,
            vec![
                ("w1", "w2", "push"),
                ("w1", "w3", "go_home"),
                ("w2", "w1", "rescue"),
                ("w2", "w4", "go_home"),
            ]
        );
    }

    #[test]
    fn sequences_on_fig1() {
        let ts = fig1_system();
        let ids: Vec<String> = ["w2", "w1", "w3"].iter().map(|s| s.to_string()).collect();
        let seq = ts.validate_sequence(&ids).unwrap();
        assert_eq!(seq.size(), 2);
        let trace: Vec<&str> = ts
            .action_trace(&seq)
            .iter()
            .map(|a| a.name.as_str())
            .collect();
        assert_eq!(trace, vec!["rescue", "go_home"]);

        let single = ts.validate_sequence(&["w2".to_string()]).unwrap();
        assert_eq!(single.size(), 0);

        let bad: Vec<String> = ["w3", "w1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            ts.validate_sequence(&bad),
            Err(ModelError::BrokenTransition(0))
        );
        assert_eq!(ts.validate_sequence(&[]), Err(ModelError::EmptySequence));
        assert_eq!(
            ts.validate_sequence(&["w9".to_string()]),
            Err(ModelError::UnknownWorld("w9".to_string()))
        );
    }

    #[test]
    fn concat_and_occ() {
        let ts = fig1_system();
        let s = |ids: &[&str]| {
            ts.validate_sequence(&ids.iter().map(|s| s.to_string()).collect::<Vec<_>>())
                .unwrap()
        };
        let joined = ts.concat(&s(&["w2", "w1"]), &s(&["w2", "w1"])).unwrap();
        assert_eq!(joined, s(&["w2", "w1", "w2", "w1"]));
        assert_eq!(
            ts.concat(&s(&["w2"]), &s(&["w4"])).unwrap(),
            s(&["w2", "w4"])
        );
        // (w3, w2) is not an arc, so the junction breaks
        assert_eq!(
            ts.concat(&s(&["w1", "w3"]), &s(&["w2"])),
            Err(ModelError::BrokenTransition(1))
        );

        let seq = s(&["w2", "w1", "w2", "w1", "w2"]);
        assert_eq!(occ("w2", &seq), 3);
        assert_eq!(occ("w4", &seq), 0);
        assert_eq!(occ("w2", &s(&["w2", "w1", "w2"])), 2);
    }

    #[test]
    fn derived_fig1_is_strict_superset_of_explicit() {
        let explicit = fig1_system();
        let derived = TransitionSystem::build(
            explicit.worlds().to_vec(),
            explicit.actions().to_vec(),
            "w1",
            ArcMode::Derived,
            &[],
        )
        .unwrap();
        for (f, t, _) in explicit.arcs() {
            assert!(derived.has_arc(f, t));
        }
        assert!(derived.has_arc("w1", "w4"));
        assert!(derived.arcs().count() > explicit.arcs().count());
    }

    #[test]
    fn explicit_arc_validation_fails_for_unreachable_pair() {
        let (worlds, actions) = example1();
        let err = TransitionSystem::build(
            worlds,
            actions,
            "w1",
            ArcMode::Explicit,
            &[("w3".to_string(), "w1".to_string())],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidArc { .. }));
    }

    #[test]
    fn missing_initial() {
        let (worlds, actions) = example1();
        let err =
            TransitionSystem::build(worlds, actions, "w9", ArcMode::Derived, &[]).unwrap_err();
        assert_eq!(err, ModelError::MissingInitial("w9".to_string()));
    }
}
