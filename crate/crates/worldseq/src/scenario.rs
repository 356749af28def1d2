//! Scenario documents: parsing, validation, and the bundled example
//! scenarios.
//!
//! A scenario is a TOML document declaring a proposition universe, worlds
//! with exact decimal utilities, actions (negative consequence literals are
//! written `!p`), an initial world, and either `derived` or `explicit` arc
//! mode. Validation reports every error it finds, not just the first.

use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;

use crate::aggregate::UtilityFunction;
use crate::model::{Action, ArcMode, Literal, TransitionSystem, World};
use crate::scalar::Rational;

pub const FIG1: &str = include_str!("../scenarios/fig1.scenario");
pub const EXAMPLE2: &str = include_str!("../scenarios/example2.scenario");
pub const EXAMPLE3: &str = include_str!("../scenarios/example3.scenario");
pub const EXAMPLE4: &str = include_str!("../scenarios/example4.scenario");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown id '{id}' referenced by {context}")]
    UnknownId { id: String, context: String },
    #[error("duplicate {1} id '{0}'")]
    DuplicateId(String, &'static str),
    #[error("utility '{text}' of world '{world}': {reason}")]
    BadUtility {
        world: String,
        text: String,
        reason: String,
    },
    #[error("action '{action}' lists both '{prop}' and '!{prop}' in its consequences")]
    ContradictoryPost { action: String, prop: String },
    #[error("mode must be \"derived\" or \"explicit\", got '{0}'")]
    BadMode(String),
    #[error("explicit mode requires an [[arcs]] list")]
    MissingArcs,
    #[error("{0}")]
    Model(String),
}

/// Non-fatal findings surfaced alongside a valid scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioWarning {
    /// Two world ids with identical proposition sets.
    DuplicateWorldExtension(String, String),
    /// An action with an empty consequence set is satisfied by every world.
    EmptyPost(String),
}

impl std::fmt::Display for ScenarioWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioWarning::DuplicateWorldExtension(a, b) => {
                write!(f, "worlds '{a}' and '{b}' have identical proposition sets")
            }
            ScenarioWarning::EmptyPost(a) => {
                write!(f, "action '{a}' has an empty consequence set")
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    mode: String,
    initial: String,
    propositions: Vec<String>,
    worlds: Vec<RawWorld>,
    actions: Vec<RawAction>,
    #[serde(default)]
    arcs: Vec<RawArc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorld {
    id: String,
    #[serde(default)]
    props: Vec<String>,
    utility: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    name: String,
    #[serde(default)]
    pre: Vec<String>,
    #[serde(default)]
    post: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    from: String,
    to: String,
}

/// A validated scenario, ready to be turned into a transition system.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub propositions: Vec<String>,
    pub worlds: Vec<World>,
    pub actions: Vec<Action>,
    pub initial: String,
    pub mode: ArcMode,
    pub arcs: Vec<(String, String)>,
    pub utilities: UtilityFunction<Rational>,
    pub warnings: Vec<ScenarioWarning>,
}

impl Scenario {
    pub fn system(&self) -> Result<TransitionSystem, ScenarioError> {
        TransitionSystem::build(
            self.worlds.clone(),
            self.actions.clone(),
            &self.initial,
            self.mode,
            &self.arcs,
        )
        .map_err(|e| ScenarioError::Model(e.to_string()))
    }
}

/// Parses an exact decimal string such as `-0.25` into a rational.
pub fn parse_decimal(text: &str) -> Result<Rational, String> {
    let trimmed = text.trim();
    let (sign, digits) = match trimmed.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err("empty number".to_string());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(format!("'{trimmed}' is not a decimal number"));
    }
    if frac_part.len() > 12 {
        return Err("more than 12 decimal places".to_string());
    }
    let int_val: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| "integer part overflows")?
    };
    let denom = 10i64.pow(frac_part.len() as u32);
    let frac_val: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| "fraction part overflows")?
    };
    Ok(Rational::new(sign * (int_val * denom + frac_val), denom))
}

/// Parses and validates a scenario document, collecting every validation
/// error before giving up.
pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<ScenarioError>> {
    let raw: RawScenario =
        toml::from_str(text).map_err(|e| vec![ScenarioError::Syntax(e.to_string())])?;

    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let universe: BTreeSet<&str> = raw.propositions.iter().map(|s| s.as_str()).collect();
    if universe.len() != raw.propositions.len() {
        let mut seen = BTreeSet::new();
        for p in &raw.propositions {
            if !seen.insert(p.as_str()) {
                errors.push(ScenarioError::DuplicateId(p.clone(), "proposition"));
            }
        }
    }

    let mode = match raw.mode.as_str() {
        "derived" => ArcMode::Derived,
        "explicit" => ArcMode::Explicit,
        other => {
            errors.push(ScenarioError::BadMode(other.to_string()));
            ArcMode::Derived
        }
    };
    if mode == ArcMode::Explicit && raw.arcs.is_empty() {
        errors.push(ScenarioError::MissingArcs);
    }

    let one = Rational::new(1, 1);
    let mut worlds = Vec::new();
    let mut utilities = Vec::new();
    let mut world_ids = BTreeSet::new();
    for rw in &raw.worlds {
        if !world_ids.insert(rw.id.clone()) {
            errors.push(ScenarioError::DuplicateId(rw.id.clone(), "world"));
        }
        for p in &rw.props {
            if !universe.contains(p.as_str()) {
                errors.push(ScenarioError::UnknownId {
                    id: p.clone(),
                    context: format!("world '{}'", rw.id),
                });
            }
        }
        match parse_decimal(&rw.utility) {
            Ok(v) if v >= -one && v <= one => utilities.push((rw.id.clone(), v)),
            Ok(_) => errors.push(ScenarioError::BadUtility {
                world: rw.id.clone(),
                text: rw.utility.clone(),
                reason: "outside [-1, 1]".to_string(),
            }),
            Err(reason) => errors.push(ScenarioError::BadUtility {
                world: rw.id.clone(),
                text: rw.utility.clone(),
                reason,
            }),
        }
        worlds.push(World::new(rw.id.clone(), rw.props.clone()));
    }
    for (i, a) in worlds.iter().enumerate() {
        for b in &worlds[i + 1..] {
            if a.props == b.props {
                warnings.push(ScenarioWarning::DuplicateWorldExtension(
                    a.id.clone(),
                    b.id.clone(),
                ));
            }
        }
    }

    let mut actions = Vec::new();
    let mut action_names = BTreeSet::new();
    for ra in &raw.actions {
        if !action_names.insert(ra.name.clone()) {
            errors.push(ScenarioError::DuplicateId(ra.name.clone(), "action"));
        }
        for p in &ra.pre {
            if !universe.contains(p.as_str()) {
                errors.push(ScenarioError::UnknownId {
                    id: p.clone(),
                    context: format!("prerequisite of action '{}'", ra.name),
                });
            }
        }
        let mut post = BTreeSet::new();
        for raw_lit in &ra.post {
            let lit = Literal::parse(raw_lit);
            if !universe.contains(lit.prop.as_str()) {
                errors.push(ScenarioError::UnknownId {
                    id: lit.prop.clone(),
                    context: format!("consequence of action '{}'", ra.name),
                });
            }
            let opposite = Literal {
                prop: lit.prop.clone(),
                positive: !lit.positive,
            };
            if post.contains(&opposite) {
                errors.push(ScenarioError::ContradictoryPost {
                    action: ra.name.clone(),
                    prop: lit.prop.clone(),
                });
            }
            post.insert(lit);
        }
        if post.is_empty() {
            warnings.push(ScenarioWarning::EmptyPost(ra.name.clone()));
        }
        actions.push(Action {
            name: ra.name.clone(),
            pre: ra.pre.iter().cloned().collect(),
            post,
        });
    }

    if !world_ids.contains(&raw.initial) {
        errors.push(ScenarioError::UnknownId {
            id: raw.initial.clone(),
            context: "initial world".to_string(),
        });
    }
    let mut arcs = Vec::new();
    for arc in &raw.arcs {
        for end in [&arc.from, &arc.to] {
            if !world_ids.contains(end) {
                errors.push(ScenarioError::UnknownId {
                    id: end.clone(),
                    context: format!("arc ({}, {})", arc.from, arc.to),
                });
            }
        }
        arcs.push((arc.from.clone(), arc.to.clone()));
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    let utilities =
        UtilityFunction::new(utilities).map_err(|e| vec![ScenarioError::Model(e.to_string())])?;
    let scenario = Scenario {
        propositions: raw.propositions,
        worlds,
        actions,
        initial: raw.initial,
        mode,
        arcs,
        utilities,
        warnings,
    };
    // Surface arc/label problems (e.g. an explicit arc with no applicable
    // action) as parse-time validation failures too.
    scenario.system().map_err(|e| vec![e])?;
    Ok(scenario)
}

/// The push/rescue/go-home transition system of the bundled `fig1` scenario.
pub fn fig1_system() -> TransitionSystem {
    parse_scenario(FIG1)
        .expect("bundled fig1 scenario is valid")
        .system()
        .expect("bundled fig1 scenario builds")
}

/// The utility function of the bundled `fig1` scenario.
pub fn fig1_utilities() -> UtilityFunction<Rational> {
    parse_scenario(FIG1)
        .expect("bundled fig1 scenario is valid")
        .utilities
}
