//! Multi-turn sessions: encoder input concatenation, reference resolution
//! against prior turns, and slot-carryover extraction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linearize::{from_linear_with, linearize_unchecked, LinearSeq, ParseOpts};
use crate::tokenize::{detokenize, tokenize};
use crate::tree::{
    collect_slots, validate_decoupled_with, LabelKind, Node, SemanticTree, ValidateOpts,
};

/// Separator token inserted between concatenated turns.
pub const SEPARATOR_TOKEN: &str = "<sep>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Turn {
    pub role: Role,
    pub tokens: Vec<String>,
    /// Gold decoupled parse; only user turns carry one.
    pub gold: Option<SemanticTree>,
}

impl Turn {
    pub fn user(tokens: Vec<String>, gold: Option<SemanticTree>) -> Self {
        Turn { role: Role::User, tokens, gold }
    }

    pub fn assistant(tokens: Vec<String>) -> Self {
        Turn { role: Role::Assistant, tokens, gold: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub id: String,
    pub turns: Vec<Turn>,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("session {id}: {reason}")]
    Invalid { id: String, reason: String },
    #[error("turn index {index} out of range for session of {len} turns")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("turn {index} is not a user turn")]
    NotUserTurn { index: usize },
    #[error("unresolved reference at {path:?}: antecedent {antecedent:?} matches no prior slot value")]
    UnresolvedRef { path: Vec<usize>, antecedent: Vec<String> },
    #[error("session {id}: bad turn {turn}: {detail}")]
    BadTurn { id: String, turn: usize, detail: String },
}

impl Session {
    pub fn new(id: impl Into<String>, turns: Vec<Turn>) -> Result<Self, SessionError> {
        let session = Session { id: id.into(), turns };
        session.check()?;
        Ok(session)
    }

    pub fn check(&self) -> Result<(), SessionError> {
        if self.turns.is_empty() {
            return Err(SessionError::Invalid {
                id: self.id.clone(),
                reason: "no turns".into(),
            });
        }
        if !self.turns.iter().any(|t| t.role == Role::User) {
            return Err(SessionError::Invalid {
                id: self.id.clone(),
                reason: "no user turns".into(),
            });
        }
        for (i, turn) in self.turns.iter().enumerate() {
            if turn.role == Role::Assistant && turn.gold.is_some() {
                return Err(SessionError::Invalid {
                    id: self.id.clone(),
                    reason: format!("assistant turn {i} carries a gold parse"),
                });
            }
        }
        Ok(())
    }

    /// Indices of user turns that carry a gold parse, in order.
    pub fn gold_turn_indices(&self) -> Vec<usize> {
        self.turns
            .iter()
            .enumerate()
            .filter(|(_, t)| t.role == Role::User && t.gold.is_some())
            .map(|(i, _)| i)
            .collect()
    }

    /// Gold trees of user turns, in turn order.
    pub fn gold_trees(&self) -> Vec<&SemanticTree> {
        self.turns.iter().filter_map(|t| t.gold.as_ref()).collect()
    }
}

/// Provenance of one concatenated encoder-input token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenOrigin {
    Separator,
    Turn { turn: usize, index: usize },
}

/// Concatenated source sequence for one parsing step, with per-token
/// provenance so the copy mechanism can point back into prior turns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderInput {
    pub tokens: Vec<String>,
    pub origins: Vec<TokenOrigin>,
}

/// Concatenate the tokens of turns `0..=upto` with one separator between
/// consecutive included turns. `upto` must address a user turn. Assistant
/// turns are included unless `include_assistant` is false (they can carry
/// antecedents the user refers to).
pub fn build_encoder_input(
    session: &Session,
    upto: usize,
    separator: &str,
    include_assistant: bool,
) -> Result<EncoderInput, SessionError> {
    if upto >= session.turns.len() {
        return Err(SessionError::IndexOutOfRange { index: upto, len: session.turns.len() });
    }
    if session.turns[upto].role != Role::User {
        return Err(SessionError::NotUserTurn { index: upto });
    }
    let mut tokens = Vec::new();
    let mut origins = Vec::new();
    let mut first = true;
    for (t, turn) in session.turns.iter().enumerate().take(upto + 1) {
        if turn.role == Role::Assistant && !include_assistant {
            continue;
        }
        if !first {
            tokens.push(separator.to_string());
            origins.push(TokenOrigin::Separator);
        }
        first = false;
        for (i, tok) in turn.tokens.iter().enumerate() {
            tokens.push(tok.clone());
            origins.push(TokenOrigin::Turn { turn: t, index: i });
        }
    }
    Ok(EncoderInput { tokens, origins })
}

/// Where one reference was resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefResolution {
    /// Path of the reference node in the input tree.
    pub path: Vec<usize>,
    pub antecedent: Vec<String>,
    /// Index into `prior_gold` of the earliest tree whose slots contain the
    /// antecedent.
    pub turn: usize,
    /// Label of the matching slot in that tree.
    pub slot: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedParse {
    pub tree: SemanticTree,
    pub resolutions: Vec<RefResolution>,
}

/// Replace every reference node by its antecedent tokens, producing the
/// informationally complete parse. Each antecedent must occur as a slot value
/// in some prior gold tree; the earliest match is recorded. Matching is exact
/// token equality after lowercasing. Idempotent: the output has no reference
/// nodes left.
pub fn resolve_refs(
    tree: &SemanticTree,
    prior_gold: &[SemanticTree],
) -> Result<ResolvedParse, SessionError> {
    let mut resolved = tree.clone();
    let mut resolutions = Vec::new();
    resolve_walk(&mut resolved.root, &mut Vec::new(), prior_gold, &mut resolutions)?;
    Ok(ResolvedParse { tree: resolved, resolutions })
}

fn resolve_walk(
    node: &mut Node,
    path: &mut Vec<usize>,
    prior_gold: &[SemanticTree],
    resolutions: &mut Vec<RefResolution>,
) -> Result<(), SessionError> {
    if let Node::Labeled { label, children } = node {
        if label.kind == LabelKind::Slot && children.len() == 1 && children[0].is_ref() {
            let antecedent: Vec<String> = children[0]
                .children()
                .iter()
                .take_while(|c| !c.is_separator())
                .filter_map(Node::as_token)
                .map(str::to_string)
                .collect();
            path.push(0);
            let ref_path = path.clone();
            path.pop();
            let lowered: Vec<String> = antecedent.iter().map(|t| t.to_lowercase()).collect();
            let hit = prior_gold.iter().enumerate().find_map(|(turn, prior)| {
                collect_slots(prior)
                    .into_iter()
                    .find(|s| {
                        s.value.iter().map(|t| t.to_lowercase()).collect::<Vec<_>>() == lowered
                    })
                    .map(|s| (turn, s.name))
            });
            let Some((turn, slot)) = hit else {
                return Err(SessionError::UnresolvedRef { path: ref_path, antecedent });
            };
            resolutions.push(RefResolution {
                path: ref_path,
                antecedent: antecedent.clone(),
                turn,
                slot,
            });
            *children = antecedent.into_iter().map(Node::prior_token).collect();
            return Ok(());
        }
        for (i, child) in children.iter_mut().enumerate() {
            path.push(i);
            resolve_walk(child, path, prior_gold, resolutions)?;
            path.pop();
        }
    }
    Ok(())
}

/// How carryover distance is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Positions are indices into the gold-tree list (user turns only).
    #[default]
    UserTurns,
    /// Positions are absolute turn indices within the session.
    AllTurns,
}

/// One slot instance of a session, with the distance (in turns) back to the
/// first appearance of the same (label, value) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryoverFact {
    /// Index into the gold-tree list of the turn holding this slot.
    pub turn_index: usize,
    pub label: String,
    pub value: Vec<String>,
    pub distance: usize,
}

/// Extract carryover facts from the gold trees of one session (user turns
/// only, distances in list positions).
pub fn extract_carryover(trees: &[&SemanticTree]) -> Vec<CarryoverFact> {
    let positions: Vec<usize> = (0..trees.len()).collect();
    extract_carryover_at(trees, &positions)
}

/// Same, with explicit turn positions (used to count distances over all
/// turns, assistant turns included).
pub fn extract_carryover_at(trees: &[&SemanticTree], positions: &[usize]) -> Vec<CarryoverFact> {
    assert_eq!(trees.len(), positions.len(), "one position per tree");
    let per_turn_keys: Vec<Vec<(String, Vec<String>)>> = trees
        .iter()
        .map(|t| {
            collect_slots(t)
                .into_iter()
                .map(|s| (s.name, s.value.iter().map(|v| v.to_lowercase()).collect()))
                .collect()
        })
        .collect();
    let mut facts = Vec::new();
    for (t, tree) in trees.iter().enumerate() {
        for slot in collect_slots(tree) {
            let key = (
                slot.name.clone(),
                slot.value.iter().map(|v| v.to_lowercase()).collect::<Vec<_>>(),
            );
            let first = (0..=t)
                .find(|&u| per_turn_keys[u].contains(&key))
                .expect("the slot occurs at its own turn");
            facts.push(CarryoverFact {
                turn_index: t,
                label: slot.name,
                value: slot.value,
                distance: positions[t] - positions[first],
            });
        }
    }
    facts
}

/// JSON-lines session format: `{"id", "turns": [{"role", "text", "parse"?}]}`
/// with `parse` in the bracketed text format.
pub mod jsonl {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct TurnRepr {
        role: Role,
        text: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        parse: Option<String>,
    }

    #[derive(Serialize, Deserialize)]
    struct SessionRepr {
        id: String,
        turns: Vec<TurnRepr>,
    }

    pub fn to_json_line(session: &Session) -> String {
        let repr = SessionRepr {
            id: session.id.clone(),
            turns: session
                .turns
                .iter()
                .map(|t| TurnRepr {
                    role: t.role,
                    text: detokenize(&t.tokens),
                    parse: t.gold.as_ref().map(|g| linearize_unchecked(g).to_string()),
                })
                .collect(),
        };
        serde_json::to_string(&repr).expect("session serialization cannot fail")
    }

    /// Parse one JSONL line. Parses are read leniently (leaf intents allowed,
    /// as produced by the dialogue-state converter) and then validated.
    pub fn from_json_line(line: &str) -> Result<Session, SessionError> {
        let repr: SessionRepr = serde_json::from_str(line).map_err(|e| SessionError::Invalid {
            id: "?".into(),
            reason: format!("bad json: {e}"),
        })?;
        let mut turns = Vec::with_capacity(repr.turns.len());
        for (i, t) in repr.turns.into_iter().enumerate() {
            let gold = match t.parse {
                None => None,
                Some(text) => {
                    let opts = ParseOpts { allow_leaf_intent: true, ..ParseOpts::default() };
                    let tree = from_linear_with(&LinearSeq::parse_str(&text), opts).map_err(
                        |e| SessionError::BadTurn {
                            id: repr.id.clone(),
                            turn: i,
                            detail: e.to_string(),
                        },
                    )?;
                    let report =
                        validate_decoupled_with(&tree, ValidateOpts { allow_leaf_intent: true });
                    if !report.ok() {
                        return Err(SessionError::BadTurn {
                            id: repr.id.clone(),
                            turn: i,
                            detail: report.to_string(),
                        });
                    }
                    Some(tree)
                }
            };
            turns.push(Turn { role: t.role, tokens: tokenize(&t.text), gold });
        }
        Session::new(repr.id, turns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        events_implicit_ref, restaurant_south_modern_european, restaurant_south_moroccan,
        traffic_explicit_ref, weather_in_sf,
    };
    use crate::tokenize::tokenize;

    fn weather_session() -> Session {
        Session::new(
            "s0",
            vec![
                Turn::user(tokenize("Weather in San Francisco"), Some(weather_in_sf())),
                Turn::user(tokenize("Traffic there"), Some(traffic_explicit_ref())),
                Turn::user(tokenize("Any events going on"), Some(events_implicit_ref())),
            ],
        )
        .unwrap()
    }

    #[test]
    fn encoder_input_concatenates_with_separator() {
        let session = weather_session();
        let input = build_encoder_input(&session, 1, SEPARATOR_TOKEN, true).unwrap();
        assert_eq!(
            input.tokens,
            vec!["weather", "in", "san", "francisco", "<sep>", "traffic", "there"]
        );
        assert_eq!(input.origins[4], TokenOrigin::Separator);
        assert_eq!(input.origins[5], TokenOrigin::Turn { turn: 1, index: 0 });
    }

    #[test]
    fn single_turn_input_has_no_separator() {
        let session = weather_session();
        let input = build_encoder_input(&session, 0, SEPARATOR_TOKEN, true).unwrap();
        assert_eq!(input.tokens, session.turns[0].tokens);
    }

    #[test]
    fn encoder_input_bounds_and_roles() {
        let session = weather_session();
        assert!(matches!(
            build_encoder_input(&session, 9, SEPARATOR_TOKEN, true),
            Err(SessionError::IndexOutOfRange { .. })
        ));
        let with_assistant = Session::new(
            "s1",
            vec![
                Turn::user(tokenize("weather in boston"), None),
                Turn::assistant(tokenize("it is sunny")),
                Turn::user(tokenize("thanks"), None),
            ],
        )
        .unwrap();
        assert!(matches!(
            build_encoder_input(&with_assistant, 1, SEPARATOR_TOKEN, true),
            Err(SessionError::NotUserTurn { index: 1 })
        ));
        let skipped = build_encoder_input(&with_assistant, 2, SEPARATOR_TOKEN, false).unwrap();
        assert_eq!(skipped.tokens, vec!["weather", "in", "boston", "<sep>", "thanks"]);
    }

    #[test]
    fn assistant_turns_never_carry_gold() {
        let err = Session::new(
            "bad",
            vec![Turn {
                role: Role::Assistant,
                tokens: tokenize("hi"),
                gold: Some(weather_in_sf()),
            }],
        );
        assert!(err.is_err());
    }

    #[test]
    fn explicit_ref_resolves_to_prior_slot() {
        let resolved = resolve_refs(&traffic_explicit_ref(), &[weather_in_sf()]).unwrap();
        let expected = SemanticTree::decoupled(Node::intent(
            "GET_TRAFFIC",
            vec![Node::slot(
                "LOCATION",
                vec![Node::prior_token("san"), Node::prior_token("francisco")],
            )],
        ));
        assert_eq!(resolved.tree, expected);
        assert_eq!(resolved.resolutions.len(), 1);
        assert_eq!(resolved.resolutions[0].turn, 0);
        assert_eq!(resolved.resolutions[0].slot, "LOCATION");
    }

    #[test]
    fn implicit_ref_reports_first_appearance() {
        let priors = vec![weather_in_sf(), traffic_explicit_ref()];
        let resolved = resolve_refs(&events_implicit_ref(), &priors).unwrap();
        assert_eq!(resolved.resolutions[0].turn, 0);
        assert_eq!(
            crate::tree::collect_slots(&resolved.tree)[0].value,
            vec!["san", "francisco"]
        );
    }

    #[test]
    fn tree_without_refs_is_unchanged_and_resolution_is_idempotent() {
        let tree = weather_in_sf();
        let resolved = resolve_refs(&tree, &[]).unwrap();
        assert_eq!(resolved.tree, tree);
        assert!(resolved.resolutions.is_empty());
        let again = resolve_refs(&resolved.tree, &[]).unwrap();
        assert_eq!(again.tree, resolved.tree);
    }

    #[test]
    fn unresolved_ref_is_an_error() {
        let err = resolve_refs(&traffic_explicit_ref(), &[]).unwrap_err();
        assert!(matches!(err, SessionError::UnresolvedRef { .. }));
    }

    #[test]
    fn carryover_matches_the_restaurant_session() {
        let t0 = restaurant_south_moroccan();
        let t1 = restaurant_south_modern_european();
        let facts = extract_carryover(&[&t0, &t1]);
        let turn1: Vec<_> = facts
            .iter()
            .filter(|f| f.turn_index == 1)
            .map(|f| (f.label.as_str(), f.distance))
            .collect();
        assert_eq!(turn1, vec![("AREA", 1), ("FOOD", 0)]);
    }

    #[test]
    fn single_turn_distances_are_zero() {
        let t0 = restaurant_south_moroccan();
        let facts = extract_carryover(&[&t0]);
        assert!(facts.iter().all(|f| f.distance == 0));
        assert_eq!(facts.len(), 2);
    }

    #[test]
    fn carryover_distance_over_all_turns() {
        // Gold trees at absolute turn indices 0 and 2 (assistant in between).
        let t0 = restaurant_south_moroccan();
        let t1 = restaurant_south_modern_european();
        let facts = extract_carryover_at(&[&t0, &t1], &[0, 2]);
        let area = facts
            .iter()
            .find(|f| f.turn_index == 1 && f.label == "AREA")
            .unwrap();
        assert_eq!(area.distance, 2);
    }

    #[test]
    fn jsonl_round_trip_is_stable() {
        let session = weather_session();
        let line = jsonl::to_json_line(&session);
        let parsed = jsonl::from_json_line(&line).unwrap();
        assert_eq!(parsed, session);
        assert_eq!(jsonl::to_json_line(&parsed), line);
    }
}
