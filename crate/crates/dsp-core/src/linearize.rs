//! Bracketed serialization of semantic trees and canonicalization for
//! exact-match scoring.
//!
//! The textual format is the model's target-side representation and the
//! on-disk annotation format: space-separated tokens where every opening
//! bracket is fused with its label (`[IN:CREATE_REMINDER`), `]` closes a node,
//! and `;` separates antecedent from trigger tokens inside an explicit
//! reference. `[IN:CREATE_REMINDER [SL:PERSON_REMINDED me ] ]` is a complete
//! example.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::tree::{
    slot_value, validate_compositional_structure, validate_decoupled_with, Label, LabelKind, Node,
    SemanticTree, TokenSource, TreeForm, ValidateOpts, ValidationReport, REF_EXPLICIT,
    REF_IMPLICIT, REF_UNIFIED, ROOT_PLACEHOLDER, TRIGGER_SEPARATOR,
};

/// A linearized tree: ontology symbols and utterance tokens in target order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearSeq(Vec<String>);

impl LinearSeq {
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        LinearSeq(tokens)
    }

    /// Split a serialized line on whitespace.
    pub fn parse_str(text: &str) -> Self {
        LinearSeq(text.split_whitespace().map(str::to_string).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for LinearSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(" "))
    }
}

#[derive(Debug, Error)]
pub enum LinearizeError {
    #[error("invalid tree: {report}")]
    InvalidTree { report: ValidationReport },
}

/// Errors from [`from_linear`]. Positions are token indices into the input
/// sequence.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty sequence")]
    EmptySequence,
    #[error("unbalanced brackets at token {pos}")]
    UnbalancedBrackets { pos: usize },
    #[error("empty node closed at token {pos}")]
    EmptyNode { pos: usize },
    #[error("token {token:?} outside any node at position {pos}")]
    TokenOutsideNode { pos: usize, token: String },
    #[error("trailing tokens after the root closes, starting at token {pos}")]
    TrailingTokens { pos: usize },
    #[error("malformed opening symbol {symbol:?} at token {pos}")]
    BadLabel { pos: usize, symbol: String },
}

/// Depth-first serialization of a validated tree.
pub fn to_linear(tree: &SemanticTree) -> Result<LinearSeq, LinearizeError> {
    let report = match tree.form {
        TreeForm::Compositional => validate_compositional_structure(tree),
        // Leaf intents serialize fine and occur in converter output, so the
        // serializer accepts them; parsing is strict unless opted out.
        TreeForm::Decoupled => {
            validate_decoupled_with(tree, ValidateOpts { allow_leaf_intent: true })
        }
    };
    if !report.ok() {
        return Err(LinearizeError::InvalidTree { report });
    }
    Ok(linearize_unchecked(tree))
}

/// Serialization without validation. Also used for canonicalized trees, whose
/// unified reference labels and placeholder roots are comparison keys rather
/// than ontology labels.
pub fn linearize_unchecked(tree: &SemanticTree) -> LinearSeq {
    let mut out = Vec::new();
    emit(&tree.root, &mut out);
    LinearSeq(out)
}

fn emit(node: &Node, out: &mut Vec<String>) {
    match node {
        Node::Token { token, .. } => out.push(token.clone()),
        Node::Labeled { label, children } => {
            out.push(label.opening_symbol());
            for c in children {
                emit(c, out);
            }
            out.push("]".to_string());
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOpts {
    /// Accept `[IN:X ]` (intent with no children). Needed for trees converted
    /// from flat frames or dialogue states.
    pub allow_leaf_intent: bool,
    /// Form recorded on the parsed tree.
    pub form: TreeForm,
}

impl Default for ParseOpts {
    fn default() -> Self {
        ParseOpts { allow_leaf_intent: false, form: TreeForm::Decoupled }
    }
}

/// Parse a linearized sequence back into a tree (strict: empty nodes are
/// rejected, the form is inferred as decoupled).
pub fn from_linear(seq: &LinearSeq) -> Result<SemanticTree, ParseError> {
    from_linear_with(seq, ParseOpts::default())
}

pub fn from_linear_with(seq: &LinearSeq, opts: ParseOpts) -> Result<SemanticTree, ParseError> {
    struct Frame {
        label: Label,
        children: Vec<Node>,
        saw_separator: bool,
    }

    let mut stack: Vec<Frame> = Vec::new();
    let mut root: Option<Node> = None;

    for (pos, tok) in seq.tokens().iter().enumerate() {
        if root.is_some() {
            return Err(ParseError::TrailingTokens { pos });
        }
        if let Some(rest) = tok.strip_prefix('[') {
            let label = parse_label(rest).ok_or_else(|| ParseError::BadLabel {
                pos,
                symbol: tok.clone(),
            })?;
            stack.push(Frame { label, children: Vec::new(), saw_separator: false });
        } else if tok == "]" {
            let frame = stack.pop().ok_or(ParseError::UnbalancedBrackets { pos })?;
            if frame.children.is_empty()
                && !(opts.allow_leaf_intent && frame.label.kind == LabelKind::Intent)
            {
                return Err(ParseError::EmptyNode { pos });
            }
            let node = Node::Labeled { label: frame.label, children: frame.children };
            match stack.last_mut() {
                Some(parent) => parent.children.push(node),
                None => root = Some(node),
            }
        } else {
            let Some(frame) = stack.last_mut() else {
                return Err(ParseError::TokenOutsideNode { pos, token: tok.clone() });
            };
            let node = if tok == TRIGGER_SEPARATOR && frame.label.kind == LabelKind::Ref {
                frame.saw_separator = true;
                Node::separator()
            } else {
                let source = if frame.label.kind == LabelKind::Ref && !frame.saw_separator {
                    TokenSource::PriorTurn
                } else {
                    TokenSource::CurrentTurn
                };
                Node::Token { token: tok.clone(), source }
            };
            frame.children.push(node);
        }
    }

    if !stack.is_empty() {
        return Err(ParseError::UnbalancedBrackets { pos: seq.len() });
    }
    match root {
        Some(node) => Ok(SemanticTree { root: node, form: opts.form }),
        None => Err(ParseError::EmptySequence),
    }
}

fn parse_label(symbol: &str) -> Option<Label> {
    let (kind, name) = if let Some(name) = symbol.strip_prefix("IN:") {
        (LabelKind::Intent, name)
    } else if let Some(name) = symbol.strip_prefix("SL:") {
        (LabelKind::Slot, name)
    } else if let Some(name) = symbol.strip_prefix("REF:") {
        if name != REF_EXPLICIT && name != REF_IMPLICIT {
            return None;
        }
        (LabelKind::Ref, name)
    } else {
        return None;
    };
    let label = Label { kind, name: name.to_string() };
    label.name_is_wellformed().then_some(label)
}

/// Canonicalization switches for exact-match comparison.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CanonPolicy {
    /// Collapse `REF:EXPLICIT`/`REF:IMPLICIT` into one unified label and drop
    /// the trigger segment.
    pub collapse_ref_kinds: bool,
    /// Replace the root intent name with a fixed placeholder, so scoring
    /// ignores the top-level intent.
    pub strip_root_intent: bool,
    /// Sort sibling slots of every intent by (name, value) — set semantics
    /// for dialogue-state style data.
    pub sort_sibling_slots: bool,
}

impl CanonPolicy {
    /// Policy for utterance-level datasets: annotation order is meaningful.
    pub fn utterance() -> Self {
        CanonPolicy::default()
    }

    /// Policy for dialogue-state style data, where the state is a set.
    pub fn dialogue_state() -> Self {
        CanonPolicy { sort_sibling_slots: true, ..CanonPolicy::default() }
    }
}

/// Apply a canonicalization policy. Flags are applied in order: collapse
/// reference kinds, strip the root intent, sort sibling slots. Token order
/// inside slots is never altered. Idempotent for every policy.
pub fn canonicalize(tree: &SemanticTree, policy: CanonPolicy) -> SemanticTree {
    let mut out = tree.clone();
    if policy.collapse_ref_kinds {
        collapse_refs(&mut out.root);
    }
    if policy.strip_root_intent {
        if let Node::Labeled { label, .. } = &mut out.root {
            if label.kind == LabelKind::Intent {
                label.name = ROOT_PLACEHOLDER.to_string();
            }
        }
    }
    if policy.sort_sibling_slots {
        sort_slots(&mut out.root);
    }
    out
}

/// The exact-match key: single-space-joined canonical serialization.
pub fn canonical_key(tree: &SemanticTree, policy: CanonPolicy) -> String {
    linearize_unchecked(&canonicalize(tree, policy)).to_string()
}

fn collapse_refs(node: &mut Node) {
    if let Node::Labeled { label, children } = node {
        if label.kind == LabelKind::Ref {
            label.name = REF_UNIFIED.to_string();
            if let Some(sep) = children.iter().position(Node::is_separator) {
                children.truncate(sep);
            }
        }
        for c in children {
            collapse_refs(c);
        }
    }
}

fn sort_slots(node: &mut Node) {
    if let Node::Labeled { label, children } = node {
        for c in children.iter_mut() {
            sort_slots(c);
        }
        if label.kind == LabelKind::Intent {
            // Reorder slot children among themselves; any other children keep
            // their positions.
            let slot_idx: Vec<usize> = children
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_slot())
                .map(|(i, _)| i)
                .collect();
            let mut slots: Vec<Node> = slot_idx.iter().rev().map(|&i| children.remove(i)).collect();
            slots.reverse();
            slots.sort_by_cached_key(|s| {
                (s.label().unwrap().name.clone(), slot_value(s))
            });
            for (&i, slot) in slot_idx.iter().zip(slots) {
                children.insert(i, slot);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{reminder_decoupled, traffic_explicit_ref, weather_in_sf};
    use crate::tree::validate_decoupled;

    const REMINDER_LINEAR: &str = "[IN:CREATE_REMINDER [SL:PERSON_REMINDED me ] \
         [SL:TODO [IN:CREATE_CALL [SL:METHOD call ] [SL:CONTACT john ] ] ] ]";

    #[test]
    fn reminder_linearization_matches_target_sequence() {
        let seq = to_linear(&reminder_decoupled()).unwrap();
        assert_eq!(seq.to_string(), REMINDER_LINEAR);
    }

    #[test]
    fn minimal_tree_linearization() {
        let tree = SemanticTree::decoupled(Node::intent(
            "X",
            vec![Node::slot("Y", vec![Node::token("a")])],
        ));
        assert_eq!(to_linear(&tree).unwrap().to_string(), "[IN:X [SL:Y a ] ]");
    }

    #[test]
    fn from_linear_parses_the_reminder_sequence() {
        let parsed = from_linear(&LinearSeq::parse_str(REMINDER_LINEAR)).unwrap();
        assert_eq!(parsed, reminder_decoupled());
    }

    #[test]
    fn explicit_ref_round_trips_with_sources() {
        let tree = traffic_explicit_ref();
        let seq = to_linear(&tree).unwrap();
        assert_eq!(
            seq.to_string(),
            "[IN:GET_TRAFFIC [SL:LOCATION [REF:EXPLICIT san francisco ; there ] ] ]"
        );
        assert_eq!(from_linear(&seq).unwrap(), tree);
    }

    #[test]
    fn empty_node_is_rejected() {
        let err = from_linear(&LinearSeq::parse_str("[IN:X ]")).unwrap_err();
        assert_eq!(err, ParseError::EmptyNode { pos: 1 });
        let opts = ParseOpts { allow_leaf_intent: true, ..ParseOpts::default() };
        let tree = from_linear_with(&LinearSeq::parse_str("[IN:X ]"), opts).unwrap();
        assert_eq!(tree.root_intent(), Some("X"));
    }

    #[test]
    fn unbalanced_brackets_are_rejected() {
        let err = from_linear(&LinearSeq::parse_str("[IN:X [SL:Y a ]")).unwrap_err();
        assert_eq!(err, ParseError::UnbalancedBrackets { pos: 4 });
        let err = from_linear(&LinearSeq::parse_str("[IN:X [SL:Y a ] ] ]")).unwrap_err();
        assert_eq!(err, ParseError::TrailingTokens { pos: 5 });
    }

    #[test]
    fn token_outside_node_and_trailing_tokens() {
        let err = from_linear(&LinearSeq::parse_str("a [IN:X [SL:Y a ] ]")).unwrap_err();
        assert_eq!(err, ParseError::TokenOutsideNode { pos: 0, token: "a".into() });
        let err = from_linear(&LinearSeq::parse_str("[IN:X [SL:Y a ] ] b")).unwrap_err();
        assert_eq!(err, ParseError::TrailingTokens { pos: 5 });
    }

    #[test]
    fn bad_labels_are_rejected() {
        for s in ["[IN: x ]", "[REF:OTHER a ]", "[FOO:X a ]"] {
            assert!(matches!(
                from_linear(&LinearSeq::parse_str(s)),
                Err(ParseError::BadLabel { pos: 0, .. })
            ));
        }
        assert_eq!(
            from_linear(&LinearSeq::parse_str("")).unwrap_err(),
            ParseError::EmptySequence
        );
    }

    #[test]
    fn collapse_ref_kinds_drops_trigger_segment() {
        let canon = canonicalize(
            &traffic_explicit_ref(),
            CanonPolicy { collapse_ref_kinds: true, ..CanonPolicy::default() },
        );
        assert_eq!(
            linearize_unchecked(&canon).to_string(),
            "[IN:GET_TRAFFIC [SL:LOCATION [REF:ANY san francisco ] ] ]"
        );
    }

    #[test]
    fn all_false_policy_is_identity() {
        let tree = traffic_explicit_ref();
        assert_eq!(canonicalize(&tree, CanonPolicy::default()), tree);
    }

    #[test]
    fn strip_root_intent_uses_placeholder() {
        let canon = canonicalize(
            &weather_in_sf(),
            CanonPolicy { strip_root_intent: true, ..CanonPolicy::default() },
        );
        assert_eq!(canon.root_intent(), Some(ROOT_PLACEHOLDER));
    }

    #[test]
    fn sort_sibling_slots_normalizes_order() {
        let a = SemanticTree::decoupled(Node::intent(
            "FIND_RESTAURANT",
            vec![
                Node::slot("FOOD", vec![Node::token("moroccan")]),
                Node::slot("AREA", vec![Node::token("south")]),
            ],
        ));
        let b = SemanticTree::decoupled(Node::intent(
            "FIND_RESTAURANT",
            vec![
                Node::slot("AREA", vec![Node::token("south")]),
                Node::slot("FOOD", vec![Node::token("moroccan")]),
            ],
        ));
        let policy = CanonPolicy { sort_sibling_slots: true, ..CanonPolicy::default() };
        assert_eq!(canonicalize(&a, policy), canonicalize(&b, policy));
        assert_eq!(canonical_key(&a, policy), canonical_key(&b, policy));
    }

    #[test]
    fn canonicalize_is_idempotent_for_every_policy() {
        let tree = traffic_explicit_ref();
        for bits in 0..8u8 {
            let policy = CanonPolicy {
                collapse_ref_kinds: bits & 1 != 0,
                strip_root_intent: bits & 2 != 0,
                sort_sibling_slots: bits & 4 != 0,
            };
            let once = canonicalize(&tree, policy);
            assert_eq!(canonicalize(&once, policy), once, "policy {policy:?}");
        }
    }

    #[test]
    fn parsed_trees_validate() {
        let parsed = from_linear(&LinearSeq::parse_str(REMINDER_LINEAR)).unwrap();
        assert!(validate_decoupled(&parsed).ok());
    }
}
