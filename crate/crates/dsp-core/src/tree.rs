//! Semantic tree data model and structural validators.
//!
//! A [`SemanticTree`] is an ordered labeled tree: internal nodes carry intent,
//! slot or reference labels, leaves are utterance tokens. Two forms exist. In
//! the compositional form the in-order traversal of the leaves reconstructs
//! the utterance. The decoupled form keeps only the tokens inside leaf slots,
//! freeing the tree from utterance order and admitting reference (`REF`) nodes
//! that point at content from earlier turns.
//!
//! Validation never fails with an error: it returns a [`ValidationReport`]
//! listing rule violations, each addressed by a child-index path from the
//! root.

use std::fmt;

/// Reference label name for co-references triggered by a surface word.
pub const REF_EXPLICIT: &str = "EXPLICIT";
/// Reference label name for slot carryover without a trigger word.
pub const REF_IMPLICIT: &str = "IMPLICIT";
/// Unified reference name produced by canonicalization when the
/// explicit/implicit distinction is collapsed.
pub const REF_UNIFIED: &str = "ANY";
/// Root intent placeholder used when canonicalization strips the top-level
/// intent.
pub const ROOT_PLACEHOLDER: &str = "__ROOT__";
/// The literal separator between antecedent and trigger tokens inside an
/// explicit reference.
pub const TRIGGER_SEPARATOR: &str = ";";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    Intent,
    Slot,
    Ref,
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKind::Intent => write!(f, "IN"),
            LabelKind::Slot => write!(f, "SL"),
            LabelKind::Ref => write!(f, "REF"),
        }
    }
}

/// Label of an internal tree node, e.g. `IN:CREATE_REMINDER` or
/// `SL:PERSON_REMINDED`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Label {
    pub kind: LabelKind,
    pub name: String,
}

impl Label {
    pub fn intent(name: impl Into<String>) -> Self {
        Label { kind: LabelKind::Intent, name: name.into() }
    }

    pub fn slot(name: impl Into<String>) -> Self {
        Label { kind: LabelKind::Slot, name: name.into() }
    }

    pub fn reference(name: impl Into<String>) -> Self {
        Label { kind: LabelKind::Ref, name: name.into() }
    }

    /// The fused opening bracket symbol, e.g. `[IN:CREATE_REMINDER`.
    pub fn opening_symbol(&self) -> String {
        format!("[{}:{}", self.kind, self.name)
    }

    /// Names must be nonempty and free of whitespace and brackets so the
    /// bracketed serialization stays unambiguous.
    pub fn name_is_wellformed(&self) -> bool {
        !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| !c.is_whitespace() && c != '[' && c != ']')
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.name)
    }
}

/// Where a token leaf came from, relative to the turn being parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenSource {
    CurrentTurn,
    PriorTurn,
    /// The literal `;` separating antecedent tokens from trigger tokens
    /// inside an explicit reference.
    TriggerSeparator,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Labeled { label: Label, children: Vec<Node> },
    Token { token: String, source: TokenSource },
}

impl Node {
    pub fn intent(name: impl Into<String>, children: Vec<Node>) -> Self {
        Node::Labeled { label: Label::intent(name), children }
    }

    pub fn slot(name: impl Into<String>, children: Vec<Node>) -> Self {
        Node::Labeled { label: Label::slot(name), children }
    }

    pub fn explicit_ref(children: Vec<Node>) -> Self {
        Node::Labeled { label: Label::reference(REF_EXPLICIT), children }
    }

    pub fn implicit_ref(children: Vec<Node>) -> Self {
        Node::Labeled { label: Label::reference(REF_IMPLICIT), children }
    }

    pub fn token(token: impl Into<String>) -> Self {
        Node::Token { token: token.into(), source: TokenSource::CurrentTurn }
    }

    pub fn prior_token(token: impl Into<String>) -> Self {
        Node::Token { token: token.into(), source: TokenSource::PriorTurn }
    }

    pub fn separator() -> Self {
        Node::Token {
            token: TRIGGER_SEPARATOR.into(),
            source: TokenSource::TriggerSeparator,
        }
    }

    pub fn label(&self) -> Option<&Label> {
        match self {
            Node::Labeled { label, .. } => Some(label),
            Node::Token { .. } => None,
        }
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::Labeled { children, .. } => children,
            Node::Token { .. } => &[],
        }
    }

    pub fn children_mut(&mut self) -> &mut Vec<Node> {
        match self {
            Node::Labeled { children, .. } => children,
            Node::Token { .. } => panic!("token nodes have no children"),
        }
    }

    pub fn as_token(&self) -> Option<&str> {
        match self {
            Node::Token { token, .. } => Some(token),
            Node::Labeled { .. } => None,
        }
    }

    pub fn is_kind(&self, kind: LabelKind) -> bool {
        self.label().map(|l| l.kind == kind).unwrap_or(false)
    }

    pub fn is_intent(&self) -> bool {
        self.is_kind(LabelKind::Intent)
    }

    pub fn is_slot(&self) -> bool {
        self.is_kind(LabelKind::Slot)
    }

    pub fn is_ref(&self) -> bool {
        self.is_kind(LabelKind::Ref)
    }

    pub fn is_token(&self) -> bool {
        matches!(self, Node::Token { .. })
    }

    pub fn is_separator(&self) -> bool {
        matches!(
            self,
            Node::Token { source: TokenSource::TriggerSeparator, .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeForm {
    Compositional,
    Decoupled,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemanticTree {
    pub root: Node,
    pub form: TreeForm,
}

impl SemanticTree {
    pub fn compositional(root: Node) -> Self {
        SemanticTree { root, form: TreeForm::Compositional }
    }

    pub fn decoupled(root: Node) -> Self {
        SemanticTree { root, form: TreeForm::Decoupled }
    }

    /// Name of the top-level intent, if the root is an intent node.
    pub fn root_intent(&self) -> Option<&str> {
        match self.root.label() {
            Some(l) if l.kind == LabelKind::Intent => Some(&l.name),
            _ => None,
        }
    }

    /// In-order token leaves, excluding trigger separators. For a valid
    /// compositional tree this is the utterance.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        collect_leaves(&self.root, &mut out);
        out
    }

    pub fn leaves_owned(&self) -> Vec<String> {
        self.leaves().into_iter().map(str::to_string).collect()
    }
}

impl fmt::Display for SemanticTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::linearize::linearize_unchecked(self))
    }
}

fn collect_leaves<'a>(node: &'a Node, out: &mut Vec<&'a str>) {
    match node {
        Node::Token { token, source } => {
            if *source != TokenSource::TriggerSeparator {
                out.push(token);
            }
        }
        Node::Labeled { children, .. } => {
            for c in children {
                collect_leaves(c, out);
            }
        }
    }
}

/// Stable rule identifiers used in [`Violation`]s.
pub mod rules {
    pub const WRONG_FORM: &str = "wrong-form";
    pub const ROOT_NOT_INTENT: &str = "root-not-intent";
    pub const LABEL_NAME: &str = "label-name";
    pub const EMPTY_NODE: &str = "empty-node";
    pub const LEAF_UTTERANCE_MISMATCH: &str = "leaf-utterance-mismatch";
    pub const REF_IN_COMPOSITIONAL: &str = "ref-in-compositional";
    pub const INTENT_UNDER_INTENT: &str = "intent-under-intent";
    pub const SLOT_UNDER_SLOT: &str = "slot-under-slot";
    pub const TOKEN_OUTSIDE_SLOT: &str = "token-outside-slot";
    pub const REF_OUTSIDE_SLOT: &str = "ref-outside-slot";
    pub const MIXED_SLOT_CHILDREN: &str = "mixed-slot-children";
    pub const MULTIPLE_NESTED_INTENTS: &str = "multiple-nested-intents";
    pub const SEPARATOR_OUTSIDE_REF: &str = "separator-outside-ref";
    pub const REF_KIND: &str = "ref-kind";
    pub const LABELED_UNDER_REF: &str = "labeled-under-ref";
    pub const IMPLICIT_REF_TRIGGER: &str = "implicit-ref-trigger";
    pub const MULTIPLE_SEPARATORS: &str = "multiple-separators";
    pub const EMPTY_ANTECEDENT: &str = "empty-antecedent";
    pub const EMPTY_TRIGGER: &str = "empty-trigger";
}

/// One broken rule at one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Child-index path from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: &[usize], rule: &'static str, message: impl Into<String>) {
        self.violations.push(Violation { path: path.to_vec(), rule, message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        let shown = self.violations.iter().take(3);
        let mut first = true;
        for v in shown {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "{} at {:?}: {}", v.rule, v.path, v.message)?;
        }
        if self.violations.len() > 3 {
            write!(f, "; (+{} more)", self.violations.len() - 3)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOpts {
    /// Permit intent nodes with zero children. Set by the flat-frame and
    /// dialogue-state converters, whose inputs can legitimately carry an
    /// intent and no slots.
    pub allow_leaf_intent: bool,
}

/// Validate a compositional tree against its utterance: structural rules plus
/// the in-order leaf reconstruction constraint.
pub fn validate_compositional(tree: &SemanticTree, utterance: &[String]) -> ValidationReport {
    let mut report = validate_compositional_structure(tree);
    let leaves = tree.leaves();
    if leaves.len() != utterance.len() || leaves.iter().zip(utterance).any(|(a, b)| *a != b) {
        let at = leaves
            .iter()
            .zip(utterance.iter())
            .position(|(a, b)| *a != b)
            .unwrap_or_else(|| leaves.len().min(utterance.len()));
        report.push(
            &[],
            rules::LEAF_UTTERANCE_MISMATCH,
            format!(
                "leaves {:?} do not reconstruct utterance {:?} (first difference at token {})",
                leaves, utterance, at
            ),
        );
    }
    report
}

/// Structural rules of the compositional form, without an utterance to check
/// the leaves against.
pub fn validate_compositional_structure(tree: &SemanticTree) -> ValidationReport {
    let mut report = ValidationReport::default();
    if tree.form != TreeForm::Compositional {
        report.push(&[], rules::WRONG_FORM, "tree is not marked compositional");
    }
    if !tree.root.is_intent() {
        report.push(&[], rules::ROOT_NOT_INTENT, "root must be an intent");
    }
    walk_compositional(&tree.root, &mut Vec::new(), &mut report);
    report
}

fn check_label(node: &Node, path: &[usize], report: &mut ValidationReport) {
    if let Some(label) = node.label() {
        if !label.name_is_wellformed() {
            report.push(path, rules::LABEL_NAME, format!("malformed label name {:?}", label.name));
        }
        if label.kind == LabelKind::Ref
            && label.name != REF_EXPLICIT
            && label.name != REF_IMPLICIT
        {
            report.push(
                path,
                rules::REF_KIND,
                format!("reference name must be {} or {}, got {:?}", REF_EXPLICIT, REF_IMPLICIT, label.name),
            );
        }
    }
}

fn walk_compositional(node: &Node, path: &mut Vec<usize>, report: &mut ValidationReport) {
    let Node::Labeled { label, children } = node else {
        if node.is_separator() {
            report.push(path, rules::SEPARATOR_OUTSIDE_REF, "trigger separator in compositional tree");
        }
        return;
    };
    check_label(node, path, report);
    if label.kind == LabelKind::Ref {
        report.push(path, rules::REF_IN_COMPOSITIONAL, "reference node in compositional tree");
    }
    if children.is_empty() {
        report.push(path, rules::EMPTY_NODE, format!("{} has no children", label));
    }
    match label.kind {
        LabelKind::Intent => {
            for (i, child) in children.iter().enumerate() {
                if child.is_intent() {
                    path.push(i);
                    report.push(path, rules::INTENT_UNDER_INTENT, "intent directly under intent");
                    path.pop();
                }
            }
        }
        LabelKind::Slot => {
            let intents = children.iter().filter(|c| c.is_intent()).count();
            if intents > 1 {
                report.push(
                    path,
                    rules::MULTIPLE_NESTED_INTENTS,
                    format!("slot {} holds {} nested intents (at most one allowed)", label.name, intents),
                );
            }
            for (i, child) in children.iter().enumerate() {
                if child.is_slot() {
                    path.push(i);
                    report.push(path, rules::SLOT_UNDER_SLOT, "slot directly under slot");
                    path.pop();
                }
            }
        }
        LabelKind::Ref => {}
    }
    for (i, child) in children.iter().enumerate() {
        path.push(i);
        walk_compositional(child, path, report);
        path.pop();
    }
}

/// Validate a decoupled tree with default (strict) options.
pub fn validate_decoupled(tree: &SemanticTree) -> ValidationReport {
    validate_decoupled_with(tree, ValidateOpts::default())
}

pub fn validate_decoupled_with(tree: &SemanticTree, opts: ValidateOpts) -> ValidationReport {
    let mut report = ValidationReport::default();
    if tree.form != TreeForm::Decoupled {
        report.push(&[], rules::WRONG_FORM, "tree is not marked decoupled");
    }
    if !tree.root.is_intent() {
        report.push(&[], rules::ROOT_NOT_INTENT, "root must be an intent");
    }
    walk_decoupled(&tree.root, &mut Vec::new(), opts, &mut report);
    report
}

fn walk_decoupled(node: &Node, path: &mut Vec<usize>, opts: ValidateOpts, report: &mut ValidationReport) {
    let Node::Labeled { label, children } = node else {
        return;
    };
    check_label(node, path, report);
    match label.kind {
        LabelKind::Intent => {
            if children.is_empty() && !opts.allow_leaf_intent {
                report.push(path, rules::EMPTY_NODE, format!("{} has no children", label));
            }
            for (i, child) in children.iter().enumerate() {
                if !child.is_slot() {
                    path.push(i);
                    let (rule, msg) = match child {
                        Node::Token { .. } => (rules::TOKEN_OUTSIDE_SLOT, "token directly under intent"),
                        n if n.is_intent() => (rules::INTENT_UNDER_INTENT, "intent directly under intent"),
                        _ => (rules::REF_OUTSIDE_SLOT, "reference not wrapped in a slot"),
                    };
                    report.push(path, rule, msg);
                    path.pop();
                }
            }
        }
        LabelKind::Slot => {
            if children.is_empty() {
                report.push(path, rules::EMPTY_NODE, format!("{} has no children", label));
            }
            let tokens = children.iter().filter(|c| c.is_token()).count();
            let intents = children.iter().filter(|c| c.is_intent()).count();
            let refs = children.iter().filter(|c| c.is_ref()).count();
            let slots = children.len() - tokens - intents - refs;
            if intents > 1 {
                report.push(
                    path,
                    rules::MULTIPLE_NESTED_INTENTS,
                    format!("slot {} holds {} nested intents (at most one allowed)", label.name, intents),
                );
            }
            let pure_tokens = tokens == children.len();
            let single_intent = intents == 1 && children.len() == 1;
            let single_ref = refs == 1 && children.len() == 1;
            if !children.is_empty() && !pure_tokens && !single_intent && !single_ref && intents <= 1 {
                report.push(
                    path,
                    rules::MIXED_SLOT_CHILDREN,
                    format!(
                        "slot {} must hold only tokens, one intent, or one reference ({} tokens, {} intents, {} refs, {} slots)",
                        label.name, tokens, intents, refs, slots
                    ),
                );
            }
            if pure_tokens {
                for (i, child) in children.iter().enumerate() {
                    if child.is_separator() {
                        path.push(i);
                        report.push(path, rules::SEPARATOR_OUTSIDE_REF, "trigger separator outside a reference");
                        path.pop();
                    }
                }
            }
        }
        LabelKind::Ref => {
            if children.is_empty() {
                report.push(path, rules::EMPTY_NODE, format!("{} has no children", label));
            }
            for (i, child) in children.iter().enumerate() {
                if !child.is_token() {
                    path.push(i);
                    report.push(path, rules::LABELED_UNDER_REF, "reference children must be tokens");
                    path.pop();
                }
            }
            let separators: Vec<usize> = children
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_separator())
                .map(|(i, _)| i)
                .collect();
            if label.name == REF_IMPLICIT && !separators.is_empty() {
                report.push(path, rules::IMPLICIT_REF_TRIGGER, "implicit reference carries a trigger segment");
            }
            if label.name == REF_EXPLICIT {
                if separators.len() > 1 {
                    report.push(path, rules::MULTIPLE_SEPARATORS, "more than one trigger separator");
                } else if let Some(&at) = separators.first() {
                    if at == 0 {
                        report.push(path, rules::EMPTY_ANTECEDENT, "no antecedent tokens before the separator");
                    }
                    if at + 1 == children.len() {
                        report.push(path, rules::EMPTY_TRIGGER, "no trigger tokens after the separator");
                    }
                }
            }
        }
    }
    for (i, child) in children.iter().enumerate() {
        path.push(i);
        walk_decoupled(child, path, opts, report);
        path.pop();
    }
}

/// One slot instance found in a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotEntry {
    /// Child-index path from the root to the slot node.
    pub path: Vec<usize>,
    pub name: String,
    /// Token leaves of the slot subtree, excluding trigger segments.
    pub value: Vec<String>,
}

/// All slot nodes of the tree in depth-first order, each with its
/// trigger-excluded token value.
pub fn collect_slots(tree: &SemanticTree) -> Vec<SlotEntry> {
    let mut out = Vec::new();
    collect_slots_walk(&tree.root, &mut Vec::new(), &mut out);
    out
}

fn collect_slots_walk(node: &Node, path: &mut Vec<usize>, out: &mut Vec<SlotEntry>) {
    if node.is_slot() {
        let mut value = Vec::new();
        slot_value_walk(node, &mut value);
        out.push(SlotEntry {
            path: path.clone(),
            name: node.label().unwrap().name.clone(),
            value,
        });
    }
    for (i, child) in node.children().iter().enumerate() {
        path.push(i);
        collect_slots_walk(child, path, out);
        path.pop();
    }
}

/// Token value of a subtree with trigger segments excluded: inside a
/// reference only the tokens before the separator count.
pub fn slot_value(node: &Node) -> Vec<String> {
    let mut out = Vec::new();
    slot_value_walk(node, &mut out);
    out
}

fn slot_value_walk(node: &Node, out: &mut Vec<String>) {
    match node {
        Node::Token { token, source } => {
            if *source != TokenSource::TriggerSeparator {
                out.push(token.clone());
            }
        }
        Node::Labeled { label, children } => {
            if label.kind == LabelKind::Ref {
                for c in children {
                    if c.is_separator() {
                        break;
                    }
                    slot_value_walk(c, out);
                }
            } else {
                for c in children {
                    slot_value_walk(c, out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        events_implicit_ref, reminder_compositional, reminder_decoupled, traffic_explicit_ref,
    };
    use crate::tokenize::tokenize;

    #[test]
    fn compositional_reconstructs_utterance() {
        let tree = reminder_compositional();
        let utt = tokenize("Please remind me to call John");
        assert!(validate_compositional(&tree, &utt).ok());
    }

    #[test]
    fn compositional_prefix_mismatch() {
        let tree = reminder_compositional();
        let utt = tokenize("Please remind me");
        let report = validate_compositional(&tree, &utt);
        assert!(!report.ok());
        assert!(report.violations.iter().any(|v| v.rule == rules::LEAF_UTTERANCE_MISMATCH));
    }

    #[test]
    fn decoupled_reminder_is_valid() {
        assert!(validate_decoupled(&reminder_decoupled()).ok());
    }

    #[test]
    fn token_under_intent_is_flagged() {
        let tree = SemanticTree::decoupled(Node::intent(
            "CREATE_REMINDER",
            vec![Node::token("please"), Node::slot("PERSON_REMINDED", vec![Node::token("me")])],
        ));
        let report = validate_decoupled(&tree);
        assert!(report.violations.iter().any(|v| v.rule == rules::TOKEN_OUTSIDE_SLOT && v.path == vec![0]));
    }

    #[test]
    fn implicit_ref_is_valid_and_trigger_is_rejected() {
        assert!(validate_decoupled(&events_implicit_ref()).ok());
        let bad = SemanticTree::decoupled(Node::intent(
            "GET_EVENT",
            vec![Node::slot(
                "LOCATION",
                vec![Node::implicit_ref(vec![
                    Node::prior_token("san"),
                    Node::separator(),
                    Node::token("there"),
                ])],
            )],
        ));
        let report = validate_decoupled(&bad);
        assert!(report.violations.iter().any(|v| v.rule == rules::IMPLICIT_REF_TRIGGER));
    }

    #[test]
    fn explicit_ref_is_valid() {
        assert!(validate_decoupled(&traffic_explicit_ref()).ok());
    }

    #[test]
    fn empty_slot_and_empty_intent_are_invalid() {
        let tree = SemanticTree::decoupled(Node::intent("X", vec![Node::slot("Y", vec![])]));
        assert!(validate_decoupled(&tree).violations.iter().any(|v| v.rule == rules::EMPTY_NODE));
        let leaf = SemanticTree::decoupled(Node::intent("X", vec![]));
        assert!(!validate_decoupled(&leaf).ok());
        assert!(validate_decoupled_with(&leaf, ValidateOpts { allow_leaf_intent: true }).ok());
    }

    #[test]
    fn multiple_nested_intents_are_flagged() {
        let tree = SemanticTree::decoupled(Node::intent(
            "X",
            vec![Node::slot(
                "Y",
                vec![
                    Node::intent("A", vec![Node::slot("B", vec![Node::token("b")])]),
                    Node::intent("C", vec![Node::slot("D", vec![Node::token("d")])]),
                ],
            )],
        ));
        let report = validate_decoupled(&tree);
        assert!(report.violations.iter().any(|v| v.rule == rules::MULTIPLE_NESTED_INTENTS));
    }

    #[test]
    fn collect_slots_dstc2_example() {
        // "i want a restaurant in the south part of town that serves moroccan food"
        let tree = SemanticTree::decoupled(Node::intent(
            "FIND_RESTAURANT",
            vec![
                Node::slot("AREA", vec![Node::token("south")]),
                Node::slot("FOOD", vec![Node::token("moroccan")]),
            ],
        ));
        let slots = collect_slots(&tree);
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].name, "AREA");
        assert_eq!(slots[0].value, vec!["south"]);
        assert_eq!(slots[0].path, vec![0]);
        assert_eq!(slots[1].name, "FOOD");
        assert_eq!(slots[1].value, vec!["moroccan"]);
    }

    #[test]
    fn collect_slots_excludes_trigger_tokens() {
        let slots = collect_slots(&traffic_explicit_ref());
        assert_eq!(slots.len(), 1);
        assert_eq!(slots[0].name, "LOCATION");
        assert_eq!(slots[0].value, vec!["san", "francisco"]);
    }

    #[test]
    fn collect_slots_empty_for_leaf_intent() {
        let tree = SemanticTree::decoupled(Node::intent("X", vec![]));
        assert!(collect_slots(&tree).is_empty());
    }

    #[test]
    fn collect_slots_nested_intent_value() {
        let slots = collect_slots(&reminder_decoupled());
        let todo = slots.iter().find(|s| s.name == "TODO").unwrap();
        assert_eq!(todo.value, vec!["call", "john"]);
    }

    #[test]
    fn validation_is_deterministic() {
        let tree = traffic_explicit_ref();
        assert_eq!(validate_decoupled(&tree), validate_decoupled(&tree));
    }
}
