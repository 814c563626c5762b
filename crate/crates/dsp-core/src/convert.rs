//! Mechanical conversions between annotation schemes: compositional to
//! decoupled (token stripping), decoupled back to compositional
//! (reconstruction), flat intent-slot frames to decoupled trees, and
//! dialogue-state annotations to decoupled trees.

use thiserror::Error;

use crate::tree::{
    validate_compositional_structure, validate_decoupled_with, LabelKind, Node, SemanticTree,
    TokenSource, TreeForm, ValidateOpts, ValidationReport,
};

/// A classical single-intent frame: intent plus non-overlapping slot spans
/// over the utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatFrame {
    pub intent: String,
    /// (slot name, token span) pairs; spans are `[start, end)` token offsets.
    pub slots: Vec<(String, TokenSpan)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
}

impl TokenSpan {
    pub fn new(start: usize, end: usize) -> Self {
        TokenSpan { start, end }
    }
}

/// A dialogue-state annotation: one intent and a set of slot constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueState {
    pub intent: String,
    /// (slot name, value tokens); names must be unique within a state.
    pub constraints: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("invalid input tree: {report}")]
    InvalidInput { report: ValidationReport },
    #[error("not recoverable: slot {slot}: {reason}")]
    NotRecoverable { slot: String, reason: String },
    #[error("slot {slot} span {start}..{end} out of bounds for utterance of length {len}")]
    SpanOutOfBounds { slot: String, start: usize, end: usize, len: usize },
    #[error("slot {a} span overlaps slot {b}")]
    OverlappingSpans { a: String, b: String },
    #[error("duplicate slot name {name} in dialogue state")]
    DuplicateSlotName { name: String },
    #[error("slot {name} has an empty value")]
    EmptyValue { name: String },
}

/// Strip a compositional tree down to its decoupled form: only tokens inside
/// leaf slots survive, and a slot holding a nested intent keeps only that
/// intent. Labels and the order of surviving tokens are preserved.
pub fn decouple(tree: &SemanticTree) -> Result<SemanticTree, ConvertError> {
    let report = validate_compositional_structure(tree);
    if !report.ok() {
        return Err(ConvertError::InvalidInput { report });
    }
    Ok(SemanticTree::decoupled(strip(&tree.root)))
}

fn strip(node: &Node) -> Node {
    let Node::Labeled { label, children } = node else {
        unreachable!("strip is only called on labeled nodes");
    };
    let kept: Vec<Node> = match label.kind {
        LabelKind::Intent => children.iter().filter(|c| c.is_slot()).map(strip).collect(),
        LabelKind::Slot => {
            if children.iter().any(Node::is_intent) {
                children.iter().filter(|c| c.is_intent()).map(strip).collect()
            } else {
                children.iter().filter(|c| c.is_token()).cloned().collect()
            }
        }
        // References never occur in compositional input.
        LabelKind::Ref => children.clone(),
    };
    Node::Labeled { label: label.clone(), children: kept }
}

/// Reconstruct a compositional tree from a decoupled tree and the utterance
/// it came from. Slot values must occur as contiguous subsequences of the
/// utterance, in order; tokens between sibling slots re-attach at the deepest
/// node dominating both neighbours, and leading/trailing tokens attach to the
/// root. `recouple(decouple(t), leaves(t)) == t` whenever those conditions
/// hold.
pub fn recouple(tree: &SemanticTree, utterance: &[String]) -> Result<SemanticTree, ConvertError> {
    let report = validate_decoupled_with(tree, ValidateOpts { allow_leaf_intent: true });
    if !report.ok() {
        return Err(ConvertError::InvalidInput { report });
    }
    if has_ref(&tree.root) {
        return Err(ConvertError::NotRecoverable {
            slot: "-".into(),
            reason: "tree contains reference nodes, which point outside the utterance".into(),
        });
    }

    // Leaf slots in depth-first order; values must appear in utterance order.
    let mut slots = Vec::new();
    leaf_slots(&tree.root, &mut slots);
    let mut spans = Vec::with_capacity(slots.len());
    let mut cursor = 0usize;
    for (name, value) in &slots {
        match find_subsequence(utterance, value, cursor) {
            Some(start) => {
                if find_subsequence(utterance, value, start + 1).is_some() {
                    log::debug!("slot {name} value {value:?} occurs more than once; using the first match");
                }
                spans.push(TokenSpan::new(start, start + value.len()));
                cursor = start + value.len();
            }
            None => {
                let reason = if find_subsequence(utterance, value, 0).is_some() {
                    "value occurs only out of order".to_string()
                } else if value.iter().all(|t| utterance.contains(t)) {
                    "value tokens are not contiguous in the utterance".to_string()
                } else {
                    "value is absent from the utterance".to_string()
                };
                return Err(ConvertError::NotRecoverable { slot: name.clone(), reason });
            }
        }
    }

    let mut span_iter = spans.into_iter();
    let (mut root, root_span) = rebuild(&tree.root, utterance, &mut span_iter);
    // Leading and trailing free tokens attach to the root.
    if let Node::Labeled { children, .. } = &mut root {
        if let Some(TokenSpan { start, end }) = root_span {
            for (offset, tok) in utterance[..start].iter().enumerate() {
                children.insert(offset, Node::token(tok.clone()));
            }
            for tok in &utterance[end..] {
                children.push(Node::token(tok.clone()));
            }
        } else {
            // No slots anywhere: the whole utterance attaches to the root.
            for tok in utterance {
                children.push(Node::token(tok.clone()));
            }
        }
    }
    Ok(SemanticTree::compositional(root))
}

fn has_ref(node: &Node) -> bool {
    node.is_ref() || node.children().iter().any(has_ref)
}

fn leaf_slots(node: &Node, out: &mut Vec<(String, Vec<String>)>) {
    if node.is_slot() && node.children().iter().all(Node::is_token) {
        let value = node
            .children()
            .iter()
            .filter_map(Node::as_token)
            .map(str::to_string)
            .collect();
        out.push((node.label().unwrap().name.clone(), value));
        return;
    }
    for c in node.children() {
        leaf_slots(c, out);
    }
}

fn find_subsequence(haystack: &[String], needle: &[String], from: usize) -> Option<usize> {
    if needle.is_empty() || from + needle.len() > haystack.len() {
        return None;
    }
    (from..=haystack.len() - needle.len())
        .find(|&i| haystack[i..i + needle.len()] == *needle)
}

/// Rebuild one subtree. Consumes leaf-slot spans left to right and returns
/// the rebuilt node together with its covered span (None if the subtree
/// contains no leaf slot). Gap tokens between two children that both carry
/// spans are inserted at this level, which is exactly their deepest common
/// dominator.
fn rebuild(
    node: &Node,
    utterance: &[String],
    spans: &mut impl Iterator<Item = TokenSpan>,
) -> (Node, Option<TokenSpan>) {
    let Node::Labeled { label, children } = node else {
        unreachable!("rebuild visits labeled nodes only");
    };
    if node.is_slot() && children.iter().all(Node::is_token) {
        let span = spans.next().expect("one span per leaf slot");
        let rebuilt = utterance[span.start..span.end]
            .iter()
            .map(|t| Node::token(t.clone()))
            .collect();
        return (Node::Labeled { label: label.clone(), children: rebuilt }, Some(span));
    }

    let mut rebuilt_children: Vec<Node> = Vec::with_capacity(children.len());
    let mut covered: Option<TokenSpan> = None;
    let mut last_end: Option<usize> = None;
    for child in children {
        let (rebuilt, child_span) = rebuild(child, utterance, spans);
        if let Some(span) = child_span {
            if let Some(prev) = last_end {
                for tok in &utterance[prev..span.start] {
                    rebuilt_children.push(Node::token(tok.clone()));
                }
            }
            last_end = Some(span.end);
            covered = Some(match covered {
                None => span,
                Some(c) => TokenSpan::new(c.start, span.end),
            });
        }
        rebuilt_children.push(rebuilt);
    }
    (Node::Labeled { label: label.clone(), children: rebuilt_children }, covered)
}

/// Build a decoupled tree from a flat frame: the intent on top, one slot per
/// span in utterance order. A frame with no slots yields a leaf intent.
pub fn flat_to_decoupled(
    frame: &FlatFrame,
    utterance: &[String],
) -> Result<SemanticTree, ConvertError> {
    let mut slots = frame.slots.clone();
    slots.sort_by_key(|(_, span)| span.start);
    let mut prev: Option<&(String, TokenSpan)> = None;
    for pair in &slots {
        let (name, span) = pair;
        if span.start >= span.end || span.end > utterance.len() {
            return Err(ConvertError::SpanOutOfBounds {
                slot: name.clone(),
                start: span.start,
                end: span.end,
                len: utterance.len(),
            });
        }
        if let Some((prev_name, prev_span)) = prev {
            if span.start < prev_span.end {
                return Err(ConvertError::OverlappingSpans {
                    a: prev_name.clone(),
                    b: name.clone(),
                });
            }
        }
        prev = Some(pair);
    }
    let children = slots
        .iter()
        .map(|(name, span)| {
            Node::slot(
                name.clone(),
                utterance[span.start..span.end]
                    .iter()
                    .map(|t| Node::token(t.clone()))
                    .collect(),
            )
        })
        .collect();
    Ok(SemanticTree::decoupled(Node::intent(frame.intent.clone(), children)))
}

/// Build a decoupled tree from a dialogue state: sibling slots are sorted by
/// name (the state is a set), an empty constraint set yields a leaf intent.
pub fn state_to_tree(state: &DialogueState) -> Result<SemanticTree, ConvertError> {
    let mut constraints = state.constraints.clone();
    constraints.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in constraints.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(ConvertError::DuplicateSlotName { name: pair[0].0.clone() });
        }
    }
    let children = constraints
        .into_iter()
        .map(|(name, value)| {
            if value.is_empty() {
                return Err(ConvertError::EmptyValue { name });
            }
            Ok(Node::slot(name, value.into_iter().map(Node::token).collect()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SemanticTree::decoupled(Node::intent(state.intent.clone(), children)))
}
