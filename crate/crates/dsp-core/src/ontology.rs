//! Ontology registry: the closed set of intent/slot names of a dataset.
//!
//! Built once from the training annotations. Names must be uppercase-prefixed
//! identifiers so that ontology symbols and lowercased utterance tokens can
//! never collide in a linearized sequence.

use std::collections::BTreeSet;
use thiserror::Error;

use crate::tree::{LabelKind, Node, SemanticTree, REF_EXPLICIT, REF_IMPLICIT, TRIGGER_SEPARATOR};

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("label name {name:?} is not an uppercase identifier")]
    BadName { name: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    intents: BTreeSet<String>,
    slots: BTreeSet<String>,
}

fn name_ok(name: &str) -> bool {
    !name.is_empty()
        && name.starts_with(|c: char| c.is_ascii_uppercase())
        && name
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

impl Registry {
    /// Collect every intent and slot name used by `trees`, rejecting names
    /// that break the uppercase-identifier convention.
    pub fn build<'a>(
        trees: impl IntoIterator<Item = &'a SemanticTree>,
    ) -> Result<Self, OntologyError> {
        let mut registry = Registry::default();
        for tree in trees {
            registry.add_tree(tree)?;
        }
        Ok(registry)
    }

    pub fn add_tree(&mut self, tree: &SemanticTree) -> Result<(), OntologyError> {
        self.add_node(&tree.root)
    }

    fn add_node(&mut self, node: &Node) -> Result<(), OntologyError> {
        if let Some(label) = node.label() {
            match label.kind {
                LabelKind::Intent | LabelKind::Slot => {
                    if !name_ok(&label.name) {
                        return Err(OntologyError::BadName { name: label.name.clone() });
                    }
                    let set = if label.kind == LabelKind::Intent {
                        &mut self.intents
                    } else {
                        &mut self.slots
                    };
                    set.insert(label.name.clone());
                }
                LabelKind::Ref => {}
            }
        }
        for child in node.children() {
            self.add_node(child)?;
        }
        Ok(())
    }

    pub fn intents(&self) -> impl Iterator<Item = &str> {
        self.intents.iter().map(String::as_str)
    }

    pub fn slots(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().map(String::as_str)
    }

    pub fn contains_intent(&self, name: &str) -> bool {
        self.intents.contains(name)
    }

    pub fn contains_slot(&self, name: &str) -> bool {
        self.slots.contains(name)
    }

    /// Every target-side ontology symbol in a fixed order: opening symbols
    /// for all intents, slots and both reference kinds, the closing bracket,
    /// and the trigger separator. End-of-sequence is a model-side extra.
    pub fn ontology_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for name in &self.intents {
            out.push(format!("[IN:{name}"));
        }
        for name in &self.slots {
            out.push(format!("[SL:{name}"));
        }
        out.push(format!("[REF:{REF_EXPLICIT}"));
        out.push(format!("[REF:{REF_IMPLICIT}"));
        out.push("]".to_string());
        out.push(TRIGGER_SEPARATOR.to_string());
        out
    }
}
