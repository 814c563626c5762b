//! Evaluation metrics: frame accuracy and its canonicalization variants,
//! oracle-at-beam, and slot carryover accuracy bucketed by distance.
//!
//! Predictions are `Option<SemanticTree>`: unconstrained decoding can emit
//! sequences that do not parse, and those count as wrong rather than abort
//! evaluation. All corpus metrics are plain means of per-example 0/1 scores,
//! so they are permutation-invariant and mergeable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linearize::{canonical_key, CanonPolicy};
use crate::session::{extract_carryover_at, DistanceMode, Session};
use crate::tree::{collect_slots, SemanticTree};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("prediction/gold length mismatch: {preds} vs {golds}")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("empty beam for example {example}")]
    EmptyBeam { example: usize },
    #[error("beam width k must be at least 1")]
    ZeroBeamWidth,
    #[error("alignment error: {0}")]
    AlignmentError(String),
}

/// The utterance-level report: one row of the architecture-results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub frame_acc: f64,
    pub ref_only_fa: f64,
    pub intent_acc: f64,
    pub inner_parse_acc: f64,
    pub n: usize,
}

/// Accuracy within one slot-distance bucket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl BucketStats {
    fn from_counts(correct: usize, total: usize) -> Self {
        BucketStats {
            correct,
            total,
            accuracy: if total == 0 { f64::NAN } else { correct as f64 / total as f64 },
        }
    }
}

/// Carryover report: buckets for slot distances 0, 1, 2 and >=3, plus frame
/// accuracy over all turns and over final turns only (both are reported since
/// either reading of the headline accuracy column is defensible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarryoverReport {
    pub buckets: [BucketStats; 4],
    pub frame_acc_all_turns: f64,
    pub frame_acc_final_turn: f64,
    pub n_facts: usize,
}

fn check_lengths(preds: usize, golds: usize) -> Result<(), MetricsError> {
    if preds != golds {
        return Err(MetricsError::LengthMismatch { preds, golds });
    }
    if golds == 0 {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(())
}

fn matches_gold(pred: Option<&SemanticTree>, gold: &SemanticTree, policy: CanonPolicy) -> bool {
    match pred {
        Some(p) => canonical_key(p, policy) == canonical_key(gold, policy),
        None => false,
    }
}

/// Exact match between canonicalized predicted and gold trees.
pub fn frame_accuracy(
    preds: &[Option<SemanticTree>],
    golds: &[SemanticTree],
    policy: CanonPolicy,
) -> Result<f64, MetricsError> {
    check_lengths(preds.len(), golds.len())?;
    let correct = preds
        .iter()
        .zip(golds)
        .filter(|(p, g)| matches_gold(p.as_ref(), g, policy))
        .count();
    Ok(correct as f64 / golds.len() as f64)
}

/// Frame accuracy that does not distinguish implicit from explicit
/// references.
pub fn ref_only_fa(
    preds: &[Option<SemanticTree>],
    golds: &[SemanticTree],
    policy: CanonPolicy,
) -> Result<f64, MetricsError> {
    frame_accuracy(preds, golds, CanonPolicy { collapse_ref_kinds: true, ..policy })
}

/// Accuracy over top-level intent names.
pub fn intent_accuracy(
    preds: &[Option<SemanticTree>],
    golds: &[SemanticTree],
) -> Result<f64, MetricsError> {
    check_lengths(preds.len(), golds.len())?;
    let correct = preds
        .iter()
        .zip(golds)
        .filter(|(p, g)| match p {
            Some(p) => p.root_intent().is_some() && p.root_intent() == g.root_intent(),
            None => false,
        })
        .count();
    Ok(correct as f64 / golds.len() as f64)
}

/// Frame accuracy that ignores the top-level intent.
pub fn inner_parse_accuracy(
    preds: &[Option<SemanticTree>],
    golds: &[SemanticTree],
    policy: CanonPolicy,
) -> Result<f64, MetricsError> {
    frame_accuracy(preds, golds, CanonPolicy { strip_root_intent: true, ..policy })
}

/// Fraction of examples where any of the top-k hypotheses exact-matches gold.
/// Beams must be sorted by descending log-probability.
pub fn oracle_at_beam(
    beams: &[Vec<Option<SemanticTree>>],
    golds: &[SemanticTree],
    k: usize,
    policy: CanonPolicy,
) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroBeamWidth);
    }
    check_lengths(beams.len(), golds.len())?;
    if let Some(example) = beams.iter().position(|b| b.is_empty()) {
        return Err(MetricsError::EmptyBeam { example });
    }
    let correct = beams
        .iter()
        .zip(golds)
        .filter(|(beam, gold)| {
            beam.iter()
                .take(k)
                .any(|hyp| matches_gold(hyp.as_ref(), gold, policy))
        })
        .count();
    Ok(correct as f64 / golds.len() as f64)
}

/// Convenience wrapper computing the four tree metrics at once.
pub fn evaluate(
    preds: &[Option<SemanticTree>],
    golds: &[SemanticTree],
    policy: CanonPolicy,
) -> Result<EvalReport, MetricsError> {
    Ok(EvalReport {
        frame_acc: frame_accuracy(preds, golds, policy)?,
        ref_only_fa: ref_only_fa(preds, golds, policy)?,
        intent_acc: intent_accuracy(preds, golds)?,
        inner_parse_acc: inner_parse_accuracy(preds, golds, policy)?,
        n: golds.len(),
    })
}

fn lowered_slot_keys(tree: &SemanticTree) -> Vec<(String, Vec<String>)> {
    collect_slots(tree)
        .into_iter()
        .map(|s| (s.name, s.value.iter().map(|t| t.to_lowercase()).collect()))
        .collect()
}

/// Score slot carryover: a gold fact counts as carried iff the predicted tree
/// for its turn contains a slot with the same (label, value), anywhere in the
/// tree. Facts are bucketed by distance with >=3 merged.
///
/// `preds[s]` holds one prediction per gold user turn of `sessions[s]`.
pub fn carryover_report(
    preds: &[Vec<Option<SemanticTree>>],
    sessions: &[Session],
    policy: CanonPolicy,
    mode: DistanceMode,
) -> Result<CarryoverReport, MetricsError> {
    if preds.len() != sessions.len() {
        return Err(MetricsError::AlignmentError(format!(
            "{} prediction lists for {} sessions",
            preds.len(),
            sessions.len()
        )));
    }
    let mut bucket_correct = [0usize; 4];
    let mut bucket_total = [0usize; 4];
    let mut flat_preds: Vec<Option<SemanticTree>> = Vec::new();
    let mut flat_golds: Vec<SemanticTree> = Vec::new();
    let mut final_preds: Vec<Option<SemanticTree>> = Vec::new();
    let mut final_golds: Vec<SemanticTree> = Vec::new();

    for (session, session_preds) in sessions.iter().zip(preds) {
        let gold_trees = session.gold_trees();
        if gold_trees.len() != session_preds.len() {
            return Err(MetricsError::AlignmentError(format!(
                "session {}: {} predictions for {} gold turns",
                session.id,
                session_preds.len(),
                gold_trees.len()
            )));
        }
        if gold_trees.is_empty() {
            continue;
        }
        let positions: Vec<usize> = match mode {
            DistanceMode::UserTurns => (0..gold_trees.len()).collect(),
            DistanceMode::AllTurns => session.gold_turn_indices(),
        };
        let pred_keys: Vec<Option<Vec<(String, Vec<String>)>>> = session_preds
            .iter()
            .map(|p| p.as_ref().map(lowered_slot_keys))
            .collect();
        for fact in extract_carryover_at(&gold_trees, &positions) {
            let bucket = fact.distance.min(3);
            bucket_total[bucket] += 1;
            let key = (
                fact.label.clone(),
                fact.value.iter().map(|t| t.to_lowercase()).collect::<Vec<_>>(),
            );
            if pred_keys[fact.turn_index]
                .as_ref()
                .map(|keys| keys.contains(&key))
                .unwrap_or(false)
            {
                bucket_correct[bucket] += 1;
            }
        }
        for (pred, gold) in session_preds.iter().zip(&gold_trees) {
            flat_preds.push(pred.clone());
            flat_golds.push((*gold).clone());
        }
        final_preds.push(session_preds.last().unwrap().clone());
        final_golds.push((*gold_trees.last().unwrap()).clone());
    }

    if flat_golds.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(CarryoverReport {
        buckets: [
            BucketStats::from_counts(bucket_correct[0], bucket_total[0]),
            BucketStats::from_counts(bucket_correct[1], bucket_total[1]),
            BucketStats::from_counts(bucket_correct[2], bucket_total[2]),
            BucketStats::from_counts(bucket_correct[3], bucket_total[3]),
        ],
        frame_acc_all_turns: frame_accuracy(&flat_preds, &flat_golds, policy)?,
        frame_acc_final_turn: frame_accuracy(&final_preds, &final_golds, policy)?,
        n_facts: bucket_total.iter().sum(),
    })
}
