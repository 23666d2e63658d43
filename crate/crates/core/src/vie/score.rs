use alloc::vec::Vec;

use num_rational::Ratio;

use crate::annotation::Annotation;
use crate::document::Document;
use crate::selector::AnnotationSelector;

/// Match counts with exact precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreReport {
    pub matches: u64,
    pub response_size: u64,
    pub key_size: u64,
    pub precision: Ratio<u64>,
    pub recall: Ratio<u64>,
    pub f1: Ratio<u64>,
}

fn ratio_or(num: u64, den: u64, when_zero: bool) -> Ratio<u64> {
    if den == 0 {
        Ratio::from_integer(u64::from(when_zero))
    } else {
        Ratio::new(num, den)
    }
}

/// One-to-one matching of responses against keys. Two annotations match
/// when type and spans are equal and, with `strict_attrs`, their attribute
/// maps are equal too. Equality matching is an equivalence, so a greedy
/// pass already yields a maximum pairing.
pub fn score_annotations(response: &[&Annotation], key: &[&Annotation], strict_attrs: bool) -> ScoreReport {
    let mut used = Vec::new();
    used.resize(key.len(), false);
    let mut matches = 0u64;
    for r in response {
        if let Some(slot) = key
            .iter()
            .enumerate()
            .position(|(i, k)| !used[i] && r.same_content(k, strict_attrs))
        {
            used[slot] = true;
            matches += 1;
        }
    }
    let response_size = response.len() as u64;
    let key_size = key.len() as u64;
    let both_empty = response_size == 0 && key_size == 0;
    let precision = ratio_or(matches, response_size, key_size == 0);
    let recall = ratio_or(matches, key_size, response_size == 0);
    // harmonic mean of m/R and m/K is 2m/(R+K)
    let f1 = if both_empty {
        Ratio::from_integer(1)
    } else {
        Ratio::new(2 * matches, response_size + key_size)
    };
    ScoreReport {
        matches,
        response_size,
        key_size,
        precision,
        recall,
        f1,
    }
}

/// Scores the annotations picked by `response` against those picked by
/// `key`, both on `doc`.
pub fn score(
    doc: &Document,
    response: &AnnotationSelector,
    key: &AnnotationSelector,
    strict_attrs: bool,
) -> ScoreReport {
    score_annotations(&doc.get_annotations(response), &doc.get_annotations(key), strict_attrs)
}
