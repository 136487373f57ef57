//! Ground-truth generation: matches field-level label texts (e.g. a gross
//! amount from the source system) against OCR token sequences.
//!
//! The text distance is zero when either string contains the other,
//! otherwise the Levenshtein distance. Currency- and date-valued classes
//! bypass the fuzzy path entirely and only accept exact matches. Documents
//! where any field fails to match are omitted wholesale rather than kept
//! with noisy labels.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{Document, NONE_CLASS};

/// One labeled field value for a document, e.g. `grossamount = "40.00 €"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldValue {
    #[serde(rename = "class")]
    pub class_name: String,
    pub value: String,
}

/// Controls how field texts are matched against token windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchPolicy {
    /// Levenshtein bound as a fraction of the label length;
    /// the effective bound is `max(1, floor(ratio * len))`, capped at `len`.
    pub max_lev_ratio: f64,
    /// Classes that only accept distance-0 matches via exact equality or
    /// the substring branches.
    pub exact_only_classes: HashSet<String>,
    /// Longest window of consecutive tokens considered for one field.
    pub window_max_tokens: usize,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        Self {
            max_lev_ratio: 0.2,
            exact_only_classes: ["documentdate", "grossamount", "netamount"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            window_max_tokens: 8,
        }
    }
}

impl MatchPolicy {
    /// Maximum accepted Levenshtein distance for a label of `len` characters.
    pub fn max_lev_distance(&self, len: usize) -> usize {
        let rel = (self.max_lev_ratio * len as f64).floor() as usize;
        rel.max(1).min(len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchResult {
    Matched {
        /// Index of the first token of the matched window.
        start: usize,
        /// Number of consecutive tokens in the window.
        len: usize,
        distance: usize,
    },
    NoMatch,
}

/// Levenshtein distance over Unicode scalar values, two-row DP.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut cur: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut prev_diag = cur[0];
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let tmp = cur[j + 1];
            let sub = prev_diag + usize::from(ca != cb);
            cur[j + 1] = sub.min(tmp + 1).min(cur[j] + 1);
            prev_diag = tmp;
        }
    }
    cur[b.len()]
}

/// True iff `a` occurs as a contiguous substring of `b`. Case-sensitive.
pub fn is_sub(a: &str, b: &str) -> bool {
    b.contains(a)
}

/// Distance between an OCR reading and a label text: 0 when either string
/// contains the other, Levenshtein otherwise.
pub fn text_distance(candidate: &str, label_text: &str) -> usize {
    if is_sub(candidate, label_text) || is_sub(label_text, candidate) {
        0
    } else {
        levenshtein(candidate, label_text)
    }
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Fuzzy-path window distance: substring branches ignore case (OCR case
/// noise), the Levenshtein fallback does not. Containment is directional:
/// a window inside the label scores 0, but a multi-token window merely
/// containing the label does not, or every superset window would qualify.
/// A single glued token containing the label still counts.
fn fuzzy_distance(candidate: &str, label_text: &str, single_token: bool) -> usize {
    let cl = candidate.to_lowercase();
    let ll = label_text.to_lowercase();
    if is_sub(&cl, &ll) || (single_token && is_sub(&ll, &cl)) {
        0
    } else {
        levenshtein(candidate, label_text)
    }
}

/// Exact-path window distance: whitespace-normalized equality or
/// case-sensitive containment under the same direction rule as the fuzzy
/// path, nothing else.
fn exact_distance(candidate: &str, label_text: &str, single_token: bool) -> Option<usize> {
    if normalize_ws(candidate) == normalize_ws(label_text)
        || is_sub(candidate, label_text)
        || (single_token && is_sub(label_text, candidate))
    {
        Some(0)
    } else {
        None
    }
}

/// Slides windows of 1..=window_max_tokens consecutive tokens over the
/// document, joining token texts with single spaces, and returns the window
/// with minimal distance to the field value. Ties break on earliest start,
/// then longest window, so a value spanning several tokens claims all of
/// them rather than just its first token.
pub fn match_field(field: &FieldValue, doc: &Document, policy: &MatchPolicy) -> MatchResult {
    match_field_masked(field, doc, policy, &[])
}

fn match_field_masked(
    field: &FieldValue,
    doc: &Document,
    policy: &MatchPolicy,
    taken: &[bool],
) -> MatchResult {
    let n = doc.tokens.len();
    let exact_only = policy.exact_only_classes.contains(&field.class_name);
    let label_len = field.value.chars().count();
    let bound = if exact_only {
        0
    } else {
        policy.max_lev_distance(label_len)
    };

    let mut best: Option<(usize, usize, usize)> = None; // (distance, start, len)
    for start in 0..n {
        let mut window = String::new();
        for len in 1..=policy.window_max_tokens.min(n - start) {
            let idx = start + len - 1;
            if taken.get(idx).copied().unwrap_or(false) {
                break; // window would cover an already-assigned token
            }
            if len > 1 {
                window.push(' ');
            }
            window.push_str(&doc.tokens[idx].text);

            let dist = if exact_only {
                match exact_distance(&window, &field.value, len == 1) {
                    Some(d) => d,
                    None => continue,
                }
            } else {
                fuzzy_distance(&window, &field.value, len == 1)
            };
            let better = match best {
                None => true,
                Some((bd, bs, bl)) => {
                    (dist, start) < (bd, bs) || ((dist, start) == (bd, bs) && len > bl)
                }
            };
            if better {
                best = Some((dist, start, len));
            }
        }
    }

    match best {
        Some((distance, start, len)) if distance <= bound => MatchResult::Matched {
            start,
            len,
            distance,
        },
        _ => MatchResult::NoMatch,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnnotationOutcome {
    Annotated(Document),
    Omitted { class: String, reason: String },
}

/// Matches every field against the document and writes gt labels: matched
/// spans get their field's class, everything else gets "None". A single
/// failing field omits the whole document. Fields are matched in list
/// order; tokens claimed by an earlier field are unavailable to later ones.
pub fn annotate_document(
    doc: &Document,
    fields: &[FieldValue],
    policy: &MatchPolicy,
) -> Result<AnnotationOutcome, Error> {
    let mut seen: HashMap<&str, ()> = HashMap::new();
    for f in fields {
        if f.class_name == NONE_CLASS {
            return Err(Error::UnknownFieldClass(f.class_name.clone()));
        }
        if seen.insert(&f.class_name, ()).is_some() {
            return Err(Error::DuplicateField(f.class_name.clone()));
        }
    }

    let n = doc.tokens.len();
    let mut taken = vec![false; n];
    let mut labels: Vec<Option<String>> = vec![None; n];
    for field in fields {
        match match_field_masked(field, doc, policy, &taken) {
            MatchResult::Matched { start, len, .. } => {
                for i in start..start + len {
                    taken[i] = true;
                    labels[i] = Some(field.class_name.clone());
                }
            }
            MatchResult::NoMatch => {
                return Ok(AnnotationOutcome::Omitted {
                    class: field.class_name.clone(),
                    reason: format!(
                        "no token window matched value {:?} for class {:?}",
                        field.value, field.class_name
                    ),
                });
            }
        }
    }

    let mut out = doc.clone();
    for (tok, label) in out.tokens.iter_mut().zip(labels) {
        tok.gt_label = Some(label.unwrap_or_else(|| NONE_CLASS.to_string()));
    }
    Ok(AnnotationOutcome::Annotated(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundingBox, Token};

    fn doc(texts: &[&str]) -> Document {
        Document {
            doc_id: "d1".into(),
            creditor_id: "c1".into(),
            tokens: texts
                .iter()
                .enumerate()
                .map(|(i, t)| Token {
                    text: t.to_string(),
                    bbox: BoundingBox::new(0.0, 20.0 * i as f64, 50.0, 20.0 * i as f64 + 15.0),
                    gt_label: None,
                })
                .collect(),
        }
    }

    fn field(class: &str, value: &str) -> FieldValue {
        FieldValue {
            class_name: class.into(),
            value: value.into(),
        }
    }

    #[test]
    fn levenshtein_known_values() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("Rechnng", "Rechnung"), 1);
    }

    #[test]
    fn is_sub_cases() {
        assert!(is_sub("40.00", "Total 40.00 €"));
        assert!(is_sub("same", "same"));
        assert!(!is_sub("40,00", "40.00"));
    }

    #[test]
    fn text_distance_branches() {
        assert_eq!(text_distance("Müller GmbH", "Müller"), 0);
        assert_eq!(text_distance("Rechnng", "Rechnung"), 1);
        assert_eq!(text_distance("same", "same"), 0);
    }

    #[test]
    fn match_exact_amount_spanning_tokens() {
        let d = doc(&["Summe", "40.00", "€"]);
        let mut policy = MatchPolicy::default();
        policy.exact_only_classes.insert("grossamount".into());
        let r = match_field(&field("grossamount", "40.00 €"), &d, &policy);
        assert_eq!(
            r,
            MatchResult::Matched {
                start: 1,
                len: 2,
                distance: 0
            }
        );
    }

    #[test]
    fn match_exact_join_of_name() {
        let d = doc(&["Acme", "AG", "Berlin"]);
        let r = match_field(&field("creditorname", "Acme AG"), &d, &MatchPolicy::default());
        assert_eq!(
            r,
            MatchResult::Matched {
                start: 0,
                len: 2,
                distance: 0
            }
        );
    }

    #[test]
    fn match_fuzzy_ocr_confusion() {
        // OCR read 'l' for '1'
        let d = doc(&["R-l234"]);
        let policy = MatchPolicy::default(); // bound = max(1, floor(0.2*6)) = 1
        let r = match_field(&field("invoicenumber", "R-1234"), &d, &policy);
        assert_eq!(
            r,
            MatchResult::Matched {
                start: 0,
                len: 1,
                distance: 1
            }
        );
    }

    #[test]
    fn exact_class_rejects_fuzzy_match() {
        let d = doc(&["40,00"]);
        let policy = MatchPolicy::default();
        let r = match_field(&field("grossamount", "40.00"), &d, &policy);
        assert_eq!(r, MatchResult::NoMatch);
    }

    #[test]
    fn earliest_start_wins_ties() {
        let d = doc(&["40.00", "sonst", "40.00"]);
        let policy = MatchPolicy::default();
        let r = match_field(&field("grossamount", "40.00"), &d, &policy);
        assert_eq!(
            r,
            MatchResult::Matched {
                start: 0,
                len: 1,
                distance: 0
            }
        );
    }

    #[test]
    fn annotate_sets_labels_and_none_elsewhere() {
        let d = doc(&["Acme", "AG", "Summe", "40.00", "€"]);
        let fields = vec![field("creditorname", "Acme AG"), field("grossamount", "40.00 €")];
        let out = annotate_document(&d, &fields, &MatchPolicy::default()).unwrap();
        let AnnotationOutcome::Annotated(ann) = out else {
            panic!("expected annotation");
        };
        let labels: Vec<&str> = ann
            .tokens
            .iter()
            .map(|t| t.gt_label.as_deref().unwrap())
            .collect();
        assert_eq!(
            labels,
            vec!["creditorname", "creditorname", "None", "grossamount", "grossamount"]
        );
    }

    #[test]
    fn annotate_omits_on_any_nomatch() {
        let d = doc(&["Acme", "AG"]);
        let fields = vec![field("creditorname", "Acme AG"), field("grossamount", "99.99")];
        let out = annotate_document(&d, &fields, &MatchPolicy::default()).unwrap();
        assert!(matches!(
            out,
            AnnotationOutcome::Omitted { ref class, .. } if class == "grossamount"
        ));
    }

    #[test]
    fn annotate_rejects_duplicate_class() {
        let d = doc(&["x"]);
        let fields = vec![field("creditorname", "a"), field("creditorname", "b")];
        assert!(matches!(
            annotate_document(&d, &fields, &MatchPolicy::default()),
            Err(Error::DuplicateField(_))
        ));
    }

    #[test]
    fn overlapping_fields_rematch_on_remaining_tokens() {
        // Both fields' best window is token 0; the second must settle for token 2.
        let d = doc(&["40.00", "und", "40.00"]);
        let mut policy = MatchPolicy::default();
        policy.exact_only_classes.clear();
        let fields = vec![field("grossamount", "40.00"), field("netamount", "40.00")];
        let out = annotate_document(&d, &fields, &policy).unwrap();
        let AnnotationOutcome::Annotated(ann) = out else {
            panic!("expected annotation");
        };
        let labels: Vec<&str> = ann
            .tokens
            .iter()
            .map(|t| t.gt_label.as_deref().unwrap())
            .collect();
        assert_eq!(labels, vec!["grossamount", "None", "netamount"]);
    }
}
