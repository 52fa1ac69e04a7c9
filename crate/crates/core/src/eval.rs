//! Character n-gram F-score and corpus-level aggregation.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Genre, Period, TabletRecord};
use crate::error::{Error, Result};
use crate::translit::{render_transliteration, SpecialToken};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrfParams {
    pub beta: f64,
    pub max_order: usize,
    /// Score special tokens and line breaks as part of the text.
    pub include_specials: bool,
    pub whitespace_removed: bool,
    /// Combine with `(1 + beta)^2` in place of `1 + beta^2`.
    pub eq1_literal: bool,
}

impl Default for ChrfParams {
    fn default() -> Self {
        ChrfParams {
            beta: 2.0,
            max_order: 6,
            include_specials: true,
            whitespace_removed: true,
            eq1_literal: false,
        }
    }
}

impl ChrfParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::InvalidParameter(
                "chrF order must be at least 1".into(),
            ));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "chrF beta {} must be positive",
                self.beta
            )));
        }
        Ok(())
    }
}

fn prepare(text: &str, p: &ChrfParams) -> Vec<char> {
    let mut owned;
    let mut text = text;
    if !p.include_specials {
        owned = text.to_owned();
        for special in SpecialToken::ALL {
            owned = owned.replace(special.as_str(), " ");
        }
        text = &owned;
    }
    text.chars()
        .filter(|c| !(p.whitespace_removed && c.is_whitespace()))
        .collect()
}

fn ngrams(chars: &[char], n: usize) -> HashMap<&[char], u32> {
    let mut counts = HashMap::new();
    for gram in chars.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// chrF of `hyp` against `reference`, in `[0, 100]` (the `eq1_literal`
/// variant can exceed 100).
pub fn chrf(hyp: &str, reference: &str, p: &ChrfParams) -> f64 {
    let h = prepare(hyp, p);
    let r = prepare(reference, p);
    match (h.is_empty(), r.is_empty()) {
        (true, true) => return 100.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let (mut precision, mut recall, mut orders) = (0.0, 0.0, 0usize);
    for n in 1..=p.max_order {
        if r.len() < n {
            break;
        }
        let ref_grams = ngrams(&r, n);
        let hyp_grams = ngrams(&h, n);
        let matches: u32 = hyp_grams
            .iter()
            .map(|(gram, &c)| c.min(ref_grams.get(gram).copied().unwrap_or(0)))
            .sum();
        let hyp_total = h.len().saturating_sub(n - 1);
        if hyp_total > 0 {
            precision += f64::from(matches) / hyp_total as f64;
        }
        recall += f64::from(matches) / (r.len() - n + 1) as f64;
        orders += 1;
    }
    precision /= orders as f64;
    recall /= orders as f64;
    let b2 = p.beta * p.beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        return 0.0;
    }
    let factor = if p.eq1_literal {
        (1.0 + p.beta).powi(2)
    } else {
        1.0 + b2
    };
    100.0 * factor * precision * recall / denom
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupScore {
    pub label: String,
    pub tablets: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChrfReport {
    pub params: ChrfParams,
    pub per_tablet: BTreeMap<String, f64>,
    pub by_period: Vec<GroupScore>,
    pub by_genre: Vec<GroupScore>,
    pub overall: f64,
    /// Reference ids with no prediction; each scored 0.
    pub missing: Vec<String>,
}

fn mean(scores: &[f64]) -> f64 {
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Scores every reference tablet and macro-averages by period, genre and
/// overall. Predictions are rendered transliteration strings keyed by id.
pub fn evaluate_corpus(
    preds: &BTreeMap<String, String>,
    refs: &[TabletRecord],
    p: &ChrfParams,
) -> Result<ChrfReport> {
    p.validate()?;
    let mut by_id: BTreeMap<&str, &TabletRecord> = BTreeMap::new();
    for r in refs {
        if by_id.insert(&r.id, r).is_some() {
            return Err(Error::DuplicateId(r.id.clone()));
        }
    }
    if let Some(id) = preds.keys().find(|id| !by_id.contains_key(id.as_str())) {
        return Err(Error::UnknownPrediction(id.clone()));
    }
    if preds.is_empty() {
        return Err(Error::Undefined("no predictions match any reference"));
    }

    let scored: Vec<(&str, Option<f64>)> = by_id
        .par_iter()
        .map(|(id, rec)| {
            let score = preds
                .get(*id)
                .map(|hyp| chrf(hyp, &render_transliteration(&rec.translit), p));
            (*id, score)
        })
        .collect();

    let mut per_tablet = BTreeMap::new();
    let mut missing = Vec::new();
    for (id, score) in scored {
        if score.is_none() {
            missing.push(id.to_owned());
        }
        per_tablet.insert(id.to_owned(), score.unwrap_or(0.0));
    }

    let group = |label: &str, keep: &dyn Fn(&TabletRecord) -> bool| {
        let scores: Vec<f64> = by_id
            .iter()
            .filter(|(_, r)| keep(r))
            .map(|(id, _)| per_tablet[*id])
            .collect();
        (!scores.is_empty()).then(|| GroupScore {
            label: label.to_owned(),
            tablets: scores.len(),
            mean: mean(&scores),
        })
    };
    let by_period = Period::ALL
        .iter()
        .filter_map(|&pd| group(pd.label(), &|r| r.period == pd))
        .collect();
    let by_genre = Genre::ALL
        .iter()
        .filter_map(|&g| group(g.label(), &|r| r.genre == g))
        .collect();
    let all: Vec<f64> = per_tablet.values().copied().collect();
    Ok(ChrfReport {
        params: *p,
        overall: mean(&all),
        per_tablet,
        by_period,
        by_genre,
        missing,
    })
}

impl ChrfReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Tab-separated table with one column per system and one row per period
/// and genre label, followed by the overall mean.
pub fn report_table(systems: &[(&str, &ChrfReport)]) -> String {
    let mut out = String::from("label");
    for (name, _) in systems {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    let cell = |groups: &[GroupScore], label: &str| {
        groups
            .iter()
            .find(|g| g.label == label)
            .map_or("-".to_string(), |g| format!("{:.2}", g.mean))
    };
    let section = |out: &mut String, labels: Vec<&str>, pick: fn(&ChrfReport) -> &[GroupScore]| {
        for label in labels {
            if systems
                .iter()
                .all(|(_, r)| pick(r).iter().all(|g| g.label != label))
            {
                continue;
            }
            out.push_str(label);
            for (_, r) in systems {
                out.push('\t');
                out.push_str(&cell(pick(r), label));
            }
            out.push('\n');
        }
    };
    section(
        &mut out,
        Period::ALL.iter().map(|p| p.label()).collect(),
        |r| &r.by_period,
    );
    section(
        &mut out,
        Genre::ALL.iter().map(|g| g.label()).collect(),
        |r| &r.by_genre,
    );
    out.push_str("Overall");
    for (_, r) in systems {
        out.push_str(&format!("\t{:.2}", r.overall));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glyph::map_stream;
    use crate::signlist::SignList;
    use crate::translit::parse_transliteration;

    const P: ChrfParams = ChrfParams {
        beta: 2.0,
        max_order: 6,
        include_specials: true,
        whitespace_removed: true,
        eq1_literal: false,
    };

    #[test]
    fn boundaries() {
        assert_eq!(chrf("lugal kur-kur-ra", "lugal kur-kur-ra", &P), 100.0);
        assert_eq!(chrf("", "en", &P), 0.0);
        assert_eq!(chrf("en", "", &P), 0.0);
        assert_eq!(chrf("", "", &P), 100.0);
        assert_eq!(chrf("ab", "cd", &P), 0.0);
    }

    #[test]
    fn hand_computed_values() {
        // Orders 1..5 only: P = (5/6 + 4/5 + 3/4 + 2/3 + 1/2) / 5 = 71/100, R = 1.
        assert!((chrf("lugale", "lugal", &P) - 100.0 * 355.0 / 384.0).abs() < 1e-9);
        assert!((chrf("lugal", "lugale", &P) - 62.80962491153574).abs() < 1e-9);
        assert!((chrf("lugal kur-kur-ra", "lugal kur kur ra", &P) - 60.9083537994938).abs() < 1e-9);
    }

    #[test]
    fn specials_can_be_excluded() {
        let no_specials = ChrfParams {
            include_specials: false,
            ..P
        };
        assert_eq!(chrf("<SURFACE>\nen ...", "en", &no_specials), 100.0);
        assert!(chrf("<SURFACE>\nen ...", "en", &P) < 100.0);
        assert_eq!(chrf("<UNK>", "<RULING>", &no_specials), 100.0);
    }

    #[test]
    fn literal_formula_differs() {
        let lit = ChrfParams {
            eq1_literal: true,
            ..P
        };
        let s = chrf("lugale", "lugal", &lit);
        assert!((s - 100.0 * 9.0 * 0.71 / 3.84).abs() < 1e-9);
        assert!(s > 100.0);
    }

    fn rec(id: &str, text: &str, period: Period) -> TabletRecord {
        let m = map_stream(&parse_transliteration(text), &SignList::mini());
        TabletRecord {
            id: id.into(),
            period,
            genre: Genre::Administrative,
            glyphs: m.glyphs,
            translit: m.translit,
        }
    }

    #[test]
    fn corpus_means_and_missing() {
        let refs = vec![
            rec("a", "en", Period::UrIII),
            rec("b", "lugal", Period::OldAkkadian),
        ];
        let preds = BTreeMap::from([("a".to_string(), "en".to_string())]);
        let report = evaluate_corpus(&preds, &refs, &P).unwrap();
        assert_eq!(report.overall, 50.0);
        assert_eq!(report.missing, ["b"]);
        assert_eq!(report.by_period[0].label, "Ur III");
        assert_eq!(report.by_period[0].mean, 100.0);
        assert_eq!(report.by_genre[0].mean, 50.0);

        let table = report_table(&[("dict", &report)]);
        assert!(table.starts_with("label\tdict\nUr III\t100.00\n"));
        assert!(table.ends_with("Overall\t50.00\n"));

        let stray = BTreeMap::from([("z".to_string(), String::new())]);
        assert!(matches!(
            evaluate_corpus(&stray, &refs, &P),
            Err(Error::UnknownPrediction(_))
        ));
        assert!(evaluate_corpus(&BTreeMap::new(), &refs, &P).is_err());
    }
}
