use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Aligned, TabletRecord};
use crate::error::{Error, Result};
use crate::glyph::GlyphToken;
use crate::signlist::{GlyphCodes, ReadingValue, SignList};
use crate::translit::{Token, TokenStream, Word};

pub const DEFAULT_LAMBDA: f64 = 0.4;
const FORMAT_VERSION: u32 = 1;

type Context = (GlyphCodes, Vec<ReadingValue>);

/// Reading counts conditioned on the glyph and up to `order - 1` preceding
/// readings. Every shorter history is stored too, down to the empty one, so
/// decoding can back off.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    order: usize,
    lambda: f64,
    counts: BTreeMap<Context, BTreeMap<ReadingValue, u64>>,
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn count(
        &self,
        glyph: &GlyphCodes,
        history: &[ReadingValue],
        reading: &ReadingValue,
    ) -> u64 {
        self.context(glyph, history)
            .and_then(|c| c.get(reading))
            .copied()
            .unwrap_or(0)
    }

    fn context(
        &self,
        glyph: &GlyphCodes,
        history: &[ReadingValue],
    ) -> Option<&BTreeMap<ReadingValue, u64>> {
        // BTreeMap lookups need an owned key of the same type.
        self.counts.get(&(glyph.clone(), history.to_vec()))
    }

    /// Number of stored (glyph, history, reading) entries.
    pub fn len(&self) -> usize {
        self.counts.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Stupid-backoff score of `reading` after `history`, where `candidates`
    /// is the number of readings the glyph admits.
    pub fn score(
        &self,
        glyph: &GlyphCodes,
        history: &[ReadingValue],
        reading: &ReadingValue,
        candidates: usize,
    ) -> f64 {
        let m = history.len().min(self.order - 1);
        let history = &history[history.len() - m..];
        let mut weight = 1.0;
        for j in (0..=m).rev() {
            if let Some(ctx) = self.context(glyph, &history[m - j..]) {
                let c = ctx.get(reading).copied().unwrap_or(0);
                if c > 0 {
                    let total: u64 = ctx.values().sum();
                    return weight * c as f64 / total as f64;
                }
            }
            weight *= self.lambda;
        }
        weight / candidates as f64
    }

    pub fn to_json(&self) -> String {
        let counts = self
            .counts
            .iter()
            .flat_map(|((glyph, history), readings)| {
                readings.iter().map(move |(reading, &count)| CountRow {
                    glyph: glyph.to_hex(),
                    history: history.clone(),
                    reading: reading.clone(),
                    count,
                })
            })
            .collect();
        let file = ModelFile {
            version: FORMAT_VERSION,
            order: self.order,
            lambda: self.lambda,
            counts,
        };
        serde_json::to_string(&file).expect("model serializes") + "\n"
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_slice(bytes).map_err(|source| Error::Json { line: 1, source })?;
        if file.version != FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "model format version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        check_params(file.order, file.lambda)?;
        let mut counts: BTreeMap<Context, BTreeMap<ReadingValue, u64>> = BTreeMap::new();
        for row in file.counts {
            if row.history.len() >= file.order || row.count == 0 {
                return Err(Error::InvalidParameter(format!(
                    "count row for `{}` does not fit an order-{} model",
                    row.reading, file.order
                )));
            }
            let glyph = GlyphCodes::from_hex(&row.glyph)?;
            counts
                .entry((glyph, row.history))
                .or_default()
                .insert(row.reading, row.count);
        }
        Ok(NgramModel {
            order: file.order,
            lambda: file.lambda,
            counts,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    order: usize,
    lambda: f64,
    counts: Vec<CountRow>,
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    glyph: Vec<String>,
    history: Vec<ReadingValue>,
    reading: ReadingValue,
    count: u64,
}

fn check_params(order: usize, lambda: f64) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidParameter(
            "n-gram order must be at least 1".into(),
        ));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "backoff factor {lambda} is outside (0, 1)"
        )));
    }
    Ok(())
}

/// Counts aligned (glyph, history, reading) triples. Histories restart at
/// every special and at every position without a known reading.
pub fn train_ngram(records: &[TabletRecord], order: usize, lambda: f64) -> Result<NgramModel> {
    check_params(order, lambda)?;
    let mut counts: BTreeMap<Context, BTreeMap<ReadingValue, u64>> = BTreeMap::new();
    let mut pairs = 0u64;
    for record in records {
        let mut history: Vec<ReadingValue> = Vec::new();
        for pos in record.aligned() {
            match pos {
                Aligned::Break => history.clear(),
                Aligned::Pair { glyph, reading } => {
                    pairs += 1;
                    for j in 0..=history.len() {
                        let ctx = history[history.len() - j..].to_vec();
                        *counts
                            .entry((glyph.clone(), ctx))
                            .or_default()
                            .entry(reading.clone())
                            .or_insert(0) += 1;
                    }
                    history.push(reading.clone());
                    if history.len() >= order {
                        history.remove(0);
                    }
                }
            }
        }
    }
    if pairs == 0 {
        return Err(Error::InvalidParameter(
            "training corpus has no aligned glyph/reading pairs".into(),
        ));
    }
    Ok(NgramModel {
        order,
        lambda,
        counts,
    })
}

/// Greedy left-to-right decoding. Candidates are the glyph's readings in the
/// sign list; the first of equally scored candidates wins.
pub fn ngram_transliterate(
    glyphs: &[GlyphToken],
    model: &NgramModel,
    list: &SignList,
) -> TokenStream {
    let mut out = TokenStream::new();
    let mut history: Vec<ReadingValue> = Vec::new();
    for g in glyphs {
        match g {
            GlyphToken::Special(s) => {
                history.clear();
                out.push_special(*s);
            }
            GlyphToken::Glyph(codes) => {
                let readings = list.glyph_readings(codes);
                let mut best: Option<(&ReadingValue, f64)> = None;
                for (r, _) in readings.iter() {
                    let s = model.score(codes, &history, r, readings.len());
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((r, s));
                    }
                }
                match best {
                    Some((r, _)) => {
                        history.push(r.clone());
                        if history.len() >= model.order {
                            history.remove(0);
                        }
                        out.push_word(Word::single(Token::Reading(r.clone())));
                    }
                    None => {
                        history.clear();
                        out.push_word(Word::single(Token::Unknown));
                    }
                }
            }
        }
    }
    out
}

pub fn ngram_transliterate_corpus(
    records: &[TabletRecord],
    model: &NgramModel,
    list: &SignList,
) -> BTreeMap<String, TokenStream> {
    records
        .par_iter()
        .map(|r| (r.id.clone(), ngram_transliterate(&r.glyphs, model, list)))
        .collect()
}
