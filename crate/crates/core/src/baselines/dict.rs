use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::TabletRecord;
use crate::glyph::GlyphToken;
use crate::rng::{derive_seed, stream};
use crate::signlist::{ReadingValue, SignList};
use crate::translit::{Token, TokenStream, Word};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Draw a reading in proportion to its count.
    #[default]
    Weighted,
    /// Always the most frequent reading; ties go to the first in
    /// `readings_of` order.
    Argmax,
}

impl std::str::FromStr for SamplingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "weighted" => Ok(SamplingMode::Weighted),
            "argmax" => Ok(SamplingMode::Argmax),
            _ => Err(format!("unknown mode `{s}` (expected weighted or argmax)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub mode: SamplingMode,
    pub seed: u64,
}

/// Picks one reading by inverting the cumulative counts at a uniform draw.
/// All-zero counts fall back to a uniform choice.
pub fn sample_reading<'a>(
    readings: &'a [(ReadingValue, u64)],
    rng: &mut ChaCha8Rng,
) -> Option<&'a ReadingValue> {
    if readings.is_empty() {
        return None;
    }
    let total: u64 = readings.iter().map(|(_, c)| c).sum();
    if total == 0 {
        return Some(&readings[rng.gen_range(0..readings.len())].0);
    }
    let mut u = rng.gen_range(0..total);
    for (reading, count) in readings {
        if u < *count {
            return Some(reading);
        }
        u -= count;
    }
    unreachable!("draw is below the total")
}

/// Transliterates a glyph sequence one sign at a time. Specials pass
/// through; a glyph with no known reading becomes an unknown token.
pub fn dict_transliterate(
    glyphs: &[GlyphToken],
    list: &SignList,
    cfg: SamplerConfig,
) -> TokenStream {
    let mut rng = stream(cfg.seed);
    let mut out = TokenStream::new();
    for g in glyphs {
        match g {
            GlyphToken::Special(s) => out.push_special(*s),
            GlyphToken::Glyph(codes) => {
                let readings = list.glyph_readings(codes);
                let choice = match cfg.mode {
                    SamplingMode::Argmax => readings.first().map(|(r, _)| r),
                    SamplingMode::Weighted => sample_reading(&readings, &mut rng),
                };
                let token = choice.map_or(Token::Unknown, |r| Token::Reading(r.clone()));
                out.push_word(Word::single(token));
            }
        }
    }
    out
}

/// Runs the dictionary baseline over every record. Each tablet draws from
/// its own stream, seeded by the global seed and its id.
pub fn dict_transliterate_corpus(
    records: &[TabletRecord],
    list: &SignList,
    cfg: SamplerConfig,
) -> BTreeMap<String, TokenStream> {
    records
        .par_iter()
        .map(|r| {
            let tablet_cfg = SamplerConfig {
                seed: derive_seed(cfg.seed, &r.id),
                ..cfg
            };
            (
                r.id.clone(),
                dict_transliterate(&r.glyphs, list, tablet_cfg),
            )
        })
        .collect()
}
