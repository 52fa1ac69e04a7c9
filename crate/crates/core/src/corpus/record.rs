use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::catalogue::{Genre, Period};
use crate::error::{Error, Result};
use crate::glyph::{check_parity, parse_glyphs, render_glyphs, GlyphToken};
use crate::signlist::{GlyphCodes, ReadingValue, SignList, SignName};
use crate::translit::{parse_transliteration, render_transliteration, Atom, Token, TokenStream};

/// One artifact with aligned glyph and transliteration sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct TabletRecord {
    pub id: String,
    pub period: Period,
    pub genre: Genre,
    pub glyphs: Vec<GlyphToken>,
    pub translit: TokenStream,
}

/// One position of a record as seen by the baselines: a glyph with a known
/// reading, or anything else (a special, an unknown), which breaks context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aligned<'a> {
    Pair {
        glyph: &'a GlyphCodes,
        reading: &'a ReadingValue,
    },
    Break,
}

impl TabletRecord {
    pub fn aligned(&self) -> impl Iterator<Item = Aligned<'_>> + '_ {
        self.glyphs
            .iter()
            .zip(self.translit.atoms())
            .map(|pair| match pair {
                (
                    GlyphToken::Glyph(glyph),
                    Atom::Token(Token::Reading(reading) | Token::Determinative(reading)),
                ) => Aligned::Pair { glyph, reading },
                _ => Aligned::Break,
            })
    }

    pub fn has_parity(&self) -> bool {
        check_parity(&self.glyphs, &self.translit)
    }

    pub fn to_row(&self) -> DatasetRow {
        DatasetRow {
            id: self.id.clone(),
            period: self.period,
            genre: self.genre,
            glyphs: render_glyphs(&self.glyphs),
            transliteration: render_transliteration(&self.translit),
        }
    }

    /// Rebuilds a record from its serialized row. `list` is needed only to
    /// recover signs encoded by more than one codepoint.
    pub fn from_row(row: DatasetRow, list: Option<&SignList>) -> Result<Self> {
        let record = TabletRecord {
            glyphs: parse_glyphs(&row.glyphs, list),
            translit: parse_transliteration(&row.transliteration),
            id: row.id,
            period: row.period,
            genre: row.genre,
        };
        if !record.has_parity() {
            return Err(Error::InvalidDocument(format!(
                "{}: glyphs and transliteration are not aligned",
                record.id
            )));
        }
        Ok(record)
    }
}

/// The serialized dataset record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub id: String,
    pub period: Period,
    pub genre: Genre,
    pub glyphs: String,
    pub transliteration: String,
}

pub fn write_jsonl<W: std::io::Write>(
    mut out: W,
    records: &[&TabletRecord],
) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, &record.to_row())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl(path: &Path, list: Option<&SignList>) -> Result<Vec<TabletRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: DatasetRow = serde_json::from_str(&line).map_err(|source| Error::Json {
            line: i + 1,
            source,
        })?;
        records.push(
            TabletRecord::from_row(row, list).map_err(|e| Error::Record {
                line: i + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(records)
}

/// Occurrences of each reading aligned with a glyph.
pub fn count_readings<'a>(
    records: impl IntoIterator<Item = &'a TabletRecord>,
) -> BTreeMap<ReadingValue, u64> {
    let mut counts = BTreeMap::new();
    for record in records {
        for pos in record.aligned() {
            if let Aligned::Pair { reading, .. } = pos {
                *counts.entry(reading.clone()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Occurrences of each sign over all glyph tokens.
pub fn glyph_frequencies<'a>(
    records: impl IntoIterator<Item = &'a TabletRecord>,
    list: &SignList,
) -> BTreeMap<SignName, u64> {
    let mut freq = BTreeMap::new();
    for record in records {
        for g in &record.glyphs {
            if let GlyphToken::Glyph(codes) = g {
                if let Some(sign) = list.signs_for_glyph(codes).next() {
                    *freq.entry(sign.name.clone()).or_insert(0) += 1;
                }
            }
        }
    }
    freq
}
