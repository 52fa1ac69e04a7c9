//! Line-aligned training chunks and up-sampling manifests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Genre, Period, TabletRecord};
use crate::error::{Error, Result};
use crate::glyph::{render_glyphs, GlyphToken};
use crate::translit::{render_transliteration, Atom, SpecialToken, TokenStream};

pub const DEFAULT_MAX_LEN: usize = 128;
pub const GROUP_SIZES: [usize; 5] = [16, 8, 4, 2, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct ChunkPair {
    pub id: String,
    pub chunk: usize,
    pub period: Period,
    pub genre: Genre,
    pub glyphs: Vec<GlyphToken>,
    pub translit: TokenStream,
    /// Half-open range of source lines. Pieces of a hard-split line share
    /// the same span.
    pub lines: (usize, usize),
}

impl ChunkPair {
    /// Atomic tokens on the longer side.
    pub fn token_count(&self) -> usize {
        self.glyphs.len().max(self.translit.atom_count())
    }

    pub fn to_row(&self) -> ChunkRow {
        ChunkRow {
            id: self.id.clone(),
            chunk: self.chunk,
            glyphs: render_glyphs(&self.glyphs),
            transliteration: render_transliteration(&self.translit),
            period: self.period,
            genre: self.genre,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkRow {
    pub id: String,
    pub chunk: usize,
    pub glyphs: String,
    pub transliteration: String,
    pub period: Period,
    pub genre: Genre,
}

/// Atom ranges of each line. A line ends with, and includes, its NEWLINE;
/// the last line may have none.
fn line_ranges(glyphs: &[GlyphToken]) -> Vec<(usize, usize)> {
    let mut lines = Vec::new();
    let mut start = 0;
    for (i, g) in glyphs.iter().enumerate() {
        if *g == GlyphToken::Special(SpecialToken::Newline) {
            lines.push((start, i + 1));
            start = i + 1;
        }
    }
    if start < glyphs.len() {
        lines.push((start, glyphs.len()));
    }
    lines
}

/// Splits a record into chunks of fewer than `max_len` tokens each. Starting
/// from each position, the largest group of whole lines from
/// [`GROUP_SIZES`] that fits is taken; a line that cannot fit alone is cut
/// into pieces of `max_len - 1` tokens.
pub fn chunk_tablet(rec: &TabletRecord, max_len: usize) -> Result<Vec<ChunkPair>> {
    if max_len < 2 {
        return Err(Error::InvalidParameter(format!(
            "max_len {max_len} must be at least 2"
        )));
    }
    if !rec.has_parity() {
        return Err(Error::InvalidDocument(format!(
            "{}: glyphs and transliteration are not aligned",
            rec.id
        )));
    }
    let lines = line_ranges(&rec.glyphs);
    let mut chunks = Vec::new();
    let mut push = |start: usize, end: usize, span: (usize, usize)| {
        chunks.push(ChunkPair {
            id: rec.id.clone(),
            chunk: chunks.len(),
            period: rec.period,
            genre: rec.genre,
            glyphs: rec.glyphs[start..end].to_vec(),
            translit: rec.translit.slice_atoms(start, end),
            lines: span,
        });
    };

    let mut i = 0;
    while i < lines.len() {
        let left = lines.len() - i;
        let fit = GROUP_SIZES
            .iter()
            .map(|&n| n.min(left))
            .find(|&n| lines[i + n - 1].1 - lines[i].0 < max_len);
        match fit {
            Some(n) => {
                push(lines[i].0, lines[i + n - 1].1, (i, i + n));
                i += n;
            }
            None => {
                let (start, end) = lines[i];
                log::warn!("{}: line {i} has {} tokens, splitting", rec.id, end - start);
                let mut s = start;
                while s < end {
                    let e = (s + max_len - 1).min(end);
                    push(s, e, (i, i + 1));
                    s = e;
                }
                i += 1;
            }
        }
    }
    Ok(chunks)
}

/// Chunks every record, ordered by (id, chunk index).
pub fn chunk_corpus(records: &[TabletRecord], max_len: usize) -> Result<Vec<ChunkPair>> {
    let per_tablet: Vec<Vec<ChunkPair>> = records
        .par_iter()
        .map(|r| chunk_tablet(r, max_len))
        .collect::<Result<_>>()?;
    let mut chunks: Vec<ChunkPair> = per_tablet.into_iter().flatten().collect();
    chunks.sort_by(|a, b| a.id.cmp(&b.id).then(a.chunk.cmp(&b.chunk)));
    Ok(chunks)
}

/// True when the chunks, in order, reproduce the record's glyphs and atoms.
pub fn reassembles(rec: &TabletRecord, chunks: &[ChunkPair]) -> bool {
    let glyphs = chunks.iter().flat_map(|c| c.glyphs.iter());
    let atoms: Vec<Atom<'_>> = chunks.iter().flat_map(|c| c.translit.atoms()).collect();
    glyphs.eq(rec.glyphs.iter()) && atoms.into_iter().eq(rec.translit.atoms())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub chunk: usize,
    pub repetitions: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub administrative_chunks: usize,
    pub non_administrative_chunks: usize,
    pub weighted_total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingManifest {
    pub factor: u32,
    pub summary: ManifestSummary,
    pub entries: Vec<ManifestEntry>,
}

/// Repeats every chunk of a non-administrative tablet `factor` times.
pub fn build_manifest(chunks: &[ChunkPair], factor: u32) -> Result<SamplingManifest> {
    if factor == 0 {
        return Err(Error::InvalidParameter(
            "up-sampling factor must be at least 1".into(),
        ));
    }
    let mut summary = ManifestSummary {
        administrative_chunks: 0,
        non_administrative_chunks: 0,
        weighted_total: 0,
    };
    let mut entries: Vec<ManifestEntry> = chunks
        .iter()
        .map(|c| {
            let repetitions = if c.genre == Genre::Administrative {
                summary.administrative_chunks += 1;
                1
            } else {
                summary.non_administrative_chunks += 1;
                factor
            };
            summary.weighted_total += u64::from(repetitions);
            ManifestEntry {
                id: c.id.clone(),
                chunk: c.chunk,
                repetitions,
            }
        })
        .collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id).then(a.chunk.cmp(&b.chunk)));
    Ok(SamplingManifest {
        factor,
        summary,
        entries,
    })
}

pub fn write_chunks<W: std::io::Write>(mut out: W, chunks: &[ChunkPair]) -> std::io::Result<()> {
    for c in chunks {
        serde_json::to_writer(&mut out, &c.to_row())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glyph::map_stream;
    use crate::signlist::SignList;
    use crate::translit::parse_transliteration;

    fn rec(text: &str, genre: Genre) -> TabletRecord {
        let m = map_stream(&parse_transliteration(text), &SignList::mini());
        TabletRecord {
            id: "P1".into(),
            period: Period::UrIII,
            genre,
            glyphs: m.glyphs,
            translit: m.translit,
        }
    }

    fn lines_of(words: usize, lines: usize) -> String {
        vec![vec!["en"; words].join(" "); lines].join("\n")
    }

    #[test]
    fn short_tablet_is_one_chunk() {
        let r = rec(&lines_of(5, 10), Genre::Administrative);
        let chunks = chunk_tablet(&r, 128).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].lines, (0, 10));
        assert!(reassembles(&r, &chunks));
    }

    #[test]
    fn long_lines_force_single_line_chunks() {
        let r = rec(&lines_of(100, 4), Genre::Administrative);
        let chunks = chunk_tablet(&r, 128).unwrap();
        assert_eq!(chunks.len(), 4);
        assert!(chunks.iter().all(|c| c.token_count() < 128));
        assert!(reassembles(&r, &chunks));
    }

    #[test]
    fn oversized_line_is_hard_split() {
        let r = rec(&format!("lugal\n{}\nen", lines_of(300, 1)), Genre::Letter);
        let chunks = chunk_tablet(&r, 128).unwrap();
        assert!(chunks.iter().all(|c| c.token_count() < 128));
        assert_eq!(
            chunks.iter().map(|c| c.token_count()).collect::<Vec<_>>(),
            [2, 127, 127, 47, 1]
        );
        assert_eq!(chunks[2].lines, (1, 2));
        assert!(reassembles(&r, &chunks));
        assert!(chunk_tablet(&r, 1).is_err());
    }

    #[test]
    fn groups_are_maximal() {
        // 20 lines of 10 tokens (9 words + NEWLINE, the last without): 16 lines
        // is 160 tokens, so 8 are taken; the remaining 12 (119 tokens) fit as
        // one group once 16 is clamped to what is left.
        let r = rec(&lines_of(9, 20), Genre::Administrative);
        let chunks = chunk_tablet(&r, 128).unwrap();
        let spans: Vec<_> = chunks.iter().map(|c| c.lines).collect();
        assert_eq!(spans, [(0, 8), (8, 20)]);
    }

    #[test]
    fn manifest_weights() {
        let admin = rec(&lines_of(100, 3), Genre::Administrative);
        let mut lit = rec(&lines_of(100, 2), Genre::Literary);
        lit.id = "P2".into();
        let chunks = chunk_corpus(&[lit, admin], 128).unwrap();
        let m = build_manifest(&chunks, 5).unwrap();
        assert_eq!(m.summary.administrative_chunks, 3);
        assert_eq!(m.summary.non_administrative_chunks, 2);
        assert_eq!(m.summary.weighted_total, 13);
        assert_eq!(m.entries[0].id, "P1");
        let identity = build_manifest(&chunks, 1).unwrap();
        assert!(identity.entries.iter().all(|e| e.repetitions == 1));
        assert!(build_manifest(&chunks, 0).is_err());
    }
}
