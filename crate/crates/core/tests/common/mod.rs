#![allow(dead_code)]

use std::path::PathBuf;

use cuneitext::corpus::{Genre, Period, TabletRecord};
use cuneitext::signlist::{ReadingValue, SignList, SignName};
use cuneitext::translit::{StreamItem, TokenStream};
use cuneitext::{map_stream, SpecialToken, Token, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Readings of signs that have a glyph.
pub fn encodable_readings(list: &SignList) -> Vec<ReadingValue> {
    list.entries()
        .iter()
        .filter(|e| e.unicode.is_some())
        .flat_map(|e| e.readings.iter().map(|(r, _)| r.clone()))
        .collect()
}

pub struct Shape {
    pub lines: std::ops::RangeInclusive<usize>,
    pub words: std::ops::RangeInclusive<usize>,
    /// Probability that a line is made very long.
    pub long_line: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            lines: 1..=12,
            words: 0..=6,
            long_line: 0.0,
        }
    }
}

/// A random transliteration over the given readings, with determinatives,
/// sign-name readings, unknown signs and structural specials mixed in.
pub fn random_stream(
    rng: &mut ChaCha8Rng,
    readings: &[ReadingValue],
    shape: &Shape,
) -> TokenStream {
    let mut s = TokenStream::new();
    s.push_special(SpecialToken::Surface);
    let lines = rng.gen_range(shape.lines.clone());
    for _ in 0..lines {
        s.push_special(SpecialToken::Newline);
        if rng.gen_bool(0.05) {
            let extra = [
                SpecialToken::Ruling,
                SpecialToken::Column,
                SpecialToken::BlankSpace,
                SpecialToken::Surface,
            ];
            s.push_special(*extra.choose(rng).unwrap());
            continue;
        }
        let words = if rng.gen_bool(shape.long_line) {
            rng.gen_range(60..=200)
        } else {
            rng.gen_range(shape.words.clone())
        };
        for _ in 0..words {
            if rng.gen_bool(0.04) {
                s.push_special(SpecialToken::Ellipsis);
                continue;
            }
            let len = rng.gen_range(1..=3);
            let tokens: Vec<Token> = (0..len)
                .map(|_| match rng.gen_range(0..100) {
                    0..=3 => Token::Unknown,
                    4..=6 => Token::SignNameReading(SignName::parse("KA").unwrap()),
                    7..=10 => Token::Determinative(readings.choose(rng).unwrap().clone()),
                    _ => Token::Reading(readings.choose(rng).unwrap().clone()),
                })
                .collect();
            s.push(StreamItem::Word(Word::new(tokens).unwrap()));
        }
    }
    s
}

pub fn random_record(
    rng: &mut ChaCha8Rng,
    id: String,
    list: &SignList,
    shape: &Shape,
) -> TabletRecord {
    let readings = encodable_readings(list);
    let mapped = map_stream(&random_stream(rng, &readings, shape), list);
    TabletRecord {
        id,
        period: *Period::ALL.choose(rng).unwrap(),
        genre: *Genre::ALL.choose(rng).unwrap(),
        glyphs: mapped.glyphs,
        translit: mapped.translit,
    }
}

pub fn random_corpus(seed: u64, n: usize, list: &SignList, shape: &Shape) -> Vec<TabletRecord> {
    let mut rng = cuneitext::rng::stream(seed);
    (0..n)
        .map(|i| random_record(&mut rng, format!("P{seed:02}{i:06}"), list, shape))
        .collect()
}

/// A cdl document whose lemmas and delimiters spell out a random stream.
pub fn random_document(
    rng: &mut ChaCha8Rng,
    id: &str,
    list: &SignList,
) -> cuneitext::corpus::CdlDocument {
    use cuneitext::corpus::{CdlDocument, CdlNode};
    let stream = random_stream(rng, &encodable_readings(list), &Shape::default());
    let delimiter = |kind: &str| CdlNode::Delimiter { kind: kind.into() };
    let mut line = Vec::new();
    let mut nodes = Vec::new();
    for item in stream.items() {
        match item {
            StreamItem::Word(w) => line.push(CdlNode::Lemma {
                frag: w.to_string(),
            }),
            StreamItem::Special(s) => {
                let kind = match s {
                    SpecialToken::Ellipsis => {
                        line.push(CdlNode::Lemma {
                            frag: "[...]".into(),
                        });
                        continue;
                    }
                    SpecialToken::Surface => "obverse",
                    SpecialToken::Newline => "line-start",
                    SpecialToken::Ruling => "single-ruling",
                    SpecialToken::Column => "column",
                    SpecialToken::BlankSpace => "blank-space",
                    SpecialToken::Unk => unreachable!("generator emits no <UNK> special"),
                };
                if !line.is_empty() {
                    nodes.push(CdlNode::Chunk {
                        cdl: std::mem::take(&mut line),
                    });
                }
                nodes.push(delimiter(kind));
            }
        }
    }
    if !line.is_empty() {
        nodes.push(CdlNode::Chunk { cdl: line });
    }
    CdlDocument {
        textid: id.into(),
        cdl: nodes,
    }
}
