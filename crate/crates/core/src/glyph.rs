//! Mapping transliteration tokens back to Unicode glyphs.
//!
//! Each reading is looked up to its sign name, and each sign name to its
//! codepoints. Failures degrade to `<UNK>`:
//!
//! * a reading with no sign name is `<UNK>` on both sides;
//! * a sign name without codepoints is `<UNK>` on both sides;
//! * a sign name written in place of a reading keeps its glyph, but the
//!   transliteration side becomes `<UNK>` since the reading is uncertain.
//!
//! The glyph side carries no word separators. Every transliteration atom
//! (token or special) has exactly one glyph-side counterpart at the same
//! position.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::Ratio;
use crate::signlist::{GlyphCodes, SignList};
use crate::translit::{Atom, SpecialToken, StreamItem, Token, TokenStream, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GlyphToken {
    Glyph(GlyphCodes),
    Special(SpecialToken),
}

impl GlyphToken {
    pub const UNK: GlyphToken = GlyphToken::Special(SpecialToken::Unk);
}

impl fmt::Display for GlyphToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlyphToken::Glyph(g) => write!(f, "{g}"),
            GlyphToken::Special(s) => f.write_str(s.as_str()),
        }
    }
}

/// Counts behind the reading→name and name→Unicode success rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingStats {
    pub readings_total: u64,
    pub readings_named: u64,
    pub names_total: u64,
    pub names_unicoded: u64,
}

impl MappingStats {
    pub fn merge(&mut self, other: &MappingStats) {
        self.readings_total += other.readings_total;
        self.readings_named += other.readings_named;
        self.names_total += other.names_total;
        self.names_unicoded += other.names_unicoded;
    }

    /// `(readings_named / readings_total, names_unicoded / names_total)`.
    pub fn success_rates(&self) -> Result<(Ratio, Ratio)> {
        let named = Ratio::new(self.readings_named.into(), self.readings_total.into())
            .ok_or(Error::Undefined("no readings were mapped"))?;
        let unicoded = Ratio::new(self.names_unicoded.into(), self.names_total.into())
            .ok_or(Error::Undefined("no sign names were mapped"))?;
        Ok((named, unicoded))
    }
}

impl std::ops::Add for MappingStats {
    type Output = MappingStats;

    fn add(mut self, rhs: MappingStats) -> MappingStats {
        self.merge(&rhs);
        self
    }
}

/// Maps one token, returning the glyph, the possibly revised token and the
/// statistics contributed by this lookup.
pub fn map_token(token: &Token, list: &SignList) -> (GlyphToken, Token, MappingStats) {
    let mut stats = MappingStats::default();
    let unk = (GlyphToken::UNK, Token::Unknown);
    let (glyph, revised) = match token {
        Token::Reading(r) | Token::Determinative(r) => {
            stats.readings_total += 1;
            match list.reading_to_name(r) {
                None => unk,
                Some(name) => {
                    stats.readings_named += 1;
                    stats.names_total += 1;
                    match list.name_to_unicode(name) {
                        None => unk,
                        Some(codes) => {
                            stats.names_unicoded += 1;
                            (GlyphToken::Glyph(codes.clone()), token.clone())
                        }
                    }
                }
            }
        }
        Token::SignNameReading(name) => {
            stats.names_total += 1;
            match list.name_to_unicode(name) {
                None => unk,
                Some(codes) => {
                    stats.names_unicoded += 1;
                    (GlyphToken::Glyph(codes.clone()), Token::Unknown)
                }
            }
        }
        Token::Unknown => unk,
    };
    (glyph, revised, stats)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MappedStream {
    pub glyphs: Vec<GlyphToken>,
    pub translit: TokenStream,
    pub stats: MappingStats,
}

pub fn map_stream(stream: &TokenStream, list: &SignList) -> MappedStream {
    let mut out = MappedStream::default();
    for item in stream.items() {
        match item {
            StreamItem::Special(s) => {
                out.glyphs.push(GlyphToken::Special(*s));
                out.translit.push_special(*s);
            }
            StreamItem::Word(word) => {
                let mut revised = Vec::with_capacity(word.tokens().len());
                for token in word.tokens() {
                    let (glyph, token, stats) = map_token(token, list);
                    out.glyphs.push(glyph);
                    out.stats.merge(&stats);
                    revised.push(token);
                }
                out.translit
                    .push_word(Word::new(revised).expect("words are non-empty"));
            }
        }
    }
    out
}

/// Concatenates glyph tokens with no separators.
pub fn render_glyphs(glyphs: &[GlyphToken]) -> String {
    let mut out = String::new();
    for g in glyphs {
        match g {
            GlyphToken::Glyph(codes) => out.extend(codes.chars()),
            GlyphToken::Special(s) => out.push_str(s.as_str()),
        }
    }
    out
}

/// Parses a rendered glyph string. Multi-codepoint signs known to `list` are
/// recovered by longest match; without a list every codepoint is one glyph.
pub fn parse_glyphs(text: &str, list: Option<&SignList>) -> Vec<GlyphToken> {
    let chars: Vec<char> = text.chars().collect();
    let longest = list.map_or(1, |l| l.longest_glyph().max(1));
    let mut out = Vec::new();
    let mut i = 0;
    'scan: while i < chars.len() {
        for special in SpecialToken::ALL {
            let tag: Vec<char> = special.as_str().chars().collect();
            if chars[i..].starts_with(&tag) {
                out.push(GlyphToken::Special(special));
                i += tag.len();
                continue 'scan;
            }
        }
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let mut take = 1;
        if let Some(list) = list {
            for len in (2..=longest.min(chars.len() - i)).rev() {
                if list.has_glyph(&chars[i..i + len]) {
                    take = len;
                    break;
                }
            }
        }
        out.push(GlyphToken::Glyph(
            GlyphCodes::new(chars[i..i + take].to_vec()).expect("non-empty"),
        ));
        i += take;
    }
    out
}

/// True when glyphs and transliteration atoms align one-for-one: equal
/// specials face each other, glyphs face tokens, and glyph-side `<UNK>` faces
/// either an unknown token or an `<UNK>` special.
pub fn check_parity(glyphs: &[GlyphToken], translit: &TokenStream) -> bool {
    let mut atoms = translit.atoms();
    for g in glyphs {
        let Some(atom) = atoms.next() else {
            return false;
        };
        let ok = match (g, atom) {
            (GlyphToken::Special(a), Atom::Special(b)) => *a == b,
            (GlyphToken::Special(SpecialToken::Unk), Atom::Token(Token::Unknown)) => true,
            (GlyphToken::Glyph(_), Atom::Token(_)) => true,
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    atoms.next().is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signlist::{ReadingValue, SignName};
    use crate::translit::{normalize_annotations, parse_transliteration, tokenize_line};

    fn glyphs_of(text: &str) -> Vec<u32> {
        text.chars().map(|c| c as u32).collect()
    }

    #[test]
    fn reading_maps_to_glyph() {
        let list = SignList::mini();
        let en = Token::Reading(ReadingValue::parse("en").unwrap());
        let (g, t, stats) = map_token(&en, &list);
        assert_eq!(g, GlyphToken::Glyph(GlyphCodes::single('\u{12097}')));
        assert_eq!(t, en);
        assert_eq!(
            stats,
            MappingStats {
                readings_total: 1,
                readings_named: 1,
                names_total: 1,
                names_unicoded: 1
            }
        );
    }

    #[test]
    fn sign_name_keeps_glyph_loses_reading() {
        let list = SignList::mini();
        let ka = Token::SignNameReading(SignName::parse("KA").unwrap());
        let (g, t, stats) = map_token(&ka, &list);
        assert_eq!(g, GlyphToken::Glyph(GlyphCodes::single('\u{12157}')));
        assert_eq!(t, Token::Unknown);
        assert_eq!(stats.readings_total, 0);
        assert_eq!(stats.names_unicoded, 1);
    }

    #[test]
    fn fallbacks() {
        let list = SignList::mini();
        let zzz = Token::Reading(ReadingValue::parse("zzz").unwrap());
        let (g, t, stats) = map_token(&zzz, &list);
        assert_eq!((g, t), (GlyphToken::UNK, Token::Unknown));
        assert_eq!(stats.readings_named, 0);

        // Named but not encoded.
        let lak = Token::Reading(ReadingValue::parse("laksig").unwrap());
        let (g, t, stats) = map_token(&lak, &list);
        assert_eq!((g, t), (GlyphToken::UNK, Token::Unknown));
        assert_eq!((stats.names_total, stats.names_unicoded), (1, 0));

        let name = Token::SignNameReading(SignName::parse("|LAGAB×SIG7|").unwrap());
        assert_eq!(map_token(&name, &list).0, GlyphToken::UNK);
        let absent = Token::SignNameReading(SignName::parse("NOPE").unwrap());
        assert_eq!(map_token(&absent, &list).1, Token::Unknown);
    }

    #[test]
    fn two_line_table_example() {
        let list = SignList::mini();
        let stream = parse_transliteration("{d}en-lil2\nlugal kur-kur-ra");
        let mapped = map_stream(&stream, &list);
        let rendered = render_glyphs(&mapped.glyphs);
        assert_eq!(
            glyphs_of(&rendered),
            vec![
                0x1202D,
                0x12097,
                0x121A4,
                '\n' as u32,
                0x12217,
                0x121B3,
                0x121B3,
                0x1228F
            ]
        );
        assert_eq!(mapped.translit, stream);
        assert!(check_parity(&mapped.glyphs, &mapped.translit));
        assert_eq!(
            mapped.stats.success_rates().unwrap(),
            (ratio(1, 1), ratio(1, 1))
        );
    }

    fn ratio(a: u128, b: u128) -> Ratio {
        Ratio::new(a, b).unwrap()
    }

    #[test]
    fn empty_stream() {
        let mapped = map_stream(&TokenStream::new(), &SignList::mini());
        assert!(mapped.glyphs.is_empty());
        assert_eq!(mapped.stats, MappingStats::default());
        assert!(mapped.stats.success_rates().is_err());
    }

    #[test]
    fn one_unmappable_of_four() {
        let list = SignList::mini();
        let stream: TokenStream = tokenize_line(&normalize_annotations("lugal kur-zzz-ra"))
            .into_iter()
            .collect();
        let mapped = map_stream(&stream, &list);
        assert_eq!(
            mapped.stats.success_rates().unwrap(),
            (ratio(3, 4), ratio(1, 1))
        );
        assert_eq!(mapped.translit.to_string(), "lugal kur-<UNK>-ra");
        assert_eq!(render_glyphs(&mapped.glyphs), "𒈗𒆳<UNK>𒊏");
        assert!(check_parity(&mapped.glyphs, &mapped.translit));
    }

    #[test]
    fn glyph_string_round_trip() {
        let list = SignList::mini();
        let stream = parse_transliteration("<SURFACE>\n{d}en-lil2 ... x\n<RULING> KA");
        let mapped = map_stream(&stream, &list);
        let text = render_glyphs(&mapped.glyphs);
        assert_eq!(parse_glyphs(&text, Some(&list)), mapped.glyphs);
        assert_eq!(parse_glyphs(&text, None), mapped.glyphs);
    }

    #[test]
    fn multi_codepoint_glyphs_need_the_list() {
        let list = SignList::load(
            br#"{"name": "|A.AN|", "unicode": ["12000", "1202D"], "readings": [{"v": "am3"}]}
{"name": "A", "unicode": ["12000"], "readings": [{"v": "a"}]}"#,
            Default::default(),
        )
        .unwrap();
        let stream = parse_transliteration("am3-a");
        let mapped = map_stream(&stream, &list);
        let text = render_glyphs(&mapped.glyphs);
        assert_eq!(text.chars().count(), 3);
        assert_eq!(parse_glyphs(&text, Some(&list)), mapped.glyphs);
        assert_eq!(parse_glyphs(&text, None).len(), 3);
    }

    #[test]
    fn parity_rejects_misalignment() {
        let stream = parse_transliteration("en\nen");
        let g = GlyphToken::Glyph(GlyphCodes::single('\u{12097}'));
        let nl = GlyphToken::Special(SpecialToken::Newline);
        assert!(check_parity(&[g.clone(), nl.clone(), g.clone()], &stream));
        assert!(!check_parity(&[g.clone(), g.clone(), nl.clone()], &stream));
        assert!(!check_parity(&[g.clone(), nl], &stream));
        assert!(!check_parity(
            &[GlyphToken::UNK, GlyphToken::UNK],
            &parse_transliteration("en en")
        ));
    }
}
