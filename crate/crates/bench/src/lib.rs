//! Synthetic inputs for the benchmarks.

use cuneitext::translit::StreamItem;
use cuneitext::{
    map_stream, Genre, Period, SignList, SpecialToken, TabletRecord, Token, TokenStream, Word,
};

/// A tablet of `lines` lines cycling through every reading of the list.
pub fn synthetic_tablet(
    list: &SignList,
    id: &str,
    lines: usize,
    words_per_line: usize,
) -> TabletRecord {
    let readings: Vec<_> = list
        .entries()
        .iter()
        .filter(|e| e.unicode.is_some())
        .flat_map(|e| e.readings.iter().map(|(r, _)| r.clone()))
        .collect();
    let mut stream = TokenStream::new();
    stream.push_special(SpecialToken::Surface);
    let mut k = 0;
    for _ in 0..lines {
        stream.push_special(SpecialToken::Newline);
        for _ in 0..words_per_line {
            let tokens = (0..2)
                .map(|_| {
                    k += 1;
                    Token::Reading(readings[k % readings.len()].clone())
                })
                .collect();
            stream.push(StreamItem::Word(Word::new(tokens).expect("two tokens")));
        }
    }
    let mapped = map_stream(&stream, list);
    TabletRecord {
        id: id.to_owned(),
        period: Period::UrIII,
        genre: Genre::Administrative,
        glyphs: mapped.glyphs,
        translit: mapped.translit,
    }
}
