mod common;

use std::collections::BTreeMap;

use common::{encodable_readings, random_record, random_stream, Shape};
use cuneitext::chunk::{chunk_tablet, reassembles};
use cuneitext::glyph::check_parity;
use cuneitext::translit::StreamItem;
use cuneitext::{
    map_stream, normalize_annotations, parse_transliteration, render_transliteration, GlyphToken,
    MappingStats, ReadingValue, SignList, SignName, Token,
};
use proptest::prelude::*;

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn raw_line() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            Just("lugal"),
            Just("kur"),
            Just("-"),
            Just(" "),
            Just("["),
            Just("]"),
            Just("<"),
            Just(">"),
            Just("<<"),
            Just(">>"),
            Just("#"),
            Just("?"),
            Just("!"),
            Just("⸢"),
            Just("⸣"),
            Just("{d}"),
            Just("..."),
            Just("."),
            Just("x"),
            Just("($"),
            Just("$)"),
            Just("<RULING>"),
            Just("<UNK>"),
            Just("$"),
            Just("ŋ"),
        ],
        0..24,
    )
    .prop_map(|parts| parts.concat())
}

proptest! {
    #[test]
    fn normalization_is_idempotent(raw in raw_line()) {
        let once = normalize_annotations(&raw);
        prop_assert_eq!(normalize_annotations(&once), once);
    }

    #[test]
    fn rendering_round_trips(seed in seed()) {
        let list = SignList::mini();
        let mut rng = cuneitext::rng::stream(seed);
        let stream = random_stream(&mut rng, &encodable_readings(&list), &Shape::default());
        let text = render_transliteration(&stream);
        prop_assert_eq!(parse_transliteration(&text), stream);
    }

    #[test]
    fn mapping_keeps_parity_and_counts(seed in seed()) {
        let list = SignList::mini();
        let mut rng = cuneitext::rng::stream(seed);
        let stream = random_stream(&mut rng, &encodable_readings(&list), &Shape::default());
        let mapped = map_stream(&stream, &list);
        prop_assert!(check_parity(&mapped.glyphs, &mapped.translit));

        // Recount from the input tokens and the list entries directly.
        let mut want = MappingStats::default();
        for item in stream.items() {
            let StreamItem::Word(w) = item else { continue };
            for t in w.tokens() {
                let sign = |name: &SignName| list.entries().iter().find(|e| &e.name == name);
                match t {
                    Token::Reading(r) | Token::Determinative(r) => {
                        want.readings_total += 1;
                        if let Some(e) = list.entries().iter().find(|e| e.readings.iter().any(|(x, _)| x == r)) {
                            want.readings_named += 1;
                            want.names_total += 1;
                            want.names_unicoded += u64::from(e.unicode.is_some());
                        }
                    }
                    Token::SignNameReading(n) => {
                        want.names_total += 1;
                        want.names_unicoded += u64::from(sign(n).is_some_and(|e| e.unicode.is_some()));
                    }
                    Token::Unknown => {}
                }
            }
        }
        prop_assert_eq!(mapped.stats, want);
    }

    #[test]
    fn mapped_glyphs_match_their_readings(seed in seed()) {
        let list = SignList::mini();
        let mut rng = cuneitext::rng::stream(seed);
        let rec = random_record(&mut rng, "P1".into(), &list, &Shape::default());
        for (g, a) in rec.glyphs.iter().zip(rec.translit.atoms()) {
            if let (GlyphToken::Glyph(codes), cuneitext::translit::Atom::Token(Token::Reading(r))) = (g, a) {
                let name = list.reading_to_name(r).unwrap();
                prop_assert_eq!(list.name_to_unicode(name), Some(codes));
            }
        }
    }

    #[test]
    fn readings_sorted_after_recount(counts in proptest::collection::vec(0u64..5, 5)) {
        let ka = ["ka", "dug4", "kiri3", "zuh", "inim"];
        let table: BTreeMap<ReadingValue, u64> = ka
            .iter()
            .zip(&counts)
            .map(|(r, c)| (ReadingValue::parse(r).unwrap(), *c))
            .collect();
        let list = SignList::mini().with_reading_counts(&table);
        let readings = list.readings_of(&SignName::parse("KA").unwrap()).unwrap();
        prop_assert_eq!(readings.len(), 5);
        for w in readings.windows(2) {
            prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        }
        for (r, c) in readings {
            prop_assert_eq!(table[r], *c);
        }
    }

    #[test]
    fn polyvalence_is_a_weighted_mean(freqs in proptest::collection::vec(0u64..50, 21)) {
        let list = SignList::mini();
        let table: BTreeMap<SignName, u64> = list
            .entries()
            .iter()
            .zip(&freqs)
            .map(|(e, f)| (e.name.clone(), *f))
            .collect();
        let total: u64 = table.values().sum();
        let weighted: u64 = list
            .entries()
            .iter()
            .map(|e| table.get(&e.name).copied().unwrap_or(0) * e.readings.len() as u64)
            .sum();
        match list.weighted_mean_polyvalence(&table) {
            Ok(r) => prop_assert_eq!(r, cuneitext::Ratio::new(weighted.into(), total.into()).unwrap()),
            Err(_) => prop_assert_eq!(total, 0),
        }
    }

    #[test]
    fn chunks_reassemble(seed in seed(), max_len in 2usize..200) {
        let list = SignList::mini();
        let mut rng = cuneitext::rng::stream(seed);
        let shape = Shape { lines: 0..=30, words: 0..=20, long_line: 0.1 };
        let rec = random_record(&mut rng, "P1".into(), &list, &shape);
        let chunks = chunk_tablet(&rec, max_len).unwrap();
        prop_assert!(reassembles(&rec, &chunks));
        prop_assert!(chunks.iter().all(|c| c.token_count() < max_len));
        prop_assert!(chunks.iter().enumerate().all(|(i, c)| c.chunk == i));
    }
}
