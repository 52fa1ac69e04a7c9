use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::catalogue::{Catalogue, CatalogueEntry};
use super::cdl::{parse_cdl, CdlDocument, RawItem};
use super::record::TabletRecord;
use crate::error::{Error, Result};
use crate::glyph::{map_stream, MappingStats};
use crate::signlist::SignList;
use crate::translit::{normalize_with, tokenize_with, NormalizeOptions, ParseReport, TokenStream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub parse: ParseReport,
    pub unknown_delimiters: u64,
    pub unrecognised_labels: u64,
}

impl BuildReport {
    pub fn merge(&mut self, other: &BuildReport) {
        self.parse.merge(&other.parse);
        self.unknown_delimiters += other.unknown_delimiters;
        self.unrecognised_labels += other.unrecognised_labels;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltTablet {
    pub record: TabletRecord,
    pub stats: MappingStats,
    pub report: BuildReport,
}

/// Normalizes, tokenizes and maps one document.
pub fn build_tablet(
    doc: &CdlDocument,
    entry: &CatalogueEntry,
    list: &SignList,
) -> Result<BuiltTablet> {
    build_tablet_with(doc, entry, list, NormalizeOptions::default())
}

pub fn build_tablet_with(
    doc: &CdlDocument,
    entry: &CatalogueEntry,
    list: &SignList,
    opts: NormalizeOptions,
) -> Result<BuiltTablet> {
    let raw = parse_cdl(doc)?;
    let mut report = BuildReport {
        unknown_delimiters: raw.unknown_delimiters,
        ..BuildReport::default()
    };
    let mut stream = TokenStream::new();
    for item in raw.lines() {
        match item {
            RawItem::Special(s) => stream.push_special(s),
            RawItem::Fragment(line) => {
                let normalized = normalize_with(&line, opts, &mut report.parse);
                stream.extend(tokenize_with(&normalized, &mut report.parse));
            }
        }
    }
    let mapped = map_stream(&stream, list);
    let (period, genre, unrecognised) = entry.resolve();
    report.unrecognised_labels = unrecognised;
    Ok(BuiltTablet {
        record: TabletRecord {
            id: raw.id,
            period,
            genre,
            glyphs: mapped.glyphs,
            translit: mapped.translit,
        },
        stats: mapped.stats,
        report,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuiltCorpus {
    /// Sorted by id.
    pub records: Vec<TabletRecord>,
    pub stats: MappingStats,
    pub report: BuildReport,
    /// Documents without a catalogue entry.
    pub skipped: Vec<String>,
}

/// Builds every document in parallel on the current rayon pool. The result
/// does not depend on the number of workers.
pub fn build_corpus(
    docs: &[CdlDocument],
    catalogue: &Catalogue,
    list: &SignList,
    opts: NormalizeOptions,
) -> Result<BuiltCorpus> {
    let mut seen = BTreeSet::new();
    for doc in docs {
        if !seen.insert(doc.textid.as_str()) {
            return Err(Error::DuplicateId(doc.textid.clone()));
        }
    }

    let built: Vec<Option<BuiltTablet>> = docs
        .par_iter()
        .map(|doc| match catalogue.get(&doc.textid) {
            Some(entry) => build_tablet_with(doc, entry, list, opts).map(Some),
            None => Ok(None),
        })
        .collect::<Result<_>>()?;

    let mut corpus = BuiltCorpus::default();
    for (doc, tablet) in docs.iter().zip(built) {
        match tablet {
            Some(t) => {
                corpus.stats.merge(&t.stats);
                corpus.report.merge(&t.report);
                corpus.records.push(t.record);
            }
            None => {
                log::warn!("{}: no catalogue entry, skipped", doc.textid);
                corpus.skipped.push(doc.textid.clone());
            }
        }
    }
    corpus.records.sort_by(|a, b| a.id.cmp(&b.id));
    corpus.skipped.sort();
    Ok(corpus)
}
