use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use super::catalogue::{Genre, Period};
use super::record::{read_jsonl, write_jsonl, TabletRecord};
use super::split::{Split, SplitAssignment};
use crate::error::{Error, Result};
use crate::glyph::MappingStats;
use crate::signlist::SignList;

/// Writes `train.jsonl`, `validation.jsonl` and `test.jsonl` into `out_dir`,
/// each ordered by id. Records not in the assignment are not written.
pub fn export_dataset(
    records: &[TabletRecord],
    assignment: &SplitAssignment,
    out_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut sorted: Vec<&TabletRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    for split in Split::ALL {
        let ids = assignment.get(split);
        let subset: Vec<&TabletRecord> = sorted
            .iter()
            .copied()
            .filter(|r| ids.contains(&r.id))
            .collect();
        let path = out_dir.join(format!("{}.jsonl", split.as_str()));
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_jsonl(BufWriter::new(file), &subset).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Reads back the three split files written by [`export_dataset`].
pub fn read_dataset_dir(
    dir: &Path,
    list: Option<&SignList>,
) -> Result<[(Split, Vec<TabletRecord>); 3]> {
    let read = |split: Split| -> Result<(Split, Vec<TabletRecord>)> {
        let path = dir.join(format!("{}.jsonl", split.as_str()));
        Ok((split, read_jsonl(&path, list)?))
    };
    Ok([
        read(Split::Train)?,
        read(Split::Validation)?,
        read(Split::Test)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelCounts {
    pub label: &'static str,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rates {
    pub reading_to_name: Option<f64>,
    pub name_to_unicode: Option<f64>,
}

/// Corpus summary: mapping counts and per-label split sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub mapping: MappingStats,
    pub success_rates: Rates,
    pub tablets: LabelCounts,
    pub by_period: Vec<LabelCounts>,
    pub by_genre: Vec<LabelCounts>,
}

impl DatasetStats {
    pub fn compute(
        records: &[TabletRecord],
        assignment: &SplitAssignment,
        mapping: MappingStats,
    ) -> Self {
        let count = |label: &'static str, keep: &dyn Fn(&TabletRecord) -> bool| {
            let mut c = LabelCounts {
                label,
                train: 0,
                validation: 0,
                test: 0,
                total: 0,
            };
            for r in records.iter().filter(|r| keep(r)) {
                c.total += 1;
                match assignment.split_of(&r.id) {
                    Some(Split::Train) => c.train += 1,
                    Some(Split::Validation) => c.validation += 1,
                    Some(Split::Test) => c.test += 1,
                    None => {}
                }
            }
            c
        };
        let by_period = Period::ALL
            .iter()
            .map(|&p| count(p.label(), &|r| r.period == p))
            .filter(|c| c.total > 0)
            .collect();
        let by_genre = Genre::ALL
            .iter()
            .map(|&g| count(g.label(), &|r| r.genre == g))
            .filter(|c| c.total > 0)
            .collect();
        let rate = |n: u64, d: u64| (d > 0).then(|| n as f64 / d as f64);
        DatasetStats {
            mapping,
            success_rates: Rates {
                reading_to_name: rate(mapping.readings_named, mapping.readings_total),
                name_to_unicode: rate(mapping.names_unicoded, mapping.names_total),
            },
            tablets: count("All", &|_| true),
            by_period,
            by_genre,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize") + "\n"
    }

    /// Plain-text tables of the counts, one row per label.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let m = &self.mapping;
        let pct = |r: Option<f64>| r.map_or("n/a".to_string(), |v| format!("{:.2}%", v * 100.0));
        out.push_str("step\tmapped\ttotal\trate\n");
        out.push_str(&format!(
            "reading -> name\t{}\t{}\t{}\n",
            m.readings_named,
            m.readings_total,
            pct(self.success_rates.reading_to_name)
        ));
        out.push_str(&format!(
            "name -> unicode\t{}\t{}\t{}\n",
            m.names_unicoded,
            m.names_total,
            pct(self.success_rates.name_to_unicode)
        ));
        for (title, rows) in [("period", &self.by_period), ("genre", &self.by_genre)] {
            out.push_str(&format!("\n{title}\ttrain\tvalidation\ttest\ttotal\n"));
            for c in rows.iter().chain([&self.tablets]) {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    c.label, c.train, c.validation, c.test, c.total
                ));
            }
        }
        out
    }
}
