use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::catalogue::{Genre, Period};
use super::record::TabletRecord;
use crate::error::{Error, Result};
use crate::rng::labelled_stream;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.90,
            validation: 0.05,
            test: 0.05,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let r = SplitRatios {
            train,
            validation,
            test,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = self.as_array();
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidRatios(format!(
                "{parts:?} has a negative or non-finite part"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > EPS {
            return Err(Error::InvalidRatios(format!(
                "{parts:?} sums to {sum}, not 1"
            )));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

impl std::str::FromStr for SplitRatios {
    type Err = Error;

    /// Parses `0.9,0.05,0.05` (or `90/5/5`, which is rescaled).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split([',', '/', ':'])
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidRatios(format!("`{s}`: {e}")))?;
        let [a, b, c] = parts[..] else {
            return Err(Error::InvalidRatios(format!("`{s}` needs three parts")));
        };
        let scale = if a + b + c > 1.0 + EPS { 100.0 } else { 1.0 };
        SplitRatios::new(a / scale, b / scale, c / scale)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub train: BTreeSet<String>,
    pub validation: BTreeSet<String>,
    pub test: BTreeSet<String>,
}

impl SplitAssignment {
    pub fn get(&self, split: Split) -> &BTreeSet<String> {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    fn get_mut(&mut self, split: Split) -> &mut BTreeSet<String> {
        match split {
            Split::Train => &mut self.train,
            Split::Validation => &mut self.validation,
            Split::Test => &mut self.test,
        }
    }

    pub fn split_of(&self, id: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|s| self.get(*s).contains(id))
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Largest-remainder allocation of `n` items to the three splits.
///
/// Seats left over after flooring go to the largest fractional parts. Parts
/// that tie are treated as a group: the group is served only if every member
/// can be, so no split is favoured over an equally entitled one. Seats still
/// left are then handed out singly in remainder order (split order breaks
/// ties), and finally to train.
pub fn allocate(n: usize, ratios: &SplitRatios) -> [usize; 3] {
    let exact = ratios.as_array().map(|r| {
        let e = n as f64 * r;
        if (e - e.round()).abs() < EPS {
            e.round()
        } else {
            e
        }
    });
    let mut counts = exact.map(|e| e.floor() as usize);
    let frac = [0, 1, 2].map(|i| exact[i] - exact[i].floor());
    let mut left = n - counts.iter().sum::<usize>();

    let mut order: Vec<usize> = (0..3).filter(|&i| frac[i] > EPS).collect();
    order.sort_by(|&a, &b| frac[b].total_cmp(&frac[a]).then(a.cmp(&b)));

    let mut served = [false; 3];
    let mut i = 0;
    while i < order.len() && left > 0 {
        let mut j = i + 1;
        while j < order.len() && (frac[order[i]] - frac[order[j]]).abs() < EPS {
            j += 1;
        }
        if j - i <= left {
            for &k in &order[i..j] {
                counts[k] += 1;
                served[k] = true;
            }
            left -= j - i;
        }
        i = j;
    }
    for &k in &order {
        if left == 0 {
            break;
        }
        if !served[k] {
            counts[k] += 1;
            left -= 1;
        }
    }
    counts[0] += left;
    counts
}

/// Period-stratified split. Lexical records are held out of the allocation
/// and added to train afterwards.
pub fn stratified_split(
    records: &[TabletRecord],
    ratios: &SplitRatios,
    seed: u64,
) -> Result<SplitAssignment> {
    ratios.validate()?;
    let mut assignment = SplitAssignment::default();
    let mut by_period: BTreeMap<Period, Vec<&str>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::DuplicateId(r.id.clone()));
        }
        if r.genre == Genre::Lexical {
            assignment.train.insert(r.id.clone());
        } else {
            by_period.entry(r.period).or_default().push(&r.id);
        }
    }

    for (period, mut ids) in by_period {
        ids.sort_unstable();
        ids.shuffle(&mut labelled_stream(seed, period.label()));
        let counts = allocate(ids.len(), ratios);
        let mut rest = ids.into_iter();
        for (split, count) in Split::ALL.into_iter().zip(counts) {
            let target = assignment.get_mut(split);
            target.extend(rest.by_ref().take(count).map(str::to_owned));
        }
    }
    Ok(assignment)
}
