//! Reading → sign name → Unicode dictionaries.
//!
//! A sign list is read from newline-delimited JSON, one sign per line:
//!
//! ```text
//! {"name": "KA", "unicode": ["12157"], "readings": [{"v": "ka", "count": 50}, {"v": "dug4"}]}
//! ```
//!
//! `unicode` may be `null` for signs without an encoding. A reading's
//! homophone index is written as ASCII digits after the base (`lil2`); Unicode
//! subscripts are accepted and folded to ASCII, a missing index means 1 and a
//! trailing `x` marks an unknown index. An explicit `"n"` field may carry the
//! index instead. Missing counts are 0.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ratio::Ratio;

/// The bundled fixture list covering the signs used in the examples and tests.
pub const MINI_SIGNLIST: &str = include_str!("../data/mini_signlist.ndjson");

const CUNEIFORM_BLOCKS: std::ops::RangeInclusive<u32> = 0x12000..=0x1254F;

/// Replaces subscript digits with ASCII digits and `ₓ` with `x`.
pub fn fold_subscripts(s: &str) -> Cow<'_, str> {
    if !s.chars().any(is_subscript) {
        return Cow::Borrowed(s);
    }
    Cow::Owned(
        s.chars()
            .map(|c| match c {
                '₀'..='₉' => char::from(b'0' + (c as u32 - '₀' as u32) as u8),
                'ₓ' => 'x',
                other => other,
            })
            .collect(),
    )
}

fn is_subscript(c: char) -> bool {
    matches!(c, '₀'..='₉' | 'ₓ')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HomophoneIndex {
    Known(NonZeroU32),
    Unknown,
}

impl HomophoneIndex {
    pub const ONE: HomophoneIndex = HomophoneIndex::Known(NonZeroU32::MIN);

    pub fn known(n: u32) -> Option<Self> {
        NonZeroU32::new(n).map(HomophoneIndex::Known)
    }
}

/// One value of a sign: a lowercase base plus a homophone index, optionally
/// wrapped in a numeric quantity (`3(diš)`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReadingValue {
    base: String,
    index: HomophoneIndex,
    quantity: Option<NonZeroU32>,
}

impl ReadingValue {
    pub fn new(base: impl Into<String>, index: HomophoneIndex) -> Result<Self> {
        let base = base.into();
        if !valid_base(&base) {
            return Err(Error::InvalidReading(base));
        }
        Ok(ReadingValue {
            base,
            index,
            quantity: None,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let folded = fold_subscripts(s);
        let s = folded.as_ref();
        let invalid = || Error::InvalidReading(s.to_string());

        if let (Some(open), true) = (s.find('('), s.ends_with(')')) {
            let (quantity, rest) = s.split_at(open);
            if quantity.is_empty() || !quantity.bytes().all(|b| b.is_ascii_digit()) {
                return Err(invalid());
            }
            let quantity = quantity
                .parse::<u32>()
                .ok()
                .and_then(NonZeroU32::new)
                .ok_or_else(invalid)?;
            let mut inner = Self::parse_plain(&rest[1..rest.len() - 1]).map_err(|_| invalid())?;
            inner.quantity = Some(quantity);
            return Ok(inner);
        }
        Self::parse_plain(s)
    }

    fn parse_plain(s: &str) -> Result<Self> {
        let invalid = || Error::InvalidReading(s.to_string());
        let stem = s.trim_end_matches(|c: char| c.is_ascii_digit());
        let digits = &s[stem.len()..];
        let (base, index) = if !digits.is_empty() {
            let n = digits.parse::<u32>().map_err(|_| invalid())?;
            (stem, HomophoneIndex::known(n).ok_or_else(invalid)?)
        } else if s.chars().count() > 1 && s.ends_with('x') {
            (&s[..s.len() - 1], HomophoneIndex::Unknown)
        } else {
            (s, HomophoneIndex::ONE)
        };
        Self::new(base, index).map_err(|_| invalid())
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> HomophoneIndex {
        self.index
    }

    pub fn quantity(&self) -> Option<NonZeroU32> {
        self.quantity
    }

    pub fn with_index(mut self, index: HomophoneIndex) -> Self {
        self.index = index;
        self
    }

    pub fn with_quantity(mut self, quantity: Option<NonZeroU32>) -> Self {
        self.quantity = quantity;
        self
    }
}

fn valid_base(base: &str) -> bool {
    !base.is_empty()
        && !base.ends_with('x')
        && base
            .chars()
            .all(|c| (c.is_alphabetic() && !c.is_uppercase()) || c == '\'' || c == 'ʾ')
}

impl fmt::Display for ReadingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.quantity {
            write!(f, "{q}(")?;
        }
        f.write_str(&self.base)?;
        match self.index {
            HomophoneIndex::Known(n) if n.get() == 1 => {}
            HomophoneIndex::Known(n) => write!(f, "{n}")?,
            HomophoneIndex::Unknown => f.write_str("x")?,
        }
        if self.quantity.is_some() {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for ReadingValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReadingValue::parse(s)
    }
}

/// Canonical uppercase sign identifier, e.g. `KA` or `|KA×GAR|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignName(String);

impl SignName {
    pub fn parse(s: &str) -> Result<Self> {
        let name = fold_subscripts(s).into_owned();
        let invalid = || Error::InvalidSignName(s.to_string());
        if name.is_empty()
            || !name.chars().any(char::is_uppercase)
            || name.contains("...")
            || name.chars().any(|c| {
                c.is_lowercase()
                    || c.is_whitespace()
                    || matches!(c, '-' | '{' | '}' | '<' | '>' | '[' | ']')
            })
        {
            return Err(invalid());
        }
        if !name.matches('|').count().is_multiple_of(2) {
            return Err(invalid());
        }
        let mut depth = 0i32;
        for c in name.chars() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(invalid());
                    }
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(invalid());
        }
        Ok(SignName(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SignName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for SignName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignName::parse(s)
    }
}

/// The Unicode codepoints encoding one sign. Usually a single codepoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlyphCodes(Vec<char>);

impl GlyphCodes {
    pub fn new(chars: Vec<char>) -> Result<Self> {
        if chars.is_empty() {
            return Err(Error::InvalidGlyphCodes("empty codepoint list".into()));
        }
        Ok(GlyphCodes(chars))
    }

    pub fn single(c: char) -> Self {
        GlyphCodes(vec![c])
    }

    pub fn from_hex<S: AsRef<str>>(codes: &[S]) -> Result<Self> {
        let chars = codes
            .iter()
            .map(|code| {
                let code = code.as_ref();
                let digits = code
                    .strip_prefix("U+")
                    .or_else(|| code.strip_prefix("u+"))
                    .or_else(|| code.strip_prefix("0x"))
                    .unwrap_or(code);
                u32::from_str_radix(digits, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| {
                        Error::InvalidGlyphCodes(format!("`{code}` is not a scalar value"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        GlyphCodes::new(chars)
    }

    pub fn chars(&self) -> &[char] {
        &self.0
    }

    pub fn to_hex(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|&c| format!("{:04X}", c as u32))
            .collect()
    }

    pub fn is_cuneiform(&self) -> bool {
        self.0
            .iter()
            .all(|&c| CUNEIFORM_BLOCKS.contains(&(c as u32)))
    }
}

impl fmt::Display for GlyphCodes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = <Cow<'de, str>>::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(ReadingValue);
string_serde!(SignName);

#[derive(Debug, Clone, PartialEq)]
pub struct SignEntry {
    pub name: SignName,
    pub unicode: Option<GlyphCodes>,
    /// Sorted by count descending, then by reading value.
    pub readings: Vec<(ReadingValue, u64)>,
}

fn sort_readings(readings: &mut [(ReadingValue, u64)]) {
    readings.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// What to do when two signs claim the same reading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CollisionPolicy {
    #[default]
    Strict,
    /// Keep the earliest claimant and drop the reading from later ones.
    FirstWins,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawEntry {
    name: String,
    #[serde(default)]
    unicode: Option<Vec<String>>,
    #[serde(default)]
    readings: Vec<RawReading>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawReading {
    v: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(default)]
    count: u64,
}

impl RawEntry {
    fn into_entry(self) -> Result<SignEntry> {
        let name = SignName::parse(&self.name)?;
        let unicode = self
            .unicode
            .map(|codes| GlyphCodes::from_hex(&codes))
            .transpose()?;
        if let Some(codes) = &unicode {
            if !codes.is_cuneiform() {
                log::warn!("sign {name} has codepoints outside the cuneiform blocks");
            }
        }
        let mut readings = Vec::with_capacity(self.readings.len());
        for raw in self.readings {
            let mut value = ReadingValue::parse(&raw.v)?;
            if let Some(n) = raw.n {
                let index = HomophoneIndex::known(n)
                    .ok_or_else(|| Error::InvalidReading(format!("{} (index 0)", raw.v)))?;
                if value.index != HomophoneIndex::ONE && value.index != index {
                    return Err(Error::InvalidReading(format!(
                        "{} conflicts with index {n}",
                        raw.v
                    )));
                }
                value.index = index;
            }
            if readings.iter().any(|(r, _)| *r == value) {
                return Err(Error::InvalidReading(format!(
                    "{value} listed twice under {name}"
                )));
            }
            readings.push((value, raw.count));
        }
        sort_readings(&mut readings);
        Ok(SignEntry {
            name,
            unicode,
            readings,
        })
    }
}

/// Immutable, fully indexed sign dictionary.
#[derive(Debug, Clone, Default)]
pub struct SignList {
    entries: Vec<SignEntry>,
    by_name: BTreeMap<SignName, usize>,
    by_reading: BTreeMap<ReadingValue, usize>,
    by_glyph: BTreeMap<GlyphCodes, Vec<usize>>,
    longest_glyph: usize,
}

impl SignList {
    /// Parses an NDJSON sign list. Blank lines are ignored.
    pub fn load(source: &[u8], policy: CollisionPolicy) -> Result<Self> {
        let text = std::str::from_utf8(source).map_err(|e| Error::Record {
            line: 1 + source[..e.valid_up_to()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count(),
            message: "sign list is not valid UTF-8".into(),
        })?;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawEntry = serde_json::from_str(line).map_err(|source| Error::Json {
                line: i + 1,
                source,
            })?;
            let entry = raw.into_entry().map_err(|e| Error::Record {
                line: i + 1,
                message: e.to_string(),
            })?;
            entries.push(entry);
        }
        Self::from_entries(entries, policy)
    }

    pub fn mini() -> Self {
        Self::load(MINI_SIGNLIST.as_bytes(), CollisionPolicy::Strict)
            .expect("bundled sign list is valid")
    }

    pub fn from_entries(mut entries: Vec<SignEntry>, policy: CollisionPolicy) -> Result<Self> {
        let names: Vec<SignName> = entries.iter().map(|e| e.name.clone()).collect();
        let mut by_name = BTreeMap::new();
        let mut by_reading: BTreeMap<ReadingValue, usize> = BTreeMap::new();
        for (i, entry) in entries.iter_mut().enumerate() {
            if by_name.insert(entry.name.clone(), i).is_some() {
                return Err(Error::DuplicateSign(entry.name.to_string()));
            }
            let mut kept = Vec::with_capacity(entry.readings.len());
            for (reading, count) in entry.readings.drain(..) {
                match by_reading.get(&reading) {
                    None => {
                        by_reading.insert(reading.clone(), i);
                        kept.push((reading, count));
                    }
                    Some(&owner) => {
                        let first = names[owner].to_string();
                        match policy {
                            CollisionPolicy::Strict => {
                                return Err(Error::ReadingCollision {
                                    reading: reading.to_string(),
                                    first,
                                    second: entry.name.to_string(),
                                })
                            }
                            CollisionPolicy::FirstWins => log::warn!(
                                "reading {reading} claimed by {first} and {}; keeping {first}",
                                entry.name
                            ),
                        }
                    }
                }
            }
            entry.readings = kept;
        }

        let mut by_glyph: BTreeMap<GlyphCodes, Vec<usize>> = BTreeMap::new();
        let mut longest_glyph = 0;
        for (i, entry) in entries.iter().enumerate() {
            if let Some(codes) = &entry.unicode {
                longest_glyph = longest_glyph.max(codes.chars().len());
                by_glyph.entry(codes.clone()).or_default().push(i);
            }
        }
        Ok(SignList {
            entries,
            by_name,
            by_reading,
            by_glyph,
            longest_glyph,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in load order.
    pub fn entries(&self) -> &[SignEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &SignName) -> Option<&SignEntry> {
        self.by_name.get(name).map(|&i| &self.entries[i])
    }

    /// Number of distinct readings indexed.
    pub fn reading_count(&self) -> usize {
        self.by_reading.len()
    }

    pub fn reading_to_name(&self, reading: &ReadingValue) -> Option<&SignName> {
        self.by_reading.get(reading).map(|&i| &self.entries[i].name)
    }

    pub fn name_to_unicode(&self, name: &SignName) -> Option<&GlyphCodes> {
        self.entry(name).and_then(|e| e.unicode.as_ref())
    }

    pub fn readings_of(&self, name: &SignName) -> Result<&[(ReadingValue, u64)]> {
        self.entry(name)
            .map(|e| e.readings.as_slice())
            .ok_or_else(|| Error::UnknownSign(name.to_string()))
    }

    /// Signs encoded by exactly these codepoints.
    pub fn signs_for_glyph<'a>(
        &'a self,
        glyph: &GlyphCodes,
    ) -> impl Iterator<Item = &'a SignEntry> + 'a {
        self.by_glyph
            .get(glyph)
            .into_iter()
            .flatten()
            .map(move |&i| &self.entries[i])
    }

    /// All readings of a glyph, merged over every sign that shares its
    /// codepoints, in `readings_of` order.
    pub fn glyph_readings(&self, glyph: &GlyphCodes) -> Cow<'_, [(ReadingValue, u64)]> {
        match self.by_glyph.get(glyph).map(Vec::as_slice) {
            None => Cow::Borrowed(&[]),
            Some([only]) => Cow::Borrowed(&self.entries[*only].readings),
            Some(many) => {
                let mut merged: Vec<_> = many
                    .iter()
                    .flat_map(|&i| self.entries[i].readings.iter().cloned())
                    .collect();
                sort_readings(&mut merged);
                Cow::Owned(merged)
            }
        }
    }

    pub fn has_glyph(&self, chars: &[char]) -> bool {
        // Allocation-free lookup isn't possible with a Vec key; glyphs are short.
        self.by_glyph.contains_key(&GlyphCodes(chars.to_vec()))
    }

    /// Length in codepoints of the longest encoded sign.
    pub fn longest_glyph(&self) -> usize {
        self.longest_glyph
    }

    /// Σ freq(n)·|readings(n)| / Σ freq(n).
    pub fn weighted_mean_polyvalence(&self, glyph_freq: &BTreeMap<SignName, u64>) -> Result<Ratio> {
        if glyph_freq.is_empty() {
            return Err(Error::Undefined("polyvalence of an empty frequency table"));
        }
        let mut numerator = 0u128;
        let mut denominator = 0u128;
        for (name, &freq) in glyph_freq {
            let readings = self.readings_of(name)?.len() as u128;
            numerator += u128::from(freq) * readings;
            denominator += u128::from(freq);
        }
        Ratio::new(numerator, denominator)
            .ok_or(Error::Undefined("polyvalence with all-zero frequencies"))
    }

    /// A copy of the list whose reading counts are replaced by `counts`;
    /// readings absent from `counts` get 0.
    pub fn with_reading_counts(&self, counts: &BTreeMap<ReadingValue, u64>) -> SignList {
        let mut list = self.clone();
        for entry in &mut list.entries {
            for (reading, count) in &mut entry.readings {
                *count = counts.get(reading).copied().unwrap_or(0);
            }
            sort_readings(&mut entry.readings);
        }
        list
    }

    /// Serializes back to NDJSON in load order.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            let raw = RawEntry {
                name: entry.name.to_string(),
                unicode: entry.unicode.as_ref().map(GlyphCodes::to_hex),
                readings: entry
                    .readings
                    .iter()
                    .map(|(r, count)| RawReading {
                        v: r.to_string(),
                        n: None,
                        count: *count,
                    })
                    .collect(),
            };
            out.push_str(&serde_json::to_string(&raw).expect("sign entries serialize"));
            out.push('\n');
        }
        out
    }
}
