//! Period and genre labels and the catalogue that assigns them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

macro_rules! label_enum {
    ($name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }

            /// Exact match on the canonical label.
            pub fn from_label(s: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| v.label() == s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.label())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                $name::normalize(&s)
                    .ok_or_else(|| serde::de::Error::custom(format!("unknown label `{s}`")))
            }
        }
    };
}

label_enum!(Period {
    UrIII => "Ur III",
    OldAkkadian => "Old Akkadian",
    EarlyDynasticIIIb => "Early Dynastic IIIb",
    OldBabylonian => "Old Babylonian",
    LagashII => "Lagash II",
    EarlyDynasticIIIa => "Early Dynastic IIIa",
    EarlyDynasticIToII => "Early Dynastic I-II",
    Unknown => "Unknown",
    NeoAssyrian => "Neo-Assyrian",
    NeoBabylonian => "Neo-Babylonian",
    MiddleBabylonian => "Middle Babylonian",
});

label_enum!(Genre {
    Administrative => "Administrative",
    RoyalInscription => "Royal Inscription",
    Literary => "Literary",
    Letter => "Letter",
    Legal => "Legal",
    Unknown => "Unknown",
    Lexical => "Lexical",
    Liturgy => "Liturgy",
    MathScience => "Math/Science",
});

/// Lowercases, drops a trailing parenthetical (`"Ur III (ca. 2100-2000 BC)"`),
/// folds dashes and collapses whitespace.
fn fold_label(s: &str) -> String {
    let head = match s.find('(') {
        Some(i) => &s[..i],
        None => s,
    };
    head.replace(['–', '—'], "-")
        .replace('š', "sh")
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

impl Period {
    /// Maps an upstream period string onto a canonical label. `None` when
    /// the string is not recognised.
    pub fn normalize(s: &str) -> Option<Self> {
        use Period::*;
        let folded = fold_label(s);
        Some(match folded.as_str() {
            "ur iii" | "ur 3" | "neo-sumerian" | "ur iii period" => UrIII,
            "old akkadian" | "sargonic" | "oakk" => OldAkkadian,
            "early dynastic iiib" | "ed iiib" | "ed 3b" => EarlyDynasticIIIb,
            "early dynastic iiia" | "ed iiia" | "ed 3a" | "fara" => EarlyDynasticIIIa,
            "early dynastic i-ii"
            | "ed i-ii"
            | "ed 1-2"
            | "early dynastic i"
            | "early dynastic ii" => EarlyDynasticIToII,
            "old babylonian" | "ob" => OldBabylonian,
            "lagash ii" | "lagash 2" | "lagash ii period" => LagashII,
            "neo-assyrian" | "neo assyrian" => NeoAssyrian,
            "neo-babylonian" | "neo babylonian" => NeoBabylonian,
            "middle babylonian" | "middle-babylonian" => MiddleBabylonian,
            "unknown" | "uncertain" | "" => Unknown,
            _ => return None,
        })
    }
}

impl Genre {
    pub fn normalize(s: &str) -> Option<Self> {
        use Genre::*;
        let folded = fold_label(s);
        Some(match folded.as_str() {
            "administrative" | "administrative record" => Administrative,
            "royal inscription" | "royal/monumental" | "royal/votive" | "royal" => RoyalInscription,
            "literary" | "literature" => Literary,
            "letter" | "letters" => Letter,
            "legal" => Legal,
            "lexical" => Lexical,
            "liturgy" | "liturgical" => Liturgy,
            "math/science" | "mathematical" | "scientific" | "math" | "astronomical" => MathScience,
            "unknown" | "uncertain" | "" => Unknown,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogueEntry {
    #[serde(default)]
    pub period: Option<String>,
    #[serde(default)]
    pub genre: Option<String>,
}

impl CatalogueEntry {
    /// Resolved labels plus the number of strings that could not be
    /// recognised (each of which became `Unknown`).
    pub fn resolve(&self) -> (Period, Genre, u64) {
        let mut unrecognised = 0;
        let period = match self.period.as_deref() {
            None => Period::Unknown,
            Some(p) => Period::normalize(p).unwrap_or_else(|| {
                log::warn!("unrecognised period `{p}`");
                unrecognised += 1;
                Period::Unknown
            }),
        };
        let genre = match self.genre.as_deref() {
            None => Genre::Unknown,
            Some(g) => Genre::normalize(g).unwrap_or_else(|| {
                log::warn!("unrecognised genre `{g}`");
                unrecognised += 1;
                Genre::Unknown
            }),
        };
        (period, genre, unrecognised)
    }
}

/// JSON object mapping artifact id → `{period, genre}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Catalogue(pub BTreeMap<String, CatalogueEntry>);

impl Catalogue {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|source| Error::Json {
            line: source.line(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
            .map_err(|e| Error::InvalidDocument(format!("{}: {e}", path.display())))
    }

    pub fn get(&self, id: &str) -> Option<&CatalogueEntry> {
        self.0.get(id)
    }
}
