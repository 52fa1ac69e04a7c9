//! Minimal reader for Oracc-style `cdl` documents.
//!
//! Only three node shapes are interpreted; any other field is ignored:
//!
//! ```text
//! {"node": "c", "cdl": [ ...children... ]}      chunk
//! {"node": "d", "type": "line-start"}           delimiter
//! {"node": "l", "frag": "lugal"}                lemma
//! ```
//!
//! The document itself is `{"textid": "Q001103", "cdl": [...]}` (`id` is
//! accepted in place of `textid`).

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::translit::SpecialToken;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "node")]
pub enum CdlNode {
    #[serde(rename = "c")]
    Chunk {
        #[serde(default)]
        cdl: Vec<CdlNode>,
    },
    #[serde(rename = "d")]
    Delimiter {
        #[serde(rename = "type", default)]
        kind: String,
    },
    #[serde(rename = "l")]
    Lemma { frag: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CdlDocument {
    #[serde(alias = "id")]
    pub textid: String,
    #[serde(default)]
    pub cdl: Vec<CdlNode>,
}

impl CdlDocument {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: CdlDocument =
            serde_json::from_slice(bytes).map_err(|e| Error::InvalidDocument(e.to_string()))?;
        if doc.textid.trim().is_empty() {
            return Err(Error::InvalidDocument("empty text id".into()));
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
            .map_err(|e| Error::InvalidDocument(format!("{}: {e}", path.display())))
    }
}

/// Loads every `*.json` document in `dir` except `catalogue.json`, in file
/// name order.
pub fn load_dir(dir: &Path) -> Result<Vec<CdlDocument>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_json = path.extension().is_some_and(|ext| ext == "json");
        let is_catalogue = path.file_name().is_some_and(|n| n == "catalogue.json");
        if path.is_file() && is_json && !is_catalogue {
            paths.push(path);
        }
    }
    paths.sort();
    paths.iter().map(|p| CdlDocument::load(p)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawItem {
    Fragment(String),
    Special(SpecialToken),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawText {
    pub id: String,
    pub items: Vec<RawItem>,
    pub unknown_delimiters: u64,
}

impl RawText {
    /// Groups consecutive fragments into lines joined by single spaces,
    /// interleaved with the structural specials.
    pub fn lines(&self) -> Vec<RawItem> {
        let mut out = Vec::new();
        let mut line: Vec<&str> = Vec::new();
        for item in &self.items {
            match item {
                RawItem::Fragment(f) => line.push(f),
                RawItem::Special(s) => {
                    if !line.is_empty() {
                        out.push(RawItem::Fragment(line.join(" ")));
                        line.clear();
                    }
                    out.push(RawItem::Special(*s));
                }
            }
        }
        if !line.is_empty() {
            out.push(RawItem::Fragment(line.join(" ")));
        }
        out
    }
}

pub fn delimiter_specials(kind: &str) -> Option<&'static [SpecialToken]> {
    use SpecialToken::*;
    Some(match kind {
        "obverse" | "reverse" | "left" | "right" | "top" | "bottom" | "edge" | "surface"
        | "face" | "seal" => &[Surface],
        "line-start" => &[Newline],
        "column" => &[Column],
        "ruling" | "single-ruling" | "double-ruling" | "triple-ruling" => &[Ruling],
        "blank" | "blank-space" => &[BlankSpace],
        "broken" | "missing" => &[Newline, Ellipsis],
        _ => return None,
    })
}

/// Depth-first flattening of the document.
pub fn parse_cdl(doc: &CdlDocument) -> Result<RawText> {
    let mut text = RawText {
        id: doc.textid.clone(),
        ..RawText::default()
    };
    let mut stack: Vec<std::slice::Iter<'_, CdlNode>> = vec![doc.cdl.iter()];
    while let Some(top) = stack.last_mut() {
        let Some(node) = top.next() else {
            stack.pop();
            continue;
        };
        match node {
            CdlNode::Chunk { cdl } => stack.push(cdl.iter()),
            CdlNode::Delimiter { kind } => match delimiter_specials(kind) {
                Some(specials) => text
                    .items
                    .extend(specials.iter().map(|&s| RawItem::Special(s))),
                None => {
                    log::warn!(
                        "{}: skipping delimiter of unknown type `{kind}`",
                        doc.textid
                    );
                    text.unknown_delimiters += 1;
                }
            },
            CdlNode::Lemma { frag } => {
                if frag.trim().is_empty() {
                    return Err(Error::InvalidDocument(format!(
                        "{}: lemma with empty fragment",
                        doc.textid
                    )));
                }
                text.items.push(RawItem::Fragment(frag.clone()));
            }
        }
    }
    Ok(text)
}
