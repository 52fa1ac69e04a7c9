//! Corpus construction, glyph mapping, baselines and chrF evaluation for
//! Sumerian cuneiform transliterations.

pub mod baselines;
pub mod chunk;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod glyph;
pub mod ratio;
pub mod rng;
pub mod signlist;
pub mod translit;

pub use corpus::{Genre, Period, TabletRecord};
pub use error::{Error, Result};
pub use glyph::{map_stream, parse_glyphs, render_glyphs, GlyphToken, MappedStream, MappingStats};
pub use ratio::Ratio;
pub use signlist::{
    CollisionPolicy, GlyphCodes, HomophoneIndex, ReadingValue, SignEntry, SignList, SignName,
};
pub use translit::{
    normalize_annotations, parse_transliteration, render_transliteration, tokenize_line,
    SpecialToken, Token, TokenStream, Word,
};
