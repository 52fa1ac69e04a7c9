//! Non-neural transliteration baselines.

pub mod dict;
pub mod ngram;

pub use dict::{
    dict_transliterate, dict_transliterate_corpus, sample_reading, SamplerConfig, SamplingMode,
};
pub use ngram::{
    ngram_transliterate, ngram_transliterate_corpus, train_ngram, NgramModel, DEFAULT_LAMBDA,
};
