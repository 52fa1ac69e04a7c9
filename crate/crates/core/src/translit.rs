//! Normalization and tokenization of scholarly transliterations.
//!
//! Annotation handling in [`normalize_annotations`]:
//!
//! | marker            | treatment                                  |
//! |-------------------|--------------------------------------------|
//! | `[…]`             | replaced by `...`                          |
//! | `<…>`             | deleted with its content                   |
//! | `<<…>>`           | markers removed, content kept              |
//! | `⌈ ⌉`, `⸢ ⸣`      | markers removed, content kept              |
//! | `!` `#` `?`       | removed, content kept                      |
//! | `($…$)`           | deleted with its content                   |
//! | other sigils      | removed and counted                        |
//!
//! Special-token tags (`<SURFACE>`, `<UNK>`, …) pass through untouched.

use std::fmt;

use serde::Serialize;

use crate::signlist::{ReadingValue, SignName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpecialToken {
    Surface,
    Newline,
    Ellipsis,
    Ruling,
    Column,
    BlankSpace,
    Unk,
}

impl SpecialToken {
    pub const ALL: [SpecialToken; 7] = [
        SpecialToken::Surface,
        SpecialToken::Newline,
        SpecialToken::Ellipsis,
        SpecialToken::Ruling,
        SpecialToken::Column,
        SpecialToken::BlankSpace,
        SpecialToken::Unk,
    ];

    /// The angle-bracket tags, in the order they are matched.
    pub const TAGGED: [SpecialToken; 5] = [
        SpecialToken::Surface,
        SpecialToken::Ruling,
        SpecialToken::Column,
        SpecialToken::BlankSpace,
        SpecialToken::Unk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecialToken::Surface => "<SURFACE>",
            SpecialToken::Newline => "\n",
            SpecialToken::Ellipsis => "...",
            SpecialToken::Ruling => "<RULING>",
            SpecialToken::Column => "<COLUMN>",
            SpecialToken::BlankSpace => "<BLANK_SPACE>",
            SpecialToken::Unk => "<UNK>",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for SpecialToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A glyph-bearing unit of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Reading(ReadingValue),
    Determinative(ReadingValue),
    SignNameReading(SignName),
    Unknown,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Reading(r) => write!(f, "{r}"),
            Token::Determinative(r) => write!(f, "{{{r}}}"),
            Token::SignNameReading(n) => write!(f, "{n}"),
            Token::Unknown => f.write_str(SpecialToken::Unk.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    tokens: Vec<Token>,
}

impl Word {
    /// `None` for an empty token list.
    pub fn new(tokens: Vec<Token>) -> Option<Self> {
        (!tokens.is_empty()).then_some(Word { tokens })
    }

    pub fn single(token: Token) -> Self {
        Word {
            tokens: vec![token],
        }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                let prev = &self.tokens[i - 1];
                if !matches!(prev, Token::Determinative(_))
                    && !matches!(token, Token::Determinative(_))
                {
                    f.write_str("-")?;
                }
            }
            write!(f, "{token}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StreamItem {
    Word(Word),
    Special(SpecialToken),
}

/// A single flattened position of a stream: one token or one special.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom<'a> {
    Token(&'a Token),
    Special(SpecialToken),
}

/// An ordered sequence of words and special tokens. Consecutive ellipses are
/// merged on insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenStream {
    items: Vec<StreamItem>,
}

impl TokenStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, item: StreamItem) {
        if item == StreamItem::Special(SpecialToken::Ellipsis)
            && self.items.last() == Some(&StreamItem::Special(SpecialToken::Ellipsis))
        {
            return;
        }
        self.items.push(item);
    }

    pub fn push_word(&mut self, word: Word) {
        self.push(StreamItem::Word(word));
    }

    pub fn push_special(&mut self, special: SpecialToken) {
        self.push(StreamItem::Special(special));
    }

    pub fn items(&self) -> &[StreamItem] {
        &self.items
    }

    pub fn into_items(self) -> Vec<StreamItem> {
        self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom<'_>> + '_ {
        self.items.iter().flat_map(|item| {
            let (tokens, special) = match item {
                StreamItem::Word(w) => (w.tokens.as_slice(), None),
                StreamItem::Special(s) => (&[][..], Some(Atom::Special(*s))),
            };
            tokens.iter().map(Atom::Token).chain(special)
        })
    }

    pub fn atom_count(&self) -> usize {
        self.items
            .iter()
            .map(|item| match item {
                StreamItem::Word(w) => w.tokens.len(),
                StreamItem::Special(_) => 1,
            })
            .sum()
    }

    /// The sub-stream covering atoms `start..end`. A word cut by either bound
    /// keeps only its tokens inside the range.
    pub fn slice_atoms(&self, start: usize, end: usize) -> TokenStream {
        let mut out = TokenStream::new();
        let mut pos = 0;
        for item in &self.items {
            if pos >= end {
                break;
            }
            match item {
                StreamItem::Special(s) => {
                    if pos >= start {
                        out.push_special(*s);
                    }
                    pos += 1;
                }
                StreamItem::Word(w) => {
                    let len = w.tokens.len();
                    let lo = start.saturating_sub(pos).min(len);
                    let hi = end.saturating_sub(pos).min(len);
                    if let Some(word) = Word::new(w.tokens[lo..hi].to_vec()) {
                        out.push_word(word);
                    }
                    pos += len;
                }
            }
        }
        out
    }

    /// Number of NEWLINE specials.
    pub fn line_count(&self) -> usize {
        self.items
            .iter()
            .filter(|i| **i == StreamItem::Special(SpecialToken::Newline))
            .count()
    }
}

impl FromIterator<StreamItem> for TokenStream {
    fn from_iter<I: IntoIterator<Item = StreamItem>>(iter: I) -> Self {
        let mut stream = TokenStream::new();
        iter.into_iter().for_each(|item| stream.push(item));
        stream
    }
}

impl Extend<StreamItem> for TokenStream {
    fn extend<I: IntoIterator<Item = StreamItem>>(&mut self, iter: I) {
        iter.into_iter().for_each(|item| self.push(item));
    }
}

/// Canonical text form: items separated by single spaces, except that no
/// space is written next to a line break.
pub fn render_transliteration(stream: &TokenStream) -> String {
    let mut out = String::new();
    let mut prev_newline = true;
    for item in &stream.items {
        let is_newline = *item == StreamItem::Special(SpecialToken::Newline);
        if !prev_newline && !is_newline {
            out.push(' ');
        }
        match item {
            StreamItem::Word(w) => out.push_str(&w.to_string()),
            StreamItem::Special(s) => out.push_str(s.as_str()),
        }
        prev_newline = is_newline;
    }
    out
}

impl fmt::Display for TokenStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_transliteration(self))
    }
}

/// Warning counters collected while normalizing and tokenizing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub unbalanced_markers: u64,
    pub unknown_sigils: u64,
    pub empty_words: u64,
    pub unparsed_items: u64,
}

impl ParseReport {
    pub fn merge(&mut self, other: &ParseReport) {
        self.unbalanced_markers += other.unbalanced_markers;
        self.unknown_sigils += other.unknown_sigils;
        self.empty_words += other.empty_words;
        self.unparsed_items += other.unparsed_items;
    }

    pub fn total(&self) -> u64 {
        self.unbalanced_markers + self.unknown_sigils + self.empty_words + self.unparsed_items
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Also treat ASCII `[.` / `.]` as partially-visible markers.
    pub ascii_upper_brackets: bool,
}

pub fn normalize_annotations(raw: &str) -> String {
    normalize_with(
        raw,
        NormalizeOptions::default(),
        &mut ParseReport::default(),
    )
}

const KEPT_SYMBOLS: &[char] = &[
    '-', '.', '{', '}', '|', '×', '%', '+', '(', ')', '\'', 'ʾ', '/', '@', '~', '&', '*',
];

pub fn normalize_with(raw: &str, opts: NormalizeOptions, report: &mut ParseReport) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let n = chars.len();
    let starts_with = |i: usize, pat: &str| {
        let mut rest = chars[i.min(n)..].iter();
        pat.chars().all(|p| rest.next() == Some(&p))
    };
    let find_from = |from: usize, pat: &str| (from..n).find(|&k| starts_with(k, pat));

    let mut out = String::with_capacity(raw.len());
    // Positions of pending `>>` closers for open `<<` spans.
    let mut double_closers: Vec<usize> = Vec::new();
    let mut i = 0;
    'scan: while i < n {
        // Closers that fell inside a deleted span are gone.
        while double_closers.last().is_some_and(|&k| k < i) {
            double_closers.pop();
        }
        if double_closers.last() == Some(&i) {
            double_closers.pop();
            i += 2;
            continue;
        }
        for tag in SpecialToken::TAGGED {
            if starts_with(i, tag.as_str()) {
                if tag == SpecialToken::Unk {
                    out.push_str(tag.as_str());
                } else {
                    out.push(' ');
                    out.push_str(tag.as_str());
                    out.push(' ');
                }
                i += tag.as_str().chars().count();
                continue 'scan;
            }
        }
        let c = chars[i];
        if opts.ascii_upper_brackets {
            if starts_with(i, "[.") && !starts_with(i, "[..") {
                i += 2;
                continue;
            }
            if starts_with(i, ".]") && (i == 0 || chars[i - 1] != '.') {
                i += 2;
                continue;
            }
        }
        match c {
            '[' => match find_from(i + 1, "]") {
                Some(close) => {
                    out.push_str("...");
                    i = close + 1;
                }
                None => {
                    report.unbalanced_markers += 1;
                    i += 1;
                }
            },
            '<' if starts_with(i, "<<") => {
                let limit = double_closers.last().copied().unwrap_or(n);
                match find_from(i + 2, ">>").filter(|&k| k < limit) {
                    Some(close) => double_closers.push(close),
                    None => report.unbalanced_markers += 1,
                }
                i += 2;
            }
            '<' => match find_from(i + 1, ">") {
                Some(close) => i = close + 1,
                None => {
                    report.unbalanced_markers += 1;
                    i += 1;
                }
            },
            '(' if starts_with(i, "($") => match find_from(i + 2, "$)") {
                Some(close) => i = close + 2,
                None => {
                    report.unbalanced_markers += 1;
                    i += 2;
                }
            },
            ']' | '>' => {
                report.unbalanced_markers += 1;
                i += 1;
            }
            '⌈' | '⌉' | '⸢' | '⸣' | '!' | '#' | '?' => i += 1,
            c if c.is_alphanumeric() || c.is_whitespace() || KEPT_SYMBOLS.contains(&c) => {
                out.push(c);
                i += 1;
            }
            _ => {
                report.unknown_sigils += 1;
                i += 1;
            }
        }
    }
    tidy(&merge_ellipses(&out))
}

/// Collapses runs of three or more dots to `...` and merges ellipses that are
/// separated only by whitespace or hyphens.
fn merge_ellipses(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '.' {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let run = chars[i..].iter().take_while(|&&c| c == '.').count();
        if run < 3 {
            out.extend(&chars[i..i + run]);
            i += run;
            continue;
        }
        out.push_str("...");
        i += run;
        loop {
            let gap = chars[i..]
                .iter()
                .take_while(|&&c| c == '-' || c.is_whitespace())
                .count();
            let dots = chars[i + gap..].iter().take_while(|&&c| c == '.').count();
            if dots >= 3 {
                i += gap + dots;
            } else {
                break;
            }
        }
    }
    out
}

/// Collapses whitespace and repairs hyphens left behind by deletions.
fn tidy(s: &str) -> String {
    let mut words = Vec::new();
    for word in s.split_whitespace() {
        let mut fixed = String::with_capacity(word.len());
        for c in word.chars() {
            if c == '-' && fixed.ends_with('-') {
                continue;
            }
            fixed.push(c);
        }
        let trimmed = fixed.trim_matches('-');
        if !trimmed.is_empty() {
            words.push(trimmed.to_string());
        }
    }
    words.join(" ")
}

pub fn tokenize_line(normalized: &str) -> Vec<StreamItem> {
    tokenize_with(normalized, &mut ParseReport::default())
}

pub fn tokenize_with(normalized: &str, report: &mut ParseReport) -> Vec<StreamItem> {
    let mut stream = TokenStream::new();
    for raw in normalized.split_whitespace() {
        if let Some(special) = SpecialToken::from_tag(raw) {
            if special != SpecialToken::Unk {
                stream.push_special(special);
                continue;
            }
        }
        for (k, piece) in raw.split("...").enumerate() {
            if k > 0 {
                stream.push_special(SpecialToken::Ellipsis);
            }
            let piece = piece.trim_matches('-');
            if piece.is_empty() {
                continue;
            }
            match parse_word(piece, report) {
                Some(word) => stream.push_word(word),
                None => {
                    report.empty_words += 1;
                    log::debug!("dropping empty word in `{raw}`");
                }
            }
        }
    }
    stream.into_items()
}

/// Parses a multi-line transliteration (as produced by
/// [`render_transliteration`]) back into a stream.
pub fn parse_transliteration(text: &str) -> TokenStream {
    let mut stream = TokenStream::new();
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            stream.push_special(SpecialToken::Newline);
        }
        stream.extend(tokenize_line(line));
    }
    stream
}

fn parse_word(piece: &str, report: &mut ParseReport) -> Option<Word> {
    let chars: Vec<char> = piece.chars().collect();
    let mut tokens = Vec::new();
    let mut buf = String::new();
    let mut in_pipe = false;
    let mut depth = 0usize;
    let mut i = 0;

    let flush = |buf: &mut String, tokens: &mut Vec<Token>, report: &mut ParseReport| {
        if !buf.is_empty() {
            tokens.push(classify(buf, false, report));
            buf.clear();
        }
    };

    while i < chars.len() {
        let c = chars[i];
        match c {
            '|' => {
                in_pipe = !in_pipe;
                buf.push(c);
            }
            '(' => {
                depth += 1;
                buf.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                buf.push(c);
            }
            '-' if !in_pipe && depth == 0 => flush(&mut buf, &mut tokens, report),
            '{' if !in_pipe => {
                flush(&mut buf, &mut tokens, report);
                let close = chars[i + 1..].iter().position(|&c| c == '}');
                match close {
                    Some(off) => {
                        let inner: String = chars[i + 1..i + 1 + off].iter().collect();
                        if inner.is_empty() {
                            report.empty_words += 1;
                        } else {
                            tokens.push(classify(&inner, true, report));
                        }
                        i += off + 2;
                        continue;
                    }
                    None => {
                        report.unbalanced_markers += 1;
                    }
                }
            }
            '<' => {
                let close = chars[i + 1..].iter().position(|&c| c == '>');
                match close {
                    Some(off) => {
                        let tag: String = chars[i..=i + 1 + off].iter().collect();
                        flush(&mut buf, &mut tokens, report);
                        if tag != SpecialToken::Unk.as_str() {
                            report.unparsed_items += 1;
                        }
                        tokens.push(Token::Unknown);
                        i += off + 2;
                        continue;
                    }
                    None => report.unbalanced_markers += 1,
                }
            }
            _ => buf.push(c),
        }
        i += 1;
    }
    flush(&mut buf, &mut tokens, report);
    Word::new(tokens)
}

fn classify(item: &str, determinative: bool, report: &mut ParseReport) -> Token {
    if item == "x" || item == "X" {
        return Token::Unknown;
    }
    if item.chars().any(char::is_lowercase) {
        if let Ok(r) = ReadingValue::parse(item) {
            return if determinative {
                Token::Determinative(r)
            } else {
                Token::Reading(r)
            };
        }
    } else if let Ok(name) = SignName::parse(item) {
        return Token::SignNameReading(name);
    }
    report.unparsed_items += 1;
    log::debug!("unparsed transliteration item `{item}`");
    Token::Unknown
}
