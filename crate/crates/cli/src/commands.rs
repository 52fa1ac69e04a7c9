use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use cuneitext::baselines::{
    dict_transliterate_corpus, ngram_transliterate_corpus, train_ngram, SamplerConfig,
};
use cuneitext::chunk::{build_manifest, chunk_corpus, write_chunks};
use cuneitext::corpus::{
    build_corpus, count_readings, export_dataset, glyph_frequencies, load_dir, read_dataset_dir,
    read_jsonl, stratified_split, BuildReport, Catalogue, DatasetStats, Split, SplitAssignment,
    TabletRecord,
};
use cuneitext::eval::{evaluate_corpus, report_table};
use cuneitext::glyph::{map_stream, render_glyphs};
use cuneitext::translit::{normalize_with, tokenize_with, NormalizeOptions, ParseReport};
use cuneitext::{MappingStats, SignList, SpecialToken, TokenStream};
use serde::{Deserialize, Serialize};

use crate::args::{Baseline, BaselineArgs, Command};
use crate::config::RunConfig;

/// Marks failures that are not the caller's fault, such as an unwritable
/// output. These exit with status 2.
#[derive(Debug)]
pub struct Internal(pub String);

impl fmt::Display for Internal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .context(Internal(format!("creating {}", parent.display())))?;
    }
    std::fs::write(path, contents).context(Internal(format!("writing {}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("plain data serializes");
    bytes.push(b'\n');
    bytes
}

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    version: &'a str,
    inputs: Vec<&'a Path>,
    config: &'a RunConfig,
}

fn write_run(
    path: &Path,
    command: &str,
    inputs: Vec<&Path>,
    cfg: &RunConfig,
) -> anyhow::Result<()> {
    let record = RunRecord {
        command,
        version: env!("CARGO_PKG_VERSION"),
        inputs,
        config: cfg,
    };
    write_file(path, &to_json(&record))
}

/// Sidecar for a single output file: `out.jsonl` gets `out.run.json`.
fn sidecar(out: &Path) -> PathBuf {
    out.with_extension("run.json")
}

/// Records from one dataset file, or from every split file in a directory.
fn read_records(path: &Path, list: &SignList) -> anyhow::Result<Vec<TabletRecord>> {
    let mut records = if path.is_dir() {
        read_dataset_dir(path, Some(list))?
            .into_iter()
            .flat_map(|(_, records)| records)
            .collect()
    } else {
        read_jsonl(path, Some(list)).with_context(|| format!("reading {}", path.display()))?
    };
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}

#[derive(Serialize)]
struct BuildStats<'a> {
    #[serde(flatten)]
    dataset: &'a DatasetStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    build: Option<&'a BuildReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<&'a [String]>,
}

#[derive(Deserialize)]
struct StoredStats {
    mapping: MappingStats,
}

fn stored_mapping(dir: &Path) -> anyhow::Result<Option<MappingStats>> {
    let path = dir.join("stats.json");
    if !path.is_file() {
        return Ok(None);
    }
    let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    let stats: StoredStats =
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Some(stats.mapping))
}

pub fn run(command: &Command, cfg: &RunConfig) -> anyhow::Result<()> {
    match command {
        Command::Build { input, out } => build(input, out, cfg),
        Command::Split { input, out } => split(input, out, cfg),
        Command::Stats { input } => stats(input, cfg),
        Command::Map { text } => map(text, cfg),
        Command::Baseline { system } => baseline(system, cfg),
        Command::Eval {
            references,
            predictions,
            out,
        } => eval(references, predictions, out.as_deref(), cfg),
        Command::Chunk { input, out } => chunk(input, out, cfg),
    }
}

fn normalize_options(cfg: &RunConfig) -> NormalizeOptions {
    NormalizeOptions {
        ascii_upper_brackets: cfg.ascii_upper_brackets,
    }
}

fn build(input: &Path, out: &Path, cfg: &RunConfig) -> anyhow::Result<()> {
    if !input.is_dir() {
        bail!("{} is not a directory", input.display());
    }
    let catalogue_path = cfg
        .catalogue
        .clone()
        .unwrap_or_else(|| input.join("catalogue.json"));
    let catalogue =
        Catalogue::load(&catalogue_path).with_context(|| "loading catalogue (see --catalogue)")?;
    let list = cfg.sign_list()?;
    let docs = load_dir(input)?;
    let corpus = build_corpus(&docs, &catalogue, &list, normalize_options(cfg))?;
    if corpus.report.parse.total() > 0 || corpus.report.unknown_delimiters > 0 {
        log::warn!(
            "{} parse warnings, {} unknown delimiters",
            corpus.report.parse.total(),
            corpus.report.unknown_delimiters
        );
    }
    let assignment = stratified_split(&corpus.records, &cfg.ratios, cfg.seed)?;
    export_dataset(&corpus.records, &assignment, out)
        .map_err(|e| anyhow!(Internal(e.to_string())))?;
    let stats = DatasetStats::compute(&corpus.records, &assignment, corpus.stats);
    let record = BuildStats {
        dataset: &stats,
        build: Some(&corpus.report),
        skipped: Some(&corpus.skipped),
    };
    write_file(&out.join("stats.json"), &to_json(&record))?;
    write_run(
        &out.join("run.json"),
        "build",
        vec![input, &catalogue_path],
        cfg,
    )?;
    eprintln!(
        "built {} tablets ({} train, {} validation, {} test)",
        corpus.records.len(),
        assignment.train.len(),
        assignment.validation.len(),
        assignment.test.len()
    );
    Ok(())
}

fn split(input: &Path, out: &Path, cfg: &RunConfig) -> anyhow::Result<()> {
    let list = cfg.sign_list()?;
    let records = read_records(input, &list)?;
    let assignment = stratified_split(&records, &cfg.ratios, cfg.seed)?;
    export_dataset(&records, &assignment, out).map_err(|e| anyhow!(Internal(e.to_string())))?;
    let mapping = if input.is_dir() {
        stored_mapping(input)?
    } else {
        None
    };
    let stats = DatasetStats::compute(&records, &assignment, mapping.unwrap_or_default());
    let record = BuildStats {
        dataset: &stats,
        build: None,
        skipped: None,
    };
    write_file(&out.join("stats.json"), &to_json(&record))?;
    write_run(&out.join("run.json"), "split", vec![input], cfg)
}

fn stats(input: &Path, cfg: &RunConfig) -> anyhow::Result<()> {
    if !input.is_dir() {
        bail!("{} is not a dataset directory", input.display());
    }
    let list = cfg.sign_list()?;
    let mut assignment = SplitAssignment::default();
    let mut records = Vec::new();
    for (split, part) in read_dataset_dir(input, Some(&list))? {
        let ids = part.iter().map(|r| r.id.clone());
        match split {
            Split::Train => assignment.train.extend(ids),
            Split::Validation => assignment.validation.extend(ids),
            Split::Test => assignment.test.extend(ids),
        }
        records.extend(part);
    }
    let mapping = stored_mapping(input)?.unwrap_or_default();
    let stats = DatasetStats::compute(&records, &assignment, mapping);
    let mut out = stats.to_table();
    let train: Vec<&TabletRecord> = records
        .iter()
        .filter(|r| assignment.train.contains(&r.id))
        .collect();
    let counted = list.with_reading_counts(&count_readings(train.iter().copied()));
    let freq = glyph_frequencies(train.iter().copied(), &counted);
    match counted.weighted_mean_polyvalence(&freq) {
        Ok(r) => out.push_str(&format!("\nweighted polyvalence\t{:.4}\n", r.value())),
        Err(e) => log::warn!("polyvalence: {e}"),
    }
    std::io::stdout()
        .write_all(out.as_bytes())
        .context(Internal("writing to standard output".into()))
}

fn map(text: &str, cfg: &RunConfig) -> anyhow::Result<()> {
    let list = cfg.sign_list()?;
    let mut report = ParseReport::default();
    let mut stream = TokenStream::new();
    for (i, line) in text.lines().enumerate() {
        if i > 0 {
            stream.push_special(SpecialToken::Newline);
        }
        let normalized = normalize_with(line, normalize_options(cfg), &mut report);
        stream.extend(tokenize_with(&normalized, &mut report));
    }
    let mapped = map_stream(&stream, &list);
    let s = mapped.stats;
    if s.readings_named < s.readings_total || s.names_unicoded < s.names_total {
        log::warn!(
            "{} of {} readings and {} of {} sign names mapped",
            s.readings_named,
            s.readings_total,
            s.names_unicoded,
            s.names_total
        );
    }
    println!("{}", render_glyphs(&mapped.glyphs));
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Prediction {
    id: String,
    transliteration: String,
}

fn write_predictions(path: &Path, preds: &BTreeMap<String, TokenStream>) -> anyhow::Result<()> {
    let mut buf = BufWriter::new(Vec::new());
    for (id, stream) in preds {
        let row = Prediction {
            id: id.clone(),
            transliteration: stream.to_string(),
        };
        serde_json::to_writer(&mut buf, &row).expect("plain data serializes");
        buf.write_all(b"\n").expect("in-memory write");
    }
    write_file(path, &buf.into_inner().expect("in-memory flush"))
}

fn baseline(system: &Baseline, cfg: &RunConfig) -> anyhow::Result<()> {
    let (name, args): (&str, &BaselineArgs) = match system {
        Baseline::Dict(a) => ("baseline dict", a),
        Baseline::Ngram(a) => ("baseline ngram", a),
    };
    let list = cfg.sign_list()?;
    let train = read_records(&args.train, &list)?;
    let input = read_records(&args.input, &list)?;
    let counted = list.with_reading_counts(&count_readings(&train));
    let preds = match system {
        Baseline::Dict(_) => {
            if args.model_out.is_some() {
                log::warn!("--model-out is ignored by the dictionary baseline");
            }
            let sampler = SamplerConfig {
                mode: cfg.mode,
                seed: cfg.seed,
            };
            dict_transliterate_corpus(&input, &counted, sampler)
        }
        Baseline::Ngram(_) => {
            let model = train_ngram(&train, cfg.k, cfg.lambda)?;
            if let Some(path) = &args.model_out {
                write_file(path, model.to_json().as_bytes())?;
            }
            ngram_transliterate_corpus(&input, &model, &counted)
        }
    };
    write_predictions(&args.out, &preds)?;
    write_run(
        &sidecar(&args.out),
        name,
        vec![&args.train, &args.input],
        cfg,
    )
}

fn read_predictions(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut preds = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(&line)
            .with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        if preds.insert(p.id.clone(), p.transliteration).is_some() {
            bail!("{}: duplicate prediction for `{}`", path.display(), p.id);
        }
    }
    Ok(preds)
}

fn eval(
    references: &Path,
    predictions: &[String],
    out: Option<&Path>,
    cfg: &RunConfig,
) -> anyhow::Result<()> {
    let list = cfg.sign_list()?;
    let refs = read_records(references, &list)?;
    let mut systems = Vec::new();
    for arg in predictions {
        let (name, path) = match arg.split_once('=') {
            Some((name, path)) => (name.to_owned(), PathBuf::from(path)),
            None => {
                let path = PathBuf::from(arg);
                let stem = path
                    .file_stem()
                    .map_or("system".into(), |s| s.to_string_lossy().into_owned());
                (stem, path)
            }
        };
        if systems.iter().any(|(n, _, _)| *n == name) {
            bail!("system name `{name}` given twice");
        }
        let preds = read_predictions(&path)?;
        let report = evaluate_corpus(&preds, &refs, &cfg.chrf)
            .with_context(|| format!("scoring {}", path.display()))?;
        if !report.missing.is_empty() {
            log::warn!(
                "{name}: {} references have no prediction",
                report.missing.len()
            );
        }
        systems.push((name, path, report));
    }
    let table = report_table(
        &systems
            .iter()
            .map(|(n, _, r)| (n.as_str(), r))
            .collect::<Vec<_>>(),
    );
    if let Some(dir) = out {
        for (name, _, report) in &systems {
            write_file(
                &dir.join(format!("{name}.json")),
                report.to_json().as_bytes(),
            )?;
        }
        write_file(&dir.join("table.tsv"), table.as_bytes())?;
        let mut inputs: Vec<&Path> = vec![references];
        inputs.extend(systems.iter().map(|(_, p, _)| p.as_path()));
        write_run(&dir.join("run.json"), "eval", inputs, cfg)?;
    }
    std::io::stdout()
        .write_all(table.as_bytes())
        .context(Internal("writing to standard output".into()))
}

fn chunk(input: &Path, out: &Path, cfg: &RunConfig) -> anyhow::Result<()> {
    let list = cfg.sign_list()?;
    let records = read_records(input, &list)?;
    let chunks = chunk_corpus(&records, cfg.max_len)?;
    let manifest = build_manifest(&chunks, cfg.factor)?;
    let mut buf = Vec::new();
    write_chunks(&mut buf, &chunks).expect("in-memory write");
    write_file(&out.join("chunks.jsonl"), &buf)?;
    write_file(&out.join("manifest.json"), &to_json(&manifest))?;
    write_run(&out.join("run.json"), "chunk", vec![input], cfg)?;
    let s = manifest.summary;
    eprintln!(
        "{} chunks ({} administrative, {} other), {} weighted examples",
        chunks.len(),
        s.administrative_chunks,
        s.non_administrative_chunks,
        s.weighted_total
    );
    Ok(())
}
