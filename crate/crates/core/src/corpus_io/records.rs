use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlation::Ratings;
use crate::error::{Error, Result};
use crate::metrics::{Hypotheses, Segment, WeightedReference};
use crate::text::tokenize;

/// System id to that system's hypotheses.
pub type SystemHypotheses = BTreeMap<String, Hypotheses>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Jsonl,
}

impl Format {
    /// `.jsonl`/`.json` selects JSON lines, anything else TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => Format::Jsonl,
            _ => Format::Tsv,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (expected tsv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    pub format: Format,
    /// Skip the first line.
    pub header: bool,
    /// Lowercase text before tokenizing.
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub segment_id: String,
    pub ref_id: String,
    pub weight: f64,
    pub is_original: bool,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub segment_id: String,
    pub system_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub segment_id: String,
    pub system_id: String,
    pub rating: f64,
}

/// Bounds of the raw rating scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingScale {
    pub min: f64,
    pub max: f64,
}

impl Default for RatingScale {
    fn default() -> Self {
        Self { min: 1.0, max: 5.0 }
    }
}

impl FromStr for RatingScale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| format!("rating scale `{s}` must look like MIN,MAX"))?;
        let min: f64 = lo.trim().parse().map_err(|_| format!("invalid scale minimum `{lo}`"))?;
        let max: f64 = hi.trim().parse().map_err(|_| format!("invalid scale maximum `{hi}`"))?;
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(format!("rating scale {min},{max} is empty"));
        }
        Ok(Self { min, max })
    }
}

/// Affine map of `scale` onto `[-1, 1]`; `(x - 3) / 2` on the 1..5 scale.
pub fn rescale_rating(x: f64, scale: RatingScale) -> f64 {
    2.0 * (x - scale.min) / (scale.max - scale.min) - 1.0
}

/// Segments parsed from a reference file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedReferences {
    /// Ascending by segment id; references ascending by ref id.
    pub segments: Vec<Segment>,
    /// Segments with no positive-weight reference. Discriminative BLEU will
    /// refuse them.
    pub without_positive: Vec<String>,
    pub warnings: Vec<String>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

fn lines(content: &str, header: bool) -> Lines<'_> {
    let mut inner = content.lines().enumerate();
    if header {
        inner.next();
    }
    Lines { inner }
}

impl<'a> Iterator for Lines<'a> {
    /// 1-based line number and the line without its line terminator.
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (i, line) = self.inner.next()?;
            // str::lines already drops "\r\n"; a lone trailing '\r' is stripped too
            let line = line.strip_suffix('\r').unwrap_or(line);
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn split_fields<'l>(path: &Path, line_no: usize, line: &'l str, names: &[&str]) -> Result<Vec<&'l str>> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != names.len() {
        return Err(parse_error(
            path,
            line_no,
            format!(
                "expected {} tab-separated fields ({}), found {}",
                names.len(),
                names.join(", "),
                fields.len()
            ),
        ));
    }
    Ok(fields)
}

fn parse_real(path: &Path, line_no: usize, what: &str, raw: &str) -> Result<f64> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(
            path,
            line_no,
            format!("{what} `{raw}` is not a finite decimal"),
        )),
    }
}

fn parse_flag(path: &Path, line_no: usize, raw: &str) -> Result<bool> {
    match raw.trim() {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        other => Err(parse_error(
            path,
            line_no,
            format!("is_original `{other}` must be 0 or 1"),
        )),
    }
}

fn parse_records<T, F>(path: &Path, content: &str, opts: &ReadOptions, tsv: F) -> Result<Vec<(usize, T)>>
where
    T: for<'de> Deserialize<'de>,
    F: Fn(usize, &str) -> Result<T>,
{
    lines(content, opts.header)
        .map(|(no, line)| {
            let record = match opts.format {
                Format::Tsv => tsv(no, line)?,
                Format::Jsonl => serde_json::from_str(line)
                    .map_err(|e| parse_error(path, no, format!("invalid JSON record: {e}")))?,
            };
            Ok((no, record))
        })
        .collect()
}

fn check_id(path: &Path, line_no: usize, what: &str, id: &str) -> Result<()> {
    if id.is_empty() || id.contains(['\t', '\n', '\r']) {
        return Err(parse_error(
            path,
            line_no,
            format!("{what} must be nonempty and free of tabs and newlines"),
        ));
    }
    Ok(())
}

/// Parses reference records from file content; `path` labels errors.
pub fn parse_references(path: &Path, content: &str, opts: &ReadOptions) -> Result<LoadedReferences> {
    let records = parse_records(path, content, opts, |no, line| {
        let f = split_fields(
            path,
            no,
            line,
            &["segment_id", "ref_id", "weight", "is_original", "text"],
        )?;
        Ok(ReferenceRecord {
            segment_id: f[0].to_owned(),
            ref_id: f[1].to_owned(),
            weight: parse_real(path, no, "weight", f[2])?,
            is_original: parse_flag(path, no, f[3])?,
            text: f[4].to_owned(),
        })
    })?;

    let mut warnings = Vec::new();
    if records.is_empty() {
        warnings.push(format!("{}: no reference records", path.display()));
    }
    let mut seen = HashSet::new();
    let mut grouped: BTreeMap<String, BTreeMap<String, WeightedReference>> = BTreeMap::new();
    for (no, rec) in records {
        check_id(path, no, "segment_id", &rec.segment_id)?;
        check_id(path, no, "ref_id", &rec.ref_id)?;
        if !seen.insert((rec.segment_id.clone(), rec.ref_id.clone())) {
            return Err(parse_error(
                path,
                no,
                format!("duplicate reference `{}` for segment `{}`", rec.ref_id, rec.segment_id),
            ));
        }
        if !rec.weight.is_finite() || !(-1.0..=1.0).contains(&rec.weight) {
            return Err(parse_error(
                path,
                no,
                format!("weight {} is outside [-1, 1]", rec.weight),
            ));
        }
        let tokens = tokenize(&rec.text, opts.normalize);
        if tokens.is_empty() {
            return Err(parse_error(path, no, "reference text is empty"));
        }
        let reference = WeightedReference::new(rec.ref_id.clone(), tokens, rec.weight, rec.is_original)?;
        grouped.entry(rec.segment_id).or_default().insert(rec.ref_id, reference);
    }

    let mut without_positive = Vec::new();
    let segments = grouped
        .into_iter()
        .map(|(id, refs)| {
            let segment = Segment::new(id, refs.into_values().collect())?;
            if !segment.has_positive_reference() {
                without_positive.push(segment.id().to_owned());
            }
            Ok(segment)
        })
        .collect::<Result<Vec<_>>>()?;
    if !without_positive.is_empty() {
        warnings.push(format!(
            "{} segment(s) have no positive-weight reference: {}",
            without_positive.len(),
            preview(&without_positive)
        ));
    }
    Ok(LoadedReferences {
        segments,
        without_positive,
        warnings,
    })
}

/// Parses system outputs; the same (segment, system) twice is an error.
pub fn parse_hypotheses(path: &Path, content: &str, opts: &ReadOptions) -> Result<SystemHypotheses> {
    let records = parse_records(path, content, opts, |no, line| {
        let f = split_fields(path, no, line, &["segment_id", "system_id", "text"])?;
        Ok(HypothesisRecord {
            segment_id: f[0].to_owned(),
            system_id: f[1].to_owned(),
            text: f[2].to_owned(),
        })
    })?;
    let mut systems = SystemHypotheses::new();
    for (no, rec) in records {
        check_id(path, no, "segment_id", &rec.segment_id)?;
        check_id(path, no, "system_id", &rec.system_id)?;
        let hyps = systems.entry(rec.system_id.clone()).or_default();
        if hyps.contains_key(&rec.segment_id) {
            return Err(parse_error(
                path,
                no,
                format!(
                    "duplicate hypothesis from `{}` for segment `{}`",
                    rec.system_id, rec.segment_id
                ),
            ));
        }
        hyps.insert(rec.segment_id, tokenize(&rec.text, opts.normalize));
    }
    Ok(systems)
}

/// Parses ratings, averaging repeated (segment, system) rows. With `rescale`
/// the means are mapped onto `[-1, 1]`.
pub fn parse_ratings(
    path: &Path,
    content: &str,
    opts: &ReadOptions,
    scale: RatingScale,
    rescale: bool,
) -> Result<Ratings> {
    let records = parse_records(path, content, opts, |no, line| {
        let f = split_fields(path, no, line, &["segment_id", "system_id", "rating"])?;
        Ok(RatingRecord {
            segment_id: f[0].to_owned(),
            system_id: f[1].to_owned(),
            rating: parse_real(path, no, "rating", f[2])?,
        })
    })?;
    let mut sums: BTreeMap<String, BTreeMap<String, (f64, usize)>> = BTreeMap::new();
    for (no, rec) in records {
        check_id(path, no, "segment_id", &rec.segment_id)?;
        check_id(path, no, "system_id", &rec.system_id)?;
        if !rec.rating.is_finite() || rec.rating < scale.min || rec.rating > scale.max {
            return Err(parse_error(
                path,
                no,
                format!(
                    "rating {} is outside the scale [{}, {}]",
                    rec.rating, scale.min, scale.max
                ),
            ));
        }
        let slot = sums
            .entry(rec.system_id)
            .or_default()
            .entry(rec.segment_id)
            .or_insert((0.0, 0));
        slot.0 += rec.rating;
        slot.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(system, per_segment)| {
            let means = per_segment
                .into_iter()
                .map(|(seg, (sum, n))| {
                    let mean = sum / n as f64;
                    (seg, if rescale { rescale_rating(mean, scale) } else { mean })
                })
                .collect();
            (system, means)
        })
        .collect())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_references(path: impl AsRef<Path>, opts: &ReadOptions) -> Result<LoadedReferences> {
    let path = path.as_ref();
    parse_references(path, &read(path)?, opts)
}

pub fn load_hypotheses(path: impl AsRef<Path>, opts: &ReadOptions) -> Result<SystemHypotheses> {
    let path = path.as_ref();
    parse_hypotheses(path, &read(path)?, opts)
}

pub fn load_ratings(path: impl AsRef<Path>, opts: &ReadOptions, scale: RatingScale, rescale: bool) -> Result<Ratings> {
    let path = path.as_ref();
    parse_ratings(path, &read(path)?, opts, scale, rescale)
}

fn io_error(source: io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<output>"),
        source,
    }
}

/// Writes references as canonical TSV: segments and references in id order,
/// tokens joined by single spaces, weights in shortest round-trip form.
pub fn write_references(segments: &[Segment], mut out: impl Write) -> Result<()> {
    let mut sorted: Vec<&Segment> = segments.iter().collect();
    sorted.sort_by(|a, b| a.id().cmp(b.id()));
    for segment in sorted {
        let mut refs: Vec<&WeightedReference> = segment.references().iter().collect();
        refs.sort_by(|a, b| a.id.cmp(&b.id));
        for r in refs {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                segment.id(),
                r.id,
                r.weight,
                u8::from(r.is_original),
                r.tokens.to_text()
            )
            .map_err(io_error)?;
        }
    }
    Ok(())
}

/// Writes hypotheses as canonical TSV ordered by (segment, system).
pub fn write_hypotheses(systems: &SystemHypotheses, mut out: impl Write) -> Result<()> {
    let mut rows: Vec<(&str, &str, String)> = systems
        .iter()
        .flat_map(|(sys, hyps)| {
            hyps.iter()
                .map(move |(seg, h)| (seg.as_str(), sys.as_str(), h.to_text()))
        })
        .collect();
    rows.sort();
    for (seg, sys, text) in rows {
        writeln!(out, "{seg}\t{sys}\t{text}").map_err(io_error)?;
    }
    Ok(())
}

/// Writes one rating row per (segment, system), ordered by (segment, system).
pub fn write_ratings(ratings: &Ratings, mut out: impl Write) -> Result<()> {
    let mut rows: Vec<(&str, &str, f64)> = ratings
        .iter()
        .flat_map(|(sys, per)| per.iter().map(move |(seg, &r)| (seg.as_str(), sys.as_str(), r)))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (seg, sys, r) in rows {
        writeln!(out, "{seg}\t{sys}\t{r}").map_err(io_error)?;
    }
    Ok(())
}

/// Distinct reference weights in descending order.
pub fn observed_weights(segments: &[Segment]) -> Vec<f64> {
    let mut weights: Vec<f64> = segments
        .iter()
        .flat_map(|s| s.references().iter().map(|r| r.weight))
        .collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    weights.dedup();
    weights
}

pub(crate) fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 5;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", ids.len() - SHOWN));
    }
    s
}
