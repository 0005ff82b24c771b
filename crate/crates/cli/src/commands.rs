use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use dbleu::corpus_io::{
    load_hypotheses, load_ratings, load_references, observed_weights, validate_study, Format, ReadOptions, Severity,
    SystemHypotheses,
};
use dbleu::correlation::{correlate_assignments, sample_assignments, Assignment, MetricScorer, RatingScorer};
use dbleu::metrics::filter_references;
use dbleu::{CorrelationSummary, Error, MetricConfig, MetricKind, Ratings, RefMode, Segment, Study, StudyOptions};

use crate::args::{
    CorrelateArgs, InputArgs, MetricArgs, MetricChoice, OutputArgs, ScoreArgs, StudyArgs, SweepArgs, SweepAxis,
    ValidateArgs,
};
use crate::report::{to_json, validation_text, CorrelationRow, CorrelationTable, ScoreOutput, SweepPoint, SweepTable};

/// A command failure and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Degenerate(String),
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const DEGENERATE: u8 = 3;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => Self::USAGE,
            Failure::Data(_) => Self::DATA,
            Failure::Degenerate(_) => Self::DEGENERATE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Degenerate(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_degenerate() => Failure::Degenerate(e.to_string()),
            Error::OrderOutOfRange(_)
            | Error::ZeroOrder
            | Error::ThresholdOutOfRange(_)
            | Error::InvalidConfig { .. } => Failure::Usage(e.to_string()),
            e => Failure::Data(e.to_string()),
        }
    }
}

type CmdResult<T = u8> = Result<T, Failure>;

fn warn(message: impl fmt::Display) {
    eprintln!("warning: {message}");
}

fn read_options(input: &InputArgs, path: &Path) -> ReadOptions {
    ReadOptions {
        format: input.format.unwrap_or_else(|| Format::from_path(path)),
        header: input.header,
        normalize: input.normalize,
    }
}

fn load_segments(input: &InputArgs) -> CmdResult<Vec<Segment>> {
    let loaded = load_references(&input.refs, &read_options(input, &input.refs))?;
    for w in &loaded.warnings {
        warn(w);
    }
    Ok(loaded.segments)
}

fn metric_config(kind: MetricKind, args: &MetricArgs, normalize: bool) -> CmdResult<MetricConfig> {
    let mut cfg = MetricConfig::new(kind).with_max_order(args.max_n);
    if let Some(s) = args.smoothing {
        cfg = cfg.with_smoothing(s);
    }
    cfg.normalize = normalize;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(output: &OutputArgs, content: &str) -> CmdResult<()> {
    let result = match &output.out {
        Some(path) => fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|e| e.to_string()),
    };
    result.map_err(Failure::Data)
}

fn render<T: serde::Serialize>(output: &OutputArgs, value: &T, text: impl FnOnce(&T) -> String) -> CmdResult<()> {
    let content = if output.json { to_json(value) } else { text(value) };
    emit(output, &content)
}

pub fn score(args: &ScoreArgs) -> CmdResult {
    let cfg = metric_config(args.metric, &args.metric_args, args.input.normalize)?;
    let segments = load_segments(&args.input)?;
    let mut systems = load_hypotheses(&args.hyps, &read_options(&args.input, &args.hyps))?;
    let system = match &args.system {
        Some(name) => name.clone(),
        None if systems.len() == 1 => systems.keys().next().cloned().unwrap_or_default(),
        None => {
            let names: Vec<&str> = systems.keys().map(String::as_str).collect();
            return Err(Failure::Usage(format!(
                "the output file holds {} systems ({}); pick one with --system",
                names.len(),
                names.join(", ")
            )));
        }
    };
    let hyps = systems
        .remove(&system)
        .ok_or_else(|| Failure::Data(format!("no hypotheses for system `{system}`")))?;

    let filtered = filter_references(&segments, args.ref_mode)?;
    let report = dbleu::metrics::score(&hyps, &filtered.segments, &cfg)?;
    if !report.nonpositive_orders.is_empty() {
        warn(format!(
            "precision <= 0 at orders {:?}; score is 0",
            report.nonpositive_orders
        ));
    }
    let out = ScoreOutput::new(cfg.label(), args.ref_mode.to_string(), system, &report);
    render(&args.output, &out, ScoreOutput::to_text)?;
    Ok(0)
}

struct LoadedStudy {
    segments: Vec<Segment>,
    hyps: SystemHypotheses,
    study: Study,
}

fn load_study(input: &InputArgs, args: &StudyArgs) -> CmdResult<LoadedStudy> {
    let segments = load_segments(input)?;
    let hyps = load_hypotheses(&args.hyps, &read_options(input, &args.hyps))?;
    let ratings: Ratings = load_ratings(
        &args.ratings,
        &read_options(input, &args.ratings),
        args.rating_scale,
        !args.no_rescale,
    )?;
    let pairs = if args.pairs.is_empty() {
        let systems: Vec<&String> = ratings.keys().filter(|s| hyps.contains_key(*s)).collect();
        let mut pairs = Vec::new();
        for (i, a) in systems.iter().enumerate() {
            for b in &systems[i + 1..] {
                pairs.push(((*a).clone(), (*b).clone()));
            }
        }
        if pairs.is_empty() {
            return Err(Failure::Data(
                "a study needs at least two systems with both outputs and ratings".into(),
            ));
        }
        pairs
    } else {
        args.pairs.clone()
    };
    let study = Study::new(segments.iter().map(Segment::id), &ratings, &pairs)?;
    Ok(LoadedStudy { segments, hyps, study })
}

fn study_options(args: &StudyArgs) -> CmdResult<StudyOptions> {
    if args.unit_size == 0 {
        return Err(Failure::Usage("--unit-size must be at least 1".into()));
    }
    if args.assignments == 0 {
        return Err(Failure::Usage("--assignments must be at least 1".into()));
    }
    Ok(StudyOptions {
        unit_size: args.unit_size,
        assignments: args.assignments,
        bootstrap: args.bootstrap,
        seed: args.seed,
    })
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CmdResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(f))
}

fn default_metrics(metrics: &[MetricChoice]) -> Vec<MetricChoice> {
    if metrics.is_empty() {
        MetricKind::ALL.into_iter().map(MetricChoice::Metric).collect()
    } else {
        metrics.to_vec()
    }
}

fn choice_label(choice: MetricChoice, metric_args: &MetricArgs) -> String {
    match choice {
        MetricChoice::Metric(kind) => format!("{}-{}", kind.name(), metric_args.max_n),
        MetricChoice::Rating => "rating".to_owned(),
    }
}

/// Scores one metric on one reference selection over shared assignments.
fn evaluate(
    loaded: &LoadedStudy,
    segments: &[Segment],
    assignments: &[Assignment],
    choice: MetricChoice,
    cfg: Option<MetricConfig>,
    opts: &StudyOptions,
) -> dbleu::Result<CorrelationSummary> {
    match (choice, cfg) {
        (MetricChoice::Metric(_), Some(cfg)) => {
            let scorer = MetricScorer::new(&loaded.study, segments, &loaded.hyps, &cfg)?;
            correlate_assignments(&loaded.study, assignments, &scorer, opts)
        }
        _ => correlate_assignments(&loaded.study, assignments, &RatingScorer(&loaded.study), opts),
    }
}

fn configs(
    metrics: &[MetricChoice],
    metric_args: &MetricArgs,
    normalize: bool,
) -> CmdResult<Vec<(MetricChoice, Option<MetricConfig>)>> {
    metrics
        .iter()
        .map(|&choice| match choice {
            MetricChoice::Metric(kind) => Ok((choice, Some(metric_config(kind, metric_args, normalize)?))),
            MetricChoice::Rating => Ok((choice, None)),
        })
        .collect()
}

pub fn correlate(args: &CorrelateArgs) -> CmdResult {
    let opts = study_options(&args.study)?;
    let metrics = configs(&default_metrics(&args.metrics), &args.metric_args, args.input.normalize)?;
    let modes = if args.ref_modes.is_empty() {
        vec![RefMode::Single, RefMode::Threshold(0.6), RefMode::All]
    } else {
        args.ref_modes.clone()
    };
    let loaded = load_study(&args.input, &args.study)?;

    let rows = with_threads(args.study.threads, || -> CmdResult<Vec<CorrelationRow>> {
        let assignments = sample_assignments(
            loaded.study.segment_ids().len(),
            opts.unit_size,
            opts.assignments,
            opts.seed,
        )?;
        let filtered = modes
            .iter()
            .map(|&mode| Ok((mode, filter_references(&loaded.segments, mode)?.segments)))
            .collect::<CmdResult<Vec<(RefMode, Vec<Segment>)>>>()?;
        let mut rows = Vec::new();
        for &(choice, cfg) in &metrics {
            for (mode, segments) in &filtered {
                let summary = evaluate(&loaded, segments, &assignments, choice, cfg, &opts)?;
                rows.push(CorrelationRow::new(
                    choice_label(choice, &args.metric_args),
                    mode.to_string(),
                    &summary,
                ));
            }
        }
        Ok(rows)
    })??;

    let table = CorrelationTable {
        seed: opts.seed,
        bootstrap: opts.bootstrap,
        rows,
    };
    render(&args.output, &table, CorrelationTable::to_text)?;
    Ok(0)
}

const MAX_OBSERVED_THRESHOLDS: usize = 21;

/// Observed weights, or a descending 0.1 grid from the largest weight when
/// weights are too finely spread to sweep one by one.
fn default_thresholds(segments: &[Segment]) -> Vec<f64> {
    let observed = observed_weights(segments);
    if observed.len() <= MAX_OBSERVED_THRESHOLDS {
        return observed;
    }
    let top = observed.first().copied().unwrap_or(1.0);
    (0..=20).map(|i| (10 - i) as f64 / 10.0).filter(|&w| w <= top).collect()
}

fn integer_values(values: &[f64], min: usize, max: usize, what: &str) -> CmdResult<Vec<usize>> {
    values
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v >= min as f64 && v <= max as f64 {
                Ok(v as usize)
            } else {
                Err(Failure::Usage(format!(
                    "{what} value {v} must be an integer in {min}..={max}"
                )))
            }
        })
        .collect()
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    let opts = study_options(&args.study)?;
    let choices = default_metrics(&args.metrics);
    // validates --max-n and --smoothing up front
    configs(&choices, &args.metric_args, args.input.normalize)?;
    let unit_sizes = match args.axis {
        SweepAxis::UnitSize if args.values.is_empty() => vec![1, 10, 25, 50, 100],
        SweepAxis::UnitSize => integer_values(&args.values, 1, usize::MAX, "unit-size")?,
        _ => Vec::new(),
    };
    let orders = match args.axis {
        SweepAxis::MaxN if args.values.is_empty() => vec![1, 2, 3, 4],
        SweepAxis::MaxN => integer_values(&args.values, 1, dbleu::metrics::MAX_SUPPORTED_ORDER, "max-n")?,
        _ => Vec::new(),
    };
    if args.axis == SweepAxis::Threshold {
        for &v in &args.values {
            RefMode::threshold(v)?;
        }
    }
    let loaded = load_study(&args.input, &args.study)?;
    let segment_count = loaded.study.segment_ids().len();

    let points = with_threads(args.study.threads, || -> CmdResult<Vec<SweepPoint>> {
        let mut points = Vec::new();
        let mut push =
            |axis: &str, value: f64, label: String, mode: RefMode, result: dbleu::Result<CorrelationSummary>| {
                match result {
                    Ok(summary) => {
                        points.push(SweepPoint {
                            axis: axis.to_owned(),
                            value,
                            row: CorrelationRow::new(label, mode.to_string(), &summary),
                        });
                        Ok(())
                    }
                    Err(e @ (Error::DegenerateCorrelation(_) | Error::NoPositiveReference(_))) => {
                        warn(format!("{axis}={value}, {label}: skipped ({e})"));
                        Ok(())
                    }
                    Err(e) => Err(Failure::from(e)),
                }
            };

        match args.axis {
            SweepAxis::Threshold => {
                let thresholds = if args.values.is_empty() {
                    default_thresholds(&loaded.segments)
                } else {
                    args.values.clone()
                };
                let assignments = sample_assignments(segment_count, opts.unit_size, opts.assignments, opts.seed)?;
                let metrics = configs(&choices, &args.metric_args, args.input.normalize)?;
                for w in thresholds {
                    let mode = RefMode::threshold(w)?;
                    let segments = match filter_references(&loaded.segments, mode) {
                        Ok(f) => f.segments,
                        Err(e @ Error::NoReferences(_)) => {
                            warn(format!("threshold={w}: skipped ({e})"));
                            continue;
                        }
                        Err(e) => return Err(e.into()),
                    };
                    for &(choice, cfg) in &metrics {
                        let result = evaluate(&loaded, &segments, &assignments, choice, cfg, &opts);
                        push("threshold", w, choice_label(choice, &args.metric_args), mode, result)?;
                    }
                }
            }
            SweepAxis::UnitSize => {
                let segments = filter_references(&loaded.segments, args.ref_mode)?.segments;
                let metrics = configs(&choices, &args.metric_args, args.input.normalize)?;
                for m in unit_sizes {
                    if m > segment_count {
                        warn(format!("unit-size={m}: skipped (only {segment_count} segments)"));
                        continue;
                    }
                    let opts = StudyOptions { unit_size: m, ..opts };
                    let assignments = sample_assignments(segment_count, m, opts.assignments, opts.seed)?;
                    for &(choice, cfg) in &metrics {
                        let result = evaluate(&loaded, &segments, &assignments, choice, cfg, &opts);
                        push(
                            "unit-size",
                            m as f64,
                            choice_label(choice, &args.metric_args),
                            args.ref_mode,
                            result,
                        )?;
                    }
                }
            }
            SweepAxis::MaxN => {
                let segments = filter_references(&loaded.segments, args.ref_mode)?.segments;
                let assignments = sample_assignments(segment_count, opts.unit_size, opts.assignments, opts.seed)?;
                for n in orders {
                    let metric_args = MetricArgs {
                        max_n: n,
                        smoothing: args.metric_args.smoothing,
                    };
                    for (choice, cfg) in configs(&choices, &metric_args, args.input.normalize)? {
                        let result = evaluate(&loaded, &segments, &assignments, choice, cfg, &opts);
                        push(
                            "max-n",
                            n as f64,
                            choice_label(choice, &metric_args),
                            args.ref_mode,
                            result,
                        )?;
                    }
                }
            }
        }
        Ok(points)
    })??;

    let table = SweepTable {
        seed: opts.seed,
        bootstrap: opts.bootstrap,
        points,
    };
    render(&args.output, &table, SweepTable::to_text)?;
    Ok(0)
}

pub fn validate(args: &ValidateArgs) -> CmdResult {
    let segments = load_segments(&args.input)?;
    let hyps = match &args.hyps {
        Some(path) => load_hypotheses(path, &read_options(&args.input, path))?,
        None => SystemHypotheses::new(),
    };
    let ratings = match &args.ratings {
        Some(path) => load_ratings(path, &read_options(&args.input, path), args.rating_scale, false)?,
        None => BTreeMap::new(),
    };
    let report = validate_study(&segments, &hyps, &ratings);
    render(&args.output, &report, validation_text)?;
    Ok(match report.worst() {
        Some(Severity::Error) => Failure::DATA,
        _ => 0,
    })
}
