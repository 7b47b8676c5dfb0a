//! Replicated Monte-Carlo benchmarks on the synthetic examples, and the K-fold
//! prediction protocol for real data.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{gen_example, Example, DEFAULT_SNR, GENERATOR_FINGERPRINT};
use crate::error::{Error, Result};
use crate::linalg::{check_dims, DesignMatrix, ResponseVector};
use crate::pipeline::{complement, fit, fold_assignment, CvConfig, FitResult, Method, RidgeChoice};
use crate::selection::SelectionRule;

pub const BENCH_SCHEMA_VERSION: u32 = 1;

/// One competitor in a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub method: Method,
    /// `None` uses [`SelectionRule::default_for`] with the training size.
    pub rule: Option<SelectionRule>,
}

impl MethodSpec {
    pub fn lat() -> Self {
        Self {
            name: "lat".into(),
            method: Method::Lat,
            rule: None,
        }
    }

    /// RAT with 10-fold CV over the default grid.
    pub fn rat_cv() -> Self {
        Self {
            name: "rat".into(),
            method: Method::Rat {
                ridge: RidgeChoice::CrossValidated(CvConfig::default()),
            },
            rule: None,
        }
    }

    pub fn rat_fixed(r: f64) -> Self {
        Self {
            name: format!("rat(r={r})"),
            method: Method::Rat {
                ridge: RidgeChoice::Fixed { r },
            },
            rule: None,
        }
    }

    pub fn with_rule(mut self, rule: SelectionRule) -> Self {
        self.rule = Some(rule);
        self
    }

    /// Comma-separated list such as `lat,rat` or `lat,rat=0.5`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let methods: Vec<Self> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        if methods.is_empty() {
            return Err(Error::InvalidConfig("no methods given".into()));
        }
        check_unique(&methods)?;
        Ok(methods)
    }

    fn run(&self, x: &DesignMatrix, y: &ResponseVector, seed: u64) -> Result<FitResult> {
        let rule = self.rule.unwrap_or_else(|| SelectionRule::default_for(x.n()));
        let method = match &self.method {
            // Folds offset by the data-set seed.
            Method::Rat {
                ridge: RidgeChoice::CrossValidated(cfg),
            } => Method::Rat {
                ridge: RidgeChoice::CrossValidated(CvConfig {
                    seed: cfg.seed.wrapping_add(seed),
                    ..cfg.clone()
                }),
            },
            other => other.clone(),
        };
        fit(x, y, &rule, &method)
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "lat" => Ok(Self::lat()),
            "rat" | "rat-cv" => Ok(Self::rat_cv()),
            other => match other.strip_prefix("rat=") {
                Some(r) => {
                    let r: f64 = r
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad ridge value in `{s}`")))?;
                    if !(r > 0.0) {
                        return Err(Error::InvalidConfig(format!("ridge must be > 0 in `{s}`")));
                    }
                    Ok(Self::rat_fixed(r))
                }
                None => Err(Error::InvalidConfig(format!("unknown method `{s}`"))),
            },
        }
    }
}

fn check_unique(methods: &[MethodSpec]) -> Result<()> {
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].iter().any(|o| o.name == m.name) {
            return Err(Error::InvalidConfig(format!("duplicate method name `{}`", m.name)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub example: Example,
    pub n: usize,
    pub p: usize,
    pub snr: f64,
    pub replicates: usize,
    pub methods: Vec<MethodSpec>,
    pub base_seed: u64,
    /// Writes `<path>` (JSON lines) and `<path>.txt` (table) when set.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output_path: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(example: Example, n: usize, p: usize, replicates: usize, methods: Vec<MethodSpec>) -> Self {
        Self {
            example,
            n,
            p,
            snr: DEFAULT_SNR,
            replicates,
            methods,
            base_seed: 0,
            output_path: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods given".into()));
        }
        check_unique(&self.methods)
    }
}

/// `‖β̂ − β‖₂`, `|Ŝ \ S|` and `|S \ Ŝ|`.
pub fn support_metrics(beta_hat: &Array1<f64>, support: &[usize], truth: &Array1<f64>) -> (f64, usize, usize) {
    let diff = beta_hat - truth;
    let rmse = diff.dot(&diff).sqrt();
    let fp = support.iter().filter(|&&j| truth[j] == 0.0).count();
    let true_count = truth.iter().filter(|b| **b != 0.0).count();
    let tp = support.len() - fp;
    (rmse, fp, true_count - tp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub seed: u64,
    pub method: String,
    pub checksum: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub rmse: Option<f64>,
    pub false_positives: Option<usize>,
    pub false_negatives: Option<usize>,
    pub support_size: Option<usize>,
    pub runtime_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ridge_r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; absent with fewer than two values.
    pub sd: Option<f64>,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.len() > 1).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        });
        Some(Self { mean, sd })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub succeeded: usize,
    pub failed: usize,
    pub rmse: Option<MeanSd>,
    pub false_positives: Option<MeanSd>,
    pub false_negatives: Option<MeanSd>,
    pub runtime_ms: Option<MeanSd>,
}

impl MethodSummary {
    fn from_rows(method: &str, rows: &[&ReplicateRow]) -> Self {
        let ok: Vec<&&ReplicateRow> = rows.iter().filter(|r| r.ok).collect();
        let col = |f: &dyn Fn(&ReplicateRow) -> Option<f64>| -> Option<MeanSd> {
            let v: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
            MeanSd::of(&v)
        };
        Self {
            method: method.to_string(),
            succeeded: ok.len(),
            failed: rows.len() - ok.len(),
            rmse: col(&|r| r.rmse),
            false_positives: col(&|r| r.false_positives.map(|v| v as f64)),
            false_negatives: col(&|r| r.false_negatives.map(|v| v as f64)),
            runtime_ms: col(&|r| r.runtime_ms),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub config: BenchConfig,
    pub fingerprint: String,
    /// Worker threads available while the replicates ran.
    pub threads: usize,
    pub rows: Vec<ReplicateRow>,
    pub summaries: Vec<MethodSummary>,
}

impl BenchReport {
    pub fn summary(&self, method: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Header record, one record per replicate row, one per summary.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Header<'a> {
            schema_version: u32,
            kind: &'static str,
            config: &'a BenchConfig,
            fingerprint: &'a str,
            threads: usize,
        }
        #[derive(Serialize)]
        struct Tagged<'a, T: Serialize> {
            schema_version: u32,
            kind: &'static str,
            #[serde(flatten)]
            body: &'a T,
        }
        serde_json::to_writer(
            &mut w,
            &Header {
                schema_version: self.schema_version,
                kind: "bench_header",
                config: &self.config,
                fingerprint: &self.fingerprint,
                threads: self.threads,
            },
        )?;
        writeln!(w)?;
        for row in &self.rows {
            serde_json::to_writer(&mut w, &Tagged { schema_version: self.schema_version, kind: "replicate", body: row })?;
            writeln!(w)?;
        }
        for s in &self.summaries {
            serde_json::to_writer(&mut w, &Tagged { schema_version: self.schema_version, kind: "summary", body: s })?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Aligned text table with one column per method.
    pub fn table(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "Example ({}), (n, p) = ({}, {}), {} replicates, snr = {}\n",
            c.example, c.n, c.p, c.replicates, c.snr
        );
        let _ = write!(out, "{:<12}", "");
        for s in &self.summaries {
            let _ = write!(out, "{:>14}", s.method);
        }
        out.push('\n');
        let fmt = |m: Option<MeanSd>, digits: usize| match m {
            Some(v) => format!("{:>14.*}", digits, v.mean),
            None => format!("{:>14}", "-"),
        };
        let lines: [(&str, fn(&MethodSummary) -> Option<MeanSd>, usize); 4] = [
            ("RMSE", |s| s.rmse, 3),
            ("# FPs", |s| s.false_positives, 3),
            ("# FNs", |s| s.false_negatives, 3),
            ("Time (ms)", |s| s.runtime_ms, 1),
        ];
        for (label, get, digits) in lines {
            let _ = write!(out, "{label:<12}");
            for s in &self.summaries {
                out.push_str(&fmt(get(s), digits));
            }
            out.push('\n');
        }
        if self.summaries.iter().any(|s| s.failed > 0) {
            let _ = write!(out, "{:<12}", "failures");
            for s in &self.summaries {
                let _ = write!(out, "{:>14}", s.failed);
            }
            out.push('\n');
        }
        out
    }
}

/// Run every method on `replicates` generated instances. Replicate `r` uses
/// seed `base_seed + r`; replicates run in parallel and are schedule
/// independent apart from the runtime columns.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    // Validate the configuration once.
    gen_example(cfg.example, cfg.n.clamp(2, 4), cfg.p, cfg.snr, cfg.base_seed)?;

    let per_rep: Vec<Result<Vec<ReplicateRow>>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| {
            let seed = cfg.base_seed.wrapping_add(rep as u64);
            let inst = gen_example(cfg.example, cfg.n, cfg.p, cfg.snr, seed)?;
            let checksum = inst.checksum();
            let truth = &inst.beta_true.beta;
            Ok(cfg
                .methods
                .iter()
                .map(|m| {
                    let started = Instant::now();
                    let outcome = m.run(&inst.x, &inst.y, seed);
                    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
                    let mut row = ReplicateRow {
                        replicate: rep,
                        seed,
                        method: m.name.clone(),
                        checksum: checksum.clone(),
                        ok: false,
                        error: None,
                        rmse: None,
                        false_positives: None,
                        false_negatives: None,
                        support_size: None,
                        runtime_ms: None,
                        ridge_r: None,
                    };
                    match outcome {
                        Ok(fit) => {
                            let (rmse, fp, fn_) = support_metrics(&fit.coefficients.beta, &fit.support, truth);
                            row.ok = true;
                            row.rmse = Some(rmse);
                            row.false_positives = Some(fp);
                            row.false_negatives = Some(fn_);
                            row.support_size = Some(fit.support.len());
                            row.runtime_ms = Some(runtime_ms);
                            row.ridge_r = fit.ridge_r;
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                    row
                })
                .collect())
        })
        .collect();

    let mut rows = Vec::with_capacity(cfg.replicates * cfg.methods.len());
    for r in per_rep {
        rows.extend(r?);
    }
    let summaries = cfg
        .methods
        .iter()
        .map(|m| {
            let mine: Vec<&ReplicateRow> = rows.iter().filter(|r| r.method == m.name).collect();
            MethodSummary::from_rows(&m.name, &mine)
        })
        .collect();
    let report = BenchReport {
        schema_version: BENCH_SCHEMA_VERSION,
        config: cfg.clone(),
        fingerprint: fingerprint(),
        threads: rayon::current_num_threads(),
        rows,
        summaries,
    };
    if let Some(path) = &cfg.output_path {
        report.write_jsonl(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        let mut txt = path.clone().into_os_string();
        txt.push(".txt");
        std::fs::write(txt, report.table())?;
    }
    Ok(report)
}

fn fingerprint() -> String {
    format!("hdls-core {} / {}", env!("CARGO_PKG_VERSION"), GENERATOR_FINGERPRINT)
}

/// Name under which the training-mean predictor is reported.
pub const NULL_MODEL: &str = "null";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRow {
    pub fold: usize,
    pub method: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub rmse: Option<f64>,
    pub model_size: Option<usize>,
    /// Absent for the null model.
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldSummary {
    pub method: String,
    pub mean_error: Option<f64>,
    /// Standard deviation of the fold errors over `sqrt(folds)`.
    pub std_error: Option<f64>,
    pub mean_model_size: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldReport {
    pub schema_version: u32,
    pub n: usize,
    pub p: usize,
    pub folds: usize,
    pub seed: u64,
    pub rows: Vec<FoldRow>,
    pub summaries: Vec<KFoldSummary>,
}

impl KFoldReport {
    pub fn summary(&self, method: &str) -> Option<&KFoldSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Tagged<'a, T: Serialize> {
            schema_version: u32,
            kind: &'static str,
            #[serde(flatten)]
            body: &'a T,
        }
        let header = serde_json::json!({
            "schema_version": self.schema_version,
            "kind": "kfold_header",
            "n": self.n,
            "p": self.p,
            "folds": self.folds,
            "seed": self.seed,
        });
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for row in &self.rows {
            serde_json::to_writer(&mut w, &Tagged { schema_version: self.schema_version, kind: "fold", body: row })?;
            writeln!(w)?;
        }
        for s in &self.summaries {
            serde_json::to_writer(&mut w, &Tagged { schema_version: self.schema_version, kind: "kfold_summary", body: s })?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{}-fold prediction, n = {}, p = {}\n{:<10}{:>12}{:>16}{:>20}{:>20}\n",
            self.folds, self.n, self.p, "method", "mean error", "standard error", "average model size", "runtime (ms)"
        );
        let f = |v: Option<f64>, d: usize| v.map_or_else(|| "---".to_string(), |x| format!("{x:.d$}"));
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{:<10}{:>12}{:>16}{:>20}{:>20}",
                s.method,
                f(s.mean_error, 3),
                f(s.std_error, 3),
                f(s.mean_model_size, 1),
                f(s.mean_runtime_ms, 1)
            );
        }
        out
    }
}

fn rmse(pred: &Array1<f64>, truth: &Array1<f64>) -> f64 {
    let d = pred - truth;
    (d.dot(&d) / d.len() as f64).sqrt()
}

/// Seeded K-fold prediction comparison. Each method is fit on all folds but
/// one and scored by held-out RMSE; the null model predicts the training mean.
pub fn run_kfold_prediction(
    x: &DesignMatrix,
    y: &ResponseVector,
    folds: usize,
    methods: &[MethodSpec],
    seed: u64,
) -> Result<KFoldReport> {
    check_dims(x, y)?;
    let n = x.n();
    if folds < 2 || folds > n {
        return Err(Error::InvalidConfig(format!(
            "k-fold prediction needs 2 <= folds <= n, got {folds} with n = {n}"
        )));
    }
    check_unique(methods)?;
    let blocks = fold_assignment(n, folds, seed);

    let per_fold: Vec<Result<Vec<FoldRow>>> = blocks
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let train = complement(n, test);
            let (x_tr, y_tr) = (x.rows(&train)?, y.select(&train)?);
            let x_te = x.view().select(ndarray::Axis(0), test);
            let y_te = y.view().select(ndarray::Axis(0), test);

            let mean = y_tr.view().mean().expect("training fold is nonempty");
            let mut rows = vec![FoldRow {
                fold: f,
                method: NULL_MODEL.into(),
                ok: true,
                error: None,
                rmse: Some(rmse(&Array1::from_elem(test.len(), mean), &y_te)),
                model_size: Some(0),
                runtime_ms: None,
            }];
            for m in methods {
                let started = Instant::now();
                let outcome = m.run(&x_tr, &y_tr, seed.wrapping_add(f as u64));
                let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
                rows.push(match outcome {
                    Ok(fit) => FoldRow {
                        fold: f,
                        method: m.name.clone(),
                        ok: true,
                        error: None,
                        rmse: Some(rmse(&fit.predict(x_te.view()), &y_te)),
                        model_size: Some(fit.support.len()),
                        runtime_ms: Some(runtime_ms),
                    },
                    Err(e) => FoldRow {
                        fold: f,
                        method: m.name.clone(),
                        ok: false,
                        error: Some(e.to_string()),
                        rmse: None,
                        model_size: None,
                        runtime_ms: None,
                    },
                });
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::new();
    for r in per_fold {
        rows.extend(r?);
    }
    let names: Vec<String> = std::iter::once(NULL_MODEL.to_string())
        .chain(methods.iter().map(|m| m.name.clone()))
        .collect();
    let summaries = names
        .iter()
        .map(|name| {
            let mine: Vec<&FoldRow> = rows.iter().filter(|r| &r.method == name && r.ok).collect();
            let errors: Vec<f64> = mine.iter().filter_map(|r| r.rmse).collect();
            let stats = MeanSd::of(&errors);
            let sizes: Vec<f64> = mine.iter().filter_map(|r| r.model_size.map(|s| s as f64)).collect();
            let times: Vec<f64> = mine.iter().filter_map(|r| r.runtime_ms).collect();
            KFoldSummary {
                method: name.clone(),
                mean_error: stats.map(|s| s.mean),
                std_error: stats.and_then(|s| s.sd).map(|sd| sd / (errors.len() as f64).sqrt()),
                mean_model_size: MeanSd::of(&sizes).map(|s| s.mean),
                mean_runtime_ms: MeanSd::of(&times).map(|s| s.mean),
                failed: rows.iter().filter(|r| &r.method == name && !r.ok).count(),
            }
        })
        .collect();

    Ok(KFoldReport {
        schema_version: BENCH_SCHEMA_VERSION,
        n,
        p: x.p(),
        folds,
        seed,
        rows,
        summaries,
    })
}
