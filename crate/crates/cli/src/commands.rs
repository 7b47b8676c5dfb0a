use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use hdls::bench::{run_bench, run_kfold_prediction, BenchConfig, MethodSpec};
use hdls::datagen::{gaussian_design, gen_example, CovarianceSpec, Example};
use hdls::ingest::{
    default_feature_names, ingest, write_matrix_file, CategoricalColumns, IngestionSpec,
    Interactions,
};
use hdls::linalg::{ridge_dual_solve, ridge_primal_solve, DesignMatrix, ResponseVector};
use hdls::pipeline::{fit as fit_model, CvConfig, Method, RidgeChoice};
use hdls::selection::{default_d, default_path_len, SelectionRule, Stage1Rule, Stage2Rule};
use hdls::Result;
use log::{info, warn};

use crate::{
    BenchArgs, CheckIdentityArgs, FitArgs, GenerateArgs, InputArgs, MethodArg, Stage1Arg,
    Stage2Arg,
};

const IDENTITY_TOL: f64 = 1e-9;
const IDENTITY_SHAPES: [(usize, usize); 4] = [(5, 3), (10, 40), (30, 100), (50, 200)];
const IDENTITY_RIDGES: [f64; 4] = [1e-4, 0.1, 1.0, 10.0];

fn ingestion_spec(args: &InputArgs) -> IngestionSpec {
    let mut spec = IngestionSpec::new(&args.input, args.response.as_str());
    spec.has_header = !args.no_header;
    if let Some(cols) = &args.categorical {
        spec.categorical = CategoricalColumns::Explicit(cols.clone());
    }
    if args.interactions {
        spec.interactions = Interactions::AllPairs;
    }
    spec.drop_constant = !args.keep_constant;
    spec
}

pub fn fit(args: FitArgs) -> Result<ExitCode> {
    let data = ingest(&ingestion_spec(&args.input))?;
    let n = data.x.n();

    let stage1 = match args.stage1 {
        Stage1Arg::Topd => Stage1Rule::FixedSize {
            d: args.d.unwrap_or_else(|| default_d(n)),
        },
        Stage1Arg::Ebic => Stage1Rule::Ebic {
            gamma: args.ebic_gamma,
            max_size: args.d.unwrap_or_else(|| default_path_len(n)),
        },
    };
    let stage2 = match args.stage2 {
        Stage2Arg::Threshold => Stage2Rule::AnalyticThreshold { delta: args.delta },
        Stage2Arg::Corollary => Stage2Rule::CorollaryThreshold {
            delta: args.delta,
            kappa: args.kappa,
        },
        Stage2Arg::Bic => Stage2Rule::Bic {
            max_size: n.saturating_sub(1),
        },
    };
    let rule = SelectionRule { stage1, stage2 };

    let mut notes = Vec::new();
    let cv = || CvConfig {
        folds: args.folds,
        ..CvConfig::with_seed(args.seed)
    };
    let method = match args.method {
        MethodArg::Lat => {
            if args.ridge.is_some() || args.cv {
                warn!("--ridge and --cv are ignored for LAT");
            }
            Method::Lat
        }
        MethodArg::Rat => {
            let ridge = match args.ridge {
                Some(r) => RidgeChoice::Fixed { r },
                None => {
                    if !args.cv {
                        let note = "no --ridge or --cv given; using cross-validation over the default grid";
                        info!("{note}");
                        notes.push(note.to_string());
                    }
                    RidgeChoice::CrossValidated(cv())
                }
            };
            Method::Rat { ridge }
        }
    };

    let result = fit_model(&data.x, &data.y, &rule, &method)?;
    let mut record = result.to_record(Some(&data.feature_names));
    record.notes = notes;
    let line = serde_json::to_string(&record)?;

    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{line}")?;
            w.flush()?;
            print_fit_summary(&record, n);
        }
        None => writeln!(std::io::stdout().lock(), "{line}")?,
    }
    Ok(ExitCode::SUCCESS)
}

fn print_fit_summary(record: &hdls::pipeline::FitRecord, n: usize) {
    println!(
        "{}: {} of {} features selected (n = {}, screened {})",
        record.method.name(),
        record.support.len(),
        record.p,
        n,
        record.stage1_submodel.len()
    );
    if let Some(t) = record.threshold_used {
        println!("threshold      {t:.6}");
    }
    println!("sigma2_hat     {:.6}", record.sigma2_hat);
    if let Some(r) = record.ridge_r {
        println!("ridge r        {r:.6}");
    }
    println!("intercept      {:.6}", record.intercept);
    let names = record.support_names.as_deref().unwrap_or_default();
    for (i, (&j, &b)) in record
        .support
        .iter()
        .zip(&record.support_coefficients)
        .enumerate()
    {
        let name = names.get(i).map_or("", String::as_str);
        println!("  [{j:>6}] {name:<24} {b:>12.6}");
    }
    for note in &record.notes {
        println!("note: {note}");
    }
}

pub fn bench(args: BenchArgs) -> Result<ExitCode> {
    let methods = MethodSpec::parse_list(&args.methods)?;

    if let Some(input) = &args.input {
        let mut spec = IngestionSpec::new(input, args.response.as_str());
        if args.interactions {
            spec.interactions = Interactions::AllPairs;
        }
        let data = ingest(&spec)?;
        let report = run_kfold_prediction(&data.x, &data.y, args.folds, &methods, args.seed)?;
        if let Some(path) = &args.out {
            report.write_jsonl(BufWriter::new(File::create(path)?))?;
            let mut txt = path.clone().into_os_string();
            txt.push(".txt");
            std::fs::write(txt, report.table())?;
        }
        print!("{}", report.table());
        return Ok(ExitCode::SUCCESS);
    }

    let example: Example = args
        .example
        .as_deref()
        .expect("clap requires --example without --input")
        .parse()?;
    let mut cfg = BenchConfig::new(example, args.n, args.p, args.reps, methods);
    cfg.snr = args.snr;
    cfg.base_seed = args.seed;
    cfg.output_path = args.out.clone();
    let report = run_bench(&cfg)?;
    for row in report.rows.iter().filter(|r| !r.ok) {
        warn!(
            "replicate {} ({}) failed: {}",
            row.replicate,
            row.method,
            row.error.as_deref().unwrap_or("unknown error")
        );
    }
    print!("{}", report.table());
    Ok(ExitCode::SUCCESS)
}

pub fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let example: Example = args.example.parse()?;
    let inst = gen_example(example, args.n, args.p, args.snr, args.seed)?;
    let names = default_feature_names(args.p);
    write_matrix_file(&args.out, inst.x.view(), inst.y.view(), &names, "y")?;
    info!(
        "wrote example {example} (n = {}, p = {}, sigma = {:.6}, checksum {}) to {}",
        args.n,
        args.p,
        inst.sigma,
        inst.checksum(),
        args.out.display()
    );
    if let Some(path) = &args.truth {
        let support = inst.true_support();
        let truth = serde_json::json!({
            "example": example.to_string(),
            "n": args.n,
            "p": args.p,
            "snr": args.snr,
            "seed": args.seed,
            "sigma": inst.sigma,
            "support": support,
            "coefficients": support.iter().map(|&j| inst.beta_true.beta[j]).collect::<Vec<_>>(),
            "checksum": inst.checksum(),
        });
        std::fs::write(path, format!("{truth}\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn check_identity(args: CheckIdentityArgs) -> Result<ExitCode> {
    let shapes: Vec<(usize, usize)> = match (args.n, args.p) {
        (Some(n), Some(p)) => vec![(n, p)],
        _ => IDENTITY_SHAPES.to_vec(),
    };
    let ridges: Vec<f64> = match args.r {
        Some(r) => vec![r],
        None => IDENTITY_RIDGES.to_vec(),
    };

    let mut worst: Option<(f64, usize, usize, f64)> = None;
    for (k, &(n, p)) in shapes.iter().enumerate() {
        let seed = args.seed.wrapping_add(k as u64);
        let x = DesignMatrix::new(gaussian_design(n, p, &CovarianceSpec::Identity, seed)?)?;
        let y = ResponseVector::new(
            gaussian_design(n, 1, &CovarianceSpec::Identity, seed ^ 0x9e37_79b9)?.column(0).to_owned(),
        )?;
        for &r in &ridges {
            if r == 0.0 && p != n {
                let side = if p > n { "primal" } else { "dual" };
                println!("n = {n:>4} p = {p:>4} r = 0: {side} side skipped, its Gram matrix is singular");
                continue;
            }
            let dual = ridge_dual_solve(&x, &y, r)?;
            let primal = ridge_primal_solve(&x, &y, r)?;
            let diff = &dual.beta - &primal.beta;
            let scale = primal.beta.dot(&primal.beta).sqrt().max(f64::MIN_POSITIVE);
            let rel = diff.dot(&diff).sqrt() / scale;
            println!("n = {n:>4} p = {p:>4} r = {r:<8e} relative discrepancy {rel:.3e}");
            if worst.is_none_or(|(w, ..)| rel > w) {
                worst = Some((rel, n, p, r));
            }
        }
    }

    match worst {
        None => {
            println!("no comparisons were run");
            Ok(ExitCode::SUCCESS)
        }
        Some((rel, n, p, r)) if rel <= IDENTITY_TOL => {
            println!("max relative discrepancy {rel:.3e} (n = {n}, p = {p}, r = {r:e}): ok");
            Ok(ExitCode::SUCCESS)
        }
        Some((rel, n, p, r)) => {
            println!(
                "max relative discrepancy {rel:.3e} exceeds {IDENTITY_TOL:e} at n = {n}, p = {p}, r = {r:e}"
            );
            Ok(ExitCode::from(1))
        }
    }
}

