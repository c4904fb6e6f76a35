//! Subcommand implementations and the top-level entry point.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, Command};

use slumpnet_core::check::{grad_check, grad_check_sampled, GradReport};
use slumpnet_core::layers::{
    conv2d, conv3d, maxpool2d, maxpool3d, BatchNormLayer, ConvLstm2dLayer, DenseLayer, Mode,
};
use slumpnet_core::models::{Model, ModelId};
use slumpnet_core::ops::mean_abs_error;
use slumpnet_core::synth::{
    clip_params, generate_clip, generate_dataset, DatasetSpec, Split,
};
use slumpnet_core::train::{self, NullClock, TrainConfig, WallClock};
use slumpnet_core::{RngStream, Tensor};

use crate::config::{keys_for, read_config_file, resolve, RunConfig};
use crate::dataset::{build_datasets, pipeline_from};
use crate::manifest::{write_manifest, ManifestRow};
use crate::{checkpoint, cwv, exit, CliError, CliResult};

const COMMANDS: &[(&str, &str)] = &[
    ("synth", "render a synthetic mixing-drum dataset and its manifest"),
    ("train", "train a model on a manifest and write checkpoint + log"),
    ("eval", "evaluate seed-numbered checkpoints on a split"),
    ("gradcheck", "verify analytic gradients against finite differences"),
    ("params", "audit per-tensor and total parameter counts"),
    ("curves", "convert a training log into a plot-ready long CSV"),
];

/// Entry point for `main`: parses real args and environment.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let env: Vec<(String, String)> = std::env::vars().collect();
    run_from(args, env)
}

/// Testable entry point with explicit args and environment.
pub fn run_from(args: Vec<String>, env: Vec<(String, String)>) -> i32 {
    let parsed = match clap_tree().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            // --help and --version land here by design.
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let (sub_name, sub) = parsed.subcommand().expect("subcommand is required");
    let name = COMMANDS
        .iter()
        .map(|&(n, _)| n)
        .find(|n| *n == sub_name)
        .expect("clap only admits registered subcommands");

    let outcome = gather_config(name, sub, &env).and_then(|cfg| {
        print!("{}", cfg.echo());
        dispatch(name, &cfg)
    });
    match outcome {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn clap_tree() -> Command {
    let mut root = Command::new("slumpnet")
        .about("Spatio-temporal slump regression on mixing-drum footage")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for &(name, about) in COMMANDS {
        let mut sub = Command::new(name).about(about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("config file with one `key = value` per line"),
        );
        if matches!(name, "params" | "gradcheck") {
            sub = sub.arg(
                Arg::new("model_pos")
                    .value_name("MODEL")
                    .help("model-a, model-b, model-c or all"),
            );
        }
        for spec in keys_for(name) {
            let mut arg = Arg::new(spec.key)
                .long(spec.key.replace('_', "-"))
                .value_name("VALUE")
                .action(ArgAction::Set)
                .help(format!("{} [default: {}]", spec.help, spec.default));
            if matches!(spec.default, "true" | "false") {
                arg = arg.num_args(0..=1).default_missing_value("true");
            }
            sub = sub.arg(arg);
        }
        root = root.subcommand(sub);
    }
    root
}

fn gather_config(
    name: &'static str,
    sub: &clap::ArgMatches,
    env: &[(String, String)],
) -> CliResult<RunConfig> {
    let file_pairs = match sub.get_one::<String>("config") {
        Some(path) => read_config_file(Path::new(path))?,
        None => Vec::new(),
    };
    let mut flags: Vec<(String, String)> = Vec::new();
    if let Ok(Some(model)) = sub.try_get_one::<String>("model_pos") {
        flags.push(("model".to_string(), model.clone()));
    }
    for spec in keys_for(name) {
        if let Some(v) = sub.get_one::<String>(spec.key) {
            if sub.value_source(spec.key) == Some(clap::parser::ValueSource::CommandLine) {
                flags.push((spec.key.to_string(), v.clone()));
            }
        }
    }
    resolve(name, &file_pairs, env, &flags)
}

fn dispatch(name: &str, cfg: &RunConfig) -> CliResult<()> {
    if keys_for(name).iter().any(|k| k.key == "threads") {
        configure_threads(cfg.get_usize("threads")?)?;
    }
    match name {
        "synth" => cmd_synth(cfg),
        "train" => cmd_train(cfg),
        "eval" => cmd_eval(cfg),
        "gradcheck" => cmd_gradcheck(cfg),
        "params" => cmd_params(cfg),
        "curves" => cmd_curves(cfg),
        other => Err(CliError::input(format!("unknown command {other}"))),
    }
}

fn configure_threads(threads: usize) -> CliResult<()> {
    if threads == 0 {
        return Err(CliError::input("threads must be at least 1".to_string()));
    }
    // Results are identical at any thread count (workers only ever own
    // disjoint output ranges); the pool size just caps parallelism.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn parse_model(cfg: &RunConfig) -> CliResult<ModelId> {
    ModelId::parse(cfg.get("model")).map_err(CliError::from)
}

fn model_list(cfg: &RunConfig) -> CliResult<Vec<ModelId>> {
    if cfg.get("model") == "all" {
        Ok(ModelId::all().to_vec())
    } else {
        Ok(vec![parse_model(cfg)?])
    }
}

fn run_dir(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(cfg.get("run_dir"))
}

fn manifest_path(cfg: &RunConfig) -> PathBuf {
    match cfg.get("manifest") {
        "" => run_dir(cfg).join("manifest.csv"),
        explicit => PathBuf::from(explicit),
    }
}

fn checkpoint_path(dir: &Path, model: ModelId, seed: u64) -> PathBuf {
    dir.join(format!("{}-seed{}.{}", model.name(), seed, checkpoint::EXTENSION))
}

// ---------------------------------------------------------------- synth

fn cmd_synth(cfg: &RunConfig) -> CliResult<()> {
    let dir = run_dir(cfg);
    let fps = cfg.get_u32("fps")?;
    let spec = DatasetSpec {
        clips: cfg.get_usize("n")?,
        frames: (cfg.get_f64("clip_seconds")? * fps as f64).round() as usize,
        height: cfg.get_usize("raw_height")?,
        width: cfg.get_usize("raw_width")?,
        fps,
        slump_range: (cfg.get_f64("slump_lo")?, cfg.get_f64("slump_hi")?),
        ratios: (
            cfg.get_ratio("ratio_train")?,
            cfg.get_ratio("ratio_val")?,
            cfg.get_ratio("ratio_test")?,
        ),
        seed: cfg.get_u64("seed")?,
    };
    let records = generate_dataset(&spec)?;
    let manifest_only = cfg.get_bool("manifest_only")?;

    fs::create_dir_all(&dir).map_err(crate::at_path(&dir))?;
    let clip_dir = dir.join("clips");
    if !manifest_only {
        fs::create_dir_all(&clip_dir).map_err(crate::at_path(&clip_dir))?;
    }

    let mut rows = Vec::with_capacity(records.len());
    let mut counts = [0usize; 3];
    for rec in &records {
        let rel = format!("clips/clip-{:05}.{}", rec.index, cwv::EXTENSION);
        if !manifest_only {
            let clip = generate_clip(&clip_params(&spec, rec))?;
            cwv::write_clip(&dir.join(&rel), &clip)?;
        }
        counts[match rec.split {
            Split::Train => 0,
            Split::Val => 1,
            Split::Test => 2,
        }] += 1;
        rows.push(ManifestRow {
            path: rel,
            slump_cm: rec.slump_cm,
            split: rec.split,
            seed: rec.clip_seed,
        });
    }
    let manifest = dir.join("manifest.csv");
    write_manifest(&manifest, &rows)?;

    println!(
        "wrote {} ({} train / {} val / {} test){}",
        manifest.display(),
        counts[0],
        counts[1],
        counts[2],
        if manifest_only { ", clips not rendered" } else { "" }
    );
    Ok(())
}

// ---------------------------------------------------------------- train

fn cmd_train(cfg: &RunConfig) -> CliResult<()> {
    let dir = run_dir(cfg);
    let id = parse_model(cfg)?;
    let pipe = pipeline_from(cfg)?;
    let limit = cfg.get_usize("n")?;
    let seed = cfg.get_u64("seed")?;

    let report = build_datasets(&manifest_path(cfg), &pipe, limit, &[Split::Train, Split::Val])?;
    println!(
        "loaded {} train / {} val samples from {} / {} clips",
        report.sets.train.len(),
        report.sets.val.len(),
        report.clips[0],
        report.clips[1]
    );

    let model = Model::<f32>::build(id, seed)?;
    let train_cfg = TrainConfig {
        epochs: cfg.get_usize("epochs")?,
        batch_size: cfg.get_usize("batch_size")?,
        seed,
        optimizer: slumpnet_core::optim::AdamWConfig {
            lr: cfg.get_f64("lr")?,
            weight_decay: cfg.get_f64("weight_decay")?,
            ..Default::default()
        },
        shuffle: cfg.get_bool("shuffle")?,
    };

    // Wall-clock timings vary between runs, so the deterministic
    // single-thread mode zeroes the seconds column to keep logs
    // byte-identical.
    let deterministic = cfg.get_usize("threads")? == 1;
    let val = (!report.sets.val.is_empty()).then_some(&report.sets.val);
    let outcome = if deterministic {
        train::train(&model, &report.sets.train, val, &train_cfg, &NullClock)?
    } else {
        train::train(&model, &report.sets.train, val, &train_cfg, &WallClock::new())?
    };

    fs::create_dir_all(&dir).map_err(crate::at_path(&dir))?;
    let log_path = dir.join("train_log.csv");
    let mut log = String::from("epoch,train_loss,val_mae,seconds\n");
    for rec in &outcome.log {
        let val_txt = match rec.val_mae {
            Some(v) => format!("{v:.6}"),
            None => "nan".to_string(),
        };
        log.push_str(&format!(
            "{},{:.6},{},{:.3}\n",
            rec.epoch, rec.train_loss, val_txt, rec.seconds
        ));
    }
    fs::write(&log_path, log).map_err(crate::at_path(&log_path))?;

    let ckpt_path = checkpoint_path(&dir, id, seed);
    let state = match &outcome.best_state {
        Some(entries) => entries.clone(),
        None => model.state_entries(),
    };
    checkpoint::write_checkpoint(&ckpt_path, id, &state)?;

    let first = outcome.log.first().map(|r| r.train_loss).unwrap_or(f64::NAN);
    println!(
        "train loss {:.3} -> {:.3} over {} epochs",
        first,
        outcome.final_train_loss,
        outcome.log.len()
    );
    match (outcome.best_epoch, outcome.best_val_mae) {
        (Some(e), Some(m)) => println!("best val MAE {m:.3} at epoch {e}; checkpoint from that epoch"),
        _ => println!("no validation samples; checkpoint holds the final epoch"),
    }
    println!("wrote {} and {}", log_path.display(), ckpt_path.display());
    Ok(())
}

// ----------------------------------------------------------------- eval

fn cmd_eval(cfg: &RunConfig) -> CliResult<()> {
    let dir = run_dir(cfg);
    let id = parse_model(cfg)?;
    let split = Split::parse(cfg.get("split"))?;
    let seeds = cfg.get_usize("seeds")?;
    if seeds == 0 {
        return Err(CliError::input("seeds must be at least 1".to_string()));
    }
    let base_seed = cfg.get_u64("seed")?;
    let explicit = cfg.get("checkpoint");
    if !explicit.is_empty() && seeds != 1 {
        return Err(CliError::input(
            "an explicit --checkpoint evaluates one model; drop it or use --seeds 1".to_string(),
        ));
    }

    let pipe = pipeline_from(cfg)?;
    let report = build_datasets(&manifest_path(cfg), &pipe, 0, &[split])?;
    let ds = report.sets.get(split);
    let batch = cfg.get_usize("batch_size")?;

    let mut maes = Vec::with_capacity(seeds);
    for k in 0..seeds {
        let seed = base_seed + k as u64;
        let path = if explicit.is_empty() {
            checkpoint_path(&dir, id, seed)
        } else {
            PathBuf::from(explicit)
        };
        let (ckpt_id, entries) = checkpoint::read_checkpoint::<f32>(&path)?;
        if ckpt_id != id {
            return Err(CliError::input(format!(
                "{} holds {}, expected {}",
                path.display(),
                ckpt_id.name(),
                id.name()
            )));
        }
        let model = Model::<f32>::build(id, 0)?;
        model.load_state(&entries)?;
        let result = train::evaluate(&model, ds, batch)?;
        println!("seed {seed}: MAE {:.1}cm over {} samples", result.mae, ds.len());
        maes.push(result.mae);
    }

    let mean = maes.iter().sum::<f64>() / maes.len() as f64;
    let std = if maes.len() > 1 {
        let var =
            maes.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (maes.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    println!(
        "{} {} MAE: {:.1}cm ±{:.1}cm ({} seeds, {} samples)",
        id.name(),
        split.as_str(),
        mean,
        std,
        maes.len(),
        ds.len()
    );

    fs::create_dir_all(&dir).map_err(crate::at_path(&dir))?;
    let metrics_path = dir.join("metrics.csv");
    let mut out = String::from("seed,samples,mae_cm\n");
    for (k, mae) in maes.iter().enumerate() {
        out.push_str(&format!("{},{},{mae:.6}\n", base_seed + k as u64, ds.len()));
    }
    out.push_str(&format!("mean,{},{mean:.6}\n", ds.len()));
    out.push_str(&format!("std,{},{std:.6}\n", ds.len()));
    fs::write(&metrics_path, out).map_err(crate::at_path(&metrics_path))?;
    println!("wrote {}", metrics_path.display());
    Ok(())
}

// ------------------------------------------------------------ gradcheck

struct CheckCase {
    name: &'static str,
    report: GradReport,
}

fn cmd_gradcheck(cfg: &RunConfig) -> CliResult<()> {
    if cfg.get("scale") != "reduced" {
        return Err(CliError::input(format!(
            "scale `{}` is not supported; only `reduced` is",
            cfg.get("scale")
        )));
    }
    let seed = cfg.get_u64("seed")?;
    let threshold = 1e-4;

    let mut cases = layer_checks(seed)?;
    for id in model_list(cfg)? {
        cases.push(CheckCase {
            name: id.name(),
            report: model_check(id, seed)?,
        });
    }

    let mut failures = Vec::new();
    println!("{:<22} {:>12}  result", "layer", "max rel err");
    for case in &cases {
        let ok = case.report.passes(threshold);
        println!(
            "{:<22} {:>12.3e}  {}",
            case.name,
            case.report.max_rel_err,
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failures.push(format!(
                "{} ({:.3e} at {})",
                case.name, case.report.max_rel_err, case.report.worst
            ));
        }
    }
    if !failures.is_empty() {
        return Err(CliError::verify(format!(
            "gradient check failed for {}",
            failures.join(", ")
        )));
    }
    println!("all gradients within {threshold:.0e}");
    Ok(())
}

/// Finite-difference sweeps for each layer primitive, in f64.
fn layer_checks(seed: u64) -> CliResult<Vec<CheckCase>> {
    const EPS: f64 = 1e-5;
    let mut cases = Vec::new();
    let mut push = |name: &'static str, report: slumpnet_core::Result<GradReport>| -> CliResult<()> {
        cases.push(CheckCase { name, report: report? });
        Ok(())
    };

    let mut rng = RngStream::new(seed, 31);
    let masked = |y: &Tensor<f64>, mask: &Tensor<f64>| y.mul(mask)?.mean_all();

    {
        let x = Tensor::<f64>::uniform(&[2, 5, 6, 3], -1.0, 1.0, &mut rng)?.traced();
        let k = Tensor::<f64>::uniform(&[3, 3, 3, 2], -1.0, 1.0, &mut rng)?.traced();
        let b = Tensor::<f64>::uniform(&[2], -1.0, 1.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(conv2d(&x, &k, Some(&b), 1)?.shape(), -1.0, 1.0, &mut rng)?;
        push("conv2d", grad_check(
            || masked(&conv2d(&x, &k, Some(&b), 1)?, &mask),
            &[n("x", &x), n("kernel", &k), n("bias", &b)],
            EPS,
        ))?;
    }
    {
        let x = Tensor::<f64>::uniform(&[1, 3, 5, 5, 2], -1.0, 1.0, &mut rng)?.traced();
        let k = Tensor::<f64>::uniform(&[3, 3, 3, 2, 2], -1.0, 1.0, &mut rng)?.traced();
        let b = Tensor::<f64>::uniform(&[2], -1.0, 1.0, &mut rng)?.traced();
        let mask =
            Tensor::<f64>::uniform(conv3d(&x, &k, Some(&b), 1, 1)?.shape(), -1.0, 1.0, &mut rng)?;
        push("conv3d", grad_check(
            || masked(&conv3d(&x, &k, Some(&b), 1, 1)?, &mask),
            &[n("x", &x), n("kernel", &k), n("bias", &b)],
            EPS,
        ))?;
    }
    {
        let lstm = ConvLstm2dLayer::<f64>::new(3, 2, 2, &mut rng)?;
        let x = Tensor::<f64>::uniform(&[1, 3, 4, 4, 2], -1.0, 1.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(&[1, 3, 4, 4, 2], -1.0, 1.0, &mut rng)?;
        push("convlstm", grad_check(
            || masked(&lstm.forward(&x, Mode::Train)?, &mask),
            &[
                n("x", &x),
                n("input_kernel", &lstm.input_kernel),
                n("recurrent_kernel", &lstm.recurrent_kernel),
                n("bias", &lstm.bias),
            ],
            EPS,
        ))?;
    }
    {
        let bn = BatchNormLayer::<f64>::new(3)?;
        let x = Tensor::<f64>::uniform(&[4, 5, 5, 3], -2.0, 2.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(&[4, 5, 5, 3], -1.0, 1.0, &mut rng)?;
        push("batch-norm", grad_check(
            || masked(&bn.forward(&x, Mode::Train)?, &mask),
            &[n("x", &x), n("gamma", &bn.gamma), n("beta", &bn.beta)],
            EPS,
        ))?;
    }
    {
        let dense = DenseLayer::<f64>::new(6, 3, &mut rng)?;
        let x = Tensor::<f64>::uniform(&[4, 6], -1.0, 1.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(&[4, 3], -1.0, 1.0, &mut rng)?;
        push("dense", grad_check(
            || masked(&dense.forward(&x, Mode::Train)?, &mask),
            &[n("x", &x), n("weight", &dense.weight), n("bias", &dense.bias)],
            EPS,
        ))?;
    }
    {
        let x = Tensor::<f64>::uniform(&[2, 6, 6, 2], -1.0, 1.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(&[2, 3, 3, 2], -1.0, 1.0, &mut rng)?;
        push("maxpool2d", grad_check(|| masked(&maxpool2d(&x)?, &mask), &[n("x", &x)], EPS))?;
    }
    {
        let x = Tensor::<f64>::uniform(&[1, 4, 4, 4, 2], -1.0, 1.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(&[1, 2, 2, 2, 2], -1.0, 1.0, &mut rng)?;
        push("maxpool3d", grad_check(|| masked(&maxpool3d(&x)?, &mask), &[n("x", &x)], EPS))?;
    }
    {
        let x = Tensor::<f64>::uniform(&[2, 3, 3, 4], -1.0, 1.0, &mut rng)?.traced();
        let mask = Tensor::<f64>::uniform(&[2, 4], -1.0, 1.0, &mut rng)?;
        push("global-avg-pool", grad_check(
            || masked(&x.global_avg_pool()?, &mask),
            &[n("x", &x)],
            EPS,
        ))?;
    }
    Ok(cases)
}

/// End-to-end model sweep at reduced scale, sampled coordinates.
fn model_check(id: ModelId, seed: u64) -> CliResult<GradReport> {
    // Small enough that the stencil stays on one side of every
    // activation kink; f64 rounding noise stays near 1e-9.
    const EPS: f64 = 3e-7;
    let model = Model::<f64>::build(id, 7)?;
    let mut rng = RngStream::new(seed, 32);
    let x = Tensor::<f64>::uniform(&[2, 4, 8, 8, 3], 0.0, 1.0, &mut rng)?.traced();
    let target = Tensor::from_vec(&[2, 1], vec![1.5, -2.0])?;
    let mut leaves = vec![n("input", &x)];
    for p in model.parameters() {
        leaves.push((p.name.clone(), p.tensor.clone()));
    }
    let forward = || mean_abs_error(&model.forward(&x, Mode::Train)?, &target);
    let mut coord_rng = RngStream::new(seed, 33);
    Ok(grad_check_sampled(forward, &leaves, EPS, 3, &mut coord_rng)?)
}

fn n(name: &str, t: &Tensor<f64>) -> (String, Tensor<f64>) {
    (name.to_string(), t.clone())
}

// ---------------------------------------------------------------- params

fn cmd_params(cfg: &RunConfig) -> CliResult<()> {
    let mut all_match = true;
    for id in model_list(cfg)? {
        let model = Model::<f32>::build(id, 0)?;
        println!("{}", id.name());
        let mut total = 0usize;
        for p in model.parameters() {
            let numel = p.tensor.numel();
            total += numel;
            println!("  {:<28} {:<18} {:>8}", p.name, format!("{:?}", p.tensor.shape()), numel);
        }
        let expected = id.expected_params();
        let verdict = if total == expected { "ok" } else { "MISMATCH" };
        println!("  {:<28} {:<18} {:>8}", "total", "", total);
        println!("  {:<28} {:<18} {:>8}  {}", "expected", "", expected, verdict);
        all_match &= total == expected;
    }
    if !all_match {
        return Err(CliError::verify("parameter totals do not match".to_string()));
    }
    Ok(())
}

// ---------------------------------------------------------------- curves

fn cmd_curves(cfg: &RunConfig) -> CliResult<()> {
    let log_path = match cfg.get("log") {
        "" => run_dir(cfg).join("train_log.csv"),
        p => PathBuf::from(p),
    };
    let out_path = match cfg.get("out") {
        "" => run_dir(cfg).join("curves.csv"),
        p => PathBuf::from(p),
    };

    let text = fs::read_to_string(&log_path).map_err(crate::at_path(&log_path))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != "epoch,train_loss,val_mae,seconds" {
        return Err(CliError::input(format!(
            "{}: expected a train_log.csv header, found `{header}`",
            log_path.display()
        )));
    }

    // Values are passed through as their original text so the
    // round trip is exact.
    let mut out = String::from("series,epoch,value\n");
    let mut rows = 0usize;
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 || fields[0].parse::<usize>().is_err() {
            return Err(CliError::input(format!(
                "{} line {}: malformed log row `{line}`",
                log_path.display(),
                i + 2
            )));
        }
        out.push_str(&format!("train,{},{}\n", fields[0], fields[1]));
        out.push_str(&format!("val,{},{}\n", fields[0], fields[2]));
        rows += 2;
    }
    if rows == 0 {
        return Err(CliError::input(format!(
            "{}: log has no epochs",
            log_path.display()
        )));
    }

    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(crate::at_path(parent))?;
        }
    }
    fs::write(&out_path, out).map_err(crate::at_path(&out_path))?;
    println!("wrote {} ({rows} rows)", out_path.display());
    Ok(())
}
