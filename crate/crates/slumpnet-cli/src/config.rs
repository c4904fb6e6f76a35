//! Layered run configuration.
//!
//! Every command owns a fixed set of string-valued keys. A key's
//! effective value is resolved through five layers, later layers
//! winning:
//!
//! 1. the built-in default,
//! 2. the selected preset,
//! 3. a config file (`--config FILE`, one `key = value` per line,
//!    `#` comments),
//! 4. environment variables (`SLUMPNET_<KEY>` upper-cased),
//! 5. command-line flags (`--<key>` with `_` spelled `-`).
//!
//! Unknown keys are rejected: a config file may only set keys of the
//! command it is passed to, and `SLUMPNET_*` variables must name a key
//! of some command (keys belonging to other commands are ignored, so
//! one environment can serve a whole pipeline of commands).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { key, default, help }
}

/// Keys shared by every command.
const COMMON_KEYS: &[KeySpec] = &[
    key("run_dir", "run", "directory receiving all artifacts"),
    key("threads", "1", "worker threads; 1 guarantees the determinism contract"),
];

const GEOMETRY_KEYS: &[KeySpec] = &[
    key("target_fps", "15", "decimate clips to this rate before windowing; 0 keeps the native rate"),
    key("tail_seconds", "10", "keep only this final stretch of each clip; 0 keeps everything"),
    key("window_seconds", "2", "length of each training window"),
    key("input_height", "224", "model input height after resizing"),
    key("input_width", "224", "model input width after resizing"),
    key("roi_radius", "0.48", "circular mask radius as a fraction of the short side; 0 disables"),
    key("roi_center_x", "0.5", "mask center x as a fraction of width"),
    key("roi_center_y", "0.5", "mask center y as a fraction of height"),
];

const SYNTH_KEYS: &[KeySpec] = &[
    key("preset", "paper-shape", "named bundle of defaults: paper-shape or desk"),
    key("seed", "0", "master seed; labels, splits and clip noise all derive from it"),
    key("n", "255", "number of clips"),
    key("clip_seconds", "30", "raw footage length per clip"),
    key("fps", "15", "raw footage frame rate"),
    key("raw_height", "224", "rendered frame height"),
    key("raw_width", "224", "rendered frame width"),
    key("slump_lo", "40", "lower end of the label range, cm"),
    key("slump_hi", "190", "upper end of the label range, cm"),
    key("ratio_train", "185/255", "training fraction; fractions like 2/3 are accepted"),
    key("ratio_val", "35/255", "validation fraction"),
    key("ratio_test", "35/255", "test fraction"),
    key("manifest_only", "false", "write the manifest without rendering clip files"),
];

const TRAIN_KEYS: &[KeySpec] = &[
    key("preset", "desk", "named bundle of defaults: paper-shape or desk"),
    key("seed", "0", "seeds parameter init and batch shuffling"),
    key("model", "model-c", "model-a, model-b or model-c"),
    key("manifest", "", "manifest path; empty means <run_dir>/manifest.csv"),
    key("n", "0", "use only the first n manifest rows; 0 uses all"),
    key("epochs", "50", "training epochs"),
    key("batch_size", "16", "samples per optimizer step"),
    key("lr", "1e-4", "learning rate"),
    key("weight_decay", "1e-4", "decoupled weight decay on kernels and dense weights"),
    key("shuffle", "true", "reshuffle training samples every epoch"),
];

const EVAL_KEYS: &[KeySpec] = &[
    key("preset", "desk", "named bundle of defaults: paper-shape or desk"),
    key("seed", "0", "first seed of the checkpoint family"),
    key("model", "model-c", "model-a, model-b or model-c"),
    key("manifest", "", "manifest path; empty means <run_dir>/manifest.csv"),
    key("split", "test", "which split to evaluate: train, val or test"),
    key("seeds", "1", "evaluate this many seed-numbered sibling checkpoints"),
    key("checkpoint", "", "explicit checkpoint path; empty discovers <run_dir>/<model>-seed<seed>.ckpt"),
    key("batch_size", "16", "evaluation batch size"),
];

const GRADCHECK_KEYS: &[KeySpec] = &[
    key("model", "all", "model-a, model-b, model-c or all"),
    key("scale", "reduced", "check scale; only `reduced` is supported"),
    key("seed", "0", "seeds the probe tensors"),
];

const PARAMS_KEYS: &[KeySpec] = &[key("model", "all", "model-a, model-b, model-c or all")];

const CURVES_KEYS: &[KeySpec] = &[
    key("log", "", "training log to convert; empty means <run_dir>/train_log.csv"),
    key("out", "", "output path; empty means <run_dir>/curves.csv"),
];

/// The per-command key registries. Geometry keys appear wherever the
/// preprocessing pipeline runs.
pub fn keys_for(command: &str) -> &'static [KeySpec] {
    // Assembled once; order inside each slice is the help order.
    macro_rules! table {
        ($name:ident, $($part:expr),+) => {{
            static $name: std::sync::OnceLock<Vec<KeySpec>> = std::sync::OnceLock::new();
            $name.get_or_init(|| {
                let mut v = Vec::new();
                $(v.extend_from_slice($part);)+
                v
            }).as_slice()
        }};
    }
    match command {
        "synth" => table!(SYNTH, COMMON_KEYS, SYNTH_KEYS),
        "train" => table!(TRAIN, COMMON_KEYS, TRAIN_KEYS, GEOMETRY_KEYS),
        "eval" => table!(EVAL, COMMON_KEYS, EVAL_KEYS, GEOMETRY_KEYS),
        "gradcheck" => table!(GRADCHECK, COMMON_KEYS, GRADCHECK_KEYS),
        "params" => table!(PARAMS, PARAMS_KEYS),
        "curves" => table!(CURVES, COMMON_KEYS, CURVES_KEYS),
        _ => panic!("unregistered command {command}"),
    }
}

/// Every key of every command, for environment-variable validation.
fn all_known_keys() -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = ["synth", "train", "eval", "gradcheck", "params", "curves"]
        .iter()
        .flat_map(|c| keys_for(c).iter().map(|k| k.key))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}

/// Preset bundles. Only the keys a command registers are applied.
fn preset_overrides(name: &str) -> CliResult<&'static [(&'static str, &'static str)]> {
    match name {
        // Full pipeline arithmetic: 30 s at 15 fps, final 10 s,
        // 2 s windows of 30 frames at 224 square.
        "paper-shape" => Ok(&[]),
        // Small enough that a full train-evaluate cycle fits in
        // minutes on one CPU core: 5 s clips at 4 fps, 2 s tail, one
        // 8-frame window per clip at 56 square, 96 clips in 64/16/16.
        "desk" => Ok(&[
            ("n", "96"),
            ("clip_seconds", "5"),
            ("fps", "4"),
            ("raw_height", "64"),
            ("raw_width", "64"),
            ("ratio_train", "2/3"),
            ("ratio_val", "1/6"),
            ("ratio_test", "1/6"),
            ("target_fps", "0"),
            ("tail_seconds", "2"),
            ("window_seconds", "2"),
            ("input_height", "56"),
            ("input_width", "56"),
            ("epochs", "30"),
            ("batch_size", "4"),
            ("lr", "1e-2"),
        ]),
        other => Err(CliError::input(format!(
            "unknown preset `{other}`; choose paper-shape or desk"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    Preset,
    File,
    Env,
    Flag,
}

impl Source {
    fn label(self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::Preset => "preset",
            Source::File => "file",
            Source::Env => "env",
            Source::Flag => "flag",
        }
    }
}

/// Effective configuration for one command invocation.
#[derive(Debug)]
pub struct RunConfig {
    command: &'static str,
    values: BTreeMap<&'static str, (String, Source)>,
}

/// Reads a `key = value` config file. Blank lines and `#` comments
/// are allowed.
pub fn read_config_file(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(crate::at_path(path))?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::input(format!(
                "{} line {}: expected `key = value`, found `{raw}`",
                path.display(),
                i + 1
            )));
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Environment variable name for a key.
pub fn env_name(key: &str) -> String {
    format!("SLUMPNET_{}", key.to_uppercase())
}

pub fn resolve(
    command: &'static str,
    file_pairs: &[(String, String)],
    env: &[(String, String)],
    flags: &[(String, String)],
) -> CliResult<RunConfig> {
    let registry = keys_for(command);
    let find = |k: &str| registry.iter().find(|spec| spec.key == k);

    // Start from defaults.
    let mut values: BTreeMap<&'static str, (String, Source)> = registry
        .iter()
        .map(|spec| (spec.key, (spec.default.to_string(), Source::Default)))
        .collect();

    // Layers above the preset, validated before the preset is chosen
    // so that `preset` itself can come from any of them.
    let mut upper: Vec<(&'static str, String, Source)> = Vec::new();
    for (k, v) in file_pairs {
        let spec = find(k).ok_or_else(|| {
            CliError::input(format!("unknown config key `{k}` for `{command}`"))
        })?;
        upper.push((spec.key, v.clone(), Source::File));
    }
    let known = all_known_keys();
    for (name, value) in env {
        let Some(raw) = name.strip_prefix("SLUMPNET_") else { continue };
        let lower = raw.to_lowercase();
        if !known.contains(&lower.as_str()) {
            return Err(CliError::input(format!(
                "environment variable {name} does not name a config key"
            )));
        }
        if let Some(spec) = find(&lower) {
            upper.push((spec.key, value.clone(), Source::Env));
        }
    }
    for (k, v) in flags {
        let spec = find(k).ok_or_else(|| {
            CliError::input(format!("unknown flag key `{k}` for `{command}`"))
        })?;
        upper.push((spec.key, v.clone(), Source::Flag));
    }

    // Apply the preset under everything else.
    if find("preset").is_some() {
        let mut preset = values["preset"].0.clone();
        for (k, v, _) in &upper {
            if *k == "preset" {
                preset = v.clone();
            }
        }
        for &(k, v) in preset_overrides(&preset)? {
            if let Some(spec) = find(k) {
                values.insert(spec.key, (v.to_string(), Source::Preset));
            }
        }
    }

    // `upper` is ordered file < env < flag because of push order.
    for (k, v, source) in upper {
        values.insert(k, (v, source));
    }

    Ok(RunConfig { command, values })
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        self.command
    }

    pub fn get(&self, key: &str) -> &str {
        &self
            .values
            .get(key)
            .unwrap_or_else(|| panic!("key {key} not registered for {}", self.command))
            .0
    }

    pub fn get_usize(&self, key: &str) -> CliResult<usize> {
        self.get(key)
            .parse()
            .map_err(|_| bad_value(key, self.get(key), "a non-negative integer"))
    }

    pub fn get_u64(&self, key: &str) -> CliResult<u64> {
        self.get(key)
            .parse()
            .map_err(|_| bad_value(key, self.get(key), "an unsigned integer"))
    }

    pub fn get_u32(&self, key: &str) -> CliResult<u32> {
        self.get(key)
            .parse()
            .map_err(|_| bad_value(key, self.get(key), "an unsigned integer"))
    }

    pub fn get_f64(&self, key: &str) -> CliResult<f64> {
        let v: f64 = self
            .get(key)
            .parse()
            .map_err(|_| bad_value(key, self.get(key), "a number"))?;
        if !v.is_finite() {
            return Err(bad_value(key, self.get(key), "a finite number"));
        }
        Ok(v)
    }

    pub fn get_bool(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(bad_value(key, other, "true or false")),
        }
    }

    /// A fraction like `2/3` or a plain decimal.
    pub fn get_ratio(&self, key: &str) -> CliResult<f64> {
        let raw = self.get(key);
        let value = if let Some((num, den)) = raw.split_once('/') {
            let n: f64 = num.trim().parse().map_err(|_| bad_value(key, raw, "a fraction"))?;
            let d: f64 = den.trim().parse().map_err(|_| bad_value(key, raw, "a fraction"))?;
            n / d
        } else {
            raw.parse().map_err(|_| bad_value(key, raw, "a fraction or decimal"))?
        };
        if !value.is_finite() {
            return Err(bad_value(key, raw, "a finite fraction"));
        }
        Ok(value)
    }

    /// The `key = value [source]` block echoed at the start of a run.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} configuration", self.command);
        let width = self.values.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, (v, source)) in &self.values {
            let _ = writeln!(out, "{k:<width$} = {v}  [{}]", source.label());
        }
        out
    }
}

fn bad_value(key: &str, value: &str, wanted: &str) -> CliError {
    CliError::input(format!("config key `{key}` = `{value}` is not {wanted}"))
}
