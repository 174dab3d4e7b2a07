//! Run configuration: TOML file, command-line flags and defaults, merged in
//! that order of precedence (flags win). The API key comes only from the
//! environment.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Map, Value};
use slate_core::agent::{EpisodeConfig, Settings};
use slate_llm::API_KEY_ENV;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub budget: Option<u32>,
    pub max_actions_per_turn: Option<usize>,
    pub canvas_width: Option<u32>,
    pub temperature: Option<f64>,
    pub token_counter: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub solver: SolverSection,
    pub critic: CriticSection,
    /// Chat endpoint settings for the `llm` solver and critic.
    pub backend: toml::Table,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub kind: Option<String>,
    pub script: Option<PathBuf>,
    pub cassette: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticSection {
    pub kind: Option<String>,
    pub threshold: Option<f64>,
    pub tolerance: Option<u8>,
    pub grid_rows: Option<u32>,
    pub grid_cols: Option<u32>,
}

impl FileConfig {
    /// Loads a config file; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| CliError::config(path, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        rebase(&mut cfg.out);
        rebase(&mut cfg.solver.script);
        rebase(&mut cfg.solver.cassette);
        Ok(cfg)
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub budget: Option<u32>,
    pub canvas_width: Option<u32>,
    pub backend: Option<String>,
    pub script: Option<PathBuf>,
    pub cassette: Option<PathBuf>,
    pub critic: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub episode: EpisodeConfig,
    pub solver_kind: String,
    pub solver_settings: Settings,
    pub critic_settings: Settings,
    pub out: PathBuf,
    pub jobs: usize,
}

fn toml_to_json(table: &toml::Table) -> Map<String, Value> {
    serde_json::to_value(table)
        .ok()
        .and_then(|v| v.as_object().cloned())
        .unwrap_or_default()
}

pub fn resolve(file: FileConfig, flags: &FlagOverrides) -> Result<ResolvedConfig, CliError> {
    let defaults = EpisodeConfig::default();
    let episode = EpisodeConfig {
        budget: flags.budget.or(file.budget).unwrap_or(defaults.budget),
        max_actions_per_turn: file.max_actions_per_turn.unwrap_or(defaults.max_actions_per_turn),
        canvas_width: flags.canvas_width.or(file.canvas_width).unwrap_or(defaults.canvas_width),
        temperature: file.temperature.unwrap_or(defaults.temperature),
        critic: flags
            .critic
            .clone()
            .or(file.critic.kind.clone())
            .unwrap_or(defaults.critic),
        token_counter: file.token_counter.clone().unwrap_or(defaults.token_counter),
    };
    episode.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let script = flags.script.clone().or(file.solver.script);
    let cassette = flags.cassette.clone().or(file.solver.cassette);
    let solver_kind = flags
        .backend
        .clone()
        .or(file.solver.kind)
        .or_else(|| cassette.as_ref().map(|_| "cassette".to_owned()))
        .or_else(|| script.as_ref().map(|_| "scripted".to_owned()))
        .ok_or_else(|| CliError::Usage("no solver configured: pass --backend, --cassette or --script".into()))?;

    let mut backend = toml_to_json(&file.backend);
    if let Some(e) = &flags.endpoint {
        backend.insert("endpoint".into(), json!(e));
    }
    if let Some(m) = &flags.model {
        backend.insert("model".into(), json!(m));
    }
    backend.insert("temperature".into(), json!(episode.temperature));

    let solver_settings = match solver_kind.as_str() {
        "scripted" => {
            let path = script.ok_or_else(|| CliError::Usage("the scripted solver needs --script".into()))?;
            load_script(&path)?
        }
        "cassette" => {
            let path = cassette.ok_or_else(|| CliError::Usage("the cassette solver needs --cassette".into()))?;
            let mut s = Settings::new();
            s.insert("cassette".into(), json!(path.to_string_lossy()));
            s
        }
        _ => backend.clone(),
    };

    let mut critic_settings = Settings::new();
    if episode.critic == "llm" {
        critic_settings = backend;
    } else {
        let c = &file.critic;
        for (k, v) in [
            ("threshold", c.threshold.map(|v| json!(v))),
            ("tolerance", c.tolerance.map(|v| json!(v))),
            ("gridRows", c.grid_rows.map(|v| json!(v))),
            ("gridCols", c.grid_cols.map(|v| json!(v))),
        ] {
            if let Some(v) = v {
                critic_settings.insert(k.into(), v);
            }
        }
    }

    let jobs = flags.jobs.or(file.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(ResolvedConfig {
        episode,
        solver_kind,
        solver_settings,
        critic_settings,
        out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("slate-out")),
        jobs,
    })
}

/// A script is either a JSON array of responses or
/// `{"turns": [...], "repeat": bool}`.
pub fn load_script(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(path, format!("line {}: {e}", e.line())))?;
    match value {
        Value::Array(turns) => {
            let mut s = Settings::new();
            s.insert("turns".into(), Value::Array(turns));
            Ok(s)
        }
        Value::Object(map) => Ok(map),
        _ => Err(CliError::config(path, "script must be an array or an object with \"turns\"")),
    }
}

impl ResolvedConfig {
    /// Everything that was resolved, with the API key reduced to whether it
    /// is set.
    pub fn redacted(&self) -> Value {
        let solver_settings = if self.solver_kind == "scripted" {
            json!({ "turns": self.solver_settings.get("turns").and_then(Value::as_array).map_or(0, Vec::len) })
        } else {
            Value::Object(self.solver_settings.clone())
        };
        json!({
            "episode": self.episode,
            "solver": { "kind": self.solver_kind, "settings": solver_settings },
            "critic": { "kind": self.episode.critic, "settings": self.critic_settings },
            "out": self.out,
            "jobs": self.jobs,
            "apiKey": if std::env::var_os(API_KEY_ENV).is_some() { "<set>" } else { "<unset>" },
        })
    }
}
