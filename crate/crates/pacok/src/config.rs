//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, later duplicates win (with a
//! recorded warning). Defaults follow the reference experiments: a 512x512
//! grid on `[-1,1)^2`, `omega = 0.15`, `M = 1000`, `kappa_h = 2000`,
//! `beta_h = 2`, `TOL = 1e-3`. `eps` (absolute) or `eps_over_h` (multiples
//! of `h_x`), `gamma`, and `tau` have no defaults; every experiment sets
//! them.

use std::collections::HashMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{Indicator, ModelParams};
use crate::solver::SolverParams;

/// How the initial state is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialCondition {
    /// Characteristic function of the centered disc of volume `omega |Omega|`.
    Disc,
    /// Tanh-smoothed disc with the radius shifted by +0.1.
    TanhDisc,
    /// Blockwise-constant uniform random state.
    BlockRandom,
    /// Load a snapshot file.
    File(PathBuf),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub model: ModelParams,
    pub solver: SolverParams,
    pub ic: InitialCondition,
    pub ic_ratio: usize,
    pub seed: u64,
    pub snapshot_stride: usize,
    pub output_dir: PathBuf,
    /// Non-fatal parse notes (duplicate keys and the like).
    pub warnings: Vec<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "nx", "ny", "x", "y", "eps", "eps_over_h", "gamma", "omega", "m", "tau", "kappa", "beta",
    "tol", "max_steps", "enforce_stability", "indicator", "ic", "ic_file", "ic_ratio", "seed",
    "snapshot_stride", "output_dir",
];

struct Raw {
    entries: HashMap<String, (usize, String)>,
    warnings: Vec<String>,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.parse(key, |v| v.parse::<f64>().map_err(|e| e.to_string()))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.parse(key, |v| v.parse::<usize>().map_err(|e| e.to_string()))
    }

    fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.parse(key, |v| v.parse::<u64>().map_err(|e| e.to_string()))
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.parse(key, |v| match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err("expected `true` or `false`".into()),
        })
    }

    fn parse<T>(
        &self,
        key: &str,
        f: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, value)) => f(value).map(Some).map_err(|message| Error::TypeError {
                line: *line,
                key: key.into(),
                message,
            }),
        }
    }

    fn type_error(&self, key: &str, message: impl Into<String>) -> Error {
        let line = self.get(key).map(|(l, _)| *l).unwrap_or(0);
        Error::TypeError {
            line,
            key: key.into(),
            message: message.into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Raw> {
    let mut entries: HashMap<String, (usize, String)> = HashMap::new();
    let mut warnings = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::TypeError {
                line: line_no,
                key: line.into(),
                message: "expected `key = value`".into(),
            });
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey { line: line_no, key });
        }
        if value.is_empty() {
            return Err(Error::TypeError {
                line: line_no,
                key,
                message: "empty value".into(),
            });
        }
        if let Some((prev_line, _)) = entries.insert(key.clone(), (line_no, value)) {
            warnings.push(format!(
                "line {line_no}: duplicate key `{key}` overrides line {prev_line}"
            ));
        }
    }
    Ok(Raw { entries, warnings })
}

/// Parse configuration text into a validated [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw = tokenize(text)?;

    let nx = raw.usize("nx")?.unwrap_or(512);
    let ny = raw.usize("ny")?.unwrap_or(nx);
    let x = raw.f64("x")?.unwrap_or(1.0);
    let y = raw.f64("y")?.unwrap_or(x);
    let grid = GridSpec::new(x, y, nx, ny)?;

    let mut missing = Vec::new();
    let eps = match (raw.f64("eps")?, raw.f64("eps_over_h")?) {
        (Some(_), Some(_)) => {
            return Err(raw.type_error("eps_over_h", "mutually exclusive with `eps`"))
        }
        (Some(e), None) => Some(e),
        (None, Some(r)) => Some(r * grid.hx()),
        (None, None) => {
            missing.push("eps (or eps_over_h)");
            None
        }
    };
    let gamma = raw.f64("gamma")?;
    if gamma.is_none() {
        missing.push("gamma");
    }
    let tau = raw.f64("tau")?;
    if tau.is_none() {
        missing.push("tau");
    }
    if !missing.is_empty() {
        return Err(Error::MissingRequired(missing.join(", ")));
    }

    let omega = raw.f64("omega")?.unwrap_or(0.15);
    let m = raw.f64("m")?.unwrap_or(1000.0);
    let indicator = match raw.get("indicator").map(|(l, v)| (*l, v.as_str())) {
        None | Some((_, "quintic")) => Indicator::Quintic,
        Some((_, "linear")) => Indicator::Linear,
        Some((line, other)) => {
            return Err(Error::TypeError {
                line,
                key: "indicator".into(),
                message: format!("expected `quintic` or `linear`, got `{other}`"),
            })
        }
    };
    let model = ModelParams::new(eps.unwrap(), gamma.unwrap(), omega, m)
        .map_err(|e| raw.type_error("omega", e.to_string()))?
        .with_indicator(indicator);

    let solver = SolverParams {
        tau: tau.unwrap(),
        kappa_h: raw.f64("kappa")?.unwrap_or(2000.0),
        beta_h: raw.f64("beta")?.unwrap_or(2.0),
        tol: raw.f64("tol")?.unwrap_or(1e-3),
        max_steps: raw.usize("max_steps")?.unwrap_or(100_000),
        enforce_stability: raw.bool("enforce_stability")?.unwrap_or(true),
    };
    solver
        .validate()
        .map_err(|e| raw.type_error("tau", e.to_string()))?;

    let ic = match raw.get("ic").map(|(l, v)| (*l, v.as_str())) {
        None | Some((_, "disc")) => InitialCondition::Disc,
        Some((_, "tanh_disc")) => InitialCondition::TanhDisc,
        Some((_, "block_random")) => InitialCondition::BlockRandom,
        Some((line, "file")) => match raw.get("ic_file") {
            Some((_, path)) => InitialCondition::File(PathBuf::from(path)),
            None => {
                return Err(Error::TypeError {
                    line,
                    key: "ic".into(),
                    message: "ic = file requires `ic_file`".into(),
                })
            }
        },
        Some((line, other)) => {
            return Err(Error::TypeError {
                line,
                key: "ic".into(),
                message: format!(
                    "expected one of disc, tanh_disc, block_random, file; got `{other}`"
                ),
            })
        }
    };

    let ic_ratio = raw.usize("ic_ratio")?.unwrap_or(16);
    if ic == InitialCondition::BlockRandom && (ic_ratio == 0 || nx % ic_ratio != 0 || ny % ic_ratio != 0)
    {
        return Err(raw.type_error(
            "ic_ratio",
            format!("ratio {ic_ratio} must divide Nx = {nx} and Ny = {ny}"),
        ));
    }

    let snapshot_stride = match raw.usize("snapshot_stride")? {
        Some(0) => return Err(raw.type_error("snapshot_stride", "must be positive")),
        Some(s) => s,
        // default keeps long relaxations at <= 200 snapshots
        None => (solver.max_steps / 200).max(1),
    };

    Ok(RunConfig {
        grid,
        model,
        solver,
        ic,
        ic_ratio,
        seed: raw.u64("seed")?.unwrap_or(0),
        snapshot_stride,
        output_dir: raw
            .get("output_dir")
            .map(|(_, v)| PathBuf::from(v))
            .unwrap_or_else(|| PathBuf::from("out")),
        warnings: raw.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_trio_gives_reference_disc_setup() {
        let cfg = parse_config("eps_over_h = 20\ngamma = 100\ntau = 1e-3\n").unwrap();
        assert_eq!(cfg.grid.nx, 512);
        assert_eq!(cfg.grid.ny, 512);
        assert_eq!(cfg.grid.x, 1.0);
        assert!((cfg.model.eps - 20.0 / 256.0).abs() < 1e-15);
        assert_eq!(cfg.model.gamma, 100.0);
        assert_eq!(cfg.model.omega, 0.15);
        assert_eq!(cfg.model.penalty, 1000.0);
        assert_eq!(cfg.solver.tau, 1e-3);
        assert_eq!(cfg.solver.kappa_h, 2000.0);
        assert_eq!(cfg.solver.beta_h, 2.0);
        assert_eq!(cfg.solver.tol, 1e-3);
        assert_eq!(cfg.ic, InitialCondition::Disc);
        assert!(cfg.warnings.is_empty());
    }

    #[test]
    fn out_of_range_omega_is_a_type_error() {
        let err = parse_config("eps = 0.1\ngamma = 1\ntau = 1e-3\nomega = 1.5\n").unwrap_err();
        assert!(matches!(err, Error::TypeError { ref key, .. } if key == "omega"), "{err}");
    }

    #[test]
    fn duplicate_key_last_wins_with_warning() {
        let cfg =
            parse_config("eps = 0.1\ngamma = 1\ngamma = 7\ntau = 1e-3\n").unwrap();
        assert_eq!(cfg.model.gamma, 7.0);
        assert_eq!(cfg.warnings.len(), 1);
        assert!(cfg.warnings[0].contains("duplicate key `gamma`"));
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let err = parse_config("eps = 0.1\nbogus = 3\n").unwrap_err();
        match err {
            Error::UnknownKey { line, key } => {
                assert_eq!(line, 2);
                assert_eq!(key, "bogus");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn missing_required_keys_are_listed() {
        let err = parse_config("nx = 64\n").unwrap_err();
        match err {
            Error::MissingRequired(list) => {
                assert!(list.contains("eps"));
                assert!(list.contains("gamma"));
                assert!(list.contains("tau"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn eps_and_eps_over_h_are_mutually_exclusive() {
        let err = parse_config("eps = 0.1\neps_over_h = 20\ngamma = 1\ntau = 1e-3\n").unwrap_err();
        assert!(matches!(err, Error::TypeError { ref key, .. } if key == "eps_over_h"));
    }

    #[test]
    fn comments_blank_lines_and_spacing_are_tolerated() {
        let cfg = parse_config(
            "# coarsening run\n\n  eps_over_h = 10   # ten cells\ngamma = 2000\ntau = 5e-3\nic = block_random\n",
        )
        .unwrap();
        assert_eq!(cfg.model.gamma, 2000.0);
        assert_eq!(cfg.ic, InitialCondition::BlockRandom);
        assert_eq!(cfg.ic_ratio, 16);
    }

    #[test]
    fn block_random_ratio_must_divide_grid() {
        let err = parse_config(
            "nx = 64\neps_over_h = 10\ngamma = 1\ntau = 1e-3\nic = block_random\nic_ratio = 7\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::TypeError { ref key, .. } if key == "ic_ratio"));
    }

    #[test]
    fn ic_file_requires_path_and_roundtrips() {
        let err =
            parse_config("eps = 0.1\ngamma = 1\ntau = 1e-3\nic = file\n").unwrap_err();
        assert!(matches!(err, Error::TypeError { ref key, .. } if key == "ic"));

        let cfg = parse_config(
            "eps = 0.1\ngamma = 1\ntau = 1e-3\nic = file\nic_file = state.bin\n",
        )
        .unwrap();
        assert_eq!(cfg.ic, InitialCondition::File(PathBuf::from("state.bin")));
    }

    #[test]
    fn default_snapshot_stride_caps_snapshot_count() {
        let cfg = parse_config("eps = 0.1\ngamma = 1\ntau = 1e-3\nmax_steps = 40000\n").unwrap();
        assert_eq!(cfg.snapshot_stride, 200);
        let cfg = parse_config("eps = 0.1\ngamma = 1\ntau = 1e-3\nmax_steps = 50\n").unwrap();
        assert_eq!(cfg.snapshot_stride, 1);
    }
}
