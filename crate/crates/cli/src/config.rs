//! Flat `key = value` run configuration.
//!
//! Drive energies (`omega_cw`, `delta`, `delta_ac`) are given in units of
//! `gamma_x`, which in `purcell` mode is the bare rate γ₀. Everything else
//! carries the unit listed in [`KEYS`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use sps_core::analytics::InterferometerParams;
use sps_core::fom::Numerics;
use sps_core::phonons::PhononParams;
use sps_core::quantum::Tolerances;
use sps_core::system::SystemParams;
use sps_core::units::GAMMA_0_UEV;

/// Every accepted key with its default (empty when required or unset) and meaning.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("mode", "", "sweep mode"),
    ("start", "", "first swept value"),
    ("stop", "", "last swept value"),
    ("points", "", "number of sweep points (>= 2)"),
    ("scale", "linear", "linear | log spacing"),
    ("gamma_x", "1.32", "exciton radiative rate, μeV"),
    ("gamma_b", "", "biexciton rate, μeV (default 2 gamma_x)"),
    ("binding_energy", "3240", "biexciton binding energy, μeV"),
    ("t_rep", "12.5", "repetition period, ns"),
    ("omega_cw", "0", "cw Rabi amplitude, units of gamma_x"),
    ("delta", "0", "laser detuning, units of gamma_x"),
    ("delta_ac", "", "target Stark shift, units of gamma_x"),
    ("detuning_ratio", "50", "δ/Δ_ac used with delta_ac outside stark-detuning"),
    ("phonons", "none", "none | phonon-set-1 | phonon-set-2 | phonon-set-3 | custom"),
    ("alpha", "", "custom coupling, ps²"),
    ("omega_b", "", "custom cutoff, meV"),
    ("temperature", "4", "bath temperature, K"),
    ("tau_p", "2", "pulse intensity FWHM, ps"),
    ("pulse_area", "3.141592653589793", "pulse area, rad"),
    ("reflectance", "0.5", "interferometer intensity reflectance"),
    ("fringe_defect", "0", "fringe-contrast defect ε"),
    ("arm_delay", "3", "interferometer arm delay, ns"),
    ("purcell_factor", "10", "F_P used for the cavity efficiency column"),
    ("kappa", "300", "cavity linewidth for purcell mode, μeV"),
    ("engine", "secular", "secular | full-pme"),
    ("propagator", "dopri5", "dopri5 | expm | rk4"),
    ("rtol", "1e-8", "integrator relative tolerance"),
    ("atol", "1e-10", "integrator absolute tolerance"),
    ("tail_floor", "1e-10", "relative |G| floor at the τ edge"),
    ("out", "", "CSV output path (stdout when unset)"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    fn new(field: &str, line: Option<usize>, reason: impl Into<String>) -> Self {
        Self { line, field: field.to_string(), reason: reason.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, `{}`: {}", self.field, self.reason),
            None => write!(f, "`{}`: {}", self.field, self.reason),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Untyped key-value pairs with the line each came from.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Option<usize>)>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::new(content, Some(line), "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !known(key) {
                return Err(ConfigError::new(key, Some(line), "unknown key"));
            }
            if cfg.entries.insert(key.to_string(), (value.to_string(), Some(line))).is_some() {
                return Err(ConfigError::new(key, Some(line), "duplicate key"));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(&path.display().to_string(), None, e.to_string()))?;
        Self::parse(&text)
    }

    /// Overrides a value, as command-line flags do.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !known(key) {
            return Err(ConfigError::new(key, None, "unknown key"));
        }
        self.entries.insert(key.to_string(), (value.into(), None));
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (k, v) = pair.split_once('=').ok_or_else(|| ConfigError::new(pair, None, "expected key=value"))?;
        self.set(k.trim(), v.trim())
    }

    fn raw(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l)).filter(|(v, _)| !v.is_empty())
    }

    fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v.to_string())
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| ConfigError::new(key, line, format!("`{v}` is not a finite number"))),
        }
    }

    fn float_or(&self, key: &str) -> Result<f64, ConfigError> {
        match self.float(key)? {
            Some(x) => Ok(x),
            None => Ok(default_of(key).parse().expect("numeric default")),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|(_, l)| *l)
    }
}

fn default_of(key: &str) -> &'static str {
    KEYS.iter().find(|(k, _, _)| *k == key).map(|(_, d, _)| *d).unwrap_or("")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + f * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Fully resolved sweep description.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: String,
    pub range: Option<Range>,
    /// Base parameters with zero drive; energies in μeV.
    pub system: SystemParams,
    /// Drive in units of `system.gamma_x`.
    pub omega_cw: f64,
    pub delta: f64,
    pub delta_ac: Option<f64>,
    pub detuning_ratio: f64,
    pub phonons: Option<PhononParams>,
    pub tau_p: f64,
    pub pulse_area: f64,
    pub ifo: InterferometerParams,
    pub purcell_factor: f64,
    pub kappa: f64,
    pub engine: String,
    pub numerics: Numerics,
    pub out: Option<PathBuf>,
}

fn phonons_from(cfg: &RawConfig) -> Result<Option<PhononParams>, ConfigError> {
    let name = cfg.text("phonons").unwrap_or_else(|| "none".into());
    let temperature = cfg.float_or("temperature")?;
    let line = cfg.line("phonons");
    let bath = if name == "custom" {
        let alpha = cfg.float("alpha")?.ok_or_else(|| ConfigError::new("alpha", line, "required for custom phonons"))?;
        let omega_b =
            cfg.float("omega_b")?.ok_or_else(|| ConfigError::new("omega_b", line, "required for custom phonons"))?;
        Some(PhononParams::custom(alpha, omega_b, temperature).map_err(|e| ConfigError::new("phonons", line, e.to_string()))?)
    } else {
        if cfg.raw("alpha").is_some() || cfg.raw("omega_b").is_some() {
            return Err(ConfigError::new("alpha", cfg.line("alpha").or(cfg.line("omega_b")), "only used with phonons = custom"));
        }
        PhononParams::from_name(&name)
            .map_err(|e| ConfigError::new("phonons", line, e.to_string()))?
            .map(|p| PhononParams { temperature, ..p })
    };
    if let Some(b) = &bath {
        b.validate().map_err(|e| ConfigError::new("temperature", cfg.line("temperature"), e.to_string()))?;
    }
    Ok(bath)
}

fn range_from(cfg: &RawConfig) -> Result<Option<Range>, ConfigError> {
    let (start, stop) = (cfg.float("start")?, cfg.float("stop")?);
    let points = match cfg.raw("points") {
        None => None,
        Some((v, line)) => {
            Some(v.parse::<usize>().map_err(|_| ConfigError::new("points", line, format!("`{v}` is not a count")))?)
        }
    };
    let (start, stop, points) = match (start, stop, points) {
        (None, None, None) => return Ok(None),
        (Some(a), Some(b), Some(n)) => (a, b, n),
        _ => return Err(ConfigError::new("start", cfg.line("start"), "start, stop and points must be given together")),
    };
    if points < 2 {
        return Err(ConfigError::new("points", cfg.line("points"), "at least 2 points are required"));
    }
    let scale = match cfg.text("scale").as_deref().unwrap_or("linear") {
        "linear" => Scale::Linear,
        "log" => Scale::Log,
        other => return Err(ConfigError::new("scale", cfg.line("scale"), format!("`{other}` is not linear or log"))),
    };
    if scale == Scale::Log && !(start > 0.0 && stop > 0.0) {
        return Err(ConfigError::new("scale", cfg.line("scale"), "log spacing needs positive start and stop"));
    }
    Ok(Some(Range { start, stop, points, scale }))
}

impl SweepSpec {
    pub fn from_raw(cfg: &RawConfig) -> Result<Self, ConfigError> {
        let mode = cfg.text("mode").ok_or_else(|| ConfigError::new("mode", None, "required"))?;
        let gamma_x = cfg.float("gamma_x")?.unwrap_or(GAMMA_0_UEV);
        let system = SystemParams {
            gamma_x,
            gamma_b: cfg.float("gamma_b")?.unwrap_or(2.0 * gamma_x),
            binding_energy: cfg.float_or("binding_energy")?,
            t_rep_ns: cfg.float_or("t_rep")?,
            ..SystemParams::default()
        };
        system.validate().map_err(|e| ConfigError::new("gamma_x", cfg.line("gamma_x"), e.to_string()))?;

        let mut ifo = InterferometerParams::new(cfg.float_or("reflectance")?, cfg.float_or("fringe_defect")?)
            .map_err(|e| ConfigError::new("reflectance", cfg.line("reflectance"), e.to_string()))?;
        ifo.t0 = cfg.float_or("arm_delay")?;
        ifo.t_rep = system.t_rep_ns;

        let tol = Tolerances { rtol: cfg.float_or("rtol")?, atol: cfg.float_or("atol")? };
        if !(tol.rtol > 0.0 && tol.atol > 0.0) {
            return Err(ConfigError::new("rtol", cfg.line("rtol"), "tolerances must be positive"));
        }
        let tail_floor = cfg.float_or("tail_floor")?;
        if !(tail_floor > 0.0 && tail_floor < 1.0) {
            return Err(ConfigError::new("tail_floor", cfg.line("tail_floor"), "must lie in (0, 1)"));
        }
        let numerics = Numerics {
            tol,
            propagator: cfg.text("propagator").unwrap_or_else(|| default_of("propagator").into()),
            tail_floor,
            ..Numerics::default()
        };
        numerics.propagator().map_err(|e| ConfigError::new("propagator", cfg.line("propagator"), e.to_string()))?;

        let positive = |key: &str, x: f64| {
            if x > 0.0 {
                Ok(x)
            } else {
                Err(ConfigError::new(key, cfg.line(key), "must be positive"))
            }
        };
        Ok(Self {
            mode,
            range: range_from(cfg)?,
            system,
            omega_cw: cfg.float_or("omega_cw")?,
            delta: cfg.float_or("delta")?,
            delta_ac: cfg.float("delta_ac")?,
            detuning_ratio: positive("detuning_ratio", cfg.float_or("detuning_ratio")?)?,
            phonons: phonons_from(cfg)?,
            tau_p: positive("tau_p", cfg.float_or("tau_p")?)?,
            pulse_area: cfg.float_or("pulse_area")?,
            ifo,
            purcell_factor: cfg.float_or("purcell_factor")?,
            kappa: positive("kappa", cfg.float_or("kappa")?)?,
            engine: cfg.text("engine").unwrap_or_else(|| default_of("engine").into()),
            numerics,
            out: cfg.text("out").map(PathBuf::from),
        })
    }

    /// Every value the run consumed, defaults included, for the CSV header.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut m: Vec<(String, String)> = vec![
            ("mode".into(), self.mode.clone()),
            ("start".into(), opt(self.range.map(|r| r.start))),
            ("stop".into(), opt(self.range.map(|r| r.stop))),
            ("points".into(), self.range.map(|r| r.points.to_string()).unwrap_or_default()),
            (
                "scale".into(),
                match self.range.map(|r| r.scale) {
                    Some(Scale::Log) => "log".into(),
                    Some(Scale::Linear) => "linear".into(),
                    None => String::new(),
                },
            ),
            ("gamma_x".into(), self.system.gamma_x.to_string()),
            ("gamma_b".into(), self.system.gamma_b.to_string()),
            ("binding_energy".into(), self.system.binding_energy.to_string()),
            ("t_rep".into(), self.system.t_rep_ns.to_string()),
            ("omega_cw".into(), self.omega_cw.to_string()),
            ("delta".into(), self.delta.to_string()),
            ("delta_ac".into(), opt(self.delta_ac)),
            ("detuning_ratio".into(), self.detuning_ratio.to_string()),
            ("phonons".into(), self.phonons.map(|p| p.label().to_string()).unwrap_or_else(|| "none".into())),
            ("alpha".into(), opt(self.phonons.map(|p| p.alpha))),
            ("omega_b".into(), opt(self.phonons.map(|p| p.omega_b))),
            ("temperature".into(), opt(self.phonons.map(|p| p.temperature))),
            ("tau_p".into(), self.tau_p.to_string()),
            ("pulse_area".into(), self.pulse_area.to_string()),
            ("reflectance".into(), self.ifo.r.to_string()),
            ("fringe_defect".into(), self.ifo.epsilon.to_string()),
            ("arm_delay".into(), self.ifo.t0.to_string()),
            ("purcell_factor".into(), self.purcell_factor.to_string()),
            ("kappa".into(), self.kappa.to_string()),
            ("engine".into(), self.engine.clone()),
        ];
        m.extend(self.numerics.describe().into_iter().map(|(k, v)| (k.to_string(), v)));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_defaults() {
        let cfg = RawConfig::parse("# sweep\nmode = at-drive\nstart = 2 # inline\nstop=200\npoints = 5\nscale = log\n").unwrap();
        let spec = SweepSpec::from_raw(&cfg).unwrap();
        assert_eq!(spec.mode, "at-drive");
        let v = spec.range.unwrap().values();
        assert_eq!(v.len(), 5);
        assert!((v[0] - 2.0).abs() < 1e-12 && (v[4] - 200.0).abs() < 1e-9);
        assert!((v[2] - 20.0).abs() < 1e-9);
        assert_eq!(spec.system.gamma_b, 2.0 * spec.system.gamma_x);
        assert!(spec.phonons.is_none());
        assert_eq!(spec.engine, "secular");
    }

    #[test]
    fn errors_carry_line_and_field() {
        let e = RawConfig::parse("mode = at-drive\nbogus = 1\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (Some(2), "bogus"));
        let cfg = RawConfig::parse("mode = at-drive\nrtol = fast\n").unwrap();
        let e = SweepSpec::from_raw(&cfg).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (Some(2), "rtol"));
        let e = RawConfig::parse("mode = a\nmode = b\n").unwrap_err();
        assert_eq!(e.reason, "duplicate key");
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg = RawConfig::parse("mode = at-drive\nengine = secular\n").unwrap();
        cfg.set("engine", "full-pme").unwrap();
        assert_eq!(SweepSpec::from_raw(&cfg).unwrap().engine, "full-pme");
        assert!(cfg.set("nope", "1").is_err());
    }

    #[test]
    fn range_rules() {
        let cfg = RawConfig::parse("mode = m\nstart = 1\nstop = 2\npoints = 1\n").unwrap();
        assert_eq!(SweepSpec::from_raw(&cfg).unwrap_err().field, "points");
        let cfg = RawConfig::parse("mode = m\nstart = 0\nstop = 2\npoints = 3\nscale = log\n").unwrap();
        assert_eq!(SweepSpec::from_raw(&cfg).unwrap_err().field, "scale");
        let cfg = RawConfig::parse("mode = m\nstart = 0\n").unwrap();
        assert!(SweepSpec::from_raw(&cfg).is_err());
    }

    #[test]
    fn phonon_presets_and_custom() {
        let cfg = RawConfig::parse("mode = m\nphonons = phonon-set-2\ntemperature = 10\n").unwrap();
        let b = SweepSpec::from_raw(&cfg).unwrap().phonons.unwrap();
        assert_eq!((b.alpha, b.omega_b, b.temperature), (0.006, 5.5, 10.0));
        let cfg = RawConfig::parse("mode = m\nphonons = custom\nalpha = 0.01\nomega_b = 2\n").unwrap();
        assert_eq!(SweepSpec::from_raw(&cfg).unwrap().phonons.unwrap().omega_b, 2.0);
        let cfg = RawConfig::parse("mode = m\nphonons = custom\nalpha = 0.01\n").unwrap();
        assert_eq!(SweepSpec::from_raw(&cfg).unwrap_err().field, "omega_b");
        let cfg = RawConfig::parse("mode = m\nalpha = 0.01\n").unwrap();
        assert!(SweepSpec::from_raw(&cfg).is_err());
    }

    #[test]
    fn metadata_lists_every_key_but_output() {
        let spec = SweepSpec::from_raw(&RawConfig::parse("mode = at-drive").unwrap()).unwrap();
        let keys: Vec<String> = spec.metadata().into_iter().map(|(k, _)| k).collect();
        for (k, _, _) in KEYS {
            if !matches!(*k, "out" | "propagator" | "rtol" | "atol" | "tail_floor") {
                assert!(keys.iter().any(|m| m == k), "{k} missing");
            }
        }
        assert!(keys.iter().any(|m| m == "propagator"));
    }
}
