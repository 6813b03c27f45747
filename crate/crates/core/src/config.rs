//! Plain `section.key = value` experiment configs.
//!
//! Every key is checked against the schema of the selected experiment before
//! anything is computed; unknown keys are an error. Lists are written either
//! explicitly (`0.5, 1, 2`) or as `lin(a, b, count)` / `geom(a, b, count)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::cross_section::{ConformalProfile, CrossSection, CrossSectionKind, ProfileFamily};
use crate::error::{Error, Result};

/// The experiments the runner knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Spectrum,
    ResolventSlice,
    SpectralMeasure,
    DispersiveFit,
    Strichartz,
    IndexSets,
    FlowSweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Spectrum,
        ExperimentKind::ResolventSlice,
        ExperimentKind::SpectralMeasure,
        ExperimentKind::DispersiveFit,
        ExperimentKind::Strichartz,
        ExperimentKind::IndexSets,
        ExperimentKind::FlowSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::ResolventSlice => "resolvent-slice",
            ExperimentKind::SpectralMeasure => "spectral-measure",
            ExperimentKind::DispersiveFit => "dispersive-fit",
            ExperimentKind::Strichartz => "strichartz",
            ExperimentKind::IndexSets => "index-sets",
            ExperimentKind::FlowSweep => "flow-sweep",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind '{s}'")))
    }

    /// Experiment keys accepted for this kind, with their defaults
    /// (`None` when required).
    fn keys(self) -> Schema {
        match self {
            ExperimentKind::Spectrum => &[],
            ExperimentKind::ResolventSlice => &[
                ("lambdas", Some("0.8, 1.5, 2.2")),
                ("x", Some("0.6")),
                ("x_primes", Some("1.8, 2.6, 3.4")),
                ("gamma", Some("0.5")),
                ("sign", Some("out")),
            ],
            ExperimentKind::SpectralMeasure => &[
                ("lambdas", Some("geom(4, 64, 8)")),
                ("radii", Some("lin(0.05, 0.3, 6)")),
                ("gammas", Some("default")),
                ("truncation_tol", Some("1e-6")),
            ],
            ExperimentKind::DispersiveFit => &[
                ("times", Some("geom(0.02, 1, 10)")),
                ("eps", Some("2e-3")),
                ("radii", Some("lin(0.02, 0.25, 12)")),
                ("link_points", Some("8")),
            ],
            ExperimentKind::Strichartz => &[
                ("q", Some("2")),
                ("r", Some("6")),
                ("bump", Some("gaussian")),
                ("widths", Some("0.3, 0.4, 0.5")),
                ("eps", Some("1e-3")),
                ("refinement", Some("1")),
            ],
            ExperimentKind::IndexSets => &[("cutoff", Some("6"))],
            ExperimentKind::FlowSweep => &[
                ("s", Some("lin(0.1, 3.0, 12)")),
                ("s_prime", Some("0.4, 1.2, 2.0")),
                ("theta0", Some("0.7")),
                ("phi0", Some("0.3")),
            ],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Keys of one section with their defaults (`None` when required).
type Schema = &'static [(&'static str, Option<&'static str>)];

const CONE_KEYS: Schema = &[
    ("n", Some("3")),
    ("cross_section", Some("sphere")),
    ("sphere_dim", Some("auto")),
    ("circle_length", Some("auto")),
    ("profile", Some("constant")),
    ("profile_rate", Some("0")),
    ("profile_amplitude", Some("0")),
    ("x_match", Some("1")),
    ("modes", Some("40")),
];

const OUTPUT_KEYS: Schema = &[
    ("directory", Some("out")),
    ("formats", Some("csv")),
    ("seed", Some("0")),
    ("jitter", Some("0")),
];

/// A validated config with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Every key, including defaults, in sorted order.
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Parses and validates config text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", number + 1)))?;
            let key = key.trim().to_string();
            if raw.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", number + 1)));
            }
        }
        let kind = ExperimentKind::parse(
            raw.get("experiment.kind")
                .ok_or_else(|| Error::Config("missing experiment.kind".into()))?,
        )?;
        let mut values = BTreeMap::new();
        values.insert("experiment.kind".to_string(), kind.name().to_string());
        let sections: [(&str, Schema); 3] =
            [("cone", CONE_KEYS), ("experiment", kind.keys()), ("output", OUTPUT_KEYS)];
        for (section, keys) in sections {
            for &(key, default) in keys {
                let full = format!("{section}.{key}");
                let value = match (raw.get(&full), default) {
                    (Some(v), _) => v.clone(),
                    (None, Some(d)) => d.to_string(),
                    (None, None) => return Err(Error::Config(format!("missing required key {full}"))),
                };
                values.insert(full, value);
            }
        }
        if let Some(unknown) = raw.keys().find(|k| !values.contains_key(*k)) {
            return Err(Error::Config(format!("unknown key '{unknown}' for experiment {kind}")));
        }
        let cfg = Self { kind, values };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses every value once so that type errors surface before any
    /// computation.
    fn check(&self) -> Result<()> {
        self.cone()?;
        self.formats()?;
        self.get_u64("output.seed")?;
        self.get_f64("output.jitter")?;
        for (key, value) in &self.values {
            let Some(name) = key.strip_prefix("experiment.") else {
                continue;
            };
            match name {
                "kind" | "sign" | "bump" => {}
                "gammas" if value == "default" => {}
                "lambdas" | "x_primes" | "radii" | "gammas" | "times" | "widths" | "s" | "s_prime" => {
                    self.get_list(key)?;
                }
                "link_points" | "refinement" => {
                    self.get_usize(key)?;
                }
                _ => {
                    self.get_f64(key)?;
                }
            }
        }
        if let Some(sign) = self.values.get("experiment.sign") {
            if sign != "out" && sign != "in" {
                return Err(Error::Config(format!("experiment.sign must be 'out' or 'in', got '{sign}'")));
            }
        }
        if let Some(bump) = self.values.get("experiment.bump") {
            if bump != "gaussian" && bump != "compact" {
                return Err(Error::Config(format!(
                    "experiment.bump must be 'gaussian' or 'compact', got '{bump}'"
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("key {key} not available for experiment {}", self.kind)))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Config(format!("{key}: '{v}' is not a finite number")))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.parse().map_err(|_| Error::Config(format!("{key}: '{v}' is not a non-negative integer")))
    }

    pub fn get_u64(&self, key: &str) -> Result<u64> {
        let v = self.get(key)?;
        v.parse().map_err(|_| Error::Config(format!("{key}: '{v}' is not a non-negative integer")))
    }

    pub fn get_list(&self, key: &str) -> Result<Vec<f64>> {
        parse_list(self.get(key)?).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    /// A list after multiplicative jitter `1 + jitter·U(−1, 1)`, drawn from
    /// a generator seeded by `output.seed` and the key name.
    pub fn get_jittered(&self, key: &str) -> Result<Vec<f64>> {
        let list = self.get_list(key)?;
        let jitter = self.get_f64("output.jitter")?;
        if jitter == 0.0 {
            return Ok(list);
        }
        let salt = key.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(self.get_u64("output.seed")? ^ salt);
        Ok(list
            .into_iter()
            .map(|v| v * (1.0 + jitter * rng.gen_range(-1.0..1.0)))
            .collect())
    }

    pub fn formats(&self) -> Result<Vec<String>> {
        let formats: Vec<String> = self.get("output.formats")?.split(',').map(|s| s.trim().to_string()).collect();
        if let Some(bad) = formats.iter().find(|f| *f != "csv" && *f != "svg") {
            return Err(Error::Config(format!("output.formats: unknown format '{bad}'")));
        }
        Ok(formats)
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(&self.values["output.directory"])
    }

    pub fn modes(&self) -> Result<usize> {
        self.get_usize("cone.modes")
    }

    /// The cone block.
    pub fn cone(&self) -> Result<Cone> {
        let n = self.get_usize("cone.n")?;
        let modes = self.modes()?;
        let kind = match self.get("cone.cross_section")? {
            "sphere" => CrossSectionKind::RoundSphere {
                dim: match self.get("cone.sphere_dim")? {
                    "auto" => n.saturating_sub(1),
                    _ => self.get_usize("cone.sphere_dim")?,
                },
            },
            "circle" => CrossSectionKind::Circle {
                length: match self.get("cone.circle_length")? {
                    "auto" => 2.0 * std::f64::consts::PI,
                    _ => self.get_f64("cone.circle_length")?,
                },
            },
            other => return Err(Error::Config(format!("cone.cross_section: unknown '{other}'"))),
        };
        let x_match = self.get_f64("cone.x_match")?;
        let family = match self.get("cone.profile")? {
            "constant" => ProfileFamily::Constant,
            "exponential" => ProfileFamily::Exponential {
                rate: self.get_f64("cone.profile_rate")?,
            },
            "smoothstep" => ProfileFamily::Smoothstep {
                amplitude: self.get_f64("cone.profile_amplitude")?,
            },
            other => return Err(Error::Config(format!("cone.profile: unknown '{other}'"))),
        };
        let cs = CrossSection::new(kind, modes).map_err(to_config)?;
        let profile = ConformalProfile::new(family, x_match).map_err(to_config)?;
        Cone::new(n, cs, profile).map_err(to_config)
    }

    /// `# key = value` lines for every resolved key.
    pub fn header(&self) -> String {
        let mut out = format!("# conic-spectral {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.values {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// `a, b, c`, `lin(a, b, count)` or `geom(a, b, count)`.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let s = s.trim();
    let number = |t: &str| -> std::result::Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{}' is not a finite number", t.trim()))
    };
    for (name, geometric) in [("lin(", false), ("geom(", true)] {
        if let Some(body) = s.strip_prefix(name) {
            let body = body.strip_suffix(')').ok_or("missing ')'")?;
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 3 {
                return Err(format!("{name}a, b, count) takes three arguments"));
            }
            let (a, b) = (number(parts[0])?, number(parts[1])?);
            let count: usize = parts[2].trim().parse().map_err(|_| "count must be an integer".to_string())?;
            if count < 2 {
                return Err("count must be at least 2".into());
            }
            if geometric && !(a > 0.0 && b > 0.0) {
                return Err("geom endpoints must be positive".into());
            }
            return Ok((0..count)
                .map(|k| {
                    let f = k as f64 / (count - 1) as f64;
                    if geometric {
                        a * (b / a).powf(f)
                    } else {
                        a + (b - a) * f
                    }
                })
                .collect());
        }
    }
    let list: Vec<f64> = s.split(',').map(number).collect::<std::result::Result<_, _>>()?;
    if list.is_empty() {
        return Err("empty list".into());
    }
    Ok(list)
}
