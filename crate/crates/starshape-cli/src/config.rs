//! Run configuration: defaults, flat key=value config files, and flag
//! overrides. Flags beat the file, the file beats the defaults.

use std::collections::BTreeSet;
use std::path::PathBuf;

use starshape::pipeline::{EtaRule, StudyShape};
use starshape::{Error, KernelFn, Result};

/// Which smoothing kernel to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    /// exp(−s).
    VonMises,
    /// 1(s < 1).
    Uniform,
}

impl KernelChoice {
    pub fn to_kernel(self) -> KernelFn {
        match self {
            KernelChoice::VonMises => starshape::kernel_von_mises(),
            KernelChoice::Uniform => starshape::kernel_uniform(),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vonmises" | "von-mises" => Ok(KernelChoice::VonMises),
            "uniform" => Ok(KernelChoice::Uniform),
            other => Err(Error::Parameter(format!(
                "unknown kernel '{other}' (expected vonmises or uniform)"
            ))),
        }
    }
}

/// How the bandwidth is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaChoice {
    /// Leave-one-out likelihood cross-validation on the default grid.
    Cv,
    /// Cross-validation on an explicit geometric grid.
    CvGrid { lo: f64, hi: f64, count: usize },
    /// The power schedule η_n = n^{−1/(p+3)}.
    SchedulePower,
    /// A fixed value.
    Fixed(f64),
}

impl EtaChoice {
    pub fn to_rule(self) -> EtaRule {
        match self {
            EtaChoice::Cv => EtaRule::CrossValidated,
            EtaChoice::CvGrid { lo, hi, count } => {
                EtaRule::CrossValidatedOn(geometric_grid(lo, hi, count))
            }
            EtaChoice::SchedulePower => EtaRule::PowerSchedule,
            EtaChoice::Fixed(v) => EtaRule::Fixed(v),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("cv") {
            return Ok(EtaChoice::Cv);
        }
        if let Some(grid) = t.strip_prefix("cv:") {
            let parts: Vec<&str> = grid.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parameter(format!(
                    "invalid eta '{t}' (cv grid form is cv:<lo>,<hi>,<count>)"
                )));
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| {
                Error::Parameter(format!("invalid cv grid lower bound '{}'", parts[0]))
            })?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| {
                Error::Parameter(format!("invalid cv grid upper bound '{}'", parts[1]))
            })?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("invalid cv grid count '{}'", parts[2])))?;
            if !(lo > 0.0 && hi >= lo && count >= 1) {
                return Err(Error::Parameter(format!(
                    "cv grid needs 0 < lo <= hi and count >= 1, got {t}"
                )));
            }
            return Ok(EtaChoice::CvGrid { lo, hi, count });
        }
        if t.eq_ignore_ascii_case("schedule:power") {
            return Ok(EtaChoice::SchedulePower);
        }
        match t.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(EtaChoice::Fixed(v)),
            _ => Err(Error::Parameter(format!(
                "invalid eta '{t}' (expected a positive number, 'cv', 'cv:<lo>,<hi>,<count>', \
                 or 'schedule:power')"
            ))),
        }
    }
}

fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 || hi == lo {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

/// Output artifact formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArtifactFormat {
    Csv,
    Json,
    Svg,
}

impl ArtifactFormat {
    fn parse_set(s: &str) -> Result<BTreeSet<ArtifactFormat>> {
        let mut set = BTreeSet::new();
        for part in s.split(',') {
            match part.trim().to_ascii_lowercase().as_str() {
                "csv" => {
                    set.insert(ArtifactFormat::Csv);
                }
                "json" => {
                    set.insert(ArtifactFormat::Json);
                }
                "svg" => {
                    set.insert(ArtifactFormat::Svg);
                }
                "" => {}
                other => {
                    return Err(Error::Parameter(format!(
                        "unknown format '{other}' (expected csv, json, svg)"
                    )))
                }
            }
        }
        if set.is_empty() {
            return Err(Error::Parameter("format list is empty".to_string()));
        }
        Ok(set)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub shape: StudyShape,
    pub sample_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub kernel: KernelChoice,
    pub eta: EtaChoice,
    pub resolution: usize,
    pub fill_resolution: usize,
    pub out_dir: PathBuf,
    pub formats: BTreeSet<ArtifactFormat>,
}

impl RunConfig {
    /// Defaults for the reproduction commands: the study's four sample
    /// sizes, one seed, von Mises kernel, cross-validated bandwidths.
    pub fn reproduce_defaults(shape: StudyShape) -> Self {
        RunConfig {
            shape,
            sample_sizes: vec![100, 1_000, 10_000, 100_000],
            seeds: vec![1],
            kernel: KernelChoice::VonMises,
            eta: EtaChoice::Cv,
            resolution: 720,
            fill_resolution: 8,
            out_dir: PathBuf::from("out"),
            formats: [ArtifactFormat::Csv, ArtifactFormat::Svg].into(),
        }
    }

    /// Defaults for the convergence command: three sample sizes, twenty
    /// seeds.
    pub fn convergence_defaults(shape: StudyShape) -> Self {
        RunConfig {
            shape,
            sample_sizes: vec![100, 1_000, 10_000],
            seeds: (0..20).collect(),
            kernel: KernelChoice::VonMises,
            eta: EtaChoice::Cv,
            resolution: 720,
            fill_resolution: 8,
            out_dir: PathBuf::from("out"),
            formats: [ArtifactFormat::Csv].into(),
        }
    }

    /// Defaults for the estimate command (sample sizes/seeds unused).
    pub fn estimate_defaults() -> Self {
        RunConfig {
            shape: StudyShape::Triangle,
            sample_sizes: vec![],
            seeds: vec![],
            kernel: KernelChoice::VonMises,
            eta: EtaChoice::Cv,
            resolution: 720,
            fill_resolution: 8,
            out_dir: PathBuf::from("out"),
            formats: [ArtifactFormat::Csv, ArtifactFormat::Json].into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 8 {
            return Err(Error::Parameter(format!(
                "resolution must be >= 8, got {}",
                self.resolution
            )));
        }
        if self.fill_resolution < 2 {
            return Err(Error::Parameter(format!(
                "fill_resolution must be >= 2, got {}",
                self.fill_resolution
            )));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::Parameter(
                "sample sizes must be positive".to_string(),
            ));
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "sample sizes must be strictly increasing".to_string(),
            ));
        }
        Ok(())
    }
}

/// Raw, unresolved overrides from a config file or command-line flags.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub shape: Option<String>,
    pub n: Option<String>,
    pub seeds: Option<String>,
    pub kernel: Option<String>,
    pub eta: Option<String>,
    pub resolution: Option<usize>,
    pub fill_resolution: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl ConfigOverlay {
    fn merge_over(self, base: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            shape: self.shape.or(base.shape),
            n: self.n.or(base.n),
            seeds: self.seeds.or(base.seeds),
            kernel: self.kernel.or(base.kernel),
            eta: self.eta.or(base.eta),
            resolution: self.resolution.or(base.resolution),
            fill_resolution: self.fill_resolution.or(base.fill_resolution),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }
}

/// Parses a flat key=value config file. Blank lines and `#` comments are
/// skipped; unknown keys are rejected.
pub fn parse_config_file(text: &str, label: &str) -> Result<ConfigOverlay> {
    let mut overlay = ConfigOverlay::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            location: format!("{label}:{}", lineno + 1),
            message: "expected key=value".to_string(),
        })?;
        let value = value.trim().to_string();
        match key.trim() {
            "shape" => overlay.shape = Some(value),
            "n" => overlay.n = Some(value),
            "seeds" => overlay.seeds = Some(value),
            "kernel" => overlay.kernel = Some(value),
            "eta" => overlay.eta = Some(value),
            "resolution" => {
                overlay.resolution = Some(value.parse().map_err(|e| Error::Parse {
                    location: format!("{label}:{}", lineno + 1),
                    message: format!("invalid resolution: {e}"),
                })?)
            }
            "fill_resolution" => {
                overlay.fill_resolution = Some(value.parse().map_err(|e| Error::Parse {
                    location: format!("{label}:{}", lineno + 1),
                    message: format!("invalid fill_resolution: {e}"),
                })?)
            }
            "out" => overlay.out = Some(PathBuf::from(value)),
            "format" => overlay.format = Some(value),
            other => {
                return Err(Error::Parse {
                    location: format!("{label}:{}", lineno + 1),
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }
    Ok(overlay)
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parameter(format!("invalid sample size '{}': {e}", p.trim())))
        })
        .collect()
}

fn parse_seed_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parameter(format!("invalid seed '{}': {e}", p.trim())))
        })
        .collect()
}

fn parse_shape(s: &str) -> Result<StudyShape> {
    match s.trim().to_ascii_lowercase().as_str() {
        "triangle" => Ok(StudyShape::Triangle),
        "lhalf" | "l half" | "l_half" | "l-half" => Ok(StudyShape::LHalf),
        other => Err(Error::Parameter(format!(
            "unknown shape '{other}' (expected triangle or lhalf)"
        ))),
    }
}

/// Resolves the final configuration: `defaults`, overridden by the config
/// file (if any), overridden by the flags.
pub fn resolve_config(
    defaults: RunConfig,
    file: Option<ConfigOverlay>,
    flags: ConfigOverlay,
) -> Result<RunConfig> {
    let overlay = flags.merge_over(file.unwrap_or_default());
    let mut cfg = defaults;
    if let Some(s) = overlay.shape {
        cfg.shape = parse_shape(&s)?;
    }
    if let Some(s) = overlay.n {
        cfg.sample_sizes = parse_usize_list(&s)?;
    }
    if let Some(s) = overlay.seeds {
        cfg.seeds = parse_seed_list(&s)?;
        if cfg.seeds.is_empty() {
            return Err(Error::Parameter("seed list is empty".to_string()));
        }
    }
    if let Some(s) = overlay.kernel {
        cfg.kernel = KernelChoice::parse(&s)?;
    }
    if let Some(s) = overlay.eta {
        cfg.eta = EtaChoice::parse(&s)?;
    }
    if let Some(r) = overlay.resolution {
        cfg.resolution = r;
    }
    if let Some(r) = overlay.fill_resolution {
        cfg.fill_resolution = r;
    }
    if let Some(o) = overlay.out {
        cfg.out_dir = o;
    }
    if let Some(f) = overlay.format {
        cfg.formats = ArtifactFormat::parse_set(&f)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags_precedence() {
        let file = parse_config_file("n=100,200\nkernel=uniform\nresolution=90\n", "cfg").unwrap();
        let flags = ConfigOverlay {
            kernel: Some("vonmises".to_string()),
            ..Default::default()
        };
        let cfg = resolve_config(
            RunConfig::convergence_defaults(StudyShape::Triangle),
            Some(file),
            flags,
        )
        .unwrap();
        assert_eq!(cfg.sample_sizes, vec![100, 200]); // from file
        assert_eq!(cfg.kernel, KernelChoice::VonMises); // flag wins
        assert_eq!(cfg.resolution, 90); // from file
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(parse_config_file("bogus=1\n", "cfg").is_err());
        assert!(parse_config_file("resolution=abc\n", "cfg").is_err());
        assert!(parse_config_file("no equals sign\n", "cfg").is_err());
        let ok = parse_config_file("# comment\n\neta=cv\n", "cfg").unwrap();
        assert_eq!(ok.eta.as_deref(), Some("cv"));
    }

    #[test]
    fn eta_parsing() {
        assert_eq!(EtaChoice::parse("cv").unwrap(), EtaChoice::Cv);
        assert_eq!(
            EtaChoice::parse("schedule:power").unwrap(),
            EtaChoice::SchedulePower
        );
        assert_eq!(EtaChoice::parse("0.25").unwrap(), EtaChoice::Fixed(0.25));
        assert!(EtaChoice::parse("-1").is_err());
        assert!(EtaChoice::parse("schedule:exp").is_err());
    }

    #[test]
    fn validation_rules() {
        let mut cfg = RunConfig::convergence_defaults(StudyShape::Triangle);
        cfg.sample_sizes = vec![100, 100];
        assert!(cfg.validate().is_err());
        cfg.sample_sizes = vec![1000, 100];
        assert!(cfg.validate().is_err());
        cfg.sample_sizes = vec![100, 1000];
        cfg.resolution = 4;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn format_sets() {
        let set = ArtifactFormat::parse_set("csv, svg").unwrap();
        assert!(set.contains(&ArtifactFormat::Csv));
        assert!(set.contains(&ArtifactFormat::Svg));
        assert!(!set.contains(&ArtifactFormat::Json));
        assert!(ArtifactFormat::parse_set("png").is_err());
    }
}
