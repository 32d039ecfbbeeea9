use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::{Model, SimParams};
use crate::state::{chi_up, GaussianSpec};

/// Environment variable that overrides the output directory of a config file.
pub const OUT_DIR_ENV: &str = "KICKED_DIRAC_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    DensityEvolution,
    PacketCenter,
    BandOccupation,
    SplitOverlay,
    LzSweep,
    SpreadComparison,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::DensityEvolution,
        ScenarioKind::PacketCenter,
        ScenarioKind::BandOccupation,
        ScenarioKind::SplitOverlay,
        ScenarioKind::LzSweep,
        ScenarioKind::SpreadComparison,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::DensityEvolution => "density_evolution",
            ScenarioKind::PacketCenter => "packet_center",
            ScenarioKind::BandOccupation => "band_occupation",
            ScenarioKind::SplitOverlay => "split_overlay",
            ScenarioKind::LzSweep => "lz_sweep",
            ScenarioKind::SpreadComparison => "spread_comparison",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::DensityEvolution => "momentum and coordinate density heatmaps of a kicked spinor packet",
            ScenarioKind::PacketCenter => "packet-center trajectory against the analytic Bloch orbit",
            ScenarioKind::BandOccupation => "band occupations P+/P- over one Bloch period",
            ScenarioKind::SplitOverlay => "packet splitting with the predicted post-crossing branches",
            ScenarioKind::LzSweep => "numeric versus analytic single-passage tunneling over a (K, M) grid",
            ScenarioKind::SpreadComparison => "<p^2> of the spinor, spinless relativistic and qkr models",
            ScenarioKind::Custom => "a single trajectory of any model with the given parameters",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown scenario '{s}' (try --list-scenarios)")))
    }
}

/// How the spin part of a tunneling-measurement packet is prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// The same spinor `chi` on every momentum mode.
    UniformChi,
    /// Lower-band eigenvector on every momentum mode.
    BandProjected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(alias = "K_values")]
    pub k_values: Vec<f64>,
    #[serde(alias = "M_values")]
    pub m_values: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            k_values: (0..7).map(|i| 1.0 + 0.5 * i as f64).collect(),
            m_values: vec![0.05, 0.1, 0.2],
        }
    }
}

/// Fully resolved description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub params: SimParams,
    pub gaussian: GaussianSpec,
    pub n_kicks: usize,
    pub record_every: usize,
    pub record_density: bool,
    pub sweep: Option<SweepSpec>,
    pub init_mode: InitMode,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// Defaults for each scenario, matching the reference parameter set
    /// (p0 = −50, Δp = 4, χ = (1,1)/√2, K = 2, α = 0.01, T = 1, N = 4096).
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let mut cfg = Self {
            scenario,
            params: SimParams::new(Model::DiracSpinor),
            gaussian: GaussianSpec::default(),
            n_kicks: 250,
            record_every: 1,
            record_density: false,
            sweep: None,
            init_mode: InitMode::UniformChi,
            output_dir: PathBuf::from("out").join(scenario.name()),
        };
        match scenario {
            ScenarioKind::DensityEvolution => cfg.record_density = true,
            ScenarioKind::PacketCenter | ScenarioKind::Custom => {}
            ScenarioKind::BandOccupation => {
                cfg.params.mass = 0.1;
                cfg.n_kicks = 100;
            }
            ScenarioKind::SplitOverlay => {
                cfg.params.mass = 0.1;
                cfg.record_density = true;
            }
            ScenarioKind::LzSweep => {
                cfg.sweep = Some(SweepSpec::default());
                cfg.init_mode = InitMode::BandProjected;
            }
            ScenarioKind::SpreadComparison => {
                cfg.params.mass = 0.01;
                cfg.gaussian.p0 = 0.0;
                cfg.gaussian.chi = chi_up();
                cfg.n_kicks = 2000;
            }
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let grid = Grid::new(self.params.n_modes)?;
        if self.scenario != ScenarioKind::LzSweep {
            self.gaussian.validate(&grid)?;
        }
        if self.n_kicks == 0 {
            return Err(Error::config("n_kicks must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every must be at least 1"));
        }
        match (&self.sweep, self.scenario) {
            (Some(sweep), ScenarioKind::LzSweep) => {
                if sweep.k_values.is_empty() || sweep.m_values.is_empty() {
                    return Err(Error::config("sweep needs at least one K and one M value"));
                }
                let bad = sweep
                    .k_values
                    .iter()
                    .chain(&sweep.m_values)
                    .find(|v| !v.is_finite() || **v < 0.0);
                if let Some(v) = bad {
                    return Err(Error::config(format!("sweep values must be finite and non-negative, got {v}")));
                }
            }
            (None, ScenarioKind::LzSweep) => return Err(Error::config("lz_sweep needs a [sweep] table")),
            (Some(_), other) => {
                return Err(Error::config(format!("a [sweep] table is only valid for lz_sweep, not {other}")));
            }
            (None, _) => {}
        }
        let spinor_only = matches!(
            self.scenario,
            ScenarioKind::DensityEvolution
                | ScenarioKind::PacketCenter
                | ScenarioKind::BandOccupation
                | ScenarioKind::SplitOverlay
                | ScenarioKind::LzSweep
        );
        if spinor_only && self.params.model != Model::DiracSpinor {
            return Err(Error::config(format!(
                "scenario {} runs the dirac_spinor model, got {}",
                self.scenario,
                self.params.model.name()
            )));
        }
        Ok(())
    }

    /// Loads a TOML config (fields default per scenario) or, for `.json`
    /// files, the `config` object of a previous run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
            let config = manifest
                .get("config")
                .ok_or_else(|| Error::config(format!("{}: manifest has no 'config' entry", path.display())))?;
            return serde_json::from_value(config.clone())
                .map_err(|e| Error::config(format!("{}: {e}", path.display())));
        }
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::config(e.message().to_string()))?;
        let scenario = match file.scenario.as_deref() {
            Some(name) => name.parse()?,
            None => ScenarioKind::Custom,
        };
        Ok(file.apply(Self::defaults(scenario)))
    }

    /// Replaces the output directory with `$KICKED_DIRAC_OUT_DIR` when set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
    }

    /// Command-line values; these win over both the file and the environment.
    pub fn apply_overrides(&mut self, overrides: &Overrides) -> Result<()> {
        if let Some(scenario) = overrides.scenario {
            self.scenario = scenario;
            if scenario == ScenarioKind::LzSweep {
                self.sweep.get_or_insert_with(SweepSpec::default);
            } else {
                self.sweep = None;
            }
        }
        if let Some(dir) = &overrides.out_dir {
            self.output_dir = dir.clone();
        }
        if let Some(kicks) = overrides.kicks {
            self.n_kicks = kicks;
        }
        if let Some(grid) = overrides.grid {
            self.params.n_modes = grid;
        }
        if overrides.record_density {
            self.record_density = true;
        }
        Ok(())
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<ScenarioKind>,
    pub out_dir: Option<PathBuf>,
    pub kicks: Option<usize>,
    pub grid: Option<usize>,
    pub record_density: bool,
}

/// On-disk TOML layout; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: Option<String>,
    n_kicks: Option<usize>,
    record_every: Option<usize>,
    record_density: Option<bool>,
    init_mode: Option<InitMode>,
    output_dir: Option<PathBuf>,
    params: Option<ParamsFile>,
    gaussian: Option<GaussianFile>,
    sweep: Option<SweepSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    alpha: Option<f64>,
    #[serde(alias = "M")]
    mass: Option<f64>,
    #[serde(alias = "K")]
    kick: Option<f64>,
    #[serde(alias = "T")]
    period: Option<f64>,
    n_modes: Option<usize>,
    model: Option<Model>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianFile {
    p0: Option<f64>,
    delta_p: Option<f64>,
    /// Either two reals or two `[re, im]` pairs.
    chi: Option<ChiFile>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ChiFile {
    Real([f64; 2]),
    Complex([[f64; 2]; 2]),
}

impl ConfigFile {
    fn apply(self, mut cfg: ScenarioConfig) -> ScenarioConfig {
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        set!(cfg.n_kicks, self.n_kicks);
        set!(cfg.record_every, self.record_every);
        set!(cfg.record_density, self.record_density);
        set!(cfg.init_mode, self.init_mode);
        set!(cfg.output_dir, self.output_dir);
        if let Some(p) = self.params {
            set!(cfg.params.alpha, p.alpha);
            set!(cfg.params.mass, p.mass);
            set!(cfg.params.kick, p.kick);
            set!(cfg.params.period, p.period);
            set!(cfg.params.n_modes, p.n_modes);
            set!(cfg.params.model, p.model);
        }
        if let Some(g) = self.gaussian {
            set!(cfg.gaussian.p0, g.p0);
            set!(cfg.gaussian.delta_p, g.delta_p);
            if let Some(chi) = g.chi {
                use num_complex::Complex64;
                cfg.gaussian.chi = match chi {
                    ChiFile::Real([a, b]) => [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
                    ChiFile::Complex([a, b]) => [Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1])],
                };
            }
        }
        if self.sweep.is_some() {
            cfg.sweep = self.sweep;
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.name().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("fig7".parse::<ScenarioKind>().is_err());
    }

    #[test]
    fn all_defaults_validate() {
        for k in ScenarioKind::ALL {
            ScenarioConfig::defaults(k).validate().unwrap();
        }
    }

    #[test]
    fn toml_overlays_scenario_defaults() {
        let cfg = ScenarioConfig::from_toml(
            r#"
            scenario = "band_occupation"
            n_kicks = 120
            [params]
            M = 0.05
            [gaussian]
            chi = [[0.6, 0.0], [0.0, 0.8]]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::BandOccupation);
        assert_eq!(cfg.n_kicks, 120);
        assert_eq!(cfg.params.mass, 0.05);
        assert_eq!(cfg.params.kick, 2.0);
        assert_eq!(cfg.gaussian.p0, -50.0);
        assert_eq!(cfg.gaussian.chi[1].im, 0.8);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ScenarioConfig::from_toml("scenario = \"nope\"").is_err());
        assert!(ScenarioConfig::from_toml("bogus = 1").is_err());
        let cases = [
            "scenario = \"custom\"\n[sweep]\nk_values = [1.0]\nm_values = [0.1]",
            "scenario = \"lz_sweep\"\n[sweep]\nk_values = []\nm_values = [0.1]",
            "n_kicks = 0",
            "[params]\nmodel = \"qkr\"\nmass = 0.0",
            "[params]\nn_modes = 1000",
            "[gaussian]\np0 = 3000.0",
            "scenario = \"band_occupation\"\n[params]\nmodel = \"qkr\"\nmass = 1.0",
        ];
        for text in cases {
            let cfg = ScenarioConfig::from_toml(text).unwrap();
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::PacketCenter);
        cfg.apply_overrides(&Overrides {
            scenario: None,
            out_dir: Some("elsewhere".into()),
            kicks: Some(7),
            grid: Some(512),
            record_density: true,
        })
        .unwrap();
        assert_eq!(cfg.n_kicks, 7);
        assert_eq!(cfg.params.n_modes, 512);
        assert!(cfg.record_density);
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn json_round_trip() {
        let cfg = ScenarioConfig::defaults(ScenarioKind::LzSweep);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
