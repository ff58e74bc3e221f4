//! Scenario configuration: JSON file, flag overrides, validation and digest.

use qoptics::hilbert::{
    make_coherent, make_fock, make_squeezed_vacuum, make_thermal, make_twin_beam, suggest_cutoff, Cutoff, State,
    StateFamily,
};
use qoptics::tomography::Target;
use qoptics::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Published schema of the scenario file.
pub const SCHEMA: &str = include_str!("../schema/scenario.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Vacuum {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Fock {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Coherent {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Thermal {
        n_th: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Squeezed {
        r: f64,
        #[serde(default)]
        phi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    TwinBeam {
        r: f64,
        #[serde(default)]
        phi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
}

impl StateSpec {
    fn cutoff_mut(&mut self) -> &mut Option<usize> {
        match self {
            StateSpec::Vacuum { cutoff }
            | StateSpec::Fock { cutoff, .. }
            | StateSpec::Coherent { cutoff, .. }
            | StateSpec::Thermal { cutoff, .. }
            | StateSpec::Squeezed { cutoff, .. }
            | StateSpec::TwinBeam { cutoff, .. } => cutoff,
        }
    }

    fn family(&self) -> StateFamily {
        match *self {
            StateSpec::Vacuum { .. } => StateFamily::Fock { n: 0 },
            StateSpec::Fock { n, .. } => StateFamily::Fock { n },
            StateSpec::Coherent { alpha_re, alpha_im, .. } => {
                StateFamily::Coherent { mean: alpha_re * alpha_re + alpha_im * alpha_im }
            }
            StateSpec::Thermal { n_th, .. } => StateFamily::Thermal { mean: n_th },
            StateSpec::Squeezed { r, .. } => StateFamily::SqueezedVacuum { r },
            StateSpec::TwinBeam { r, .. } => StateFamily::TwinBeam { r },
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("state.{name} must be finite")))
            }
        };
        match *self {
            StateSpec::Coherent { alpha_re, alpha_im, .. } => {
                finite("alpha_re", alpha_re)?;
                finite("alpha_im", alpha_im)?;
            }
            StateSpec::Thermal { n_th, .. } => {
                if !(n_th >= 0.0 && n_th.is_finite()) {
                    return Err(Error::Config(format!("state.n_th must be >= 0, got {n_th}")));
                }
            }
            StateSpec::Squeezed { r, phi, .. } | StateSpec::TwinBeam { r, phi, .. } => {
                finite("r", r)?;
                finite("phi", phi)?;
            }
            _ => {}
        }
        let mut copy = self.clone();
        if let Some(d) = *copy.cutoff_mut() {
            if d < 2 {
                return Err(Error::Config(format!("state.cutoff must be at least 2, got {d}")));
            }
        }
        Ok(())
    }

    /// Builds the state, choosing the smallest admissible cutoff when none is given.
    pub fn build(&self) -> Result<State> {
        let mut copy = self.clone();
        let d = copy.cutoff_mut().unwrap_or_else(|| suggest_cutoff(self.family()).max(2));
        let cut = Cutoff::new(d)?;
        Ok(match *self {
            StateSpec::Vacuum { .. } => make_fock(0, cut)?.into(),
            StateSpec::Fock { n, .. } => make_fock(n, cut)?.into(),
            StateSpec::Coherent { alpha_re, alpha_im, .. } => make_coherent(C64::new(alpha_re, alpha_im), cut)?.into(),
            StateSpec::Thermal { n_th, .. } => make_thermal(n_th, cut)?.into(),
            StateSpec::Squeezed { r, phi, .. } => make_squeezed_vacuum(C64::from_polar(r, phi), cut)?.into(),
            StateSpec::TwinBeam { r, phi, .. } => make_twin_beam(C64::from_polar(r, phi), cut)?.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Half-width `L` in alpha units; derived from the mean photon number when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub ordering: f64,
    #[serde(default)]
    pub marginal_thetas: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { half_width: None, points: default_points(), ordering: 0.0, marginal_thetas: Vec::new() }
    }
}

fn default_points() -> usize {
    256
}

fn default_bins() -> usize {
    36
}

fn default_output_dir() -> String {
    "out".into()
}

/// One scenario. Field order is the canonical order used by the digest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// Command-line values that override the file, one per config key.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Scenario file (JSON, see `qoptics schema`)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scenario label
    #[arg(long)]
    pub scenario: Option<String>,
    /// State as JSON, e.g. '{"kind":"coherent","alpha_re":1.0}'
    #[arg(long)]
    pub state: Option<String>,
    /// Fock cutoff of the state
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Grid half-width L (alpha units)
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Grid points per axis (even, >= 16)
    #[arg(long)]
    pub points: Option<usize>,
    /// Ordering parameter p in [-1, 1]
    #[arg(long, allow_hyphen_values = true)]
    pub ordering: Option<f64>,
    /// Comma-separated phases for marginal output
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub marginal_thetas: Option<Vec<f64>>,
    /// Detection efficiency in (0, 1]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Number of homodyne records
    #[arg(long = "M", alias = "samples")]
    pub m: Option<usize>,
    /// Seed of every random stream
    #[arg(long)]
    pub seed: Option<u64>,
    /// Phase bins of the trace summary
    #[arg(long)]
    pub bins: Option<usize>,
    /// Local-oscillator amplitude for the finite-LO detector moments
    #[arg(long)]
    pub lo_amplitude: Option<f64>,
    /// Semicolon-separated tomography targets: a, a2, x:PHI, x2:PHI, n, n2, normal:N,M
    #[arg(long, value_delimiter = ';')]
    pub targets: Option<Vec<String>>,
    /// Comma-separated prefix lengths for the convergence scan
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,
    /// Homodyne dataset file for tomography
    #[arg(long)]
    pub dataset: Option<String>,
    /// Output directory
    #[arg(long)]
    pub output_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario file: {e}")))
    }

    /// File values, then flags on top.
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let mut c = match &o.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(v) = &o.scenario {
            c.scenario = v.clone();
        }
        if let Some(v) = &o.state {
            c.state = Some(serde_json::from_str(v).map_err(|e| Error::Config(format!("--state: {e}")))?);
        }
        if let Some(d) = o.cutoff {
            let s = c.state.as_mut().ok_or_else(|| Error::Config("--cutoff needs a state".into()))?;
            *s.cutoff_mut() = Some(d);
        }
        if o.half_width.is_some() || o.points.is_some() || o.ordering.is_some() || o.marginal_thetas.is_some() {
            let g = c.grid.get_or_insert_with(GridSpec::default);
            if let Some(v) = o.half_width {
                g.half_width = Some(v);
            }
            if let Some(v) = o.points {
                g.points = v;
            }
            if let Some(v) = o.ordering {
                g.ordering = v;
            }
            if let Some(v) = &o.marginal_thetas {
                g.marginal_thetas = v.clone();
            }
        }
        if o.eta.is_some() {
            c.eta = o.eta;
        }
        if o.m.is_some() {
            c.m = o.m;
        }
        if let Some(v) = o.seed {
            c.seed = v;
        }
        if let Some(v) = o.bins {
            c.bins = v;
        }
        if o.lo_amplitude.is_some() {
            c.lo_amplitude = o.lo_amplitude;
        }
        if let Some(v) = &o.targets {
            c.targets = v.iter().map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect();
        }
        if let Some(v) = &o.checkpoints {
            c.checkpoints = v.clone();
        }
        if o.dataset.is_some() {
            c.dataset = o.dataset.clone();
        }
        if let Some(v) = &o.output_dir {
            c.output_dir = v.clone();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let Some(s) = &self.state {
            s.validate()?;
        }
        if let Some(g) = &self.grid {
            if let Some(l) = g.half_width {
                if !(l > 0.0 && l.is_finite()) {
                    return bad(format!("grid.half_width must be positive, got {l}"));
                }
            }
            if g.points < 16 || !g.points.is_multiple_of(2) {
                return bad(format!("grid.points must be even and at least 16, got {}", g.points));
            }
            if !(-1.0..=1.0).contains(&g.ordering) {
                return bad(format!("grid.ordering must lie in [-1, 1], got {}", g.ordering));
            }
            if g.marginal_thetas.iter().any(|t| !t.is_finite()) {
                return bad("grid.marginal_thetas must be finite".into());
            }
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(format!("eta must lie in (0, 1], got {eta}"));
            }
        }
        if self.m == Some(0) {
            return bad("M must be at least 1".into());
        }
        if self.bins == 0 {
            return bad("bins must be at least 1".into());
        }
        if let Some(z) = self.lo_amplitude {
            if !(z > 0.0 && z.is_finite()) {
                return bad(format!("lo_amplitude must be positive, got {z}"));
            }
        }
        self.parsed_targets()?;
        if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) || self.checkpoints.first() == Some(&0) {
            return bad("checkpoints must be positive and strictly increasing".into());
        }
        Ok(())
    }

    pub fn parsed_targets(&self) -> Result<Vec<Target>> {
        self.targets
            .iter()
            .map(|t| t.parse::<Target>().map_err(|e| Error::Config(format!("target '{t}': {e}"))))
            .collect()
    }

    pub fn require_state(&self) -> Result<&StateSpec> {
        self.state
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs a state (config key 'state' or --state)".into()))
    }

    pub fn output_path(&self, name: &str) -> PathBuf {
        Path::new(&self.output_dir).join(name)
    }

    /// SHA-256 of the canonical JSON of this configuration. The output directory and the
    /// dataset path are locations rather than content and are left out.
    pub fn digest(&self) -> String {
        let mut view = self.clone();
        view.output_dir = String::new();
        view.dataset = None;
        let text = serde_json::to_string(&view).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
