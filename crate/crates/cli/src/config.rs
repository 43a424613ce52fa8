use anyhow::{bail, Context, Result};
use ghz_core::synthesis::profile_for;
use ghz_core::{
    build_curve, normalize_to_area, rabi_schedule, solve_endpoints, EndpointSolution, InitialPoint,
    ProfileKind, PulseSchedule, Signs, SolveOptions,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub endpoint: EndpointConfig,
    pub pulse: PulseConfig,
    pub propagation: PropagationConfig,
    pub full: FullConfig,
    pub units: UnitsConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub q1: i8,
    pub q2: i8,
    pub q3: i8,
    pub branch: usize,
    pub initial: InitialPoint,
    /// `theta_a(T), theta_b(T), phi_a(0), phi_b(0)`
    pub pin: Option<[f64; 4]>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            q1: 1,
            q2: -1,
            q3: 1,
            branch: 0,
            initial: InitialPoint::PlusPi,
            pin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig {
    pub profile: ProfileKind,
    pub tau: f64,
    pub duration: Option<f64>,
    pub target_area: Option<f64>,
    pub samples: usize,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            profile: ProfileKind::Constant,
            tau: 1.0 / 3.0,
            duration: None,
            target_area: None,
            samples: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationConfig {
    pub steps: usize,
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            steps: ghz_core::propagate::DEFAULT_STEPS,
            tol: 1e-8,
            max_doublings: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullConfig {
    pub factors: Vec<f64>,
    pub required_ratio: f64,
    pub stiffness: f64,
    pub force: bool,
}

impl Default for FullConfig {
    fn default() -> Self {
        Self {
            factors: vec![10.0, 30.0],
            required_ratio: ghz_core::fullmodel::DEFAULT_REQUIRED_RATIO,
            stiffness: ghz_core::fullmodel::DEFAULT_STIFFNESS,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitsConfig {
    pub physical: bool,
    pub omega_ref_mhz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub schedule: Option<PathBuf>,
    pub result: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a TOML config; relative output paths resolve against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.output.schedule,
            &mut cfg.output.result,
            &mut cfg.output.trace,
            &mut cfg.output.report,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.pulse;
        if !(0.0..0.5).contains(&p.tau) {
            bail!("tau = {} outside [0, 1/2)", p.tau);
        }
        if p.samples < 2 {
            bail!("samples = {} must be at least 2", p.samples);
        }
        if p.duration.is_some() && p.target_area.is_some() {
            bail!("give either duration or target_area, not both");
        }
        if let Some(d) = p.duration {
            if !(d > 0.0 && d.is_finite()) {
                bail!("duration = {d} must be positive");
            }
        }
        if let Some(a) = p.target_area {
            if !(a > 0.0 && a.is_finite()) {
                bail!("target_area = {a} must be positive");
            }
        }
        if self.propagation.steps == 0 {
            bail!("steps must be positive");
        }
        if self.full.factors.iter().any(|f| f.is_nan() || *f <= 0.0) {
            bail!("hierarchy factors must be positive");
        }
        self.omega_ref()?;
        Ok(())
    }

    pub fn signs(&self) -> Result<Signs> {
        Ok(Signs::new(
            self.endpoint.q1,
            self.endpoint.q2,
            self.endpoint.q3,
        )?)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            branch: self.endpoint.branch,
            initial: self.endpoint.initial,
            ..SolveOptions::default()
        }
    }

    /// `Some(omega_ref)` when physical units are requested.
    pub fn omega_ref(&self) -> Result<Option<f64>> {
        match (self.units.physical, self.units.omega_ref_mhz) {
            (false, _) => Ok(None),
            (true, Some(w)) if w > 0.0 && w.is_finite() => Ok(Some(w)),
            (true, Some(w)) => bail!("omega_ref_mhz = {w} must be positive"),
            (true, None) => bail!("physical units need omega_ref_mhz"),
        }
    }

    pub fn endpoint(&self) -> Result<EndpointSolution> {
        let signs = self.signs()?;
        let opts = self.solve_options();
        match self.endpoint.pin {
            None => Ok(solve_endpoints(signs, &opts)?),
            Some(pin) => pinned_endpoint(pin, signs, &opts),
        }
    }

    /// The schedule described by the `[endpoint]` and `[pulse]` sections, in
    /// normalized units.
    pub fn schedule(&self) -> Result<PulseSchedule> {
        let ep = self.endpoint()?;
        let duration = self.pulse.duration.unwrap_or(1.0);
        let tau = match self.pulse.profile {
            ProfileKind::Constant => 0.0,
            ProfileKind::Trapezoid => self.pulse.tau,
        };
        let profile = profile_for(&ep, self.pulse.profile, tau, duration)?;
        let schedule = rabi_schedule(&build_curve(&ep, &profile)?, self.pulse.samples)?;
        Ok(match self.pulse.target_area {
            Some(a) => normalize_to_area(&schedule, a)?,
            None => schedule,
        })
    }
}

/// Tabulated angles are accepted to five significant figures and snapped to
/// the exact root; anything else is checked as given.
pub fn pinned_endpoint(
    pin: [f64; 4],
    signs: Signs,
    opts: &SolveOptions,
) -> Result<EndpointSolution> {
    let mut branch = 0;
    while let Ok(ep) = solve_endpoints(signs, &SolveOptions { branch, ..*opts }) {
        let got = [
            ep.theta_alpha_t,
            ep.theta_beta_t,
            ep.phi_alpha_0,
            ep.phi_beta_0,
        ];
        if got
            .iter()
            .zip(pin.iter())
            .all(|(g, p)| (g - p).abs() <= ghz_core::checks::five_figure_tolerance(*p))
        {
            return Ok(ep);
        }
        branch += 1;
    }
    Ok(EndpointSolution::from_angles(
        pin[0],
        pin[1],
        pin[2],
        pin[3],
        signs,
        opts.initial,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_tau() {
        let mut c = RunConfig::default();
        c.pulse.tau = 0.6;
        assert!(c.validate().is_err());
    }

    #[test]
    fn rejects_duration_and_area() {
        let mut c = RunConfig::default();
        c.pulse.duration = Some(1.0);
        c.pulse.target_area = Some(2.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn parses_toml() {
        let c: RunConfig =
            toml::from_str("[pulse]\nprofile = \"trapezoid\"\ntau = 0.25\n[endpoint]\nq3 = -1\n")
                .unwrap();
        assert_eq!(c.pulse.profile, ProfileKind::Trapezoid);
        assert_eq!(c.endpoint.q3, -1);
        assert!(toml::from_str::<RunConfig>("[pulse]\nbogus = 1\n").is_err());
    }

    #[test]
    fn pinned_table_row_snaps() {
        let signs = Signs::new(1, -1, 1).unwrap();
        let ep = pinned_endpoint(
            [1.92423, 0.906373, 4.33454, 2.47062],
            signs,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((ep.theta_alpha_t - 1.92423).abs() < 5e-5);
        assert!(pinned_endpoint([1.0, 1.0, 1.0, 1.0], signs, &SolveOptions::default()).is_err());
    }
}
