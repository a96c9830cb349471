use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use greenflux::geometry::{Domain, DomainSpec, MarkerCurve};
use greenflux::growth::OperatorSpec;
use greenflux::perturbation::Perturbation;
use greenflux::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Domain as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConfig {
    Disk {},
    Conformal {
        coeffs: Vec<[f64; 2]>,
    },
    Curve {
        points: Vec<[f64; 2]>,
    },
    Circle {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        nodes: usize,
    },
    /// A domain stored in a separate file, relative to the config.
    File {
        path: PathBuf,
    },
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::Disk {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    #[serde(default = "default_radial")]
    pub n_radial: usize,
    #[serde(default = "default_angular")]
    pub n_angular: usize,
    #[serde(default = "default_boundary")]
    pub n_boundary: usize,
    /// Points per side of the evaluation grid.
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_radial() -> usize {
    32
}
fn default_angular() -> usize {
    64
}
fn default_boundary() -> usize {
    64
}
fn default_grid() -> usize {
    41
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            n_radial: default_radial(),
            n_angular: default_angular(),
            n_boundary: default_boundary(),
            grid: default_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Marker count when the domain is not already a curve.
    #[serde(default = "default_growth_nodes")]
    pub nodes: usize,
}

fn default_stride() -> usize {
    10
}
fn default_growth_nodes() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetConfig {
    /// `v = A u` for a known `u`.
    Roundtrip { u: Perturbation },
    /// `v(ζ) = −(1 + a cos arg ζ) / 8π`.
    Smooth { amplitude: f64 },
}

impl Default for TargetConfig {
    fn default() -> Self {
        TargetConfig::Roundtrip { u: Perturbation::re() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_oracle_n")]
    pub n_r: usize,
    #[serde(default = "default_oracle_n")]
    pub n_theta: usize,
    #[serde(default)]
    pub probes: Vec<[f64; 2]>,
}

fn default_oracle_n() -> usize {
    64
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_r: default_oracle_n(),
            n_theta: default_oracle_n(),
            probes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default = "default_operator")]
    pub operator: OperatorSpec,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub w: [f64; 2],
    /// Boundary point for sweeps; defaults to the boundary at parameter 0.
    #[serde(default)]
    pub zeta: Option<[f64; 2]>,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub growth: Option<GrowthConfig>,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub target: TargetConfig,
    /// Relative amplitude of seeded noise added to inverse targets.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub seed: u64,
}

fn default_operator() -> OperatorSpec {
    OperatorSpec::Laplace
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let DomainConfig::File { path: rel } = &cfg.domain {
            let full = path.parent().unwrap_or(Path::new(".")).join(rel);
            let text = std::fs::read_to_string(&full).map_err(|e| CliError::io(&full, e))?;
            cfg.domain = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("domain file {}: {e}", full.display())))?;
            if matches!(cfg.domain, DomainConfig::File { .. }) {
                return Err(CliError::Usage(format!("domain file {} refers to another file", full.display())));
            }
        }
        Ok(cfg)
    }

    pub fn source(&self) -> Complex64 {
        Complex64::new(self.w[0], self.w[1])
    }

    /// Applies `--resolution n`: `n` angular and boundary nodes, `n/2` radial.
    pub fn set_resolution(&mut self, n: usize) {
        self.resolution.n_angular = n;
        self.resolution.n_boundary = n;
        self.resolution.n_radial = (n / 2).max(8);
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        let field = |e: greenflux::Error| CliError::Usage(format!("domain: {e}"));
        match &self.domain {
            DomainConfig::Disk {} => Ok(Domain::UnitDisk),
            DomainConfig::Conformal { coeffs } => Domain::try_from(DomainSpec::Conformal { coeffs: coeffs.clone() }).map_err(field),
            DomainConfig::Curve { points } => Domain::try_from(DomainSpec::Curve { points: points.clone() }).map_err(field),
            DomainConfig::Circle { center, radius, nodes } => {
                if !(*radius > 0.0) {
                    return Err(CliError::Usage(format!("field `domain.radius`: {radius} must be positive")));
                }
                MarkerCurve::circle(Complex64::new(center[0], center[1]), *radius, *nodes)
                    .map(Domain::Curve)
                    .map_err(|e| CliError::Usage(format!("field `domain.nodes`: {e}")))
            }
            DomainConfig::File { .. } => Err(CliError::Usage("field `domain`: unresolved file reference".into())),
        }
    }

    /// The domain as a marker curve, sampling analytic boundaries.
    pub fn marker_curve(&self, nodes: usize) -> Result<MarkerCurve, CliError> {
        let domain = self.domain()?;
        let curve = match domain {
            Domain::Curve(c) => c,
            other => {
                let pts = (0..nodes)
                    .map(|k| other.boundary_frame(2.0 * PI * k as f64 / nodes as f64).0)
                    .collect();
                MarkerCurve::new(pts).map_err(|e| CliError::Usage(format!("field `domain`: {e}")))?
            }
        };
        Ok(curve)
    }

    pub fn perturbation(&self) -> Result<&Perturbation, CliError> {
        match &self.operator {
            OperatorSpec::Schrodinger { u, .. } | OperatorSpec::Beltrami { u, .. } => Ok(u),
            OperatorSpec::Laplace => Err(CliError::Usage(
                "field `operator`: this command needs a schrodinger or beltrami operator".into(),
            )),
        }
    }
}
