//! Run configuration. Every section has defaults, so `{}` is a valid config.

use std::path::Path;

use kerrkit::causal::SurfaceSpec;
use kerrkit::geodesics::IntegrationConfig;
use kerrkit::thermal::TestFunction;
use kerrkit::{Chart, KerrParams};
use serde::{Deserialize, Serialize};

/// Bad input: unreadable, malformed or out of range. Maps to exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct SchemaError(pub String);

fn schema(msg: impl Into<String>) -> SchemaError {
    SchemaError(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: KerrParams,
    /// Halton offset for every quasi-random sample.
    pub seed: u64,
    pub charts: ChartsConfig,
    pub geodesic: GeodesicConfig,
    pub orbits: OrbitsConfig,
    pub cauchy: CauchyConfig,
    pub thermal: ThermalConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: KerrParams { mass: 1.0, spin: 0.1 },
            seed: 0,
            charts: ChartsConfig::default(),
            geodesic: GeodesicConfig::default(),
            orbits: OrbitsConfig::default(),
            cauchy: CauchyConfig::default(),
            thermal: ThermalConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChartsConfig {
    /// Sample points per chart pair.
    pub points: usize,
    /// Pairs mapped from exterior points.
    pub exterior_pairs: Vec<(Chart, Chart)>,
    /// Pairs mapped from points between the horizons.
    pub interior_pairs: Vec<(Chart, Chart)>,
    pub isometry_tol: f64,
    pub determinant_tol: f64,
}

impl Default for ChartsConfig {
    fn default() -> Self {
        use Chart::*;
        ChartsConfig {
            points: 1000,
            exterior_pairs: vec![
                (BlI, KerrStar),
                (BlI, StarKerr),
                (BlI, Kbl),
                (KerrStar, Kbl),
                (StarKerr, Kbl),
                (KerrStar, ConformalKerrStar),
                (StarKerr, ConformalStarKerr),
                (BlI, ConformalKerrStar),
            ],
            interior_pairs: vec![(BlII, KerrStar), (BlII, Kbl), (KerrStar, Kbl), (StarKerr, Kbl)],
            isometry_tol: 1e-6,
            determinant_tol: 1e-10,
        }
    }
}

/// One geodesic: integrals `E, L, Q` and a start in `BL_I` or `BL_II`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "L")]
    pub angular_momentum: f64,
    #[serde(rename = "Q")]
    pub carter: f64,
    pub chart: Chart,
    /// `[t, r, theta, phi]`.
    pub coords: [f64; 4],
    pub sign_r: f64,
    #[serde(default = "one")]
    pub sign_theta: f64,
    /// Expected type, as printed (e.g. `]∞→r+]`).
    #[serde(default)]
    pub expect: Option<String>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    pub rays: Vec<RaySpec>,
    /// Additional quasi-random rays started in `M_I`.
    pub random: usize,
    pub integration: IntegrationConfig,
    /// Write the samples of each path.
    pub dump_paths: bool,
    pub drift_tol: f64,
    pub radial_tol: f64,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            rays: vec![RaySpec {
                energy: 1.0,
                angular_momentum: 0.0,
                carter: 0.0,
                chart: Chart::BlI,
                coords: [0.0, 10.0, std::f64::consts::FRAC_PI_2, 0.0],
                sign_r: -1.0,
                sign_theta: 1.0,
                expect: None,
            }],
            random: 0,
            integration: IntegrationConfig::default(),
            dump_paths: false,
            drift_tol: 1e-8,
            radial_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitsConfig {
    /// Spins `a/M`; empty means the spin of `params`.
    pub spins: Vec<f64>,
    /// Orbit radii per spin.
    pub radii: usize,
    pub root_tol: f64,
}

impl Default for OrbitsConfig {
    fn default() -> Self {
        OrbitsConfig { spins: Vec::new(), radii: 41, root_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CauchyConfig {
    pub surfaces: Vec<SurfaceSpec>,
    /// Gradient evaluations per surface.
    pub points: usize,
    /// Sample paths shared by all surfaces.
    pub paths: usize,
    pub bound_slack: f64,
    pub min_once_fraction: f64,
    pub integration: IntegrationConfig,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        CauchyConfig {
            surfaces: vec![
                SurfaceSpec::SigmaT { level: 0.0 },
                SurfaceSpec::SigmaBar { level: -2.0, n: 4.0 },
                SurfaceSpec::SigmaTilde { level: -2.0, n: 3.0 },
                SurfaceSpec::Z { level: 12.0 },
                SurfaceSpec::SigmaM,
            ],
            points: 10_000,
            paths: 200,
            bound_slack: 1e-10,
            min_once_fraction: 0.95,
            integration: IntegrationConfig { r_max: 1e4, cross_future_horizon: true, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalConfig {
    pub functions: Vec<TestFunction>,
    /// Base grid size; the residual is also computed at twice and four times it.
    pub points: usize,
    pub refinements: usize,
    pub kappas: Vec<f64>,
    pub kernel_points: usize,
    /// Relative error allowed between the lattice kernel and its continuum form.
    pub kernel_tol: f64,
    pub tolerance: f64,
    pub partition_tol: f64,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        ThermalConfig {
            functions: vec![
                TestFunction::LOG_GAUSSIAN,
                TestFunction::Gaussian { center: 4.0, width: 1.0 },
                TestFunction::Bump { lo: 0.0, hi: 3.0 },
            ],
            points: 1 << 14,
            refinements: 2,
            kappas: vec![1.0, 0.25, 2.0],
            kernel_points: 2048,
            kernel_tol: 0.05,
            tolerance: 1e-4,
            partition_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Spins for the table of locus extents.
    pub spins: Vec<f64>,
    /// Bracket for the search of the first spin where timelikeness fails.
    pub bracket: (f64, f64),
    pub tol: f64,
    /// Orbit radii per spin.
    pub radii: usize,
    /// Bound on `max |r0 - 3M| / a` defining the small-spin regime.
    pub spread_bound: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            spins: vec![0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            bracket: (0.01, 0.99),
            tol: 1e-4,
            radii: 41,
            spread_bound: 1.25,
        }
    }
}

/// Command-line overrides applied after the file is read.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mass: Option<f64>,
    pub spin: Option<f64>,
    pub level: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub kappa: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, SchemaError> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
    }

    /// `--n` sets the main count of `command`; `--T` sets every surface level.
    pub fn apply(&mut self, command: &str, o: &Overrides) {
        if let Some(m) = o.mass {
            self.params.mass = m;
        }
        if let Some(a) = o.spin {
            self.params.spin = a;
            if command == "orbits" {
                self.orbits.spins = vec![a];
            }
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(k) = o.kappa {
            self.thermal.kappas = vec![k];
        }
        if let Some(t) = o.level {
            for s in &mut self.cauchy.surfaces {
                match s {
                    SurfaceSpec::SigmaT { level }
                    | SurfaceSpec::SigmaBar { level, .. }
                    | SurfaceSpec::SigmaTilde { level, .. }
                    | SurfaceSpec::Z { level } => *level = t,
                    SurfaceSpec::SigmaM => {}
                }
            }
        }
        if let Some(n) = o.n {
            match command {
                "charts" => self.charts.points = n,
                "geodesic" => self.geodesic.random = n,
                "orbits" => self.orbits.radii = n,
                "cauchy" => self.cauchy.points = n,
                "thermal" => self.thermal.points = n,
                "sweep" => self.sweep.radii = n,
                _ => {}
            }
        }
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        self.params.validate().map_err(|e| schema(format!("params: {e}")))?;
        let positive = [
            ("charts.isometry_tol", self.charts.isometry_tol),
            ("charts.determinant_tol", self.charts.determinant_tol),
            ("geodesic.drift_tol", self.geodesic.drift_tol),
            ("geodesic.radial_tol", self.geodesic.radial_tol),
            ("geodesic.integration.rtol", self.geodesic.integration.rtol),
            ("orbits.root_tol", self.orbits.root_tol),
            ("cauchy.bound_slack", self.cauchy.bound_slack),
            ("cauchy.min_once_fraction", self.cauchy.min_once_fraction),
            ("cauchy.integration.rtol", self.cauchy.integration.rtol),
            ("thermal.tolerance", self.thermal.tolerance),
            ("thermal.kernel_tol", self.thermal.kernel_tol),
            ("thermal.partition_tol", self.thermal.partition_tol),
            ("sweep.tol", self.sweep.tol),
            ("sweep.spread_bound", self.sweep.spread_bound),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(schema(format!("{name} must be positive, got {v}")));
            }
        }
        if self.cauchy.min_once_fraction > 1.0 {
            return Err(schema("cauchy.min_once_fraction must not exceed 1"));
        }
        for (i, r) in self.geodesic.rays.iter().enumerate() {
            if !matches!(r.chart, Chart::BlI | Chart::BlII) {
                return Err(schema(format!("geodesic.rays[{i}].chart must be BL_I or BL_II")));
            }
            if r.sign_r.abs() != 1.0 || r.sign_theta.abs() != 1.0 {
                return Err(schema(format!("geodesic.rays[{i}]: signs must be +1 or -1")));
            }
        }
        for a in self.orbits.spins.iter().chain(&self.sweep.spins) {
            if !(a.abs() < 1.0) || *a == 0.0 {
                return Err(schema(format!("spin {a} must satisfy 0 < |a| < 1")));
            }
        }
        let (lo, hi) = self.sweep.bracket;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(schema(format!("sweep.bracket must satisfy 0 < lo < hi < 1, got ({lo}, {hi})")));
        }
        if self.orbits.radii < 2 || self.sweep.radii < 2 {
            return Err(schema("orbit radii must be at least 2"));
        }
        for s in &self.cauchy.surfaces {
            s.validate().map_err(|e| schema(format!("cauchy.surfaces: {e}")))?;
        }
        for f in &self.thermal.functions {
            f.validate().map_err(|e| schema(format!("thermal.functions: {e}")))?;
        }
        let n = self.thermal.points;
        if n < 4 || !n.is_power_of_two() {
            return Err(schema(format!("thermal.points must be a power of two >= 4, got {n}")));
        }
        for k in &self.thermal.kappas {
            if !(*k > 0.0 && k.is_finite()) {
                return Err(schema(format!("kappa must be positive, got {k}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sede": 3}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"thermal": {"point": 3}}"#).is_err());
    }

    #[test]
    fn overrides_target_the_command() {
        let mut c = RunConfig::default();
        c.apply("orbits", &Overrides { spin: Some(0.2), n: Some(7), ..Default::default() });
        assert_eq!(c.orbits.spins, vec![0.2]);
        assert_eq!(c.orbits.radii, 7);
        assert_eq!(c.thermal.points, 1 << 14);
    }

    #[test]
    fn nonpositive_tolerance_is_a_schema_error() {
        let mut c = RunConfig::default();
        c.thermal.tolerance = 0.0;
        assert!(c.validate().is_err());
    }
}
