//! Run configuration, read from a TOML file with flat dotted sections.
//!
//! ```toml
//! seed = 7
//!
//! [family]
//! kind = "cap"
//! k = 2
//! n = 3
//! theta = 0.7853981633974483
//!
//! [measure]
//! grid_size = 100
//! ```

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::ball::MobiusMap;
use crate::error::{Error, Result};
use crate::families::{
    catenoid, flat_disk, geodesic_cap, mobius_image, spherical_cap, union, Submanifold,
};
use crate::verify::{MobiusConfig, MobiusTarget, TheoremId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Cap {
        k: usize,
        n: usize,
        theta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axis: Option<Vec<f64>>,
    },
    Disk {
        k: usize,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normal: Option<Vec<f64>>,
    },
    MobiusImage {
        translation: Vec<f64>,
        base: Box<FamilySpec>,
    },
    Union {
        parts: Vec<FamilySpec>,
    },
    Catenoid {
        neck: f64,
    },
    /// A round sphere piece that need not meet the unit sphere orthogonally.
    /// Not minimal in general; kept for negative controls.
    SphereCap {
        k: usize,
        n: usize,
        center_dist: f64,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axis: Option<Vec<f64>>,
    },
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Disk {
            k: 2,
            n: 3,
            normal: None,
        }
    }
}

fn last_axis(n: usize, axis: &Option<Vec<f64>>) -> DVector<f64> {
    match axis {
        Some(v) => DVector::from_vec(v.clone()),
        None => DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 }),
    }
}

fn finite(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite")))
    }
}

impl FamilySpec {
    /// Check numeric fields against the constructors' preconditions without building anything.
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::Cap { k, n, theta, axis } => {
                finite("theta", &[*theta])?;
                if !(*theta > 0.0 && *theta <= FRAC_PI_2) {
                    return Err(Error::Config(format!("cap angle {theta} outside (0, π/2]")));
                }
                if *k < 1 || k >= n {
                    return Err(Error::Config(format!(
                        "cap needs 1 ≤ k < n, got k = {k}, n = {n}"
                    )));
                }
                check_vector("axis", axis.as_deref(), *n)
            }
            FamilySpec::Disk { k, n, normal } => {
                if *k < 1 || k > n {
                    return Err(Error::Config(format!(
                        "disk needs 1 ≤ k ≤ n, got k = {k}, n = {n}"
                    )));
                }
                check_vector("normal", normal.as_deref(), *n)
            }
            FamilySpec::MobiusImage { translation, base } => {
                base.validate()?;
                finite("translation", translation)?;
                if translation.len() != base.ambient_dim() {
                    return Err(Error::Config("translation length differs from n".into()));
                }
                if translation.iter().map(|x| x * x).sum::<f64>() >= 1.0 {
                    return Err(Error::Config(
                        "translation must lie inside the unit ball".into(),
                    ));
                }
                Ok(())
            }
            FamilySpec::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::Config("union needs at least one part".into()));
                }
                for p in parts {
                    p.validate()?;
                }
                let (k, n) = (parts[0].dim(), parts[0].ambient_dim());
                if parts.iter().any(|p| p.dim() != k || p.ambient_dim() != n) {
                    return Err(Error::Config("union parts must share k and n".into()));
                }
                Ok(())
            }
            FamilySpec::Catenoid { neck } => {
                finite("neck", &[*neck])?;
                if *neck > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "catenoid neck {neck} must be positive"
                    )))
                }
            }
            FamilySpec::SphereCap {
                k,
                n,
                center_dist,
                radius,
                axis,
            } => {
                finite("sphere cap parameters", &[*center_dist, *radius])?;
                if *k < 1 || k >= n {
                    return Err(Error::Config(format!(
                        "sphere cap needs 1 ≤ k < n, got k = {k}, n = {n}"
                    )));
                }
                check_vector("axis", axis.as_deref(), *n)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FamilySpec::Cap { k, .. }
            | FamilySpec::Disk { k, .. }
            | FamilySpec::SphereCap { k, .. } => *k,
            FamilySpec::MobiusImage { base, .. } => base.dim(),
            FamilySpec::Union { parts } => parts.first().map_or(0, |p| p.dim()),
            FamilySpec::Catenoid { .. } => 2,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            FamilySpec::Cap { n, .. }
            | FamilySpec::Disk { n, .. }
            | FamilySpec::SphereCap { n, .. } => *n,
            FamilySpec::MobiusImage { base, .. } => base.ambient_dim(),
            FamilySpec::Union { parts } => parts.first().map_or(0, |p| p.ambient_dim()),
            FamilySpec::Catenoid { .. } => 3,
        }
    }

    pub fn build(&self) -> Result<Submanifold> {
        self.validate()?;
        match self {
            FamilySpec::Cap { k, n, theta, axis } => {
                geodesic_cap(*k, *n, *theta, last_axis(*n, axis))
            }
            FamilySpec::Disk { k, n, normal } => {
                flat_disk(*k, *n, normal.clone().map(DVector::from_vec))
            }
            FamilySpec::MobiusImage { translation, base } => {
                let g = MobiusMap::translate(DVector::from_vec(translation.clone()))?;
                mobius_image(&base.build()?, &g)
            }
            FamilySpec::Union { parts } => {
                let built = parts
                    .iter()
                    .map(|p| p.build())
                    .collect::<Result<Vec<_>>>()?;
                union(&built)
            }
            FamilySpec::Catenoid { neck } => catenoid(*neck, 3),
            FamilySpec::SphereCap {
                k,
                n,
                center_dist,
                radius,
                axis,
            } => spherical_cap(*k, *n, *center_dist, *radius, last_axis(*n, axis)),
        }
    }
}

fn check_vector(name: &str, v: Option<&[f64]>, n: usize) -> Result<()> {
    let Some(v) = v else { return Ok(()) };
    finite(name, v)?;
    if v.len() != n {
        return Err(Error::Config(format!(
            "{name} has length {} but n = {n}",
            v.len()
        )));
    }
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::Config(format!("{name} must be nonzero")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSettings {
    /// `1` integrates the chart domains directly; below `1` the volume is
    /// extrapolated from truncated volumes.
    pub truncation: f64,
    /// Radii in the monotonicity curve.
    pub grid_size: usize,
    /// Sample points for the Laplacian checks.
    pub laplacian_samples: usize,
    /// Samples per parameter in the exported submanifold document.
    pub document_grid: usize,
}

impl Default for MeasureSettings {
    fn default() -> Self {
        MeasureSettings {
            truncation: 1.0,
            grid_size: 100,
            laplacian_samples: 100,
            document_grid: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub k: usize,
    pub n: usize,
    /// Explicit angles; when empty, `count` equally spaced angles `iπ/(2 count)`, `i = 1..=count`.
    pub thetas: Vec<f64>,
    pub count: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            k: 2,
            n: 3,
            thetas: Vec::new(),
            count: 50,
        }
    }
}

impl SweepSettings {
    pub fn grid(&self) -> Vec<f64> {
        if !self.thetas.is_empty() {
            return self.thetas.clone();
        }
        (1..=self.count)
            .map(|i| FRAC_PI_2 * i as f64 / self.count as f64)
            .collect()
    }
}

/// Deliberate corruption of the monotonicity curve, for checking that the
/// verdict machinery reports failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvePerturbation {
    pub index: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub family: FamilySpec,
    pub measure: MeasureSettings,
    pub sweep: SweepSettings,
    pub optimizer: MobiusConfig,
    pub mobius_target: MobiusTarget,
    /// Verdicts to run; empty means all applicable ones.
    pub verdicts: Vec<TheoremId>,
    pub out_dir: PathBuf,
    /// Also write the optimizer history as CSV.
    pub history_csv: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb_curve: Option<CurvePerturbation>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            family: FamilySpec::default(),
            measure: MeasureSettings::default(),
            sweep: SweepSettings::default(),
            optimizer: MobiusConfig::default(),
            mobius_target: MobiusTarget::IdealBoundary,
            verdicts: Vec::new(),
            out_dir: PathBuf::from("hypiso-out"),
            history_csv: false,
            perturb_curve: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn wants(&self, id: TheoremId) -> bool {
        self.verdicts.is_empty() || self.verdicts.contains(&id)
    }

    /// Validate every numeric field before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        let t = self.measure.truncation;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Config(format!(
                "truncation radius {t} outside (0, 1]"
            )));
        }
        if self.measure.grid_size < 2 {
            return Err(Error::Config(
                "monotonicity grid needs at least two radii".into(),
            ));
        }
        if self.measure.laplacian_samples == 0 {
            return Err(Error::Config(
                "Laplacian check needs at least one sample".into(),
            ));
        }
        if self.sweep.k < 1 || self.sweep.k >= self.sweep.n {
            return Err(Error::Config("sweep needs 1 ≤ k < n".into()));
        }
        let grid = self.sweep.grid();
        if grid.is_empty() {
            return Err(Error::Config("empty angle grid".into()));
        }
        if let Some(bad) = grid.iter().find(|t| !(**t > 0.0 && **t <= FRAC_PI_2)) {
            return Err(Error::Config(format!("sweep angle {bad} outside (0, π/2]")));
        }
        if let Some(p) = &self.perturb_curve {
            if p.index >= self.measure.grid_size || !p.delta.is_finite() {
                return Err(Error::Config("curve perturbation outside the grid".into()));
            }
        }
        self.optimizer.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_family_parses() {
        let text = r#"
seed = 3
verdicts = ["LinearIsop", "MobiusDensity"]

[family]
kind = "mobius-image"
translation = [0.2, 0.0, 0.1]

[family.base]
kind = "union"

[[family.base.parts]]
kind = "disk"
k = 2
n = 3

[[family.base.parts]]
kind = "disk"
k = 2
n = 3
normal = [1.0, 0.0, 0.0]

[optimizer]
restarts = 4
"#;
        let c = RunConfig::from_toml(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.optimizer.restarts, 4);
        assert_eq!(c.optimizer.max_evaluations, 200);
        assert!(c.wants(TheoremId::LinearIsop) && !c.wants(TheoremId::Monotonicity));
        assert_eq!(c.family.dim(), 2);
        let echoed = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&echoed).unwrap(), c);
    }

    #[test]
    fn rejects_bad_numbers_before_building() {
        for text in [
            "[family]\nkind = \"cap\"\nk = 2\nn = 3\ntheta = 2.0",
            "[family]\nkind = \"catenoid\"\nneck = -1.0",
            "[measure]\ntruncation = 1.5",
            "[sweep]\nthetas = [0.0]",
            "[family]\nkind = \"cap\"\nk = 2\nn = 3\ntheta = 0.5\ncolour = 1",
        ] {
            let parsed = RunConfig::from_toml(text).and_then(|c| c.validate());
            assert!(matches!(parsed, Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn default_sweep_grid_ends_at_right_angle() {
        let g = SweepSettings::default().grid();
        assert_eq!(g.len(), 50);
        assert_eq!(*g.last().unwrap(), FRAC_PI_2);
    }
}
