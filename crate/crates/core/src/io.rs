//! External file formats: the hypersurface definition schema, flow CSV time
//! series, restart snapshots, verification reports and run manifests.
//! Unknown keys are rejected everywhere.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::DiagnosticsRecord;
use crate::geometry::profile::{AxisymProfile, Grid3Profile, HarmonicMode};
use crate::geometry::GraphHypersurface;
use crate::verify::InequalityReport;

/// Hypersurface definition file.
///
/// ```json
/// { "n": 5, "kind": "exact_sphere", "radius": 1.0 }
/// { "n": 5, "kind": "axisym", "resolution": 128,
///   "profile": { "base_radius": 1.0,
///                "legendre_modes": [ { "degree": 2, "amplitude": 0.05 } ] } }
/// { "n": 5, "kind": "axisym", "resolution": 96,
///   "profile": { "offset_sphere": { "radius": 1.0, "offset": 0.3 } } }
/// { "n": 3, "kind": "grid3", "resolution": 48, "azimuth": 96,
///   "profile": { "base_radius": 1.0,
///                "harmonic_modes": [ { "degree": 2, "order": 1,
///                                      "amplitude": 0.01, "phase": 0.0 } ] } }
/// { "n": 4, "kind": "axisym", "resolution": 16, "samples": [ ... ] }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub n: usize,
    pub kind: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Azimuthal resolution (lat-long grids only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub azimuth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    /// Explicit radial samples at the grid nodes (row-major for lat-long).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    ExactSphere,
    Axisym,
    Grid3,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legendre_modes: Vec<LegendreModeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub harmonic_modes: Vec<HarmonicModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_sphere: Option<OffsetSphereSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegendreModeSpec {
    pub degree: u32,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicModeSpec {
    pub degree: u32,
    pub order: u32,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetSphereSpec {
    pub radius: f64,
    pub offset: f64,
}

impl SurfaceSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec: SurfaceSpec = serde_json::from_str(&text)?;
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut file, self)?;
        file.write_all(b"\n")?;
        Ok(())
    }

    /// Builds the surface, honoring resolution overrides.
    pub fn build(&self, resolution_override: Option<usize>) -> Result<GraphHypersurface<f64>> {
        let res = resolution_override.or(self.resolution);
        match self.kind {
            SurfaceKind::ExactSphere => {
                let radius = self.radius.ok_or_else(|| {
                    Error::InvalidInput("exact_sphere needs a radius".into())
                })?;
                GraphHypersurface::exact_sphere(self.n, radius)
            }
            SurfaceKind::Axisym => {
                let res = res.ok_or_else(|| {
                    Error::InvalidInput("axisym surface needs a resolution".into())
                })?;
                if let Some(samples) = &self.samples {
                    if samples.len() != res {
                        return Err(Error::InvalidInput(
                            "sample count must equal the resolution".into(),
                        ));
                    }
                    return GraphHypersurface::axisym_from_samples(self.n, samples.clone());
                }
                let profile = self.axisym_profile()?;
                GraphHypersurface::axisym_from_profile(self.n, res, profile)
            }
            SurfaceKind::Grid3 => {
                if self.n != 3 {
                    return Err(Error::InvalidInput("grid3 surfaces require n = 3".into()));
                }
                let polar = res.ok_or_else(|| {
                    Error::InvalidInput("grid3 surface needs a resolution".into())
                })?;
                let azimuth = self.azimuth.unwrap_or(2 * polar);
                if let Some(samples) = &self.samples {
                    return GraphHypersurface::grid3_from_samples(
                        polar,
                        azimuth,
                        samples.clone(),
                    );
                }
                let profile = self.grid3_profile()?;
                GraphHypersurface::grid3_from_profile(polar, azimuth, profile)
            }
        }
    }

    fn axisym_profile(&self) -> Result<AxisymProfile<f64>> {
        let p = self
            .profile
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("axisym surface needs a profile or samples".into()))?;
        if let Some(off) = &p.offset_sphere {
            return Ok(AxisymProfile::OffsetSphere {
                radius: off.radius,
                offset: off.offset,
            });
        }
        let base = p.base_radius.ok_or_else(|| {
            Error::InvalidInput("profile needs base_radius (or offset_sphere)".into())
        })?;
        if p.legendre_modes.is_empty() {
            return Ok(AxisymProfile::Constant { radius: base });
        }
        Ok(AxisymProfile::LegendreModes {
            base,
            modes: p
                .legendre_modes
                .iter()
                .map(|m| (m.degree, m.amplitude))
                .collect(),
        })
    }

    fn grid3_profile(&self) -> Result<Grid3Profile<f64>> {
        let p = self
            .profile
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("grid3 surface needs a profile or samples".into()))?;
        let base = p
            .base_radius
            .ok_or_else(|| Error::InvalidInput("profile needs base_radius".into()))?;
        Ok(Grid3Profile {
            base,
            modes: p
                .harmonic_modes
                .iter()
                .map(|m| HarmonicMode {
                    degree: m.degree,
                    order: m.order,
                    amplitude: m.amplitude,
                    phase: m.phase,
                })
                .collect(),
        })
    }
}

/// Writes the flow history as tidy CSV (deterministic formatting).
pub fn write_flow_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut out = String::new();
    let sigma_count = records.first().map(|r| r.sigma_integrals.len()).unwrap_or(0);
    out.push_str("t,q,area,dlog_area_dt,lk_integral,ltilde_integral,evolution_rhs,w_odd,umbilicity,kappa_min,trunc_estimate");
    for j in 0..sigma_count {
        out.push_str(&format!(",sigma_int_{j}"));
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.3e}",
            r.t,
            r.q,
            r.area,
            r.dlog_area_dt,
            r.lk_integral,
            r.ltilde_integral,
            r.evolution_rhs,
            r.w_odd,
            r.umbilicity,
            r.kappa_min,
            r.trunc_estimate
        ));
        for s in &r.sigma_integrals {
            out.push_str(&format!(",{s:.15e}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Restart snapshot: flow time plus the radial samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub t: f64,
    pub n: usize,
    pub kind: SurfaceKind,
    pub resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub azimuth: Option<usize>,
    pub samples: Vec<f64>,
}

impl Snapshot {
    pub fn of(t: f64, surface: &GraphHypersurface<f64>) -> Result<Self> {
        let samples = surface
            .radial_samples()
            .ok_or_else(|| Error::InvalidInput("exact spheres have no samples".into()))?
            .to_vec();
        let (kind, azimuth) = match surface {
            GraphHypersurface::Axisym(_) => (SurfaceKind::Axisym, None),
            GraphHypersurface::Grid3(_) => (
                SurfaceKind::Grid3,
                Some(samples.len() / surface.polar_resolution()),
            ),
            GraphHypersurface::ExactSphere { .. } => unreachable!(),
        };
        Ok(Snapshot {
            t,
            n: surface.ambient_dim(),
            kind,
            resolution: surface.polar_resolution(),
            azimuth,
            samples,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer(&mut file, self)?;
        file.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn build(&self) -> Result<GraphHypersurface<f64>> {
        match self.kind {
            SurfaceKind::Axisym => {
                GraphHypersurface::axisym_from_samples(self.n, self.samples.clone())
            }
            SurfaceKind::Grid3 => GraphHypersurface::grid3_from_samples(
                self.resolution,
                self.azimuth
                    .ok_or_else(|| Error::InvalidInput("grid3 snapshot needs azimuth".into()))?,
                self.samples.clone(),
            ),
            SurfaceKind::ExactSphere => {
                Err(Error::InvalidInput("snapshots never hold exact spheres".into()))
            }
        }
    }
}

/// One JSON record per check, newline-delimited.
pub fn write_report_json(path: &Path, reports: &[InequalityReport]) -> Result<()> {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Aggregate CSV table over all checks of a run.
pub fn write_report_csv(path: &Path, reports: &[InequalityReport], seed: u64) -> Result<()> {
    let mut out = String::from("input,inequality,n,k,lhs,rhs,margin,rel_margin,tolerance,equality,pass,seed\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.3e},{},{},{}\n",
            r.input,
            r.name,
            r.n,
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.lhs,
            r.rhs,
            r.margin,
            r.rel_margin,
            r.tolerance,
            r.equality,
            r.pass,
            seed
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}
