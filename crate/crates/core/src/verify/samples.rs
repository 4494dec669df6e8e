//! Seeded sample generation: sphere families, perturbed spheres with
//! amplitudes capped by an h-convexity bisection, and random curvature
//! vectors in the float and exact-rational cones.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::profile::{AxisymProfile, Grid3Profile, HarmonicMode};
use crate::geometry::GraphHypersurface;
use crate::symfunc::CurvatureVector;

/// Declarative sample family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSpec {
    ExactSphere {
        n: usize,
        rho: f64,
    },
    PerturbedSphere {
        n: usize,
        rho: f64,
        resolution: usize,
        /// Legendre mode degrees perturbing the profile.
        degrees: Vec<u32>,
        /// Fraction of the h-convexity threshold amplitude to use (0, 1].
        amplitude_scale: f64,
    },
    RandomHConvexKappa {
        n: usize,
        /// Curvatures drawn from `[1, 1 + spread]`.
        spread: f64,
    },
    RandomUnitSubconvexKappa {
        n: usize,
        /// Curvatures drawn from `[floor, 1]`.
        floor: f64,
    },
}

/// Deterministic generator; the same seed reproduces every sample.
pub struct SampleGenerator {
    rng: ChaCha8Rng,
}

impl SampleGenerator {
    pub fn new(seed: u64) -> Self {
        SampleGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Axisymmetric perturbed sphere: random mode amplitudes rescaled by a
    /// bisection against the h-convexity threshold, then shrunk by
    /// `amplitude_scale`.
    pub fn perturbed_sphere(
        &mut self,
        n: usize,
        rho: f64,
        resolution: usize,
        degrees: &[u32],
        amplitude_scale: f64,
    ) -> Result<GraphHypersurface<f64>> {
        let raw: Vec<(u32, f64)> = degrees
            .iter()
            .map(|&l| (l, self.rng.gen_range(-1.0..1.0)))
            .collect();
        let build = |scale: f64| {
            GraphHypersurface::axisym_from_profile(
                n,
                resolution,
                AxisymProfile::LegendreModes {
                    base: rho,
                    modes: raw.iter().map(|&(l, a)| (l, scale * a)).collect(),
                },
            )
        };
        let threshold = bisect_convex_scale(|s| {
            build(s)
                .and_then(|surf| surf.hconvexity_report(0.0))
                .map(|rep| rep.horospherically_convex && rep.kappa_min >= 1.0 + 0.005)
                .unwrap_or(false)
        });
        build(threshold * amplitude_scale)
    }

    /// Lat-long perturbed sphere in `H^3` with spherical-harmonic modes.
    pub fn perturbed_grid3(
        &mut self,
        rho: f64,
        polar: usize,
        azimuth: usize,
        modes: &[(u32, u32)],
        amplitude_scale: f64,
    ) -> Result<GraphHypersurface<f64>> {
        let raw: Vec<HarmonicMode<f64>> = modes
            .iter()
            .map(|&(l, m)| HarmonicMode {
                degree: l,
                order: m,
                amplitude: self.rng.gen_range(-1.0..1.0),
                phase: self.rng.gen_range(0.0..std::f64::consts::TAU),
            })
            .collect();
        let build = |scale: f64| {
            GraphHypersurface::grid3_from_profile(
                polar,
                azimuth,
                Grid3Profile {
                    base: rho,
                    modes: raw
                        .iter()
                        .map(|m| HarmonicMode {
                            degree: m.degree,
                            order: m.order,
                            amplitude: scale * m.amplitude,
                            phase: m.phase,
                        })
                        .collect(),
                },
            )
        };
        let threshold = bisect_convex_scale(|s| {
            build(s)
                .and_then(|surf| surf.hconvexity_report(0.0))
                .map(|rep| rep.horospherically_convex && rep.kappa_min >= 1.0 + 0.005)
                .unwrap_or(false)
        });
        build(threshold * amplitude_scale)
    }

    /// Random horospherically convex curvature vector in `[1, 1 + spread]`.
    pub fn hconvex_kappa(&mut self, n: usize, spread: f64) -> CurvatureVector<f64> {
        let entries: Vec<f64> = (0..n - 1)
            .map(|_| 1.0 + self.rng.gen_range(0.0..spread))
            .collect();
        CurvatureVector::new(entries, n).expect("valid by construction")
    }

    /// Random unit-subconvex curvature vector in `(floor, 1]`.
    pub fn subconvex_kappa(&mut self, n: usize, floor: f64) -> CurvatureVector<f64> {
        let entries: Vec<f64> = (0..n - 1)
            .map(|_| self.rng.gen_range(floor..=1.0))
            .collect();
        CurvatureVector::new(entries, n).expect("valid by construction")
    }

    /// Random vector with all pairwise products `kappa_i kappa_j >= 1`:
    /// one entry may drop below 1, reciprocally bounded by the others.
    pub fn sectional_kappa(&mut self, n: usize, spread: f64) -> CurvatureVector<f64> {
        let mut entries: Vec<f64> = (0..n - 1)
            .map(|_| 1.0 + self.rng.gen_range(0.0..spread))
            .collect();
        if self.rng.gen_bool(0.5) {
            let min_rest = entries[1..]
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let low = self.rng.gen_range(0.0..=1.0);
            entries[0] = (1.0 / min_rest) * (1.0 - low) + low * entries[0];
        }
        CurvatureVector::new(entries, n).expect("valid by construction")
    }

    /// Exact-rational horospherically convex vector `1 + a/b` with small
    /// numerators and denominators.
    pub fn hconvex_kappa_rational(&mut self, n: usize) -> CurvatureVector<BigRational> {
        let entries: Vec<BigRational> = (0..n - 1)
            .map(|_| {
                let den = self.rng.gen_range(1i64..=6);
                let num = self.rng.gen_range(0i64..=3 * den);
                BigRational::new(BigInt::from(den + num), BigInt::from(den))
            })
            .collect();
        CurvatureVector::new(entries, n).expect("valid by construction")
    }

    /// Exact-rational unit-subconvex vector `a/b` with `1 <= a <= b`.
    pub fn subconvex_kappa_rational(&mut self, n: usize) -> CurvatureVector<BigRational> {
        let entries: Vec<BigRational> = (0..n - 1)
            .map(|_| {
                let den = self.rng.gen_range(1i64..=8);
                let num = self.rng.gen_range(1i64..=den);
                BigRational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        CurvatureVector::new(entries, n).expect("valid by construction")
    }

    /// General small rational vector (possibly indefinite sign pattern).
    pub fn general_kappa_rational(&mut self, n: usize) -> CurvatureVector<BigRational> {
        let entries: Vec<BigRational> = (0..n - 1)
            .map(|_| {
                let den = self.rng.gen_range(1i64..=6);
                let num = self.rng.gen_range(-2 * den..=3 * den);
                BigRational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        CurvatureVector::new(entries, n).expect("valid by construction")
    }
}

/// Largest scale in `[0, 1]` that keeps the predicate true, by bisection;
/// the predicate must hold at 0.
fn bisect_convex_scale(mut is_ok: impl FnMut(f64) -> bool) -> f64 {
    debug_assert!(is_ok(0.0));
    let mut hi = 1.0f64;
    if is_ok(hi) {
        return hi;
    }
    let mut lo = 0.0f64;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if is_ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Materializes a [`SampleSpec`] with its own derived RNG stream.
pub fn realize_surface(spec: &SampleSpec, seed: u64) -> Result<Option<GraphHypersurface<f64>>> {
    let mut gen = SampleGenerator::new(seed);
    match spec {
        SampleSpec::ExactSphere { n, rho } => {
            Ok(Some(GraphHypersurface::exact_sphere(*n, *rho)?))
        }
        SampleSpec::PerturbedSphere {
            n,
            rho,
            resolution,
            degrees,
            amplitude_scale,
        } => Ok(Some(gen.perturbed_sphere(
            *n,
            *rho,
            *resolution,
            degrees,
            *amplitude_scale,
        )?)),
        SampleSpec::RandomHConvexKappa { .. } | SampleSpec::RandomUnitSubconvexKappa { .. } => {
            Ok(None)
        }
    }
}
