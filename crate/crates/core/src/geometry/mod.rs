//! Discretized radial-graph hypersurfaces in hyperbolic space: shape
//! operators, principal curvatures, curvature integrals, enclosed volumes and
//! quermassintegrals by three routes.
//!
//! Three kinds of surface are supported: exact geodesic spheres (all
//! quantities closed-form), axisymmetric graphs `r(u)` in any ambient
//! dimension (Gauss-Legendre polar nodes), and full lat-long graphs
//! `r(u, phi)` in `H^3` (uniform cell-centered polar nodes crossed with a
//! periodic azimuth). Shape operators come from the graph formula
//! `h_i^j = (lambda'/(v lambda)) (delta_i^j - psi_i^j / lambda'
//!          + psi_i psi_l psi^{jl} / (v^2 lambda'))`
//! where `psi` is the radial support function with `psi' = 1/lambda`,
//! evaluated in an orthonormal frame of the round sphere.

pub mod grid;
pub mod profile;
pub mod sphere;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symfunc::{build_sym_table, CurvatureVector, SymTable};
use grid::{
    barycentric_eval, barycentric_weights, periodic_d1, periodic_d2, tree_sum, NodeRef, PolarGrid,
};
use profile::{AxisymProfile, Grid3Profile};
use sphere::{sinh_power_integral, sphere_area, sphere_volume, unit_sphere_area};

/// Geometric data of one grid point.
#[derive(Debug, Clone)]
pub struct PointFrame<R> {
    /// `sinh r`.
    pub lambda: R,
    /// `cosh r`.
    pub lambda_prime: R,
    /// `sqrt(1 + |grad psi|^2)`.
    pub v: R,
    /// Support-function gradient in the orthonormal frame (polar, azimuthal).
    pub grad_psi: [R; 2],
    /// Nontrivial block of the support-function Hessian.
    pub hess_psi: [[R; 2]; 2],
    /// Nontrivial block of the shape operator after symmetrization. For
    /// axisymmetric points the `[1][1]` entry repeats across all `n - 2`
    /// orbit directions.
    pub shape: [[R; 2]; 2],
    /// Principal curvatures, length `n - 1`.
    pub kappa: Vec<R>,
    /// Area-element weight `lambda^{n-1} v` per unit round-sphere measure.
    pub area_weight: R,
    /// `|h_12 - h_21|` before symmetrization, relative to the shape scale.
    pub asym_defect: R,
}

impl<R: Real> PointFrame<R> {
    /// `lambda'^2 - lambda^2 - 1`, identically zero up to roundoff.
    pub fn identity_defect(&self) -> R {
        self.lambda_prime * self.lambda_prime - self.lambda * self.lambda - R::one()
    }

    pub fn sym_table(&self, ambient_dim: usize) -> SymTable<R> {
        let kappa = CurvatureVector::new(self.kappa.clone(), ambient_dim)
            .expect("frame curvature vector valid");
        build_sym_table(&kappa)
    }
}

/// Minimal per-node data for the flow right-hand side: the curvature
/// spectrum is `{kappa_polar, kappa_orbit x orbit_mult}`.
#[derive(Debug, Clone, Copy)]
pub struct LeanFrame<R> {
    pub lambda: R,
    pub v: R,
    pub kappa_polar: R,
    pub kappa_orbit: R,
    pub orbit_mult: usize,
}

/// Axisymmetric radial graph sampled at Gauss-Legendre polar nodes.
#[derive(Debug, Clone)]
pub struct AxisymSurface<R: Real> {
    ambient_dim: usize,
    grid: PolarGrid<R>,
    samples: Vec<R>,
    profile: Option<AxisymProfile<R>>,
}

/// Full lat-long radial graph on `S^2` (ambient dimension 3), uniform
/// cell-centered polar nodes by azimuth columns, row-major `[polar][azimuth]`.
#[derive(Debug, Clone)]
pub struct LatLongSurface<R: Real> {
    grid: PolarGrid<R>,
    azimuth: usize,
    samples: Vec<R>,
    profile: Option<Grid3Profile<R>>,
}

/// A closed radial graph over the round sphere in `H^n`.
#[derive(Debug, Clone)]
pub enum GraphHypersurface<R: Real> {
    ExactSphere { ambient_dim: usize, radius: R },
    Axisym(AxisymSurface<R>),
    Grid3(LatLongSurface<R>),
}

/// Curvature integrals of one surface, computed in a single sweep:
/// `area`, `int sigma_j`, `int p_j` for all `j`, and `int Ltilde_k` for
/// `2k <= n-1`.
#[derive(Debug, Clone)]
pub struct CurvatureIntegrals<R> {
    pub ambient_dim: usize,
    pub area: R,
    pub sigma: Vec<R>,
    pub p: Vec<R>,
    pub tilde_l: Vec<R>,
}

/// The three quermassintegral routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuermassRoute {
    /// Two-term recursion from `W_0 = Vol`, `W_1 = |Sigma|/n` through the
    /// curvature integrals; yields the full chain.
    Recursion,
    /// Odd chain from the Gauss-Bonnet integrals `int Ltilde_i`.
    TildeSum,
    /// Odd chain from the alternating double-factorial sigma sums.
    AlternatingSigma,
}

impl QuermassRoute {
    pub const ALL: [QuermassRoute; 3] = [
        QuermassRoute::Recursion,
        QuermassRoute::TildeSum,
        QuermassRoute::AlternatingSigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuermassRoute::Recursion => "recursion",
            QuermassRoute::TildeSum => "tilde-sum",
            QuermassRoute::AlternatingSigma => "alternating-sigma",
        }
    }
}

/// Quermassintegrals indexed by `r`; entries the chosen route does not
/// produce are `None`.
#[derive(Debug, Clone)]
pub struct QuermassVector<R> {
    pub route: QuermassRoute,
    pub values: Vec<Option<R>>,
}

impl<R: Real> QuermassVector<R> {
    pub fn w(&self, r: usize) -> Option<R> {
        self.values.get(r).copied().flatten()
    }
}

/// Convexity summary over the grid.
#[derive(Debug, Clone)]
pub struct HConvexityReport<R> {
    pub kappa_min: R,
    pub horospherically_convex: bool,
    /// Flat node index attaining the minimum.
    pub argmin: usize,
}

const MIN_POLAR_RES: usize = 8;

impl<R: Real> GraphHypersurface<R> {
    pub fn exact_sphere(ambient_dim: usize, radius: R) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(Error::InvalidInput("ambient dimension must be >= 3".into()));
        }
        if radius <= R::zero() {
            return Err(Error::InvalidInput("sphere radius must be positive".into()));
        }
        Ok(GraphHypersurface::ExactSphere {
            ambient_dim,
            radius,
        })
    }

    pub fn axisym_from_profile(
        ambient_dim: usize,
        resolution: usize,
        profile: AxisymProfile<R>,
    ) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(Error::InvalidInput("ambient dimension must be >= 3".into()));
        }
        if resolution < MIN_POLAR_RES {
            return Err(Error::InvalidInput(format!(
                "polar resolution must be >= {MIN_POLAR_RES}"
            )));
        }
        let grid = PolarGrid::gauss(resolution);
        let samples: Vec<R> = grid.nodes.iter().map(|&u| profile.eval(u)).collect();
        validate_samples(&samples)?;
        Ok(GraphHypersurface::Axisym(AxisymSurface {
            ambient_dim,
            grid,
            samples,
            profile: Some(profile),
        }))
    }

    pub fn axisym_from_samples(ambient_dim: usize, samples: Vec<R>) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(Error::InvalidInput("ambient dimension must be >= 3".into()));
        }
        if samples.len() < MIN_POLAR_RES {
            return Err(Error::InvalidInput(format!(
                "need at least {MIN_POLAR_RES} polar samples"
            )));
        }
        validate_samples(&samples)?;
        let grid = PolarGrid::gauss(samples.len());
        Ok(GraphHypersurface::Axisym(AxisymSurface {
            ambient_dim,
            grid,
            samples,
            profile: None,
        }))
    }

    pub fn grid3_from_profile(
        polar: usize,
        azimuth: usize,
        profile: Grid3Profile<R>,
    ) -> Result<Self> {
        if polar < MIN_POLAR_RES || azimuth < 8 || !azimuth.is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "lat-long grid needs polar >= 8 and even azimuth >= 8".into(),
            ));
        }
        let grid = PolarGrid::uniform(polar);
        let dphi = R::from_f(std::f64::consts::TAU) / R::from_f(azimuth as f64);
        let mut samples = Vec::with_capacity(polar * azimuth);
        for &u in &grid.nodes {
            for j in 0..azimuth {
                samples.push(profile.eval(u, R::from_f(j as f64) * dphi));
            }
        }
        validate_samples(&samples)?;
        Ok(GraphHypersurface::Grid3(LatLongSurface {
            grid,
            azimuth,
            samples,
            profile: Some(profile),
        }))
    }

    pub fn grid3_from_samples(polar: usize, azimuth: usize, samples: Vec<R>) -> Result<Self> {
        if polar < MIN_POLAR_RES || azimuth < 8 || !azimuth.is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "lat-long grid needs polar >= 8 and even azimuth >= 8".into(),
            ));
        }
        if samples.len() != polar * azimuth {
            return Err(Error::InvalidInput(
                "sample count must be polar * azimuth".into(),
            ));
        }
        validate_samples(&samples)?;
        Ok(GraphHypersurface::Grid3(LatLongSurface {
            grid: PolarGrid::uniform(polar),
            azimuth,
            samples,
            profile: None,
        }))
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            GraphHypersurface::ExactSphere { ambient_dim, .. } => *ambient_dim,
            GraphHypersurface::Axisym(s) => s.ambient_dim,
            GraphHypersurface::Grid3(_) => 3,
        }
    }

    /// Hypersurface dimension `n - 1`.
    pub fn dim(&self) -> usize {
        self.ambient_dim() - 1
    }

    pub fn node_count(&self) -> usize {
        match self {
            GraphHypersurface::ExactSphere { .. } => 1,
            GraphHypersurface::Axisym(s) => s.samples.len(),
            GraphHypersurface::Grid3(s) => s.samples.len(),
        }
    }

    /// Polar resolution (1 for exact spheres).
    pub fn polar_resolution(&self) -> usize {
        match self {
            GraphHypersurface::ExactSphere { .. } => 1,
            GraphHypersurface::Axisym(s) => s.grid.len(),
            GraphHypersurface::Grid3(s) => s.grid.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GraphHypersurface::ExactSphere { .. } => "exact_sphere",
            GraphHypersurface::Axisym(_) => "axisym",
            GraphHypersurface::Grid3(_) => "grid3",
        }
    }

    pub fn radial_samples(&self) -> Option<&[R]> {
        match self {
            GraphHypersurface::ExactSphere { .. } => None,
            GraphHypersurface::Axisym(s) => Some(&s.samples),
            GraphHypersurface::Grid3(s) => Some(&s.samples),
        }
    }

    /// Replaces the radial samples (flow updates). Clears any generating
    /// profile, which would otherwise go stale.
    pub fn set_radial_samples(&mut self, new_samples: Vec<R>) -> Result<()> {
        match self {
            GraphHypersurface::ExactSphere { .. } => Err(Error::InvalidInput(
                "exact spheres carry no samples".into(),
            )),
            GraphHypersurface::Axisym(s) => {
                if new_samples.len() != s.samples.len() {
                    return Err(Error::InvalidInput("sample count mismatch".into()));
                }
                validate_samples(&new_samples)?;
                s.samples = new_samples;
                s.profile = None;
                Ok(())
            }
            GraphHypersurface::Grid3(s) => {
                if new_samples.len() != s.samples.len() {
                    return Err(Error::InvalidInput("sample count mismatch".into()));
                }
                validate_samples(&new_samples)?;
                s.samples = new_samples;
                s.profile = None;
                Ok(())
            }
        }
    }

    /// Smallest effective grid spacing, for step-size control. Exact spheres
    /// report infinity (no grid).
    pub fn min_node_spacing(&self) -> R {
        match self {
            GraphHypersurface::ExactSphere { .. } => R::infinity(),
            GraphHypersurface::Axisym(s) => s.grid.min_spacing,
            GraphHypersurface::Grid3(s) => {
                let dphi = R::from_f(std::f64::consts::TAU) / R::from_f(s.azimuth as f64);
                let sin0 = s.grid.nodes[0].sin();
                s.grid.min_spacing.min(sin0 * dphi)
            }
        }
    }

    /// Rebuilds the surface at a new polar resolution (azimuth scales
    /// proportionally for lat-long grids). Profile-backed surfaces resample
    /// the profile; sample-backed axisymmetric surfaces interpolate.
    pub fn with_resolution(&self, polar: usize) -> Result<Self> {
        match self {
            GraphHypersurface::ExactSphere { .. } => Ok(self.clone()),
            GraphHypersurface::Axisym(s) => match &s.profile {
                Some(p) => Self::axisym_from_profile(s.ambient_dim, polar, p.clone()),
                None => {
                    let w = barycentric_weights(&s.grid.nodes);
                    let new_grid = PolarGrid::<R>::gauss(polar);
                    let samples: Vec<R> = new_grid
                        .nodes
                        .iter()
                        .map(|&u| barycentric_eval(&s.grid.nodes, &w, &s.samples, u))
                        .collect();
                    Self::axisym_from_samples(s.ambient_dim, samples)
                }
            },
            GraphHypersurface::Grid3(s) => match &s.profile {
                Some(p) => {
                    let az = (s.azimuth * polar / s.grid.len()).max(8);
                    let az = az + az % 2;
                    Self::grid3_from_profile(polar, az, p.clone())
                }
                None => Err(Error::InvalidInput(
                    "cannot resample a lat-long grid without its profile".into(),
                )),
            },
        }
    }

    /// The shape-operator frame at flat node index `idx`.
    pub fn frame_at(&self, idx: usize) -> Result<PointFrame<R>> {
        match self {
            GraphHypersurface::ExactSphere {
                ambient_dim,
                radius,
            } => Ok(sphere_frame(*ambient_dim, *radius)),
            GraphHypersurface::Axisym(s) => {
                if idx >= s.samples.len() {
                    return Err(Error::IndexOutOfRange {
                        what: "node index",
                        got: idx,
                        n: s.samples.len(),
                    });
                }
                Ok(axisym_frame(s, idx))
            }
            GraphHypersurface::Grid3(s) => {
                if idx >= s.samples.len() {
                    return Err(Error::IndexOutOfRange {
                        what: "node index",
                        got: idx,
                        n: s.samples.len(),
                    });
                }
                let ru_local = |i: usize, j: usize| grid3_r_u(s, i, j);
                Ok(grid3_frame(s, idx / s.azimuth, idx % s.azimuth, &ru_local))
            }
        }
    }

    /// Frames at every node (one representative frame for exact spheres).
    pub fn frames(&self) -> Result<Vec<PointFrame<R>>> {
        match self {
            GraphHypersurface::ExactSphere {
                ambient_dim,
                radius,
            } => Ok(vec![sphere_frame(*ambient_dim, *radius)]),
            GraphHypersurface::Axisym(s) => {
                Ok((0..s.samples.len()).map(|i| axisym_frame(s, i)).collect())
            }
            GraphHypersurface::Grid3(s) => {
                // Precompute the polar-derivative field once for the mixed
                // derivative.
                let ru_field = grid3_r_u_field(s);
                let m = s.azimuth;
                let ru = |i: usize, j: usize| ru_field[i * m + j];
                Ok((0..s.samples.len())
                    .map(|idx| grid3_frame(s, idx / m, idx % m, &ru))
                    .collect())
            }
        }
    }

    /// Quadrature of `f(frame) d mu` over the surface. Exact spheres use the
    /// closed-form area with the constant frame.
    pub fn integrate_with(&self, f: impl Fn(&PointFrame<R>) -> R) -> Result<R> {
        match self {
            GraphHypersurface::ExactSphere {
                ambient_dim,
                radius,
            } => {
                let frame = sphere_frame(*ambient_dim, *radius);
                Ok(f(&frame) * sphere_area(*ambient_dim, *radius))
            }
            _ => {
                let frames = self.frames()?;
                let weights = self.angular_weights();
                let vals: Vec<R> = frames
                    .iter()
                    .zip(weights)
                    .map(|(fr, w)| f(fr) * fr.area_weight * w)
                    .collect();
                Ok(tree_sum(&vals))
            }
        }
    }

    /// Angular quadrature weights per node (round-sphere measure).
    fn angular_weights(&self) -> Vec<R> {
        match self {
            GraphHypersurface::ExactSphere { .. } => vec![R::one()],
            GraphHypersurface::Axisym(s) => {
                let omega = unit_sphere_area::<R>(s.ambient_dim - 2);
                let power = (s.ambient_dim - 2) as i32;
                s.grid
                    .nodes
                    .iter()
                    .zip(&s.grid.weights)
                    .map(|(&u, &w)| omega * w * u.sin().powi(power))
                    .collect()
            }
            GraphHypersurface::Grid3(s) => {
                let dphi = R::from_f(std::f64::consts::TAU) / R::from_f(s.azimuth as f64);
                let mut out = Vec::with_capacity(s.samples.len());
                for (i, &u) in s.grid.nodes.iter().enumerate() {
                    let w = s.grid.weights[i] * dphi * u.sin();
                    for _ in 0..s.azimuth {
                        out.push(w);
                    }
                }
                out
            }
        }
    }

    pub fn area(&self) -> Result<R> {
        match self {
            GraphHypersurface::ExactSphere {
                ambient_dim,
                radius,
            } => Ok(sphere_area(*ambient_dim, *radius)),
            _ => self.integrate_with(|_| R::one()),
        }
    }

    /// All curvature integrals in one sweep.
    pub fn curvature_integrals(&self) -> Result<CurvatureIntegrals<R>> {
        let n = self.ambient_dim();
        let m = n - 1;
        match self {
            GraphHypersurface::ExactSphere { radius, .. } => {
                let area = sphere_area(n, *radius);
                let coth = radius.tanh().recip();
                let sigma: Vec<R> = (0..=m)
                    .map(|k| {
                        R::from_count(crate::combo::binomial(m, k)) * coth.powi(k as i32) * area
                    })
                    .collect();
                let p: Vec<R> = (0..=m).map(|k| coth.powi(k as i32) * area).collect();
                // Ltilde_k collapses to (coth^2 - 1)^k = sinh^{-2k}.
                let tilde_l: Vec<R> = (0..=m / 2)
                    .map(|k| radius.sinh().powi(-2 * (k as i32)) * area)
                    .collect();
                Ok(CurvatureIntegrals {
                    ambient_dim: n,
                    area,
                    sigma,
                    p,
                    tilde_l,
                })
            }
            _ => {
                let frames = self.frames()?;
                let weights = self.angular_weights();
                let count = frames.len();
                let mut area_v = vec![R::zero(); count];
                let mut sigma_v = vec![vec![R::zero(); count]; m + 1];
                let mut p_v = vec![vec![R::zero(); count]; m + 1];
                let mut tl_v = vec![vec![R::zero(); count]; m / 2 + 1];
                for (i, (fr, w)) in frames.iter().zip(&weights).enumerate() {
                    let du = fr.area_weight * *w;
                    let tbl = fr.sym_table(n);
                    area_v[i] = du;
                    for j in 0..=m {
                        sigma_v[j][i] = *tbl.sigma(j).expect("in range") * du;
                        p_v[j][i] = *tbl.p(j).expect("in range") * du;
                    }
                    for (k, col) in tl_v.iter_mut().enumerate() {
                        col[i] = tbl.tilde_l(k).expect("in range") * du;
                    }
                }
                Ok(CurvatureIntegrals {
                    ambient_dim: n,
                    area: tree_sum(&area_v),
                    sigma: sigma_v.iter().map(|v| tree_sum(v)).collect(),
                    p: p_v.iter().map(|v| tree_sum(v)).collect(),
                    tilde_l: tl_v.iter().map(|v| tree_sum(v)).collect(),
                })
            }
        }
    }

    /// `int sigma_k d mu`.
    pub fn integrate_sigma(&self, k: usize) -> Result<R> {
        if k > self.dim() {
            return Err(Error::IndexOutOfRange {
                what: "sigma order",
                got: k,
                n: self.ambient_dim(),
            });
        }
        Ok(self.curvature_integrals()?.sigma[k])
    }

    /// `int L_k d mu`, the Gauss-Bonnet curvature integral. Needs `2k <= n-1`.
    pub fn integrate_l(&self, k: usize) -> Result<R> {
        if 2 * k > self.dim() {
            return Err(Error::IndexOutOfRange {
                what: "Gauss-Bonnet order 2k",
                got: 2 * k,
                n: self.ambient_dim(),
            });
        }
        let ints = self.curvature_integrals()?;
        let factor = R::from_count(crate::symfunc::gauss_bonnet_factor(self.dim(), k));
        Ok(factor * ints.tilde_l[k])
    }

    /// Enclosed volume `int_{S^{n-1}} int_0^{r} sinh^{n-1}(s) ds`; the inner
    /// integral is closed-form.
    pub fn volume(&self) -> Result<R> {
        let n = self.ambient_dim();
        match self {
            GraphHypersurface::ExactSphere { radius, .. } => Ok(sphere_volume(n, *radius)),
            GraphHypersurface::Axisym(s) => {
                let omega = unit_sphere_area::<R>(n - 2);
                let power = (n - 2) as i32;
                let vals: Vec<R> = s
                    .grid
                    .nodes
                    .iter()
                    .zip(&s.grid.weights)
                    .zip(&s.samples)
                    .map(|((&u, &w), &r)| {
                        omega * w * u.sin().powi(power) * sinh_power_integral(n - 1, r)
                    })
                    .collect();
                Ok(tree_sum(&vals))
            }
            GraphHypersurface::Grid3(s) => {
                let dphi = R::from_f(std::f64::consts::TAU) / R::from_f(s.azimuth as f64);
                let mut vals = Vec::with_capacity(s.samples.len());
                for (i, &u) in s.grid.nodes.iter().enumerate() {
                    for j in 0..s.azimuth {
                        let r = s.samples[i * s.azimuth + j];
                        vals.push(s.grid.weights[i] * dphi * u.sin() * sinh_power_integral(2, r));
                    }
                }
                Ok(tree_sum(&vals))
            }
        }
    }

    /// Quermassintegrals by the chosen route.
    pub fn quermass(&self, route: QuermassRoute) -> Result<QuermassVector<R>> {
        let ints = self.curvature_integrals()?;
        let n = self.ambient_dim();
        let nf = R::from_f(n as f64);
        let m = n - 1;
        let mut values = vec![None; n + 1];
        match route {
            QuermassRoute::Recursion => {
                let vol = self.volume()?;
                values[0] = Some(vol);
                values[1] = Some(ints.area / nf);
                for r in 1..=m {
                    let back = R::from_f(r as f64) / R::from_f((n - r + 1) as f64);
                    let prev = values[r - 1].expect("chain");
                    values[r + 1] = Some(ints.p[r] / nf - back * prev);
                }
            }
            QuermassRoute::TildeSum => {
                for k in 0..=m / 2 {
                    let mut acc = R::zero();
                    for i in 0..=k {
                        let coeff = if i == 0 {
                            R::one()
                        } else {
                            R::from_f((m - 2 * k) as f64) / R::from_f((m - 2 * k + 2 * i) as f64)
                        };
                        acc = acc
                            + R::from_count(crate::combo::binomial(k, i))
                                * coeff
                                * ints.tilde_l[k - i];
                    }
                    values[2 * k + 1] = Some(acc / nf);
                }
            }
            QuermassRoute::AlternatingSigma => {
                for k in 0..=m / 2 {
                    let mut acc = R::zero();
                    for j in 0..=k {
                        let num = crate::combo::double_factorial(2 * k as i64)
                            * crate::combo::double_factorial(n as i64 - 2 * k as i64 - 1);
                        let den = crate::combo::double_factorial(2 * (k - j) as i64)
                            * crate::combo::double_factorial(
                                n as i64 - 2 * k as i64 - 1 + 2 * j as i64,
                            );
                        let coeff = R::from_count(num) / R::from_count(den)
                            / R::from_count(crate::combo::binomial(m, 2 * k - 2 * j));
                        let term = coeff * ints.sigma[2 * k - 2 * j];
                        if j % 2 == 0 {
                            acc = acc + term;
                        } else {
                            acc = acc - term;
                        }
                    }
                    values[2 * k + 1] = Some(acc / nf);
                }
            }
        }
        Ok(QuermassVector { route, values })
    }

    /// Minimum principal curvature over the grid with the horospherical flag.
    pub fn hconvexity_report(&self, tol: R) -> Result<HConvexityReport<R>> {
        let frames = self.frames()?;
        let mut kappa_min = R::infinity();
        let mut argmin = 0usize;
        for (i, fr) in frames.iter().enumerate() {
            for &k in &fr.kappa {
                if k < kappa_min {
                    kappa_min = k;
                    argmin = i;
                }
            }
        }
        Ok(HConvexityReport {
            kappa_min,
            horospherically_convex: kappa_min >= R::one() - tol,
            argmin,
        })
    }

    /// Lean frames for the flow right-hand side, written into `buf`.
    pub fn lean_frames_into(&self, buf: &mut Vec<LeanFrame<R>>) -> Result<()> {
        buf.clear();
        match self {
            GraphHypersurface::ExactSphere {
                ambient_dim,
                radius,
            } => {
                let coth = radius.tanh().recip();
                buf.push(LeanFrame {
                    lambda: radius.sinh(),
                    v: R::one(),
                    kappa_polar: coth,
                    kappa_orbit: coth,
                    orbit_mult: ambient_dim - 2,
                });
                Ok(())
            }
            GraphHypersurface::Axisym(s) => {
                for i in 0..s.samples.len() {
                    let core = axisym_core(s, i);
                    buf.push(LeanFrame {
                        lambda: core.lambda,
                        v: core.v,
                        kappa_polar: core.kappa_polar,
                        kappa_orbit: core.kappa_orbit,
                        orbit_mult: s.ambient_dim - 2,
                    });
                }
                Ok(())
            }
            GraphHypersurface::Grid3(s) => {
                let ru_field = grid3_r_u_field(s);
                let m = s.azimuth;
                let ru = |i: usize, j: usize| ru_field[i * m + j];
                for idx in 0..s.samples.len() {
                    let core = grid3_core(s, idx / m, idx % m, &ru);
                    buf.push(LeanFrame {
                        lambda: core.lambda,
                        v: core.v,
                        kappa_polar: core.kappa_polar,
                        kappa_orbit: core.kappa_orbit,
                        orbit_mult: 1,
                    });
                }
                Ok(())
            }
        }
    }

    /// Relative quadrature-error estimate by Richardson comparison with the
    /// half-resolution surface, on the area and the low curvature integrals.
    /// Falls back to a fixed value when the surface cannot be coarsened.
    pub fn quadrature_error_estimate(&self) -> R {
        let floor = R::from_f(1e-13);
        match self {
            GraphHypersurface::ExactSphere { .. } => floor,
            _ => {
                let polar = self.polar_resolution();
                let coarse = match self.with_resolution(polar / 2) {
                    Ok(c) => c,
                    Err(_) => return R::from_f(1e-9),
                };
                let fine_ints = match self.curvature_integrals() {
                    Ok(v) => v,
                    Err(_) => return R::from_f(1e-9),
                };
                let coarse_ints = match coarse.curvature_integrals() {
                    Ok(v) => v,
                    Err(_) => return R::from_f(1e-9),
                };
                let rel = |a: R, b: R| ((a - b) / a).abs();
                let mut est = rel(fine_ints.area, coarse_ints.area);
                est = est.max(rel(fine_ints.sigma[1], coarse_ints.sigma[1]));
                if fine_ints.sigma.len() > 2 {
                    est = est.max(rel(fine_ints.sigma[2], coarse_ints.sigma[2]));
                }
                est.max(floor)
            }
        }
    }
}

fn validate_samples<R: Real>(samples: &[R]) -> Result<()> {
    if samples.iter().any(|r| !r.is_finite() || *r <= R::zero()) {
        return Err(Error::InvalidInput(
            "radial samples must be finite and positive".into(),
        ));
    }
    Ok(())
}

fn sphere_frame<R: Real>(n: usize, radius: R) -> PointFrame<R> {
    let lambda = radius.sinh();
    let lambda_prime = radius.cosh();
    let coth = lambda_prime / lambda;
    PointFrame {
        lambda,
        lambda_prime,
        v: R::one(),
        grad_psi: [R::zero(); 2],
        hess_psi: [[R::zero(); 2]; 2],
        shape: [[coth, R::zero()], [R::zero(), coth]],
        kappa: vec![coth; n - 1],
        area_weight: lambda.powi(n as i32 - 1),
        asym_defect: R::zero(),
    }
}

/// Allocation-free per-point geometry shared by the full and lean frames.
#[derive(Debug, Clone, Copy)]
struct PointCore<R> {
    lambda: R,
    lambda_prime: R,
    v: R,
    grad: [R; 2],
    hess: [[R; 2]; 2],
    shape: [[R; 2]; 2],
    kappa_polar: R,
    kappa_orbit: R,
    asym_defect: R,
}

fn axisym_core<R: Real>(s: &AxisymSurface<R>, i: usize) -> PointCore<R> {
    let u = s.grid.nodes[i];
    let r = s.samples[i];
    let (r_u, r_uu) = s.grid.derivatives(&s.samples, i);
    let lambda = r.sinh();
    let lambda_prime = r.cosh();
    let psi_u = r_u / lambda;
    let psi_uu = r_uu / lambda - lambda_prime * r_u * r_u / (lambda * lambda);
    let v = (R::one() + psi_u * psi_u).sqrt();
    let cot = u.cos() / u.sin();
    let pref = lambda_prime / (v * lambda);
    let h_polar = pref
        * (R::one() - psi_uu / lambda_prime + psi_u * psi_u * psi_uu / (v * v * lambda_prime));
    let h_orbit = pref * (R::one() - cot * psi_u / lambda_prime);
    PointCore {
        lambda,
        lambda_prime,
        v,
        grad: [psi_u, R::zero()],
        hess: [[psi_uu, R::zero()], [R::zero(), cot * psi_u]],
        shape: [[h_polar, R::zero()], [R::zero(), h_orbit]],
        kappa_polar: h_polar,
        kappa_orbit: h_orbit,
        asym_defect: R::zero(),
    }
}

fn axisym_frame<R: Real>(s: &AxisymSurface<R>, i: usize) -> PointFrame<R> {
    let n = s.ambient_dim;
    let core = axisym_core(s, i);
    let mut kappa = Vec::with_capacity(n - 1);
    kappa.push(core.kappa_polar);
    for _ in 0..n - 2 {
        kappa.push(core.kappa_orbit);
    }
    PointFrame {
        lambda: core.lambda,
        lambda_prime: core.lambda_prime,
        v: core.v,
        grad_psi: core.grad,
        hess_psi: core.hess,
        shape: core.shape,
        kappa,
        area_weight: core.lambda.powi(n as i32 - 1) * core.v,
        asym_defect: core.asym_defect,
    }
}

/// Polar derivative of the lat-long samples at `(i, j)`, with pole ghosts on
/// the antipodal azimuth column.
fn grid3_r_u<R: Real>(s: &LatLongSurface<R>, i: usize, j: usize) -> R {
    let st = &s.grid.stencils[i];
    let mut d1 = R::zero();
    for (a, node) in st.nodes.iter().enumerate() {
        let v = grid3_lookup(s, *node, j);
        d1 = d1 + st.d1[a] * v;
    }
    d1
}

fn grid3_lookup<R: Real>(s: &LatLongSurface<R>, node: NodeRef, j: usize) -> R {
    let m = s.azimuth;
    match node {
        NodeRef::Interior(ii) => s.samples[ii * m + j],
        NodeRef::MirrorStart(ii) | NodeRef::MirrorEnd(ii) => s.samples[ii * m + (j + m / 2) % m],
    }
}

fn grid3_r_u_field<R: Real>(s: &LatLongSurface<R>) -> Vec<R> {
    let m = s.azimuth;
    let mut out = Vec::with_capacity(s.samples.len());
    for i in 0..s.grid.len() {
        for j in 0..m {
            out.push(grid3_r_u(s, i, j));
        }
    }
    out
}

fn grid3_frame<R: Real>(
    s: &LatLongSurface<R>,
    i: usize,
    j: usize,
    ru: &impl Fn(usize, usize) -> R,
) -> PointFrame<R> {
    let core = grid3_core(s, i, j, ru);
    PointFrame {
        lambda: core.lambda,
        lambda_prime: core.lambda_prime,
        v: core.v,
        grad_psi: core.grad,
        hess_psi: core.hess,
        shape: core.shape,
        kappa: vec![core.kappa_polar, core.kappa_orbit],
        area_weight: core.lambda * core.lambda * core.v,
        asym_defect: core.asym_defect,
    }
}

fn grid3_core<R: Real>(
    s: &LatLongSurface<R>,
    i: usize,
    j: usize,
    ru: &impl Fn(usize, usize) -> R,
) -> PointCore<R> {
    let m = s.azimuth;
    let u = s.grid.nodes[i];
    let dphi = R::from_f(std::f64::consts::TAU) / R::from_f(m as f64);
    let row = &s.samples[i * m..(i + 1) * m];
    let r = row[j];

    // Polar derivatives (with antipodal pole ghosts).
    let st = &s.grid.stencils[i];
    let mut r_u = R::zero();
    let mut r_uu = R::zero();
    for (a, node) in st.nodes.iter().enumerate() {
        let v = grid3_lookup(s, *node, j);
        r_u = r_u + st.d1[a] * v;
        r_uu = r_uu + st.d2[a] * v;
    }
    // Azimuthal and mixed derivatives.
    let r_phi = periodic_d1(row, j, dphi);
    let r_phiphi = periodic_d2(row, j, dphi);
    let ru_m2 = ru(i, (j + m - 2) % m);
    let ru_m1 = ru(i, (j + m - 1) % m);
    let ru_p1 = ru(i, (j + 1) % m);
    let ru_p2 = ru(i, (j + 2) % m);
    let r_uphi =
        (ru_m2 - R::from_f(8.0) * ru_m1 + R::from_f(8.0) * ru_p1 - ru_p2) / (R::from_f(12.0) * dphi);

    let lambda = r.sinh();
    let lambda_prime = r.cosh();
    let l2 = lambda * lambda;
    let psi_u = r_u / lambda;
    let psi_phi = r_phi / lambda;
    let psi_uu = r_uu / lambda - lambda_prime * r_u * r_u / l2;
    let psi_uphi = r_uphi / lambda - lambda_prime * r_u * r_phi / l2;
    let psi_phiphi = r_phiphi / lambda - lambda_prime * r_phi * r_phi / l2;

    let sin_u = u.sin();
    let cot = u.cos() / sin_u;
    // Orthonormal-frame gradient and covariant Hessian on the round sphere.
    let g = [psi_u, psi_phi / sin_u];
    let h11 = psi_uu;
    let h12 = (psi_uphi - cot * psi_phi) / sin_u;
    let h22 = psi_phiphi / (sin_u * sin_u) + cot * psi_u;
    let v = (R::one() + g[0] * g[0] + g[1] * g[1]).sqrt();
    let v2lp = v * v * lambda_prime;
    let hg = [h11 * g[0] + h12 * g[1], h12 * g[0] + h22 * g[1]];
    let pref = lambda_prime / (v * lambda);
    let mut h = [[R::zero(); 2]; 2];
    let hess = [[h11, h12], [h12, h22]];
    for a in 0..2 {
        for b in 0..2 {
            let delta = if a == b { R::one() } else { R::zero() };
            h[a][b] = pref * (delta - hess[a][b] / lambda_prime + g[a] * hg[b] / v2lp);
        }
    }
    let scale = h[0][0].abs() + h[1][1].abs() + R::epsilon();
    let asym_defect = (h[0][1] - h[1][0]).abs() / scale;
    let off = (h[0][1] + h[1][0]) / R::from_f(2.0);
    let hs = [[h[0][0], off], [off, h[1][1]]];
    let mean = (hs[0][0] + hs[1][1]) / R::from_f(2.0);
    let half_diff = (hs[0][0] - hs[1][1]) / R::from_f(2.0);
    let disc = (half_diff * half_diff + off * off).sqrt();

    PointCore {
        lambda,
        lambda_prime,
        v,
        grad: g,
        hess,
        shape: hs,
        kappa_polar: mean + disc,
        kappa_orbit: mean - disc,
        asym_defect,
    }
}
