//! Explicit time integration of the inverse curvature flow
//! `dX/dt = (p_{2k-1}/p_{2k}) nu` on radial graphs, with diagnostic tracking
//! of the monotone functional `Q = |Sigma|^{-(n-1-2k)/(n-1)} int L_k`, the
//! area growth, and the umbilicity deficit.
//!
//! The graph form of the flow is `dr/dt = F v` per node. Steps are classical
//! RK4; the adaptive controller uses step doubling for the error estimate
//! and a CFL-style cap `dt <= c * (min spacing) / max|F v|`.

use crate::error::{Error, Result};
use crate::geometry::{GraphHypersurface, LeanFrame, PointFrame, QuermassRoute};
use crate::scalar::Real;

/// Normal-speed law of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedLaw {
    /// `F = p_{2k-1} / p_{2k}` (the inverse flow of order `k`).
    PRatio,
    /// `F = 1 / p_1` (inverse mean curvature; order-independent fallback).
    InverseP1,
}

impl SpeedLaw {
    pub fn name(self) -> &'static str {
        match self {
            SpeedLaw::PRatio => "p-ratio",
            SpeedLaw::InverseP1 => "inverse-p1",
        }
    }
}

/// Step-size control.
#[derive(Debug, Clone, Copy)]
pub enum DtControl<R> {
    Fixed(R),
    /// Step doubling with relative tolerance `rel_tol` and safety factor.
    Adaptive { rel_tol: R, safety: R },
}

#[derive(Debug, Clone)]
pub struct FlowConfig<R> {
    pub k: usize,
    pub speed: SpeedLaw,
    pub t_end: R,
    pub dt: DtControl<R>,
    /// CFL-style cap coefficient on `dt * max|F v| / min spacing`.
    pub cfl: R,
    /// Below this step size the run aborts with `StepRejected`.
    pub dt_floor: R,
    /// Diagnostics cadence in flow time.
    pub record_every: R,
    /// Stop once `sup|h - I|` falls below this (when set).
    pub stop_umbilicity: Option<R>,
    /// Horospherical-convexity warning tolerance.
    pub hconvex_tol: R,
    /// Division guard for `p_{2k}`.
    pub eps_div: R,
    /// Abort when Q increases beyond the truncation-tied band.
    pub enforce_q_monotonicity: bool,
    /// Optional tail-mode damping strength in (0, 1], applied to the radial
    /// profile after each accepted step. Off by default so that genuine
    /// instability stays visible; runs that enable it must record the value
    /// in their provenance.
    pub spectral_filter: Option<R>,
}

impl<R: Real> FlowConfig<R> {
    pub fn new(k: usize) -> Self {
        FlowConfig {
            k,
            speed: SpeedLaw::PRatio,
            t_end: R::from_f(1.0),
            dt: DtControl::Adaptive {
                rel_tol: R::from_f(1e-8),
                safety: R::from_f(0.9),
            },
            cfl: R::from_f(0.5),
            dt_floor: R::from_f(1e-6),
            record_every: R::from_f(0.05),
            stop_umbilicity: Some(R::from_f(1e-3)),
            hconvex_tol: R::from_f(1e-9),
            eps_div: R::from_f(1e-12),
            enforce_q_monotonicity: true,
            spectral_filter: None,
        }
    }

    pub fn with_t_end(mut self, t_end: R) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_fixed_dt(mut self, dt: R) -> Self {
        self.dt = DtControl::Fixed(dt);
        self
    }

    pub fn with_speed(mut self, speed: SpeedLaw) -> Self {
        self.speed = speed;
        self
    }

    pub fn without_umbilicity_stop(mut self) -> Self {
        self.stop_umbilicity = None;
        self
    }
}

/// One diagnostics record, in output precision.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `|Sigma|^{-(n-1-2k)/(n-1)} int L_k`.
    pub q: f64,
    pub area: f64,
    /// Instantaneous `d log|Sigma| / dt = (n-1) int p_1 F dmu / |Sigma|`.
    pub dlog_area_dt: f64,
    pub lk_integral: f64,
    pub ltilde_integral: f64,
    /// Analytic right side of the `int Ltilde_k` evolution identity,
    /// `(n-1-2k) int Ntilde_k F dmu`.
    pub evolution_rhs: f64,
    pub sigma_integrals: Vec<f64>,
    /// `W_{2k+1}` by the tilde-sum route.
    pub w_odd: f64,
    /// `sup |h - I| = max_i |kappa_i - 1|` over the grid.
    pub umbilicity: f64,
    pub kappa_min: f64,
    /// Accumulated step-doubling error estimate since the previous record.
    pub trunc_estimate: f64,
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TimeReached,
    UmbilicityReached,
}

/// Time-stamped hypersurface plus diagnostic history.
#[derive(Debug, Clone)]
pub struct FlowState<R: Real> {
    pub t: R,
    pub surface: GraphHypersurface<R>,
    pub k: usize,
    pub history: Vec<DiagnosticsRecord>,
    /// Count of recorded horospherical-convexity warnings.
    pub hconvex_warnings: usize,
    pub dt_current: R,
    /// Relative spatial quadrature-error scale of the initial surface; part
    /// of the monotonicity band (refinement tightens it).
    pub quad_rel_est: f64,
    trunc_since_record: R,
}

impl<R: Real> FlowState<R> {
    pub fn new(surface: GraphHypersurface<R>, cfg: &FlowConfig<R>) -> Result<Self> {
        if cfg.k == 0 || 2 * cfg.k > surface.dim() {
            return Err(Error::IndexOutOfRange {
                what: "flow order 2k",
                got: 2 * cfg.k,
                n: surface.ambient_dim(),
            });
        }
        if surface.radial_samples().is_none() {
            return Err(Error::InvalidInput(
                "flow needs a sampled surface; convert exact spheres to a grid first".into(),
            ));
        }
        let quad_rel_est = surface.quadrature_error_estimate().approx_f64();
        Ok(FlowState {
            t: R::zero(),
            surface,
            k: cfg.k,
            history: Vec::new(),
            hconvex_warnings: 0,
            dt_current: R::zero(),
            quad_rel_est,
            trunc_since_record: R::zero(),
        })
    }
}

/// Normal speed at a frame: `p_{2k-1}/p_{2k}` or `1/p_1`.
/// The radial update is `dr/dt = F v`.
pub fn radial_speed<R: Real>(
    frame: &PointFrame<R>,
    ambient_dim: usize,
    k: usize,
    law: SpeedLaw,
    eps_div: R,
) -> Result<R> {
    let tbl = frame.sym_table(ambient_dim);
    match law {
        SpeedLaw::InverseP1 => {
            let p1 = *tbl.p(1)?;
            if p1 <= eps_div {
                return Err(Error::DivisionBySmall {
                    what: "p_1",
                    value: p1.approx_f64(),
                });
            }
            Ok(p1.recip())
        }
        SpeedLaw::PRatio => {
            let p_hi = *tbl.p(2 * k)?;
            if p_hi <= eps_div {
                return Err(Error::DivisionBySmall {
                    what: "p_{2k}",
                    value: p_hi.approx_f64(),
                });
            }
            Ok(*tbl.p(2 * k - 1)? / p_hi)
        }
    }
}

/// Speed from a lean frame whose curvature spectrum is
/// `{kappa_polar} + {kappa_orbit} * orbit_mult`.
fn lean_speed<R: Real>(lf: &LeanFrame<R>, k: usize, law: SpeedLaw, eps_div: R) -> Result<R> {
    let mult = lf.orbit_mult;
    let m = mult + 1;
    let a = lf.kappa_polar;
    let b = lf.kappa_orbit;
    // sigma_j of the spectrum: C(mult, j) b^j + a C(mult, j-1) b^{j-1}.
    let sigma = |j: usize| -> R {
        let mut acc = R::zero();
        if j <= mult {
            acc = acc + R::from_count(crate::combo::binomial(mult, j)) * b.powi(j as i32);
        }
        if j >= 1 && j - 1 <= mult {
            acc = acc
                + a * R::from_count(crate::combo::binomial(mult, j - 1)) * b.powi(j as i32 - 1);
        }
        acc
    };
    let p = |j: usize| -> R { sigma(j) / R::from_count(crate::combo::binomial(m, j)) };
    match law {
        SpeedLaw::InverseP1 => {
            let p1 = p(1);
            if p1 <= eps_div {
                return Err(Error::DivisionBySmall {
                    what: "p_1",
                    value: p1.approx_f64(),
                });
            }
            Ok(p1.recip())
        }
        SpeedLaw::PRatio => {
            let p_hi = p(2 * k);
            if p_hi <= eps_div {
                return Err(Error::DivisionBySmall {
                    what: "p_{2k}",
                    value: p_hi.approx_f64(),
                });
            }
            Ok(p(2 * k - 1) / p_hi)
        }
    }
}

/// Exact radius of a geodesic sphere under either speed law:
/// `rho_dot = tanh(rho)`, hence `sinh(rho(t)) = sinh(rho_0) e^t`.
pub fn sphere_radius_at<R: Real>(rho0: R, t: R) -> R {
    (rho0.sinh() * t.exp()).asinh()
}

/// Radial velocities `F v` for the surface with samples `r`, written into
/// `out`. `scratch` holds the lean frames.
fn velocity_field<R: Real>(
    surface: &mut GraphHypersurface<R>,
    r: &[R],
    cfg: &FlowConfig<R>,
    scratch: &mut Vec<LeanFrame<R>>,
    out: &mut Vec<R>,
    t: R,
) -> Result<()> {
    if r.iter().any(|x| !x.is_finite() || *x <= R::zero()) {
        return Err(Error::GraphDegenerate {
            t: t.approx_f64(),
            reason: "radius became non-positive or non-finite".into(),
        });
    }
    surface
        .set_radial_samples(r.to_vec())
        .map_err(|e| Error::GraphDegenerate {
            t: t.approx_f64(),
            reason: e.to_string(),
        })?;
    surface.lean_frames_into(scratch)?;
    out.clear();
    for lf in scratch.iter() {
        out.push(lf.v * lean_speed(lf, cfg.k, cfg.speed, cfg.eps_div)?);
    }
    Ok(())
}

/// One classical RK4 update of the sample vector.
fn rk4<R: Real>(
    surface: &mut GraphHypersurface<R>,
    r0: &[R],
    dt: R,
    cfg: &FlowConfig<R>,
    scratch: &mut Vec<LeanFrame<R>>,
    t: R,
) -> Result<Vec<R>> {
    let n = r0.len();
    let mut k1 = Vec::with_capacity(n);
    let mut k2 = Vec::with_capacity(n);
    let mut k3 = Vec::with_capacity(n);
    let mut k4 = Vec::with_capacity(n);
    let mut stage = vec![R::zero(); n];

    velocity_field(surface, r0, cfg, scratch, &mut k1, t)?;
    let half = dt / R::from_f(2.0);
    for i in 0..n {
        stage[i] = r0[i] + half * k1[i];
    }
    velocity_field(surface, &stage, cfg, scratch, &mut k2, t)?;
    for i in 0..n {
        stage[i] = r0[i] + half * k2[i];
    }
    velocity_field(surface, &stage, cfg, scratch, &mut k3, t)?;
    for i in 0..n {
        stage[i] = r0[i] + dt * k3[i];
    }
    velocity_field(surface, &stage, cfg, scratch, &mut k4, t)?;
    let sixth = dt / R::from_f(6.0);
    let two = R::from_f(2.0);
    Ok((0..n)
        .map(|i| r0[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect())
}

/// Advances the state by one accepted step. Returns the local truncation
/// estimate (zero in fixed-step mode).
pub fn step<R: Real>(state: &mut FlowState<R>, cfg: &FlowConfig<R>) -> Result<R> {
    let r0: Vec<R> = state
        .surface
        .radial_samples()
        .expect("validated in FlowState::new")
        .to_vec();
    let mut scratch = Vec::new();
    let mut speeds = Vec::new();

    // CFL-style cap from the current velocity field.
    velocity_field(
        &mut state.surface,
        &r0,
        cfg,
        &mut scratch,
        &mut speeds,
        state.t,
    )?;
    let vmax = speeds.iter().fold(R::zero(), |a, &b| a.max(b.abs()));
    let spacing = state.surface.min_node_spacing();
    let cap = if vmax > R::zero() && spacing.is_finite() {
        cfg.cfl * spacing / vmax
    } else {
        R::from_f(1e-2)
    };

    match cfg.dt {
        DtControl::Fixed(dt) => {
            let mut r1 = rk4(&mut state.surface, &r0, dt, cfg, &mut scratch, state.t)?;
            apply_tail_damping(&mut r1, cfg.spectral_filter);
            state
                .surface
                .set_radial_samples(r1)
                .map_err(|e| Error::GraphDegenerate {
                    t: state.t.approx_f64(),
                    reason: e.to_string(),
                })?;
            state.t = state.t + dt;
            state.dt_current = dt;
            Ok(R::zero())
        }
        DtControl::Adaptive { rel_tol, safety } => {
            let mut dt = if state.dt_current > R::zero() {
                state.dt_current.min(cap)
            } else {
                cap.min(R::from_f(1e-3))
            };
            loop {
                if dt < cfg.dt_floor {
                    return Err(Error::StepRejected {
                        t: state.t.approx_f64(),
                        floor: cfg.dt_floor.approx_f64(),
                    });
                }
                // Full step vs two half steps. A trial that drives the
                // graph into garbage (negative radii, sign-flipped
                // curvature quotients) counts as a rejection, not an abort.
                let half_dt = dt / R::from_f(2.0);
                let attempt = rk4(&mut state.surface, &r0, dt, cfg, &mut scratch, state.t)
                    .and_then(|full| {
                        let mid =
                            rk4(&mut state.surface, &r0, half_dt, cfg, &mut scratch, state.t)?;
                        let fine =
                            rk4(&mut state.surface, &mid, half_dt, cfg, &mut scratch, state.t)?;
                        Ok((full, fine))
                    });
                let (full, fine) = match attempt {
                    Ok(pair) => pair,
                    Err(Error::DivisionBySmall { .. }) | Err(Error::GraphDegenerate { .. }) => {
                        dt = half_dt;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let mut err = R::zero();
                let mut scale = R::one();
                for i in 0..r0.len() {
                    err = err.max((full[i] - fine[i]).abs());
                    scale = scale.max(fine[i].abs());
                }
                // Richardson: RK4 doubling error estimate.
                let est = err / R::from_f(15.0);
                let tol = rel_tol * scale;
                if est <= tol {
                    let mut fine = fine;
                    apply_tail_damping(&mut fine, cfg.spectral_filter);
                    state
                        .surface
                        .set_radial_samples(fine)
                        .map_err(|e| Error::GraphDegenerate {
                            t: state.t.approx_f64(),
                            reason: e.to_string(),
                        })?;
                    state.t = state.t + dt;
                    state.trunc_since_record = state.trunc_since_record + est;
                    // Controller: grow gently, never past the CFL cap.
                    let ratio = if est > R::zero() {
                        (tol / est).powf(R::from_f(0.2))
                    } else {
                        R::from_f(2.0)
                    };
                    let growth = ratio.min(R::from_f(2.0)).max(R::from_f(0.3));
                    state.dt_current = (safety * growth * dt).min(cap);
                    return Ok(est);
                }
                dt = dt / R::from_f(2.0);
            }
        }
    }
}

/// Full diagnostics of the current state.
pub fn diagnostics<R: Real>(
    state: &FlowState<R>,
    cfg: &FlowConfig<R>,
) -> Result<DiagnosticsRecord> {
    let surface = &state.surface;
    let n = surface.ambient_dim();
    let m = n - 1;
    let k = state.k;
    let ints = surface.curvature_integrals()?;
    let lk_factor = crate::symfunc::gauss_bonnet_factor(m, k) as f64;
    let area = ints.area.approx_f64();
    let ltilde = ints.tilde_l[k].approx_f64();
    let lk = lk_factor * ltilde;
    let alpha = (m - 2 * k) as f64 / m as f64;
    let q = area.powf(-alpha) * lk;

    // Pointwise flux integrals for the analytic identities.
    let flux = surface.integrate_with(|fr| {
        let tbl = fr.sym_table(n);
        let f = radial_speed(fr, n, k, cfg.speed, cfg.eps_div).unwrap_or(R::zero());
        *tbl.p(1).expect("p1") * f
    })?;
    let dlog_area_dt = (m as f64) * flux.approx_f64() / area;
    let ntilde_flux = surface.integrate_with(|fr| {
        let tbl = fr.sym_table(n);
        let f = radial_speed(fr, n, k, cfg.speed, cfg.eps_div).unwrap_or(R::zero());
        tbl.tilde_n(k).map(|t| t * f).unwrap_or(R::zero())
    })?;
    let evolution_rhs = (m as f64 - 2.0 * k as f64) * ntilde_flux.approx_f64();

    let frames = surface.frames()?;
    let mut umbilicity = 0.0f64;
    let mut kappa_min = f64::INFINITY;
    for fr in &frames {
        for kap in &fr.kappa {
            let kf = kap.approx_f64();
            umbilicity = umbilicity.max((kf - 1.0).abs());
            kappa_min = kappa_min.min(kf);
        }
    }

    let w_odd = surface
        .quermass(QuermassRoute::TildeSum)?
        .w(2 * k + 1)
        .map(|w| w.approx_f64())
        .unwrap_or(f64::NAN);

    Ok(DiagnosticsRecord {
        t: state.t.approx_f64(),
        q,
        area,
        dlog_area_dt,
        lk_integral: lk,
        ltilde_integral: ltilde,
        evolution_rhs,
        sigma_integrals: ints.sigma.iter().map(|s| s.approx_f64()).collect(),
        w_odd,
        umbilicity,
        kappa_min,
        trunc_estimate: 0.0,
    })
}

/// Result of a completed run.
#[derive(Debug)]
pub struct FlowRun<R: Real> {
    pub state: FlowState<R>,
    pub stopped: StopReason,
}

/// Runs the flow to `t_end` (or an earlier stop criterion), recording
/// diagnostics at the configured cadence and enforcing Q-monotonicity within
/// the truncation-tied band.
pub fn run<R: Real>(surface: GraphHypersurface<R>, cfg: &FlowConfig<R>) -> Result<FlowRun<R>> {
    let mut state = FlowState::new(surface, cfg)?;
    let mut record = diagnostics(&state, cfg)?;
    check_hconvexity(&mut state, &record, cfg);
    state.history.push(record.clone());
    let mut next_record = cfg.record_every;
    let mut stopped = StopReason::TimeReached;

    while state.t < cfg.t_end {
        step(&mut state, cfg)?;
        if state.t >= next_record || state.t >= cfg.t_end {
            let mut new_record = diagnostics(&state, cfg)?;
            new_record.trunc_estimate = state.trunc_since_record.approx_f64();
            state.trunc_since_record = R::zero();
            check_hconvexity(&mut state, &new_record, cfg);

            if cfg.enforce_q_monotonicity {
                let band = q_band(&record, &new_record, state.surface.dim(), state.quad_rel_est);
                if new_record.q > record.q + band {
                    return Err(Error::MonotonicityViolated {
                        t: new_record.t,
                        detail: format!(
                            "Q rose from {:.12e} to {:.12e}, band {band:.3e}; history len {}",
                            record.q,
                            new_record.q,
                            state.history.len()
                        ),
                    });
                }
            }
            record = new_record.clone();
            state.history.push(new_record);
            next_record = next_record + cfg.record_every;
            if let Some(stop) = cfg.stop_umbilicity {
                if R::from_f(record.umbilicity) < stop {
                    stopped = StopReason::UmbilicityReached;
                    break;
                }
            }
        }
    }
    Ok(FlowRun { state, stopped })
}

/// Monotonicity band: ten times the local error estimate propagated to Q.
/// The estimate combines the time-truncation budget (through a dimensional
/// sensitivity factor) with the spatial quadrature scale of the run, so grid
/// refinement and step tightening both shrink the band.
fn q_band(prev: &DiagnosticsRecord, next: &DiagnosticsRecord, dim: usize, quad_rel: f64) -> f64 {
    let q_scale = prev.q.abs().max(next.q.abs());
    let sensitivity = 10.0 * dim as f64;
    10.0 * (sensitivity * next.trunc_estimate + quad_rel) * q_scale + 1e-10 * q_scale
}

/// Nearest-neighbor blend damping the highest grid modes of the profile.
fn apply_tail_damping<R: Real>(r: &mut [R], strength: Option<R>) {
    let Some(theta) = strength else { return };
    let n = r.len();
    if n < 3 {
        return;
    }
    let half = R::from_f(0.5);
    let prev: Vec<R> = r.to_vec();
    for i in 0..n {
        let left = prev[i.saturating_sub(1)];
        let right = prev[(i + 1).min(n - 1)];
        let avg = (left + right) * half;
        r[i] = prev[i] + theta * (avg - prev[i]);
    }
}

fn check_hconvexity<R: Real>(
    state: &mut FlowState<R>,
    record: &DiagnosticsRecord,
    cfg: &FlowConfig<R>,
) {
    if record.kappa_min < 1.0 - cfg.hconvex_tol.approx_f64() {
        state.hconvex_warnings += 1;
    }
}

#[cfg(test)]
mod tests;
