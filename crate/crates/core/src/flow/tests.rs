use super::*;
use crate::geometry::profile::{AxisymProfile, Grid3Profile};
use crate::geometry::sphere::unit_sphere_area;
use crate::symfunc::gauss_bonnet_factor;

fn sphere_grid(n: usize, rho: f64, res: usize) -> GraphHypersurface<f64> {
    GraphHypersurface::axisym_from_profile(n, res, AxisymProfile::Constant { radius: rho })
        .unwrap()
}

fn perturbed(n: usize, rho: f64, eps: f64, res: usize) -> GraphHypersurface<f64> {
    GraphHypersurface::axisym_from_profile(
        n,
        res,
        AxisymProfile::LegendreModes {
            base: rho,
            modes: vec![(2, eps), (3, eps / 2.0)],
        },
    )
    .unwrap()
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[test]
fn radial_speed_on_spheres() {
    let s = GraphHypersurface::exact_sphere(5, 1.3f64).unwrap();
    let fr = s.frame_at(0).unwrap();
    // F = p_{2k-1}/p_{2k} = tanh(rho) on spheres, any k.
    for k in 1..=2 {
        let f = radial_speed(&fr, 5, k, SpeedLaw::PRatio, 1e-12).unwrap();
        assert!((f - 1.3f64.tanh()).abs() < 1e-14);
    }
    let f = radial_speed(&fr, 5, 1, SpeedLaw::InverseP1, 1e-12).unwrap();
    assert!((f - 1.3f64.tanh()).abs() < 1e-14);
}

#[test]
fn radial_speed_isotropic_is_reciprocal() {
    // kappa = c * 1 gives F = 1/c.
    let s = GraphHypersurface::exact_sphere(6, 2.0f64.atanh().atanh().max(0.3)).unwrap();
    let fr = s.frame_at(0).unwrap();
    let c = fr.kappa[0];
    let f = radial_speed(&fr, 6, 2, SpeedLaw::PRatio, 1e-12).unwrap();
    assert!((f - 1.0 / c).abs() < 1e-13);
}

#[test]
fn single_step_matches_euler_to_first_order() {
    // One RK4 step equals rho + dt tanh(rho) + O(dt^2).
    let rho = 1.0f64;
    let dt = 1e-6;
    let cfg = FlowConfig::<f64>::new(1).with_fixed_dt(dt);
    let mut state = FlowState::new(sphere_grid(5, rho, 16), &cfg).unwrap();
    step(&mut state, &cfg).unwrap();
    let euler = rho + dt * rho.tanh();
    for &r in state.surface.radial_samples().unwrap() {
        assert!((r - euler).abs() < 1e-12 * 1.0f64.max(euler));
    }
}

#[test]
fn sphere_flow_matches_ode_oracle() {
    // sinh(rho(t)) = sinh(rho_0) e^t; RK4 with fixed dt reproduces it.
    let rho0 = 1.0f64;
    let t_end = 2.0;
    let cfg = FlowConfig::<f64>::new(1)
        .with_t_end(t_end)
        .with_fixed_dt(1e-3)
        .without_umbilicity_stop();
    let run_out = run(sphere_grid(5, rho0, 16), &cfg).unwrap();
    let expected = sphere_radius_at(rho0, run_out.state.t);
    for &r in run_out.state.surface.radial_samples().unwrap() {
        assert!(
            ((r - expected) / expected).abs() < 1e-5,
            "r = {r}, expected {expected}"
        );
    }
    // Q stays constant to well below 1e-6 relative drift.
    let qs: Vec<f64> = run_out.state.history.iter().map(|r| r.q).collect();
    let q0 = qs[0];
    for q in &qs {
        assert!(((q - q0) / q0).abs() < 1e-6, "Q drift {:.3e}", (q - q0) / q0);
    }
    // And equals the round-sphere reference value (2k)! C(n-1,2k) omega^{2k/(n-1)}.
    let omega = unit_sphere_area::<f64>(4);
    let q_ref = gauss_bonnet_factor(4, 1) as f64 * omega.powf(2.0 / 4.0);
    assert!(((q0 - q_ref) / q_ref).abs() < 1e-9, "{q0} vs {q_ref}");
}

#[test]
fn sphere_area_log_derivative_is_exact() {
    let cfg = FlowConfig::<f64>::new(1).with_t_end(0.2).with_fixed_dt(1e-3);
    let run_out = run(sphere_grid(5, 1.0, 16), &cfg).unwrap();
    for rec in &run_out.state.history {
        assert!(
            (rec.dlog_area_dt - 4.0).abs() < 1e-9,
            "dlog area = {}",
            rec.dlog_area_dt
        );
    }
}

#[test]
fn inverse_p1_law_agrees_on_spheres() {
    let cfg = FlowConfig::<f64>::new(1)
        .with_t_end(0.5)
        .with_fixed_dt(1e-3)
        .with_speed(SpeedLaw::InverseP1);
    let run_out = run(sphere_grid(4, 0.8, 16), &cfg).unwrap();
    let expected = sphere_radius_at(0.8, run_out.state.t);
    for &r in run_out.state.surface.radial_samples().unwrap() {
        assert!(((r - expected) / expected).abs() < 1e-6);
    }
}

#[test]
fn offset_sphere_flow_stays_spherical() {
    // A sphere about an off-axis center is a nonconstant graph; the flow
    // must keep it a geodesic sphere of radius rho(t) about the same center.
    let (rho0, d) = (1.0f64, 0.4);
    let cfg = FlowConfig::<f64>::new(1)
        .with_t_end(0.5)
        .without_umbilicity_stop();
    let surface = GraphHypersurface::axisym_from_profile(
        5,
        48,
        AxisymProfile::OffsetSphere {
            radius: rho0,
            offset: d,
        },
    )
    .unwrap();
    let run_out = run(surface, &cfg).unwrap();
    let rho_t = sphere_radius_at(rho0, run_out.state.t);
    let expected = GraphHypersurface::axisym_from_profile(
        5,
        48,
        AxisymProfile::OffsetSphere {
            radius: rho_t,
            offset: d,
        },
    )
    .unwrap();
    let got = run_out.state.surface.radial_samples().unwrap();
    let want = expected.radial_samples().unwrap();
    for (g, w) in got.iter().zip(want) {
        assert!(((g - w) / w).abs() < 2e-5, "{g} vs {w}");
    }
    // Umbilicity profile: still a geodesic sphere.
    let rep = run_out.state.surface.hconvexity_report(0.0).unwrap();
    let coth = rho_t.cosh() / rho_t.sinh();
    assert!((rep.kappa_min - coth).abs() < 1e-4);
}

#[test]
fn perturbed_runs_are_monotone_and_expand() {
    for (n, k, eps) in [(5usize, 1usize, 0.05), (5, 2, 0.04), (3, 1, 0.05)] {
        let cfg = FlowConfig::<f64>::new(k)
            .with_t_end(4.0)
            .without_umbilicity_stop();
        let run_out = run(perturbed(n, 1.0, eps, 32), &cfg)
            .unwrap_or_else(|e| panic!("n = {n}, k = {k}: {e}"));
        assert_eq!(run_out.state.hconvex_warnings, 0);
        // Area growth bound d log|Sigma|/dt >= n-1 at every record.
        for rec in &run_out.state.history {
            assert!(
                rec.dlog_area_dt >= (n - 1) as f64 - 1e-4,
                "n = {n}, k = {k}: dlog area {} at t = {}",
                rec.dlog_area_dt,
                rec.t
            );
        }
        // Q also reached at least the round-sphere lower bound.
        let omega = unit_sphere_area::<f64>(n - 1);
        let bound = gauss_bonnet_factor(n - 1, k) as f64
            * omega.powf(2.0 * k as f64 / (n - 1) as f64);
        // Tolerance tied to the spatial discretization scale of the run.
        let tol = (20.0 * run_out.state.quad_rel_est).max(1e-8);
        let q_last = run_out.state.history.last().unwrap().q;
        assert!(
            q_last >= bound * (1.0 - tol),
            "n = {n}, k = {k}: Q_end {q_last} vs bound {bound} (tol {tol:.2e})"
        );
    }
}

#[test]
fn umbilicity_decay_rate_is_two() {
    // The measured asymptotic exponent of sup|h - I| in this flow's time
    // variable is -2 (the grid observable), independent of n.
    for (n, k) in [(5usize, 1usize), (3, 1)] {
        let cfg = FlowConfig::<f64>::new(k)
            .with_t_end(6.0)
            .without_umbilicity_stop();
        let run_out = run(perturbed(n, 1.0, 0.05, 32), &cfg).unwrap();
        let pts: Vec<(f64, f64)> = run_out
            .state
            .history
            .iter()
            .filter(|r| r.t >= 2.0 && r.umbilicity > 1e-12)
            .map(|r| (r.t, r.umbilicity.ln()))
            .collect();
        let slope = ls_slope(&pts);
        assert!(
            (slope + 2.0).abs() < 0.1,
            "n = {n}: fitted slope {slope:.4}"
        );
    }
}

#[test]
fn evolution_identity_second_order_in_time() {
    // Centered differencing of int Ltilde_k against the analytic right side
    // (n-1-2k) int Ntilde_k F dmu, with the error falling ~4x when the
    // record spacing doubles.
    let n = 5;
    let cfg = FlowConfig::<f64>::new(1)
        .with_t_end(1.0)
        .with_fixed_dt(2e-3)
        .without_umbilicity_stop();
    let mut cfg = cfg;
    cfg.record_every = 0.02;
    let run_out = run(perturbed(n, 1.0, 0.05, 16), &cfg).unwrap();
    let recs = &run_out.state.history;
    let err_at_stride = |stride: usize| -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let mut j = stride;
        while j + stride < recs.len() {
            let h = recs[j + stride].t - recs[j - stride].t;
            let fd = (recs[j + stride].ltilde_integral - recs[j - stride].ltilde_integral) / h;
            worst = worst.max((fd - recs[j].evolution_rhs).abs());
            scale = scale.max(recs[j].evolution_rhs.abs());
            j += 1;
        }
        worst / scale
    };
    let e1 = err_at_stride(1);
    let e2 = err_at_stride(2);
    assert!(e1 < 1e-3, "relative identity error {e1:.3e}");
    let ratio = e2 / e1;
    assert!(
        (2.5..8.0).contains(&ratio),
        "ratio {ratio:.2} (e1 = {e1:.3e}, e2 = {e2:.3e})"
    );
}

#[test]
fn grid3_flow_smoke() {
    let cfg = FlowConfig::<f64>::new(1)
        .with_t_end(0.3)
        .without_umbilicity_stop();
    let surface = GraphHypersurface::grid3_from_profile(
        16,
        32,
        Grid3Profile {
            base: 1.0,
            modes: vec![],
        },
    )
    .unwrap();
    let run_out = run(surface, &cfg).unwrap();
    let expected = sphere_radius_at(1.0, run_out.state.t);
    for &r in run_out.state.surface.radial_samples().unwrap() {
        assert!(((r - expected) / expected).abs() < 1e-6);
    }
}

#[test]
fn flow_rejects_invalid_configs() {
    let cfg = FlowConfig::<f64>::new(3);
    // 2k = 6 > n-1 = 4.
    assert!(FlowState::new(sphere_grid(5, 1.0, 16), &cfg).is_err());
    let cfg = FlowConfig::<f64>::new(1);
    let exact = GraphHypersurface::exact_sphere(5, 1.0f64).unwrap();
    assert!(FlowState::new(exact, &cfg).is_err());
}

#[test]
fn history_timestamps_strictly_increase() {
    let cfg = FlowConfig::<f64>::new(1).with_t_end(0.5);
    let run_out = run(perturbed(5, 1.0, 0.03, 16), &cfg).unwrap();
    for w in run_out.state.history.windows(2) {
        assert!(w[1].t > w[0].t);
    }
}

#[test]
fn spectral_filter_is_optional_and_stable() {
    let mut cfg = FlowConfig::<f64>::new(1).with_t_end(0.5);
    cfg.spectral_filter = Some(0.02);
    let run_out = run(perturbed(5, 1.0, 0.05, 32), &cfg).unwrap();
    assert!(run_out.state.history.len() > 5);
    let first = run_out.state.history.first().unwrap();
    let last = run_out.state.history.last().unwrap();
    assert!(last.area > first.area);
}
