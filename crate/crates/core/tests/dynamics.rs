mod common;

use common::{loglog_slope, simpson};
use qtraj::dynamics::momentum_along;
use qtraj::sampling::make_initial_conditions;
use qtraj::wavefield::{p_bb, rho};
use qtraj::{integrate, DoubleSlitParams, InitialCondition, IntegrationSchedule, Theory, TrajectoryStatus};
use rayon::prelude::*;

fn params() -> DoubleSlitParams {
    DoubleSlitParams::jonsson()
}

fn bohm(x0: f64) -> InitialCondition {
    InitialCondition { x0, p0: 0.0, t0: 0.0, theory: Theory::Dbb }
}

/// F(x, t) by direct Simpson quadrature of |psi|^2 from far in the left tail.
fn cdf(x: f64, t: f64, p: &DoubleSlitParams) -> f64 {
    let lo = -(p.x_half + 14.0 * p.width(t));
    if x <= lo {
        return 0.0;
    }
    simpson(&|y| rho(y, t, p), lo, x, 1e-13)
}

fn end_point(ic: &InitialCondition, t_final: f64, dt: f64, p: &DoubleSlitParams) -> f64 {
    let mut s = IntegrationSchedule::for_params(p, 0.0, t_final, dt);
    // keep the step fixed so only dt_base controls the error
    s.max_step = f64::INFINITY;
    s.record_stride = usize::MAX;
    let traj = integrate(ic, &s, p);
    assert_eq!(traj.status, TrajectoryStatus::Completed);
    traj.samples.last().unwrap().x
}

#[test]
fn rk4_converges_at_fourth_order() {
    let p = params();
    let ic = bohm(40.0);
    let dts = [0.1, 0.05, 0.025, 0.0125];
    let reference = end_point(&ic, 5.0, dts[3] / 64.0, &p);
    let errors: Vec<f64> = dts.iter().map(|&dt| (end_point(&ic, 5.0, dt, &p) - reference).abs()).collect();
    let slope = loglog_slope(&dts, &errors);
    assert!((slope - 4.0).abs() < 0.3, "slope {slope}, errors {errors:?}");
}

#[test]
fn bohm_start_is_quadratic_in_time() {
    // the initial velocity vanishes, so the first displacement is O(dt^2)
    let p = params();
    let ic = bohm(44.0);
    let d1 = end_point(&ic, 0.02, 0.02, &p) - 44.0;
    let d2 = end_point(&ic, 0.01, 0.01, &p) - 44.0;
    let ratio = d1 / d2;
    assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn bohm_flow_preserves_ordering() {
    let p = params();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    let mut ics = make_initial_conditions(1000, 11, &p, 0.0, Theory::Dbb).unwrap();
    ics.sort_by(|a, b| a.x0.total_cmp(&b.x0));
    ics.dedup_by(|a, b| a.x0 == b.x0);
    assert_eq!(ics.len(), 1000);
    let trajs: Vec<_> = ics.par_iter().map(|ic| integrate(ic, &schedule, &p)).collect();
    assert!(trajs.iter().all(|t| t.status == TrajectoryStatus::Completed));
    let n_samples = trajs[0].samples.len();
    for k in 0..n_samples {
        for pair in trajs.windows(2) {
            assert!(pair[0].samples[k].x < pair[1].samples[k].x, "ordering broken at sample {k}");
        }
    }
    for tr in &trajs {
        let side = tr.ic.x0.signum();
        assert!(tr.samples.iter().all(|s| s.x.signum() == side));
    }
}

#[test]
fn bohm_trajectories_follow_quantiles() {
    let p = params();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    for x0 in [-63.0, 5.0, 38.0, 50.0, 71.0] {
        let traj = integrate(&bohm(x0), &schedule, &p);
        let u0 = cdf(x0, 0.0, &p);
        for s in traj.samples.iter().step_by(5) {
            let drift = cdf(s.x, s.t, &p) - u0;
            assert!(drift.abs() < 1e-8, "x0 {x0} t {} drift {drift}", s.t);
        }
    }
}

#[test]
fn revised_trajectories_follow_quantile_drift() {
    // along a revised path dF/dt = (p0 - p_bb0) rho(x0, t) / m
    let p = params();
    let sp = p.sigma_p();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    for (x0, p0) in [(45.0, 0.3 * sp), (52.0, -0.4 * sp), (-48.0, 0.25 * sp), (-60.0, 0.1 * sp)] {
        let ic = InitialCondition { x0, p0, t0: 0.0, theory: Theory::Revised };
        let traj = integrate(&ic, &schedule, &p);
        assert_eq!(traj.status, TrajectoryStatus::Completed);
        let excess = p0 - p_bb(x0, 0.0, &p).unwrap();
        let u0 = cdf(x0, 0.0, &p);
        for s in traj.samples.iter().step_by(5).skip(1) {
            let flux = simpson(&|tt| rho(x0, tt, &p), 0.0, s.t, 1e-14);
            let predicted = excess / p.units.mass * flux;
            let observed = cdf(s.x, s.t, &p) - u0;
            assert!(
                (observed - predicted).abs() < 1e-8,
                "x0 {x0} t {}: observed {observed}, predicted {predicted}",
                s.t
            );
        }
    }
}

#[test]
fn revised_kick_carries_particle_outward() {
    let p = params();
    let x0 = p.x_half;
    let ic = InitialCondition { x0, p0: 4.0 * p.sigma_p(), t0: 0.0, theory: Theory::Revised };
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    let traj = integrate(&ic, &schedule, &p);
    assert!(traj.samples.len() > 2);
    assert!(traj.samples.last().unwrap().x > x0);
    assert!(traj.samples.windows(2).all(|w| w[1].x > w[0].x));
}

#[test]
fn recorded_momenta_match_the_field() {
    let p = params();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    let ic = InitialCondition { x0: 47.0, p0: 0.2 * p.sigma_p(), t0: 0.0, theory: Theory::Revised };
    let traj = integrate(&ic, &schedule, &p);
    let again = momentum_along(&traj, Theory::Revised, &ic, &p).unwrap();
    assert_eq!(traj.samples[0].p, ic.p0);
    for (s, q) in traj.samples.iter().zip(&again).skip(1) {
        assert_eq!(s.p, *q);
    }
}

#[test]
fn record_grid_is_exact() {
    let p = params();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    let traj = integrate(&bohm(30.0), &schedule, &p);
    assert_eq!(traj.samples.len(), 51);
    for (k, s) in traj.samples.iter().enumerate() {
        assert_eq!(s.t, schedule.grid_time(10 * k));
    }
    assert_eq!(traj.samples[35].t, 3.5);
    assert_eq!(traj.end_time(), 5.0);
}

#[test]
fn integration_is_deterministic() {
    let p = params();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    let ic = InitialCondition { x0: -41.0, p0: -0.7 * p.sigma_p(), t0: 0.0, theory: Theory::Revised };
    let a = integrate(&ic, &schedule, &p);
    let b = integrate(&ic, &schedule, &p);
    assert_eq!(a, b);
}

#[test]
fn axis_is_a_fixed_point_of_the_bohm_flow() {
    let p = params();
    let schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    let traj = integrate(&bohm(0.0), &schedule, &p);
    assert_eq!(traj.status, TrajectoryStatus::Completed);
    assert!(traj.samples.iter().all(|s| s.x == 0.0 && s.p == 0.0));
}

#[test]
fn leaving_the_domain_is_reported() {
    let p = params();
    let mut schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    schedule.domain_bound = 60.0;
    let ic = InitialCondition { x0: 55.0, p0: 3.0 * p.sigma_p(), t0: 0.0, theory: Theory::Revised };
    let traj = integrate(&ic, &schedule, &p);
    assert_eq!(traj.status, TrajectoryStatus::ExitedDomain);
    let last = traj.samples.last().unwrap();
    assert!(last.x > 60.0 && last.t < 5.0);
}

#[test]
fn refusing_to_refine_stalls_inside_the_slits() {
    let p = params();
    let mut schedule = IntegrationSchedule::for_params(&p, 0.0, 5.0, 0.01);
    schedule.max_step = 1e-9;
    schedule.dt_min = schedule.dt_base;
    let ic = InitialCondition { x0: 10.0, p0: -p.sigma_p(), t0: 0.0, theory: Theory::Revised };
    let traj = integrate(&ic, &schedule, &p);
    assert_eq!(traj.status, TrajectoryStatus::NodeStalled);
    assert_eq!(traj.samples.len(), 1);
}
