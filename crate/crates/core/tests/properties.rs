//! Randomized invariants of the model, load, incremental and viscosity layers.

use bvsweep::incremental::step::StepProblem;
use bvsweep::incremental::{
    check_basic_estimates, check_discrete_edp, estimate_constants, incremental_step,
    solve_trajectory, Partition, SolveOptions, StepOptions,
};
use bvsweep::load::kurzweil::{bv_dg_bound, bv_dg_on, cont_dstep_bound, cont_dstep_on};
use bvsweep::load::{BvLoad, JumpValue, PiecewiseLinearCurve, Segment};
use bvsweep::model::{Dissipation, Nonlinearity, SemilinearEnergy, SpdOperator, System};
use bvsweep::run::config::{parse, parse_eps, parse_mesh};
use bvsweep::viscosity::{certify, reparameterize, CertifyOptions, MeshRule, DEFAULT_SUB_NODES};
use proptest::prelude::*;

const HORIZON: f64 = 1.0;

/// `B B^T + shift I` is symmetric positive definite for any `B`.
fn spd(n: usize, shift: f64) -> impl Strategy<Value = SpdOperator> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |b| {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            m[i * n + i] += shift;
        }
        SpdOperator::new(n, m).unwrap()
    })
}

fn vector(n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, n)
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1..2.0f64, n)
}

fn nonlinearity() -> impl Strategy<Value = Nonlinearity> {
    prop_oneof![
        Just(Nonlinearity::None),
        (0.05..1.0f64).prop_map(|scale| Nonlinearity::DoubleWell { scale }),
        (0.05..1.0f64).prop_map(|scale| Nonlinearity::QuarticNorm { scale }),
    ]
}

fn convex_nonlinearity() -> impl Strategy<Value = Nonlinearity> {
    prop_oneof![
        Just(Nonlinearity::None),
        (0.05..1.0f64).prop_map(|scale| Nonlinearity::QuarticNorm { scale }),
    ]
}

/// Up to four constant or affine pieces on `[0, HORIZON]` with mixed jump
/// designations.
fn load(n: usize) -> impl Strategy<Value = BvLoad> {
    (1..=4usize)
        .prop_flat_map(move |pieces| {
            (
                prop::collection::vec(0.2..1.0f64, pieces),
                prop::collection::vec((any::<bool>(), vector(n, 2.0), vector(n, 2.0)), pieces),
                prop::collection::vec((0..3u8, vector(n, 2.0)), pieces - 1),
            )
        })
        .prop_map(|(lengths, segs, jumps)| {
            let total: f64 = lengths.iter().sum();
            let mut bp = vec![0.0];
            let mut acc = 0.0;
            for l in &lengths[..lengths.len() - 1] {
                acc += l / total * HORIZON;
                bp.push(acc);
            }
            bp.push(HORIZON);
            let segments = segs
                .into_iter()
                .map(|(affine, a, b)| {
                    if affine {
                        Segment::Affine { start: a, slope: b }
                    } else {
                        Segment::Constant { value: a }
                    }
                })
                .collect();
            let at_jump = jumps
                .into_iter()
                .map(|(k, v)| match k {
                    0 => JumpValue::Left,
                    1 => JumpValue::Right,
                    _ => JumpValue::Explicit { value: v },
                })
                .collect();
            BvLoad::new(bp, segments, at_jump).unwrap()
        })
}

fn lipschitz_curve(n: usize) -> impl Strategy<Value = PiecewiseLinearCurve> {
    (2..=6usize)
        .prop_flat_map(move |k| {
            (
                prop::collection::vec(0.1..1.0f64, k - 1),
                prop::collection::vec(vector(n, 2.0), k),
            )
        })
        .prop_map(|(lengths, values)| {
            let total: f64 = lengths.iter().sum();
            let mut grid = vec![0.0];
            let mut acc = 0.0;
            for l in &lengths {
                acc += l / total * HORIZON;
                grid.push(acc);
            }
            *grid.last_mut().unwrap() = HORIZON;
            PiecewiseLinearCurve::new(grid, values).unwrap()
        })
}

fn system(n: usize, f: impl Strategy<Value = Nonlinearity>) -> impl Strategy<Value = System> {
    (spd(n, 0.5), spd(n, 0.5), weights(n), f, load(n)).prop_map(|(a, v, w, f, l)| {
        System::new(
            SemilinearEnergy::new(a, f, l).unwrap(),
            Dissipation::weighted_l1(w).unwrap(),
            v,
        )
        .unwrap()
    })
}

fn dims() -> impl Strategy<Value = usize> {
    1..=3usize
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dissipation_is_positively_one_homogeneous(
        (w, v) in dims().prop_flat_map(|n| (weights(n), vector(n, 10.0))),
        lambda in 0.0..100.0f64,
    ) {
        let r = Dissipation::weighted_l1(w).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| lambda * x).collect();
        let lhs = r.value(&scaled);
        let rhs = lambda * r.value(&v);
        prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.max(1e-300) * v.len() as f64);
    }

    #[test]
    fn contact_potential_is_below_the_viscous_fenchel_young_bound(
        (metric, w, v, sigma) in dims().prop_flat_map(|n| (spd(n, 0.2), weights(n), vector(n, 3.0), vector(n, 6.0))),
        eps in 1e-3..10.0f64,
    ) {
        let r = Dissipation::weighted_l1(w).unwrap();
        let p = r.contact_potential(&metric, &v, &sigma).unwrap();
        let bound = r.viscous_value(&metric, eps, &v) + r.conjugate_viscous(&metric, eps, &sigma).unwrap();
        prop_assert!(p <= bound + 1e-12 * (1.0 + bound), "{p} > {bound}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projection_satisfies_the_variational_inequality(
        (metric, w, sigma, probes) in (2..=4usize).prop_flat_map(|n| (
            spd(n, 0.1),
            weights(n),
            vector(n, 6.0),
            prop::collection::vec(vector(n, 1.0), 100),
        )),
    ) {
        let r = Dissipation::weighted_l1(w.clone()).unwrap();
        let proj = r.dist(&metric, &sigma).unwrap();
        prop_assert!(r.contains(&proj.point, 1e-12));
        let g = metric.solve(&sub(&sigma, &proj.point));
        for u in &probes {
            let xi: Vec<f64> = u.iter().zip(&w).map(|(x, r)| x * r).collect();
            let vi = dot(&g, &sub(&xi, &proj.point));
            prop_assert!(vi <= 1e-10, "variational inequality violated by {vi:e}");
        }
    }

    #[test]
    fn coercivity_with_the_logged_offset(
        (energy, metric, v) in dims().prop_flat_map(|n| (
            (spd(n, 0.3), nonlinearity(), load(n)).prop_map(|(a, f, l)| SemilinearEnergy::new(a, f, l).unwrap()),
            spd(n, 0.3),
            vector(n, 20.0),
        )),
        t in 0.0..HORIZON,
    ) {
        let emb = energy.embedding(&metric);
        let c0 = energy.coercivity_offset(&metric);
        let e = energy.energy(t, &v).unwrap();
        prop_assert!(e + c0 >= emb.c_z * energy.operator().norm(&v) - 1e-10);
    }

    #[test]
    fn interpolation_estimate_on_the_calibrated_ball(
        (energy, metric, w, u1, u2) in dims().prop_flat_map(|n| (
            (spd(n, 0.3), nonlinearity(), load(n)).prop_map(|(a, f, l)| SemilinearEnergy::new(a, f, l).unwrap()),
            spd(n, 0.3),
            weights(n),
            vector(n, 1.0),
            vector(n, 1.0),
        )),
        rho in 0.1..3.0f64,
    ) {
        let r = Dissipation::weighted_l1(w).unwrap();
        let cal = energy.calibrate(&metric, &r, rho);
        // Pull both points into the A-ball of radius rho.
        let into_ball = |u: &[f64]| -> Vec<f64> {
            let norm = energy.operator().norm(u);
            if norm <= rho { u.to_vec() } else { u.iter().map(|x| x * rho / norm).collect() }
        };
        let (z1, z2) = (into_ball(&u1), into_ball(&u2));
        let (lhs, rhs) = energy.interpolation_probe(&metric, &r, &cal, &z1, &z2);
        prop_assert!(lhs <= rhs + 1e-10, "{lhs:e} > {rhs:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gradient_matches_central_differences(
        (energy, z) in dims().prop_flat_map(|n| (
            (spd(n, 0.3), nonlinearity(), load(n)).prop_map(|(a, f, l)| SemilinearEnergy::new(a, f, l).unwrap()),
            vector(n, 2.0),
        )),
        t in 0.0..HORIZON,
    ) {
        let g = energy.grad(t, &z).unwrap();
        let scale = 1.0 + g.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for i in 0..z.len() {
            let h = 1e-5 * (1.0 + z[i].abs());
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[i] += h;
            zm[i] -= h;
            let fd = (energy.energy(t, &zp).unwrap() - energy.energy(t, &zm).unwrap()) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-6 * scale, "component {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn kurzweil_bounds_hold_with_both_arguments(
        (metric, f, g, c) in dims().prop_flat_map(|n| (spd(n, 0.3), load(n), lipschitz_curve(n), lipschitz_curve(n))),
    ) {
        let b = bv_dg_bound(&f, &g, &metric).unwrap();
        prop_assert!(b.holds(), "{b:?}");
        prop_assert!(b.sup_times_variation.is_finite() && b.endpoints_times_sup.is_finite());
        let b = cont_dstep_bound(&c, &f, &metric).unwrap();
        prop_assert!(b.holds(), "{b:?}");
        prop_assert!(b.sup_times_variation.is_finite() && b.endpoints_times_sup.is_finite());
    }

    #[test]
    fn integrals_are_interval_additive(
        (metric, f, g) in dims().prop_flat_map(|n| (spd(n, 0.3), load(n), lipschitz_curve(n))),
        cuts in (0.0..HORIZON, 0.0..HORIZON, 0.0..HORIZON),
        snap in 0..3usize,
    ) {
        let mut p = [cuts.0, cuts.1, cuts.2];
        // Also split exactly at a jump, where the designated value matters.
        if snap > 0 && f.breakpoints().len() > 2 {
            p[1] = f.breakpoints()[1];
        }
        p.sort_by(f64::total_cmp);
        let [a, b, c] = p;
        let scale = |x: f64, y: f64, z: f64| 1e-12 * (1.0 + x.abs() + y.abs() + z.abs());

        let (x, y, z) = (bv_dg_on(&f, &g, a, b).unwrap(), bv_dg_on(&f, &g, b, c).unwrap(), bv_dg_on(&f, &g, a, c).unwrap());
        prop_assert!((x + y - z).abs() <= scale(x, y, z), "bv_dg: {x} + {y} != {z}");
        let (x, y, z) = (cont_dstep_on(&g, &f, a, b).unwrap(), cont_dstep_on(&g, &f, b, c).unwrap(), cont_dstep_on(&g, &f, a, c).unwrap());
        prop_assert!((x + y - z).abs() <= scale(x, y, z), "cont_dstep: {x} + {y} != {z}");
        let (x, y, z) = (f.variation(&metric, a, b), f.variation(&metric, b, c), f.variation(&metric, a, c));
        prop_assert!((x + y - z).abs() <= scale(x, y, z), "variation: {x} + {y} != {z}");
    }

    #[test]
    fn accepted_steps_are_minimal_against_perturbations(
        (sys, z_prev, kicks) in dims().prop_flat_map(|n| (
            system(n, convex_nonlinearity()),
            vector(n, 2.0),
            prop::collection::vec(vector(n, 0.5), 20),
        )),
        tau in 0.01..0.5f64,
        eps in 0.01..1.0f64,
        t in 0.0..HORIZON,
    ) {
        let options = StepOptions::default();
        let load = sys.load().at(t);
        let out = incremental_step(&sys, load.clone(), tau, eps, &z_prev, &z_prev, 0.0, &options, 1).unwrap();
        let problem = StepProblem::new(&sys, load, tau, eps, &z_prev);
        let best = problem.objective(&out.z);
        for k in &kicks {
            for scale in [1.0, 1e-3] {
                let v: Vec<f64> = out.z.iter().zip(k).map(|(z, d)| z + scale * d).collect();
                prop_assert!(best <= problem.objective(&v) + options.tol_inner);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discrete_estimates_and_curve_invariants(
        (sys, z0) in dims().prop_flat_map(|n| (system(n, convex_nonlinearity()), vector(n, 1.0))),
        eps in 0.05..0.5f64,
        steps in 8..40usize,
    ) {
        let partition = Partition::uniform(0.0, HORIZON, steps).unwrap();
        let traj = solve_trajectory(&sys, &partition, eps, &z0, &SolveOptions::default()).unwrap();

        // Both discrete energy-dissipation estimates, and the balance itself.
        let constants = estimate_constants(&sys, &z0, eps).unwrap();
        let ledger = check_basic_estimates(&sys, &traj, &constants);
        prop_assert!(ledger.all_pass(), "{:?}", ledger.violations());
        let edp = check_discrete_edp(&sys, &traj, 0.0).unwrap().entry();
        prop_assert!(edp.pass, "{edp:?}");

        let curve = reparameterize(&sys, &traj, DEFAULT_SUB_NODES).unwrap();
        prop_assert!(curve.t_hat.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(curve.s.windows(2).all(|w| w[0] < w[1]));

        let (certs, fields) = certify(&sys, &curve, &CertifyOptions::default()).unwrap();
        prop_assert!(certs.normalization <= 1e-6, "normalization {:e}", certs.normalization);
        let var_r: f64 = (1..curve.len()).map(|j| sys.dissipation.value(&sub(&curve.z_hat[j], &curve.z_hat[j - 1]))).sum();
        let integrated: f64 = (0..curve.len() - 1).map(|j| (curve.s[j + 1] - curve.s[j]) * fields.r_rate[j]).sum();
        prop_assert!((var_r - integrated).abs() <= 1e-12 * (1.0 + var_r));
    }
}

proptest! {
    #[test]
    fn mesh_rules_roundtrip(c in 1e-3..10.0f64, power in 1.0..3.0f64, short in any::<bool>()) {
        let key = if short { "p" } else { "power" };
        let text = format!(" c = {c} , {key}={power}");
        prop_assert_eq!(parse_mesh(1, &text).unwrap(), MeshRule { c, power });
    }

    #[test]
    fn eps_ladders_roundtrip_through_a_config(ladder in prop::collection::vec(1e-6..1.0f64, 1..6), seed in any::<u64>()) {
        let text = ladder.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
        prop_assert_eq!(parse_eps(1, &text).unwrap(), ladder.clone());
        let cfg = parse(&format!("[run]\nscenario = play1d\neps = {text}\nseed = {seed}\n")).unwrap();
        prop_assert_eq!(cfg.eps, Some(ladder));
        prop_assert_eq!(cfg.seed, seed);
    }
}
