//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any criterion fails.

use orient_core::magnus::first_order_wavepacket;
use orient_core::optimum::revival_amplitude;
use orient_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

const OPTIMUM: f64 = 0.7746;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn model() -> RotorModel {
    RotorModel::default()
}

fn narrow() -> DesignPoint {
    DesignPoint::default()
}

fn condition_field(branch: Branch, point: DesignPoint, m: &RotorModel) -> FieldConfig {
    point.field(&condition_amplitudes(branch, 0).unwrap().targets(), m).unwrap()
}

fn lagrange_optimum_value() -> Outcome {
    let m = model();
    let sol = lagrange_optimum(m.cos_element(0), m.cos_element(1)).unwrap();
    let expected = [0.278, 0.5, 0.222];
    let pops_ok = sol.populations.iter().zip(expected).all(|(p, e)| (p - e).abs() <= 1e-3);
    let res = sol.stationarity_residuals().iter().fold(0.0f64, |a, r| a.max(r.abs()));
    outcome(
        (sol.lambda_max - OPTIMUM).abs() <= 1e-4 && pops_ok && res < 1e-12,
        format!("λ = {:.6}, populations {:.4?}, stationarity residual {res:.1e}", sol.lambda_max, sol.populations),
    )
}

fn quartic_roots() -> Outcome {
    let (s1, s2) = solve_ratio_quartic().unwrap();
    let p = optimum::Polynomial::new(optimum::ratio_quartic_coefficients());
    let res = p.eval(s1).abs().max(p.eval(s2).abs());
    outcome(
        (s1 - 0.9967).abs() <= 5e-4 && (s2 - 0.3087).abs() <= 5e-4 && res < 1e-12,
        format!("s1 = {s1:.6}, s2 = {s2:.6}, residual {res:.1e}"),
    )
}

fn condition_table() -> Outcome {
    let c1 = condition_amplitudes(Branch::First, 0).unwrap();
    let c2 = condition_amplitudes(Branch::Second, 0).unwrap();
    let got = [c1.theta1_mag / PI, c1.theta2_mag / PI, c2.theta1_mag / PI, c2.theta2_mag / PI];
    let want = [0.3412, 0.3401, 0.7021, 0.2167];
    let ok = got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-3);
    outcome(ok, format!("branch 1 ({:.4}π, {:.4}π), branch 2 ({:.4}π, {:.4}π)", got[0], got[1], got[2], got[3]))
}

fn narrowband_optimum(drifts: &mut Vec<f64>) -> Outcome {
    let m = model();
    let cfg = condition_field(Branch::First, narrow(), &m);
    let run = propagate_exact(&WavePacket::ground(3, cfg.t_start), &cfg, &m, &StepControl::default()).unwrap();
    drifts.push(run.norm_drift);
    let (max, _) = max_orientation_over_revival(&run.final_state, &m);
    let pops = run.final_state.populations();
    let pops_ok = pops.iter().zip([0.278, 0.5, 0.222]).all(|(p, e)| (p - e).abs() <= 0.01);
    outcome(
        max >= 0.770 && (max - OPTIMUM).abs() <= 0.005 && pops_ok,
        format!("|<cos θ>|max = {max:.5}, populations {pops:.5?}"),
    )
}

fn phase_flip(drifts: &mut Vec<f64>) -> Outcome {
    let m = model();
    let mut args = Vec::new();
    let mut maxima = Vec::new();
    for branch in [Branch::First, Branch::Second] {
        let cfg = condition_field(branch, narrow(), &m);
        let run = propagate_exact(&WavePacket::ground(3, cfg.t_start), &cfg, &m, &StepControl::default()).unwrap();
        drifts.push(run.norm_drift);
        args.push(run.final_state.coeffs()[0].arg());
        maxima.push(max_orientation_over_revival(&run.final_state, &m).0);
    }
    let flip = magnus::wrap_phase(args[1] - args[0]).abs();
    outcome(
        (flip - PI).abs() <= 0.05 && maxima.iter().all(|&x| x >= 0.770),
        format!("|Δ arg c0| = {flip:.4}, maxima {maxima:.5?}"),
    )
}

/// Indices of interior local maxima.
fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len() - 1).filter(|&i| v[i] >= v[i - 1] && v[i] >= v[i + 1]).collect()
}

fn delay_peaks() -> Outcome {
    let m = model();
    let base = DesignPoint { phase1: 0.0, phase2: 0.0, ..narrow() };
    let cfg = SweepConfig {
        target: Target::Condition { branch: Branch::First, winding: 0 },
        mode: SweepMode::Exact,
        axes: vec![AxisRange::new(AxisKind::Delay, 0.0, 2.0, 201)],
        base,
        step: StepControl::default(),
    };
    let r = run_sweep(&cfg, &m).unwrap();
    let delays = cfg.axes[0].values();
    let orient = r.orientation(RecordMode::Exact);
    let peaks = local_maxima(&orient);
    let step = delays[1] - delays[0];
    let mut ok = r.failures() == 0;
    let mut detail = Vec::new();
    let targets = condition_amplitudes(Branch::First, 0).unwrap().targets();
    for want in [0.5, 1.5] {
        let hit = peaks.iter().copied().find(|&i| (delays[i] - want).abs() <= step + 1e-12);
        match hit {
            Some(i) => {
                let f = DesignPoint { delay: delays[i], ..base }.field(&targets, &m).unwrap();
                let th = theta_integrals(&f, &m, f.t_end).unwrap();
                let res = phase_residual(&th).unwrap();
                ok &= orient[i] >= 0.770 && res < 1e-3;
                detail.push(format!("peak τ0 = {:.2}τ′ value {:.5} phase residual {res:.1e}", delays[i], orient[i]));
            }
            None => {
                ok = false;
                detail.push(format!("no local maximum near {want}τ′"));
            }
        }
    }
    outcome(ok, detail.join("; "))
}

fn convergence_sweep(drifts: &mut Vec<f64>) -> Vec<ComparisonRecord> {
    let m = model();
    [0.5, 0.2, 0.1, 0.05, 0.02]
        .iter()
        .map(|&bw| {
            let cfg = condition_field(Branch::First, DesignPoint { bandwidth: bw, ..narrow() }, &m);
            let rec = magnus_vs_exact_report(&cfg, &m, &StepControl::default()).unwrap();
            drifts.push(rec.norm_drift);
            rec
        })
        .collect()
}

fn magnus_convergence(recs: &[ComparisonRecord]) -> Outcome {
    let d: Vec<f64> = recs.iter().map(ComparisonRecord::max_population_diff).collect();
    let monotone = d.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        monotone && d[4] < 1e-2,
        format!(
            "max population discrepancy over Δω = 0.5…0.02/τ′: {}",
            d.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn broadband_deficit(recs: &[ComparisonRecord]) -> Outcome {
    let deficit = OPTIMUM - recs[0].exact_orientation;
    outcome(
        deficit > 0.01,
        format!("exact |<cos θ>|max at Δω = 0.5/τ′ is {:.5}, deficit {deficit:.4}", recs[0].exact_orientation),
    )
}

/// Turning points whose swing from the previous extremum exceeds `eps`.
fn alternating_extrema(v: &[f64], eps: f64) -> usize {
    let mut count = 0;
    let mut anchor = v[0];
    let mut dir = 0i8;
    for &x in &v[1..] {
        match dir {
            0 if (x - anchor).abs() > eps => {
                dir = if x > anchor { 1 } else { -1 };
                anchor = x;
            }
            1 if x > anchor => anchor = x,
            -1 if x < anchor => anchor = x,
            1 if anchor - x > eps => {
                count += 1;
                dir = -1;
                anchor = x;
            }
            -1 if x - anchor > eps => {
                count += 1;
                dir = 1;
                anchor = x;
            }
            _ => {}
        }
    }
    count
}

fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

fn detuning_oscillations() -> Outcome {
    let m = model();
    let cfg = SweepConfig {
        target: Target::Condition { branch: Branch::Second, winding: 0 },
        mode: SweepMode::Both,
        axes: vec![AxisRange::new(AxisKind::DetuningRelative, -0.025, 0.025, 201)],
        base: narrow(),
        step: StepControl::default(),
    };
    let r = run_sweep(&cfg, &m).unwrap();
    let an = r.orientation(RecordMode::Analytic);
    let ex = r.orientation(RecordMode::Exact);
    let n = alternating_extrema(&an, 1e-3);
    let (tv_an, tv_ex) = (total_variation(&an), total_variation(&ex));
    outcome(
        r.failures() == 0 && n >= 3 && tv_ex < tv_an,
        format!("analytic extrema {n}, total variation analytic {tv_an:.3} vs exact {tv_ex:.3}"),
    )
}

fn property_suite(drifts: &[f64]) -> Outcome {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut notes = Vec::new();
    let mut ok = true;

    let worst_drift = drifts.iter().fold(0.0f64, |a, &d| a.max(d));
    ok &= worst_drift <= 1e-10;
    notes.push(format!("drift {worst_drift:.1e} over {} runs", drifts.len()));

    let mut worst_norm = 0.0f64;
    for _ in 0..100_000 {
        let th = ThetaPair::from_polar(rng.gen_range(0.0..10.0), rng.gen_range(-PI..PI), rng.gen_range(0.0..10.0), rng.gen_range(-PI..PI));
        worst_norm = worst_norm.max((first_order_wavepacket(&th).norm_sqr() - 1.0).abs());
    }
    ok &= worst_norm < 1e-12;
    notes.push(format!("normalization {worst_norm:.1e}"));

    let (m10, m21) = (m.cos_element(0), m.cos_element(1));
    let lambda = lagrange_optimum(m10, m21).unwrap().lambda_max;
    let mut best = 0.0f64;
    for _ in 0..1_000_000 {
        let r: [f64; 3] = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if n == 0.0 {
            continue;
        }
        best = best.max(revival_amplitude(m10, m21, [r[0] / n, r[1] / n, r[2] / n]));
    }
    let mut scanned = 0.0f64;
    for _ in 0..300 {
        let c: Vec<Complex64> = (0..3).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let p = WavePacket::new(c.iter().map(|z| z / n).collect(), 0.0).unwrap();
        scanned = scanned.max(max_orientation_over_revival(&p, &m).0);
    }
    ok &= best <= lambda + 1e-9 && scanned <= lambda + 1e-9;
    notes.push(format!("bound {:.6} (scan {scanned:.6}) vs λ {lambda:.6}", best));

    let mut worst_q = 0.0f64;
    for (branch, bw) in [(Branch::First, 0.02), (Branch::First, 0.5), (Branch::Second, 0.1)] {
        let cfg = condition_field(branch, DesignPoint { bandwidth: bw, ..narrow() }, &m);
        let q = theta_integrals(&cfg, &m, cfg.t_end).unwrap();
        let s = theta_from_spectrum(&cfg, &m);
        worst_q = worst_q
            .max((q.theta1 - s.theta1).norm() / s.theta1.norm())
            .max((q.theta2 - s.theta2).norm() / s.theta2.norm());
    }
    ok &= worst_q <= 1e-5;
    notes.push(format!("quadrature {worst_q:.1e}"));

    let packet = first_order_wavepacket(&condition_amplitudes(Branch::First, 0).unwrap().targets());
    let mut worst_period = 0.0f64;
    for k in 0..1000 {
        let t = 0.01 * k as f64;
        worst_period = worst_period.max((orientation_at(&packet, &m, t) - orientation_at(&packet, &m, t + m.revival_period())).abs());
    }
    ok &= worst_period <= 1e-10;
    notes.push(format!("periodicity {worst_period:.1e}"));

    let scaled = RotorModel::new(2.7, 0.6, 2).unwrap();
    let mut worst_scale = 0.0f64;
    for (branch, point) in [
        (Branch::First, DesignPoint { bandwidth: 0.3, ..narrow() }),
        (Branch::Second, DesignPoint { bandwidth: 0.1, delay: 0.5, phase1: 0.0, phase2: 0.0, ..narrow() }),
    ] {
        let run = |model: &RotorModel| {
            let cfg = condition_field(branch, point.with_axis(AxisKind::DetuningRelative, 0.01, model), model);
            let exact = propagate_exact(&WavePacket::ground(3, cfg.t_start), &cfg, model, &StepControl::default()).unwrap();
            let th = theta_integrals(&cfg, model, cfg.t_end).unwrap();
            let mut out = exact.final_state.populations();
            out.push(max_orientation_over_revival(&exact.final_state, model).0);
            out.push(th.theta1.norm());
            out.push(th.theta2.norm());
            out.push(max_orientation_over_revival(&first_order_wavepacket(&th), model).0);
            out
        };
        let (a, b) = (run(&m), run(&scaled));
        worst_scale = a.iter().zip(&b).fold(worst_scale, |w, (x, y)| w.max((x - y).abs()));
    }
    ok &= worst_scale <= 1e-10;
    notes.push(format!("rescaling {worst_scale:.1e}"));

    outcome(ok, notes.join(", "))
}

fn main() {
    let mut drifts = Vec::new();
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {name}: {} ({}) [{secs:.1} s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o, secs));
    };
    run("1 lagrange optimum", &mut lagrange_optimum_value);
    run("2 quartic roots", &mut quartic_roots);
    run("3 condition amplitudes", &mut condition_table);
    run("4 narrow-band optimum", &mut || narrowband_optimum(&mut drifts));
    run("5 condition-2 phase flip", &mut || phase_flip(&mut drifts));
    run("6 delay peaks", &mut delay_peaks);
    let recs = convergence_sweep(&mut drifts);
    run("7a magnus convergence", &mut || magnus_convergence(&recs));
    run("7b broad-band deficit", &mut || broadband_deficit(&recs));
    run("8 detuning oscillations", &mut detuning_oscillations);
    run("9 property suite", &mut || property_suite(&drifts));

    let failed: Vec<&str> = results.iter().filter(|(_, o, _)| !o.pass).map(|(n, _, _)| *n).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
