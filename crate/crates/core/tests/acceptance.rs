//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every verdict is printed even when
//! an earlier one fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 1 4 12`.

use std::f64::consts::PI;
use std::time::Instant;

use edgelab::bridge::smoothed_count_dual;
use edgelab::ensembles::{sample_replicate, EnsembleSpec, EntryLaw};
use edgelab::flow_lab::{
    catalan_product, gue_edge_trace, haar_moment_mc, weingarten_asymptotic, weingarten_moment, MomentPattern, Perm,
    WeingartenTable,
};
use edgelab::fredholm::{finite_n_gue_curve, grid, tw_curve};
use edgelab::harness::experiments::{
    class_representatives, flat_within, run_bridge_check, run_flow_scan, run_kernel_check, run_unmatched,
    BridgeCheckConfig, FlowScanConfig, KernelCheckConfig, UnmatchedConfig,
};
use edgelab::harness::{
    dkw_radius, empirical_top_curve, fit_rate, ks_distance, rate_scan, write_rate_csv, EdgeMode, ExperimentConfig,
    DKW_ALPHA,
};
use edgelab::kernels::{
    airy, airy_prime, goe_edge_kernel, goe_edge_limit, half_line_integral, half_line_integral_even_closed_form,
    hermite_table, KernelOperator,
};
use edgelab::linalg::Beta;
use edgelab::quad::QuadratureRule;
use edgelab::spectral::{eigen_decompose, m_sc, ward_sides, SpectralDomain};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

type Verdict = (bool, String);

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> T {
    serde_json::from_str(s).expect("acceptance config")
}

fn c1() -> Verdict {
    let mut worst = 0.0f64;
    let mut min_im = f64::INFINITY;
    for i in 0..100 {
        let e = -5.0 + 10.0 * i as f64 / 99.0;
        for j in 0..100 {
            // eta log-spaced over (0, 10]
            let eta = 10f64.powf(-8.0 + 9.0 * j as f64 / 99.0);
            let z = Complex64::new(e, eta);
            let m = m_sc(z).unwrap();
            worst = worst.max((1.0 + z * m + m * m).norm());
            min_im = min_im.min(m.im);
        }
    }
    (worst <= 1e-13 && min_im > 0.0, format!("max residual {worst:.2e}, min Im m {min_im:.2e}"))
}

fn c2() -> Verdict {
    let n = 200;
    let zs = [Complex64::new(0.3, 0.05), Complex64::new(2.0, (n as f64).powf(-2.0 / 3.0)), Complex64::new(-1.1, 0.9)];
    let mut worst = 0.0f64;
    for beta in [Beta::Real, Beta::Complex] {
        let spec = EnsembleSpec::gaussian(beta, n).unwrap();
        for r in 0..50 {
            let s = eigen_decompose(&sample_replicate(&spec, 2, r).unwrap(), true).unwrap();
            for &z in &zs {
                let (lhs, rhs) = ward_sides(&s, z).unwrap();
                worst = worst.max((lhs - rhs).abs() / rhs.abs());
            }
        }
    }
    (worst <= 1e-10, format!("max relative Ward defect {worst:.2e} over 2 x 50 samples, 3 z each"))
}

fn c3() -> Verdict {
    let rule = QuadratureRule::interval(-40.0, 40.0, 600).unwrap();
    let tables: Vec<Vec<f64>> = rule.points.iter().map(|&x| hermite_table(30, x)).collect();
    let mut orth = 0.0f64;
    for j in 0..=30 {
        for k in 0..=30 {
            let v: f64 = tables.iter().zip(&rule.weights).map(|(t, w)| w * t[j] * t[k]).sum();
            orth = orth.max((v - if j == k { 1.0 } else { 0.0 }).abs());
        }
    }
    let mut trace = 0.0f64;
    for n in [1usize, 2, 7, 20, 33, 50] {
        let k = KernelOperator::Hermite { n };
        let v: f64 = rule.points.iter().zip(&rule.weights).map(|(&x, w)| w * k.diag(x).unwrap()).sum();
        trace = trace.max((v - n as f64).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut repro = 0.0f64;
    for n in [5usize, 20, 50] {
        let k = KernelOperator::Hermite { n };
        for _ in 0..20 {
            let (x, y) = (rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
            let v: f64 =
                rule.points.iter().zip(&rule.weights).map(|(&u, w)| w * k.eval(x, u).unwrap() * k.eval(u, y).unwrap()).sum();
            repro = repro.max((v - k.eval(x, y).unwrap()).abs());
        }
    }
    (
        orth <= 1e-8 && trace <= 1e-6 && repro <= 1e-6,
        format!("orthonormality {orth:.2e}, trace {trace:.2e}, reproducing {repro:.2e}"),
    )
}

/// Maclaurin series `Ai(x) = c1 f(x) - c2 g(x)` and its derivative.
fn airy_series(x: f64) -> (f64, f64) {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0));
    let (mut f, mut g, mut fp, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let (mut tf, mut tg) = (1.0, x);
    let x3 = x * x * x;
    for k in 0..80 {
        let kk = k as f64;
        f += tf;
        g += tg;
        if k > 0 {
            fp += tf * 3.0 * kk / x;
        }
        gp += tg * (3.0 * kk + 1.0) / x;
        tf *= x3 / ((3.0 * kk + 2.0) * (3.0 * kk + 3.0));
        tg *= x3 / ((3.0 * kk + 3.0) * (3.0 * kk + 4.0));
    }
    if x == 0.0 {
        gp = 1.0;
    }
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

fn c4() -> Verdict {
    let (s0, sp0) = airy_series(0.0);
    let d0 = (airy(0.0).unwrap() - s0).abs().max((airy_prime(0.0).unwrap() - sp0).abs());
    let mut series = 0.0f64;
    for i in 0..=40 {
        let x = -2.0 + 0.1 * i as f64;
        let (a, ap) = airy_series(x);
        series = series.max((airy(x).unwrap() - a).abs()).max((airy_prime(x).unwrap() - ap).abs());
    }
    // Ai'' = x Ai with a fourth-order central difference of Ai'
    let h = 1e-3;
    let mut ode = 0.0f64;
    for i in 0..=1500 {
        let x = -10.0 + 0.01 * i as f64;
        let f = |t: f64| airy_prime(t).unwrap();
        let d2 = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
        ode = ode.max((d2 - x * airy(x).unwrap()).abs());
    }
    let ratio = KernelOperator::Airy.diag(-400.0).unwrap() / 400f64.sqrt();
    let ok = d0 <= 1e-9 && series <= 1e-9 && ode <= 1e-8 && (0.9..=1.1).contains(&ratio);
    (
        ok,
        format!(
            "Ai(0)/Ai'(0) {d0:.2e}, series on [-2,2] {series:.2e}, ODE residual {ode:.2e}, \
             K_airy(-400,-400)/sqrt(400) = {ratio:.6} (required [0.9, 1.1]; 1/pi = {:.6})",
            1.0 / PI
        ),
    )
}

fn c5() -> Verdict {
    let cfg: KernelCheckConfig = from_json(r#"{"n_list": [50, 100, 200, 400], "points": [[0, 0]]}"#);
    let (rows, fits) = run_kernel_check(&cfg).unwrap();
    let fit = fits[0].clone().unwrap();
    let gaps: Vec<String> = rows.iter().map(|r| format!("{:.2e}", r.gap)).collect();
    (
        (fit.exponent + 2.0 / 3.0).abs() <= 0.15,
        format!("slope {:.3} (target -2/3 +/- 0.15), gaps {}", fit.exponent, gaps.join(" ")),
    )
}

fn c6() -> Verdict {
    let g = grid(-6.0, 4.0, 0.02).unwrap();
    let tw2 = tw_curve(Beta::Complex, &g, 64).unwrap();
    let ns = [20usize, 50, 100, 200];
    // sup over r >= -3.5
    let r0 = -3.5 - 1e-9;
    let d: Vec<f64> =
        ns.iter().map(|&n| ks_distance(&finite_n_gue_curve(n, &g, 64).unwrap(), &tw2, r0).unwrap()).collect();
    let fit = fit_rate(&ns, &d, 1).unwrap();
    let dec = d.windows(2).all(|w| w[1] < w[0]);
    (
        dec && (fit.exponent + 2.0 / 3.0).abs() <= 0.2,
        format!("D = [{}], strictly decreasing {dec}, slope {:.3} (target -2/3 +/- 0.2)", sci(&d), fit.exponent),
    )
}

fn c7() -> Verdict {
    let n = 50;
    let m = 10_000;
    let g = grid(-6.0, 4.0, 0.02).unwrap();
    let spec = EnsembleSpec::gaussian(Beta::Complex, n).unwrap();
    let (emp, clamp) = empirical_top_curve(&spec, m, 7, EdgeMode::Standard, &g).unwrap();
    let exact = finite_n_gue_curve(n, &g, 64).unwrap();
    let d = ks_distance(&emp, &exact, f64::NEG_INFINITY).unwrap();
    let radius = dkw_radius(m, DKW_ALPHA);
    (d <= radius, format!("sup distance {d:.4} vs DKW {radius:.4} (clamped {}/{})", clamp.below, clamp.above))
}

fn c8() -> Verdict {
    let eps = 0.05;
    let ns = [100usize, 200, 400, 800];
    let grid_ab = [(-0.5, 0.5), (0.0, 0.5), (0.5, 0.5), (0.0, 1.0)];
    let dom = SpectralDomain::edge(eps, 1.0);
    let z_of = |n: usize, a: f64, b: f64| {
        let w = (n as f64).powf(-2.0 / 3.0 + eps);
        Complex64::new(2.0 + a * w, b * w)
    };
    let mut ok = true;
    let mut slopes = Vec::new();
    for &(a, b) in &grid_ab {
        let v: Vec<f64> = ns.iter().map(|&n| gue_edge_trace(n, z_of(n, a, b), &dom).unwrap().im_trace).collect();
        let fit = fit_rate(&ns, &v, 8).unwrap();
        ok &= (fit.exponent + 1.0 / 3.0).abs() <= 0.1;
        slopes.push(fit.exponent);
    }
    // Monte Carlo at N = 200
    let n = 200;
    let z = z_of(n, 0.0, 0.5);
    let spec = EnsembleSpec::gaussian(Beta::Complex, n).unwrap();
    let reps = 400;
    let xs: Vec<f64> =
        (0..reps).map(|r| eigen_decompose(&sample_replicate(&spec, 8, r).unwrap(), false).unwrap().m_n(z).unwrap().im).collect();
    let mean = xs.iter().sum::<f64>() / reps as f64;
    let se = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0) / reps as f64).sqrt();
    let det = gue_edge_trace(n, z, &dom).unwrap().im_trace;
    let mc_ok = (mean - det).abs() <= 3.0 * se;
    (
        ok && mc_ok,
        format!("slopes {slopes:.3?} (target -1/3 +/- 0.1); N=200 MC {mean:.5} +/- {se:.5} vs kernel {det:.5}"),
    )
}

fn c9() -> Verdict {
    let cfg: ExperimentConfig = from_json(
        r#"{"ensemble": {"beta": 2, "law": {"name": "rademacher"}}, "n_list": [200, 400, 800],
            "replicas": 4000, "seed": 9, "channels": ["mc"]}"#,
    );
    let res = rate_scan(&cfg).unwrap();
    let d: Vec<f64> = res.rows.iter().map(|r| r.ks).collect();
    let rad: Vec<f64> = res.rows.iter().map(|r| r.dkw_radius).collect();
    let dec = d.windows(2).all(|w| w[1] < w[0]);
    let (first, last) = (0, d.len() - 1);
    let resolved = d[first] - d[last] > rad[first] + rad[last];
    (
        dec && resolved && d[last] <= 0.08,
        format!(
            "KS = {d:.4?}, DKW radius {:.4}; decreasing {dec}, end-to-end drop beyond radii {resolved}, KS(800) <= 0.08 {}",
            rad[0],
            d[last] <= 0.08
        ),
    )
}

fn c10() -> Verdict {
    let cfg: FlowScanConfig = from_json(
        r#"{"ensemble": {"beta": 2, "law": {"name": "rademacher"}}, "n": 400, "t_points": 6,
            "z_edge": [[-0.5, 0.5], [0.0, 0.5], [0.5, 1.0]], "replicas": 200, "epsilon": 0.05,
            "observable": "im_mN", "seed": 10}"#,
    );
    let res = run_flow_scan(&cfg).unwrap();
    let ok = res.flatness.iter().all(|f| flat_within(f, 400, 3.0, 0.3));
    let devs: Vec<String> =
        res.flatness.iter().map(|f| format!("{:.2e} (se {:.1e})", f.max_dev, f.se_at_max)).collect();
    // the N^{-1/3+0.3} allowance is close to 1 at N = 400; report the bare 3 SE verdict as well
    let strict = res.flatness.iter().all(|f| f.max_dev <= 3.0 * f.se_at_max);
    (
        ok,
        format!(
            "max deviations {} vs 3 SE + {:.3e}; within 3 SE alone {strict}",
            devs.join(", "),
            400f64.powf(-1.0 / 3.0 + 0.3)
        ),
    )
}

fn c11() -> Verdict {
    let cfg: UnmatchedConfig = from_json(r#"{"n_list": [100, 200, 400], "replicas": 500, "seed": 5}"#);
    let (rows, s) = run_unmatched(&cfg).unwrap();
    let e = s.estimate_fit.as_ref().map_or(f64::NAN, |f| f.exponent);
    let p = s.naive_fit.as_ref().map_or(f64::NAN, |f| f.exponent);
    let est: Vec<String> = rows.iter().map(|r| format!("{:.2e}+/-{:.1e} (Psi^3 {:.2e})", r.estimate, r.se, r.naive_psi3)).collect();
    (e <= -0.7 && s.separated, format!("exponent {e:.3} (<= -0.7), Psi^3 exponent {p:.3}, separated {}; {}", s.separated, est.join(", ")))
}

fn c12() -> Verdict {
    let mut orth = 0.0f64;
    for n in 1..=5 {
        for dim in [8usize, 16, 32] {
            orth = orth.max(WeingartenTable::new(n, dim).unwrap().orthogonality_residual());
        }
    }
    let mut closed = 0.0f64;
    for dim in [8usize, 16, 32] {
        let nf = dim as f64;
        let t = WeingartenTable::new(2, dim).unwrap();
        closed = closed.max((t.get(&Perm::identity(2)).unwrap() - 1.0 / (nf * nf - 1.0)).abs());
        let swap = Perm::parse_cycles("(1 2)", 2).unwrap();
        closed = closed.max((t.get(&swap).unwrap() + 1.0 / (nf * (nf * nf - 1.0))).abs());
    }
    // relative error of the Catalan asymptotic decays like N^{-2}
    let dims = [8usize, 16, 32];
    let mut trend_ok = true;
    let mut slopes = Vec::new();
    for n in 2..=4 {
        let tables: Vec<WeingartenTable> = dims.iter().map(|&d| WeingartenTable::new(n, d).unwrap()).collect();
        for g in class_representatives(n) {
            let rel: Vec<f64> = tables
                .iter()
                .zip(&dims)
                .map(|(t, &d)| (t.get(&g).unwrap() / weingarten_asymptotic(&g, d) - 1.0).abs())
                .collect();
            let fit = fit_rate(&dims, &rel, 12).unwrap();
            trend_ok &= (fit.exponent + 2.0).abs() <= 0.3 && catalan_product(&g) != 0.0;
            slopes.push(fit.exponent);
        }
    }
    let (smin, smax) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    // Haar Monte Carlo
    let dim = 4;
    let pats = [
        MomentPattern { i: vec![0], j: vec![0], i_bar: vec![0], j_bar: vec![0] },
        MomentPattern { i: vec![0, 1], j: vec![0, 1], i_bar: vec![0, 1], j_bar: vec![0, 1] },
        MomentPattern { i: vec![0, 0], j: vec![0, 0], i_bar: vec![0, 0], j_bar: vec![0, 0] },
        MomentPattern { i: vec![0, 1], j: vec![1, 0], i_bar: vec![0, 1], j_bar: vec![0, 1] },
        MomentPattern { i: vec![0, 0], j: vec![0, 1], i_bar: vec![0, 0], j_bar: vec![0, 2] },
    ];
    let mut worst_z = 0.0f64;
    for (k, p) in pats.iter().enumerate() {
        let mc = haar_moment_mc(p, dim, 40_000, 100 + k as u64).unwrap();
        let exact = weingarten_moment(p, dim).unwrap();
        worst_z = worst_z.max((mc.mean - Complex64::new(exact, 0.0)).norm() / mc.se);
    }
    let unmatched_zero = weingarten_moment(&pats[4], dim).unwrap() == 0.0;
    (
        orth <= 1e-10 && closed <= 1e-15 && trend_ok && worst_z <= 4.0 && unmatched_zero,
        format!(
            "orthogonality {orth:.2e}, n=2 closed forms {closed:.1e}, Catalan rel-error slopes in [{smin:.2}, {smax:.2}], \
             Haar worst |z| {worst_z:.2}"
        ),
    )
}

fn c13() -> Verdict {
    let cfg: BridgeCheckConfig = from_json(r#"{"n": 500, "epsilon": 0.05, "seeds": 500, "seed": 13}"#);
    let (records, s) = run_bridge_check(&cfg).unwrap();
    let dual_ok = records.iter().all(|r| r.rel_diff <= 1e-6);
    // independent spot check of the dual path on one fresh sample
    let spec = EnsembleSpec::new(Beta::Complex, 500, EntryLaw::gaussian()).unwrap();
    let sample = eigen_decompose(&sample_replicate(&spec, 99, 0).unwrap(), false).unwrap();
    let spot = smoothed_count_dual(&sample, &s.params).unwrap().rel_diff();
    (
        dual_ok && spot <= 1e-6 && s.sandwich_pass_fraction >= 0.99 && s.fitted_c_q99 <= 10.0,
        format!(
            "max dual rel diff {:.2e}, sandwich pass {:.3}, fitted C q99 {:.3} max {:.3}, mollifier pass {:.3}",
            s.max_rel_dual.max(spot),
            s.sandwich_pass_fraction,
            s.fitted_c_q99,
            s.fitted_c_max,
            s.mollifier_pass_fraction
        ),
    )
}

fn c14() -> Verdict {
    let mut closed = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in 0..=500usize {
        let a = half_line_integral(2 * m);
        let b = half_line_integral_even_closed_form(m);
        closed = closed.max((a - b).abs());
        if m >= 1 {
            let s = b * (m as f64).powf(0.25);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    let xs: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
    let gap = |n: usize| xs.iter().map(|&x| (goe_edge_kernel(n, x).unwrap() - goe_edge_limit(x).unwrap()).abs()).fold(0.0, f64::max);
    let even: Vec<f64> = [50, 100, 200].iter().map(|&n| gap(n)).collect();
    let odd: Vec<f64> = [51, 101, 201].iter().map(|&n| gap(n)).collect();
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    (
        closed <= 1e-10 && lo >= 0.5 && hi <= 2.0 && dec(&even) && dec(&odd),
        format!("I_2m closed form {closed:.2e}, m^(1/4) I_2m in [{lo:.4}, {hi:.4}], sup gaps even [{}] odd [{}]", sci(&even), sci(&odd)),
    )
}

fn c15() -> Verdict {
    let base = r#"{"ensemble": {"beta": 1, "law": {"name": "uniform"}}, "n_list": [40, 80, 120],
                   "replicas": 300, "seed": 15, "threads": THREADS}"#;
    let csv = |t: usize| {
        let cfg: ExperimentConfig = from_json(&base.replace("THREADS", &t.to_string()));
        let res = rate_scan(&cfg).unwrap();
        let mut buf = Vec::new();
        write_rate_csv(&mut buf, &res.rows).unwrap();
        buf
    };
    let (a, b) = (csv(1), csv(8));
    (a == b, format!("{} bytes at 1 thread, {} bytes at 8 threads, identical {}", a.len(), b.len(), a == b))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 15] = [
        (1, "m_sc self-consistency on S0", c1),
        (2, "Ward identity", c2),
        (3, "Hermite orthonormality and kernel identities", c3),
        (4, "Airy function checks", c4),
        (5, "edge kernel rate", c5),
        (6, "Gaussian-ensemble deterministic rate", c6),
        (7, "Monte Carlo GUE vs finite-N Fredholm", c7),
        (8, "GUE edge trace", c8),
        (9, "Wigner universality substitute", c9),
        (10, "flow flatness", c10),
        (11, "unmatched-term decay", c11),
        (12, "Weingarten suite", c12),
        (13, "bridge suite", c13),
        (14, "GOE kernel", c14),
        (15, "thread-count determinism", c15),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let (ok, detail) = match std::panic::catch_unwind(f) {
            Ok(v) => v,
            Err(e) => {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                (false, format!("panicked: {}", msg.unwrap_or_default()))
            }
        };
        println!(
            "criterion {id:>2} [{}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
