//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use kmedian::bipoint::{bipoint_solve, BiPoint};
use kmedian::instance::{FacilitySet, Instance, Point};
use kmedian::io::{gen_euclidean, gen_gap, gen_stars};
use kmedian::oracle::{best_additive, brute_force};
use kmedian::rounding::{
    balancing_holds, build_stars, eta_for, grouped_budget, knapsack_limit, open_f1_limit, round_grouped,
    round_knapsack_with_lp, StarDecomposition,
};
use kmedian::sparsify::{
    dense_pair_sequence, density, is_sparse, select_params, solve_with, transform, SolveOptions, XI,
};
use kmedian::tolerance::approx_le;

type Outcome = Result<String, String>;

/// `(a, b, d1, d2)` of every bi-point built by any criterion.
static BIPOINTS: Mutex<Vec<(f64, f64, f64, f64)>> = Mutex::new(Vec::new());

fn bipoint(inst: &Instance) -> BiPoint {
    let bp = bipoint_solve(inst).expect("bi-point");
    BIPOINTS.lock().unwrap().push((bp.a, bp.b, bp.d1, bp.d2));
    bp
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Small Euclidean instance number `i`: nF <= 10, nC <= 15, k <= 4.
fn small_euclidean(i: u64) -> Instance {
    let nf = 5 + (i % 6) as usize;
    let nc = 8 + (i % 8) as usize;
    let k = 1 + (i % 4) as usize;
    gen_euclidean(nf, nc, k, 1 + (i % 3) as usize, 1000 + i).unwrap()
}

/// Star instances with a non-degenerate bi-point, in a fixed order.
fn star_decompositions(count: usize, keep: impl Fn(&BiPoint) -> bool) -> Vec<(Instance, BiPoint, StarDecomposition)> {
    let mut out = Vec::new();
    for seed in 0.. {
        if out.len() == count {
            break;
        }
        let m = 1 + (seed % 3) as usize;
        let max_leaves = [6, 10, 8][(seed / 3 % 3) as usize];
        let inst = gen_stars(m, max_leaves, seed).unwrap();
        let bp = bipoint(&inst);
        if bp.is_degenerate() || !keep(&bp) {
            continue;
        }
        let sd = build_stars(&inst, &bp).unwrap();
        out.push((inst, bp, sd));
    }
    out
}

fn c1_gap_exactness() -> Outcome {
    for k in 3..=8 {
        let g = gen_gap(k).unwrap();
        let opt = brute_force(&g, k).unwrap();
        ensure(opt.cost == 2.0, || format!("k = {k}: opt {}", opt.cost))?;
        let add = best_additive(&g, 1).unwrap();
        ensure(add.cost == 0.0, || format!("k = {k}: (k+1)-opt {}", add.cost))?;
    }
    Ok("opt = 2 and (k+1)-opt = 0 for k = 3..8".into())
}

fn c2_gap_bipoint() -> Outcome {
    let mut worst = Duration::ZERO;
    for k in 3..=8 {
        let start = Instant::now();
        let g = gen_gap(k).unwrap();
        let bp = bipoint(&g);
        worst = worst.max(start.elapsed());
        let lp = 1.0 + 1.0 / k as f64;
        let f = bp.fractional_cost();
        ensure(f >= lp - 1e-9 && f <= 2.0, || format!("k = {k}: fractional {f} outside [{lp}, 2]"))?;
        ensure((f - lp).abs() <= 1e-9, || format!("k = {k}: fractional {f} != {lp}"))?;
        ensure((bp.a - 1.0 / k as f64).abs() <= 1e-6, || format!("k = {k}: a = {}", bp.a))?;
    }
    ensure(worst < Duration::from_secs(1), || format!("slowest k took {worst:?}"))?;
    Ok(format!("fractional = 1 + 1/k, a = 1/k for k = 3..8 (slowest {worst:?})"))
}

fn c3_bipoint_quality() -> Outcome {
    let mut max_ratio: f64 = 0.0;
    for i in 0..100 {
        let inst = small_euclidean(i);
        let bp = bipoint(&inst);
        let opt = brute_force(&inst, inst.k()).unwrap().cost;
        let f = bp.fractional_cost();
        ensure(approx_le(f, 3.0 * opt), || format!("{}: fractional {f} > 3 * {opt}", inst.name()))?;
        if opt > 0.0 {
            max_ratio = max_ratio.max(f / opt);
        }
    }
    Ok(format!("100 instances, max fractional/opt = {max_ratio:.4}"))
}

fn c4_closure_and_counts() -> Outcome {
    let eta = eta_for(0.5);
    let decomps = star_decompositions(20, |_| true);
    let mut runs = 0;
    for (inst, bp, sd) in &decomps {
        let k = inst.k();
        let budget = grouped_budget(bp.a, bp.b, eta);
        for seed in 0..500 {
            let out = round_grouped(sd, eta, seed).unwrap();
            ensure(sd.star_closed(&out.open), || format!("{} seed {seed}: star closure broken", inst.name()))?;
            ensure(out.open.len() <= k + budget, || {
                format!("{} seed {seed}: {} open > k + {budget}", inst.name(), out.open.len())
            })?;
            runs += 1;
        }
        let (kn, _) = round_knapsack_with_lp(sd, k);
        ensure(kn.open.len() <= k + 2, || format!("{}: knapsack opens {}", inst.name(), kn.open.len()))?;
        ensure(sd.star_closed(&kn.open), || format!("{}: knapsack breaks closure", inst.name()))?;
    }
    Ok(format!("{runs} grouped and {} knapsack roundings", decomps.len()))
}

fn c5_expected_cost() -> Outcome {
    let eps = 0.5;
    let eta = eta_for(eps);
    let decomps = star_decompositions(20, |bp| bp.a > knapsack_limit() && bp.a <= open_f1_limit());
    let mut worst: f64 = 0.0;
    for (inst, bp, sd) in &decomps {
        let mean = (0..500)
            .map(|seed| inst.cost(&round_grouped(sd, eta, seed).unwrap().open))
            .sum::<f64>()
            / 500.0;
        let bound = (1.0 + eta) * (bp.a * bp.d1 + bp.b * (1.0 + 2.0 * bp.a) * bp.d2);
        worst = worst.max(mean / bound);
        ensure(mean <= 1.05 * bound, || format!("{}: mean {mean} > 1.05 * {bound}", inst.name()))?;
    }
    Ok(format!("20 instances, max mean/bound = {worst:.4}"))
}

fn c6_knapsack_lp() -> Outcome {
    let mut decomps = star_decompositions(40, |_| true);
    decomps.extend(star_decompositions(20, |bp| bp.a <= knapsack_limit()));
    for k in 3..=8 {
        let g = gen_gap(k).unwrap();
        let bp = bipoint(&g);
        let sd = build_stars(&g, &bp).unwrap();
        decomps.push((g, bp, sd));
    }
    let mut in_band = 0;
    for (inst, bp, sd) in &decomps {
        let (out, lp) = round_knapsack_with_lp(sd, inst.k());
        ensure(lp.fractional_count() <= 1, || format!("{}: {} fractional", inst.name(), lp.fractional_count()))?;
        ensure(approx_le(bp.b * (bp.d1 + bp.d2), lp.value), || {
            format!("{}: LP value {} < b(d1+d2)", inst.name(), lp.value)
        })?;
        let cost = inst.cost(&out.open);
        let bound = (1.0 + bp.a) * bp.d2 + bp.a * bp.d1;
        ensure(approx_le(cost, bound), || format!("{}: cost {cost} > {bound}", inst.name()))?;
        in_band += usize::from(bp.a <= knapsack_limit());
    }
    Ok(format!("{} decompositions ({in_band} in the knapsack band)", decomps.len()))
}

fn c7_balancing() -> Outcome {
    let seen = BIPOINTS.lock().unwrap();
    for &(a, b, d1, d2) in seen.iter() {
        ensure(balancing_holds(a, b, d1, d2), || format!("a = {a}, d1 = {d1}, d2 = {d2}"))?;
    }
    Ok(format!("{} bi-points", seen.len()))
}

/// Micro instances: |F| <= 7, |C| <= 8, k <= 3.
fn micro_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for seed in 0..120u64 {
        let nf = 4 + (seed % 4) as usize;
        let nc = 4 + (seed / 4 % 5) as usize;
        let k = 1 + (seed / 20 % 3) as usize;
        out.push(gen_euclidean(nf, nc, k, 1 + (seed % 2) as usize, 5000 + seed).unwrap());
    }
    for seed in 0..40 {
        let inst = gen_stars(1, 6, seed).unwrap();
        if inst.k() <= 3 {
            out.push(inst);
        }
    }
    out.push(gen_gap(2).unwrap());
    out.push(gen_gap(3).unwrap());
    out
}

/// Every `c`-additive candidate used as transform input: the best set of
/// each size in `k+1..=k+c` and the pseudo-approximation if small enough.
fn additive_inputs(inst: &Instance, c: usize) -> Vec<FacilitySet> {
    let mut sets = Vec::new();
    for extra in 0..=c {
        if inst.k() + extra <= inst.n_facilities() {
            sets.push(best_additive(inst, extra).unwrap().best);
        }
    }
    let p = kmedian::pseudo_approx(inst, 0.5, 0, 4).unwrap();
    BIPOINTS.lock().unwrap().push((p.bipoint.a, p.bipoint.b, p.bipoint.d1, p.bipoint.d2));
    if p.outcome.open.len() <= inst.k() + c {
        sets.push(p.outcome.open);
    }
    sets
}

fn c8_transform_bound() -> Outcome {
    let delta = 0.1;
    let mut checked = 0;
    let mut guessed = 0;
    for inst in micro_instances() {
        let k = inst.k();
        let opt = brute_force(&inst, k).unwrap();
        // the instance is A-sparse for its largest density
        let max_density = (0..inst.n_facilities())
            .map(|i| density(&inst, i, &opt.best))
            .fold(0.0, f64::max);
        ensure(is_sparse(&inst, max_density, &opt.best).0, || format!("{}: not {max_density}-sparse", inst.name()))?;
        for c in 1..=2usize {
            let mut params = select_params(2.0, c, 1.0).unwrap();
            params.delta = delta;
            params.t = (2.0 * c as f64 / (delta * XI)).ceil() as usize;
            // also the level opt/t whenever the instance is sparse at it
            let tight = opt.cost / params.t as f64;
            let mut levels = vec![max_density];
            if tight < max_density && is_sparse(&inst, tight, &opt.best).0 {
                levels.push(tight);
            }
            for (level, t_set) in levels
                .iter()
                .flat_map(|&l| additive_inputs(&inst, c).into_iter().map(move |s| (l, s)))
            {
                let params = params.with_sparsity(level);
                let out = transform(&inst, &t_set, &params).unwrap();
                let b = out.threshold;
                let bound = (inst.cost(&t_set) + c as f64 * b).max(params.guess_factor() * opt.cost);
                ensure(out.solution.len() <= k, || format!("{}: |S| = {}", inst.name(), out.solution.len()))?;
                ensure(out.cost <= bound + 1e-9, || format!("{}: cost {} > {bound}", inst.name(), out.cost))?;
                ensure(out.removals.len() <= c, || format!("{}: {} removals", inst.name(), out.removals.len()))?;
                for &(f, inc) in &out.removals {
                    ensure(inc <= b, || format!("{}: removing {f} costs {inc} > B = {b}", inst.name()))?;
                }
                ensure(out.cost >= opt.cost - 1e-9, || format!("{}: below the optimum", inst.name()))?;
                checked += 1;
                guessed += usize::from(out.guesses > 0);
            }
        }
    }
    Ok(format!("{checked} transforms ({guessed} reached the guessing phase)"))
}

fn c9_residual_structure() -> Outcome {
    let mut checked = 0;
    for inst in micro_instances() {
        let k = inst.k();
        let opt = brute_force(&inst, k).unwrap();
        for t in [1usize, 2, 3, 4, 60] {
            let level = opt.cost / t as f64;
            let res = dense_pair_sequence(&inst, &opt.best, level);
            ensure(res.removed_by.len() <= t, || format!("{}: {} pairs > t = {t}", inst.name(), res.removed_by.len()))?;
            let balls: Vec<Vec<usize>> = res
                .removed_by
                .iter()
                .map(|&(i, ip)| inst.client_ball(Point::Facility(i), XI * inst.ff(i, ip)))
                .collect();
            for (z, bz) in balls.iter().enumerate() {
                for bw in &balls[z + 1..] {
                    ensure(bz.iter().all(|j| !bw.contains(j)), || format!("{}: overlapping balls", inst.name()))?;
                }
            }
            let sub = res.instance(&inst).unwrap();
            let sub_opt = brute_force(&sub, sub.k()).unwrap();
            ensure(sub_opt.cost == opt.cost, || {
                format!("{} t = {t}: residual opt {} != {}", inst.name(), sub_opt.cost, opt.cost)
            })?;
            let kept: Vec<usize> = opt
                .best
                .ids()
                .iter()
                .map(|f| res.remaining.binary_search(f).unwrap())
                .collect();
            let kept = FacilitySet::new(&sub, kept).unwrap();
            ensure(is_sparse(&sub, level, &kept).0, || format!("{} t = {t}: residual is dense", inst.name()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} greedy sequences"))
}

fn c10_end_to_end() -> Outcome {
    let bound = 2.0 + 3f64.sqrt();
    let mut max_ratio: f64 = 0.0;
    for i in 0..50 {
        let inst = small_euclidean(i);
        let opts = SolveOptions {
            eps: 1.0,
            seed: i,
            t_cap: Some(1),
            ..SolveOptions::new(1.0)
        };
        let rep = solve_with(&inst, &opts).unwrap();
        if let Some(base) = &rep.base {
            BIPOINTS.lock().unwrap().push((base.bipoint.a, base.bipoint.b, base.bipoint.d1, base.bipoint.d2));
        }
        let opt = brute_force(&inst, inst.k()).unwrap().cost;
        ensure(rep.solution.len() <= inst.k(), || format!("{}: {} open", inst.name(), rep.solution.len()))?;
        ensure(approx_le(rep.cost, bound * opt), || format!("{}: {} > {bound} * {opt}", inst.name(), rep.cost))?;
        ensure(rep.cost >= opt - 1e-9, || format!("{}: below the optimum", inst.name()))?;
        if opt > 0.0 {
            max_ratio = max_ratio.max(rep.cost / opt);
        }
    }
    for k in 3..=6 {
        let g = gen_gap(k).unwrap();
        let opts = SolveOptions {
            t_cap: Some(1),
            ..SolveOptions::new(1.0)
        };
        let rep = solve_with(&g, &opts).unwrap();
        let opt = brute_force(&g, k).unwrap().cost;
        ensure(rep.cost == opt && opt == 2.0, || format!("gap-{k}: cost {} (opt {opt})", rep.cost))?;
        ensure(rep.solution.len() <= k, || format!("gap-{k}: {} open", rep.solution.len()))?;
    }
    Ok(format!("50 Euclidean instances, max ratio {max_ratio:.4}; gap k = 3..6 reach 2"))
}

fn kmf(args: &[&str], threads: &str) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_kmf"))
        .args(args)
        .env("KMF_THREADS", threads)
        .output()
        .expect("run kmf");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c11_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("kmf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let (gap, euc, stars, bad) = (path("gap4.txt"), path("euc.txt"), path("stars.txt"), path("bad.txt"));
    std::fs::write(&bad, "KMEDIAN 1\n1 1 1\n0 1\n2 0\n").unwrap();

    let mut commands: Vec<Vec<String>> = vec![
        vec!["gen", "gap", "--k", "4"],
        vec!["gen", "euclidean", "--nf", "8", "--nc", "12", "--k", "3", "--seed", "5"],
        vec!["gen", "stars", "--m", "2", "--seed", "3"],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    for (cmd, file) in commands.clone().iter().zip([&gap, &euc, &stars]) {
        let mut c = cmd.clone();
        c.extend(["--output".to_string(), file.clone()]);
        let (code, _) = kmf(&c.iter().map(String::as_str).collect::<Vec<_>>(), "1");
        ensure(code == 0, || format!("{c:?} exited {code}"))?;
    }
    for file in [&gap, &euc, &stars] {
        for mode in ["exact", "bipoint", "pseudo", "pipeline"] {
            for out in ["csv", "json"] {
                commands.push(
                    ["solve", "--input", file, "--mode", mode, "--seed", "7", "--t-cap", "1", "--oracle", "--out", out]
                        .map(String::from)
                        .to_vec(),
                );
            }
        }
        commands.push(["validate", "--input", file].map(String::from).to_vec());
    }
    commands.push(
        ["solve", "--input", &gap, "--input", &euc, "--input", &stars, "--mode", "pseudo", "--seed", "7"]
            .map(String::from)
            .to_vec(),
    );
    commands.push(["validate", "--input", &bad].map(String::from).to_vec());

    for cmd in &commands {
        let args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        let (c1, o1) = kmf(&args, "1");
        let (c2, o2) = kmf(&args, "1");
        let (c3, o3) = kmf(&args, "4");
        ensure(c1 == c2 && c2 == c3, || format!("{cmd:?}: exit codes {c1}, {c2}, {c3}"))?;
        ensure(o1 == o2 && o2 == o3, || format!("{cmd:?}: output differs between runs"))?;
        ensure(!o1.is_empty(), || format!("{cmd:?}: no output"))?;
    }
    let (_, row) = kmf(&["solve", "--input", &gap, "--mode", "pipeline", "--eps", "1.0", "--oracle"], "1");
    let row = String::from_utf8(row).unwrap();
    ensure(row.lines().nth(1) == Some("gap4,6,5,4,pipeline,2.0,4,1.0,0,"), || format!("gap row: {row:?}"))?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands byte-identical over 3 runs (1 and 4 threads)", commands.len()))
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        (1, "gap-family exactness", Duration::from_secs(1), c1_gap_exactness),
        (2, "bi-point on gap family", Duration::from_secs(6), c2_gap_bipoint),
        (3, "bi-point quality", Duration::from_secs(120), c3_bipoint_quality),
        (4, "star closure and count bounds", Duration::from_secs(120), c4_closure_and_counts),
        (5, "grouped expected cost", Duration::from_secs(180), c5_expected_cost),
        (6, "knapsack LP properties", Duration::from_secs(30), c6_knapsack_lp),
        (8, "transform bound", Duration::from_secs(600), c8_transform_bound),
        (9, "residual structure", Duration::from_secs(300), c9_residual_structure),
        (10, "end-to-end guarantee", Duration::from_secs(600), c10_end_to_end),
        (11, "determinism", Duration::from_secs(600), c11_determinism),
        // runs last so that it sees every bi-point built above
        (7, "balancing inequality", Duration::from_secs(60), c7_balancing),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(msg) => println!("[PASS] criterion {n}: {name}: {msg} ({elapsed:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {name}: {msg} ({elapsed:.2?})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
