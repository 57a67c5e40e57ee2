//! End-to-end acceptance run. Each criterion prints one PASS or FAIL line and
//! the process exits nonzero if any of them fails.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{delta_direct, fixture, ids, min_delta_direct, reliable_direct, reliable_masks_direct, small_world, total_battery};
use jamsched::energy::{apply_slot, Jammer, JammerKind};
use jamsched::geometry::WorldModel;
use jamsched::greedy::greedy_schedule;
use jamsched::harness::{emit_csv, run_experiment, Algorithm, ExperimentRecord, ExperimentSpec};
use jamsched::ilp::{solve_ilp, solve_lp, LinearModel, Relation, Sense, SolveStatus};
use jamsched::lifetime::{baseline_lifetime, infinite_lifetime_certificate, round_robin_slots, Verdict};
use jamsched::mrs::mrs_plan;
use jamsched::oracles::{build_conflict_graph, exhaustive_optimal_lifetime, max_independent_set, OracleLifetime, DEFAULT_STATE_CAP};
use jamsched::schedule::{replay, Schedule, Termination};
use jamsched::sinr::{active_count_bounds, ConstraintTable, NetworkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fmt_err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// ---------------------------------------------------------------- 1

fn worked_example() -> Outcome {
    let start = Instant::now();
    let (world, cfg) = fixture("worked_example.json", JammerKind::Unrechargeable, 2, 1);
    let plan = mrs_plan(&world, &cfg).map_err(fmt_err)?;
    let elapsed = start.elapsed();

    let expected_sets: Vec<Vec<usize>> = vec![vec![0, 1, 2, 4], vec![0, 2, 3], vec![1, 5]];
    ensure!(plan.sets.solutions == expected_sets, "minimal sets {:?}", plan.sets.solutions);
    ensure!(plan.solution.lifetime == 4, "lifetime {}", plan.solution.lifetime);
    ensure!(plan.solution.multiplicities == [0, 2, 2], "multiplicities {:?}", plan.solution.multiplicities);
    ensure!(plan.schedule.lifetime == 4, "schedule length {}", plan.schedule.lifetime);

    // (1,1,1): one slot per set, checked against the direct formulas.
    let mut uses = [0u32; 6];
    for set in &expected_sets {
        ensure!(reliable_direct(&world, &cfg, set), "{set:?} is not reliable");
        for &j in set {
            uses[j] += 1;
        }
    }
    ensure!(uses.iter().all(|&u| u <= 2), "(1,1,1) overdraws a battery: {uses:?}");

    let baseline = baseline_lifetime(&world, &cfg, 100).map_err(fmt_err)?;
    ensure!(baseline == 2, "baseline {baseline}");
    let all: Vec<usize> = (0..world.len()).collect();
    ensure!(reliable_direct(&world, &cfg, &all), "all-active set is not reliable");

    let optimum = exhaustive_optimal_lifetime(&world, &cfg, DEFAULT_STATE_CAP).map_err(fmt_err)?;
    ensure!(optimum == OracleLifetime::Finite(4), "exhaustive optimum {optimum:?}");
    ensure!(elapsed < Duration::from_secs(1), "took {}", secs(elapsed));
    Ok(format!("lifetime 4 via (0,2,2), (1,1,1) gives 3, baseline 2, {}", secs(elapsed)))
}

// ---------------------------------------------------------------- 2

fn random_program(rng: &mut ChaCha8Rng) -> LinearModel {
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let mut model = LinearModel::new(sense);
    let n = rng.gen_range(1..=6);
    for i in 0..n {
        let v = model.add_binary(format!("x{i}"));
        model.set_objective_coefficient(v, f64::from(rng.gen_range(-5..=5)));
    }
    for _ in 0..rng.gen_range(0..=6) {
        let coefficients = (0..n).map(|_| f64::from(rng.gen_range(-5..=5))).collect();
        let relation = match rng.gen_range(0..3) {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        };
        model.add_constraint(coefficients, relation, f64::from(rng.gen_range(-5..=5)));
    }
    model
}

/// Best objective over all 0/1 points, from integer arithmetic only.
fn enumerate_program(model: &LinearModel) -> Option<i64> {
    let n = model.variables.len();
    let int = |v: f64| v as i64;
    let mut best: Option<i64> = None;
    for m in 0u64..1 << n {
        let x: Vec<i64> = (0..n).map(|i| (m >> i & 1) as i64).collect();
        let ok = model.constraints.iter().all(|row| {
            let lhs: i64 = row.coefficients.iter().zip(&x).map(|(&a, &v)| int(a) * v).sum();
            let rhs = int(row.rhs);
            match row.relation {
                Relation::Le => lhs <= rhs,
                Relation::Ge => lhs >= rhs,
                Relation::Eq => lhs == rhs,
            }
        });
        if !ok {
            continue;
        }
        let value: i64 = model.objective.coefficients.iter().zip(&x).map(|(&a, &v)| int(a) * v).sum();
        best = Some(match (best, model.objective.sense) {
            (None, _) => value,
            (Some(b), Sense::Maximize) => b.max(value),
            (Some(b), Sense::Minimize) => b.min(value),
        });
    }
    best
}

fn ilp_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut feasible = 0;
    for k in 0..100 {
        let model = random_program(&mut rng);
        let expected = enumerate_program(&model);
        let got = solve_ilp(&model).map_err(fmt_err)?;
        match expected {
            None => ensure!(got.status == SolveStatus::Infeasible, "instance {k}: expected infeasible, got {:?}", got.status),
            Some(best) => {
                feasible += 1;
                ensure!(got.status == SolveStatus::Optimal, "instance {k}: status {:?}", got.status);
                ensure!(got.objective_value == best as f64, "instance {k}: objective {} vs {best}", got.objective_value);
                ensure!(model.is_feasible(&got.values), "instance {k}: returned point violates a row");
                let lp = solve_lp(&model).map_err(fmt_err)?;
                ensure!(lp.status == SolveStatus::Optimal, "instance {k}: relaxation status {:?}", lp.status);
                let slack = 1e-7;
                let dominates = match model.objective.sense {
                    Sense::Maximize => lp.objective_value >= best as f64 - slack,
                    Sense::Minimize => lp.objective_value <= best as f64 + slack,
                };
                ensure!(dominates, "instance {k}: relaxation {} does not bound {best}", lp.objective_value);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {}", secs(elapsed));
    Ok(format!("100 programs ({feasible} feasible) match enumeration, {}", secs(elapsed)))
}

// ---------------------------------------------------------------- 3, 4, 7

struct SmallCase {
    seed: u64,
    world: WorldModel,
    cfg: NetworkConfig,
    optimum: u64,
    mrs: Schedule,
    greedy: Schedule,
}

/// The first 25 seeds whose world has at least one reliable set, so that
/// every comparison involves a nonzero lifetime.
fn small_cases() -> Result<(Vec<SmallCase>, Duration), String> {
    let mut cases = Vec::new();
    let mut mrs_time = Duration::ZERO;
    let mut seed = 0u64;
    while cases.len() < 25 {
        ensure!(seed < 10_000, "too few non-trivial worlds");
        let n = 5 + (seed % 4) as usize;
        let (world, cfg) = small_world(seed, n, 3);
        seed += 1;
        if reliable_masks_direct(&world, &cfg).is_empty() {
            continue;
        }
        let optimum = match exhaustive_optimal_lifetime(&world, &cfg, DEFAULT_STATE_CAP).map_err(fmt_err)? {
            OracleLifetime::Finite(v) => v,
            OracleLifetime::Unbounded => return Err(format!("seed {}: unbounded without rechargeables", seed - 1)),
        };
        let t = Instant::now();
        let mrs = mrs_plan(&world, &cfg).map_err(fmt_err)?.schedule;
        mrs_time += t.elapsed();
        let greedy = greedy_schedule(&world, &cfg, 10_000).map_err(fmt_err)?;
        cases.push(SmallCase {
            seed: seed - 1,
            world,
            cfg,
            optimum,
            mrs,
            greedy,
        });
    }
    Ok((cases, mrs_time))
}

fn mrs_optimality(cases: &[SmallCase], elapsed: Duration) -> Outcome {
    for case in cases {
        ensure!(
            case.mrs.lifetime as u64 == case.optimum,
            "seed {}: mrs {} vs optimum {}",
            case.seed,
            case.mrs.lifetime,
            case.optimum
        );
    }
    ensure!(elapsed < Duration::from_secs(120), "took {}", secs(elapsed));
    let total: u64 = cases.iter().map(|c| c.optimum).sum();
    Ok(format!("25 worlds, optima sum to {total}, {}", secs(elapsed)))
}

/// States before each slot of `schedule`, starting from the world's jammers.
fn states_before(case: &SmallCase, schedule: &Schedule) -> Vec<Vec<Jammer>> {
    let mut state = case.world.jammers.clone();
    let mut out = Vec::with_capacity(schedule.slots.len());
    for slot in &schedule.slots {
        out.push(state.clone());
        state = apply_slot(&state, slot, case.cfg.c).expect("slot is affordable");
    }
    out
}

fn greedy_bounds(cases: &[SmallCase]) -> Outcome {
    let mut slots_checked = 0;
    let mut strictly_below = 0;
    for case in cases {
        ensure!(
            case.greedy.lifetime as u64 <= case.optimum,
            "seed {}: greedy {} above optimum {}",
            case.seed,
            case.greedy.lifetime,
            case.optimum
        );
        if (case.greedy.lifetime as u64) < case.optimum {
            strictly_below += 1;
        }
        for (t, state) in states_before(case, &case.greedy).iter().enumerate() {
            let best = min_delta_direct(&case.world, &case.cfg, state);
            ensure!(
                best == Some(case.greedy.slot_deltas[t]),
                "seed {} slot {t}: delta {} vs enumerated {best:?}",
                case.seed,
                case.greedy.slot_deltas[t]
            );
            slots_checked += 1;
        }
    }
    Ok(format!("{slots_checked} slots at the enumerated minimum, {strictly_below} worlds below optimum"))
}

fn energy_ledger(cases: &[SmallCase]) -> Outcome {
    let mut slots = 0;
    for case in cases {
        let table = ConstraintTable::new(&case.world, &case.cfg);
        for schedule in [&case.mrs, &case.greedy] {
            replay(&case.world.jammers, &schedule.slots, Some(&schedule.slot_deltas), &table, case.cfg.c)
                .map_err(|e| format!("seed {}: {e}", case.seed))?;
            let mut state = case.world.jammers.clone();
            for (t, slot) in schedule.slots.iter().enumerate() {
                let next = apply_slot(&state, slot, case.cfg.c).map_err(fmt_err)?;
                let drop = total_battery(&state) - total_battery(&next);
                ensure!(drop == schedule.slot_deltas[t], "seed {} slot {t}: drop {drop}", case.seed);
                ensure!(drop == delta_direct(&state, slot, case.cfg.c), "seed {} slot {t}: direct delta", case.seed);
                state = next;
                slots += 1;
            }
            for j in &case.world.jammers {
                let uses = schedule.slots.iter().filter(|s| s.contains(&j.id)).count() as u32;
                ensure!(uses <= j.capacity / case.cfg.c, "seed {}: jammer {} used {uses} times", case.seed, j.id);
            }
        }
    }
    Ok(format!("{slots} slots conserve energy exactly"))
}

// ---------------------------------------------------------------- 5

fn reduction_cross_check() -> Outcome {
    let mut checked = 0;
    let mut seed = 1000u64;
    let mut total = 0;
    while checked < 15 {
        ensure!(seed < 20_000, "too few non-trivial unit-lifespan worlds");
        let n = 5 + (seed % 4) as usize;
        let (world, cfg) = small_world(seed, n, 1);
        seed += 1;
        let masks = reliable_masks_direct(&world, &cfg);
        if masks.is_empty() {
            continue;
        }
        let family: Vec<Vec<usize>> = masks.into_iter().map(ids).collect();
        let mis = max_independent_set(&build_conflict_graph(&family)).map_err(fmt_err)?;
        let optimum = exhaustive_optimal_lifetime(&world, &cfg, DEFAULT_STATE_CAP).map_err(fmt_err)?;
        ensure!(
            optimum == OracleLifetime::Finite(mis as u64),
            "seed {}: optimum {optimum:?}, independent set {mis}",
            seed - 1
        );
        total += mis;
        checked += 1;
    }
    Ok(format!("15 worlds agree, independent sets sum to {total}"))
}

// ---------------------------------------------------------------- 6

fn pruning_soundness() -> Outcome {
    let mut sets = 0;
    for seed in 0..12u64 {
        let n = 10 + (seed % 3) as usize;
        let (world, cfg) = small_world(500 + seed, n, 1);
        let bounds = active_count_bounds(&world, &cfg).map_err(fmt_err)?;
        for m in reliable_masks_direct(&world, &cfg) {
            let k = m.count_ones() as usize;
            ensure!(bounds.contains(k), "seed {seed}: reliable set of size {k} outside {bounds:?}");
            sets += 1;
        }
    }
    ensure!(sets > 0, "no reliable sets found, the check is vacuous");
    Ok(format!("{sets} reliable sets inside their bounds"))
}

// ---------------------------------------------------------------- 8

fn round_robin_certificate() -> Outcome {
    let start = Instant::now();
    let c = 2u32;
    let capacity = 2 * c;
    let (layout, base_cfg) = fixture("single_set.json", JammerKind::Rechargeable, 2, c);
    let copies = c as usize + 1;
    let per = layout.len();
    let jammers: Vec<Jammer> = (0..copies * per)
        .map(|id| Jammer::new(id, layout.jammers[id % per].position, JammerKind::Rechargeable, capacity))
        .collect();
    let cfg = NetworkConfig { c, ..base_cfg };
    let world = WorldModel::new(layout.storage, layout.fence, cfg.lambda)
        .and_then(|w| w.with_jammers(jammers))
        .map_err(fmt_err)?;
    let layout_ids: Vec<usize> = (0..per).collect();
    ensure!(reliable_direct(&world, &cfg, &layout_ids), "the layout itself is not reliable");

    let cert = infinite_lifetime_certificate(&world, &cfg).map_err(fmt_err)?;
    let Verdict::Infinite { plan } = cert.verdict else {
        return Err(format!("verdict {:?}", cert.verdict));
    };
    ensure!(plan.len() == copies, "plan has {} sets", plan.len());

    // One warm-up period from full batteries, then three periods that must
    // bring every battery back to the post-warm-up level.
    let warm = apply_all(&world.jammers, &round_robin_slots(&plan, copies), c)?;
    let table = ConstraintTable::new(&world, &cfg);
    let slots = round_robin_slots(&plan, 3 * copies);
    let trace = replay(&warm, &slots, None, &table, c).map_err(fmt_err)?;
    let levels = |s: &[Jammer]| s.iter().map(|j| j.battery).collect::<Vec<_>>();
    for k in 1..=3 {
        ensure!(levels(&trace[k * copies - 1]) == levels(&warm), "period {k} does not restore the batteries");
    }

    let max_slots = 10 * copies * (capacity / c) as usize;
    let greedy = greedy_schedule(&world, &cfg, max_slots).map_err(fmt_err)?;
    ensure!(
        greedy.lifetime == max_slots && greedy.termination == Termination::SlotCapReached,
        "greedy stopped at {} ({:?})",
        greedy.lifetime,
        greedy.termination
    );
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {}", secs(elapsed));
    Ok(format!("infinite verdict, 3 periods restore, greedy reaches {max_slots}, {}", secs(elapsed)))
}

fn apply_all(start: &[Jammer], slots: &[Vec<usize>], c: u32) -> Result<Vec<Jammer>, String> {
    let mut state = start.to_vec();
    for slot in slots {
        state = apply_slot(&state, slot, c).map_err(fmt_err)?;
    }
    Ok(state)
}

// ---------------------------------------------------------------- 9, 10

fn sweep_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/sweeps").join(name)
}

fn load_sweep(name: &str) -> Result<ExperimentSpec, String> {
    let text = std::fs::read_to_string(sweep_path(name)).map_err(|e| format!("{name}: {e}"))?;
    ExperimentSpec::from_toml_str(&text).map_err(|e| format!("{name}: {e}"))
}

/// Mean greedy lifetime per sweep value, in value order.
fn means(records: &[ExperimentRecord]) -> Vec<(f64, f64)> {
    let mut groups: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.algorithm == Algorithm::Greedy) {
        // non-negative values order like their bit patterns
        let e = groups.entry(r.value.to_bits()).or_insert((r.value, 0.0, 0));
        e.1 += r.lifetime as f64;
        e.2 += 1;
    }
    groups.into_values().map(|(v, sum, k)| (v, sum / k as f64)).collect()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

fn non_decreasing(m: &[(f64, f64)]) -> bool {
    m.windows(2).all(|w| w[1].1 >= w[0].1)
}

fn show(m: &[(f64, f64)]) -> String {
    let parts: Vec<String> = m.iter().map(|(v, l)| format!("{v}:{l:.1}")).collect();
    parts.join(" ")
}

struct SweepRun {
    means: Vec<(f64, f64)>,
    records: Vec<ExperimentRecord>,
}

fn run_sweep(name: &str) -> Result<SweepRun, String> {
    let spec = load_sweep(name)?;
    let records = run_experiment(&spec).map_err(|e| format!("{name}: {e}"))?;
    Ok(SweepRun {
        means: means(&records),
        records,
    })
}

fn trends(csv_reference: &mut Option<Vec<u8>>) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut check = |label: &str, ok: bool, detail: String| {
        println!("    {label}: {} [{detail}]", if ok { "ok" } else { "VIOLATED" });
        if !ok {
            failures.push(label.to_string());
        }
    };

    let n = run_sweep("desk-n.toml")?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = n.means.iter().copied().unzip();
    let rho = spearman(&xs, &ys);
    check("n", rho >= 0.9, format!("rho {rho:.3}; {}", show(&n.means)));

    let life = run_sweep("desk-lifespan.toml")?;
    let strictly = life.means.windows(2).all(|w| w[1].1 > w[0].1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = life.means.iter().copied().unzip();
    let r2 = pearson(&xs, &ys).powi(2);
    check("life span", strictly && r2 >= 0.9, format!("R2 {r2:.4}; {}", show(&life.means)));

    let d2 = run_sweep("desk-delta2.toml")?;
    check("delta2", non_decreasing(&d2.means), show(&d2.means));

    let eta10 = run_sweep("desk-eta-c10.toml")?;
    let eta20 = run_sweep("desk-eta-c20.toml")?;
    let above = eta10.means.len() == eta20.means.len()
        && eta10.means.iter().zip(&eta20.means).all(|(a, b)| a.0 == b.0 && a.1 >= b.1);
    check(
        "eta",
        non_decreasing(&eta10.means) && non_decreasing(&eta20.means) && above,
        format!("c=10 {}; c=20 {}", show(&eta10.means), show(&eta20.means)),
    );

    let cs = run_sweep("desk-c.toml")?;
    check("c", cs.means.windows(2).all(|w| w[1].1 <= w[0].1), show(&cs.means));

    let pj = run_sweep("desk-p_j.toml")?;
    let (arg, peak) = pj
        .means
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
        .map(|(i, m)| (i, m.1))
        .unwrap_or((0, 0.0));
    let last = pj.means.len().saturating_sub(1);
    let unimodal = arg > 0 && arg < last && peak > pj.means[0].1 && peak > pj.means[last].1;
    check("p_j", unimodal, show(&pj.means));

    let mut csv = Vec::new();
    emit_csv(&pj.records, &mut csv).map_err(fmt_err)?;
    *csv_reference = Some(csv);

    for run in [&n, &life, &d2, &eta10, &eta20, &cs, &pj] {
        let mut greedy: BTreeMap<(u64, u64), usize> = BTreeMap::new();
        for r in run.records.iter().filter(|r| r.algorithm == Algorithm::Greedy && r.feasible) {
            greedy.insert((r.value.to_bits(), r.seed), r.lifetime);
        }
        let within = run
            .records
            .iter()
            .filter(|r| r.algorithm == Algorithm::Greedy && r.feasible)
            .filter(|r| r.baseline <= greedy[&(r.value.to_bits(), r.seed)])
            .count();
        notes.push(format!("{within}/{}", greedy.len()));
    }
    println!("    baseline <= greedy on feasible starts, per sweep: {}", notes.join(" "));

    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30 * 60) {
        failures.push(format!("runtime {}", secs(elapsed)));
    }
    if failures.is_empty() {
        Ok(format!("all six trends hold, {}", secs(elapsed)))
    } else {
        Err(format!("violated: {}", failures.join(", ")))
    }
}

fn determinism(reference: Option<&[u8]>) -> Outcome {
    let reference = reference.map(<[u8]>::to_vec).map_or_else(
        || -> Result<Vec<u8>, String> {
            let run = run_sweep("desk-p_j.toml")?;
            let mut csv = Vec::new();
            emit_csv(&run.records, &mut csv).map_err(fmt_err)?;
            Ok(csv)
        },
        Ok,
    )?;
    let again = run_sweep("desk-p_j.toml")?;
    let mut csv = Vec::new();
    emit_csv(&again.records, &mut csv).map_err(fmt_err)?;
    ensure!(csv == reference, "CSV bytes differ between runs");
    Ok(format!("{} identical bytes", csv.len()))
}

// ----------------------------------------------------------------

fn report(number: u32, title: &str, outcome: Outcome, failed: &mut u32) {
    match outcome {
        Ok(detail) => println!("criterion {number:>2} PASS  {title}: {detail}"),
        Err(detail) => {
            *failed += 1;
            println!("criterion {number:>2} FAIL  {title}: {detail}");
        }
    }
}

fn main() {
    // cargo passes libtest flags such as --list or --quiet; listing reports
    // no tests so tooling does not run the whole suite just to enumerate it.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failed = 0;
    report(1, "worked example", worked_example(), &mut failed);
    report(2, "ILP soundness", ilp_soundness(), &mut failed);
    match small_cases() {
        Ok((cases, mrs_time)) => {
            report(3, "MRS optimality", mrs_optimality(&cases, mrs_time), &mut failed);
            report(4, "greedy bounds", greedy_bounds(&cases), &mut failed);
            report(5, "reduction cross-check", reduction_cross_check(), &mut failed);
            report(6, "pruning soundness", pruning_soundness(), &mut failed);
            report(7, "energy ledger", energy_ledger(&cases), &mut failed);
        }
        Err(e) => {
            for (k, title) in [(3, "MRS optimality"), (4, "greedy bounds"), (7, "energy ledger")] {
                report(k, title, Err(e.clone()), &mut failed);
            }
            report(5, "reduction cross-check", reduction_cross_check(), &mut failed);
            report(6, "pruning soundness", pruning_soundness(), &mut failed);
        }
    }
    report(8, "round-robin certificate", round_robin_certificate(), &mut failed);
    let mut csv = None;
    report(9, "sweep trends", trends(&mut csv), &mut failed);
    report(10, "determinism", determinism(csv.as_deref()), &mut failed);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
