//! Searches for jammer positions whose minimal reliable sets are exactly a
//! requested family, by simulated annealing on the desk-scale geometry.
//!
//! ```text
//! cargo run --release --example search_fixture -- <n> <family> [seed] [iterations]
//! ```
//!
//! `family` lists the target sets as comma-separated id strings, for example
//! `0124,023,15`. Ids are single digits. On success the fixture is printed as
//! JSON (network config, storage, fence, positions) for use by the tests.

use std::process::ExitCode;

use jamsched::geometry::{Point, Rect, WorldModel};
use jamsched::mrs::enumerate_minimum_reliable_sets;
use jamsched::energy::{Jammer, JammerKind};
use jamsched::sinr::{ConstraintTable, NetworkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Required distance of every subset's worst fence ratio from the threshold.
const MARGIN: f64 = 0.05;
const CLEARANCE: f64 = 1.0;

struct Problem {
    n: usize,
    targets: Vec<u64>,
    storage: Rect,
    fence: Rect,
    cfg: NetworkConfig,
}

impl Problem {
    fn wanted(&self, mask: u64) -> bool {
        self.targets.iter().any(|&t| mask & t == t)
    }

    fn world(&self, positions: &[Point]) -> WorldModel {
        let jammers = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| Jammer::new(i, p, JammerKind::Unrechargeable, 1))
            .collect();
        WorldModel::new(self.storage, self.fence, self.cfg.lambda)
            .and_then(|w| w.with_jammers(jammers))
            .expect("positions are kept inside F minus S")
    }

    /// Hinge loss over all subsets on the normalized worst-point ratios.
    fn loss(&self, positions: &[Point], p_j: f64, gamma: f64) -> f64 {
        let cfg = NetworkConfig { p_j, gamma, ..self.cfg };
        let table = ConstraintTable::new(&self.world(positions), &cfg);
        let mut loss = 0.0;
        let full = (1u64 << self.n) - 1;
        let storage_ratio = (0..table.storage_points().len())
            .map(|s| table.storage_row(s).iter().sum::<f64>() / table.storage_limit())
            .fold(0.0, f64::max);
        loss += (storage_ratio - (1.0 - MARGIN)).max(0.0) * 10.0;
        for mask in 1..=full {
            let ratio = table
                .fence_required()
                .iter()
                .enumerate()
                .map(|(p, &req)| {
                    let row = table.fence_row(p);
                    (0..self.n).filter(|j| mask >> j & 1 == 1).map(|j| row[j]).sum::<f64>() / req
                })
                .fold(f64::INFINITY, f64::min);
            loss += if self.wanted(mask) {
                (1.0 + MARGIN - ratio).max(0.0)
            } else {
                (ratio - (1.0 - MARGIN)).max(0.0)
            };
        }
        loss
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Point {
        loop {
            let p = Point::new(
                rng.gen_range(self.fence.min_x + CLEARANCE..self.fence.max_x - CLEARANCE),
                rng.gen_range(self.fence.min_y + CLEARANCE..self.fence.max_y - CLEARANCE),
            );
            if self.admissible(p) {
                return p;
            }
        }
    }

    fn admissible(&self, p: Point) -> bool {
        let s = &self.storage;
        let f = &self.fence;
        let inside_fence = p.x >= f.min_x + CLEARANCE
            && p.x <= f.max_x - CLEARANCE
            && p.y >= f.min_y + CLEARANCE
            && p.y <= f.max_y - CLEARANCE;
        let outside_storage = p.x < s.min_x - CLEARANCE
            || p.x > s.max_x + CLEARANCE
            || p.y < s.min_y - CLEARANCE
            || p.y > s.max_y + CLEARANCE;
        inside_fence && outside_storage
    }
}

fn parse_family(text: &str) -> Option<Vec<u64>> {
    text.split(',')
        .map(|set| {
            set.chars()
                .map(|c| c.to_digit(10).map(|d| 1u64 << d))
                .sum::<Option<u64>>()
        })
        .collect()
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 {
        eprintln!("usage: search_fixture <n> <family> [seed] [iterations]");
        return ExitCode::FAILURE;
    }
    let n: usize = args[0].parse().expect("n must be an integer");
    let targets = parse_family(&args[1]).expect("family must be digit strings separated by commas");
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed must be an integer"));
    let iterations: usize = args.get(3).map_or(200_000, |s| s.parse().expect("iterations must be an integer"));

    let problem = Problem {
        n,
        targets,
        storage: Rect::new(15.0, 15.0, 25.0, 25.0).unwrap(),
        fence: Rect::new(0.0, 0.0, 40.0, 40.0).unwrap(),
        cfg: NetworkConfig {
            p_t: 10.0,
            p_j: 10.0,
            gamma: 2.0,
            delta1: 2.0,
            delta2: 0.5,
            c: 1,
            lambda: 2.0,
            epsilon: 0.5,
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<Point> = (0..n).map(|_| problem.random_point(&mut rng)).collect();
    let mut log_pj: f64 = 10f64.ln();
    let mut gamma = 2.0;
    let mut current = problem.loss(&positions, log_pj.exp(), gamma);
    let mut best = (current, positions.clone(), log_pj, gamma);

    for it in 0..iterations {
        if best.0 == 0.0 {
            break;
        }
        let temperature = 0.5 * (1.0 - it as f64 / iterations as f64) + 1e-4;
        let mut cand = positions.clone();
        let mut cand_pj = log_pj;
        let mut cand_gamma = gamma;
        if rng.gen_bool(0.1) {
            cand_pj += rng.gen_range(-0.2..0.2);
        } else if rng.gen_bool(0.05) {
            cand_gamma = (cand_gamma + rng.gen_range(-0.1..0.1)).clamp(2.0, 4.0);
        } else {
            let k = rng.gen_range(0..n);
            let step = 6.0 * temperature + 0.2;
            let p = Point::new(
                cand[k].x + rng.gen_range(-step..step),
                cand[k].y + rng.gen_range(-step..step),
            );
            if !problem.admissible(p) {
                continue;
            }
            cand[k] = p;
        }
        let loss = problem.loss(&cand, cand_pj.exp(), cand_gamma);
        if loss <= current || rng.gen_bool(((current - loss) / temperature).exp().min(1.0)) {
            positions = cand;
            log_pj = cand_pj;
            gamma = cand_gamma;
            current = loss;
            if current < best.0 {
                best = (current, positions.clone(), log_pj, gamma);
            }
        }
    }

    let (loss, positions, log_pj, gamma) = best;
    let round = |v: f64| (v * 100.0).round() / 100.0;
    let positions: Vec<Point> = positions.iter().map(|p| Point::new(round(p.x), round(p.y))).collect();
    let cfg = NetworkConfig {
        p_j: round(log_pj.exp()),
        gamma: round(gamma),
        ..problem.cfg
    };
    let problem = Problem { cfg, ..problem };
    let found = enumerate_minimum_reliable_sets(&problem.world(&positions), &cfg, None).expect("small world");
    let mut wanted: Vec<Vec<usize>> = problem
        .targets
        .iter()
        .map(|&t| (0..n).filter(|j| t >> j & 1 == 1).collect())
        .collect();
    wanted.sort();
    eprintln!("loss {loss:.4}, minimal sets {:?}", found.solutions);
    if found.solutions != wanted {
        eprintln!("no exact fixture found");
        return ExitCode::FAILURE;
    }
    let fixture = json!({
        "network": cfg,
        "storage": problem.storage,
        "fence": problem.fence,
        "positions": positions.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&fixture).unwrap());
    ExitCode::SUCCESS
}
