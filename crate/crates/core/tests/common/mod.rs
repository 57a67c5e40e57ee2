//! Shared helpers for the integration tests: fixture loading, small random
//! worlds and reference computations written directly from the model
//! formulas, independent of the library's constraint tables.

#![allow(dead_code)]

use std::path::PathBuf;

use jamsched::energy::{Jammer, JammerKind};
use jamsched::geometry::{distance, distance_to_storage, sample_positions, Point, Rect, WorldModel};
use jamsched::sinr::NetworkConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Deserialize)]
struct FixtureFile {
    network: NetworkConfig,
    storage: Rect,
    fence: Rect,
    positions: Vec<[f64; 2]>,
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Loads a fixture and gives every jammer the same kind and a full battery of
/// `lifespan * c` units, with `c` overriding the stored value.
pub fn fixture(name: &str, kind: JammerKind, lifespan: u32, c: u32) -> (WorldModel, NetworkConfig) {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture file exists");
    let file: FixtureFile = serde_json::from_str(&text).expect("fixture parses");
    let cfg = NetworkConfig { c, ..file.network };
    let jammers = file
        .positions
        .iter()
        .enumerate()
        .map(|(i, p)| Jammer::new(i, Point::new(p[0], p[1]), kind, lifespan * c))
        .collect();
    let world = WorldModel::new(file.storage, file.fence, cfg.lambda)
        .unwrap()
        .with_jammers(jammers)
        .unwrap();
    (world, cfg)
}

/// 40 m fence around a centered 10 m storage square.
pub fn desk_geometry(lambda: f64) -> WorldModel {
    let storage = Rect::new(15.0, 15.0, 25.0, 25.0).unwrap();
    let fence = Rect::new(0.0, 0.0, 40.0, 40.0).unwrap();
    WorldModel::new(storage, fence, lambda).unwrap()
}

/// Physics under which a handful of desk-scale jammers has minimal reliable
/// sets of three to five members.
pub fn small_world_config() -> NetworkConfig {
    NetworkConfig {
        p_t: 10.0,
        p_j: 20.0,
        gamma: 2.0,
        delta1: 2.0,
        delta2: 0.5,
        c: 10,
        lambda: 2.0,
        epsilon: 0.5,
    }
}

/// `n` unrechargeable jammers at seeded positions with life spans drawn from
/// `1..=max_lifespan`.
pub fn small_world(seed: u64, n: usize, max_lifespan: u32) -> (WorldModel, NetworkConfig) {
    let cfg = small_world_config();
    let base = desk_geometry(cfg.lambda);
    let (positions, _) = sample_positions(&base.storage, &base.fence, n, seed, cfg.epsilon).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let jammers = positions
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let w = rng.gen_range(1..=max_lifespan);
            Jammer::new(i, p, JammerKind::Unrechargeable, w * cfg.c)
        })
        .collect();
    (base.with_jammers(jammers).unwrap(), cfg)
}

/// Reliability straight from the two threshold inequalities, with the same
/// relative slack as the library.
pub fn reliable_direct(world: &WorldModel, cfg: &NetworkConfig, set: &[usize]) -> bool {
    const TOL: f64 = 1e-9;
    if set.is_empty() {
        return false;
    }
    let gain = |p: Point| -> f64 {
        set.iter()
            .map(|&j| distance(world.jammers[j].position, p).powf(-cfg.gamma))
            .sum()
    };
    let limit = cfg.p_t / (cfg.p_j * cfg.delta1);
    let storage_ok = world
        .storage_boundary
        .points
        .iter()
        .all(|&s| gain(s) <= limit * (1.0 + TOL));
    let fence_ok = world.fence_boundary.points.iter().all(|&p| {
        let need = cfg.p_t * distance_to_storage(p, &world.storage).powf(-cfg.gamma) / (cfg.p_j * cfg.delta2);
        gain(p) >= need * (1.0 - TOL)
    });
    storage_ok && fence_ok
}

/// Ids in bit mask `m`.
pub fn ids(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

/// Every reliable subset as a bit mask, by direct evaluation.
pub fn reliable_masks_direct(world: &WorldModel, cfg: &NetworkConfig) -> Vec<u64> {
    let n = world.len();
    assert!(n <= 16, "direct scan is for small worlds");
    (1u64..1 << n).filter(|&m| reliable_direct(world, cfg, &ids(m))).collect()
}

/// Energy consumed minus energy harvested, counted jammer by jammer.
pub fn delta_direct(jammers: &[Jammer], set: &[usize], c: u32) -> i64 {
    jammers
        .iter()
        .map(|j| {
            if set.contains(&j.id) {
                i64::from(c)
            } else if j.kind == JammerKind::Rechargeable && j.battery < j.capacity {
                -1
            } else {
                0
            }
        })
        .sum()
}

/// Smallest achievable delta over reliable sets of usable jammers.
pub fn min_delta_direct(world: &WorldModel, cfg: &NetworkConfig, jammers: &[Jammer]) -> Option<i64> {
    let alive: Vec<usize> = jammers.iter().filter(|j| j.battery >= cfg.c).map(|j| j.id).collect();
    (1u64..1 << alive.len())
        .map(|m| ids(m).into_iter().map(|k| alive[k]).collect::<Vec<_>>())
        .filter(|set| reliable_direct(world, cfg, set))
        .map(|set| delta_direct(jammers, &set, cfg.c))
        .min()
}

pub fn total_battery(jammers: &[Jammer]) -> i64 {
    jammers.iter().map(|j| i64::from(j.battery)).sum()
}
