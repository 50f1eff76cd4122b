#![allow(dead_code)]

use nocmap::benchgen::{generate, BenchConfig};
use nocmap::{Cdcg, Mapping, Mesh, NocParams, Power, Tile, Time};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub app: Cdcg,
    pub mapping: Mapping,
    pub mesh: Mesh,
    pub params: NocParams,
}

pub fn random_mapping(app: &Cdcg, mesh: &Mesh, rng: &mut impl Rng) -> Mapping {
    let mut tiles: Vec<u32> = (1..=mesh.tiles()).collect();
    tiles.shuffle(rng);
    Mapping::new(app.cores.iter().zip(tiles).map(|(c, t)| (c.id, Tile(t)))).unwrap()
}

/// Small generated application on a small mesh with randomized timing.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mesh = Mesh::new(rng.gen_range(2..=4), rng.gen_range(1..=3)).unwrap();
    let max_cores = mesh.tiles().min(8) as usize;
    let n_cores = rng.gen_range(2..=max_cores.max(2));
    let n_packets = rng.gen_range(n_cores.div_ceil(2)..=14);
    let cfg = BenchConfig {
        n_cores,
        n_packets,
        volume_range: (1, 64),
        comp_range: (Time::ZERO, Time::from_ns(30)),
        max_fanout: 3,
        seed,
        total_bits: None,
    };
    let app = generate(&cfg).unwrap();
    let mapping = random_mapping(&app, &mesh, &mut rng);
    let mut params = NocParams::unit_example();
    params.tr = rng.gen_range(1..=3);
    params.tl = rng.gen_range(1..=2);
    params.lambda = Time::from_ns(rng.gen_range(1..=2));
    params.flit_width = rng.gen_range(1..=8);
    params.ps_router = Power::from_pj_per_ns(0.1);
    Instance { app, mapping, mesh, params }
}
