use nocmap::benchgen::{generate, preset};
use nocmap::{simulate, Mapping, NocParams, Tile};

fn static_share(params: NocParams) -> f64 {
    let p = preset("3x3/3").unwrap();
    let app = generate(&p.config).unwrap();
    let m = Mapping::new(app.cores.iter().map(|c| (c.id, Tile(c.id.0 + 1)))).unwrap();
    let r = simulate(&app, &m, &p.mesh, &params).unwrap();
    r.est_noc().aj() / r.enoc().aj()
}

#[test]
fn t035_leakage_is_marginal() {
    let s = static_share(NocParams::t035());
    assert!((0.004..=0.006).contains(&s), "static share {s}");
}

#[test]
fn t007_leakage_is_a_fifth() {
    let s = static_share(NocParams::t007());
    assert!((0.18..=0.22).contains(&s), "static share {s}");
}
