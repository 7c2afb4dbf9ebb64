use std::io::Write;

use entperc_core::generators::{gen_config_model, load_edge_list, save_edge_list};
use entperc_core::{DegreeModel, EdgeListOptions, GeneratorKind, GeneratorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn options(path: &std::path::Path) -> EdgeListOptions {
    EdgeListOptions {
        path: path.to_path_buf(),
        bidirectional_only: false,
        degree_cutoff: None,
    }
}

#[test]
fn saved_graph_loads_back_identically() {
    let m = DegreeModel::power_law_cutoff(2.0, 10.0, 1, None).unwrap();
    let g = gen_config_model(&m, 2_000, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.edges");
    save_edge_list(&g, &path).unwrap();
    let loaded = load_edge_list(&options(&path)).unwrap();
    assert_eq!(loaded.graph, g);
    assert_eq!(loaded.labels[17], "17");
}

#[test]
fn web_of_trust_style_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# signer signee").unwrap();
    for line in [
        "alice bob",
        "bob alice",
        "bob carol directed",
        "carol dave",
        "dave carol",
    ] {
        writeln!(file, "{line}").unwrap();
    }
    let both = EdgeListOptions {
        bidirectional_only: true,
        ..options(file.path())
    };
    let spec = GeneratorSpec {
        kind: GeneratorKind::EdgeList(both),
        n: 0,
        seed: 0,
    };
    let g = spec.generate(0).unwrap();
    assert_eq!(g.vertex_count(), 4);
    assert_eq!(g.edge_count(), 2);

    let all = load_edge_list(&options(file.path())).unwrap();
    assert_eq!(all.graph.edge_count(), 3);
    assert_eq!(all.labels, vec!["alice", "bob", "carol", "dave"]);

    let capped = EdgeListOptions {
        degree_cutoff: Some(2),
        ..options(file.path())
    };
    let cut = load_edge_list(&capped).unwrap();
    assert_eq!(cut.labels, vec!["alice", "dave"]);
    assert_eq!(cut.graph.edge_count(), 0);
}
