use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn currimap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_currimap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = currimap(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn pipeline_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("five_courses.json");
    let rules = fixture("rules.csv");
    ok(&[
        "pipeline",
        "--corpus",
        p(&corpus),
        "--rules",
        p(&rules),
        "--out",
        p(dir.path()),
    ]);
    for name in currimap_core::pipeline::OUTPUT_FILES {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    let golden = fs::read(fixture("five_courses.manifest.json")).unwrap();
    assert_eq!(fs::read(dir.path().join("manifest.json")).unwrap(), golden);
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "min_edge_weight = 2\ntree_mode = \"undirected\"\n").unwrap();
    let out = dir.path().join("out");
    let corpus = fixture("five_courses.json");
    ok(&[
        "pipeline",
        "--corpus",
        p(&corpus),
        "--config",
        p(&config),
        "--out",
        p(&out),
        "--seed",
        "5",
    ]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["min_edge_weight"], 2);
    assert_eq!(manifest["config"]["seed"], 5);
    assert_eq!(manifest["config"]["tree_mode"], "undirected");
}

#[test]
fn subcommand_chain_reproduces_pipeline_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = fixture("five_courses.json");
    let rules = fixture("rules.csv");
    let full = d.join("full");
    ok(&[
        "pipeline",
        "--corpus",
        p(&corpus),
        "--rules",
        p(&rules),
        "--out",
        p(&full),
    ]);

    let net = d.join("net.json");
    let thr = d.join("thr.json");
    let scc = d.join("scc.json");
    let tree = d.join("tree.json");
    ok(&[
        "build",
        "--corpus",
        p(&corpus),
        "--rules",
        p(&rules),
        "--out",
        p(&net),
    ]);
    ok(&[
        "filter",
        "--input",
        p(&net),
        "--min-edge-weight",
        "3",
        "--out",
        p(&thr),
    ]);
    ok(&["scc", "--input", p(&thr), "--out", p(&scc)]);
    ok(&["mst", "--input", p(&scc), "--out", p(&tree)]);
    let read = |path: PathBuf| fs::read_to_string(path).unwrap();

    assert_eq!(read(net.clone()), read(full.join("network.json")));
    assert_eq!(read(scc.clone()), read(full.join("filtered.json")));
    assert_eq!(read(tree.clone()), read(full.join("backbone.json")));
    assert_eq!(
        ok(&["communities", "--input", p(&scc)]),
        read(full.join("communities.csv"))
    );
    for (input, stem) in [(&scc, "filtered"), (&tree, "backbone")] {
        for ext in ["dot", "graphml", "csv"] {
            let text = ok(&["export", "--input", p(input), "--format", ext]);
            assert_eq!(
                text,
                read(full.join(format!("{stem}.{ext}"))),
                "{stem}.{ext}"
            );
        }
    }
    assert_eq!(
        ok(&["ingest", "--corpus", p(&corpus), "--rules", p(&rules)]),
        read(full.join("corpus.json"))
    );
    assert_eq!(
        ok(&["freq", "--corpus", p(&corpus), "--rules", p(&rules)]),
        read(full.join("frequencies.csv"))
    );
    assert_eq!(
        ok(&[
            "freq",
            "--corpus",
            p(&corpus),
            "--rules",
            p(&rules),
            "--top-k",
            "20"
        ]),
        read(full.join("top_topics.csv"))
    );
}

#[test]
fn mst_accepts_distance_documents() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full");
    let corpus = fixture("five_courses.json");
    ok(&["pipeline", "--corpus", p(&corpus), "--out", p(&full)]);
    let tree = ok(&["mst", "--input", p(&full.join("distances.json"))]);
    assert_eq!(
        tree,
        fs::read_to_string(full.join("backbone.json")).unwrap()
    );
    let undirected = ok(&[
        "mst",
        "--input",
        p(&full.join("distances.json")),
        "--tree-mode",
        "undirected",
    ]);
    assert!(
        undirected.contains("\"kind\": \"backbone\"")
            || undirected.contains("\"kind\":\"backbone\"")
    );
}

#[test]
fn exit_codes_classify_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        currimap(&["build", "--corpus", p(&missing)]).status.code(),
        Some(2)
    );
    assert_eq!(
        currimap(&["pipeline", "--corpus", p(&missing)])
            .status
            .code(),
        Some(2)
    );

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"courses\": [").unwrap();
    let out = currimap(&["build", "--corpus", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let empty = dir.path().join("empty.tsv");
    fs::write(&empty, "c1\t0\tgraphs\nc1\t1\t\n").unwrap();
    assert_eq!(
        currimap(&["ingest", "--corpus", p(&empty)]).status.code(),
        Some(1)
    );

    let corpus = fixture("five_courses.json");
    assert_eq!(
        currimap(&["pipeline", "--corpus", p(&corpus), "--min-edge-weight", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        currimap(&[
            "pipeline",
            "--corpus",
            p(&corpus),
            "--root",
            "nope",
            "--out",
            p(dir.path())
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(currimap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        currimap(&["export", "--input", p(&corpus), "--format", "png"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(currimap(&["--version"]).status.code(), Some(0));
}
