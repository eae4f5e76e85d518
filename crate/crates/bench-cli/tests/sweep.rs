// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fs;
use std::path::Path;

use lfr_bench::config::{ModelKind, SweepConfig};
use lfr_bench::io::{self, IoError};
use lfr_bench::sweep::{self, load_results, run_sweep, run_sweep_limited, SweepError, RESULTS_FILE};
use lfr_core::evaluation::nmi;
use lfr_core::graph::Graph;
use lfr_core::partition::Partition;

fn small(out: &Path) -> SweepConfig {
    SweepConfig {
        model: ModelKind::Ba,
        n: 200,
        m: 5,
        mu_values: vec![0.2, 0.6],
        replicates: 3,
        algorithms: vec!["lp".into(), "louvain".into()],
        out: out.to_path_buf(),
        workers: 1,
        ..SweepConfig::default()
    }
}

fn results(dir: &Path) -> Vec<u8> {
    fs::read(dir.join(RESULTS_FILE)).unwrap()
}

#[test]
fn triangle_files_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let p = Partition::trivial(3);
    let (g2, p2) = io::io_roundtrip(&g, &p, dir.path()).unwrap();
    let sorted = |g: &Graph| {
        let mut e = g.edges().to_vec();
        e.sort_unstable();
        e
    };
    assert_eq!(sorted(&g2), sorted(&g));
    assert_eq!(p2, p);
    let first: Vec<_> = ["edges.tsv", "membership.tsv"]
        .iter()
        .map(|f| fs::read(dir.path().join(f)).unwrap())
        .collect();
    io::io_roundtrip(&g, &p, dir.path()).unwrap();
    for (f, bytes) in ["edges.tsv", "membership.tsv"].iter().zip(first) {
        assert_eq!(fs::read(dir.path().join(f)).unwrap(), bytes);
    }
}

#[test]
fn edge_list_comments_and_errors() {
    let p = Path::new("g.tsv");
    let g = io::parse_edge_list(p, "# a comment\n\n0\t1\n\n# more\n1\t2\n").unwrap();
    assert_eq!(g.edge_count(), 2);
    match io::parse_edge_list(p, "0\t1\n0 a\n") {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn external_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.tsv");
    fs::write(&path, "0\t10\n1\t10\n2\t99\n3\t99\n").unwrap();
    let p = io::ingest_external_partition(&path, 4).unwrap();
    assert_eq!(p.labels(), &[0, 0, 1, 1]);
    let same = Partition::from_labels(&[0, 0, 1, 1]);
    let other = Partition::from_labels(&[0, 1, 0, 1]);
    assert_eq!(nmi(&p, &other).unwrap(), nmi(&same, &other).unwrap());

    let lines: String = (0..10).filter(|&v| v != 7).map(|v| format!("{v}\t0\n")).collect();
    fs::write(&path, lines).unwrap();
    assert!(matches!(
        io::ingest_external_partition(&path, 10),
        Err(IoError::MissingNode(7))
    ));
}

#[test]
fn minimal_sweep_has_metrics_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig {
        n: 300,
        mu_values: vec![0.3],
        replicates: 1,
        algorithms: vec![],
        ..small(dir.path())
    };
    let s = run_sweep(&cfg).unwrap();
    assert_eq!((s.rows, s.failed), (1, 0));
    let table = load_results(&s.results).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert!(!table.columns.iter().any(|c| c.starts_with("nmi_")));
    assert!(table.rows[0].get("transitivity_global").is_some());
    assert!(dir.path().join("plots/ba_transitivity_global.tsv").exists());
}

#[test]
fn identical_config_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_sweep(&small(a.path())).unwrap();
    run_sweep(&small(b.path())).unwrap();
    assert_eq!(results(a.path()), results(b.path()));

    let c = tempfile::tempdir().unwrap();
    run_sweep(&SweepConfig {
        workers: 3,
        ..small(c.path())
    })
    .unwrap();
    assert_eq!(results(a.path()), results(c.path()));
}

#[test]
fn interrupted_sweep_resumes_to_same_file() {
    let whole = tempfile::tempdir().unwrap();
    run_sweep(&small(whole.path())).unwrap();
    let expected = results(whole.path());

    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let s = run_sweep_limited(&cfg, 2).unwrap();
    assert_eq!((s.rows, s.resumed), (2, 0));
    assert!(!dir.path().join("plots").exists());

    // A write cut off mid-line.
    let mut partial = results(dir.path());
    let rest = &expected[partial.len()..];
    let line_len = rest.iter().position(|&b| b == b'\n').unwrap();
    partial.extend_from_slice(&rest[..line_len / 3]);
    fs::write(dir.path().join(RESULTS_FILE), &partial).unwrap();

    let s = run_sweep_limited(&cfg, 1).unwrap();
    assert_eq!((s.rows, s.resumed), (3, 2));
    let s = run_sweep(&cfg).unwrap();
    assert_eq!((s.rows, s.resumed), (6, 3));
    assert_eq!(results(dir.path()), expected);

    let s = run_sweep(&cfg).unwrap();
    assert_eq!((s.rows, s.resumed), (6, 6));
    assert_eq!(results(dir.path()), expected);
}

#[test]
fn changed_config_refuses_to_resume() {
    let dir = tempfile::tempdir().unwrap();
    run_sweep_limited(&small(dir.path()), 1).unwrap();
    let changed = SweepConfig {
        base_seed: 9,
        ..small(dir.path())
    };
    assert!(matches!(run_sweep(&changed), Err(SweepError::ConfigChanged(_))));
}

#[test]
fn row_seeds_unique_and_plan_mu_major() {
    let cfg = SweepConfig::default();
    let plan = sweep::row_plan(&cfg);
    assert_eq!(plan.len(), 19 * 25);
    assert_eq!(plan[25], (0.1, 0));
    let mut seeds: Vec<u64> = (0..plan.len()).map(|r| sweep::row_seed(7, r)).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), plan.len());
    assert_eq!(sweep::row_seed(7, 3), 7 * 10007 + 3);
}

#[test]
fn failed_row_is_recorded_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig {
        n: 30,
        m: 2,
        c_min: Some(20),
        c_max: Some(20),
        mu_values: vec![0.3],
        replicates: 2,
        algorithms: vec![],
        ..small(dir.path())
    };
    let s = run_sweep(&cfg).unwrap();
    assert_eq!((s.rows, s.failed), (2, 2));
    let table = load_results(&s.results).unwrap();
    assert!(table.rows.iter().all(|r| r.error.is_some()));
}
