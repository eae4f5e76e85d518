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

mod common;

use common as oracle;
use lfr_core::detection::{detect, modularity, Algorithm};
use lfr_core::evaluation::nmi;
use lfr_core::metrics::{
    average_distance, centrality, centralization, degree_assortativity, transitivity, CentralityKind,
};
use lfr_core::{Graph, Partition, RandomSource};
use rand::Rng;

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn two_triangles_bridge() -> Graph {
    Graph::from_edge_list(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
}

#[test]
fn metrics_match_enumeration_on_small_graphs() {
    let mut rng = RandomSource::new(20);
    for case in 0..200 {
        let n = rng.gen_range(3..=7);
        let p = rng.gen_range(0.2..0.9);
        let g = oracle::random_graph(n, p, &mut rng);

        match (average_distance(&g), oracle::avg_distance(&g)) {
            (Ok(s), Some(want)) => assert!(close(s.mean, want), "case {case}: distance"),
            (Err(_), None) => {}
            (got, want) => panic!("case {case}: distance {got:?} vs {want:?}"),
        }

        let (t, c) = transitivity(&g);
        let (t_want, c_want) = oracle::transitivity(&g);
        assert!(close(t, t_want) && close(c, c_want), "case {case}: clustering");

        match (degree_assortativity(&g), oracle::assortativity(&g)) {
            (Some(a), Some(b)) => assert!(close(a, b), "case {case}: assortativity {a} vs {b}"),
            (None, None) => {}
            (a, b) => panic!("case {case}: assortativity {a:?} vs {b:?}"),
        }

        let bc = centrality(&g, CentralityKind::Betweenness);
        let cl = centrality(&g, CentralityKind::Closeness);
        for (v, (x, y)) in bc.iter().zip(oracle::betweenness(&g)).enumerate() {
            assert!(close(*x, y), "case {case}: betweenness of {v}");
        }
        for (v, (x, y)) in cl.iter().zip(oracle::closeness(&g)).enumerate() {
            assert!(close(*x, y), "case {case}: closeness of {v}");
        }

        let kinds: [(CentralityKind, fn(&Graph) -> Vec<f64>); 3] = [
            (CentralityKind::Degree, oracle::degrees_f64),
            (CentralityKind::Closeness, oracle::closeness),
            (CentralityKind::Betweenness, oracle::betweenness),
        ];
        for (kind, f) in kinds {
            let got = centralization(&centrality(&g, kind), kind, n).unwrap();
            let want = oracle::centralization(&g, f);
            assert!(close(got, want), "case {case}: {kind:?} centralization {got} vs {want}");
        }
    }
}

#[test]
fn star_and_complete_centralization() {
    for n in 3..12 {
        for kind in [CentralityKind::Degree, CentralityKind::Closeness, CentralityKind::Betweenness] {
            let s = oracle::star(n);
            let k = oracle::complete(n);
            assert_eq!(centralization(&centrality(&s, kind), kind, n).unwrap(), 1.0, "{kind:?} star {n}");
            assert_eq!(centralization(&centrality(&k, kind), kind, n).unwrap(), 0.0, "{kind:?} complete {n}");
        }
    }
}

#[test]
fn modularity_worked_examples() {
    let g = two_triangles_bridge();
    let split = Partition::from_dense(vec![0, 0, 0, 1, 1, 1]).unwrap();
    assert!(close(modularity(&g, &split).unwrap(), 5.0 / 14.0));
    assert!(close(oracle::modularity(&g, split.labels()), 5.0 / 14.0));
    assert!(close(modularity(&g, &Partition::trivial(6)).unwrap(), 0.0));

    let k4 = oracle::complete(4);
    let q = modularity(&k4, &Partition::singletons(4)).unwrap();
    assert!(close(q, -0.25));
    assert!(close(oracle::modularity(&k4, &[0, 1, 2, 3]), -0.25));

    let mut rng = RandomSource::new(4);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let g = oracle::random_graph(n, 0.5, &mut rng);
        if g.edge_count() == 0 {
            continue;
        }
        let p = oracle::random_partition(n, 3, &mut rng);
        assert!(close(modularity(&g, &p).unwrap(), oracle::modularity(&g, p.labels())));
    }
}

#[test]
fn nmi_worked_examples() {
    let a = Partition::from_blocks(5, &[vec![0, 1, 2], vec![3, 4]]).unwrap();
    let b = Partition::from_blocks(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap();
    let pinned = 0.432538067766312;
    assert!((nmi(&a, &b).unwrap() - pinned).abs() <= 1e-12);
    assert!((oracle::nmi(a.labels(), b.labels()) - pinned).abs() <= 1e-12);

    let c = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
    let d = Partition::from_blocks(4, &[vec![0, 2], vec![1, 3]]).unwrap();
    assert!(nmi(&c, &d).unwrap().abs() <= 1e-12);
    assert_eq!(nmi(&c, &c).unwrap(), 1.0);

    let mut rng = RandomSource::new(6);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let p = oracle::random_partition(n, rng.gen_range(1..=4), &mut rng);
        let q = oracle::random_partition(n, rng.gen_range(1..=4), &mut rng);
        let got = nmi(&p, &q).unwrap();
        assert!((got - oracle::nmi(p.labels(), q.labels())).abs() <= 1e-12);
    }
}

#[test]
fn nmi_against_merged_refinements_exhaustive() {
    for n in 1..=7 {
        for labels in oracle::set_partitions(n) {
            let p = Partition::from_dense(labels.clone()).unwrap();
            let one = Partition::trivial(n);
            let got = nmi(&p, &one).unwrap();
            let want = oracle::nmi(&labels, &vec![0; n]);
            assert!((got - want).abs() <= 1e-12, "{labels:?}");
        }
    }
}

#[test]
fn optimizers_near_exhaustive_optimum() {
    let mut rng = RandomSource::new(8);
    let mut within = [0usize; 2];
    let mut cases = 0;
    while cases < 50 {
        let n = rng.gen_range(4..=8);
        let g = oracle::random_graph(n, rng.gen_range(0.25..0.6), &mut rng);
        if g.edge_count() == 0 {
            continue;
        }
        cases += 1;
        let best = oracle::best_modularity(&g);
        for (slot, alg) in [Algorithm::FastGreedy, Algorithm::Louvain].into_iter().enumerate() {
            let q = detect(&g, alg, cases as u64).unwrap().modularity;
            assert!(q <= best + TOL, "{alg} beat the optimum");
            if q >= best - 0.02 {
                within[slot] += 1;
            }
        }
    }
    assert!(within[0] >= 45, "fastgreedy within 0.02 on {}/50", within[0]);
    assert!(within[1] >= 45, "louvain within 0.02 on {}/50", within[1]);
}

#[test]
fn exhaustive_optimum_examples() {
    let g = two_triangles_bridge();
    assert!(close(oracle::best_modularity(&g), 5.0 / 14.0));
    for alg in [Algorithm::FastGreedy, Algorithm::Louvain] {
        let d = detect(&g, alg, 1).unwrap();
        assert_eq!(d.partition.blocks(), vec![vec![0, 1, 2], vec![3, 4, 5]], "{alg}");
    }
    let k4 = oracle::complete(4);
    assert!(close(oracle::best_modularity(&k4), 0.0));
    let d = detect(&k4, Algorithm::FastGreedy, 0).unwrap();
    assert_eq!(d.partition.community_count(), 1);
}
