//! Metric and evaluation results checked against direct, independent
//! computations: dense linear solves, eigendecompositions and brute force.

mod common;

use chrono::Datelike;
use citeval_core::eval::{self, spearman, AgeGrouping};
use citeval_core::metrics::{
    citation_count, citerank, collective_influence, h_index, hits, leaderrank, pagerank, semi_local_centrality, yccp,
};
use citeval_core::{CitationNetwork, MetricConfig, NodeRecord, ScoreVector, SeminalSet, DAYS_PER_YEAR};
use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

#[test]
fn pagerank_matches_linear_solve() {
    let mut r = rng(101);
    for _ in 0..100 {
        let density = r.random_range(0.05..0.3);
        let net = random_graph(&mut r, 50, density, 5);
        let cfg = MetricConfig::default();
        let p = pagerank(&net, &cfg).unwrap();
        let exact = solve_damped(&net, cfg.damping, &DVector::from_element(50, 1.0 / 50.0));
        assert!(max_abs_diff(p.scores(), exact.as_slice()) < 1e-6);
        assert_eq!(argmax(p.scores()), argmax(exact.as_slice()));
    }
}

#[test]
fn pagerank_other_dampings() {
    let mut r = rng(102);
    for alpha in [0.15, 0.85, 0.95] {
        let net = random_graph(&mut r, 40, 0.1, 3);
        let cfg = MetricConfig { damping: alpha, ..Default::default() };
        let p = pagerank(&net, &cfg).unwrap();
        let exact = solve_damped(&net, alpha, &DVector::from_element(40, 1.0 / 40.0));
        assert!(max_abs_diff(p.scores(), exact.as_slice()) < 1e-6);
    }
}

#[test]
fn citerank_matches_linear_solve() {
    let mut r = rng(103);
    for _ in 0..30 {
        let net = {
            let p = r.random_range(0.05..0.3);
            random_graph(&mut r, 50, p, 8)
        };
        let cfg = MetricConfig { tau_days: r.random_range(0.5..5.0) * DAYS_PER_YEAR, ..Default::default() };
        let t = citerank(&net, &cfg).unwrap();
        let raw: Vec<f64> =
            (0..net.len()).map(|i| (-((net.as_of() - net.date(i)).num_days() as f64) / cfg.tau_days).exp()).collect();
        let total: f64 = raw.iter().sum();
        let rho = DVector::from_iterator(net.len(), raw.iter().map(|x| x / total));
        let exact = solve_damped(&net, cfg.damping, &rho);
        assert!(max_abs_diff(t.scores(), exact.as_slice()) < 1e-6);
    }
}

#[test]
fn leaderrank_matches_stationary_solve() {
    let mut r = rng(104);
    for _ in 0..30 {
        let net = {
            let p = r.random_range(0.02..0.2);
            random_graph(&mut r, 40, p, 3)
        };
        let n = net.len();
        let exact = exact_leaderrank(&net);
        let l = leaderrank(&net, &MetricConfig::default()).unwrap();
        assert!(max_abs_diff(l.scores(), &exact) < 1e-6);
        assert!((l.scores().iter().sum::<f64>() - (n + 1) as f64).abs() < 1e-6);
    }
}

#[test]
fn hits_matches_principal_eigenvectors() {
    let mut r = rng(105);
    let mut checked = 0;
    for _ in 0..60 {
        let net = {
            let p = r.random_range(0.05..0.3);
            random_graph(&mut r, 40, p, 3)
        };
        let n = net.len();
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (i, j) in net.edges() {
            a[(i, j)] = 1.0;
        }
        let (Some(auth), Some(hub)) =
            (principal_eigenvector(a.transpose() * &a), principal_eigenvector(&a * a.transpose()))
        else {
            continue;
        };
        let h = hits(&net, &MetricConfig::default()).unwrap();
        assert!(cosine(h.authority.scores(), &auth) > 1.0 - 1e-6);
        assert!(cosine(h.hub.scores(), &hub) > 1.0 - 1e-6);
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} graphs had a spectral gap");
}

#[test]
fn count_and_neighborhood_metrics_match_brute_force() {
    let mut r = rng(106);
    for round in 0..50 {
        let n = r.random_range(2..=200);
        let net = if round % 2 == 0 {
            {
                let p = r.random_range(0.005..0.08);
                random_graph(&mut r, n, p, 4)
            }
        } else {
            {
                let p = r.random_range(1..6);
                random_dag(&mut r, n, p, 4)
            }
        };
        let adj = adjacency(&net);
        assert_eq!(h_index(&net).scores(), brute_h_index(&adj).as_slice());
        for level in [1, 2] {
            let cfg = MetricConfig { ci_level: level, ..Default::default() };
            assert_eq!(collective_influence(&net, &cfg).unwrap().scores(), brute_ci(&adj, level).as_slice());
        }
        assert_eq!(semi_local_centrality(&net).scores(), brute_slc(&adj).as_slice());
        assert_eq!(yccp(&net).scores(), brute_yccp(&net).as_slice());
    }
}

#[test]
fn spearman_matches_naive_ranks() {
    let mut r = rng(107);
    for _ in 0..200 {
        let n = r.random_range(3..120);
        // Small integer ranges force plenty of ties.
        let hi = r.random_range(2..30);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(0..hi) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| r.random_range(0..hi) as f64 * 0.5).collect();
        match spearman(&a, &b) {
            Some(rho) => assert!((rho - naive_spearman(&a, &b)).abs() < 1e-12),
            None => assert!(naive_spearman(&a, &b).is_nan()),
        }
    }
}

/// Snapshot rebuilt from the raw records, independent of the prefix logic.
fn rebuild_snapshot(net: &CitationNetwork, cutoff: citeval_core::Date) -> CitationNetwork {
    let nodes: Vec<NodeRecord> =
        (0..net.len()).filter(|&i| net.date(i) <= cutoff).map(|i| NodeRecord::new(net.id(i), net.date(i))).collect();
    let mut builder = citeval_core::NetworkBuilder::from_nodes(nodes).unwrap().as_of(cutoff.min(net.as_of())).unwrap();
    for (i, j) in net.edges().filter(|&(i, j)| net.date(i) <= cutoff && net.date(j) <= cutoff) {
        builder.add_edge(net.id(i), net.id(j));
    }
    builder.finish().0
}

/// Same month and day `years` later; Feb 29 falls back to Feb 28.
fn anniversary(d: citeval_core::Date, years: u32) -> citeval_core::Date {
    let y = d.year() + years as i32;
    citeval_core::Date::from_ymd_opt(y, d.month(), d.day()).unwrap_or_else(|| date(y, 2, 28))
}

#[test]
fn age_curves_match_per_snapshot_recomputation() {
    let params = citeval_core::synth::SynthParams {
        nodes: 3_000,
        years: 8,
        seminal: 60,
        seminal_pool: 0.1,
        seed: 5,
        ..Default::default()
    };
    let data = citeval_core::synth::generate_synthetic(&params).unwrap();
    let net = &data.network;
    let (z, groups) = (0.02, 10);
    let metric = |snap: &CitationNetwork| -> ScoreVector { pagerank(snap, &MetricConfig::default()).unwrap() };
    let curve = eval::age_curves(net, &data.seminal, z, groups, |snap| Ok(metric(snap))).unwrap();

    let last_year = net.as_of().year() - i32::from(net.as_of() != date(net.as_of().year(), 12, 31));
    let cutoffs: Vec<_> = (net.first_date().year()..=last_year).map(|y| date(y, 12, 31)).collect();
    let per_snapshot: Vec<(usize, Vec<usize>, Vec<f64>)> = cutoffs
        .iter()
        .map(|&c| {
            let snap = rebuild_snapshot(net, c);
            let top = naive_top(metric(&snap).scores(), z);
            let weights = naive_weights(&top, snap.len(), groups);
            (snap.len(), top, weights)
        })
        .collect();
    for point in &curve {
        let (mut ir, mut nir, mut eligible) = (0.0, 0.0, 0);
        for &s in data.seminal.nodes() {
            let target = anniversary(net.date(s), point.dt_years);
            let Some(k) = cutoffs.iter().position(|&c| c >= target) else { continue };
            eligible += 1;
            let (len, top, weights) = &per_snapshot[k];
            if s < *len && top.contains(&s) {
                ir += 1.0;
                nir += weights[s];
            }
        }
        assert_eq!(point.eligible, eligible, "dt {}", point.dt_years);
        assert!((point.ir - ir / eligible as f64).abs() < 1e-15);
        assert!((point.nir - nir / eligible as f64).abs() < 1e-12);
    }
    assert!(curve.iter().any(|p| p.ir > 0.0));
}

#[test]
fn ir_and_nir_match_naive_count() {
    let mut r = rng(108);
    for _ in 0..30 {
        let n = r.random_range(200..800);
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..50) as f64).collect();
        let sv = ScoreVector::new("m", scores.clone());
        let seminal = SeminalSet::from_indices((0..n).filter(|_| r.random_bool(0.1)).collect());
        if seminal.is_empty() {
            continue;
        }
        let z = [0.01, 0.02, 0.05, 0.1][r.random_range(0..4)];
        let groups = r.random_range(1..=40);
        let top = naive_top(&scores, z);
        let weights = naive_weights(&top, n, groups);
        let hits: Vec<usize> = seminal.nodes().iter().copied().filter(|s| top.contains(s)).collect();
        let ir = hits.len() as f64 / seminal.len() as f64;
        let nir = hits.iter().map(|&s| weights[s]).sum::<f64>() / seminal.len() as f64;
        let grouping = AgeGrouping::new(n, groups).unwrap();
        assert_eq!(eval::identification_rate(&sv, &seminal, z).unwrap(), ir);
        assert!((eval::normalized_identification_rate(&sv, &seminal, &grouping, z).unwrap() - nir).abs() < 1e-12);
    }
}

#[test]
fn citation_count_is_indegree() {
    let mut r = rng(109);
    let net = random_graph(&mut r, 80, 0.1, 2);
    let adj = adjacency(&net);
    let expected: Vec<f64> = (0..80).map(|j| (0..80).filter(|&i| adj[i][j]).count() as f64).collect();
    assert_eq!(citation_count(&net).scores(), expected.as_slice());
}
