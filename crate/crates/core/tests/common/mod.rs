#![allow(dead_code)]

use chrono::Datelike;
use citeval_core::{CitationNetwork, Date, NodeRecord};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn date(y: i32, m: u32, d: u32) -> Date {
    Date::from_ymd_opt(y, m, d).unwrap()
}

/// Random directed graph: `n` nodes dated over `years` years from 1990,
/// every ordered pair linked with probability `density` (either direction,
/// so citations may predate their target).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64, years: i32) -> CitationNetwork {
    let base = date(1990, 1, 1);
    let span = (date(1990 + years, 1, 1) - base).num_days() as u64;
    let nodes: Vec<NodeRecord> =
        (0..n).map(|i| NodeRecord::new(format!("v{i}"), base + chrono::Days::new(rng.random_range(0..span)))).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                edges.push((format!("v{i}"), format!("v{j}")));
            }
        }
    }
    let (net, summary) =
        CitationNetwork::from_records(nodes, edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
    assert_eq!(summary.rejected(), 0);
    net
}

/// Random citation DAG: every node cites up to `refs` distinct older nodes.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, refs: usize, years: i32) -> CitationNetwork {
    let base = date(1990, 1, 1);
    let span = (date(1990 + years, 1, 1) - base).num_days() as u64;
    let mut days: Vec<u64> = (0..n).map(|_| rng.random_range(0..span)).collect();
    days.sort_unstable();
    let nodes: Vec<NodeRecord> = days
        .iter()
        .enumerate()
        .map(|(i, &d)| NodeRecord::new(format!("v{i:05}"), base + chrono::Days::new(d)))
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        for _ in 0..refs {
            let j = rng.random_range(0..i);
            edges.push((format!("v{i:05}"), format!("v{j:05}")));
        }
    }
    CitationNetwork::from_records(nodes, edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap().0
}

/// Dense adjacency `a[i][j] = true` when `i` cites `j`.
pub fn adjacency(net: &CitationNetwork) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; net.len()]; net.len()];
    for (i, j) in net.edges() {
        a[i][j] = true;
    }
    a
}

/// Column-stochastic walk matrix with dangling columns spread uniformly.
pub fn walk_matrix(net: &CitationNetwork) -> DMatrix<f64> {
    let n = net.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let out = net.references(j);
        if out.is_empty() {
            for i in 0..n {
                m[(i, j)] = 1.0 / n as f64;
            }
        } else {
            for &i in out {
                m[(i as usize, j)] += 1.0 / out.len() as f64;
            }
        }
    }
    m
}

pub fn solve_damped(net: &CitationNetwork, alpha: f64, teleport: &DVector<f64>) -> DVector<f64> {
    let n = net.len();
    let system = DMatrix::identity(n, n) - walk_matrix(net) * alpha;
    system.lu().solve(&(teleport * (1.0 - alpha))).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best })
}

pub fn principal_eigenvector(m: DMatrix<f64>) -> Option<Vec<f64>> {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (l1, l2) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    // A near-degenerate top eigenvalue has no unique principal direction.
    if l1 - l2 < 1e-3 * l1 {
        return None;
    }
    let v = eig.eigenvectors.column(order[0]);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    let total = v.sum() * sign;
    Some(v.iter().map(|x| x * sign / total).collect())
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

pub fn brute_h_index(adj: &[Vec<bool>]) -> Vec<f64> {
    let n = adj.len();
    let indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| adj[i][j]).count()).collect();
    (0..n)
        .map(|i| (0..=n).rev().find(|&h| (0..n).filter(|&j| adj[j][i] && indeg[j] >= h).count() >= h).unwrap() as f64)
        .collect()
}

pub fn brute_ci(adj: &[Vec<bool>], level: usize) -> Vec<f64> {
    let n = adj.len();
    let inf = usize::MAX / 4;
    let mut dist = vec![vec![inf; n]; n];
    for i in 0..n {
        dist[i][i] = 0;
        for j in 0..n {
            if adj[i][j] {
                dist[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    let excess: Vec<i64> = (0..n).map(|j| ((0..n).filter(|&i| adj[i][j]).count() as i64 - 1).max(0)).collect();
    (0..n)
        .map(|i| (excess[i] * (0..n).filter(|&j| dist[i][j] == level).map(|j| excess[j]).sum::<i64>()) as f64)
        .collect()
}

pub fn brute_slc(adj: &[Vec<bool>]) -> Vec<f64> {
    let n = adj.len();
    let reach: Vec<u64> = (0..n)
        .map(|k| (0..n).filter(|&m| m != k && (adj[m][k] || (0..n).any(|j| adj[j][k] && adj[m][j]))).count() as u64)
        .collect();
    let q: Vec<u64> = (0..n).map(|j| (0..n).filter(|&k| adj[k][j]).map(|k| reach[k]).sum()).collect();
    (0..n).map(|i| (0..n).filter(|&j| adj[j][i]).map(|j| q[j]).sum::<u64>() as f64).collect()
}

pub fn brute_yccp(net: &CitationNetwork) -> Vec<f64> {
    let n = net.len();
    let year = |i: usize| net.date(i).year();
    (0..n)
        .map(|i| {
            let cohort: Vec<usize> = (0..n).filter(|&j| year(j) == year(i)).collect();
            let below = cohort.iter().filter(|&&j| net.indegree(j) < net.indegree(i)).count();
            below as f64 / cohort.len() as f64
        })
        .collect()
}

pub fn naive_spearman(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|x| {
                let less = v.iter().filter(|y| *y < x).count() as f64;
                let equal = v.iter().filter(|y| *y == x).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

/// Top set by sorting (score desc, index asc) from scratch.
pub fn naive_top(scores: &[f64], z: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let k = (z * scores.len() as f64 + 1e-9).floor() as usize;
    order.truncate(k);
    order
}

/// NIR contribution weights recomputed from a fresh group assignment.
pub fn naive_weights(top: &[usize], n: usize, groups: usize) -> Vec<f64> {
    let (base, rem) = (n / groups, n % groups);
    let mut bounds = vec![0];
    for g in 0..groups {
        bounds.push(bounds[g] + base + usize::from(g < rem));
    }
    let group = |i: usize| (0..groups).find(|&g| i < bounds[g + 1]).unwrap();
    let mut hist = vec![0usize; groups];
    for &i in top {
        hist[group(i)] += 1;
    }
    let expected = top.len() as f64 / groups as f64;
    (0..n).map(|i| (expected / hist[group(i)] as f64).min(1.0)).collect()
}

/// LeaderRank from a direct stationary solve of the walk with the ground node.
pub fn exact_leaderrank(net: &CitationNetwork) -> Vec<f64> {
    let n = net.len();
    // Column j holds the transition probabilities out of j; index n is the ground.
    let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
    for j in 0..n {
        let out = net.references(j);
        let share = 1.0 / (out.len() + 1) as f64;
        for &i in out {
            m[(i as usize, j)] += share;
        }
        m[(n, j)] += share;
        m[(j, n)] = 1.0 / n as f64;
    }
    // (M - I) s = 0 with the last row replaced by sum(s) = n + 1.
    let mut system = m - DMatrix::identity(n + 1, n + 1);
    let mut rhs = DVector::zeros(n + 1);
    for c in 0..=n {
        system[(n, c)] = 1.0;
    }
    rhs[n] = (n + 1) as f64;
    let s = system.lu().solve(&rhs).unwrap();
    let ground = s[n] / n as f64;
    (0..n).map(|i| s[i] + ground).collect()
}
