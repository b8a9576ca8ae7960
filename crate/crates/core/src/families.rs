//! Families of edge-disjoint perfect matchings and the constructions that
//! produce them.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HmpError, Result};
use crate::graph::{hopcroft_karp, normalize, Edge, Graph};
use crate::seed;

/// How a family was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    CompleteBipartite,
    ProjectivePlane,
    RandomGirthSearch,
    ExplicitFile,
}

/// `t` pairwise edge-disjoint perfect matchings on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingFamily {
    n: usize,
    matchings: Vec<Vec<Edge>>,
    girth_parameter: Option<usize>,
    construction: Construction,
}

impl MatchingFamily {
    /// Validates that every matching is perfect and that no edge repeats.
    /// Edges are normalized and each matching is sorted.
    pub fn new(
        n: usize,
        matchings: Vec<Vec<Edge>>,
        girth_parameter: Option<usize>,
        construction: Construction,
    ) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(HmpError::invalid(format!(
                "n must be positive and even, got {n}"
            )));
        }
        if matchings.is_empty() {
            return Err(HmpError::invalid("family has no matchings"));
        }
        if matchings.len() > n {
            return Err(HmpError::invalid(format!(
                "{} matchings exceed n = {n}",
                matchings.len()
            )));
        }
        let mut seen_edges = HashSet::new();
        let mut normalized = Vec::with_capacity(matchings.len());
        for (idx, m) in matchings.into_iter().enumerate() {
            if m.len() != n / 2 {
                return Err(HmpError::invalid(format!(
                    "matching {} has {} edges, expected {}",
                    idx + 1,
                    m.len(),
                    n / 2
                )));
            }
            let mut covered = vec![false; n + 1];
            let mut edges: Vec<Edge> = Vec::with_capacity(m.len());
            for (u, v) in m {
                if u == v || u == 0 || v == 0 || u > n || v > n {
                    return Err(HmpError::invalid(format!("bad edge ({u},{v})")));
                }
                for w in [u, v] {
                    if covered[w] {
                        return Err(HmpError::invalid(format!(
                            "vertex {w} covered twice in matching {}",
                            idx + 1
                        )));
                    }
                    covered[w] = true;
                }
                let e = normalize(u, v);
                if !seen_edges.insert(e) {
                    return Err(HmpError::invalid(format!(
                        "edge {e:?} appears in two matchings"
                    )));
                }
                edges.push(e);
            }
            edges.sort_unstable();
            normalized.push(edges);
        }
        Ok(MatchingFamily {
            n,
            matchings: normalized,
            girth_parameter,
            construction,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.matchings.len()
    }

    pub fn girth_parameter(&self) -> Option<usize> {
        self.girth_parameter
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Matching `j`, 1-based.
    pub fn matching(&self, j: usize) -> &[Edge] {
        &self.matchings[j - 1]
    }

    pub fn matchings(&self) -> &[Vec<Edge>] {
        &self.matchings
    }

    /// The union of all matchings as a graph.
    pub fn union_graph(&self) -> Graph {
        Graph::new(self.n, self.matchings.iter().flatten().copied())
            .expect("family edges are distinct by construction")
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            n: self.n,
            t: self.t(),
            d: self.girth_parameter,
            construction: self.construction,
            matchings: self
                .matchings
                .iter()
                .map(|m| m.iter().map(|&(u, v)| [u, v]).collect())
                .collect(),
        }
    }

    pub fn from_file(file: FamilyFile) -> Result<Self> {
        if file.t != file.matchings.len() {
            return Err(HmpError::invalid(format!(
                "t = {} but {} matchings listed",
                file.t,
                file.matchings.len()
            )));
        }
        let matchings = file
            .matchings
            .into_iter()
            .map(|m| m.into_iter().map(|[u, v]| (u, v)).collect())
            .collect();
        MatchingFamily::new(file.n, matchings, file.d, file.construction)
    }

    /// Canonical JSON text of the family file (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)
            .map_err(|e| HmpError::invalid(format!("family file: {e}")))?;
        MatchingFamily::from_file(file)
    }
}

/// On-disk layout of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub n: usize,
    pub t: usize,
    pub d: Option<usize>,
    pub construction: Construction,
    pub matchings: Vec<Vec<[usize; 2]>>,
}

/// The `n/2` cyclic-shift perfect matchings of `K_{n/2,n/2}`: left side
/// `1..=n/2`, right side `n/2+1..=n`, matching `s` joins left `i` to right
/// `(i + s) mod n/2`.
pub fn cyclic_family(n: usize) -> Result<MatchingFamily> {
    if n == 0 || n % 2 != 0 {
        return Err(HmpError::invalid(format!(
            "n must be positive and even, got {n}"
        )));
    }
    let h = n / 2;
    let matchings = (0..h)
        .map(|s| (0..h).map(|i| (i + 1, h + (i + s) % h + 1)).collect())
        .collect();
    MatchingFamily::new(n, matchings, None, Construction::CompleteBipartite)
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|p| p * p <= q).all(|p| q % p != 0)
}

/// Normalized homogeneous coordinates of the points of PG(2, q): the first
/// nonzero coordinate is 1.
fn projective_points(q: usize) -> Vec<[usize; 3]> {
    let mut pts = Vec::with_capacity(q * q + q + 1);
    for a in 0..q {
        for b in 0..q {
            pts.push([1, a, b]);
        }
    }
    for a in 0..q {
        pts.push([0, 1, a]);
    }
    pts.push([0, 0, 1]);
    pts
}

/// Point-line incidence graph of PG(2, q) for prime `q`. Points are vertices
/// `1..=N`, lines `N+1..=2N` with `N = q² + q + 1`.
pub fn projective_plane_incidence(q: usize) -> Result<Graph> {
    if !is_prime(q) {
        return Err(HmpError::invalid(format!(
            "q = {q} is not a prime (only prime fields are supported)"
        )));
    }
    let pts = projective_points(q);
    let big_n = pts.len();
    let mut edges = Vec::with_capacity(big_n * (q + 1));
    for (pi, p) in pts.iter().enumerate() {
        for (li, l) in pts.iter().enumerate() {
            if (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % q == 0 {
                edges.push((pi + 1, big_n + li + 1));
            }
        }
    }
    Graph::new(2 * big_n, edges)?
        .with_bipartition((1..=big_n).collect(), (big_n + 1..=2 * big_n).collect())
}

/// The incidence graph of PG(2, q) split into its `q + 1` perfect matchings.
pub fn projective_plane_family(q: usize) -> Result<MatchingFamily> {
    let g = projective_plane_incidence(q)?;
    let matchings = decompose_regular_bipartite(&g)?;
    MatchingFamily::new(g.n(), matchings, Some(2), Construction::ProjectivePlane)
}

/// Split a Δ-regular bipartite graph into Δ edge-disjoint perfect matchings
/// by repeatedly extracting a maximum matching.
pub fn decompose_regular_bipartite(g: &Graph) -> Result<Vec<Vec<Edge>>> {
    let degree = g
        .regular_degree()
        .ok_or_else(|| HmpError::invalid("graph is not regular"))?;
    let (left, right) = g
        .two_coloring()
        .ok_or_else(|| HmpError::invalid("graph is not bipartite"))?;
    if left.len() != right.len() {
        return Err(HmpError::invalid("bipartition sides differ in size"));
    }
    let mut rest = g.clone();
    let mut out = Vec::with_capacity(degree);
    for _ in 0..degree {
        let m = hopcroft_karp(g.n(), &left, &rest.adjacency());
        // A regular bipartite graph always has a perfect matching.
        assert_eq!(
            m.len(),
            left.len(),
            "regular bipartite graph without perfect matching"
        );
        rest.remove_edges(&m);
        out.push(m);
    }
    debug_assert_eq!(rest.edge_count(), 0);
    Ok(out)
}

/// Outcome of [`random_girth_family`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GirthSearch {
    Found(MatchingFamily),
    NotFound { attempts: usize },
}

/// Randomized search for a `t`-regular bipartite graph on `n` vertices with
/// no cycle of length `<= 2d`.
///
/// Each attempt grows the graph edge by edge, only joining a deficient left
/// vertex to a deficient right vertex at distance `> 2d - 1`. When no such
/// partner exists one edge at each endpoint of a blocked pair is removed, and
/// the attempt is abandoned after a fixed step budget.
pub fn random_girth_family(
    n: usize,
    t: usize,
    d: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<GirthSearch> {
    if n == 0 || n % 2 != 0 {
        return Err(HmpError::invalid(format!(
            "n must be positive and even, got {n}"
        )));
    }
    if t == 0 || t > n / 2 {
        return Err(HmpError::invalid(format!(
            "need 1 <= t <= n/2, got t = {t}"
        )));
    }
    if d < 2 {
        return Err(HmpError::invalid(format!(
            "girth parameter must be >= 2, got {d}"
        )));
    }
    for attempt in 0..max_attempts {
        let mut rng = seed::stream(seed, attempt as u64);
        if let Some(g) = girth_attempt(n, t, d, &mut rng) {
            let matchings = decompose_regular_bipartite(&g)?;
            let family =
                MatchingFamily::new(n, matchings, Some(d), Construction::RandomGirthSearch)?;
            return Ok(GirthSearch::Found(family));
        }
    }
    Ok(GirthSearch::NotFound {
        attempts: max_attempts,
    })
}

fn girth_attempt<R: Rng>(n: usize, t: usize, d: usize, rng: &mut R) -> Option<Graph> {
    let h = n / 2;
    // 0-based: left 0..h, right h..n
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let target = h * t;
    let mut edges = 0;
    let budget = 40 * n * t + 200;
    let max_dist = 2 * d - 1;

    for _ in 0..budget {
        if edges == target {
            break;
        }
        let open_left: Vec<usize> = (0..h).filter(|&u| adj[u].len() < t).collect();
        let u = *open_left.choose(rng)?;
        let near = within_distance(&adj, u, max_dist);
        let open_right: Vec<usize> = (h..n).filter(|&v| adj[v].len() < t).collect();
        let candidates: Vec<usize> = open_right.iter().copied().filter(|v| !near[*v]).collect();
        if let Some(&v) = candidates.choose(rng) {
            adj[u].insert(v);
            adj[v].insert(u);
            edges += 1;
            continue;
        }
        // Blocked: free up room around u and a random deficient partner.
        let v = *open_right.choose(rng)?;
        for w in [u, v] {
            let nbrs: Vec<usize> = adj[w].iter().copied().collect();
            if let Some(&x) = nbrs.choose(rng) {
                adj[w].remove(&x);
                adj[x].remove(&w);
                edges -= 1;
            }
        }
    }
    if edges != target {
        return None;
    }
    let edge_list = (0..h).flat_map(|u| adj[u].iter().map(move |&v| (u + 1, v + 1)));
    let g = Graph::new(n, edge_list)
        .ok()?
        .with_bipartition((1..=h).collect(), (h + 1..=n).collect())
        .ok()?;
    debug_assert!(crate::graph::verify_girth(&g, d));
    Some(g)
}

/// Vertices at distance `<= limit` from `src` (0-based adjacency).
fn within_distance(adj: &[BTreeSet<usize>], src: usize, limit: usize) -> Vec<bool> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut near = vec![false; adj.len()];
    dist[src] = 0;
    near[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == limit {
            continue;
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                near[v] = true;
                queue.push_back(v);
            }
        }
    }
    near
}

/// Random `degree`-regular bipartite graph with sides `1..=half` and
/// `half+1..=2 half`, built as a union of random permutations (each redrawn
/// until it avoids earlier edges).
pub fn random_regular_bipartite<R: Rng>(half: usize, degree: usize, rng: &mut R) -> Result<Graph> {
    if degree > half {
        return Err(HmpError::invalid(format!(
            "degree {degree} exceeds side size {half}"
        )));
    }
    'restart: loop {
        let mut edges: BTreeSet<Edge> = BTreeSet::new();
        for _ in 0..degree {
            let mut placed = false;
            for _ in 0..1000 {
                let mut perm: Vec<usize> = (half + 1..=2 * half).collect();
                perm.shuffle(rng);
                if (1..=half)
                    .zip(&perm)
                    .all(|(u, &v)| !edges.contains(&(u, v)))
                {
                    edges.extend((1..=half).zip(perm));
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Graph::new(2 * half, edges)?
            .with_bipartition((1..=half).collect(), (half + 1..=2 * half).collect());
    }
}

/// Extremal bound `90 d n^{1 + 1/d}` on the edges of a graph without `C_{2d}`.
pub fn bondy_simonovits_bound(n: usize, d: usize) -> f64 {
    90.0 * d as f64 * (n as f64).powf(1.0 + 1.0 / d as f64)
}

/// Result of sampling one edge from every matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    pub t: usize,
    pub k: usize,
    pub trials: usize,
    pub min_touched: usize,
    pub max_touched: usize,
    /// `t^{1 - 1/(2k+1)} / 180k`.
    pub bound: f64,
    pub violation: bool,
}

/// Draw one edge from every matching `trials` times and count the touched
/// vertices, comparing the minimum against `t^{1 - 1/(2k+1)} / 180k`.
pub fn edge_span_check(family: &MatchingFamily, k: usize, trials: usize, seed: u64) -> SpanReport {
    let mut rng = seed::rng(seed);
    let mut min_touched = usize::MAX;
    let mut max_touched = 0;
    let mut touched = vec![false; family.n() + 1];
    for _ in 0..trials {
        touched.iter_mut().for_each(|x| *x = false);
        let mut count = 0;
        for m in family.matchings() {
            let &(u, v) = m.choose(&mut rng).expect("matchings are non-empty");
            for w in [u, v] {
                if !touched[w] {
                    touched[w] = true;
                    count += 1;
                }
            }
        }
        min_touched = min_touched.min(count);
        max_touched = max_touched.max(count);
    }
    if trials == 0 {
        min_touched = 0;
    }
    let bound = span_bound(family.t(), k);
    SpanReport {
        t: family.t(),
        k,
        trials,
        min_touched,
        max_touched,
        bound,
        violation: trials > 0 && (min_touched as f64) < bound,
    }
}

/// `t^{1 - 1/(2k+1)} / (180 k)`.
pub fn span_bound(t: usize, k: usize) -> f64 {
    let k = k as f64;
    (t as f64).powf(1.0 - 1.0 / (2.0 * k + 1.0)) / (180.0 * k)
}
