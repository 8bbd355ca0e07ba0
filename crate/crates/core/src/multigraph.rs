//! Multigraphs with loops and parallel edges, and three independent ways of
//! counting their spanning trees: the Matrix Tree Theorem (fraction-free
//! elimination over big integers), deletion-contraction, and brute force.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of spanning trees of a graph.
pub type TreeCount = BigUint;

/// Largest edge count accepted by [`Multigraph::spanning_tree_count_bruteforce`].
pub const BRUTEFORCE_EDGE_LIMIT: usize = 24;

/// Stable edge identity; survives deletion and contraction of other edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    next_id: u32,
}

impl Multigraph {
    pub fn new(vertex_count: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Multigraph::empty(vertex_count);
        for (u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn empty(vertex_count: usize) -> Self {
        Multigraph {
            vertex_count,
            edges: Vec::new(),
            next_id: 0,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<EdgeId> {
        if u >= self.vertex_count || v >= self.vertex_count {
            return Err(Error::MalformedGraph(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.vertex_count
            )));
        }
        let id = EdgeId(self.next_id);
        self.next_id += 1;
        self.edges.push(Edge { id, u, v });
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == v) as usize + (e.v == v) as usize)
            .sum()
    }

    /// `G − e`: removes exactly one edge.
    pub fn delete(&self, id: EdgeId) -> Result<Multigraph> {
        let pos = self.position(id)?;
        let mut g = self.clone();
        g.edges.remove(pos);
        Ok(g)
    }

    /// `G / e`: identifies the endpoints of `e`. Other copies of `e` become
    /// loops. The merged vertex takes the smaller label; labels above the
    /// larger endpoint shift down by one.
    pub fn contract(&self, id: EdgeId) -> Result<Multigraph> {
        let pos = self.position(id)?;
        let e = self.edges[pos];
        if e.is_loop() {
            return Err(Error::domain("contract", format!("edge {} is a loop", id.0)));
        }
        let (keep, gone) = (e.u.min(e.v), e.u.max(e.v));
        let relabel = |x: usize| match x.cmp(&gone) {
            std::cmp::Ordering::Less => x,
            std::cmp::Ordering::Equal => keep,
            std::cmp::Ordering::Greater => x - 1,
        };
        let edges = self
            .edges
            .iter()
            .filter(|f| f.id != id)
            .map(|f| Edge {
                id: f.id,
                u: relabel(f.u),
                v: relabel(f.v),
            })
            .collect();
        Ok(Multigraph {
            vertex_count: self.vertex_count - 1,
            edges,
            next_id: self.next_id,
        })
    }

    fn position(&self, id: EdgeId) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::domain("multigraph", format!("no edge with id {}", id.0)))
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Multigraph> {
        let mut seen = vec![false; self.vertex_count];
        if perm.len() != self.vertex_count
            || perm.iter().any(|&p| p >= self.vertex_count || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::domain("relabel", "not a permutation of the vertices"));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.u = perm[e.u];
            e.v = perm[e.v];
        }
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count <= 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        reached == self.vertex_count
    }

    /// Kirchhoff Laplacian: `deg(v) − 2·loops(v)` on the diagonal and minus the
    /// edge multiplicity off it. Loops therefore cancel out entirely.
    pub fn laplacian(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        let mut l = vec![vec![0i64; n]; n];
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            l[e.u][e.u] += 1;
            l[e.v][e.v] += 1;
            l[e.u][e.v] -= 1;
            l[e.v][e.u] -= 1;
        }
        l
    }

    /// Spanning-tree count from the principal minor that drops the last vertex.
    pub fn spanning_tree_count(&self) -> TreeCount {
        self.spanning_tree_count_minor(self.vertex_count.saturating_sub(1))
    }

    /// Spanning-tree count from the principal minor that drops vertex `skip`.
    pub fn spanning_tree_count_minor(&self, skip: usize) -> TreeCount {
        if self.vertex_count <= 1 {
            return BigUint::one();
        }
        assert!(skip < self.vertex_count, "minor index out of range");
        let l = self.laplacian();
        let minor: Vec<Vec<BigInt>> = (0..self.vertex_count)
            .filter(|&i| i != skip)
            .map(|i| {
                (0..self.vertex_count)
                    .filter(|&j| j != skip)
                    .map(|j| BigInt::from(l[i][j]))
                    .collect()
            })
            .collect();
        let det = bareiss_determinant(minor);
        // Laplacian minors are positive semidefinite.
        debug_assert!(det.sign() != Sign::Minus);
        det.to_biguint().unwrap_or_default()
    }

    /// Counts spanning trees by recursive deletion-contraction. A class of `k`
    /// parallel copies of an edge is handled in one step,
    /// `τ(G) = τ(G − class) + k·τ(G / e)`, which is `k` applications of the
    /// single-edge identity (contracting one copy turns the rest into loops).
    pub fn spanning_tree_count_deletion_contraction(&self) -> TreeCount {
        let mut w = WeightedGraph::new(self.vertex_count);
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            w.m[e.u][e.v] += 1;
            w.m[e.v][e.u] += 1;
        }
        w.count()
    }

    /// Counts edge subsets of size `n − 1` that form a spanning tree.
    pub fn spanning_tree_count_bruteforce(&self) -> Result<TreeCount> {
        if self.edges.len() > BRUTEFORCE_EDGE_LIMIT {
            return Err(Error::EdgeBudget {
                edges: self.edges.len(),
                limit: BRUTEFORCE_EDGE_LIMIT,
            });
        }
        if self.vertex_count <= 1 {
            return Ok(BigUint::one());
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| !e.is_loop())
            .map(|e| (e.u, e.v))
            .collect();
        let need = self.vertex_count - 1;
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        Ok(BigUint::from(choose_forests(&edges, 0, need, &mut parent)))
    }

    /// Text form: vertex count on the first line, then one `u v` pair per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.vertex_count);
        for e in &self.edges {
            s.push_str(&format!("{} {}\n", e.u, e.v));
        }
        s
    }
}

impl FromStr for Multigraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedGraph("empty input".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::MalformedGraph(format!("bad vertex count {header:?}")))?;
        let mut g = Multigraph::empty(n);
        for line in lines {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MalformedGraph(format!("bad edge line {line:?}")))?;
            match nums[..] {
                [u, v] => {
                    g.add_edge(u, v)?;
                }
                _ => return Err(Error::MalformedGraph(format!("bad edge line {line:?}"))),
            }
        }
        Ok(g)
    }
}

impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

// Include/exclude recursion over edges; including an edge that closes a
// cycle is pruned immediately. Union-find without path compression so that
// undoing a union is a single assignment.
fn choose_forests(edges: &[(usize, usize)], from: usize, need: usize, parent: &mut Vec<usize>) -> u64 {
    if need == 0 {
        return 1;
    }
    if edges.len() - from < need {
        return 0;
    }
    let (u, v) = edges[from];
    let mut total = choose_forests(edges, from + 1, need, parent);
    let (ru, rv) = (find(parent, u), find(parent, v));
    if ru != rv {
        parent[ru] = rv;
        total += choose_forests(edges, from + 1, need - 1, parent);
        parent[ru] = ru;
    }
    total
}

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination with row pivoting. Every division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = t.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Loop-free multigraph as a dense multiplicity matrix, used by
/// deletion-contraction.
#[derive(Clone)]
struct WeightedGraph {
    m: Vec<Vec<u32>>,
}

impl WeightedGraph {
    fn new(n: usize) -> Self {
        WeightedGraph {
            m: vec![vec![0; n]; n],
        }
    }

    fn n(&self) -> usize {
        self.m.len()
    }

    fn connected(&self) -> bool {
        let n = self.n();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for (y, &k) in self.m[x].iter().enumerate() {
                if k > 0 && !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        reached == n
    }

    /// Merges `b` into `a`, discarding the loops this creates.
    fn contract(&self, a: usize, b: usize) -> WeightedGraph {
        let n = self.n();
        let mut out = WeightedGraph::new(n - 1);
        let map = |x: usize| if x == b { a } else { x };
        let idx = |x: usize| if x > b { x - 1 } else { x };
        for x in 0..n {
            for y in 0..n {
                let (mx, my) = (map(x), map(y));
                if mx != my {
                    out.m[idx(mx)][idx(my)] += self.m[x][y];
                }
            }
        }
        out
    }

    fn count(&self) -> BigUint {
        let n = self.n();
        if n <= 1 {
            return BigUint::one();
        }
        // Branch on an edge class at a vertex with the fewest neighbours;
        // a lone neighbour means the deletion branch is disconnected.
        let (v, nbrs) = (0..n)
            .map(|v| (v, (0..n).filter(|&y| self.m[v][y] > 0).count()))
            .min_by_key(|&(_, d)| d)
            .expect("n > 1");
        if nbrs == 0 {
            return BigUint::zero();
        }
        let w = (0..n).find(|&y| self.m[v][y] > 0).expect("has a neighbour");
        let k = self.m[v][w];
        let contracted = self.contract(v.min(w), v.max(w)).count() * k;
        if nbrs == 1 {
            return contracted;
        }
        let mut deleted = self.clone();
        deleted.m[v][w] = 0;
        deleted.m[w][v] = 0;
        if deleted.connected() {
            contracted + deleted.count()
        } else {
            contracted
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Multigraph {
        Multigraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let loop1 = Multigraph::new(1, [(0, 0)]).unwrap();
        assert_eq!(loop1.laplacian(), vec![vec![0]]);
        let theta3 = Multigraph::new(2, [(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(theta3.laplacian(), vec![vec![3, -3], vec![-3, 3]]);
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = Multigraph::new(4, [(0, 1), (1, 1), (1, 2), (2, 3), (3, 0), (0, 2), (0, 2)]).unwrap();
        let l = g.laplacian();
        for (i, row) in l.iter().enumerate() {
            assert_eq!(row.iter().sum::<i64>(), 0);
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, l[j][i]);
            }
        }
        // Vertex 1: degree 4 (loop counts twice), two of which cancel.
        assert_eq!(g.degree(1), 4);
        assert_eq!(l[1][1], 2);
    }

    #[test]
    fn small_counts() {
        assert_eq!(triangle().spanning_tree_count(), BigUint::from(3u32));
        for k in 1..6usize {
            let g = Multigraph::new(2, std::iter::repeat_n((0, 1), k)).unwrap();
            assert_eq!(g.spanning_tree_count(), BigUint::from(k));
            assert_eq!(g.spanning_tree_count_bruteforce().unwrap(), BigUint::from(k));
        }
        assert_eq!(
            triangle().spanning_tree_count_bruteforce().unwrap(),
            BigUint::from(3u32)
        );
        let disconnected = Multigraph::new(3, [(0, 1)]).unwrap();
        assert!(disconnected.spanning_tree_count().is_zero());
        assert!(disconnected.spanning_tree_count_deletion_contraction().is_zero());
        assert!(Multigraph::empty(1).spanning_tree_count().is_one());
    }

    #[test]
    fn figure_eight_tait_graph() {
        // Triangle with one doubled edge.
        let g = Multigraph::new(3, [(0, 1), (0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.spanning_tree_count(), BigUint::from(5u32));
        assert_eq!(g.spanning_tree_count_deletion_contraction(), BigUint::from(5u32));
    }

    #[test]
    fn delete_and_contract_triangle() {
        let g = triangle();
        let e = g.edges()[0].id;
        let d = g.delete(e).unwrap();
        assert_eq!(d.edge_count(), 2);
        assert!(d.spanning_tree_count().is_one());
        let c = g.contract(e).unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.edge_count(), 2);
        assert_eq!(c.spanning_tree_count(), BigUint::from(2u32));
    }

    #[test]
    fn contraction_turns_parallels_into_loops() {
        let g = Multigraph::new(3, [(0, 2), (0, 2), (1, 2)]).unwrap();
        let c = g.contract(EdgeId(0)).unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.loop_count(), 1);
        // The surviving copy keeps its id.
        assert!(c.edge(EdgeId(1)).unwrap().is_loop());
        assert_eq!(c.edge(EdgeId(2)).unwrap().v, 0);
        assert!(c.contract(EdgeId(1)).is_err());
        assert!(g.delete(EdgeId(7)).is_err());
    }

    #[test]
    fn bruteforce_budget() {
        let g = Multigraph::new(2, std::iter::repeat_n((0, 1), 25)).unwrap();
        assert!(matches!(
            g.spanning_tree_count_bruteforce(),
            Err(Error::EdgeBudget { edges: 25, .. })
        ));
    }

    #[test]
    fn text_format() {
        let g: Multigraph = "3\n0 1\n1 2\n2 0\n".parse().unwrap();
        assert_eq!(g.spanning_tree_count(), BigUint::from(3u32));
        assert_eq!(g.to_text().parse::<Multigraph>().unwrap(), g);
        assert!("2\n0 5\n".parse::<Multigraph>().is_err());
        assert!("x\n".parse::<Multigraph>().is_err());
        assert!("2\n0 1 1\n".parse::<Multigraph>().is_err());
    }

    #[test]
    fn bareiss_small() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        assert_eq!(bareiss_determinant(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss_determinant(m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]])), BigInt::from(0));
        assert_eq!(bareiss_determinant(m(&[&[0, 2, 1], &[1, 0, 0], &[0, 0, 3]])), BigInt::from(-6));
    }
}
