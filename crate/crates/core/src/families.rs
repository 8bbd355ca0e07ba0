//! The four alternating families, their determinants in closed form, and
//! explicit diagrams built from plane-embedded checkerboard graphs.
//!
//! * `R(a1, ..., an)`: 2-bridge link with continued-fraction entries `ai`.
//! * `B(a1, b1, ..., an, bn)`: closure of `σ1^a1 σ2^-b1 ... σ1^an σ2^-bn`.
//! * `P(a1, ..., at)`: pretzel link with `t` twisted bands.
//! * `W(n)`: closure of `(σ1 σ3 σ2^-1)^n`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::diagram::{Diagram, EmbeddedGraph, End};
use crate::error::{Error, Result};
use crate::hypvol::Real;

pub type DetValue = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilySpec {
    TwoBridge(Vec<u32>),
    ThreeBraid(Vec<(u32, u32)>),
    Pretzel(Vec<u32>),
    Weaving(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TwoBridge,
    ThreeBraid,
    Pretzel,
    Weaving,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::TwoBridge => "two_bridge",
            Family::ThreeBraid => "three_braid",
            Family::Pretzel => "pretzel",
            Family::Weaving => "weaving",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Family::TwoBridge => 'R',
            Family::ThreeBraid => 'B',
            Family::Pretzel => 'P',
            Family::Weaving => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        match c {
            'R' => Some(Family::TwoBridge),
            'B' => Some(Family::ThreeBraid),
            'P' => Some(Family::Pretzel),
            'W' => Some(Family::Weaving),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const GRAMMAR: &str = "R(a1,...,an) | B(a1,b1,...,an,bn) | P(a1,...,at) | W(n), positive integers";

impl FamilySpec {
    pub fn family(&self) -> Family {
        match self {
            FamilySpec::TwoBridge(_) => Family::TwoBridge,
            FamilySpec::ThreeBraid(_) => Family::ThreeBraid,
            FamilySpec::Pretzel(_) => Family::Pretzel,
            FamilySpec::Weaving(_) => Family::Weaving,
        }
    }

    /// Flat parameter list in written order.
    pub fn params(&self) -> Vec<u32> {
        match self {
            FamilySpec::TwoBridge(a) | FamilySpec::Pretzel(a) => a.clone(),
            FamilySpec::ThreeBraid(p) => p.iter().flat_map(|&(a, b)| [a, b]).collect(),
            FamilySpec::Weaving(n) => vec![*n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            FamilySpec::TwoBridge(a) | FamilySpec::Pretzel(a) => {
                !a.is_empty() && a.iter().all(|&x| x >= 1)
            }
            FamilySpec::ThreeBraid(p) => !p.is_empty() && p.iter().all(|&(a, b)| a >= 1 && b >= 1),
            FamilySpec::Weaving(n) => *n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("FamilySpec", format!("{self}: entries must be positive and nonempty")))
        }
    }

    pub fn crossing_count(&self) -> u64 {
        match self {
            FamilySpec::Weaving(n) => 3 * u64::from(*n),
            _ => self.params().iter().map(|&x| u64::from(x)).sum(),
        }
    }

    /// Number of twist regions in the standard diagram when no entry merges
    /// with a neighbour. The diagram may show fewer; see [`Diagram::twist_count`].
    pub fn nominal_twist_count(&self) -> u64 {
        match self {
            FamilySpec::Weaving(n) => 3 * u64::from(*n),
            _ => self.params().len() as u64,
        }
    }

    pub fn det(&self) -> Result<DetValue> {
        match self {
            FamilySpec::TwoBridge(a) => twobridge_det(a),
            FamilySpec::ThreeBraid(p) => threebraid_det(p),
            FamilySpec::Pretzel(a) => pretzel_det(a),
            FamilySpec::Weaving(n) => weaving_det(*n),
        }
    }

    pub fn to_diagram(&self) -> Result<Diagram> {
        Diagram::from_pd(tait_embedding(self)?.medial_pd()?)
    }

    /// `Some(reason)` when the link is known not to be hyperbolic.
    pub fn known_nonhyperbolic(&self) -> Option<&'static str> {
        match self {
            FamilySpec::TwoBridge(a) => match a.as_slice() {
                [_] => Some("(2,a) torus link"),
                [1, 1] => Some("(2,2) torus link"),
                [1, 1, 1] => Some("(2,3) torus knot"),
                _ => None,
            },
            FamilySpec::ThreeBraid(p) => match p.as_slice() {
                [(1, _)] | [(_, 1)] => Some("(2,b) torus link"),
                [_] => Some("connected sum of two (2,k) torus links"),
                _ => None,
            },
            FamilySpec::Pretzel(a) => match a.len() {
                1 => Some("unknot"),
                2 => Some("(2,a1+a2) torus link"),
                _ if a.iter().all(|&x| x == 1) => Some("(2,t) torus link"),
                _ => None,
            },
            FamilySpec::Weaving(1) => Some("unknot"),
            FamilySpec::Weaving(_) => None,
        }
    }

    pub fn is_known_nonhyperbolic(&self) -> bool {
        self.known_nonhyperbolic().is_some()
    }
}

pub fn is_known_nonhyperbolic(spec: &FamilySpec) -> bool {
    spec.is_known_nonhyperbolic()
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(u32::to_string).collect();
        write!(f, "{}({})", self.family().letter(), params.join(","))
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::Parse {
            pos,
            msg: msg.to_string(),
            expected: GRAMMAR,
        };
        let bytes = input.as_bytes();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        skip_ws(&mut i);
        let family = bytes
            .get(i)
            .and_then(|&c| Family::from_letter(c as char))
            .ok_or_else(|| err(i, "unknown family letter"))?;
        i += 1;
        skip_ws(&mut i);
        if bytes.get(i) != Some(&b'(') {
            return Err(err(i, "expected '('"));
        }
        i += 1;
        let mut params = Vec::new();
        loop {
            skip_ws(&mut i);
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(err(i, "expected a positive integer"));
            }
            let value: u32 = input[start..i]
                .parse()
                .map_err(|_| err(start, "integer out of range"))?;
            if value == 0 {
                return Err(err(start, "entries must be positive"));
            }
            params.push(value);
            skip_ws(&mut i);
            match bytes.get(i) {
                Some(b',') | Some(b';') => i += 1,
                Some(b')') => {
                    i += 1;
                    break;
                }
                _ => return Err(err(i, "expected ',' or ')'")),
            }
        }
        skip_ws(&mut i);
        if i != bytes.len() {
            return Err(err(i, "trailing input"));
        }
        match family {
            Family::TwoBridge => Ok(FamilySpec::TwoBridge(params)),
            Family::Pretzel => Ok(FamilySpec::Pretzel(params)),
            Family::ThreeBraid => {
                if params.len() % 2 != 0 {
                    return Err(err(i, "3-braid needs an even number of entries"));
                }
                Ok(FamilySpec::ThreeBraid(
                    params.chunks(2).map(|c| (c[0], c[1])).collect(),
                ))
            }
            Family::Weaving => match params.as_slice() {
                [n] => Ok(FamilySpec::Weaving(*n)),
                _ => Err(err(i, "weaving takes a single entry")),
            },
        }
    }
}

fn require_positive(op: &'static str, a: &[u32]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::domain(op, "empty sequence"));
    }
    if a.contains(&0) {
        return Err(Error::domain(op, "entries must be positive"));
    }
    Ok(())
}

/// Continuant: `T(0) = 1`, `T(1) = a1`, `T(k+1) = a_{k+1} T(k) + T(k−1)`.
pub fn twobridge_det(a: &[u32]) -> Result<DetValue> {
    require_positive("twobridge_det", a)?;
    let (mut prev, mut cur) = (BigUint::one(), BigUint::from(a[0]));
    for &x in &a[1..] {
        let next = &cur * x + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// `Π (ai + 2) / 2^n`.
pub fn v_function(a: &[u32]) -> Result<BigRational> {
    require_positive("v_function", a)?;
    let num: BigUint = a.iter().map(|&x| BigUint::from(x) + 2u32).product();
    let den = BigUint::one() << a.len();
    Ok(BigRational::new(num.into(), den.into()))
}

/// `2π log` of the end-corrected product
/// `(a1 + 1)(an + 1)/4 · Π_{1<i<n} (ai + 2)/2`; needs `n ≥ 2`.
pub fn twobridge_vol_upper(a: &[u32]) -> Result<Real> {
    require_positive("twobridge_vol_upper", a)?;
    let n = a.len();
    if n < 2 {
        return Err(Error::domain("twobridge_vol_upper", "needs at least two entries"));
    }
    let ends = ((a[0] as f64 + 1.0) * (a[n - 1] as f64 + 1.0) / 4.0).ln();
    let middle: f64 = a[1..n - 1].iter().map(|&x| ((x as f64 + 2.0) / 2.0).ln()).sum();
    let v = std::f64::consts::TAU * (ends + middle);
    Ok(Real::new(v, 4.0 * n as f64 * f64::EPSILON * v.abs().max(1.0)))
}

/// Determinant of `B(a1, b1, ..., an, bn)` by peeling off the last `σ2` block:
/// resolving its crossings leaves the 2-bridge link `R(a1, b1, ..., b_{n−1}, an)`
/// with multiplicity `bn`, plus the braid with `an` merged into `a1`.
pub fn threebraid_det(pairs: &[(u32, u32)]) -> Result<DetValue> {
    if pairs.is_empty() {
        return Err(Error::domain("threebraid_det", "empty sequence"));
    }
    if pairs.iter().any(|&(a, b)| a == 0 || b == 0) {
        return Err(Error::domain("threebraid_det", "entries must be positive"));
    }
    let mut p = pairs.to_vec();
    let mut total = BigUint::zero();
    while p.len() > 1 {
        let n = p.len();
        let (an, bn) = p[n - 1];
        let mut chain: Vec<u32> = p[..n - 1].iter().flat_map(|&(a, b)| [a, b]).collect();
        chain.push(an);
        total += twobridge_det(&chain)? * bn;
        p.pop();
        p[0].0 += an;
    }
    let (a, b) = p[0];
    Ok(total + BigUint::from(a) * b)
}

/// `det B(1, 1, ..., 1)` with `n` pairs, via `u0 = 2, u1 = 3,
/// u_{k+1} = 3u_k − u_{k−1}` and `det = u_n − 2`.
pub fn threebraid_all_ones_det(n: u32) -> Result<DetValue> {
    if n == 0 {
        return Err(Error::domain("threebraid_all_ones_det", "n must be positive"));
    }
    let (mut prev, mut cur) = (BigUint::from(2u32), BigUint::from(3u32));
    for _ in 1..n {
        let next = &cur * 3u32 - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur - 2u32)
}

/// `Σ_i Π_{j≠i} aj`.
pub fn pretzel_det(a: &[u32]) -> Result<DetValue> {
    require_positive("pretzel_det", a)?;
    let t = a.len();
    // Prefix and suffix products avoid division.
    let mut prefix = vec![BigUint::one(); t + 1];
    for i in 0..t {
        prefix[i + 1] = &prefix[i] * a[i];
    }
    let mut total = BigUint::zero();
    let mut suffix = BigUint::one();
    for i in (0..t).rev() {
        total += &prefix[i] * &suffix;
        suffix *= a[i];
    }
    Ok(total)
}

/// `det W(n)`: the spanning-tree count of the double wheel on an `n`-cycle,
/// `n (L_n − 2) / 2` with `L0 = 2, L1 = 4, L_{k+1} = 4L_k − L_{k−1}`.
pub fn weaving_det(n: u32) -> Result<DetValue> {
    if n == 0 {
        return Err(Error::domain("weaving_det", "n must be positive"));
    }
    let (mut prev, mut cur) = (BigUint::from(2u32), BigUint::from(4u32));
    for _ in 1..n {
        let next = &cur * 4u32 - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok((cur - 2u32) * n / 2u32)
}

/// A plane embedding of one checkerboard graph of the standard diagram.
pub fn tait_embedding(spec: &FamilySpec) -> Result<EmbeddedGraph> {
    spec.validate()?;
    Ok(match spec {
        FamilySpec::TwoBridge(a) => twobridge_graph(a),
        FamilySpec::ThreeBraid(p) => threebraid_graph(p),
        FamilySpec::Pretzel(a) if a.len() == 2 => twobridge_graph(&[a[0] + a[1]]),
        FamilySpec::Pretzel(a) => pretzel_graph(a),
        FamilySpec::Weaving(n) => weaving_graph(*n),
    })
}

/// Series-parallel graph between a fixed source and a moving terminal.
/// Operations alternate and the last one is parallel: `a_n` parallel edges,
/// `a_{n−1}` edges in series, and so on back to `a1`.
fn twobridge_graph(a: &[u32]) -> EmbeddedGraph {
    let mut g = EmbeddedGraph::with_vertices(2);
    let s = 0;
    let mut t = 1;
    let n = a.len();
    for (i, &k) in a.iter().enumerate() {
        let parallel = (n - 1 - i).is_multiple_of(2);
        if parallel {
            // New edges go over the top: last at the source, first at the terminal.
            for _ in 0..k {
                let e = g.add_edge(s, t);
                g.rotation[s].push((e, End::Tail));
                g.rotation[t].insert(0, (e, End::Head));
            }
        } else if i == 0 {
            // A path from the source replaces the initial terminal.
            let mut prev = s;
            for j in 0..k {
                let v = if j + 1 == k { t } else { g.add_vertex() };
                let e = g.add_edge(prev, v);
                g.rotation[prev].insert(0, (e, End::Tail));
                g.rotation[v].push((e, End::Head));
                prev = v;
            }
        } else {
            // A path heading east from the current terminal.
            let mut prev = t;
            for _ in 0..k {
                let v = g.add_vertex();
                let e = g.add_edge(prev, v);
                g.rotation[prev].insert(0, (e, End::Tail));
                g.rotation[v].push((e, End::Head));
                prev = v;
            }
            t = prev;
        }
    }
    g
}

/// A hub (the braid axis region) and a ring of pieces. Ring edges are the
/// `σ2` crossings; `ai` parallel hub edges meet the piece before block `bi`.
fn threebraid_graph(pairs: &[(u32, u32)]) -> EmbeddedGraph {
    let ring: u32 = pairs.iter().map(|&(_, b)| b).sum();
    let ring = ring as usize;
    let hub = ring;
    let mut g = EmbeddedGraph::with_vertices(ring + 1);
    let ring_edges: Vec<usize> = (0..ring).map(|p| g.add_edge(p, (p + 1) % ring)).collect();
    let mut hub_groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut offset = 0usize;
    for &(a, b) in pairs {
        let group = (0..a).map(|_| g.add_edge(offset, hub)).collect();
        hub_groups.push((offset, group));
        offset += b as usize;
    }
    let mut at_ring: Vec<Vec<usize>> = vec![Vec::new(); ring];
    for (p, group) in &hub_groups {
        at_ring[*p] = group.clone();
    }
    for p in 0..ring {
        let rot = &mut g.rotation[p];
        rot.push((ring_edges[p], End::Tail));
        rot.extend(at_ring[p].iter().map(|&e| (e, End::Tail)));
        rot.push((ring_edges[(p + ring - 1) % ring], End::Head));
    }
    for (_, group) in &hub_groups {
        g.rotation[hub].extend(group.iter().rev().map(|&e| (e, End::Head)));
    }
    g
}

/// A cycle of bundles: `ai` parallel edges from vertex `i` to vertex `i + 1`.
fn pretzel_graph(a: &[u32]) -> EmbeddedGraph {
    let t = a.len();
    let mut g = EmbeddedGraph::with_vertices(t);
    let bundles: Vec<Vec<usize>> = (0..t)
        .map(|i| (0..a[i]).map(|_| g.add_edge(i, (i + 1) % t)).collect())
        .collect();
    for i in 0..t {
        let rot = &mut g.rotation[i];
        rot.extend(bundles[i].iter().rev().map(|&e| (e, End::Tail)));
        rot.extend(bundles[(i + t - 1) % t].iter().map(|&e| (e, End::Head)));
    }
    g
}

/// Double wheel: an `n`-cycle with an inner and an outer hub joined to every
/// cycle vertex.
fn weaving_graph(n: u32) -> EmbeddedGraph {
    let n = n as usize;
    let (inner, outer) = (n, n + 1);
    let mut g = EmbeddedGraph::with_vertices(n + 2);
    let ring: Vec<usize> = (0..n).map(|k| g.add_edge(k, (k + 1) % n)).collect();
    let to_inner: Vec<usize> = (0..n).map(|k| g.add_edge(k, inner)).collect();
    let to_outer: Vec<usize> = (0..n).map(|k| g.add_edge(k, outer)).collect();
    for k in 0..n {
        g.rotation[k] = vec![
            (to_outer[k], End::Tail),
            (ring[k], End::Tail),
            (to_inner[k], End::Tail),
            (ring[(k + n - 1) % n], End::Head),
        ];
    }
    g.rotation[inner] = to_inner.iter().map(|&e| (e, End::Head)).collect();
    g.rotation[outer] = to_outer.iter().rev().map(|&e| (e, End::Head)).collect();
    g
}
