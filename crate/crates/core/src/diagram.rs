//! Planar 4-valent diagrams.
//!
//! A [`PdCode`] lists, for each crossing, the four arc labels met going
//! counterclockwise around it. Over/under information is not stored: faces,
//! checkerboard graphs and twist regions only depend on the plane map.
//!
//! Corner `(c, j)` is the wedge of crossing `c` between slots `j` and `j + 1`.
//! Faces are traced by leaving a corner through slot `j + 1`, following the
//! arc to its other end `(c', k)`, and continuing from corner `(c', k)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypvol::FaceVector;
use crate::multigraph::Multigraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdCode {
    pub crossings: Vec<[i64; 4]>,
}

impl PdCode {
    pub fn new(crossings: Vec<[i64; 4]>) -> Self {
        PdCode { crossings }
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Parses either the line format (`X a b c d` per crossing) or a JSON
    /// array of 4-tuples.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('[') {
            let crossings: Vec<[i64; 4]> = serde_json::from_str(trimmed)
                .map_err(|e| Error::MalformedPd(format!("bad JSON: {e}")))?;
            return Ok(PdCode { crossings });
        }
        let mut crossings = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tok = line.split_whitespace();
            if tok.next() != Some("X") {
                return Err(Error::MalformedPd(format!(
                    "line {}: expected `X a b c d`",
                    lineno + 1
                )));
            }
            let labels: Vec<i64> = tok
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MalformedPd(format!("line {}: bad arc label", lineno + 1)))?;
            let arr: [i64; 4] = labels.try_into().map_err(|_| {
                Error::MalformedPd(format!("line {}: need exactly four labels", lineno + 1))
            })?;
            crossings.push(arr);
        }
        Ok(PdCode { crossings })
    }

    pub fn to_text(&self) -> String {
        self.crossings
            .iter()
            .map(|[a, b, c, d]| format!("X {a} {b} {c} {d}\n"))
            .collect()
    }
}

impl FromStr for PdCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PdCode::parse(s)
    }
}

impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

type Slot = (usize, usize);

/// The plane map behind a validated PD code.
#[derive(Debug, Clone)]
struct PlaneMap {
    /// `partner[c][j]`: the other end of the arc leaving slot `j` of crossing `c`.
    partner: Vec<[Slot; 4]>,
    /// `face_of[c][j]`: face containing corner `(c, j)`.
    face_of: Vec<[usize; 4]>,
    face_sizes: Vec<u32>,
}

impl PlaneMap {
    fn build(pd: &PdCode) -> Result<Self> {
        let c = pd.crossings.len();
        if c == 0 {
            return Err(Error::MalformedPd("no crossings".into()));
        }
        let mut ends: HashMap<i64, Vec<Slot>> = HashMap::new();
        for (ci, labels) in pd.crossings.iter().enumerate() {
            for (j, &l) in labels.iter().enumerate() {
                ends.entry(l).or_default().push((ci, j));
            }
        }
        let mut partner = vec![[(0, 0); 4]; c];
        for (label, slots) in &ends {
            if slots.len() != 2 {
                return Err(Error::MalformedPd(format!(
                    "arc {label} appears {} times, expected 2",
                    slots.len()
                )));
            }
            let (a, b) = (slots[0], slots[1]);
            partner[a.0][a.1] = b;
            partner[b.0][b.1] = a;
        }

        // Connectivity of the 4-valent graph.
        let mut seen = vec![false; c];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &partner[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedPd("diagram is disconnected".into()));
        }

        const UNSET: usize = usize::MAX;
        let mut face_of = vec![[UNSET; 4]; c];
        let mut face_sizes = Vec::new();
        for ci in 0..c {
            for j in 0..4 {
                if face_of[ci][j] != UNSET {
                    continue;
                }
                let id = face_sizes.len();
                let mut size = 0u32;
                let (mut x, mut k) = (ci, j);
                loop {
                    if face_of[x][k] != UNSET {
                        // A permutation always returns to its start.
                        debug_assert_eq!((x, k), (ci, j));
                        break;
                    }
                    face_of[x][k] = id;
                    size += 1;
                    let (nx, nk) = partner[x][(k + 1) % 4];
                    x = nx;
                    k = nk;
                }
                face_sizes.push(size);
            }
        }
        if face_sizes.len() != c + 2 {
            return Err(Error::MalformedPd(format!(
                "traversal found {} faces, a planar diagram with {c} crossings has {}",
                face_sizes.len(),
                c + 2
            )));
        }
        Ok(PlaneMap {
            partner,
            face_of,
            face_sizes,
        })
    }

    fn crossing_count(&self) -> usize {
        self.partner.len()
    }

    /// Two-colours faces so that the faces on either side of every arc differ.
    /// `true` means shaded. The seed face is white.
    fn colour_faces(&self, seed: usize) -> Result<Vec<bool>> {
        let nf = self.face_sizes.len();
        let mut adj = vec![Vec::new(); nf];
        for corners in &self.face_of {
            for j in 0..4 {
                let (a, b) = (corners[j], corners[(j + 1) % 4]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut colour: Vec<Option<bool>> = vec![None; nf];
        colour[seed] = Some(false);
        let mut queue = VecDeque::from([seed]);
        while let Some(f) = queue.pop_front() {
            let cf = colour[f].expect("queued faces are coloured");
            for &g in &adj[f] {
                match colour[g] {
                    None => {
                        colour[g] = Some(!cf);
                        queue.push_back(g);
                    }
                    Some(cg) if cg == cf => {
                        return Err(Error::MalformedPd(
                            "faces are not two-colourable".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }
        Ok(colour.into_iter().map(|c| c.unwrap_or(false)).collect())
    }
}

/// Face multiset of a PD code.
pub fn faces(pd: &PdCode) -> Result<FaceVector> {
    let map = PlaneMap::build(pd)?;
    FaceVector::from_sizes(map.face_sizes.iter().copied())
}

/// Both checkerboard (Tait) graphs, shaded first. The face holding the
/// traversal start of the smallest arc label is white.
pub fn checkerboard_graphs(pd: &PdCode) -> Result<(Multigraph, Multigraph)> {
    let map = PlaneMap::build(pd)?;
    tait_graphs(pd, &map)
}

fn tait_graphs(pd: &PdCode, map: &PlaneMap) -> Result<(Multigraph, Multigraph)> {
    let min_label = pd
        .crossings
        .iter()
        .flat_map(|x| x.iter().copied())
        .min()
        .expect("at least one crossing");
    let (sc, sj) = pd
        .crossings
        .iter()
        .enumerate()
        .find_map(|(ci, x)| x.iter().position(|&l| l == min_label).map(|j| (ci, j)))
        .expect("label present");
    // Leaving through slot sj starts from the corner just clockwise of it.
    let seed = map.face_of[sc][(sj + 3) % 4];
    let shaded = map.colour_faces(seed)?;

    let mut index = vec![usize::MAX; shaded.len()];
    let (mut n_shaded, mut n_white) = (0, 0);
    for (f, &s) in shaded.iter().enumerate() {
        let counter = if s { &mut n_shaded } else { &mut n_white };
        index[f] = *counter;
        *counter += 1;
    }
    let mut g_shaded = Multigraph::empty(n_shaded);
    let mut g_white = Multigraph::empty(n_white);
    for corners in &map.face_of {
        for j in 0..2 {
            let (a, b) = (corners[j], corners[j + 2]);
            if shaded[a] != shaded[b] {
                return Err(Error::MalformedPd("opposite corners differ in colour".into()));
            }
            let g = if shaded[a] { &mut g_shaded } else { &mut g_white };
            g.add_edge(index[a], index[b])?;
        }
    }
    Ok((g_shaded, g_white))
}

/// Number of twist regions: crossings joined through bigon faces form one
/// region; a crossing on no bigon is a region by itself.
pub fn twist_regions(pd: &PdCode) -> Result<usize> {
    let map = PlaneMap::build(pd)?;
    Ok(count_twist_regions(&map))
}

fn count_twist_regions(map: &PlaneMap) -> usize {
    let c = map.crossing_count();
    let mut parent: Vec<usize> = (0..c).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut bigon_at: HashMap<usize, usize> = HashMap::new();
    for (ci, corners) in map.face_of.iter().enumerate() {
        for &f in corners {
            if map.face_sizes[f] == 2 {
                if let Some(&other) = bigon_at.get(&f) {
                    let (a, b) = (root(&mut parent, ci), root(&mut parent, other));
                    parent[a] = b;
                } else {
                    bigon_at.insert(f, ci);
                }
            }
        }
    }
    (0..c).filter(|&x| root(&mut parent, x) == x).count()
}

/// A validated diagram with everything derived from its plane map.
#[derive(Debug, Clone, Serialize)]
pub struct Diagram {
    pub pd: PdCode,
    pub faces: FaceVector,
    pub shaded: Multigraph,
    pub white: Multigraph,
    pub crossing_count: usize,
    pub twist_count: usize,
}

impl Diagram {
    pub fn from_pd(pd: PdCode) -> Result<Self> {
        let map = PlaneMap::build(&pd)?;
        let faces = FaceVector::from_sizes(map.face_sizes.iter().copied())?;
        let (shaded, white) = tait_graphs(&pd, &map)?;
        let twist_count = count_twist_regions(&map);
        Ok(Diagram {
            crossing_count: pd.crossing_count(),
            pd,
            faces,
            shaded,
            white,
            twist_count,
        })
    }

    /// The Tait graph with fewer vertices; cheaper for matrix-tree counts.
    pub fn smaller_tait_graph(&self) -> &Multigraph {
        if self.shaded.vertex_count() <= self.white.vertex_count() {
            &self.shaded
        } else {
            &self.white
        }
    }
}

/// Which end of an edge a half-edge sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Tail,
    Head,
}

/// A half-edge: edge index plus end.
pub type HalfEdge = (usize, End);

/// A graph embedded in the sphere by a rotation system: `rotation[v]` lists
/// the half-edges at `v` in counterclockwise order.
#[derive(Debug, Clone, Default)]
pub struct EmbeddedGraph {
    pub edges: Vec<(usize, usize)>,
    pub rotation: Vec<Vec<HalfEdge>>,
}

impl EmbeddedGraph {
    pub fn with_vertices(n: usize) -> Self {
        EmbeddedGraph {
            edges: Vec::new(),
            rotation: vec![Vec::new(); n],
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.rotation.push(Vec::new());
        self.rotation.len() - 1
    }

    /// Adds an edge without placing its half-edges in any rotation.
    pub fn add_edge(&mut self, tail: usize, head: usize) -> usize {
        self.edges.push((tail, head));
        self.edges.len() - 1
    }

    pub fn to_multigraph(&self) -> Multigraph {
        Multigraph::new(self.rotation.len(), self.edges.iter().copied())
            .expect("embedded edges are in range")
    }

    /// PD code of the alternating diagram whose checkerboard graph is this
    /// embedded graph: one crossing per edge, one arc per corner.
    ///
    /// Around the crossing of edge `tail → head` the slots are, counterclockwise:
    /// the corner before it at the head, the corner after it at the tail, the
    /// corner before it at the tail, the corner after it at the head.
    pub fn medial_pd(&self) -> Result<PdCode> {
        let m = self.edges.len();
        let mut placed = vec![[false; 2]; m];
        for rot in &self.rotation {
            for &(e, end) in rot {
                if e >= m || std::mem::replace(&mut placed[e][end as usize], true) {
                    return Err(Error::MalformedGraph(format!(
                        "half-edge ({e}, {end:?}) missing or repeated"
                    )));
                }
            }
        }
        if placed.iter().any(|p| !p[0] || !p[1]) {
            return Err(Error::MalformedGraph("half-edge missing from rotation".into()));
        }
        let slot = |end: End, after: bool| match (end, after) {
            (End::Head, false) => 0,
            (End::Tail, true) => 1,
            (End::Tail, false) => 2,
            (End::Head, true) => 3,
        };
        let mut crossings = vec![[0i64; 4]; m];
        let mut label = 0i64;
        for rot in &self.rotation {
            let d = rot.len();
            for i in 0..d {
                let (e1, end1) = rot[i];
                let (e2, end2) = rot[(i + 1) % d];
                label += 1;
                crossings[e1][slot(end1, true)] = label;
                crossings[e2][slot(end2, false)] = label;
            }
        }
        Ok(PdCode { crossings })
    }
}
