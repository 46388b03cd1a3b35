//! Multiply marked graphs: loops, six vertex marks, free loops and optional vertex weights.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::gf2::BitRow;
use crate::poly::BracketPoly;

/// Stable vertex handle. Survives deletion of other vertices.
pub type VertexId = u32;

/// Exhaustive isomorphism search refuses graphs above this size.
pub const ISOMORPHISM_MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("edge {0}-{0} would be a loop; loops are a vertex flag")]
    SelfEdge(VertexId),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("graph has {n} vertices, above the supported bound of {max}")]
    Capacity { n: usize, max: usize },
}

/// The letter part of a mark, ignoring `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    None,
    C,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Mark {
    #[default]
    Unmarked,
    R,
    C,
    Cr,
    U,
    Ur,
}

impl Mark {
    pub const ALL: [Mark; 6] = [Mark::Unmarked, Mark::R, Mark::C, Mark::Cr, Mark::U, Mark::Ur];

    pub fn has_r(self) -> bool {
        matches!(self, Mark::R | Mark::Cr | Mark::Ur)
    }

    pub fn letter(self) -> Letter {
        match self {
            Mark::Unmarked | Mark::R => Letter::None,
            Mark::C | Mark::Cr => Letter::C,
            Mark::U | Mark::Ur => Letter::U,
        }
    }

    pub fn from_parts(letter: Letter, r: bool) -> Mark {
        match (letter, r) {
            (Letter::None, false) => Mark::Unmarked,
            (Letter::None, true) => Mark::R,
            (Letter::C, false) => Mark::C,
            (Letter::C, true) => Mark::Cr,
            (Letter::U, false) => Mark::U,
            (Letter::U, true) => Mark::Ur,
        }
    }

    pub fn toggle_r(self) -> Mark {
        Mark::from_parts(self.letter(), !self.has_r())
    }

    /// Mark of the complemented vertex itself: unmarked<->u, r<->ur, c<->cr.
    pub fn complement_center(self) -> Mark {
        match self {
            Mark::Unmarked => Mark::U,
            Mark::U => Mark::Unmarked,
            Mark::R => Mark::Ur,
            Mark::Ur => Mark::R,
            Mark::C => Mark::Cr,
            Mark::Cr => Mark::C,
        }
    }

    /// Mark of a neighbor of the complemented vertex: unmarked<->r, c<->ur, u<->cr.
    pub fn complement_neighbor(self) -> Mark {
        match self {
            Mark::Unmarked => Mark::R,
            Mark::R => Mark::Unmarked,
            Mark::C => Mark::Ur,
            Mark::Ur => Mark::C,
            Mark::U => Mark::Cr,
            Mark::Cr => Mark::U,
        }
    }

    /// Mark of either pivot vertex after a marked pivot: c<->unmarked, r<->cr, u<->ur.
    pub fn pivot_swap(self) -> Mark {
        match self {
            Mark::C => Mark::Unmarked,
            Mark::Unmarked => Mark::C,
            Mark::R => Mark::Cr,
            Mark::Cr => Mark::R,
            Mark::U => Mark::Ur,
            Mark::Ur => Mark::U,
        }
    }

    /// Keyword used in the text format; `None` for unmarked.
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            Mark::Unmarked => None,
            Mark::R => Some("r"),
            Mark::C => Some("c"),
            Mark::Cr => Some("cr"),
            Mark::U => Some("u"),
            Mark::Ur => Some("ur"),
        }
    }

    pub fn from_keyword(s: &str) -> Option<Mark> {
        Some(match s {
            "r" => Mark::R,
            "c" => Mark::C,
            "cr" => Mark::Cr,
            "u" => Mark::U,
            "ur" => Mark::Ur,
            _ => return None,
        })
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword().unwrap_or("unmarked"))
    }
}

/// Vertex weights `(alpha, beta)`; absent means the formal pair `(A, B)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weights {
    pub alpha: BracketPoly,
    pub beta: BracketPoly,
}

impl Weights {
    pub fn new(alpha: BracketPoly, beta: BracketPoly) -> Self {
        Weights { alpha, beta }
    }

    pub fn formal() -> Self {
        Weights { alpha: BracketPoly::a(), beta: BracketPoly::b() }
    }

    pub fn is_formal(&self) -> bool {
        *self == Weights::formal()
    }
}

/// A multiply marked graph. Vertices are kept sorted by handle, so structural equality is
/// independent of construction order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MarkedGraph {
    ids: Vec<VertexId>,
    looped: Vec<bool>,
    marks: Vec<Mark>,
    weights: Vec<Option<Weights>>,
    adj: Vec<BitRow>,
    free_loops: u32,
}

impl MarkedGraph {
    pub fn new() -> Self {
        MarkedGraph::default()
    }

    /// Builds a graph on handles `0..n` from plain data.
    pub fn from_parts(
        vertices: &[(bool, Mark)],
        edges: &[(VertexId, VertexId)],
        free_loops: u32,
    ) -> Result<Self, GraphError> {
        let mut g = MarkedGraph::new();
        for (i, &(looped, mark)) in vertices.iter().enumerate() {
            g.add_vertex(i as VertexId, looped, mark)?;
        }
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        g.free_loops = free_loops;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    pub fn set_free_loops(&mut self, k: u32) {
        self.free_loops = k;
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, v: VertexId) -> Result<usize, GraphError> {
        self.ids.binary_search(&v).map_err(|_| GraphError::UnknownVertex(v))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    /// Smallest handle greater than every existing one.
    pub fn fresh_id(&self) -> VertexId {
        self.ids.last().map_or(0, |&m| m + 1)
    }

    pub fn add_vertex(&mut self, v: VertexId, looped: bool, mark: Mark) -> Result<(), GraphError> {
        let at = match self.ids.binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateVertex(v)),
            Err(at) => at,
        };
        self.ids.insert(at, v);
        self.looped.insert(at, looped);
        self.marks.insert(at, mark);
        self.weights.insert(at, None);
        for row in &mut self.adj {
            row.insert(at, false);
        }
        self.adj.insert(at, BitRow::zeros(self.ids.len()));
        Ok(())
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfEdge(a));
        }
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.adj[i].set(j, true);
        self.adj[j].set(i, true);
        Ok(())
    }

    pub fn set_adjacent(&mut self, a: VertexId, b: VertexId, value: bool) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfEdge(a));
        }
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.adj[i].set(j, value);
        self.adj[j].set(i, value);
        Ok(())
    }

    pub fn set_looped(&mut self, v: VertexId, looped: bool) -> Result<(), GraphError> {
        let i = self.index_of(v)?;
        self.looped[i] = looped;
        Ok(())
    }

    pub fn set_mark(&mut self, v: VertexId, mark: Mark) -> Result<(), GraphError> {
        let i = self.index_of(v)?;
        self.marks[i] = mark;
        Ok(())
    }

    /// Sets vertex weights; the formal pair `(A, B)` is stored as "no weights".
    pub fn set_weights(&mut self, v: VertexId, w: Weights) -> Result<(), GraphError> {
        let i = self.index_of(v)?;
        self.weights[i] = if w.is_formal() { None } else { Some(w) };
        Ok(())
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> Result<bool, GraphError> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        Ok(i != j && self.adj[i].get(j))
    }

    pub fn is_looped(&self, v: VertexId) -> Result<bool, GraphError> {
        Ok(self.looped[self.index_of(v)?])
    }

    pub fn mark(&self, v: VertexId) -> Result<Mark, GraphError> {
        Ok(self.marks[self.index_of(v)?])
    }

    pub fn weights(&self, v: VertexId) -> Result<Weights, GraphError> {
        let i = self.index_of(v)?;
        Ok(self.weights_at(i))
    }

    pub fn has_custom_weights(&self, v: VertexId) -> Result<bool, GraphError> {
        Ok(self.weights[self.index_of(v)?].is_some())
    }

    /// True when every vertex carries the formal weights `(A, B)`.
    pub fn has_formal_weights(&self) -> bool {
        self.weights.iter().all(Option::is_none)
    }

    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let i = self.index_of(v)?;
        Ok(self.adj[i].iter_ones().map(|j| self.ids[j]).collect())
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        Ok(self.adj[self.index_of(v)?].count_ones())
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in self.adj[i].iter_ones().filter(|&j| j > i) {
                out.push((self.ids[i], self.ids[j]));
            }
        }
        out
    }

    pub fn loop_count(&self) -> usize {
        self.looped.iter().filter(|&&l| l).count()
    }

    /// `n - 2 * (number of looped vertices)`.
    pub fn writhe(&self) -> i64 {
        self.n() as i64 - 2 * self.loop_count() as i64
    }

    // Index-level accessors used by the bracket engine.

    pub(crate) fn looped_at(&self, i: usize) -> bool {
        self.looped[i]
    }

    pub(crate) fn mark_at(&self, i: usize) -> Mark {
        self.marks[i]
    }

    pub(crate) fn weights_at(&self, i: usize) -> Weights {
        self.weights[i].clone().unwrap_or_else(Weights::formal)
    }

    pub(crate) fn custom_weights_at(&self, i: usize) -> Option<&Weights> {
        self.weights[i].as_ref()
    }

    pub(crate) fn adj_row(&self, i: usize) -> &BitRow {
        &self.adj[i]
    }

    /// Removes the listed vertices; the remaining handles are unchanged.
    pub fn remove_vertices(&self, vs: &[VertexId]) -> Result<MarkedGraph, GraphError> {
        let mut drop = vec![false; self.n()];
        for &v in vs {
            drop[self.index_of(v)?] = true;
        }
        let keep: Vec<usize> = (0..self.n()).filter(|&i| !drop[i]).collect();
        Ok(MarkedGraph {
            ids: keep.iter().map(|&i| self.ids[i]).collect(),
            looped: keep.iter().map(|&i| self.looped[i]).collect(),
            marks: keep.iter().map(|&i| self.marks[i]).collect(),
            weights: keep.iter().map(|&i| self.weights[i].clone()).collect(),
            adj: keep.iter().map(|&i| self.adj[i].select(&keep)).collect(),
            free_loops: self.free_loops,
        })
    }

    pub fn remove_vertex(&self, v: VertexId) -> Result<MarkedGraph, GraphError> {
        self.remove_vertices(&[v])
    }

    fn toggle_among(&mut self, members: &[usize]) {
        for (k, &x) in members.iter().enumerate() {
            for &y in &members[k + 1..] {
                self.adj[x].toggle(y);
                self.adj[y].toggle(x);
            }
        }
    }

    /// Marked local complement at `v`: relabels `v` and its neighbors and toggles adjacency
    /// among the neighbors. Loops, weights and free loops are untouched.
    pub fn marked_local_complement(&self, v: VertexId) -> Result<MarkedGraph, GraphError> {
        let i = self.index_of(v)?;
        let mut g = self.clone();
        let nbrs: Vec<usize> = self.adj[i].iter_ones().collect();
        g.marks[i] = self.marks[i].complement_center();
        for &w in &nbrs {
            g.marks[w] = self.marks[w].complement_neighbor();
        }
        g.toggle_among(&nbrs);
        Ok(g)
    }

    /// Ordinary local complement of a looped graph: toggles loops on the neighbors of `v`
    /// and adjacency among them. Marks are left alone.
    pub fn plain_local_complement(&self, v: VertexId) -> Result<MarkedGraph, GraphError> {
        let i = self.index_of(v)?;
        let mut g = self.clone();
        let nbrs: Vec<usize> = self.adj[i].iter_ones().collect();
        for &w in &nbrs {
            g.looped[w] = !g.looped[w];
        }
        g.toggle_among(&nbrs);
        Ok(g)
    }

    /// Marked pivot on the edge `v`-`w`, as the triple complement at `v`, `w`, `v`.
    pub fn marked_pivot(&self, v: VertexId, w: VertexId) -> Result<MarkedGraph, GraphError> {
        if !self.adjacent(v, w)? {
            return Err(GraphError::NotAdjacent(v, w));
        }
        self.marked_local_complement(v)?.marked_local_complement(w)?.marked_local_complement(v)
    }

    /// Marked pivot built directly from the neighborhood partition of `v` and `w`.
    pub fn marked_pivot_direct(&self, v: VertexId, w: VertexId) -> Result<MarkedGraph, GraphError> {
        if !self.adjacent(v, w)? {
            return Err(GraphError::NotAdjacent(v, w));
        }
        let (iv, iw) = (self.index_of(v)?, self.index_of(w)?);
        // cell 0: neighbors of v only, 1: of w only, 2: shared; v and w themselves excluded
        let cell = |x: usize| -> Option<usize> {
            if x == iv || x == iw {
                return None;
            }
            match (self.adj[iv].get(x), self.adj[iw].get(x)) {
                (true, false) => Some(0),
                (false, true) => Some(1),
                (true, true) => Some(2),
                (false, false) => None,
            }
        };
        let mut g = self.clone();
        g.marks[iv] = self.marks[iv].pivot_swap();
        g.marks[iw] = self.marks[iw].pivot_swap();
        let cells: Vec<Option<usize>> = (0..self.n()).map(cell).collect();
        for x in 0..self.n() {
            match cells[x] {
                Some(0) => {
                    g.set_adj_idx(iv, x, false);
                    g.set_adj_idx(iw, x, true);
                }
                Some(1) => {
                    g.set_adj_idx(iv, x, true);
                    g.set_adj_idx(iw, x, false);
                }
                _ => {}
            }
            for y in x + 1..self.n() {
                if let (Some(a), Some(b)) = (cells[x], cells[y]) {
                    if a != b {
                        g.adj[x].toggle(y);
                        g.adj[y].toggle(x);
                    }
                }
            }
        }
        Ok(g)
    }

    fn set_adj_idx(&mut self, i: usize, j: usize, value: bool) {
        self.adj[i].set(j, value);
        self.adj[j].set(i, value);
    }

    /// Drops every `r` from the marks, toggling the loop at each such vertex.
    pub fn r_simplify(&self) -> MarkedGraph {
        let mut g = self.clone();
        for i in 0..g.n() {
            if g.marks[i].has_r() {
                g.marks[i] = g.marks[i].toggle_r();
                g.looped[i] = !g.looped[i];
            }
        }
        g
    }

    /// Toggles both the loop and the `r` letter at one vertex.
    pub fn toggle_loop_and_r(&self, v: VertexId) -> Result<MarkedGraph, GraphError> {
        let i = self.index_of(v)?;
        let mut g = self.clone();
        g.looped[i] = !g.looped[i];
        g.marks[i] = g.marks[i].toggle_r();
        Ok(g)
    }

    /// Disjoint union; handles of `other` must not collide with ours.
    pub fn disjoint_union(&self, other: &MarkedGraph) -> Result<MarkedGraph, GraphError> {
        let mut g = self.clone();
        for i in 0..other.n() {
            g.add_vertex(other.ids[i], other.looped[i], other.marks[i])?;
            if let Some(w) = &other.weights[i] {
                g.set_weights(other.ids[i], w.clone())?;
            }
        }
        for (a, b) in other.edges() {
            g.add_edge(a, b)?;
        }
        g.free_loops += other.free_loops;
        Ok(g)
    }

    /// Renames vertices by adding `offset` to every handle.
    pub fn shifted(&self, offset: VertexId) -> MarkedGraph {
        let mut g = self.clone();
        for id in &mut g.ids {
            *id += offset;
        }
        g
    }

    fn vertex_signature(&self, i: usize) -> u64 {
        let mut h = DefaultHasher::new();
        (self.looped[i], self.marks[i], &self.weights[i], self.adj[i].count_ones()).hash(&mut h);
        h.finish()
    }

    /// Vertex colors after a few rounds of neighborhood refinement. Equal for corresponding
    /// vertices of isomorphic graphs.
    pub(crate) fn refined_colors(&self) -> Vec<u64> {
        let mut colors: Vec<u64> = (0..self.n()).map(|i| self.vertex_signature(i)).collect();
        for _ in 0..3 {
            colors = (0..self.n())
                .map(|i| {
                    let mut nb: Vec<u64> = self.adj[i].iter_ones().map(|j| colors[j]).collect();
                    nb.sort_unstable();
                    let mut h = DefaultHasher::new();
                    (colors[i], nb).hash(&mut h);
                    h.finish()
                })
                .collect();
        }
        colors
    }

    /// Isomorphism-invariant fingerprint: equal for isomorphic graphs.
    pub fn invariant_key(&self) -> u64 {
        let mut colors = self.refined_colors();
        colors.sort_unstable();
        let mut h = DefaultHasher::new();
        (self.n(), self.free_loops, colors).hash(&mut h);
        h.finish()
    }

    /// Whether a vertex bijection preserves adjacency, loops, marks and weights, with equal
    /// free-loop counts. Exhaustive search, limited to [`ISOMORPHISM_MAX_VERTICES`].
    pub fn is_isomorphic(&self, other: &MarkedGraph) -> Result<bool, GraphError> {
        for g in [self, other] {
            if g.n() > ISOMORPHISM_MAX_VERTICES {
                return Err(GraphError::Capacity { n: g.n(), max: ISOMORPHISM_MAX_VERTICES });
            }
        }
        if self.n() != other.n()
            || self.free_loops != other.free_loops
            || self.edges().len() != other.edges().len()
        {
            return Ok(false);
        }
        let (ca, cb) = (self.refined_colors(), other.refined_colors());
        let (mut sa, mut sb) = (ca.clone(), cb.clone());
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return Ok(false);
        }
        // most constrained vertices first
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by_key(|&i| ca.iter().filter(|&&c| c == ca[i]).count());
        let mut image = vec![usize::MAX; self.n()];
        let mut used = vec![false; self.n()];
        Ok(self.extend_iso(other, &ca, &cb, &order, 0, &mut image, &mut used))
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_iso(
        &self,
        other: &MarkedGraph,
        ca: &[u64],
        cb: &[u64],
        order: &[usize],
        depth: usize,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let i = order[depth];
        for j in 0..other.n() {
            if used[j]
                || cb[j] != ca[i]
                || self.looped[i] != other.looped[j]
                || self.marks[i] != other.marks[j]
                || self.weights[i] != other.weights[j]
            {
                continue;
            }
            let consistent = order[..depth].iter().all(|&k| self.adj[i].get(k) == other.adj[j].get(image[k]));
            if !consistent {
                continue;
            }
            image[i] = j;
            used[j] = true;
            if self.extend_iso(other, ca, cb, order, depth + 1, image, used) {
                return true;
            }
            used[j] = false;
            image[i] = usize::MAX;
        }
        false
    }
}

impl fmt::Debug for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkedGraph {{ free_loops: {}, vertices: [", self.free_loops)?;
        for i in 0..self.n() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.ids[i])?;
            if self.looped[i] {
                f.write_str("ℓ")?;
            }
            if let Some(k) = self.marks[i].keyword() {
                write!(f, ":{k}")?;
            }
            if let Some(w) = &self.weights[i] {
                write!(f, "[{}; {}]", w.alpha, w.beta)?;
            }
        }
        f.write_str("], edges: [")?;
        for (k, (a, b)) in self.edges().into_iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}-{b}")?;
        }
        f.write_str("] }")
    }
}
