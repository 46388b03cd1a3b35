//! Reidemeister-type moves on marked graphs, graph-link moves on labeled simple graphs, and a
//! bounded breadth-first equivalence search.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bracket::jones;
use crate::diagram::Sign;
use crate::graph::{GraphError, Mark, MarkedGraph, VertexId, ISOMORPHISM_MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad move: {0}")]
    Parse(String),
}

fn not_applicable<T>(msg: impl Into<String>) -> Result<T, MoveError> {
    Err(MoveError::NotApplicable(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Omega1,
    Omega2a,
    Omega2b,
    Omega2c,
    Omega2d,
    Omega3,
}

/// A move instance on named vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MoveSpec {
    /// Remove an isolated vertex marked unmarked or u.
    Omega1Remove { v: VertexId },
    /// Adjoin an isolated vertex marked unmarked or u under a new handle.
    Omega1Adjoin { v: VertexId, looped: bool, mark: Mark },
    /// Remove looped `v` and unlooped `w`, both unmarked, with equal outside neighbors.
    Omega2a { v: VertexId, w: VertexId },
    /// Adjoin such a pair, attached to `neighbors`.
    Omega2aAdjoin { v: VertexId, w: VertexId, adjacent: bool, neighbors: Vec<VertexId> },
    /// `v` looped c, `w` unlooped unmarked with sole neighbor `v`, `z` another neighbor of `v`.
    Omega2b { v: VertexId, w: VertexId, z: VertexId },
    /// `v` looped c, `w` unlooped unmarked, adjacent with equal outside neighbors, `z` a shared
    /// neighbor.
    Omega2c { v: VertexId, w: VertexId, z: VertexId },
    /// `v` looped c and `w` unlooped unmarked forming an isolated edge; becomes a free loop.
    Omega2d { v: VertexId, w: VertexId },
    /// Turn a free loop into such an isolated edge.
    Omega2dAdjoin { v: VertexId, w: VertexId },
    /// Remove the triangle on unmarked `u` (looped), `v`, `w` (unlooped).
    Omega3 { u: VertexId, v: VertexId, w: VertexId },
    /// Add that triangle to three pairwise nonadjacent vertices.
    Omega3Inverse { u: VertexId, v: VertexId, w: VertexId },
    /// Marked local complements at `pre`, then `inner`, then complements at `post`.
    Conjugated { pre: Vec<VertexId>, inner: Box<MoveSpec>, post: Vec<VertexId> },
}

impl MoveSpec {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveSpec::Omega1Remove { .. } | MoveSpec::Omega1Adjoin { .. } => MoveKind::Omega1,
            MoveSpec::Omega2a { .. } | MoveSpec::Omega2aAdjoin { .. } => MoveKind::Omega2a,
            MoveSpec::Omega2b { .. } => MoveKind::Omega2b,
            MoveSpec::Omega2c { .. } => MoveKind::Omega2c,
            MoveSpec::Omega2d { .. } | MoveSpec::Omega2dAdjoin { .. } => MoveKind::Omega2d,
            MoveSpec::Omega3 { .. } | MoveSpec::Omega3Inverse { .. } => MoveKind::Omega3,
            MoveSpec::Conjugated { inner, .. } => inner.kind(),
        }
    }
}

fn join(vs: &[VertexId]) -> String {
    vs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for MoveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveSpec::Omega1Remove { v } => write!(f, "o1 {v}"),
            MoveSpec::Omega1Adjoin { v, looped, mark } => {
                write!(f, "o1+ {v}")?;
                if *looped {
                    f.write_str(" loop")?;
                }
                if *mark == Mark::U {
                    f.write_str(" u")?;
                }
                Ok(())
            }
            MoveSpec::Omega2a { v, w } => write!(f, "o2a {v} {w}"),
            MoveSpec::Omega2aAdjoin { v, w, adjacent, neighbors } => {
                write!(f, "o2a+ {v} {w}")?;
                if *adjacent {
                    f.write_str(" adjacent")?;
                }
                for x in neighbors {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            MoveSpec::Omega2b { v, w, z } => write!(f, "o2b {v} {w} {z}"),
            MoveSpec::Omega2c { v, w, z } => write!(f, "o2c {v} {w} {z}"),
            MoveSpec::Omega2d { v, w } => write!(f, "o2d {v} {w}"),
            MoveSpec::Omega2dAdjoin { v, w } => write!(f, "o2d+ {v} {w}"),
            MoveSpec::Omega3 { u, v, w } => write!(f, "o3 {u} {v} {w}"),
            MoveSpec::Omega3Inverse { u, v, w } => write!(f, "o3+ {u} {v} {w}"),
            MoveSpec::Conjugated { pre, inner, post } => {
                write!(f, "[{}] {inner} [{}]", join(pre), join(post))
            }
        }
    }
}

fn parse_ids(s: &str) -> Result<Vec<VertexId>, MoveError> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse().map_err(|_| MoveError::Parse(format!("bad vertex id `{t}`"))))
        .collect()
}

impl FromStr for MoveSpec {
    type Err = MoveError;

    /// Accepts the [`fmt::Display`] form, e.g. `o2a 3 4`, `o1+ 7 loop u` or `[1] o3 0 2 5 [1]`.
    fn from_str(s: &str) -> Result<Self, MoveError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('[') {
            let (pre, rest) = rest.split_once(']').ok_or_else(|| MoveError::Parse("unclosed `[`".into()))?;
            let (inner, post) = rest
                .rsplit_once('[')
                .ok_or_else(|| MoveError::Parse("expected a trailing `[...]` list".into()))?;
            let post = post.strip_suffix(']').ok_or_else(|| MoveError::Parse("unclosed `[`".into()))?;
            return Ok(MoveSpec::Conjugated {
                pre: parse_ids(pre)?,
                inner: Box::new(inner.parse()?),
                post: parse_ids(post)?,
            });
        }
        let mut words = s.split_whitespace();
        let kind = words.next().ok_or_else(|| MoveError::Parse("empty move".into()))?;
        let rest: Vec<&str> = words.collect();
        let mut flags = Vec::new();
        let mut ids = Vec::new();
        for w in &rest {
            match w.parse::<VertexId>() {
                Ok(x) => ids.push(x),
                Err(_) => flags.push(*w),
            }
        }
        let arity = |k: usize| -> Result<(), MoveError> {
            if ids.len() == k && flags.is_empty() {
                Ok(())
            } else {
                Err(MoveError::Parse(format!("`{kind}` takes {k} vertex ids")))
            }
        };
        let m = match kind {
            "o1" => {
                arity(1)?;
                MoveSpec::Omega1Remove { v: ids[0] }
            }
            "o1+" => {
                if ids.len() != 1 || flags.iter().any(|f| !matches!(*f, "loop" | "u")) {
                    return Err(MoveError::Parse("`o1+` takes a vertex id and optional `loop`, `u`".into()));
                }
                let mark = if flags.contains(&"u") { Mark::U } else { Mark::Unmarked };
                MoveSpec::Omega1Adjoin { v: ids[0], looped: flags.contains(&"loop"), mark }
            }
            "o2a" => {
                arity(2)?;
                MoveSpec::Omega2a { v: ids[0], w: ids[1] }
            }
            "o2a+" => {
                if ids.len() < 2 || flags.iter().any(|f| *f != "adjacent") {
                    return Err(MoveError::Parse(
                        "`o2a+` takes two new ids, optional `adjacent`, then neighbor ids".into(),
                    ));
                }
                MoveSpec::Omega2aAdjoin {
                    v: ids[0],
                    w: ids[1],
                    adjacent: flags.contains(&"adjacent"),
                    neighbors: ids[2..].to_vec(),
                }
            }
            "o2b" => {
                arity(3)?;
                MoveSpec::Omega2b { v: ids[0], w: ids[1], z: ids[2] }
            }
            "o2c" => {
                arity(3)?;
                MoveSpec::Omega2c { v: ids[0], w: ids[1], z: ids[2] }
            }
            "o2d" => {
                arity(2)?;
                MoveSpec::Omega2d { v: ids[0], w: ids[1] }
            }
            "o2d+" => {
                arity(2)?;
                MoveSpec::Omega2dAdjoin { v: ids[0], w: ids[1] }
            }
            "o3" => {
                arity(3)?;
                MoveSpec::Omega3 { u: ids[0], v: ids[1], w: ids[2] }
            }
            "o3+" => {
                arity(3)?;
                MoveSpec::Omega3Inverse { u: ids[0], v: ids[1], w: ids[2] }
            }
            other => return Err(MoveError::Parse(format!("unknown move `{other}`"))),
        };
        Ok(m)
    }
}

fn neighbors_outside(g: &MarkedGraph, v: VertexId, w: VertexId) -> Result<Vec<VertexId>, GraphError> {
    Ok(g.neighbors(v)?.into_iter().filter(|&x| x != w).collect())
}

fn same_outside(g: &MarkedGraph, v: VertexId, w: VertexId) -> Result<bool, GraphError> {
    Ok(neighbors_outside(g, v, w)? == neighbors_outside(g, w, v)?)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), MoveError> {
    if cond {
        Ok(())
    } else {
        not_applicable(msg())
    }
}

fn check_omega2_pair(g: &MarkedGraph, v: VertexId, w: VertexId, v_mark: Mark) -> Result<(), MoveError> {
    check(v != w, || "the two vertices must differ".into())?;
    check(g.is_looped(v)? && g.mark(v)? == v_mark, || format!("{v} must be looped and marked {v_mark}"))?;
    check(!g.is_looped(w)? && g.mark(w)? == Mark::Unmarked, || format!("{w} must be unlooped and unmarked"))
}

fn check_omega3(
    g: &MarkedGraph,
    u: VertexId,
    v: VertexId,
    w: VertexId,
    edges: bool,
) -> Result<(), MoveError> {
    check(u != v && u != w && v != w, || "the three vertices must differ".into())?;
    for x in [u, v, w] {
        check(g.mark(x)? == Mark::Unmarked, || format!("{x} must be unmarked"))?;
    }
    check(g.is_looped(u)?, || format!("{u} must be looped"))?;
    check(!g.is_looped(v)? && !g.is_looped(w)?, || format!("{v} and {w} must be unlooped"))?;
    for (a, b) in [(u, v), (u, w), (v, w)] {
        check(g.adjacent(a, b)? == edges, || {
            format!("{a} and {b} must be {}", if edges { "adjacent" } else { "nonadjacent" })
        })?;
    }
    for &x in g.ids() {
        if [u, v, w].contains(&x) {
            continue;
        }
        let k = [u, v, w].iter().filter(|&&y| g.adjacent(x, y).unwrap_or(false)).count();
        check(k == 0 || k == 2, || format!("{x} is adjacent to {k} of the three vertices"))?;
    }
    Ok(())
}

/// Applies a move after checking its configuration.
pub fn apply_move(g: &MarkedGraph, m: &MoveSpec) -> Result<MarkedGraph, MoveError> {
    match m {
        MoveSpec::Omega1Remove { v } => {
            let mark = g.mark(*v)?;
            check(g.degree(*v)? == 0, || format!("{v} is not isolated"))?;
            check(matches!(mark, Mark::Unmarked | Mark::U), || format!("{v} is marked {mark}"))?;
            Ok(g.remove_vertex(*v)?)
        }
        MoveSpec::Omega1Adjoin { v, looped, mark } => {
            check(matches!(mark, Mark::Unmarked | Mark::U), || format!("cannot adjoin mark {mark}"))?;
            let mut h = g.clone();
            h.add_vertex(*v, *looped, *mark)?;
            Ok(h)
        }
        MoveSpec::Omega2a { v, w } => {
            check_omega2_pair(g, *v, *w, Mark::Unmarked)?;
            check(same_outside(g, *v, *w)?, || format!("{v} and {w} have different neighbors"))?;
            Ok(g.remove_vertices(&[*v, *w])?)
        }
        MoveSpec::Omega2aAdjoin { v, w, adjacent, neighbors } => {
            let mut h = g.clone();
            h.add_vertex(*v, true, Mark::Unmarked)?;
            h.add_vertex(*w, false, Mark::Unmarked)?;
            if *adjacent {
                h.add_edge(*v, *w)?;
            }
            for &x in neighbors {
                check(x != *v && x != *w, || "neighbors must be existing vertices".into())?;
                h.add_edge(*v, x)?;
                h.add_edge(*w, x)?;
            }
            Ok(h)
        }
        MoveSpec::Omega2b { v, w, z } => {
            check_omega2_pair(g, *v, *w, Mark::C)?;
            check(g.neighbors(*w)? == vec![*v], || format!("{v} must be the only neighbor of {w}"))?;
            check(*z != *w && g.adjacent(*v, *z)?, || format!("{z} must be another neighbor of {v}"))?;
            Ok(g.marked_pivot(*v, *z)?.remove_vertices(&[*v, *w])?)
        }
        MoveSpec::Omega2c { v, w, z } => {
            check_omega2_pair(g, *v, *w, Mark::C)?;
            check(same_outside(g, *v, *w)?, || format!("{v} and {w} have different neighbors"))?;
            check(g.adjacent(*v, *w)?, || format!("{v} and {w} must be adjacent"))?;
            check(*z != *v && *z != *w && g.adjacent(*v, *z)? && g.adjacent(*w, *z)?, || {
                format!("{z} must be a neighbor of both {v} and {w}")
            })?;
            Ok(g.marked_pivot(*v, *z)?.remove_vertices(&[*v, *w])?)
        }
        MoveSpec::Omega2d { v, w } => {
            check_omega2_pair(g, *v, *w, Mark::C)?;
            check(g.neighbors(*v)? == vec![*w] && g.neighbors(*w)? == vec![*v], || {
                format!("{v} and {w} must be each other's only neighbors")
            })?;
            let mut h = g.remove_vertices(&[*v, *w])?;
            h.set_free_loops(g.free_loops() + 1);
            Ok(h)
        }
        MoveSpec::Omega2dAdjoin { v, w } => {
            check(g.free_loops() > 0, || "no free loop to replace".into())?;
            let mut h = g.clone();
            h.add_vertex(*v, true, Mark::C)?;
            h.add_vertex(*w, false, Mark::Unmarked)?;
            h.add_edge(*v, *w)?;
            h.set_free_loops(g.free_loops() - 1);
            Ok(h)
        }
        MoveSpec::Omega3 { u, v, w } | MoveSpec::Omega3Inverse { u, v, w } => {
            let removing = matches!(m, MoveSpec::Omega3 { .. });
            check_omega3(g, *u, *v, *w, removing)?;
            let mut h = g.clone();
            for (a, b) in [(u, v), (u, w), (v, w)] {
                h.set_adjacent(*a, *b, !removing)?;
            }
            Ok(h)
        }
        MoveSpec::Conjugated { pre, inner, post } => {
            let mut h = g.clone();
            for &x in pre {
                h = h.marked_local_complement(x)?;
            }
            h = apply_move(&h, inner)?;
            for &x in post {
                h = h.marked_local_complement(x)?;
            }
            Ok(h)
        }
    }
}

/// Every unconjugated move instance applicable to `g`, in a fixed order. Adjoining moves use
/// fresh handles; the open-ended Ω.2(a) adjunction is not enumerated.
pub fn detect_moves(g: &MarkedGraph) -> Vec<MoveSpec> {
    let ids = g.ids().to_vec();
    let mut out = Vec::new();
    let ok = |m: &MoveSpec| apply_move(g, m).is_ok();
    for &v in &ids {
        out.push(MoveSpec::Omega1Remove { v });
    }
    let fresh = g.fresh_id();
    for looped in [false, true] {
        for mark in [Mark::Unmarked, Mark::U] {
            out.push(MoveSpec::Omega1Adjoin { v: fresh, looped, mark });
        }
    }
    for &v in &ids {
        for &w in &ids {
            out.push(MoveSpec::Omega2a { v, w });
            for &z in &ids {
                out.push(MoveSpec::Omega2b { v, w, z });
                out.push(MoveSpec::Omega2c { v, w, z });
            }
            out.push(MoveSpec::Omega2d { v, w });
        }
    }
    out.push(MoveSpec::Omega2dAdjoin { v: fresh, w: fresh + 1 });
    for &u in &ids {
        for (k, &v) in ids.iter().enumerate() {
            for &w in &ids[k + 1..] {
                out.push(MoveSpec::Omega3 { u, v, w });
                out.push(MoveSpec::Omega3Inverse { u, v, w });
            }
        }
    }
    out.retain(ok);
    out
}

/// The first coordinate and sign of a graph-link vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlLabel {
    pub one: bool,
    pub sign: Sign,
}

impl GlLabel {
    pub fn new(first: u8, sign: Sign) -> Self {
        GlLabel { one: first == 1, sign }
    }

    pub fn first(self) -> u8 {
        u8::from(self.one)
    }
}

impl fmt::Display for GlLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first(), self.sign.symbol())
    }
}

/// A simple graph whose vertices carry labels in `{0, 1} x {+, -}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledGraph {
    labels: BTreeMap<VertexId, GlLabel>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

fn edge_key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

impl LabeledGraph {
    pub fn new() -> Self {
        LabeledGraph::default()
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn add_vertex(&mut self, v: VertexId, label: GlLabel) -> Result<(), GraphError> {
        if self.labels.insert(v, label).is_some() {
            return Err(GraphError::DuplicateVertex(v));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfEdge(a));
        }
        self.label(a)?;
        self.label(b)?;
        self.edges.insert(edge_key(a, b));
        Ok(())
    }

    pub fn label(&self, v: VertexId) -> Result<GlLabel, GraphError> {
        self.labels.get(&v).copied().ok_or(GraphError::UnknownVertex(v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, GlLabel)> + '_ {
        self.labels.iter().map(|(&v, &l)| (v, l))
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&edge_key(a, b))
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.labels.keys().copied().filter(|&x| x != v && self.adjacent(v, x)).collect()
    }

    fn set_label(&mut self, v: VertexId, label: GlLabel) {
        self.labels.insert(v, label);
    }

    fn toggle_edge(&mut self, a: VertexId, b: VertexId) {
        let k = edge_key(a, b);
        if !self.edges.remove(&k) {
            self.edges.insert(k);
        }
    }

    fn remove_vertex(&mut self, v: VertexId) {
        self.labels.remove(&v);
        self.edges.retain(|&(a, b)| a != v && b != v);
    }

    /// Simple local complement: toggles edges among the neighbors of `v`.
    pub fn local_complement(&self, v: VertexId) -> LabeledGraph {
        let nbrs = self.neighbors(v);
        let mut h = self.clone();
        for (k, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[k + 1..] {
                h.toggle_edge(a, b);
            }
        }
        h
    }
}

/// `(0,+)` becomes looped u, `(0,-)` unlooped u, `(1,+)` unlooped c and `(1,-)` looped c.
pub fn to_marked(g: &LabeledGraph) -> MarkedGraph {
    let mut m = MarkedGraph::new();
    for (v, l) in g.vertices() {
        let mark = if l.one { Mark::C } else { Mark::U };
        let looped = l.one == (l.sign == Sign::Minus);
        m.add_vertex(v, looped, mark).expect("distinct vertices");
    }
    for (a, b) in g.edges() {
        m.add_edge(a, b).expect("known vertices");
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GraphLinkMove {
    /// Remove an isolated vertex labeled `(0, ±)`.
    G1 { v: VertexId },
    /// Remove a nonadjacent `(0, α)`, `(0, -α)` pair or an adjacent `(1, α)`, `(1, -α)` pair
    /// with equal outside neighbors.
    G2 { v: VertexId, w: VertexId },
    /// `v`, `w`, `x` labeled `(0, -)`, the neighbors of `x` exactly `v` and `w`, which are
    /// nonadjacent.
    G3 { v: VertexId, w: VertexId, x: VertexId },
    /// Triple local complement along an edge of `(0, α)` and `(0, β)` vertices.
    G4 { v: VertexId, w: VertexId },
    /// Local complement at a `(1, α)` vertex.
    G4Prime { v: VertexId },
}

/// Applies a graph-link move after checking its configuration.
///
/// The triple local complement in `G4` exchanges the neighborhoods of `v` and `w`, so each of
/// them keeps its own label with the sign reversed.
pub fn apply_graphlink_move(g: &LabeledGraph, m: &GraphLinkMove) -> Result<LabeledGraph, MoveError> {
    let mut h = g.clone();
    match *m {
        GraphLinkMove::G1 { v } => {
            check(!g.label(v)?.one, || format!("{v} must have first coordinate 0"))?;
            check(g.neighbors(v).is_empty(), || format!("{v} is not isolated"))?;
            h.remove_vertex(v);
        }
        GraphLinkMove::G2 { v, w } => {
            let (lv, lw) = (g.label(v)?, g.label(w)?);
            check(v != w, || "the two vertices must differ".into())?;
            check(lv.one == lw.one && lv.sign != lw.sign, || {
                format!("labels {lv} and {lw} do not form a removable pair")
            })?;
            check(g.adjacent(v, w) == lv.one, || {
                format!("{v} and {w} must be {}", if lv.one { "adjacent" } else { "nonadjacent" })
            })?;
            let outside = |a, b| g.neighbors(a).into_iter().filter(|&x| x != b).collect::<Vec<_>>();
            check(outside(v, w) == outside(w, v), || format!("{v} and {w} have different neighbors"))?;
            h.remove_vertex(v);
            h.remove_vertex(w);
        }
        GraphLinkMove::G3 { v, w, x } => {
            check(v != w && v != x && w != x, || "the three vertices must differ".into())?;
            for y in [v, w, x] {
                check(g.label(y)? == GlLabel::new(0, Sign::Minus), || format!("{y} must be (0, -)"))?;
            }
            check(g.neighbors(x) == edge_pair(v, w), || format!("{x} must have neighbors exactly {v}, {w}"))?;
            check(!g.adjacent(v, w), || format!("{v} and {w} must be nonadjacent"))?;
            h.set_label(v, GlLabel::new(0, Sign::Plus));
            h.set_label(w, GlLabel::new(0, Sign::Plus));
            for y in g.labels.keys().copied().filter(|&y| y != x) {
                if g.adjacent(y, v) != g.adjacent(y, w) {
                    h.toggle_edge(x, y);
                }
            }
            h.toggle_edge(x, v);
            h.toggle_edge(x, w);
        }
        GraphLinkMove::G4 { v, w } => {
            let (lv, lw) = (g.label(v)?, g.label(w)?);
            check(!lv.one && !lw.one, || format!("{v} and {w} must have first coordinate 0"))?;
            check(g.adjacent(v, w), || format!("{v} and {w} must be adjacent"))?;
            h = g.local_complement(v).local_complement(w).local_complement(v);
            h.set_label(v, GlLabel::new(0, lv.sign.flip()));
            h.set_label(w, GlLabel::new(0, lw.sign.flip()));
        }
        GraphLinkMove::G4Prime { v } => {
            let lv = g.label(v)?;
            check(lv.one, || format!("{v} must have first coordinate 1"))?;
            h = g.local_complement(v);
            h.set_label(v, GlLabel::new(1, lv.sign.flip()));
            for y in g.neighbors(v) {
                let l = g.label(y)?;
                h.set_label(y, GlLabel { one: !l.one, sign: l.sign });
            }
        }
    }
    Ok(h)
}

fn edge_pair(a: VertexId, b: VertexId) -> Vec<VertexId> {
    let (x, y) = edge_key(a, b);
    vec![x, y]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A path of moves and complements was found; `depth` is its length.
    Equivalent { depth: usize },
    /// The Jones polynomials differ.
    DistinctByInvariant,
    /// The budget ran out after visiting `explored` graphs.
    Inconclusive { explored: usize },
}

/// Visited-set bucketed by an isomorphism-invariant key.
#[derive(Default)]
struct Visited(HashMap<u64, Vec<MarkedGraph>>);

impl Visited {
    fn same(a: &MarkedGraph, b: &MarkedGraph) -> bool {
        if a.n() <= ISOMORPHISM_MAX_VERTICES && b.n() <= ISOMORPHISM_MAX_VERTICES {
            a.is_isomorphic(b).unwrap_or(false)
        } else {
            a == b
        }
    }

    fn insert(&mut self, g: &MarkedGraph) -> bool {
        let bucket = self.0.entry(g.invariant_key()).or_default();
        if bucket.iter().any(|h| Visited::same(h, g)) {
            return false;
        }
        bucket.push(g.clone());
        true
    }
}

/// Breadth-first search from `g` over marked local complements and detected moves, looking for
/// a graph isomorphic to `h`. Graphs more than two vertices larger than both inputs are not
/// expanded.
pub fn equivalent_bounded(g: &MarkedGraph, h: &MarkedGraph, budget: usize) -> Verdict {
    if let (Ok(jg), Ok(jh)) = (jones(g), jones(h)) {
        if jg != jh {
            return Verdict::DistinctByInvariant;
        }
    }
    let max_n = g.n().max(h.n()) + 2;
    let mut visited = Visited::default();
    visited.insert(g);
    let mut queue = VecDeque::from([(g.clone(), 0usize)]);
    let mut explored = 0;
    while let Some((x, depth)) = queue.pop_front() {
        if Visited::same(&x, h) {
            return Verdict::Equivalent { depth };
        }
        explored += 1;
        if explored >= budget {
            break;
        }
        let complements = x.ids().iter().map(|&v| x.marked_local_complement(v).expect("known vertex"));
        let moved = detect_moves(&x).into_iter().map(|m| apply_move(&x, &m).expect("detected move"));
        for y in complements.chain(moved) {
            if y.n() <= max_n && visited.insert(&y) {
                queue.push_back((y, depth + 1));
            }
        }
    }
    Verdict::Inconclusive { explored }
}
