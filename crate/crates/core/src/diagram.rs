//! Oriented link diagrams given as signed Gauss codes: the 4-regular universe graph, Euler
//! systems and κ-transforms, marked interlacement graphs, and the Kauffman state sum.
//!
//! Each crossing has four half-edge slots named by the link orientation: 0 and 1 are the
//! incoming and outgoing ends of its first occurrence, 2 and 3 those of its second.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::gf2::{BitRow, Gf2Matrix};
use crate::graph::{Mark, MarkedGraph, VertexId};
use crate::poly::{BracketPoly, Monomial};

/// The diagram state sum refuses diagrams with more crossings than this.
pub const ORACLE_MAX_CROSSINGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("crossing {label} occurs {count} times; every crossing must occur exactly twice")]
    Occurrences { label: u32, count: usize },
    #[error("crossing {0} has no sign")]
    MissingSign(u32),
    #[error("sign given for crossing {0}, which does not occur in the code")]
    StraySign(u32),
    #[error("the diagram has no components")]
    Empty,
    #[error("unknown crossing {0}")]
    UnknownCrossing(u32),
    #[error("diagram has {n} crossings, above the supported bound of {max}")]
    Capacity { n: usize, max: usize },
    #[error("not an Euler system of this universe: {0}")]
    NotEuler(String),
    #[error("expected {expected} transitions, got {got}")]
    TransitionCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A signed Gauss code. Components are cyclic label sequences; crossing-free components are
/// only counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussCode {
    components: Vec<Vec<u32>>,
    free_components: u32,
    signs: BTreeMap<u32, Sign>,
}

impl GaussCode {
    pub fn new(
        components: Vec<Vec<u32>>,
        free_components: u32,
        signs: BTreeMap<u32, Sign>,
    ) -> Result<Self, DiagramError> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &x in components.iter().flatten() {
            *counts.entry(x).or_insert(0) += 1;
        }
        if let Some((&label, &count)) = counts.iter().find(|(_, &c)| c != 2) {
            return Err(DiagramError::Occurrences { label, count });
        }
        if let Some(&x) = counts.keys().find(|x| !signs.contains_key(x)) {
            return Err(DiagramError::MissingSign(x));
        }
        if let Some(&x) = signs.keys().find(|x| !counts.contains_key(x)) {
            return Err(DiagramError::StraySign(x));
        }
        let components: Vec<Vec<u32>> = components.into_iter().filter(|c| !c.is_empty()).collect();
        if components.is_empty() && free_components == 0 {
            return Err(DiagramError::Empty);
        }
        Ok(GaussCode { components, free_components, signs })
    }

    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn free_components(&self) -> u32 {
        self.free_components
    }

    pub fn signs(&self) -> &BTreeMap<u32, Sign> {
        &self.signs
    }

    pub fn crossing_count(&self) -> usize {
        self.signs.len()
    }

    /// The same code with every sign flipped.
    pub fn mirror(&self) -> GaussCode {
        GaussCode {
            components: self.components.clone(),
            free_components: self.free_components,
            signs: self.signs.iter().map(|(&k, &s)| (k, s.flip())).collect(),
        }
    }
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .components
            .iter()
            .map(|c| c.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        parts.extend((0..self.free_components).map(|_| "O".to_string()));
        f.write_str(&parts.join(" / "))?;
        if !self.signs.is_empty() {
            f.write_str(" signs")?;
            for (label, sign) in &self.signs {
                write!(f, " {label}{}", sign.symbol())?;
            }
        }
        Ok(())
    }
}

/// One of the three ways to pair the four half-edges at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pairing {
    /// `{0-1, 2-3}`: follow the link strands.
    Link,
    /// `{0-3, 2-1}`: the smoothing that respects the link orientation.
    Oriented,
    /// `{0-2, 1-3}`: the smoothing against the link orientation.
    Disoriented,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::Link, Pairing::Oriented, Pairing::Disoriented];

    pub fn partner(self, slot: u8) -> u8 {
        match (self, slot) {
            (Pairing::Link, s) => s ^ 1,
            (Pairing::Disoriented, s) => s ^ 2,
            (Pairing::Oriented, s) => 3 - s,
        }
    }

    /// The pairing in which `a` and `b` are matched.
    pub fn containing(a: u8, b: u8) -> Pairing {
        debug_assert!(a != b && a < 4 && b < 4);
        match a ^ b {
            1 => Pairing::Link,
            2 => Pairing::Disoriented,
            _ => Pairing::Oriented,
        }
    }
}

/// The 4-regular universe of a diagram, stored as half-edges `4 * vertex + slot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniverseGraph {
    labels: Vec<u32>,
    signs: Vec<Sign>,
    mate: Vec<usize>,
    free_loops: u32,
}

impl UniverseGraph {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.mate.len() / 2
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn sign(&self, label: u32) -> Result<Sign, DiagramError> {
        Ok(self.signs[self.index_of(label)?])
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    pub fn index_of(&self, label: u32) -> Result<usize, DiagramError> {
        self.labels.binary_search(&label).map_err(|_| DiagramError::UnknownCrossing(label))
    }

    /// Half-edge at the other end of the edge through `h`.
    pub fn mate(&self, h: usize) -> usize {
        self.mate[h]
    }

    fn vertex_components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut next = 0;
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for slot in 0..4 {
                    let w = self.mate[4 * v + slot] / 4;
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Connected components containing crossings.
    pub fn nonempty_component_count(&self) -> usize {
        self.vertex_components().into_iter().max().map_or(0, |m| m + 1)
    }

    /// `c(U)`: connected components including free loops.
    pub fn component_count(&self) -> usize {
        self.nonempty_component_count() + self.free_loops as usize
    }
}

pub fn build_universe(code: &GaussCode) -> UniverseGraph {
    let labels: Vec<u32> = code.signs.keys().copied().collect();
    let signs = code.signs.values().copied().collect();
    let index = |x: u32| labels.binary_search(&x).expect("validated code");
    let mut seen = vec![false; labels.len()];
    // (in, out) half-edges of each occurrence, per component
    let ends: Vec<Vec<(usize, usize)>> = code
        .components
        .iter()
        .map(|comp| {
            comp.iter()
                .map(|&x| {
                    let v = index(x);
                    let base = if seen[v] { 2 } else { 0 };
                    seen[v] = true;
                    (4 * v + base, 4 * v + base + 1)
                })
                .collect()
        })
        .collect();
    let mut mate = vec![0; 4 * labels.len()];
    for comp in &ends {
        for (k, &(_, out)) in comp.iter().enumerate() {
            let (next_in, _) = comp[(k + 1) % comp.len()];
            mate[out] = next_in;
            mate[next_in] = out;
        }
    }
    UniverseGraph { labels, signs, mate, free_loops: code.free_components }
}

/// A pass through a crossing, entering on one slot and leaving on another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Passage {
    pub vertex: u32,
    pub entry: u8,
    pub exit: u8,
}

/// One closed circuit per nonempty component of the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerSystem {
    circuits: Vec<Vec<Passage>>,
}

impl EulerSystem {
    pub fn circuits(&self) -> &[Vec<Passage>] {
        &self.circuits
    }

    /// Circuits as sequences of crossing labels.
    pub fn words(&self) -> Vec<Vec<u32>> {
        self.circuits.iter().map(|c| c.iter().map(|p| p.vertex).collect()).collect()
    }

    fn locate(&self, v: u32) -> Option<(usize, usize, usize)> {
        for (ci, c) in self.circuits.iter().enumerate() {
            let mut hits = c.iter().enumerate().filter(|(_, p)| p.vertex == v).map(|(k, _)| k);
            if let (Some(i), Some(j)) = (hits.next(), hits.next()) {
                return Some((ci, i, j));
            }
        }
        None
    }

    /// The two passages through `v`, in circuit order.
    pub fn passages(&self, v: u32) -> Option<(Passage, Passage)> {
        self.locate(v).map(|(c, i, j)| (self.circuits[c][i], self.circuits[c][j]))
    }

    /// The transition the system uses at each crossing of `u`, in label order.
    pub fn transitions(&self, u: &UniverseGraph) -> Result<Vec<Pairing>, DiagramError> {
        u.labels
            .iter()
            .map(|&v| {
                let (p, _) = self
                    .passages(v)
                    .ok_or_else(|| DiagramError::NotEuler(format!("crossing {v} is not visited")))?;
                Ok(Pairing::containing(p.entry, p.exit))
            })
            .collect()
    }

    /// Checks that consecutive passages are joined by edges of `u` and that every edge is used
    /// once.
    pub fn validate(&self, u: &UniverseGraph) -> Result<(), DiagramError> {
        let bad = |m: String| Err(DiagramError::NotEuler(m));
        let mut used = vec![false; 4 * u.n()];
        for c in &self.circuits {
            for (k, p) in c.iter().enumerate() {
                let v = u.index_of(p.vertex)?;
                if p.entry >= 4 || p.exit >= 4 || p.entry == p.exit {
                    return bad(format!("malformed passage at {}", p.vertex));
                }
                for h in [4 * v + p.entry as usize, 4 * v + p.exit as usize] {
                    if std::mem::replace(&mut used[h], true) {
                        return bad(format!("half-edge {} at {} used twice", h % 4, p.vertex));
                    }
                }
                let next = c[(k + 1) % c.len()];
                let nv = u.index_of(next.vertex)?;
                if u.mate[4 * v + p.exit as usize] != 4 * nv + next.entry as usize {
                    return bad(format!("no edge from {} to {}", p.vertex, next.vertex));
                }
            }
        }
        if used.iter().any(|&x| !x) {
            return bad("some edge is not traversed".into());
        }
        if self.circuits.len() != u.nonempty_component_count() {
            return bad(format!(
                "{} circuits for {} components",
                self.circuits.len(),
                u.nonempty_component_count()
            ));
        }
        Ok(())
    }

    /// Builds the Euler system with the given transition at each crossing, if those
    /// transitions give one circuit per component.
    pub fn from_transitions(u: &UniverseGraph, transitions: &[Pairing]) -> Result<EulerSystem, DiagramError> {
        if transitions.len() != u.n() {
            return Err(DiagramError::TransitionCount { expected: u.n(), got: transitions.len() });
        }
        let mut used = vec![false; 4 * u.n()];
        let mut circuits = Vec::new();
        for start in 0..4 * u.n() {
            if used[start] {
                continue;
            }
            let mut circuit = Vec::new();
            let mut entry = start;
            loop {
                let v = entry / 4;
                let exit = 4 * v + transitions[v].partner((entry % 4) as u8) as usize;
                used[entry] = true;
                used[exit] = true;
                circuit.push(Passage {
                    vertex: u.labels[v],
                    entry: (entry % 4) as u8,
                    exit: (exit % 4) as u8,
                });
                entry = u.mate[exit];
                if entry == start {
                    break;
                }
            }
            circuits.push(circuit);
        }
        let system = EulerSystem { circuits };
        system.validate(u)?;
        Ok(system)
    }
}

/// Lowest-handle-first Hierholzer on half-edges, one circuit per component. Where it can, the
/// walk continues along the link strand, so a knot's own circuit is returned for a knot.
pub fn euler_system(u: &UniverseGraph) -> EulerSystem {
    let mut used = vec![false; 4 * u.n()];
    let mut circuits = Vec::new();
    for v0 in 0..u.n() {
        if used[4 * v0] {
            continue;
        }
        // traversals (from half-edge, to half-edge)
        let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(v0, None)];
        let mut trail = Vec::new();
        while let Some(&(v, step)) = stack.last() {
            // keep following the strand we arrived on when possible, else leave on an out slot
            let along = step.map(|(_, y)| 4 * v + Pairing::Link.partner((y % 4) as u8) as usize);
            let next = along
                .filter(|&h| !used[h])
                .or_else(|| [1, 3, 0, 2].into_iter().map(|s| 4 * v + s).find(|&h| !used[h]));
            match next {
                Some(x) => {
                    let y = u.mate[x];
                    used[x] = true;
                    used[y] = true;
                    stack.push((y / 4, Some((x, y))));
                }
                None => {
                    stack.pop();
                    if let Some(s) = step {
                        trail.push(s);
                    }
                }
            }
        }
        trail.reverse();
        let k = trail.len();
        let circuit = (0..k)
            .map(|i| {
                let (x, _) = trail[i];
                let (_, y_prev) = trail[(i + k - 1) % k];
                Passage { vertex: u.labels[x / 4], entry: (y_prev % 4) as u8, exit: (x % 4) as u8 }
            })
            .collect();
        circuits.push(circuit);
    }
    EulerSystem { circuits }
}

/// `C * v`: reverses the stretch of the circuit strictly between the two visits to `v`.
pub fn kappa_transform(c: &EulerSystem, v: u32) -> Result<EulerSystem, DiagramError> {
    let (ci, i, j) = c.locate(v).ok_or(DiagramError::UnknownCrossing(v))?;
    let old = &c.circuits[ci];
    let (pi, pj) = (old[i], old[j]);
    let mut new = Vec::with_capacity(old.len());
    new.extend_from_slice(&old[..i]);
    new.push(Passage { vertex: v, entry: pi.entry, exit: pj.entry });
    new.extend(old[i + 1..j].iter().rev().map(|p| Passage { entry: p.exit, exit: p.entry, ..*p }));
    new.push(Passage { vertex: v, entry: pi.exit, exit: pj.exit });
    new.extend_from_slice(&old[j + 1..]);
    let mut out = c.clone();
    out.circuits[ci] = new;
    Ok(out)
}

/// Applies `steps` κ-transforms at uniformly chosen crossings.
pub fn random_kappa_walk<R: Rng>(
    u: &UniverseGraph,
    start: &EulerSystem,
    steps: usize,
    rng: &mut R,
) -> EulerSystem {
    let mut c = start.clone();
    if u.n() == 0 {
        return c;
    }
    for _ in 0..steps {
        let v = u.labels[rng.gen_range(0..u.n())];
        c = kappa_transform(&c, v).expect("every crossing lies on a circuit");
    }
    c
}

/// Every Euler system of `u`, identified by its transitions. Exponential in the crossing count.
pub fn all_euler_transitions(u: &UniverseGraph) -> Vec<Vec<Pairing>> {
    let mut out = Vec::new();
    let mut choice = vec![Pairing::Link; u.n()];
    let total = 3usize.pow(u.n() as u32);
    for code in 0..total {
        let mut c = code;
        for slot in choice.iter_mut() {
            *slot = Pairing::ALL[c % 3];
            c /= 3;
        }
        if circuit_partition_size(u, &choice).ok() == Some(u.component_count()) {
            out.push(choice.clone());
        }
    }
    out
}

/// Transition sets reachable from `start` by κ-transforms.
pub fn kappa_orbit(u: &UniverseGraph, start: &EulerSystem) -> HashSet<Vec<Pairing>> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start.transitions(u).expect("valid system"));
    while let Some(c) = queue.pop_front() {
        for &v in &u.labels {
            let next = kappa_transform(&c, v).expect("every crossing lies on a circuit");
            if seen.insert(next.transitions(u).expect("valid system")) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// The mark of `v` given its two passages: compares the link pairing and the oriented pairing
/// with the circuit's own, consistent and inconsistent pairings.
fn mark_at(p: Passage, q: Passage) -> Mark {
    let circuit = Pairing::containing(p.entry, p.exit);
    let plus = Pairing::containing(p.entry, q.exit);
    let minus = Pairing::containing(p.entry, q.entry);
    let role = |x: Pairing| {
        if x == circuit {
            0
        } else if x == plus {
            1
        } else {
            debug_assert_eq!(x, minus);
            2
        }
    };
    match (role(Pairing::Link), role(Pairing::Oriented)) {
        (0, 1) => Mark::Unmarked,
        (0, 2) => Mark::R,
        (1, 0) => Mark::C,
        (1, 2) => Mark::Cr,
        (2, 1) => Mark::U,
        (2, 0) => Mark::Ur,
        _ => unreachable!("link and oriented pairings differ"),
    }
}

/// The marked interlacement graph `L(D, C)`, on the crossing labels.
pub fn interlacement_graph(u: &UniverseGraph, c: &EulerSystem) -> Result<MarkedGraph, DiagramError> {
    c.validate(u)?;
    let components = u.component_count();
    if components == 0 {
        return Err(DiagramError::Empty);
    }
    let mut g = MarkedGraph::new();
    for (k, &v) in u.labels.iter().enumerate() {
        let (p, q) = c.passages(v).expect("validated");
        g.add_vertex(v, u.signs[k] == Sign::Minus, mark_at(p, q)).expect("distinct labels");
    }
    for circuit in &c.circuits {
        let mut pos: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (k, p) in circuit.iter().enumerate() {
            pos.entry(p.vertex).or_default().push(k);
        }
        let spans: Vec<(u32, usize, usize)> = pos.iter().map(|(&v, ks)| (v, ks[0], ks[1])).collect();
        for (a, &(v, i, j)) in spans.iter().enumerate() {
            for &(w, k, l) in &spans[a + 1..] {
                if (i < k && k < j) != (i < l && l < j) {
                    g.add_edge(v as VertexId, w as VertexId).expect("known vertices");
                }
            }
        }
    }
    g.set_free_loops(components as u32 - 1);
    Ok(g)
}

/// Disjoint-set forest over half-edges.
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Number of closed curves, free loops included, when each crossing is resolved by the given
/// pairing.
pub fn circuit_partition_size(u: &UniverseGraph, transitions: &[Pairing]) -> Result<usize, DiagramError> {
    if transitions.len() != u.n() {
        return Err(DiagramError::TransitionCount { expected: u.n(), got: transitions.len() });
    }
    let mut dsu = Dsu::new(4 * u.n());
    for h in 0..4 * u.n() {
        dsu.union(h, u.mate[h]);
    }
    for (v, t) in transitions.iter().enumerate() {
        for slot in 0..4u8 {
            dsu.union(4 * v + slot as usize, 4 * v + t.partner(slot) as usize);
        }
    }
    let curves = (0..4 * u.n()).filter(|&h| dsu.find(h) == h).count();
    Ok(curves + u.free_loops as usize)
}

/// The matrix `A_P` of a circuit partition relative to the Euler system `c`: interlacement
/// adjacency, with a crossing deleted where `P` follows `c`, diagonal 0 where `P` uses the
/// orientation-consistent pairing of `c`, and diagonal 1 for the other pairing.
pub fn partition_matrix(
    u: &UniverseGraph,
    c: &EulerSystem,
    transitions: &[Pairing],
) -> Result<Gf2Matrix, DiagramError> {
    if transitions.len() != u.n() {
        return Err(DiagramError::TransitionCount { expected: u.n(), got: transitions.len() });
    }
    let g = interlacement_graph(u, c)?;
    let mut keep = Vec::new();
    let mut diag = vec![false; u.n()];
    for (k, &v) in u.labels.iter().enumerate() {
        let (p, q) = c.passages(v).expect("validated");
        let t = transitions[k];
        if t == Pairing::containing(p.entry, p.exit) {
            continue;
        }
        diag[k] = t == Pairing::containing(p.entry, q.entry);
        keep.push(k);
    }
    let rows = keep
        .iter()
        .map(|&i| {
            let mut row = BitRow::zeros(keep.len());
            for (b, &j) in keep.iter().enumerate() {
                let bit = if i == j {
                    diag[i]
                } else {
                    g.adjacent(u.labels[i], u.labels[j]).expect("known vertices")
                };
                row.set(b, bit);
            }
            row
        })
        .collect();
    Ok(Gf2Matrix::from_bit_rows(keep.len(), rows))
}

/// A choice of A- or B-smoothing at every crossing, in label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothingState {
    pub b_smoothed: Vec<bool>,
}

impl SmoothingState {
    pub fn a_count(&self) -> usize {
        self.b_smoothed.iter().filter(|&&b| !b).count()
    }

    pub fn b_count(&self) -> usize {
        self.b_smoothed.len() - self.a_count()
    }

    /// The pairings realizing this state: A is the oriented smoothing at positive crossings
    /// and the disoriented one at negative crossings; B is the other.
    pub fn pairings(&self, u: &UniverseGraph) -> Vec<Pairing> {
        self.b_smoothed
            .iter()
            .zip(&u.signs)
            .map(|(&b, &s)| match (s == Sign::Plus) != b {
                true => Pairing::Oriented,
                false => Pairing::Disoriented,
            })
            .collect()
    }

    /// `c(S)`: closed curves in the smoothed diagram.
    pub fn curve_count(&self, u: &UniverseGraph) -> usize {
        circuit_partition_size(u, &self.pairings(u)).expect("one pairing per crossing")
    }
}

/// The Kauffman bracket `Σ_S A^{a(S)} B^{b(S)} d^{c(S) - 1}` of the diagram.
pub fn kauffman_oracle(code: &GaussCode) -> Result<BracketPoly, DiagramError> {
    let n = code.crossing_count();
    if n > ORACLE_MAX_CROSSINGS {
        return Err(DiagramError::Capacity { n, max: ORACLE_MAX_CROSSINGS });
    }
    let u = build_universe(code);
    let mut sum = BracketPoly::zero();
    for mask in 0u32..(1 << n) {
        let state = SmoothingState { b_smoothed: (0..n).map(|i| mask & (1 << i) != 0).collect() };
        let c = state.curve_count(&u);
        let mono = Monomial::new(state.a_count() as u32, state.b_count() as u32, c as u32 - 1);
        sum += BracketPoly::term(1, mono);
    }
    Ok(sum)
}
