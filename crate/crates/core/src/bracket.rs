//! Bracket polynomials: the subset state sum, the vertex-elimination recursion, the older
//! switching formulas, twin reductions, reduced bracket, Jones polynomial and composition.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::Gf2Matrix;
use crate::graph::{GraphError, Letter, Mark, MarkedGraph, VertexId, Weights};
use crate::poly::{BracketPoly, LaurentA, Monomial, PolyError};

/// The state sum packs a subset into a `u64`.
pub const STATE_SUM_MAX_VERTICES: usize = 63;

/// Graphs above this size are not memoized by the recursive evaluator.
const MEMO_MAX_VERTICES: usize = 32;

/// Subset counts at or above this size are split across threads.
const PARALLEL_MIN_VERTICES: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("vertex {0} carries custom weights; only the formal weights (A, B) are supported here")]
    CustomWeights(VertexId),
}

fn precondition(msg: impl Into<String>) -> BracketError {
    BracketError::Precondition(msg.into())
}

/// `A(G)_T` together with the vertices whose rows and columns were dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMatrix {
    pub matrix: Gf2Matrix,
    /// Vertices kept, in row order.
    pub kept: Vec<VertexId>,
    pub removed: Vec<VertexId>,
}

impl StateMatrix {
    pub fn nullity(&self) -> usize {
        self.matrix.nullity().expect("state matrices are square")
    }
}

fn diag_entry(looped: bool, in_t: bool, mark: Mark) -> bool {
    looped ^ in_t ^ mark.has_r()
}

fn is_removed(mark: Mark, diag: bool) -> bool {
    match mark.letter() {
        Letter::C => !diag,
        Letter::U => diag,
        Letter::None => false,
    }
}

/// Builds `A(G)_T`: adjacency matrix with loops on the diagonal, plus `Δ_T`, with the rows and
/// columns of c/cr vertices with diagonal 0 and u/ur vertices with diagonal 1 removed.
pub fn state_matrix(g: &MarkedGraph, t_set: &[VertexId]) -> Result<StateMatrix, GraphError> {
    let mut in_t = vec![false; g.n()];
    for &t in t_set {
        in_t[g.index_of(t)?] = true;
    }
    let mut diag = vec![false; g.n()];
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for i in 0..g.n() {
        diag[i] = diag_entry(g.looped_at(i), in_t[i], g.mark_at(i));
        if is_removed(g.mark_at(i), diag[i]) {
            removed.push(g.ids()[i]);
        } else {
            keep.push(i);
        }
    }
    let rows = keep
        .iter()
        .map(|&i| {
            let mut row = g.adj_row(i).clone();
            row.set(i, diag[i]);
            row.select(&keep)
        })
        .collect();
    Ok(StateMatrix {
        matrix: Gf2Matrix::from_bit_rows(keep.len(), rows),
        kept: keep.iter().map(|&i| g.ids()[i]).collect(),
        removed,
    })
}

/// Per-vertex data for the packed state sum.
struct Packed {
    n: usize,
    adj: Vec<u64>,
    base_diag: u64,
    c_mask: u64,
    u_mask: u64,
}

impl Packed {
    fn new(g: &MarkedGraph) -> Self {
        assert!(
            g.n() <= STATE_SUM_MAX_VERTICES,
            "state sum supports at most {STATE_SUM_MAX_VERTICES} vertices"
        );
        let mut p = Packed { n: g.n(), adj: vec![0; g.n()], base_diag: 0, c_mask: 0, u_mask: 0 };
        for i in 0..g.n() {
            p.adj[i] = g.adj_row(i).iter_ones().fold(0u64, |acc, j| acc | (1 << j));
            let bit = 1u64 << i;
            if g.looped_at(i) ^ g.mark_at(i).has_r() {
                p.base_diag |= bit;
            }
            match g.mark_at(i).letter() {
                Letter::C => p.c_mask |= bit,
                Letter::U => p.u_mask |= bit,
                Letter::None => {}
            }
        }
        p
    }

    fn nullity(&self, t: u64) -> u32 {
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let diag = self.base_diag ^ t;
        let keep = full & !((self.c_mask & !diag) | (self.u_mask & diag));
        let mut basis = [0u64; 64];
        let mut rank = 0;
        let mut rest = keep;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut row = (self.adj[i] & keep) | (diag & (1 << i));
            while row != 0 {
                let h = 63 - row.leading_zeros() as usize;
                if basis[h] == 0 {
                    basis[h] = row;
                    rank += 1;
                    break;
                }
                row ^= basis[h];
            }
        }
        keep.count_ones() - rank
    }
}

/// Tally key: (subset of weighted vertices in T, number of formal vertices in T, nullity).
type Tally = HashMap<(u64, u32, u32), u64>;

fn tally_range(p: &Packed, weighted: &[usize], range: std::ops::Range<u64>) -> Tally {
    let wmask: u64 = weighted.iter().fold(0, |acc, &i| acc | (1 << i));
    let mut tally = Tally::new();
    for t in range {
        let mut wsub = 0u64;
        for (k, &i) in weighted.iter().enumerate() {
            if t & (1 << i) != 0 {
                wsub |= 1 << k;
            }
        }
        let formal_in_t = (t & !wmask).count_ones();
        *tally.entry((wsub, formal_in_t, p.nullity(t))).or_insert(0) += 1;
    }
    tally
}

/// The bracket `[G]` as a state sum over all vertex subsets, with vertex weights in place of
/// `A` and `B`.
///
/// # Panics
/// If the graph has more than [`STATE_SUM_MAX_VERTICES`] vertices.
pub fn bracket(g: &MarkedGraph) -> BracketPoly {
    let p = Packed::new(g);
    let weighted: Vec<usize> = (0..g.n()).filter(|&i| g.custom_weights_at(i).is_some()).collect();
    let total = 1u64 << g.n();
    let tally = if g.n() >= PARALLEL_MIN_VERTICES {
        let chunks = 64u64;
        let size = total / chunks;
        (0..chunks).into_par_iter().map(|c| tally_range(&p, &weighted, c * size..(c + 1) * size)).reduce(
            Tally::new,
            |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            },
        )
    } else {
        tally_range(&p, &weighted, 0..total)
    };

    let n_formal = (g.n() - weighted.len()) as u32;
    let weights: Vec<Weights> = weighted.iter().map(|&i| g.weights_at(i)).collect();
    let mut weight_products: HashMap<u64, BracketPoly> = HashMap::new();
    let mut sum = BracketPoly::zero();
    for ((wsub, k, nu), count) in tally {
        let wp = weight_products.entry(wsub).or_insert_with(|| {
            weights
                .iter()
                .enumerate()
                .map(|(j, w)| if wsub & (1 << j) != 0 { &w.beta } else { &w.alpha })
                .fold(BracketPoly::one(), |acc, x| &acc * x)
        });
        let mono = Monomial::new(n_formal - k, k, nu);
        sum += &wp.shift(mono) * &BracketPoly::constant(BigInt::from(count));
    }
    sum.shift(Monomial::new(0, 0, g.free_loops()))
}

/// `[{v}]` for a one-vertex graph with the given loop, mark and weights.
pub fn one_vertex_bracket(looped: bool, mark: Mark, w: &Weights) -> BracketPoly {
    let nu = |in_t: bool| -> u32 {
        let diag = diag_entry(looped, in_t, mark);
        u32::from(!is_removed(mark, diag) && !diag)
    };
    &w.alpha.shift(Monomial::new(0, 0, nu(false))) + &w.beta.shift(Monomial::new(0, 0, nu(true)))
}

/// The bracket by vertex elimination: free loops, isolated vertices, c/cr vertices, and marked
/// local complements to create c/cr vertices. Lowest handle first throughout.
pub fn bracket_recursive(g: &MarkedGraph) -> BracketPoly {
    let mut memo = HashMap::new();
    recurse(g.clone(), &mut memo)
}

fn recurse(g: MarkedGraph, memo: &mut HashMap<MarkedGraph, BracketPoly>) -> BracketPoly {
    if g.is_empty() && g.free_loops() == 0 {
        return BracketPoly::one();
    }
    let memoize = g.n() <= MEMO_MAX_VERTICES;
    if memoize {
        if let Some(v) = memo.get(&g) {
            return v.clone();
        }
    }
    let value = eliminate(&g, memo);
    if memoize {
        memo.insert(g, value.clone());
    }
    value
}

fn eliminate(g: &MarkedGraph, memo: &mut HashMap<MarkedGraph, BracketPoly>) -> BracketPoly {
    if g.free_loops() > 0 {
        let mut h = g.clone();
        h.set_free_loops(0);
        return recurse(h, memo).shift(Monomial::new(0, 0, g.free_loops()));
    }
    let ids = g.ids().to_vec();
    let n = g.n();

    let isolated: Vec<usize> = (0..n).filter(|&i| g.adj_row(i).count_ones() == 0).collect();
    if !isolated.is_empty() {
        let drop: Vec<VertexId> = isolated.iter().map(|&i| ids[i]).collect();
        let rest = recurse(g.remove_vertices(&drop).expect("known vertices"), memo);
        return isolated.iter().fold(rest, |acc, &i| {
            &acc * &one_vertex_bracket(g.looped_at(i), g.mark_at(i), &g.weights_at(i))
        });
    }

    if let Some(i) = (0..n).find(|&i| g.mark_at(i).letter() == Letter::C) {
        let v = ids[i];
        let w = g.weights_at(i);
        let minus = recurse(g.remove_vertex(v).expect("known vertex"), memo);
        let comp = g.marked_local_complement(v).and_then(|h| h.remove_vertex(v));
        let comp = recurse(comp.expect("known vertex"), memo);
        let direct = (g.mark_at(i) == Mark::C) != g.looped_at(i);
        return if direct {
            &(&w.alpha * &minus) + &(&w.beta * &comp)
        } else {
            &(&w.beta * &minus) + &(&w.alpha * &comp)
        };
    }

    let has_u_neighbor = |i: usize| g.adj_row(i).iter_ones().any(|j| g.mark_at(j).letter() == Letter::U);
    if let Some(i) = (0..n).find(|&i| has_u_neighbor(i)) {
        return recurse(g.marked_local_complement(ids[i]).expect("known vertex"), memo);
    }

    // No isolated vertices and no u/ur neighbors: every edge ends in unmarked or r vertices.
    let j = g
        .adj_row(0)
        .iter_ones()
        .find(|&j| matches!(g.mark_at(j), Mark::Unmarked | Mark::R))
        .expect("neighbor of a non-isolated vertex without c or u letters");
    recurse(g.marked_local_complement(ids[j]).expect("known vertex"), memo)
}

fn require_formal(g: &MarkedGraph, v: VertexId) -> Result<(), BracketError> {
    if g.has_custom_weights(v)? {
        return Err(BracketError::CustomWeights(v));
    }
    Ok(())
}

/// Switching at a looped unmarked vertex, in the form cleared of `A^{-1}`:
/// `A[G] = B[G - {v,v}] + (A^2 - B^2)[G^v - v]`, divided exactly by `A`.
pub fn switch_step(g: &MarkedGraph, v: VertexId) -> Result<BracketPoly, BracketError> {
    Ok(switch_step_cleared(g, v)?.exact_divide(&BracketPoly::a())?)
}

/// Right-hand side of the `A`-cleared switching identity; equals `A[G]`.
pub fn switch_step_cleared(g: &MarkedGraph, v: VertexId) -> Result<BracketPoly, BracketError> {
    if !g.is_looped(v)? || g.mark(v)? != Mark::Unmarked {
        return Err(precondition(format!("vertex {v} must be looped and unmarked")));
    }
    require_formal(g, v)?;
    let mut unlooped = g.clone();
    unlooped.set_looped(v, false)?;
    let comp = g.marked_local_complement(v)?.remove_vertex(v)?;
    let (a, b) = (BracketPoly::a(), BracketPoly::b());
    let coeff = &(&a * &a) - &(&b * &b);
    Ok(&(&b * &bracket_recursive(&unlooped)) + &(&coeff * &bracket_recursive(&comp)))
}

/// Double smoothing at adjacent, unlooped, unmarked `v` and `w`:
/// `α(v)α(w)[G^{vw} - v - w] + α(v)β(w)[(G^w)^v - v - w] + β(v)[G^v - v]`.
pub fn double_smoothing_step(g: &MarkedGraph, v: VertexId, w: VertexId) -> Result<BracketPoly, BracketError> {
    if v == w || !g.adjacent(v, w)? {
        return Err(precondition(format!("vertices {v} and {w} must be adjacent")));
    }
    for x in [v, w] {
        if g.is_looped(x)? || g.mark(x)? != Mark::Unmarked {
            return Err(precondition(format!("vertex {x} must be unlooped and unmarked")));
        }
    }
    let (wv, ww) = (g.weights(v)?, g.weights(w)?);
    let pivot = g.marked_pivot(v, w)?.remove_vertices(&[v, w])?;
    let twice = g.marked_local_complement(w)?.marked_local_complement(v)?.remove_vertices(&[v, w])?;
    let single = g.marked_local_complement(v)?.remove_vertex(v)?;
    let mut sum = &(&wv.alpha * &ww.alpha) * &bracket_recursive(&pivot);
    sum += &(&wv.alpha * &ww.beta) * &bracket_recursive(&twice);
    sum += &wv.beta * &bracket_recursive(&single);
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwinCase {
    /// Both twins marked u.
    A,
    /// `v` unmarked, `w` marked u.
    B,
    /// Both unmarked; `v` becomes u.
    C,
    /// `v` marked c, `w` marked u; `v` becomes unmarked and a remainder term appears.
    D,
}

/// Result of a twin reduction: `[G] = [graph] + coefficient * [remainder graph]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinReduction {
    pub graph: MarkedGraph,
    pub remainder: Option<(BracketPoly, MarkedGraph)>,
}

impl TwinReduction {
    pub fn bracket(&self) -> BracketPoly {
        let mut value = bracket_recursive(&self.graph);
        if let Some((coeff, h)) = &self.remainder {
            value += coeff * &bracket_recursive(h);
        }
        value
    }
}

/// Merges nonadjacent unlooped twins `v`, `w` into a reweighted `v`.
pub fn twin_reduce(
    g: &MarkedGraph,
    v: VertexId,
    w: VertexId,
    case: TwinCase,
) -> Result<TwinReduction, BracketError> {
    if v == w {
        return Err(precondition("twin vertices must be distinct"));
    }
    if g.adjacent(v, w)? {
        return Err(precondition(format!("twins {v} and {w} must be nonadjacent")));
    }
    if g.is_looped(v)? || g.is_looped(w)? {
        return Err(precondition("twins must be unlooped"));
    }
    if g.neighbors(v)? != g.neighbors(w)? {
        return Err(precondition(format!("{v} and {w} do not have the same neighbors")));
    }
    let expected = match case {
        TwinCase::A => (Mark::U, Mark::U),
        TwinCase::B => (Mark::Unmarked, Mark::U),
        TwinCase::C => (Mark::Unmarked, Mark::Unmarked),
        TwinCase::D => (Mark::C, Mark::U),
    };
    let got = (g.mark(v)?, g.mark(w)?);
    if got != expected {
        return Err(precondition(format!(
            "twin case {case:?} needs marks ({}, {}), found ({}, {})",
            expected.0, expected.1, got.0, got.1
        )));
    }
    let (wv, ww) = (g.weights(v)?, g.weights(w)?);
    let beta = &wv.beta * &ww.beta;
    let mut out = g.remove_vertex(w)?;
    let remainder = if case == TwinCase::D {
        let alpha = &(&wv.alpha * &ww.alpha) + &(&wv.beta * &ww.alpha);
        out.set_mark(v, Mark::Unmarked)?;
        out.set_weights(v, Weights::new(alpha, beta))?;
        Some((&wv.alpha * &ww.beta, g.remove_vertices(&[v, w])?))
    } else {
        let alpha = &(&(&wv.alpha * &ww.alpha) * &BracketPoly::d())
            + &(&(&wv.alpha * &ww.beta) + &(&wv.beta * &ww.alpha));
        if case == TwinCase::C {
            out.set_mark(v, Mark::U)?;
        }
        out.set_weights(v, Weights::new(alpha, beta))?;
        None
    };
    Ok(TwinReduction { graph: out, remainder })
}

fn require_all_formal(g: &MarkedGraph) -> Result<(), BracketError> {
    match (0..g.n()).find(|&i| g.custom_weights_at(i).is_some()) {
        Some(i) => Err(BracketError::CustomWeights(g.ids()[i])),
        None => Ok(()),
    }
}

/// `⟨G⟩`: the bracket with `B = A^{-1}` and `d = -A^{-2} - A^2`.
pub fn reduced_bracket(g: &MarkedGraph) -> Result<LaurentA, BracketError> {
    require_all_formal(g)?;
    Ok(bracket_recursive(g).reduce_to_laurent())
}

/// Jones polynomial in the variable `A = t^{-1/4}`: `(-1)^n A^{6ℓ - 3n} ⟨G⟩`.
pub fn jones(g: &MarkedGraph) -> Result<LaurentA, BracketError> {
    let reduced = reduced_bracket(g)?;
    let n = g.n() as i64;
    let ell = g.loop_count() as i64;
    let sign = if n % 2 == 0 { 1 } else { -1 };
    Ok(&LaurentA::monomial(sign, 6 * ell - 3 * n) * &reduced)
}

fn check_joint(g: &MarkedGraph, a: VertexId, role: &str) -> Result<(), BracketError> {
    if g.is_looped(a)? || g.mark(a)? != Mark::Unmarked || g.has_custom_weights(a)? {
        return Err(precondition(format!(
            "shared vertex {a} must be unlooped, unmarked and carry weights (A, B) in {role}"
        )));
    }
    Ok(())
}

/// The composition `F * H` along the shared vertex `a`.
pub fn compose(f: &MarkedGraph, h: &MarkedGraph, a: VertexId) -> Result<MarkedGraph, BracketError> {
    check_joint(f, a, "the first graph")?;
    check_joint(h, a, "the second graph")?;
    if let Some(&x) = f.ids().iter().find(|&&x| x != a && h.contains(x)) {
        return Err(precondition(format!("vertex {x} occurs in both graphs")));
    }
    let mut g = f.remove_vertex(a)?.disjoint_union(&h.remove_vertex(a)?)?;
    for x in f.neighbors(a)? {
        for y in h.neighbors(a)? {
            g.add_edge(x, y)?;
        }
    }
    Ok(g)
}

/// The universal data `(α'(a), β'(a), γ)` of `F` at `a`: `[F * H] = [H'] + γ[H - a]`, where `H'`
/// gives `a` the weights `α'`, `β'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSplit {
    pub alpha_prime: BracketPoly,
    pub beta_prime: BracketPoly,
    pub gamma: BracketPoly,
}

impl CompositionSplit {
    /// Evaluates `[H'] + γ[H - a]`.
    pub fn apply(&self, h: &MarkedGraph, a: VertexId) -> Result<BracketPoly, BracketError> {
        check_joint(h, a, "the second graph")?;
        let mut primed = h.clone();
        primed.set_weights(a, Weights::new(self.alpha_prime.clone(), self.beta_prime.clone()))?;
        Ok(&bracket_recursive(&primed) + &(&self.gamma * &bracket_recursive(&h.remove_vertex(a)?)))
    }
}

/// Solves for the split from three weighted brackets of `f`.
pub fn composition_split(f: &MarkedGraph, a: VertexId) -> Result<CompositionSplit, BracketError> {
    check_joint(f, a, "the graph")?;
    let probe = |alpha: i64, beta: i64| -> Result<BracketPoly, BracketError> {
        let mut g = f.clone();
        g.set_weights(a, Weights::new(BracketPoly::constant(alpha), BracketPoly::constant(beta)))?;
        Ok(bracket_recursive(&g))
    };
    let e1 = bracket_recursive(&f.remove_vertex(a)?);
    let e2 = probe(1, 0)?;
    let e4 = probe(0, 1)?;
    let d = BracketPoly::d();
    let one = BracketPoly::one();
    let two = BracketPoly::constant(2);
    let u = (&(&e1 + &e2) + &e4).exact_divide(&(&d + &two))?;
    let dm1 = &d - &one;
    Ok(CompositionSplit {
        alpha_prime: (&e1 - &u).exact_divide(&dm1)?,
        beta_prime: (&e4 - &u).exact_divide(&dm1)?,
        gamma: (&e2 - &u).exact_divide(&dm1)?,
    })
}

/// Nullity of `A(G)_T` for a subset given as a bit mask over vertex positions.
pub fn state_nullity(g: &MarkedGraph, t_mask: u64) -> usize {
    Packed::new(g).nullity(t_mask) as usize
}
