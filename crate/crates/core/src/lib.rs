//! Bracket and Jones polynomials of multiply marked graphs, interlacement graphs of
//! Gauss codes, and the moves relating them.

pub mod bracket;
pub mod diagram;
pub mod gf2;
pub mod graph;
pub mod io;
pub mod moves;
pub mod poly;

pub use bracket::{
    bracket, bracket_recursive, compose, composition_split, jones, reduced_bracket, BracketError,
    CompositionSplit, StateMatrix, TwinCase,
};
pub use diagram::{
    build_universe, euler_system, interlacement_graph, kappa_transform, kauffman_oracle, DiagramError,
    EulerSystem, GaussCode, Pairing, Sign, UniverseGraph,
};
pub use gf2::{BitRow, DimensionError, Gf2Matrix};
pub use graph::{GraphError, Letter, Mark, MarkedGraph, VertexId, Weights};
pub use io::{
    parse_gauss_code, parse_labeled_graphs, parse_marked_graph, parse_marked_graphs, print_gauss_code,
    print_labeled_graph, print_marked_graph, Named, ParseError,
};
pub use moves::{
    apply_graphlink_move, apply_move, detect_moves, equivalent_bounded, to_marked, GlLabel, GraphLinkMove,
    LabeledGraph, MoveError, MoveKind, MoveSpec, Verdict,
};
pub use poly::{BracketPoly, LaurentA, Monomial, PolyError};
