//! Text formats for marked graphs, Gauss codes and labeled graphs.
//!
//! All formats are line based; `#` starts a comment that runs to the end of the line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::diagram::{DiagramError, GaussCode, Sign};
use crate::graph::{Mark, MarkedGraph, VertexId, Weights};
use crate::moves::{GlLabel, LabeledGraph};
use crate::poly::{BracketPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A graph together with the name from its `graph` header, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named<T> {
    pub name: Option<String>,
    pub graph: T,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.number, column, message: message.into() }
    }

    fn end_column(&self) -> usize {
        self.text.len() + 1
    }
}

fn lines(input: &str) -> impl Iterator<Item = Line<'_>> {
    input.lines().enumerate().filter_map(|(i, raw)| {
        let text = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (k, ch) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(k),
                (true, Some(s)) => {
                    tokens.push(Token { text: &text[s..k], column: s + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line { number: i + 1, text, tokens })
    })
}

fn parse_u32(line: &Line, tok: Option<&Token>, what: &str) -> Result<u32, ParseError> {
    let tok = tok.ok_or_else(|| line.error(line.end_column(), format!("expected {what}")))?;
    tok.text.parse().map_err(|_| line.error(tok.column, format!("expected {what}, found `{}`", tok.text)))
}

fn expect_end(line: &Line, tokens: &[Token]) -> Result<(), ParseError> {
    match tokens.first() {
        Some(t) => Err(line.error(t.column, format!("unexpected `{}`", t.text))),
        None => Ok(()),
    }
}

/// Collects graph blocks: each `graph` line starts a new block; lines before the first header
/// form an unnamed block.
type Block<'a> = (Option<String>, Vec<Line<'a>>);

fn blocks(input: &str) -> Result<Vec<Block<'_>>, ParseError> {
    let mut out: Vec<Block> = Vec::new();
    for line in lines(input) {
        if line.tokens[0].text == "graph" {
            let name = line.tokens.get(1).map(|t| t.text.to_string());
            expect_end(&line, line.tokens.get(2..).unwrap_or(&[]))?;
            out.push((name, Vec::new()));
        } else {
            if out.is_empty() {
                out.push((None, Vec::new()));
            }
            out.last_mut().expect("nonempty").1.push(line);
        }
    }
    if out.is_empty() {
        out.push((None, Vec::new()));
    }
    Ok(out)
}

fn parse_edge(line: &Line) -> Result<(VertexId, VertexId, usize), ParseError> {
    let a = parse_u32(line, line.tokens.get(1), "a vertex id")?;
    let b = parse_u32(line, line.tokens.get(2), "a vertex id")?;
    expect_end(line, line.tokens.get(3..).unwrap_or(&[]))?;
    Ok((a, b, line.tokens[0].column))
}

const VERTEX_KEYWORDS: [&str; 4] = ["loop", "mark", "alpha", "beta"];

fn parse_poly(line: &Line, parts: &[Token]) -> Result<BracketPoly, ParseError> {
    let first = parts.first().ok_or_else(|| line.error(line.end_column(), "expected a polynomial"))?;
    let last = parts.last().expect("nonempty");
    let start = first.column - 1;
    let text = &line.text[start..last.column - 1 + last.text.len()];
    text.parse().map_err(|e| match e {
        PolyError::Parse { column, message } => line.error(start + column, message),
        other => line.error(first.column, other.to_string()),
    })
}

fn parse_vertex(line: &Line, g: &mut MarkedGraph) -> Result<(), ParseError> {
    let id = parse_u32(line, line.tokens.get(1), "a vertex id")?;
    let rest = &line.tokens[2.min(line.tokens.len())..];
    let mut looped = false;
    let mut mark = Mark::Unmarked;
    let (mut alpha, mut beta) = (None, None);
    let mut k = 0;
    while k < rest.len() {
        let tok = rest[k];
        match tok.text {
            "loop" => {
                looped = true;
                k += 1;
            }
            "mark" => {
                let m = rest.get(k + 1).ok_or_else(|| line.error(line.end_column(), "expected a mark"))?;
                mark = Mark::from_keyword(m.text)
                    .filter(|&m| m != Mark::Unmarked)
                    .ok_or_else(|| line.error(m.column, format!("unknown mark `{}`", m.text)))?;
                k += 2;
            }
            "alpha" | "beta" => {
                let end = rest[k + 1..]
                    .iter()
                    .position(|t| VERTEX_KEYWORDS.contains(&t.text))
                    .map_or(rest.len(), |p| k + 1 + p);
                let p = parse_poly(line, &rest[k + 1..end])?;
                if tok.text == "alpha" {
                    alpha = Some(p);
                } else {
                    beta = Some(p);
                }
                k = end;
            }
            other => return Err(line.error(tok.column, format!("unexpected `{other}`"))),
        }
    }
    g.add_vertex(id, looped, mark).map_err(|e| line.error(line.tokens[1].column, e.to_string()))?;
    if alpha.is_some() || beta.is_some() {
        let w = Weights::new(alpha.unwrap_or_else(BracketPoly::a), beta.unwrap_or_else(BracketPoly::b));
        g.set_weights(id, w).expect("vertex just added");
    }
    Ok(())
}

/// Parses every `graph` block of a marked-graph file.
pub fn parse_marked_graphs(input: &str) -> Result<Vec<Named<MarkedGraph>>, ParseError> {
    let mut out = Vec::new();
    for (name, body) in blocks(input)? {
        let mut g = MarkedGraph::new();
        let mut edges = Vec::new();
        for line in &body {
            match line.tokens[0].text {
                "freeloops" => {
                    let k = parse_u32(line, line.tokens.get(1), "a free-loop count")?;
                    expect_end(line, &line.tokens[2..])?;
                    g.set_free_loops(k);
                }
                "vertex" => parse_vertex(line, &mut g)?,
                "edge" => edges.push((parse_edge(line)?, line.number)),
                other => return Err(line.error(line.tokens[0].column, format!("unknown keyword `{other}`"))),
            }
        }
        for ((a, b, column), number) in edges {
            g.add_edge(a, b).map_err(|e| ParseError { line: number, column, message: e.to_string() })?;
        }
        out.push(Named { name, graph: g });
    }
    Ok(out)
}

/// Parses a file that must contain exactly one marked graph.
pub fn parse_marked_graph(input: &str) -> Result<MarkedGraph, ParseError> {
    let mut all = parse_marked_graphs(input)?;
    if all.len() != 1 {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: format!("expected one graph, found {}", all.len()),
        });
    }
    Ok(all.remove(0).graph)
}

fn compact(p: &BracketPoly) -> String {
    p.to_string().replace(' ', "")
}

/// Prints a marked graph in the block format accepted by [`parse_marked_graphs`].
pub fn print_marked_graph(name: Option<&str>, g: &MarkedGraph) -> String {
    let mut s = String::new();
    if let Some(name) = name {
        writeln!(s, "graph {name}").unwrap();
    }
    if g.free_loops() > 0 {
        writeln!(s, "freeloops {}", g.free_loops()).unwrap();
    }
    for &v in g.ids() {
        write!(s, "vertex {v}").unwrap();
        if g.is_looped(v).unwrap() {
            s.push_str(" loop");
        }
        if let Some(k) = g.mark(v).unwrap().keyword() {
            write!(s, " mark {k}").unwrap();
        }
        if g.has_custom_weights(v).unwrap() {
            let w = g.weights(v).unwrap();
            write!(s, " alpha {} beta {}", compact(&w.alpha), compact(&w.beta)).unwrap();
        }
        s.push('\n');
    }
    for (a, b) in g.edges() {
        writeln!(s, "edge {a} {b}").unwrap();
    }
    s
}

fn diagram_error(e: DiagramError) -> ParseError {
    ParseError { line: 1, column: 1, message: e.to_string() }
}

/// Parses a Gauss code such as `1 2 / 1 2 / O signs 1+ 2-`. The code may span several lines.
pub fn parse_gauss_code(input: &str) -> Result<GaussCode, ParseError> {
    let all: Vec<Line> = lines(input).collect();
    let mut components: Vec<Vec<u32>> = vec![Vec::new()];
    let mut free = 0u32;
    let mut free_here = false;
    let mut signs = BTreeMap::new();
    let mut in_signs = false;
    let mut first = None;
    for line in &all {
        for tok in &line.tokens {
            first.get_or_insert((line.number, tok.column));
            if in_signs {
                let (label, sign) = match tok.text.char_indices().last() {
                    Some((k, '+')) => (&tok.text[..k], Sign::Plus),
                    Some((k, '-')) => (&tok.text[..k], Sign::Minus),
                    _ => {
                        return Err(
                            line.error(tok.column, format!("expected <label><+|->, found `{}`", tok.text))
                        )
                    }
                };
                let label: u32 = label
                    .parse()
                    .map_err(|_| line.error(tok.column, format!("bad crossing label `{label}`")))?;
                if signs.insert(label, sign).is_some() {
                    return Err(line.error(tok.column, format!("sign for {label} given twice")));
                }
                continue;
            }
            match tok.text {
                "signs" => in_signs = true,
                "/" => {
                    if components.last().expect("nonempty").is_empty() && !free_here {
                        return Err(line.error(tok.column, "empty component"));
                    }
                    components.push(Vec::new());
                    free_here = false;
                }
                "O" | "o" => {
                    if free_here || !components.last().expect("nonempty").is_empty() {
                        return Err(line.error(tok.column, "`O` must stand alone as a component"));
                    }
                    free_here = true;
                    free += 1;
                }
                t => {
                    if free_here {
                        return Err(line.error(tok.column, "`O` must stand alone as a component"));
                    }
                    let x =
                        t.parse().map_err(|_| line.error(tok.column, format!("bad crossing label `{t}`")))?;
                    components.last_mut().expect("nonempty").push(x);
                }
            }
        }
    }
    if first.is_none() {
        return Err(ParseError { line: 1, column: 1, message: "empty Gauss code".into() });
    }
    if components.last().expect("nonempty").is_empty() && !free_here {
        let (line, column) = all.last().map_or((1, 1), |l| (l.number, l.end_column()));
        return Err(ParseError { line, column, message: "empty component".into() });
    }
    GaussCode::new(components, free, signs).map_err(diagram_error)
}

pub fn print_gauss_code(code: &GaussCode) -> String {
    format!("{code}\n")
}

/// Parses every block of a labeled-graph file (`lvertex <id> <0|1> <+|->` and `edge` lines).
pub fn parse_labeled_graphs(input: &str) -> Result<Vec<Named<LabeledGraph>>, ParseError> {
    let mut out = Vec::new();
    for (name, body) in blocks(input)? {
        let mut g = LabeledGraph::new();
        let mut edges = Vec::new();
        for line in &body {
            match line.tokens[0].text {
                "lvertex" => {
                    let id = parse_u32(line, line.tokens.get(1), "a vertex id")?;
                    let first = match line.tokens.get(2).map(|t| t.text) {
                        Some("0") => 0,
                        Some("1") => 1,
                        _ => {
                            let c = line.tokens.get(2).map_or(line.end_column(), |t| t.column);
                            return Err(line.error(c, "expected 0 or 1"));
                        }
                    };
                    let sign = match line.tokens.get(3).map(|t| t.text) {
                        Some("+") => Sign::Plus,
                        Some("-") => Sign::Minus,
                        _ => {
                            let c = line.tokens.get(3).map_or(line.end_column(), |t| t.column);
                            return Err(line.error(c, "expected + or -"));
                        }
                    };
                    expect_end(line, &line.tokens[4..])?;
                    g.add_vertex(id, GlLabel::new(first, sign))
                        .map_err(|e| line.error(line.tokens[1].column, e.to_string()))?;
                }
                "edge" => edges.push((parse_edge(line)?, line.number)),
                other => return Err(line.error(line.tokens[0].column, format!("unknown keyword `{other}`"))),
            }
        }
        for ((a, b, column), number) in edges {
            g.add_edge(a, b).map_err(|e| ParseError { line: number, column, message: e.to_string() })?;
        }
        out.push(Named { name, graph: g });
    }
    Ok(out)
}

pub fn print_labeled_graph(name: Option<&str>, g: &LabeledGraph) -> String {
    let mut s = String::new();
    if let Some(name) = name {
        writeln!(s, "graph {name}").unwrap();
    }
    for (v, l) in g.vertices() {
        writeln!(s, "lvertex {v} {} {}", l.first(), l.sign.symbol()).unwrap();
    }
    for (a, b) in g.edges() {
        writeln!(s, "edge {a} {b}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marked_graph_example() {
        let text =
            "# hopf\ngraph h\nfreeloops 1\nvertex 0 loop mark cr\nvertex 1 alpha A^2 + B beta B\nedge 0 1\n";
        let all = parse_marked_graphs(text).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].name.as_deref(), Some("h"));
        let g = &all[0].graph;
        assert_eq!(g.free_loops(), 1);
        assert_eq!(g.mark(0).unwrap(), Mark::Cr);
        assert!(g.is_looped(0).unwrap());
        assert_eq!(g.weights(1).unwrap().alpha, "A^2 + B".parse().unwrap());
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(parse_marked_graph(&print_marked_graph(Some("h"), g)).unwrap(), *g);
    }

    #[test]
    fn marked_graph_errors() {
        let e = parse_marked_graph("vertex 0\nedge 0 5\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        let e = parse_marked_graph("vertex 0 mark q\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 15));
        let e = parse_marked_graph("vertex 0 alpha A^\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.column >= 16, "{e}");
        assert_eq!(parse_marked_graph("").unwrap(), MarkedGraph::new());
    }

    #[test]
    fn gauss_code_example() {
        let code = parse_gauss_code("1 2 / 1 2 / O signs 1+ 2-").unwrap();
        assert_eq!(code.components(), &[vec![1, 2], vec![1, 2]]);
        assert_eq!(code.free_components(), 1);
        assert_eq!(code.signs()[&2], Sign::Minus);
        assert_eq!(parse_gauss_code(&print_gauss_code(&code)).unwrap(), code);
        let e = parse_gauss_code("1 2 / / 1 2 signs 1+ 2+").unwrap_err();
        assert_eq!((e.line, e.column), (1, 7));
        assert!(parse_gauss_code("1 2 1 signs 1+ 2+").is_err());
    }

    #[test]
    fn labeled_graph_example() {
        let all = parse_labeled_graphs("lvertex 0 1 +\nlvertex 1 0 -\nedge 0 1\n").unwrap();
        let g = &all[0].graph;
        assert_eq!(g.label(0).unwrap(), GlLabel::new(1, Sign::Plus));
        let back = parse_labeled_graphs(&print_labeled_graph(None, g)).unwrap();
        assert_eq!(&back[0].graph, g);
        let e = parse_labeled_graphs("lvertex 0 2 +\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
    }
}
