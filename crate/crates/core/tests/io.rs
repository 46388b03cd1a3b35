use std::collections::BTreeMap;

use markbracket::{
    parse_gauss_code, parse_labeled_graphs, parse_marked_graphs, print_gauss_code, print_labeled_graph,
    print_marked_graph, BracketPoly, GaussCode, GlLabel, LabeledGraph, Mark, MarkedGraph, Monomial, Sign,
    Weights,
};
use proptest::prelude::*;

fn small_poly() -> impl Strategy<Value = BracketPoly> {
    prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3, 0u32..3), 1..4).prop_map(|terms| {
        let mut p = BracketPoly::zero();
        for (c, a, b, d) in terms {
            p += BracketPoly::term(c, Monomial::new(a, b, d));
        }
        p
    })
}

fn marked_graph() -> impl Strategy<Value = MarkedGraph> {
    (0usize..7).prop_flat_map(|n| {
        let verts = prop::collection::vec(
            (any::<bool>(), 0..6usize, prop::option::weighted(0.3, (small_poly(), small_poly()))),
            n,
        );
        let edges = prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2);
        (verts, edges, 0u32..3, prop::collection::vec(0u32..50, n)).prop_map(
            move |(verts, bits, free, gaps)| {
                let mut g = MarkedGraph::new();
                let mut id = 0;
                let mut ids = Vec::new();
                for ((looped, m, w), gap) in verts.into_iter().zip(gaps) {
                    id += gap;
                    g.add_vertex(id, looped, Mark::ALL[m]).unwrap();
                    if let Some((a, b)) = w {
                        g.set_weights(id, Weights::new(a, b)).unwrap();
                    }
                    ids.push(id);
                    id += 1;
                }
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            g.add_edge(ids[i], ids[j]).unwrap();
                        }
                        k += 1;
                    }
                }
                g.set_free_loops(free);
                g
            },
        )
    })
}

fn gauss_code() -> impl Strategy<Value = GaussCode> {
    (0u32..6, 1usize..4).prop_flat_map(|(n, k)| {
        let word: Vec<u32> = (0..n).flat_map(|x| [x, x]).collect();
        (
            Just(word).prop_shuffle(),
            prop::collection::vec(0..=2 * n as usize, k - 1),
            prop::collection::vec(any::<bool>(), n as usize),
        )
            .prop_map(move |(word, mut cuts, signs)| {
                cuts.sort_unstable();
                let mut comps = Vec::new();
                let mut prev = 0;
                for c in cuts.into_iter().chain(std::iter::once(word.len())) {
                    comps.push(word[prev..c].to_vec());
                    prev = c;
                }
                let free = comps.iter().filter(|c| c.is_empty()).count() as u32;
                let signs: BTreeMap<u32, Sign> = signs
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| (i as u32, if s { Sign::Plus } else { Sign::Minus }))
                    .collect();
                GaussCode::new(comps, free.max(u32::from(n == 0)), signs).unwrap()
            })
    })
}

fn labeled_graph() -> impl Strategy<Value = LabeledGraph> {
    (0usize..7).prop_flat_map(|n| {
        let labels = prop::collection::vec((0u8..2, any::<bool>()), n);
        let edges = prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2);
        (labels, edges).prop_map(move |(labels, bits)| {
            let mut g = LabeledGraph::new();
            for (i, (a, s)) in labels.into_iter().enumerate() {
                g.add_vertex(i as u32 * 3, GlLabel::new(a, if s { Sign::Plus } else { Sign::Minus }))
                    .unwrap();
            }
            let mut k = 0;
            for i in 0..n as u32 {
                for j in i + 1..n as u32 {
                    if bits[k] {
                        g.add_edge(i * 3, j * 3).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn marked_graph_round_trip(g in marked_graph(), h in marked_graph()) {
        let text = format!("{}\n{}", print_marked_graph(Some("first"), &g), print_marked_graph(Some("second"), &h));
        let back = parse_marked_graphs(&text).unwrap();
        prop_assert_eq!(back.len(), 2);
        prop_assert_eq!(back[0].name.as_deref(), Some("first"));
        prop_assert_eq!(&back[0].graph, &g);
        prop_assert_eq!(&back[1].graph, &h);
    }

    #[test]
    fn gauss_code_round_trip(code in gauss_code()) {
        prop_assert_eq!(parse_gauss_code(&print_gauss_code(&code)).unwrap(), code);
    }

    #[test]
    fn labeled_graph_round_trip(g in labeled_graph()) {
        let back = parse_labeled_graphs(&print_labeled_graph(Some("g"), &g)).unwrap();
        prop_assert_eq!(&back[0].graph, &g);
    }
}
