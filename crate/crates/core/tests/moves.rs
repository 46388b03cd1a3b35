use markbracket::{
    apply_graphlink_move, apply_move, detect_moves, jones, reduced_bracket, to_marked, GlLabel,
    GraphLinkMove, LabeledGraph, Mark, MarkedGraph, MoveSpec, Sign,
};
use proptest::prelude::*;

fn base_graph(max_n: usize) -> impl Strategy<Value = MarkedGraph> {
    (0..=max_n).prop_flat_map(|n| {
        let verts = prop::collection::vec((any::<bool>(), 0..6usize), n);
        let edges = prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2);
        (verts, edges).prop_map(move |(verts, bits)| {
            let vs: Vec<(bool, Mark)> = verts.into_iter().map(|(l, m)| (l, Mark::ALL[m])).collect();
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if bits[k] {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            MarkedGraph::from_parts(&vs, &edges, 0).unwrap()
        })
    })
}

fn attach(g: &mut MarkedGraph, v: u32, targets: &[u32]) {
    for &x in targets {
        g.add_edge(v, x).unwrap();
    }
}

fn subset(g: &MarkedGraph, mask: u32) -> Vec<u32> {
    g.ids().iter().copied().filter(|&x| mask >> x & 1 == 1).collect()
}

fn assert_invariant(before: &MarkedGraph, after: &MarkedGraph) -> Result<(), TestCaseError> {
    prop_assert_eq!(reduced_bracket(before).unwrap(), reduced_bracket(after).unwrap());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn omega2a_preserves_reduced_bracket(g in base_graph(4), mask in any::<u32>(), adjacent in any::<bool>()) {
        let nbrs = subset(&g, mask);
        let (v, w) = (g.fresh_id(), g.fresh_id() + 1);
        let spec = MoveSpec::Omega2aAdjoin { v, w, adjacent, neighbors: nbrs };
        let big = apply_move(&g, &spec).unwrap();
        let back = apply_move(&big, &MoveSpec::Omega2a { v, w }).unwrap();
        prop_assert_eq!(&back, &g);
        assert_invariant(&big, &g)?;
    }

    #[test]
    fn omega2b_preserves_reduced_bracket(g in base_graph(4), mask in any::<u32>()) {
        let mut g = g;
        let z = g.fresh_id();
        g.add_vertex(z, false, Mark::Unmarked).unwrap();
        let others = subset(&g, mask);
        let (v, w) = (z + 1, z + 2);
        g.add_vertex(v, true, Mark::C).unwrap();
        g.add_vertex(w, false, Mark::Unmarked).unwrap();
        g.add_edge(v, w).unwrap();
        g.add_edge(v, z).unwrap();
        attach(&mut g, v, &others);
        let out = apply_move(&g, &MoveSpec::Omega2b { v, w, z }).unwrap();
        assert_invariant(&g, &out)?;
    }

    #[test]
    fn omega2c_preserves_reduced_bracket(g in base_graph(4), mask in any::<u32>(), z_looped in any::<bool>(), z_mark in 0..6usize) {
        let mut g = g;
        let z = g.fresh_id();
        g.add_vertex(z, z_looped, Mark::ALL[z_mark]).unwrap();
        let others = subset(&g, mask);
        let (v, w) = (z + 1, z + 2);
        g.add_vertex(v, true, Mark::C).unwrap();
        g.add_vertex(w, false, Mark::Unmarked).unwrap();
        g.add_edge(v, w).unwrap();
        for x in [v, w] {
            attach(&mut g, x, &[z]);
            attach(&mut g, x, &others);
        }
        let out = apply_move(&g, &MoveSpec::Omega2c { v, w, z }).unwrap();
        assert_invariant(&g, &out)?;
    }

    #[test]
    fn omega3_preserves_reduced_bracket(g in base_graph(4), masks in prop::collection::vec(0..4u8, 4)) {
        // Every outside vertex touches none or exactly two of the triangle.
        let mut g = g;
        let u = g.fresh_id();
        let (v, w) = (u + 1, u + 2);
        let outside: Vec<u32> = g.ids().to_vec();
        g.add_vertex(u, true, Mark::Unmarked).unwrap();
        g.add_vertex(v, false, Mark::Unmarked).unwrap();
        g.add_vertex(w, false, Mark::Unmarked).unwrap();
        for (x, m) in outside.into_iter().zip(masks) {
            let pair = match m { 0 => vec![], 1 => vec![u, v], 2 => vec![u, w], _ => vec![v, w] };
            attach(&mut g, x, &pair);
        }
        let flat = g.clone();
        for (a, b) in [(u, v), (u, w), (v, w)] {
            g.add_edge(a, b).unwrap();
        }
        let out = apply_move(&g, &MoveSpec::Omega3 { u, v, w }).unwrap();
        prop_assert_eq!(&out, &flat);
        assert_invariant(&g, &out)?;
        prop_assert_eq!(apply_move(&flat, &MoveSpec::Omega3Inverse { u, v, w }).unwrap(), g);
    }

    #[test]
    fn omega1_preserves_jones(g in base_graph(4), looped in any::<bool>(), u in any::<bool>()) {
        let mark = if u { Mark::U } else { Mark::Unmarked };
        let v = g.fresh_id();
        let big = apply_move(&g, &MoveSpec::Omega1Adjoin { v, looped, mark }).unwrap();
        prop_assert_eq!(jones(&big).unwrap(), jones(&g).unwrap());
    }

    #[test]
    fn conjugated_moves_preserve_reduced_bracket(g in base_graph(4), mask in any::<u32>(), pre in prop::collection::vec(any::<prop::sample::Index>(), 0..3)) {
        let nbrs = subset(&g, mask);
        let (v, w) = (g.fresh_id(), g.fresh_id() + 1);
        let pre: Vec<u32> = if g.is_empty() { vec![] } else { pre.iter().map(|i| g.ids()[i.index(g.n())]).collect() };
        let post: Vec<u32> = pre.iter().rev().copied().collect();
        let inner = Box::new(MoveSpec::Omega2aAdjoin { v, w, adjacent: false, neighbors: nbrs });
        let out = apply_move(&g, &MoveSpec::Conjugated { pre, inner, post }).unwrap();
        assert_invariant(&g, &out)?;
    }
}

fn inverse_of(g: &MarkedGraph, m: &MoveSpec) -> Option<MoveSpec> {
    Some(match *m {
        MoveSpec::Omega1Remove { v } => {
            MoveSpec::Omega1Adjoin { v, looped: g.is_looped(v).unwrap(), mark: g.mark(v).unwrap() }
        }
        MoveSpec::Omega1Adjoin { v, .. } => MoveSpec::Omega1Remove { v },
        MoveSpec::Omega2a { v, w } => MoveSpec::Omega2aAdjoin {
            v,
            w,
            adjacent: g.adjacent(v, w).unwrap(),
            neighbors: g.neighbors(v).unwrap().into_iter().filter(|&x| x != w).collect(),
        },
        MoveSpec::Omega2d { v, w } => MoveSpec::Omega2dAdjoin { v, w },
        MoveSpec::Omega2dAdjoin { v, w } => MoveSpec::Omega2d { v, w },
        MoveSpec::Omega3 { u, v, w } => MoveSpec::Omega3Inverse { u, v, w },
        MoveSpec::Omega3Inverse { u, v, w } => MoveSpec::Omega3 { u, v, w },
        _ => return None,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detected_moves_round_trip(g in base_graph(4), mask in any::<u32>(), adjacent in any::<bool>(), free in 0u32..2) {
        let mut g = g;
        g.set_free_loops(free);
        let (v, w) = (g.fresh_id(), g.fresh_id() + 1);
        let nbrs = subset(&g, mask);
        let g = apply_move(&g, &MoveSpec::Omega2aAdjoin { v, w, adjacent, neighbors: nbrs }).unwrap();
        let mut seen = 0;
        for m in detect_moves(&g) {
            let h = apply_move(&g, &m).unwrap();
            if let Some(inv) = inverse_of(&g, &m) {
                let back = apply_move(&h, &inv).unwrap();
                prop_assert!(back.is_isomorphic(&g).unwrap(), "{} then {}", m, inv);
                seen += 1;
            }
        }
        prop_assert!(seen > 0);
    }
}

fn labeled(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let labels = prop::collection::vec((0..2u8, any::<bool>()), n);
        let edges = prop::collection::vec(any::<bool>(), n * (n - 1) / 2);
        (labels, edges).prop_map(move |(labels, bits)| {
            let mut g = LabeledGraph::new();
            for (i, (a, s)) in labels.into_iter().enumerate() {
                let sign = if s { Sign::Plus } else { Sign::Minus };
                g.add_vertex(i as u32, GlLabel::new(a, sign)).unwrap();
            }
            let mut k = 0;
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if bits[k] {
                        g.add_edge(a, b).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn g4_prime_matches_complement(g in labeled(5), pick in any::<prop::sample::Index>()) {
        let v = pick.index(g.n()) as u32;
        if let Ok(out) = apply_graphlink_move(&g, &GraphLinkMove::G4Prime { v }) {
            let expected = to_marked(&g).marked_local_complement(v).unwrap().r_simplify();
            prop_assert_eq!(to_marked(&out), expected);
        }
    }

    #[test]
    fn g4_matches_pivot(g in labeled(5), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (v, w) = (a.index(g.n()) as u32, b.index(g.n()) as u32);
        if let Ok(out) = apply_graphlink_move(&g, &GraphLinkMove::G4 { v, w }) {
            let expected = to_marked(&g).marked_pivot(v, w).unwrap().r_simplify();
            prop_assert!(to_marked(&out).is_isomorphic(&expected).unwrap());
            prop_assert_eq!(to_marked(&out), expected);
        }
    }

    #[test]
    fn g4_moves_preserve_reduced_bracket(g in labeled(5), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (v, w) = (a.index(g.n()) as u32, b.index(g.n()) as u32);
        for m in [GraphLinkMove::G4 { v, w }, GraphLinkMove::G4Prime { v }] {
            if let Ok(out) = apply_graphlink_move(&g, &m) {
                prop_assert_eq!(
                    reduced_bracket(&to_marked(&out)).unwrap(),
                    reduced_bracket(&to_marked(&g)).unwrap()
                );
            }
        }
    }

    #[test]
    fn g1_g2_preserve_jones(g in labeled(4), mask in any::<u32>(), one in any::<bool>(), sign in any::<bool>()) {
        let first = u8::from(one);
        let s = if sign { Sign::Plus } else { Sign::Minus };
        let mut big = g.clone();
        let v = g.n() as u32;
        let w = v + 1;
        big.add_vertex(v, GlLabel::new(first, s)).unwrap();
        big.add_vertex(w, GlLabel::new(first, s.flip())).unwrap();
        if one {
            big.add_edge(v, w).unwrap();
        }
        for x in 0..g.n() as u32 {
            if mask >> x & 1 == 1 {
                big.add_edge(v, x).unwrap();
                big.add_edge(w, x).unwrap();
            }
        }
        let out = apply_graphlink_move(&big, &GraphLinkMove::G2 { v, w }).unwrap();
        prop_assert_eq!(&out, &g);
        prop_assert_eq!(jones(&to_marked(&big)).unwrap(), jones(&to_marked(&g)).unwrap());

        let mut single = g.clone();
        single.add_vertex(v, GlLabel::new(0, s)).unwrap();
        let out = apply_graphlink_move(&single, &GraphLinkMove::G1 { v }).unwrap();
        prop_assert_eq!(&out, &g);
        prop_assert_eq!(jones(&to_marked(&single)).unwrap(), jones(&to_marked(&g)).unwrap());
    }

    #[test]
    fn g3_preserves_reduced_bracket(g in labeled(4), masks in prop::collection::vec(0..4u8, 4)) {
        let mut big = g.clone();
        let n = g.n() as u32;
        let (v, w, x) = (n, n + 1, n + 2);
        for y in [v, w, x] {
            big.add_vertex(y, GlLabel::new(0, Sign::Minus)).unwrap();
        }
        big.add_edge(x, v).unwrap();
        big.add_edge(x, w).unwrap();
        for (y, m) in (0..n).zip(masks) {
            if m & 1 == 1 { big.add_edge(y, v).unwrap(); }
            if m & 2 == 2 { big.add_edge(y, w).unwrap(); }
        }
        let out = apply_graphlink_move(&big, &GraphLinkMove::G3 { v, w, x }).unwrap();
        let (before, after) = (to_marked(&big), to_marked(&out));
        prop_assert_eq!(reduced_bracket(&after).unwrap(), reduced_bracket(&before).unwrap());
        // v and w gain loops, so the writhe factor moves by A^12.
        prop_assert_eq!(jones(&before).unwrap().shift(12), jones(&after).unwrap());
    }
}
