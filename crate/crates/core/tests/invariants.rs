use std::collections::{BTreeMap, HashSet};

use markbracket::bracket::state_nullity;
use markbracket::diagram::{
    all_euler_transitions, circuit_partition_size, kappa_orbit, partition_matrix, random_kappa_walk,
};
use markbracket::{
    bracket, bracket_recursive, build_universe, euler_system, interlacement_graph, jones, kappa_transform,
    kauffman_oracle, BracketPoly, GaussCode, Letter, Mark, MarkedGraph, Pairing, Sign,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(max_n: usize, max_free: u32) -> impl Strategy<Value = MarkedGraph> {
    (0..=max_n).prop_flat_map(move |n| {
        let verts = prop::collection::vec((any::<bool>(), 0..6usize), n);
        let edges = prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2);
        (verts, edges, 0..=max_free).prop_map(move |(verts, bits, free)| {
            let vs: Vec<(bool, Mark)> = verts.into_iter().map(|(l, m)| (l, Mark::ALL[m])).collect();
            let mut es = Vec::new();
            let mut k = 0;
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if bits[k] {
                        es.push((a, b));
                    }
                    k += 1;
                }
            }
            MarkedGraph::from_parts(&vs, &es, free).unwrap()
        })
    })
}

fn gauss_code(max_crossings: u32) -> impl Strategy<Value = GaussCode> {
    (0..=max_crossings, 1usize..=3).prop_flat_map(|(n, k)| {
        let word: Vec<u32> = (1..=n).flat_map(|x| [x, x]).collect();
        (
            Just(word).prop_shuffle(),
            prop::collection::vec(0..=2 * n as usize, k - 1),
            prop::collection::vec(any::<bool>(), n as usize),
        )
            .prop_map(|(word, mut cuts, signs)| {
                cuts.sort_unstable();
                cuts.push(word.len());
                let mut comps = Vec::new();
                let mut prev = 0;
                for c in cuts {
                    comps.push(word[prev..c].to_vec());
                    prev = c;
                }
                let free = comps.iter().filter(|c| c.is_empty()).count() as u32;
                let signs: BTreeMap<u32, Sign> = signs
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| (i as u32 + 1, if s { Sign::Plus } else { Sign::Minus }))
                    .collect();
                GaussCode::new(comps, free, signs).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_is_an_involution(g in graph(8, 1)) {
        for &v in g.ids() {
            let h = g.marked_local_complement(v).unwrap();
            prop_assert_eq!(h.marked_local_complement(v).unwrap(), g.clone());
            prop_assert_eq!(h.writhe(), g.writhe());
        }
    }

    #[test]
    fn complement_mark_bookkeeping(g in graph(8, 0)) {
        for &v in g.ids() {
            let h = g.marked_local_complement(v).unwrap();
            let (before, after) = (g.mark(v).unwrap(), h.mark(v).unwrap());
            prop_assert_eq!(after.has_r() != before.has_r(), before.letter() == Letter::C);
            let unu = |l| matches!(l, Letter::None | Letter::U);
            prop_assert_eq!(unu(before.letter()), unu(after.letter()));
            for x in g.neighbors(v).unwrap() {
                prop_assert_ne!(g.mark(x).unwrap().has_r(), h.mark(x).unwrap().has_r());
            }
        }
    }

    #[test]
    fn pivot_constructions_agree(g in graph(8, 0)) {
        for (v, w) in g.edges() {
            let p = g.marked_pivot(v, w).unwrap();
            prop_assert_eq!(&p, &g.marked_pivot_direct(v, w).unwrap());
            prop_assert_eq!(p.writhe(), g.writhe());
        }
    }

    #[test]
    fn r_simplify_is_idempotent(g in graph(8, 1)) {
        let r = g.r_simplify();
        prop_assert_eq!(r.r_simplify(), r.clone());
        prop_assert!(r.ids().iter().all(|&v| !r.mark(v).unwrap().has_r()));
        prop_assert_eq!(bracket(&r), bracket(&g));
    }

    #[test]
    fn bracket_invariant_under_complement(g in graph(7, 2)) {
        let b = bracket(&g);
        let j = jones(&g).unwrap();
        for &v in g.ids() {
            let h = g.marked_local_complement(v).unwrap();
            prop_assert_eq!(bracket(&h), b.clone());
            prop_assert_eq!(jones(&h).unwrap(), j.clone());
        }
    }

    #[test]
    fn state_nullities_invariant_under_complement(g in graph(6, 0)) {
        for &v in g.ids() {
            let h = g.marked_local_complement(v).unwrap();
            for mask in 0..1u64 << g.n() {
                prop_assert_eq!(state_nullity(&g, mask), state_nullity(&h, mask));
            }
        }
    }

    #[test]
    fn loop_and_r_toggle_preserves_bracket(g in graph(7, 1)) {
        let b = bracket(&g);
        for &v in g.ids() {
            prop_assert_eq!(bracket(&g.toggle_loop_and_r(v).unwrap()), b.clone());
        }
    }

    #[test]
    fn bracket_multiplicative(g in graph(5, 1), h in graph(5, 1)) {
        let union = g.disjoint_union(&h.shifted(100)).unwrap();
        prop_assert_eq!(bracket(&union), &bracket(&g) * &bracket(&h));
        let mut extra = g.clone();
        extra.set_free_loops(g.free_loops() + 1);
        prop_assert_eq!(bracket(&extra), &bracket(&g) * &BracketPoly::d());
    }

    #[test]
    fn recursion_matches_state_sum(g in graph(10, 2)) {
        prop_assert_eq!(bracket_recursive(&g), bracket(&g));
    }

    #[test]
    fn interlacement_bracket_matches_oracle(code in gauss_code(6), seed in any::<u64>()) {
        let oracle = kauffman_oracle(&code).unwrap();
        let u = build_universe(&code);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_kappa_walk(&u, &euler_system(&u), 4, &mut rng);
        let g = interlacement_graph(&u, &c).unwrap();
        prop_assert_eq!(bracket(&g), oracle);
        // Crossings on different circuits are never interlaced.
        let circuit_of = |v: u32| c.words().iter().position(|w| w.contains(&v)).unwrap();
        for (a, b) in g.edges() {
            prop_assert_eq!(circuit_of(a), circuit_of(b));
        }
        for &v in u.labels() {
            let lhs = interlacement_graph(&u, &kappa_transform(&c, v).unwrap()).unwrap();
            prop_assert_eq!(lhs, g.marked_local_complement(v).unwrap());
        }
    }

    #[test]
    fn circuit_nullity_exhaustive(code in gauss_code(6)) {
        let u = build_universe(&code);
        let c = euler_system(&u);
        let n = u.n();
        for k in 0..3usize.pow(n as u32) {
            let t: Vec<Pairing> = (0..n).map(|i| Pairing::ALL[k / 3usize.pow(i as u32) % 3]).collect();
            let nu = partition_matrix(&u, &c, &t).unwrap().nullity().unwrap();
            prop_assert_eq!(circuit_partition_size(&u, &t).unwrap(), u.component_count() + nu);
        }
    }

    #[test]
    fn kappa_transforms_reach_every_euler_system(code in gauss_code(4)) {
        let u = build_universe(&code);
        let orbit = kappa_orbit(&u, &euler_system(&u));
        let all: HashSet<Vec<Pairing>> = all_euler_transitions(&u).into_iter().collect();
        prop_assert_eq!(orbit, all);
    }
}
