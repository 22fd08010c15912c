//! Normalization through the sequent calculus: translate to sequents, remove
//! cuts, translate back.

use connexive::bridge::{nd_to_sc, normalize, sc_to_nd};
use connexive::natded::{check_derivation, is_normal, maximum_formulas, open_assumptions, NdSystemId};
use connexive::prover::{eliminate_cut, SearchConfig};
use connexive::random::{seeded, DerivationGen};

fn main() {
    let cfg = SearchConfig::default();
    let gen = DerivationGen::default();
    let mut rng = seeded(2024);

    for sys in NdSystemId::ALL {
        let d = gen.with_detour(&mut rng, sys);
        let calc = sys.paired();
        let sc = nd_to_sc(sys, &d).unwrap();
        let free = eliminate_cut(calc, &sc, &cfg).unwrap();
        let back = sc_to_nd(calc, &free).unwrap();
        println!(
            "{sys}: {} nodes, {} maxima -> {calc} {} nodes (cut-free {}) -> {} nodes, normal {}, valid {}",
            d.node_count(),
            maximum_formulas(&d).len(),
            sc.node_count(),
            free.node_count(),
            back.node_count(),
            is_normal(&back),
            check_derivation(sys, &back).is_valid(),
        );
        let n = normalize(sys, &d, &cfg).unwrap();
        assert_eq!(n.formula, d.formula);
        assert!(open_assumptions(&n).is_subset(&open_assumptions(&d)));
    }
}
