//! Detour reduction step by step on generated derivations.

use connexive::natded::{is_normal, maximum_formulas, NdSystemId};
use connexive::random::{seeded, DerivationGen};
use connexive::reduction::{normalize_by_reduction, reduce_step, reduction_kind, DEFAULT_MAX_STEPS};

fn main() {
    let gen = DerivationGen::default();
    let mut rng = seeded(7);
    for sys in NdSystemId::ALL {
        let mut d = gen.with_detour(&mut rng, sys);
        println!("== {sys}, {} nodes\n{d}", d.node_count());
        let mut steps = 0;
        while let Some(occ) = maximum_formulas(&d).into_iter().next() {
            let kind = reduction_kind(&d, &occ);
            d = reduce_step(sys, &d, &occ).unwrap();
            steps += 1;
            println!("step {steps}: {:?} at {:?} on {} -> {} nodes", kind.unwrap(), occ.path, occ.formula, d.node_count());
        }
        println!("normal: {}\n{d}", is_normal(&d));

        let again = gen.with_detour(&mut rng, sys);
        let (n, used) = normalize_by_reduction(sys, &again, DEFAULT_MAX_STEPS).unwrap();
        println!("another: {} -> {} nodes in {used} steps", again.node_count(), n.node_count());
    }
}
