use mcgap_core::carr_vempala::{min_alpha, MinAlpha};
use mcgap_core::decomp::{enumerate, RootFilter};
use mcgap_core::generators::{amplify_one_sum, gen_cactus_gap, gen_cycle_gadget, gen_star_gap};
use mcgap_core::multicut::{gap, solve_fractional, DEFAULT_NODE_BUDGET};
use mcgap_core::pload::{min_pload, min_pload_radius, min_pload_rooted};
use mcgap_core::rational::{int, ratio};

#[test]
fn cactus_small_optima() {
    let one = gap(&gen_cactus_gap(1).unwrap().instance, DEFAULT_NODE_BUDGET).unwrap();
    assert_eq!((one.lp.value, one.ip.solution.cost), (int(1), int(1)));
    let two = gap(&gen_cactus_gap(2).unwrap().instance, DEFAULT_NODE_BUDGET).unwrap();
    assert!(two.ip.optimal);
    assert_eq!((two.lp.value, two.ip.solution.cost), (int(9), int(12)));
    assert_eq!(solve_fractional(&gen_cactus_gap(3).unwrap().instance).unwrap().value, ratio(81, 4));
}

#[test]
fn gadget_loads() {
    let g2 = gen_cycle_gadget(2).unwrap();
    let r = g2.root();
    assert_eq!(min_pload(&g2.graph, 2).unwrap().p, ratio(1, 4));
    assert_eq!(min_pload_rooted(&g2.graph, r, 2).unwrap().p, ratio(1, 2));
    let res = min_pload_radius(&g2.graph, r, 2, 1).unwrap();
    assert_eq!((res.p.clone(), res.family_size), (ratio(5, 9), 24));
    res.verify().unwrap();
    let rooted = enumerate(&g2.graph, 4, Some(RootFilter { root: r, k: 2 })).unwrap();
    assert_eq!(rooted.len(), 24);
}

#[test]
fn sums_need_more_load() {
    let g = gen_cycle_gadget(2).unwrap();
    let expected = [ratio(1, 4), ratio(3, 8), ratio(5, 12)];
    for (m, p) in (1..=3).zip(expected) {
        let sum = amplify_one_sum(&g.graph, g.root(), m).unwrap();
        assert_eq!(min_pload(&sum.graph, 2).unwrap().p, p, "m = {m}");
    }
}

#[test]
fn star_alpha() {
    let star = gen_star_gap(3).unwrap();
    let x = vec![ratio(1, 2); 3];
    match min_alpha(&star, &x, DEFAULT_NODE_BUDGET).unwrap() {
        MinAlpha::Exact { alpha, decomposition } => {
            assert_eq!(alpha, ratio(4, 3));
            decomposition.verify(&star, &x).unwrap();
        }
        other => panic!("{other:?}"),
    }
}
