use mcgap_core::decomp::enumerate;
use mcgap_core::generators::{random_connected, random_costs, random_pairs};
use mcgap_core::graph::{one_sum, Graph};
use mcgap_core::io::{emit_instance, parse_instance};
use mcgap_core::lp::{Domain, LinearProgram, LpOutcome, Relation, Sense};
use mcgap_core::multicut::{MulticutInstance, PairSet};
use mcgap_core::pload::{project_onto_factor, Distribution};
use mcgap_core::rational::{self, int, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
struct Data {
    sense: Sense,
    free: Vec<bool>,
    c: Vec<i64>,
    rows: Vec<(Vec<i64>, Relation, i64)>,
}

fn lp_data() -> impl Strategy<Value = Data> {
    let relation = prop_oneof![Just(Relation::Le), Just(Relation::Eq), Just(Relation::Ge)];
    (1usize..=4, 1usize..=4).prop_flat_map(move |(n, m)| {
        (
            any::<bool>(),
            prop::collection::vec(prop::bool::weighted(0.2), n),
            prop::collection::vec(-4i64..=4, n),
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), relation.clone(), -6i64..=6), m),
        )
            .prop_map(|(max, free, c, rows)| Data {
                sense: if max { Sense::Maximize } else { Sense::Minimize },
                free,
                c,
                rows,
            })
    })
}

fn dot(a: &[i64], x: &[Rational]) -> Rational {
    a.iter().zip(x).map(|(&ai, xi)| int(ai) * xi).sum()
}

fn satisfies(lhs: &Rational, rel: Relation, rhs: &Rational) -> bool {
    match rel {
        Relation::Le => lhs <= rhs,
        Relation::Eq => lhs == rhs,
        Relation::Ge => lhs >= rhs,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lp_outcomes_carry_valid_certificates(d in lp_data()) {
        let mut lp = LinearProgram::new(d.sense);
        let n = d.c.len();
        let vars: Vec<_> = (0..n)
            .map(|j| lp.add_variable(if d.free[j] { Domain::Free } else { Domain::NonNegative }, int(d.c[j])))
            .collect();
        for (a, rel, b) in &d.rows {
            let row: Vec<_> = a.iter().zip(&vars).map(|(&v, &x)| (x, int(v))).collect();
            lp.add_row(&row, *rel, int(*b)).unwrap();
        }
        let sign = if d.sense == Sense::Minimize { 1 } else { -1 };
        match lp.solve().unwrap() {
            LpOutcome::Optimal(sol) => {
                for (a, rel, b) in &d.rows {
                    prop_assert!(satisfies(&dot(a, &sol.values), *rel, &int(*b)));
                }
                for j in 0..n {
                    prop_assert!(d.free[j] || !sol.values[j].is_negative());
                }
                let cx = dot(&d.c, &sol.values);
                prop_assert_eq!(&cx, &sol.objective);
                // In minimization form the shadow prices y satisfy
                // y >= 0 on >= rows, y <= 0 on <= rows and c - A^T y >= 0.
                let y: Vec<Rational> = sol.duals.iter().map(|v| v * int(sign)).collect();
                for ((_, rel, _), yi) in d.rows.iter().zip(&y) {
                    match rel {
                        Relation::Le => prop_assert!(!yi.is_positive()),
                        Relation::Ge => prop_assert!(!yi.is_negative()),
                        Relation::Eq => {}
                    }
                }
                for j in 0..n {
                    let reduced = int(sign * d.c[j]) - d.rows.iter().zip(&y).map(|((a, _, _), yi)| int(a[j]) * yi).sum::<Rational>();
                    if d.free[j] {
                        prop_assert!(reduced.is_zero());
                    } else {
                        prop_assert!(!reduced.is_negative());
                    }
                }
                let by: Rational = d.rows.iter().zip(&y).map(|((_, _, b), yi)| int(*b) * yi).sum();
                prop_assert_eq!(by, cx * int(sign));
            }
            LpOutcome::Infeasible { farkas, .. } => {
                for ((_, rel, _), yi) in d.rows.iter().zip(&farkas) {
                    match rel {
                        Relation::Le => prop_assert!(!yi.is_negative()),
                        Relation::Ge => prop_assert!(!yi.is_positive()),
                        Relation::Eq => {}
                    }
                }
                for j in 0..n {
                    let col: Rational = d.rows.iter().zip(&farkas).map(|((a, _, _), yi)| int(a[j]) * yi).sum();
                    if d.free[j] {
                        prop_assert!(col.is_zero());
                    } else {
                        prop_assert!(!col.is_negative());
                    }
                }
                let yb: Rational = d.rows.iter().zip(&farkas).map(|((_, _, b), yi)| int(*b) * yi).sum();
                prop_assert!(yb.is_negative());
            }
            LpOutcome::Unbounded { ray, .. } => {
                for (a, rel, _) in &d.rows {
                    prop_assert!(satisfies(&dot(a, &ray), *rel, &Rational::zero()));
                }
                for j in 0..n {
                    prop_assert!(d.free[j] || !ray[j].is_negative());
                }
                prop_assert!((dot(&d.c, &ray) * int(sign)).is_negative());
            }
        }
    }

    #[test]
    fn decomposition_families_are_upward_closed_and_monotone(seed in any::<u64>(), t in 1u64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6);
        let g = random_connected(n, rng.gen_range(0..=4), &mut rng);
        let m = g.edge_count();
        let small = enumerate(&g, t, None).unwrap();
        let large = enumerate(&g, t + 1, None).unwrap();
        for &mask in small.masks() {
            prop_assert!(large.position(mask).is_some());
            for e in 0..m {
                prop_assert!(small.position(mask | 1 << e).is_some());
            }
        }
        prop_assert!(small.position((1u64 << m) - 1).is_some());
    }

    #[test]
    fn subdivision_preserves_distances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=7);
        let shape = random_connected(n, rng.gen_range(0..=5), &mut rng);
        let mut g = Graph::new(n);
        for e in shape.edges() {
            g.add_edge(e.u, e.v, rng.gen_range(1..=4)).unwrap();
        }
        let sub = g.subdivide_to_unit().unwrap();
        prop_assert!(sub.graph.has_unit_lengths());
        let before = g.all_pairs();
        let after = sub.graph.all_pairs();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(before.get(u, v), after.get(u, v));
            }
        }
        for (e, parts) in sub.edge_map.iter().enumerate() {
            prop_assert_eq!(parts.len() as u64, g.edges()[e].length);
        }
    }

    #[test]
    fn projection_preserves_edge_loads(seed in any::<u64>(), w in 1u64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_connected(rng.gen_range(2..=4), 1, &mut rng);
        let b = random_connected(rng.gen_range(2..=4), 1, &mut rng);
        let sum = one_sum(&[(&a, 0), (&b, 0)]).unwrap();
        let family = enumerate(&sum.graph, 2 * w, None).unwrap();
        let terms: Vec<_> = (0..3)
            .map(|_| (family.masks()[rng.gen_range(0..family.len())], rational::ratio(1, 3)))
            .collect();
        let dist = Distribution::new(sum.graph.clone(), 2 * w, terms).unwrap();
        let loads = dist.edge_loads();
        for (i, factor) in [&a, &b].into_iter().enumerate() {
            let proj = project_onto_factor(&dist, &sum, factor, i).unwrap();
            let local = proj.edge_loads();
            for (h, &e) in sum.edge_maps[i].iter().enumerate() {
                prop_assert_eq!(&local[h], &loads[e]);
            }
        }
    }

    #[test]
    fn instance_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=8);
        let g = random_connected(n, rng.gen_range(0..=4), &mut rng);
        let count = rng.gen_range(0..=4);
        let pairs = random_pairs(n, count, &mut rng);
        let costs = random_costs(g.edge_count(), 7, &mut rng)
            .into_iter()
            .map(|c| c / int(rng.gen_range(1..=3)))
            .collect();
        let inst = MulticutInstance::new(g, costs, PairSet::Explicit(pairs)).unwrap();
        let text = emit_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(emit_instance(&back), text);
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = rational::ratio(n, d);
        prop_assert_eq!(rational::parse(&rational::format(&r)), Some(r));
    }
}
