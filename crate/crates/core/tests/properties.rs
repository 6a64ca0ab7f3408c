use proptest::prelude::*;

use kcover::generators::gen_random;
use kcover::matching::{max_matching, max_matching_bruteforce, Graph};
use kcover::oracle::{min_cover_exact, min_ones_exact, OracleBudget};
use kcover::prpsli::{solve, PipelineConfig};
use kcover::semilocal::semilocal_cover;
use kcover::{induced_subinstance, parse_instance, validate_cover, ElemSet, Instance};

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (0usize..=11).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len)
            .prop_map(move |keep| Graph::new(n, pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e)).unwrap())
    })
}

/// Instances over at most 12 elements with sets of size at most `k`.
fn instance_strategy(k: usize) -> impl Strategy<Value = Instance> {
    (1usize..=12, 0usize..16, any::<u64>(), 0.2f64..0.9).prop_map(move |(n, m, seed, density)| {
        gen_random(n, k, m, density, seed).unwrap().instance
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matching_equals_bruteforce(g in graph_strategy()) {
        let fast = max_matching(&g);
        prop_assert!(fast.is_valid_for(&g));
        prop_assert_eq!(fast.len(), max_matching_bruteforce(&g).unwrap().len());
    }

    #[test]
    fn instance_text_round_trip(inst in instance_strategy(4)) {
        let text = inst.to_text();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn induced_sets_map_back_and_cover(inst in instance_strategy(4), mask in any::<u16>(), max_size in 1usize..=4) {
        let n = inst.n();
        let keep: Vec<u32> = (0..n as u32).filter(|e| mask >> e & 1 == 1).collect();
        let uncovered = ElemSet::from_elems(n, &keep);
        let induced = induced_subinstance(&inst, &uncovered, max_size);
        prop_assert_eq!(induced.instance.n(), keep.len());
        prop_assert_eq!(&induced.elements, &keep);
        for set in induced.instance.base_sets() {
            prop_assert!(set.len() <= max_size);
            let parent: Vec<u32> = set.iter().map(|&e| induced.elements[e as usize]).collect();
            prop_assert!(inst.base_containing_all(&parent).is_some());
        }
    }

    #[test]
    fn induced_optimum_is_monotone(inst in instance_strategy(3), mask in any::<u16>(), drop in any::<u16>()) {
        let n = inst.n();
        let big: Vec<u32> = (0..n as u32).filter(|e| mask >> e & 1 == 1).collect();
        let small: Vec<u32> = big.iter().copied().filter(|e| drop >> e & 1 == 0).collect();
        let budget = OracleBudget::default();
        let opt = |elems: &[u32]| {
            let sub = induced_subinstance(&inst, &ElemSet::from_elems(n, elems), 3);
            min_cover_exact(&sub.instance, &budget).unwrap().size
        };
        prop_assert!(opt(&small) <= opt(&big));
    }

    #[test]
    fn semilocal_matches_oracle(inst in instance_strategy(3)) {
        let budget = OracleBudget::default();
        let r = semilocal_cover(&inst).unwrap();
        let stats = validate_cover(&inst, &r.cover).unwrap();
        prop_assert_eq!(stats.ones, r.ones);
        prop_assert_eq!(r.ones, min_ones_exact(&inst, &budget).unwrap());
        prop_assert!(3 * stats.total <= 4 * min_cover_exact(&inst, &budget).unwrap().size);
    }

    #[test]
    fn pipeline_invariants(inst in instance_strategy(5)) {
        let k = inst.k().max(3);
        let cfg = PipelineConfig::new(k, num_rational::BigRational::new(1.into(), 8.into()));
        let (cover, report) = solve(&inst, &cfg).unwrap();
        let stats = validate_cover(&inst, &cover).unwrap();
        prop_assert_eq!(&stats, &report.stats);
        let mut prev = inst.n();
        for p in &report.phases {
            prop_assert!(p.uncovered_before <= prev);
            prev = p.uncovered_before;
        }
        prop_assert!(report.uncovered_before_3 <= prev);
        if let Some(base) = report.baseline_ones {
            for p in report.phases.iter().filter(|p| p.restricted) {
                prop_assert!(p.gate_trace.iter().all(|&g| g <= base));
                prop_assert!(p.gate_trace.windows(2).all(|w| w[1] <= w[0]));
            }
        }
    }
}
