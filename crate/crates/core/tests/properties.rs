#![allow(clippy::needless_range_loop)]

mod common;

use auctionlab::format::{validate_instance, Graph};
use auctionlab::generators::{random_2paa, random_2pm, random_perfect_2pm, sample_chain, ChainVariant};
use auctionlab::harness::{records_to_csv, run_experiment, Params, Suite};
use auctionlab::offline::{reverse_match, top_c};
use auctionlab::online::{
    left_k_copy, run_online, run_online_matching, FirstAvailable, Greedy, OnlinePolicy, Ranking, RankingSimulate,
    SkipAll,
};
use auctionlab::oracles::second_bid_upper_bound;
use auctionlab::reductions::{
    extract_vertex_cover, normalize_first_price, random_construction, to_first_price_bids, vc_to_2pm,
};
use auctionlab::{
    effective_bid, execute, max_matching, opt_1paa, opt_2paa, opt_2pm, Action, BudgetState, Instance, Money,
    SearchLimits,
};
use common::*;
use num_rational::Ratio;
use proptest::prelude::*;

/// Turns raw `(first, second)` picks into a legal action list: an illegal
/// pair is tried reversed, then skipped.
fn legalize(inst: &Instance, picks: &[(usize, usize)]) -> Vec<Action> {
    let mut state = BudgetState::new(inst);
    let nb = inst.num_bidders();
    (0..inst.num_keywords())
        .map(|u| {
            let (a, b) = picks[u % picks.len()];
            let (a, b) = (a % nb, b % nb);
            let mut chosen = Action::Skip;
            if a != b {
                for cand in [Action::assign(a, b), Action::assign(b, a)] {
                    if state.price_of(inst, cand).is_ok() {
                        chosen = cand;
                        break;
                    }
                }
            }
            state.apply(inst, chosen).unwrap();
            chosen
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn limits() -> SearchLimits {
    SearchLimits::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn execution_conserves_budgets(
        inst in small_instance(5, 4, 9),
        picks in prop::collection::vec((0usize..4, 0usize..4), 1..6),
    ) {
        let actions = legalize(&inst, &picks);
        let trace = execute(&inst, &actions).unwrap();
        // determinism
        prop_assert_eq!(&trace, &execute(&inst, &actions).unwrap());
        // value decomposition
        prop_assert_eq!(trace.value(), trace.steps.iter().map(|s| s.price).sum::<Money>());
        let mut remaining = inst.budgets();
        for step in &trace.steps {
            match step.action {
                Action::Skip => prop_assert_eq!(step.price, 0),
                Action::Assign { first, second } => {
                    let ef = effective_bid(inst.bid(step.keyword, first), remaining[first]);
                    let es = effective_bid(inst.bid(step.keyword, second), remaining[second]);
                    prop_assert!(step.price <= ef && step.price <= es);
                    prop_assert_eq!(step.price, es);
                    remaining[first] -= step.price;
                }
            }
        }
        // only first-price bidders are charged
        prop_assert_eq!(&trace.final_budgets, &remaining);
        for v in 0..inst.num_bidders() {
            let paid: Money = trace
                .steps
                .iter()
                .filter(|s| s.action.first() == Some(v))
                .map(|s| s.price)
                .sum();
            prop_assert_eq!(trace.final_budgets[v], inst.budget(v) - paid);
            prop_assert!(trace.final_budgets[v] <= inst.budget(v));
        }
    }

    #[test]
    fn second_price_oracles_match_brute_force(inst in small_instance(4, 4, 6)) {
        let opt = opt_2paa(&inst, limits()).unwrap();
        prop_assert_eq!(opt.value, brute_2paa(&inst));
        prop_assert_eq!(execute(&inst, &opt.witness.actions()).unwrap().value(), opt.value);
        prop_assert!(opt.value as u128 <= second_bid_upper_bound(&inst));
        let fp = opt_1paa(&inst, limits()).unwrap();
        prop_assert_eq!(fp.value, brute_1paa(&inst));
        prop_assert_eq!(fp.witness.value(&inst), fp.value);
        // transformed first-price bids dominate every second-price outcome
        // whose second bidder does not outbid the winner originally
        let transformed = to_first_price_bids(&inst).unwrap();
        prop_assert!(brute_2paa_bid_ordered(&inst) <= opt_1paa(&transformed, limits()).unwrap().value);
    }

    #[test]
    fn zero_one_oracles_match_brute_force(inst in small_zero_one(6, 5)) {
        let m = max_matching(&inst);
        prop_assert!(m.is_valid_for(&inst));
        prop_assert_eq!(m.size(), brute_matching(&inst));
        let opt = opt_2pm(&inst, limits()).unwrap();
        prop_assert_eq!(opt.value, brute_2paa(&inst));
        prop_assert_eq!(execute(&inst, &opt.witness.actions()).unwrap().value(), opt.value);
        prop_assert!(opt.value as usize <= m.size());
    }

    #[test]
    fn matching_size_ignores_arrival_order(inst in small_zero_one(6, 5), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut order: Vec<usize> = (0..inst.num_keywords()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let edges = order
            .iter()
            .enumerate()
            .flat_map(|(new, &old)| inst.neighbors(old).map(move |v| (new, v)).collect::<Vec<_>>());
        let permuted = Instance::zero_one(inst.num_keywords(), inst.num_bidders(), edges).unwrap();
        prop_assert_eq!(max_matching(&inst).size(), max_matching(&permuted).size());
    }

    #[test]
    fn reverse_match_invariants(inst in small_zero_one(7, 6)) {
        let out = reverse_match(&inst).unwrap();
        let replay = execute(&inst, &out.trace.actions()).unwrap();
        prop_assert_eq!(&replay, &out.trace);
        for step in &out.trace.steps {
            if let Action::Assign { first, .. } = step.action {
                prop_assert_eq!(step.price, 1);
                prop_assert_eq!(out.matching.bidder_of(step.keyword), Some(first));
            }
        }
        let opt = opt_2pm(&inst, limits()).unwrap().value;
        prop_assert!(opt <= 2 * out.trace.value());
        // keywords of degree < 2 can never be sold at a positive price
        let trimmed: Vec<usize> = (0..inst.num_keywords()).filter(|&u| inst.degree(u) >= 2).collect();
        let f = brute_matching(&inst.select_keywords(&trimmed).unwrap());
        prop_assert!(out.trace.value() as usize >= f.div_ceil(2));
    }

    #[test]
    fn top_c_never_truncates_under_promise(
        nk in 1usize..8, nb in 2usize..5, c in 1usize..3, seed in any::<u64>(),
    ) {
        let inst = random_2paa(nk, nb, 10, c as Money, seed).unwrap();
        prop_assert!(inst.r_min().unwrap() >= Ratio::from_integer(c as Money));
        let out = top_c(&inst, c).unwrap();
        prop_assert!(!out.truncation_possible);
        for step in &out.trace.steps {
            if let Action::Assign { second, .. } = step.action {
                prop_assert_eq!(step.price, inst.bid(step.keyword, second));
            }
        }
        let s: u128 = (0..nk).map(|u| inst.second_highest_bid(u) as u128).sum();
        prop_assert!(out.trace.value() as u128 * nk as u128 >= c.min(nk) as u128 * s);
    }

    #[test]
    fn generated_instances_validate(nk in 1usize..10, nb in 2usize..8, n in 2usize..8, seed in any::<u64>()) {
        for inst in [
            random_2pm(nk, nb, 0.4, seed).unwrap(),
            random_2paa(nk, nb, 12, 2, seed).unwrap(),
            random_perfect_2pm(n, 0.3, seed).unwrap(),
        ] {
            prop_assert!(validate_instance(&inst).is_valid());
        }
        let zo = random_2pm(nk, nb, 0.4, seed).unwrap();
        prop_assert!((0..nk).all(|u| zo.degree(u) >= 2));
        let perfect = random_perfect_2pm(n, 0.3, seed).unwrap();
        prop_assert_eq!(max_matching(&perfect).size(), n);
    }

    #[test]
    fn chain_samples(m in 1usize..12, seed in any::<u64>()) {
        let normal = sample_chain(m, ChainVariant::Normal, seed).unwrap();
        prop_assert!(validate_instance(&normal.instance).is_valid());
        prop_assert!((0..m).all(|u| normal.instance.degree(u) == 2));
        let w = normal.witness.as_ref().unwrap();
        prop_assert_eq!(execute(&normal.instance, &w.actions()).unwrap().value(), m as Money);
        for i in 1..m {
            let (a, b) = normal.pairs[i - 1];
            let shared = normal.pairs[i].0;
            prop_assert!(shared == a || shared == b);
            prop_assert_eq!(normal.pairs[i].1, i + 1);
        }
        let restricted = sample_chain(m, ChainVariant::Restricted, seed).unwrap();
        prop_assert!((0..m).all(|u| restricted.instance.bid(u, 0) == 0));
    }

    #[test]
    fn online_policies_are_causal(
        inst in small_instance(6, 4, 5),
        cut in 0usize..6,
        noise in prop::collection::vec(prop::collection::vec(0u64..6, 4), 6),
        seed in any::<u64>(),
    ) {
        let nk = inst.num_keywords();
        let cut = cut.min(nk);
        let budgets = inst.budgets();
        let rows: Vec<Vec<Money>> = (0..nk)
            .map(|u| {
                if u < cut {
                    inst.bids_for(u).to_vec()
                } else {
                    (0..inst.num_bidders()).map(|v| noise[u][v].min(budgets[v])).collect()
                }
            })
            .collect();
        let other = matrix_instance(&budgets, rows);
        let policies: Vec<fn() -> Box<dyn OnlinePolicy>> = vec![
            || Box::new(Greedy),
            || Box::new(SkipAll),
            || Box::new(FirstAvailable),
            || Box::new(RankingSimulate::new()),
        ];
        for make in policies {
            let a = run_online(&inst, make().as_mut(), seed).unwrap();
            let b = run_online(&other, make().as_mut(), seed).unwrap();
            prop_assert_eq!(&a.actions()[..cut], &b.actions()[..cut]);
        }
        let a = run_online_matching(&inst, &mut Ranking::new(), seed).unwrap();
        let b = run_online_matching(&other, &mut Ranking::new(), seed).unwrap();
        for u in 0..cut {
            prop_assert_eq!(a.bidder_of(u), b.bidder_of(u));
        }
    }

    #[test]
    fn ranking_simulate_halves_ranking_on_two_copy(inst in small_zero_one(4, 4)) {
        let nk = inst.num_keywords();
        let nb = inst.num_bidders();
        let copy = left_k_copy(&inst, 2).unwrap();
        for sigma in permutations(nb) {
            let ranking = run_online_matching(&copy.instance, &mut Ranking::with_sigma(sigma.clone()), 0).unwrap();
            let mut matched = vec![0u32; nb];
            for mask in 0u32..1 << nk {
                let coins = (0..nk).map(|i| mask & (1 << i) != 0).collect();
                let mut p = RankingSimulate::scripted(sigma.clone(), coins);
                let trace = run_online(&inst, &mut p, 0).unwrap();
                for v in 0..nb {
                    prop_assert!(!(p.matched()[v] && p.reserved()[v]));
                    // M and R together are exactly Ranking's matched set
                    prop_assert_eq!(p.matched()[v] || p.reserved()[v], ranking.is_bidder_matched(v));
                    matched[v] += p.matched()[v] as u32;
                }
                prop_assert!(trace.value() as usize <= p.matched().iter().filter(|&&m| m).count());
            }
            for v in 0..nb {
                let expected = if ranking.is_bidder_matched(v) { 1 << nk } else { 0 };
                prop_assert_eq!(2 * matched[v], expected, "bidder {} sigma {:?}", v, sigma);
            }
        }
    }

    #[test]
    fn cover_extraction_from_any_feasible_trace(
        n in 2usize..5,
        mask in any::<u8>(),
        picks in prop::collection::vec((0usize..20, 0usize..20), 1..20),
    ) {
        let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let edges: Vec<_> = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect();
        let graph = Graph::new(n, edges.clone()).unwrap();
        let gadget = vc_to_2pm(&graph).unwrap();
        let trace = execute(&gadget.instance, &legalize(&gadget.instance, &picks)).unwrap();
        let ex = extract_vertex_cover(&gadget, &trace).unwrap();
        prop_assert!(graph.covers(&ex.cover));
        prop_assert!(ex.normalized.value() >= trace.value());
        prop_assert!(ex.cover.len() as Money <= gadget.capacity() as Money - trace.value());
        prop_assert!(ex.cover.len() >= brute_vertex_cover(n, &edges));
    }

    #[test]
    fn random_construction_keeps_half_when_over_budget(inst in small_instance(5, 4, 8), seed in any::<u64>()) {
        let transformed = to_first_price_bids(&inst).unwrap();
        let alloc = normalize_first_price(&transformed, &opt_1paa(&transformed, limits()).unwrap().witness);
        let rc = random_construction(&inst, &alloc, seed).unwrap();
        prop_assert_eq!(execute(&inst, &rc.trace.actions()).unwrap().value(), rc.trace.value());
        for b in &rc.per_bidder {
            let pay = |us: &[usize]| us.iter().map(|&u| transformed.bid(u, b.bidder) as u128).sum::<u128>();
            prop_assert_eq!(b.over_budget, pay(&b.candidates) > inst.budget(b.bidder) as u128);
            prop_assert!(2 * pay(&b.kept) >= pay(&b.candidates));
        }
    }
}

/// A depleted high bidder can price a keyword above the winner's transformed
/// bid, so the unrestricted optimum may exceed the transformed first-price one.
#[test]
fn truncated_second_bids_escape_the_transform_bound() {
    let inst = matrix_instance(&[3, 2], vec![vec![3, 2], vec![3, 1], vec![3, 1]]);
    let transformed = to_first_price_bids(&inst).unwrap();
    assert_eq!(opt_2paa(&inst, limits()).unwrap().value, 4);
    assert_eq!(brute_2paa(&inst), 4);
    assert_eq!(opt_1paa(&transformed, limits()).unwrap().value, 3);
    assert_eq!(brute_2paa_bid_ordered(&inst), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn experiment_csv_ignores_worker_count(seed in any::<u64>(), suite_idx in 0usize..Suite::ALL.len()) {
        let suite = Suite::ALL[suite_idx];
        let params = Params::default();
        let one = run_experiment(suite, &params, 24, seed, Some(1)).unwrap();
        let many = run_experiment(suite, &params, 24, seed, Some(4)).unwrap();
        prop_assert_eq!(records_to_csv(&one.records), records_to_csv(&many.records));
        prop_assert_eq!(one.report.mean_exact, many.report.mean_exact);
    }
}
