use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bounds;
use super::{HarnessError, Params, Rule, TrialRecord};
use crate::generators::{adversary_vs_policy, random_2paa, random_2pm, random_perfect_2pm, sample_chain, ChainVariant};
use crate::model::{Instance, Money};
use crate::offline::{reverse_match, second_bid_sum, top_c};
use crate::online::{
    left_k_copy, run_online, run_online_matching, FirstAvailable, Greedy, OnlinePolicy, Ranking, RankingSimulate,
    SkipAll,
};
use crate::oracles::{max_matching, opt_1paa, opt_2pm, SearchLimits};
use crate::reductions::{normalize_first_price, random_construction, to_first_price_bids, FirstPriceAllocation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    RankingKCopy,
    RankingSimulate,
    GreedyChain,
    ReverseMatch,
    RandomConstruction,
    Adversary,
    TopC,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::RankingKCopy,
        Suite::RankingSimulate,
        Suite::GreedyChain,
        Suite::ReverseMatch,
        Suite::RandomConstruction,
        Suite::Adversary,
        Suite::TopC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::RankingKCopy => "ranking-kcopy",
            Suite::RankingSimulate => "ranking-simulate",
            Suite::GreedyChain => "greedy-chain",
            Suite::ReverseMatch => "reverse-match",
            Suite::RandomConstruction => "random-construction",
            Suite::Adversary => "adversary",
            Suite::TopC => "top-c",
        }
    }

    /// Accepted parameters and their defaults.
    pub fn parameters(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Suite::RankingKCopy => &[("n", "6"), ("k", "2"), ("p", "0.3"), ("graph_seed", "<seed>")],
            Suite::RankingSimulate => &[("n", "8"), ("p", "0.3"), ("graph_seed", "<seed>")],
            Suite::GreedyChain => &[("m", "9")],
            Suite::ReverseMatch => &[("max_keywords", "10"), ("max_bidders", "10")],
            Suite::RandomConstruction => &[
                ("keywords", "5"),
                ("bidders", "5"),
                ("max_bid", "9"),
                ("r_min", "2"),
                ("instance_seed", "<seed>"),
            ],
            Suite::Adversary => &[("max_m", "6")],
            Suite::TopC => &[
                ("c", "2"),
                ("max_keywords", "8"),
                ("max_bidders", "5"),
                ("max_bid", "10"),
            ],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

fn setup<E: fmt::Display>(e: E) -> HarnessError {
    HarnessError::Setup(e.to_string())
}

fn bad(key: &str, value: impl ToString, msg: &str) -> HarnessError {
    HarnessError::BadParam {
        key: key.to_string(),
        value: value.to_string(),
        msg: msg.to_string(),
    }
}

pub(super) enum Context {
    RankingKCopy {
        h: Instance,
        n: usize,
        k: usize,
        descriptor: String,
    },
    RankingSimulate {
        g: Instance,
        n: usize,
        opt: Money,
        descriptor: String,
    },
    GreedyChain {
        m: usize,
    },
    ReverseMatch {
        max_keywords: usize,
        max_bidders: usize,
    },
    RandomConstruction {
        instance: Instance,
        alloc: FirstPriceAllocation,
        first_price_value: Money,
        descriptor: String,
    },
    Adversary {
        max_m: usize,
    },
    TopC {
        c: usize,
        max_keywords: usize,
        max_bidders: usize,
        max_bid: Money,
    },
}

pub(super) fn prepare(suite: Suite, params: &Params, seed: u64) -> Result<Context, HarnessError> {
    for key in params.keys() {
        if !suite.parameters().iter().any(|(k, _)| *k == key) {
            return Err(HarnessError::UnknownParam {
                suite: suite.as_str().to_string(),
                key: key.to_string(),
            });
        }
    }
    Ok(match suite {
        Suite::RankingKCopy => {
            let n = params.get("n", 6usize)?;
            let k = params.get("k", 2usize)?;
            let p = params.get("p", 0.3f64)?;
            let gs = params.get("graph_seed", seed)?;
            if k == 0 {
                return Err(bad("k", k, "must be positive"));
            }
            let g = random_perfect_2pm(n, p, gs).map_err(setup)?;
            let h = left_k_copy(&g, k).map_err(setup)?.instance;
            Context::RankingKCopy {
                h,
                n: max_matching(&g).size(),
                k,
                descriptor: format!("perfect_2pm(n={n},p={p},seed={gs})x{k}"),
            }
        }
        Suite::RankingSimulate => {
            let n = params.get("n", 8usize)?;
            let p = params.get("p", 0.3f64)?;
            let gs = params.get("graph_seed", seed)?;
            let g = random_perfect_2pm(n, p, gs).map_err(setup)?;
            let opt = opt_2pm(&g, SearchLimits::default()).map_err(setup)?.value;
            Context::RankingSimulate {
                n: max_matching(&g).size(),
                opt,
                descriptor: format!("perfect_2pm(n={n},p={p},seed={gs})"),
                g,
            }
        }
        Suite::GreedyChain => {
            let m = params.get("m", 9usize)?;
            if m == 0 {
                return Err(bad("m", m, "must be positive"));
            }
            Context::GreedyChain { m }
        }
        Suite::ReverseMatch => {
            let max_keywords = params.get("max_keywords", 10usize)?;
            let max_bidders = params.get("max_bidders", 10usize)?;
            if max_keywords == 0 || !(2..=64).contains(&max_bidders) {
                return Err(bad(
                    "max_bidders",
                    max_bidders,
                    "need max_keywords >= 1 and 2 <= max_bidders <= 64",
                ));
            }
            Context::ReverseMatch {
                max_keywords,
                max_bidders,
            }
        }
        Suite::RandomConstruction => {
            let nk = params.get("keywords", 5usize)?;
            let nb = params.get("bidders", 5usize)?;
            let max_bid = params.get("max_bid", 9 as Money)?;
            let r = params.get("r_min", 2 as Money)?;
            let is = params.get("instance_seed", seed)?;
            let instance = random_2paa(nk, nb, max_bid, r, is).map_err(setup)?;
            let transformed = to_first_price_bids(&instance).map_err(setup)?;
            let opt = opt_1paa(&transformed, SearchLimits::default()).map_err(setup)?;
            let alloc = normalize_first_price(&transformed, &opt.witness);
            Context::RandomConstruction {
                instance,
                alloc,
                first_price_value: opt.value,
                descriptor: format!("random_2paa({nk}x{nb},max_bid={max_bid},r_min={r},seed={is})"),
            }
        }
        Suite::Adversary => {
            let max_m = params.get("max_m", 6usize)?;
            if max_m == 0 || max_m > 30 {
                return Err(bad("max_m", max_m, "must be in 1..=30"));
            }
            Context::Adversary { max_m }
        }
        Suite::TopC => {
            let c = params.get("c", 2usize)?;
            let max_keywords = params.get("max_keywords", 8usize)?;
            let max_bidders = params.get("max_bidders", 5usize)?;
            let max_bid = params.get("max_bid", 10 as Money)?;
            if c == 0 || max_keywords == 0 || max_bidders < 2 {
                return Err(bad("c", c, "need c >= 1, max_keywords >= 1, max_bidders >= 2"));
            }
            Context::TopC {
                c,
                max_keywords,
                max_bidders,
                max_bid,
            }
        }
    })
}

const BATTERY: [&str; 3] = ["greedy", "skip-all", "first-available"];

fn battery_policy(i: usize) -> Box<dyn OnlinePolicy> {
    match i % BATTERY.len() {
        0 => Box::new(Greedy),
        1 => Box::new(SkipAll),
        _ => Box::new(FirstAvailable),
    }
}

impl Context {
    pub(super) fn suite(&self) -> Suite {
        match self {
            Context::RankingKCopy { .. } => Suite::RankingKCopy,
            Context::RankingSimulate { .. } => Suite::RankingSimulate,
            Context::GreedyChain { .. } => Suite::GreedyChain,
            Context::ReverseMatch { .. } => Suite::ReverseMatch,
            Context::RandomConstruction { .. } => Suite::RandomConstruction,
            Context::Adversary { .. } => Suite::Adversary,
            Context::TopC { .. } => Suite::TopC,
        }
    }

    pub(super) fn rule(&self) -> Rule {
        match *self {
            Context::RankingKCopy { n, k, .. } => Rule::OneSided {
                bound: bounds::kcopy_ranking_bound(n, k),
            },
            Context::RankingSimulate { n, .. } => Rule::OneSided {
                bound: bounds::ranking_simulate_bound(n),
            },
            Context::GreedyChain { m } => Rule::TwoSided {
                target: bounds::greedy_chain_mean(m),
            },
            Context::RandomConstruction { first_price_value, .. } => Rule::OneSided {
                bound: bounds::random_construction_bound(first_price_value),
            },
            Context::ReverseMatch { .. } | Context::Adversary { .. } | Context::TopC { .. } => Rule::PerTrial,
        }
    }

    pub(super) fn notes(&self) -> BTreeMap<String, String> {
        let mut notes = BTreeMap::new();
        match self {
            Context::RankingKCopy { n, k, descriptor, .. } => {
                notes.insert("graph".into(), descriptor.clone());
                notes.insert("perfect_matching".into(), n.to_string());
                notes.insert(
                    "asymptotic_fraction".into(),
                    bounds::kcopy_asymptotic_fraction(*k).to_string(),
                );
            }
            Context::RankingSimulate { n, opt, descriptor, .. } => {
                notes.insert("graph".into(), descriptor.clone());
                notes.insert("perfect_matching".into(), n.to_string());
                notes.insert("opt_2pm".into(), opt.to_string());
                notes.insert("competitive_ratio".into(), bounds::ranking_simulate_ratio().to_string());
            }
            Context::RandomConstruction {
                first_price_value,
                descriptor,
                ..
            } => {
                notes.insert("instance".into(), descriptor.clone());
                notes.insert("first_price_value".into(), first_price_value.to_string());
            }
            Context::Adversary { .. } => {
                notes.insert("battery".into(), BATTERY.join(","));
            }
            _ => {}
        }
        notes
    }

    /// `None` when an exact oracle ran out of search budget.
    pub(super) fn run_trial(&self, trial: u64, seed: u64) -> Option<TrialRecord> {
        let suite = self.suite();
        let rec = |instance: String, value: Money, reference: Money, ok: bool| {
            Some(TrialRecord::new(
                suite,
                trial,
                seed,
                instance,
                value,
                Ratio::from_integer(reference),
                ok,
            ))
        };
        match self {
            Context::RankingKCopy { h, n, descriptor, .. } => {
                let m = run_online_matching(h, &mut Ranking::new(), seed).expect("ranking is legal");
                rec(descriptor.clone(), m.size() as Money, *n as Money, true)
            }
            Context::RankingSimulate { g, opt, descriptor, .. } => {
                let t = run_online(g, &mut RankingSimulate::new(), seed).expect("ranking-simulate is legal");
                rec(descriptor.clone(), t.value(), *opt, true)
            }
            Context::GreedyChain { m } => {
                let chain = sample_chain(*m, ChainVariant::Normal, seed).expect("valid chain parameters");
                let t = run_online(&chain.instance, &mut Greedy, seed).expect("greedy is legal");
                rec(format!("chain(m={m})"), t.value(), *m as Money, true)
            }
            Context::ReverseMatch {
                max_keywords,
                max_bidders,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let nk = rng.gen_range(1..=*max_keywords);
                let nb = rng.gen_range(2..=*max_bidders);
                let p = rng.gen_range(0.1..0.7);
                let inst = random_2pm(nk, nb, p, rng.gen()).expect("valid parameters");
                let opt = opt_2pm(&inst, SearchLimits::default()).ok()?.value;
                let value = reverse_match(&inst).expect("0/1 instance").trace.value();
                let half_f = (max_matching(&inst).size() as Money).div_ceil(2);
                let ok = opt <= 2 * value && value >= half_f;
                rec(format!("random_2pm({nk}x{nb},p={p:.3})"), value, opt, ok)
            }
            Context::RandomConstruction {
                instance,
                alloc,
                first_price_value,
                descriptor,
            } => {
                let rc = random_construction(instance, alloc, seed).expect("normalized allocation");
                rec(descriptor.clone(), rc.trace.value(), *first_price_value, true)
            }
            Context::Adversary { max_m } => {
                let which = trial as usize % BATTERY.len();
                let m = 1 + (trial as usize / BATTERY.len()) % max_m;
                let mut policy = battery_policy(which);
                let tr = adversary_vs_policy(policy.as_mut(), m).expect("deterministic policy");
                let opt = opt_2pm(&tr.instance, SearchLimits::default()).ok()?.value;
                let value = tr.policy_value();
                rec(
                    format!("adversary({},m={m})", BATTERY[which]),
                    value,
                    opt,
                    value <= 1 && opt == m as Money,
                )
            }
            Context::TopC {
                c,
                max_keywords,
                max_bidders,
                max_bid,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let nk = rng.gen_range(1..=*max_keywords);
                let nb = rng.gen_range(2..=*max_bidders);
                let inst = random_2paa(nk, nb, *max_bid, *c as Money, rng.gen()).expect("valid parameters");
                let out = top_c(&inst, *c).expect("c is positive");
                let sum = second_bid_sum(&inst);
                let value = out.trace.value();
                let untruncated = out
                    .trace
                    .steps
                    .iter()
                    .all(|s| s.action.first().is_none() || s.price == inst.second_highest_bid(s.keyword));
                let ok = (value as u128) * (nk as u128) >= ((*c).min(nk) as u128) * sum && untruncated;
                rec(
                    format!("random_2paa({nk}x{nb},max_bid={max_bid},r_min={c})"),
                    value,
                    sum as Money,
                    ok,
                )
            }
        }
    }
}
