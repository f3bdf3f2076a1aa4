//! Seeded Monte-Carlo experiments.
//!
//! Trial `i` of a run with seed `s` uses the seed `s ^ i`, so results do not
//! depend on how trials are scheduled across workers. Records are emitted in
//! trial order.

pub mod bounds;
mod stats;
mod suites;

pub use stats::{summarize, ExperimentReport, Rule, Verdict};
pub use suites::Suite;

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Money;

pub const WORKERS_ENV: &str = "AUCTIONLAB_WORKERS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("no records to summarize")]
    EmptyStream,
    #[error("bad parameter {key}={value:?}: {msg}")]
    BadParam { key: String, value: String, msg: String },
    #[error("suite {suite} does not take parameter {key:?}")]
    UnknownParam { suite: String, key: String },
    #[error("malformed parameter list {0:?}; expected k=v,k=v")]
    ParamSyntax(String),
    #[error("suite setup failed: {0}")]
    Setup(String),
    #[error("bad record file: {0}")]
    Records(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// `k=v,...` experiment parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut map = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| HarnessError::ParamSyntax(text.to_string()))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e: T::Err| HarnessError::BadParam {
                key: key.to_string(),
                value: v.clone(),
                msg: e.to_string(),
            }),
        }
    }
}

mod ratio_str {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One trial's outcome. `ratio = reference / max(value, 1)`, exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub suite: String,
    pub trial: u64,
    pub seed: u64,
    pub instance: String,
    pub value: Money,
    #[serde(with = "ratio_str")]
    pub reference: Ratio<u64>,
    #[serde(with = "ratio_str")]
    pub ratio: Ratio<u64>,
    /// Per-trial check for suites whose guarantee holds on every instance.
    pub ok: bool,
}

impl TrialRecord {
    pub fn new(
        suite: Suite,
        trial: u64,
        seed: u64,
        instance: String,
        value: Money,
        reference: Ratio<u64>,
        ok: bool,
    ) -> Self {
        Self {
            suite: suite.as_str().to_string(),
            trial,
            seed,
            instance,
            value,
            reference,
            ratio: reference / Ratio::from_integer(value.max(1)),
            ok,
        }
    }
}

pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: ExperimentReport,
    pub records: Vec<TrialRecord>,
}

/// Worker count from `AUCTIONLAB_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn run_experiment(
    suite: Suite,
    params: &Params,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Experiment, HarnessError> {
    let started = Instant::now();
    let ctx = suites::prepare(suite, params, seed)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers.or_else(workers_from_env) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    let outcomes: Vec<Option<TrialRecord>> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| ctx.run_trial(t, trial_seed(seed, t)))
            .collect()
    });
    let skipped = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    let records: Vec<TrialRecord> = outcomes.into_iter().flatten().collect();
    let mut report = summarize(suite.as_str(), ctx.rule(), &records)?;
    report.skipped = skipped;
    report.seed = Some(seed);
    report.params = params.clone();
    report.notes = ctx.notes();
    report.wall_clock_ms = started.elapsed().as_millis();
    Ok(Experiment { report, records })
}

pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv is utf-8")
}

pub fn records_from_csv(text: &str) -> Result<Vec<TrialRecord>, HarnessError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::Records(e.to_string()))
}
