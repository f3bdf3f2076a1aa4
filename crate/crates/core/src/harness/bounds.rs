//! Reference values the experiment suites compare against.

/// Lower bound on the expected size of Ranking on a left `k`-copy of a graph
/// with a perfect matching of size `n`: `sum_{s=1}^n (kn/(kn+1))^s`, in the
/// closed form `kn (1 - (1 - 1/(kn+1))^n)`.
pub fn kcopy_ranking_bound(n: usize, k: usize) -> f64 {
    let kn = (k * n) as f64;
    kn * (1.0 - (1.0 - 1.0 / (kn + 1.0)).powf(n as f64))
}

/// `kcopy_ranking_bound(n, 2) / 4`: expected matched size on the 2-copy,
/// halved by the coin, halved again for the profit.
pub fn ranking_simulate_bound(n: usize) -> f64 {
    kcopy_ranking_bound(n, 2) / 4.0
}

/// Limit of `kcopy_ranking_bound(n, k) / (kn)`: `1 - e^{-1/k}`.
pub fn kcopy_asymptotic_fraction(k: usize) -> f64 {
    1.0 - (-1.0 / k as f64).exp()
}

/// Competitive ratio of RankingSimulate: `2 sqrt(e) / (sqrt(e) - 1)`.
pub fn ranking_simulate_ratio() -> f64 {
    let r = std::f64::consts::E.sqrt();
    2.0 * r / (r - 1.0)
}

/// Expected value of Greedy on a random `m`-keyword chain: `(m + 1) / 2`.
pub fn greedy_chain_mean(m: usize) -> f64 {
    (m as f64 + 1.0) / 2.0
}

/// Expected value guaranteed by the random construction: an eighth of the
/// first-price value it starts from.
pub fn random_construction_bound(first_price_value: u64) -> f64 {
    first_price_value as f64 / 8.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_direct_sum() {
        for (n, k) in [(1, 1), (6, 2), (8, 2), (20, 3)] {
            let q = (k * n) as f64 / (k * n + 1) as f64;
            let direct: f64 = (1..=n).map(|s| q.powi(s as i32)).sum();
            assert!((direct - kcopy_ranking_bound(n, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn constants() {
        assert!((ranking_simulate_ratio() - 5.083).abs() < 1e-3);
        assert_eq!(greedy_chain_mean(9), 5.0);
        assert_eq!(random_construction_bound(16), 2.0);
        assert!(kcopy_ranking_bound(6, 2) < 6.0);
    }
}
