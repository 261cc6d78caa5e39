use serde::Serialize;

use crate::scalar::Scalar;

/// `ln((a + 1) / (b + 1))`.
pub fn raw_log_odds<T: Scalar>(a: u64, b: u64) -> T {
    (T::of(a as f64 + 1.0) / T::of(b as f64 + 1.0)).ln()
}

/// Log-odds-ratio z-score under a symmetric Dirichlet prior, reduced to the
/// two-outcome case (the phrase versus everything else).
///
/// `a`, `b` are the phrase's counts in each group, `n_a`, `n_b` the groups'
/// total phrase occurrences and `prior` the per-outcome pseudo-count.
pub fn normalized_log_odds<T: Scalar>(a: u64, b: u64, n_a: u64, n_b: u64, prior: T) -> T {
    debug_assert!(a <= n_a && b <= n_b);
    let log_odds = |y: u64, n: u64| {
        let y = T::of(y as f64);
        let n = T::of(n as f64);
        let two = T::of(2.0);
        ((y + prior) / (n + two * prior - y - prior)).ln()
    };
    let delta = log_odds(a, n_a) - log_odds(b, n_b);
    let a = T::of(a as f64);
    let b = T::of(b as f64);
    let variance = T::one() / (a + prior) + T::one() / (b + prior);
    delta / variance.sqrt()
}

/// `ln((friends + 1) / (followers + 1))`.
pub fn friend_follower_ratio<T: Scalar>(friends: u64, followers: u64) -> T {
    raw_log_odds(friends, followers)
}

/// A phrase's standing between two groups of users.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryContrast<T> {
    pub phrase: String,
    pub count_a: u64,
    pub count_b: u64,
    pub n_a: u64,
    pub n_b: u64,
    pub raw_log_odds: T,
    pub normalized_log_odds: T,
}

impl<T: Scalar> CategoryContrast<T> {
    pub fn new(
        phrase: impl Into<String>,
        count_a: u64,
        count_b: u64,
        n_a: u64,
        n_b: u64,
        prior: T,
    ) -> Self {
        CategoryContrast {
            phrase: phrase.into(),
            count_a,
            count_b,
            n_a,
            n_b,
            raw_log_odds: raw_log_odds(count_a, count_b),
            normalized_log_odds: normalized_log_odds(count_a, count_b, n_a, n_b, prior),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn raw_examples() {
        assert!((raw_log_odds::<f64>(100, 10) - 2.2172).abs() < 5e-5);
        assert!((raw_log_odds::<f64>(100, 10) - (101.0f64 / 11.0).ln()).abs() < 1e-15);
        assert_eq!(raw_log_odds::<f64>(7, 7), 0.0);
        assert!((raw_log_odds::<f64>(0, 3) + 1.3863).abs() < 5e-5);
        assert!((raw_log_odds::<f32>(100, 10) - 2.2172).abs() < 1e-4);
    }

    #[test]
    fn normalized_example() {
        let z: f64 = normalized_log_odds(10, 1, 100, 100, 1.0);
        let delta = (11.0f64 / 91.0).ln() - (2.0f64 / 100.0).ln();
        assert!((delta - 1.7991).abs() < 1e-3);
        assert!((z - 2.340).abs() < 5e-4, "{z}");
        assert_eq!(normalized_log_odds::<f64>(5, 5, 80, 80, 0.01), 0.0);
    }

    #[test]
    fn more_evidence_more_extreme() {
        for n in [1_000u64, 10_000, 1_000_000] {
            let strong: f64 = normalized_log_odds(100, 10, n, n, 0.01);
            let weak: f64 = normalized_log_odds(10, 1, n, n, 0.01);
            assert!(strong.abs() > weak.abs(), "n={n}: {strong} vs {weak}");
        }
    }

    #[test]
    fn friend_follower_examples() {
        assert!((friend_follower_ratio::<f64>(219, 115) - (220.0f64 / 116.0).ln()).abs() < 1e-15);
        assert!((friend_follower_ratio::<f64>(219, 115) - 0.6400).abs() < 5e-5);
        assert_eq!(friend_follower_ratio::<f64>(0, 0), 0.0);
        assert!((friend_follower_ratio::<f64>(0, 99) + 4.6052).abs() < 5e-5);
    }

    proptest! {
        #[test]
        fn raw_is_antisymmetric_and_monotone(a in 0u64..100_000, b in 0u64..100_000) {
            let ab: f64 = raw_log_odds(a, b);
            let ba: f64 = raw_log_odds(b, a);
            prop_assert_eq!(ab.signum() * (ab != 0.0) as i32 as f64, -ba.signum() * (ba != 0.0) as i32 as f64);
            prop_assert!((ab + ba).abs() <= 1e-12);
            prop_assert!(raw_log_odds::<f64>(a + 1, b) > ab);
            prop_assert!(raw_log_odds::<f64>(a, b + 1) < ab);
        }

        #[test]
        fn normalized_is_antisymmetric(
            a in 0u64..1000, b in 0u64..1000, ea in 0u64..5000, eb in 0u64..5000,
            prior in 0.001f64..5.0,
        ) {
            let z: f64 = normalized_log_odds(a, b, a + ea, b + eb, prior);
            let swapped: f64 = normalized_log_odds(b, a, b + eb, a + ea, prior);
            prop_assert!((z + swapped).abs() <= 1e-12 * (1.0 + z.abs()));
            prop_assert!(z.is_finite());
        }
    }
}
