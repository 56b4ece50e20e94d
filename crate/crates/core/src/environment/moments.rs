use super::RadiusDistribution;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Default extent of the tabulated `f`.
pub const DEFAULT_DOMAIN: u64 = 1 << 20;

/// A computable pair `(f, g)`: `f` nondecreasing and unbounded with
/// `E[X f(X)] < ∞`, and `g(n) = max{x : x f(x) <= n}`.
///
/// `f` is built from block thresholds `a_0 = 0` and
/// `a_{k+1} = max(a_k + 1, min{a : E[X 1{X >= a}] <= 2^-(k+1) E X})`, with
/// `f(x) = k` on `[a_k, a_{k+1})`. Then
/// `E[X f(X)] <= sum_k k 2^-k E X = 2 E X`. Forcing the thresholds apart
/// keeps `f` finite beyond a bounded support.
#[derive(Debug, Clone)]
pub struct MomentFunctions {
    /// `f(x)` for `x = 0..=domain`.
    f: Vec<u32>,
}

impl MomentFunctions {
    pub fn new(dist: &RadiusDistribution) -> Result<Self> {
        Self::with_domain(dist, DEFAULT_DOMAIN)
    }

    pub fn with_domain(dist: &RadiusDistribution, domain: u64) -> Result<Self> {
        if !dist.mean_is_finite() {
            return Err(Error::InfiniteMean(format!("{} has E X = ∞", dist.law())));
        }
        let ln_mean = dist.mean().ln();
        let mut f = Vec::with_capacity(domain as usize + 1);
        f.push(0u32);
        for x in 1..=domain {
            let ln_m = dist.ln_partial_moment(x);
            // largest k with E[X 1{X >= x}] <= 2^-k E X
            let raw = if ln_m == f64::NEG_INFINITY {
                u32::MAX
            } else {
                let k = ((ln_mean - ln_m) / std::f64::consts::LN_2 + 1e-12).floor();
                k.clamp(0.0, u32::MAX as f64) as u32
            };
            let prev = f[x as usize - 1];
            f.push(raw.min(prev + 1));
        }
        Ok(Self { f })
    }

    /// Wraps an explicit table `f(0), f(1), ...`, which must be nondecreasing.
    pub fn from_values(f: Vec<u32>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::Precondition("f table is empty".into()));
        }
        if f.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Precondition("f must be nondecreasing".into()));
        }
        Ok(Self { f })
    }

    /// Largest argument at which `f` is tabulated.
    pub fn domain(&self) -> u64 {
        self.f.len() as u64 - 1
    }

    /// `f(x)`; saturates at the last tabulated value beyond the domain.
    pub fn f(&self, x: u64) -> u64 {
        let i = (x as usize).min(self.f.len() - 1);
        self.f[i] as u64
    }

    fn xf(&self, x: u64) -> u128 {
        x as u128 * self.f(x) as u128
    }

    /// `g(n) = max{x : x f(x) <= n}`, or `None` when the answer lies past
    /// the tabulated domain.
    pub fn try_g(&self, n: u64) -> Option<u64> {
        let dom = self.domain();
        if self.xf(dom) <= n as u128 {
            return None;
        }
        // x f(x) is nondecreasing; find the last x with x f(x) <= n
        let (mut lo, mut hi) = (0u64, dom);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.xf(mid) <= n as u128 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// `g(n)`, saturating at the domain.
    pub fn g(&self, n: u64) -> u64 {
        self.try_g(n).unwrap_or(self.domain())
    }

    /// Smallest `n0` with `2 g(n) < n` for every `n >= n0`, or `None` if the
    /// tabulated domain cannot certify it.
    ///
    /// Past `N` with `f(g(N) + 1) >= 3` and `2 g(N) < N`, every `n >= N` has
    /// either `g(n) = g(N)` or `g(n) <= n / 3`, so only `n < N` needs a scan.
    pub fn half_growth_start(&self) -> Option<u64> {
        let dom = self.domain();
        let mut big_n = 1u64;
        loop {
            let a = self.try_g(big_n)?;
            if a + 1 > dom {
                return None;
            }
            if self.f(a + 1) >= 3 && 2 * a < big_n {
                break;
            }
            big_n = big_n.checked_mul(2)?;
        }
        let mut n0 = big_n;
        while n0 > 1 && 2 * self.g(n0 - 1) < n0 - 1 {
            n0 -= 1;
        }
        Some(n0)
    }

    /// `sum_{x <= upto} x f(x) P(X = x)`.
    pub fn partial_expectation(&self, dist: &RadiusDistribution, upto: u64) -> f64 {
        (1..=upto.min(self.domain()))
            .map(|x| x as f64 * self.f(x) as f64 * dist.pmf(x))
            .collect::<CompensatedSum>()
            .value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_mean_rejected() {
        let d = RadiusDistribution::power_tail(2.0, 1000).unwrap();
        assert!(matches!(MomentFunctions::new(&d), Err(Error::InfiniteMean(_))));
    }

    #[test]
    fn f_is_nondecreasing_and_grows() {
        for d in [
            RadiusDistribution::constant(3).unwrap(),
            RadiusDistribution::geometric(0.5).unwrap(),
            RadiusDistribution::power_tail(2.5, 100_000).unwrap(),
        ] {
            let mf = MomentFunctions::with_domain(&d, 1 << 16).unwrap();
            let mut prev = 0;
            for x in 0..=mf.domain() {
                let v = mf.f(x);
                assert!(v >= prev && v <= prev + 1);
                prev = v;
            }
            assert!(prev >= 10, "{:?}: f(domain) = {prev}", d.law());
        }
    }

    #[test]
    fn constant_law_thresholds() {
        // E[X 1{X >= a}] = 3 for a <= 3 and 0 beyond: f = 0 up to 3, then x - 3
        let d = RadiusDistribution::constant(3).unwrap();
        let mf = MomentFunctions::with_domain(&d, 100).unwrap();
        assert_eq!((0..=6).map(|x| mf.f(x)).collect::<Vec<_>>(), [0, 0, 0, 0, 1, 2, 3]);
        // g(n) = max{x : x (x - 3)^+ <= n}
        assert_eq!(mf.g(0), 3);
        assert_eq!(mf.g(4), 4);
        assert_eq!(mf.g(10), 5);
    }

    #[test]
    fn geometric_thresholds_match_definition() {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        let mf = MomentFunctions::with_domain(&d, 200).unwrap();
        // a_k = max(a_{k-1} + 1, min{a : E[X 1{X >= a}] <= 2^-k E X}) by direct scan
        let mut a_k = 0u64;
        for k in 1..20u64 {
            let target = d.mean() / 2f64.powi(k as i32);
            let raw = (1..).find(|&a| d.partial_moment(a) <= target * (1.0 + 1e-9)).unwrap();
            a_k = raw.max(a_k + 1);
            assert!(mf.f(a_k) >= k, "k={k} a_k={a_k}");
            assert!(mf.f(a_k - 1) < k, "k={k} a_k={a_k}");
        }
    }

    #[test]
    fn half_growth_start_matches_scan() {
        for d in [
            RadiusDistribution::geometric(0.5).unwrap(),
            RadiusDistribution::geometric(0.2).unwrap(),
            RadiusDistribution::constant(4).unwrap(),
        ] {
            let mf = MomentFunctions::with_domain(&d, 1 << 16).unwrap();
            let n0 = mf.half_growth_start().unwrap();
            assert!((n0..20_000).all(|n| 2 * mf.g(n) < n));
            if n0 > 1 {
                assert!(2 * mf.g(n0 - 1) >= n0 - 1);
            }
        }
    }

    #[test]
    fn g_inverts_x_f_x() {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        let mf = MomentFunctions::with_domain(&d, 4096).unwrap();
        for n in [0u64, 1, 5, 17, 100, 1000, 12345] {
            let g = mf.g(n);
            assert!(g as u128 * mf.f(g) as u128 <= n as u128);
            assert!((g + 1) as u128 * mf.f(g + 1) as u128 > n as u128);
        }
    }
}
