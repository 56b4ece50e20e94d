//! Closed-form bounds and the searches for the thresholds `n0` and `l0`.
//!
//! Every infinite series is returned as a partial sum plus a certified
//! upper bound on its tail, with the tail at most [`TAIL_TOLERANCE`] of the
//! partial sum.

mod table;

pub use table::{BoundsRow, BoundsTable};

use serde::Serialize;

use crate::environment::{MomentFunctions, Phi, RadiusDistribution};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::numeric::CompensatedSum;

pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Default limit on the number of series terms.
pub const DEFAULT_CUTOFF: u64 = 1 << 22;
/// Minimum `P(l0 <= X <= 2 l0)` for an admissible `l0`.
pub const MIN_L0_MASS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    /// Certified upper bound on the full value.
    pub value: f64,
    /// Sum of the evaluated terms (a lower bound).
    pub partial: f64,
    /// Bound on the contribution of the unevaluated terms.
    pub tail: f64,
    /// First index left to the tail bound.
    pub cutoff: u64,
}

fn check_rate(name: &str, c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be positive, got {c}")))
    }
}

/// `|L_n| <= e^{c_G g(2n)}`.
pub fn layer_size_bound(n: u64, mf: &MomentFunctions, c_g: f64) -> f64 {
    (c_g * mf.g(2 * n) as f64).exp()
}

/// `(sum_{n >= ceil(n0 / 2)} e^{-c n + c_G g(2n)})^2`, the bound on
/// `P_p(W+ <-> W-)` for the overlap cones.
///
/// Tail certificate: pick `N` with `a = g(2N)`, `c_G a <= c N / 2` and
/// `f(a + 1) >= 4 c_G / c`. For `n >= N` either `g(2n) = a` or
/// `g(2n) <= 2n / f(a + 1)`, and both give `c_G g(2n) <= c n / 2`, so the
/// terms are dominated by `e^{-c n / 2}`.
pub fn entropy_series(
    n0: u64,
    c: f64,
    c_g: f64,
    mf: &MomentFunctions,
    cutoff: u64,
) -> Result<SeriesValue> {
    check_rate("decay rate", c)?;
    check_rate("growth constant", c_g)?;
    let m0 = n0.div_ceil(2);
    let no_cert = |why: String| Error::NoTailCertificate(why);
    let certified = |n: u64| -> Option<bool> {
        let a = mf.try_g(n.checked_mul(2)?)?;
        if a + 1 > mf.domain() {
            return None;
        }
        Some(c_g * a as f64 <= c * n as f64 / 2.0 && mf.f(a + 1) as f64 >= 4.0 * c_g / c)
    };
    let mut big_n = m0.max(1);
    loop {
        match certified(big_n) {
            Some(true) => break,
            Some(false) if big_n <= cutoff => big_n = big_n.saturating_mul(2),
            _ => {
                return Err(no_cert(format!(
                    "g(2n)/(2n) did not drop below c/(4 c_G) = {} before the cutoff",
                    c / (4.0 * c_g)
                )))
            }
        }
    }
    let ratio = (-c / 2.0).exp();
    let tail_from = |m: u64| (-c * m as f64 / 2.0).exp() / (1.0 - ratio);
    let mut partial = CompensatedSum::new();
    let mut n = m0;
    loop {
        if n >= big_n {
            let tail = tail_from(n);
            if tail <= TAIL_TOLERANCE * partial.value() {
                let p = partial.value();
                let inner = p + tail;
                return Ok(SeriesValue {
                    value: inner * inner,
                    partial: p * p,
                    tail: inner * inner - p * p,
                    cutoff: n,
                });
            }
        }
        if n > cutoff {
            return Err(no_cert(format!("tail still above tolerance at n = {n}")));
        }
        let g = mf
            .try_g(2 * n)
            .ok_or_else(|| no_cert(format!("g(2 * {n}) lies past the tabulated domain")))?;
        partial.add((c_g * g as f64 - c * n as f64).exp());
        n += 1;
    }
}

/// Smallest `n0` such that the overlap cones are defined (`2 g(n) < n` for
/// `n >= n0`) and `entropy_series(n0) <= target`.
pub fn find_n0(
    c: f64,
    c_g: f64,
    mf: &MomentFunctions,
    target: f64,
    cutoff: u64,
) -> Result<(u64, SeriesValue)> {
    let start = mf.half_growth_start().ok_or_else(|| {
        Error::NoAdmissible("g(n) < n/2 cannot be certified on the tabulated domain".into())
    })?;
    let ok = |n0: u64| -> Result<Option<SeriesValue>> {
        let v = entropy_series(n0, c, c_g, mf, cutoff)?;
        Ok((v.value <= target).then_some(v))
    };
    if let Some(v) = ok(start)? {
        return Ok((start, v));
    }
    // the series is nonincreasing in n0: gallop, then bisect
    let (mut lo, mut hi) = (start, start.max(1));
    let found = loop {
        hi = hi.checked_mul(2).ok_or_else(|| Error::NoAdmissible("n0 overflow".into()))?;
        if hi > cutoff {
            return Err(Error::NoAdmissible(format!(
                "entropy series stays above {target} up to n0 = {cutoff}"
            )));
        }
        match ok(hi)? {
            Some(v) => break v,
            None => lo = hi,
        }
    };
    let mut best = (hi, found);
    while best.0 - lo > 1 {
        let mid = lo + (best.0 - lo) / 2;
        match ok(mid)? {
            Some(v) => best = (mid, v),
            None => lo = mid,
        }
    }
    Ok(best)
}

/// An integer inverse `y -> r(y)` together with an exponent `alpha` that
/// certifies `|B_G(r(y))| <= e^{alpha y}`.
pub trait InverseGrowth {
    fn inverse_int(&self, y: u64) -> u64;
    fn growth_exponent(&self) -> f64;
}

impl InverseGrowth for Phi {
    fn inverse_int(&self, y: u64) -> u64 {
        Phi::inverse_int(self, y)
    }

    /// `phi(r) <= y` means `ln |B(r)| <= alpha y`.
    fn growth_exponent(&self) -> f64 {
        self.alpha()
    }
}

/// `sum_{n >= 1} |B_G(phi^{-1}(n + L))| e^{-c n}`, with tail dominated by
/// `e^{alpha L} e^{-(c - alpha) n}`.
pub fn stack_series<P: InverseGrowth>(
    profile: &P,
    c: f64,
    level_floor: u64,
    spec: &GraphSpec,
    cutoff: u64,
) -> Result<SeriesValue> {
    check_rate("decay rate", c)?;
    let alpha = profile.growth_exponent();
    let gap = c - alpha;
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::NoTailCertificate(format!(
            "need c > alpha for a geometric tail, got c = {c}, alpha = {alpha}"
        )));
    }
    let ratio = (-gap).exp();
    let tail_from = |m: u64| (alpha * level_floor as f64 - gap * m as f64).exp() / (1.0 - ratio);
    let mut partial = CompensatedSum::new();
    let mut n = 1u64;
    loop {
        let tail = tail_from(n);
        if n > 1 && tail <= TAIL_TOLERANCE * partial.value() {
            let p = partial.value();
            return Ok(SeriesValue {
                value: p + tail,
                partial: p,
                tail,
                cutoff: n,
            });
        }
        if n > cutoff {
            return Err(Error::NoTailCertificate(format!(
                "tail still above tolerance at n = {n}"
            )));
        }
        let r = profile.inverse_int(n + level_floor);
        let ln_ball = (spec.ball_count(r) as f64).ln();
        partial.add((ln_ball - c * n as f64).exp());
        n += 1;
    }
}

/// `(1/2) (1 - q)^edges`: the probability lower bound obtained by closing
/// `edges` reinforced edges.
pub fn disconnection_lower_bound(q: f64, edges: u128) -> Result<f64> {
    Ok(ln_disconnection_lower_bound(q, edges)?.exp())
}

/// Natural log of [`disconnection_lower_bound`], which underflows for
/// realistic edge counts.
pub fn ln_disconnection_lower_bound(q: f64, edges: u128) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidProbability { name: "q", value: q });
    }
    if edges == 0 {
        return Err(Error::Precondition("edge count must be at least 1".into()));
    }
    Ok(-std::f64::consts::LN_2 + edges as f64 * (1.0 - q).ln())
}

/// Edge count of the central box `B_G(g(2 n0)) x [-n0, n0]`.
pub fn central_box_edges(spec: &GraphSpec, mf: &MomentFunctions, n0: u64) -> u128 {
    spec.count_box_edges(mf.g(2 * n0), n0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L0Choice {
    pub l0: u64,
    /// `e^{-2 c l0} S^2` at the chosen `l0`.
    pub product: f64,
    pub series: SeriesValue,
    /// `P(l0 <= X <= 2 l0)`.
    pub mass: f64,
}

/// Smallest `l0` with `P(l0 <= X <= 2 l0) >= MIN_L0_MASS` and
/// `e^{-2 c l0} S^2 <= 1/2`, where `S` is the stack series.
pub fn find_l0(
    dist: &RadiusDistribution,
    phi: &Phi,
    c: f64,
    spec: &GraphSpec,
    level_floor: u64,
    cutoff: u64,
) -> Result<L0Choice> {
    let series = stack_series(phi, c, level_floor, spec, cutoff)?;
    let s2 = series.value * series.value;
    let mut m = dist.min_support().div_ceil(2).max(1);
    loop {
        if dist.tail(m) < MIN_L0_MASS {
            return Err(Error::NoAdmissible(format!(
                "no l0 with P(l0 <= X <= 2 l0) >= {MIN_L0_MASS} satisfies the series condition"
            )));
        }
        let mass = dist.prob_between(m, 2 * m);
        let product = (-2.0 * c * m as f64).exp() * s2;
        if mass >= MIN_L0_MASS && product <= 0.5 {
            return Ok(L0Choice {
                l0: m,
                product,
                series,
                mass,
            });
        }
        m += 1;
    }
}
