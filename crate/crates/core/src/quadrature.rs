//! Time averages over sampled trajectories.
//!
//! Integrals are accumulated per subinterval so every prefix `∫₀^{t_k}` is
//! available after one pass. For Simpson the two halves of each panel get
//! the weights `h/12 (5, 8, −1)` and `h/12 (−1, 8, 5)`, which add up to the
//! composite rule at even nodes. Subintervals close to a non-smooth point
//! of the integrand can be recomputed by adaptive Simpson on the exact
//! integrand.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadScheme {
    Simpson,
    Trapezoid,
}

impl QuadScheme {
    pub fn name(self) -> &'static str {
        match self {
            QuadScheme::Simpson => "simpson",
            QuadScheme::Trapezoid => "trapezoid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Subinterval count for single-`τ` evaluations.
    pub n: usize,
    pub scheme: QuadScheme,
    /// Half-width around zeros of `G` inside which singular integrands are
    /// dropped. Zero drops only samples that sit on a zero.
    pub singular_guard: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n: 2000, scheme: QuadScheme::Simpson, singular_guard: 0.0 }
    }
}

impl QuadratureSpec {
    pub fn new(n: usize, scheme: QuadScheme, singular_guard: f64) -> Result<Self> {
        let q = QuadratureSpec { n, scheme, singular_guard };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::GridDegenerate);
        }
        if self.scheme == QuadScheme::Simpson && self.n % 2 != 0 {
            return Err(Error::OddSubintervals(self.n));
        }
        if !(self.singular_guard >= 0.0) {
            return Err(Error::InvalidParams("singular_guard must be >= 0"));
        }
        Ok(())
    }
}

/// Integral over each subinterval of a uniform grid with spacing `h`.
pub fn interval_integrals(values: &[f64], h: f64, scheme: QuadScheme) -> Result<Vec<f64>> {
    let n = values.len().saturating_sub(1);
    if n < 1 || !(h > 0.0) {
        return Err(Error::GridDegenerate);
    }
    match scheme {
        QuadScheme::Trapezoid => Ok(values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).collect()),
        QuadScheme::Simpson => {
            if n % 2 != 0 {
                return Err(Error::OddSubintervals(n));
            }
            let c = h / 12.0;
            let mut out = Vec::with_capacity(n);
            for p in values.windows(3).step_by(2) {
                out.push(c * (5.0 * p[0] + 8.0 * p[1] - p[2]));
                out.push(c * (-p[0] + 8.0 * p[1] + 5.0 * p[2]));
            }
            Ok(out)
        }
    }
}

/// Running sums of per-interval integrals, starting at 0.
pub fn prefix_sums(intervals: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(intervals.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for &x in intervals {
        acc += x;
        out.push(acc);
    }
    out
}

/// `∫₀^{t_k} f` for every node `k`.
pub fn cumulative_integral(values: &[f64], h: f64, scheme: QuadScheme) -> Result<Vec<f64>> {
    Ok(prefix_sums(&interval_integrals(values, h, scheme)?))
}

/// Composite rule over the whole grid.
pub fn integrate_samples(values: &[f64], h: f64, scheme: QuadScheme) -> Result<f64> {
    Ok(interval_integrals(values, h, scheme)?.iter().sum())
}

/// Upper bound on the number of panels in one adaptive integration.
const MAX_PANELS: usize = 4000;

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    flm: f64,
    frm: f64,
    /// Richardson-corrected two-panel Simpson value.
    value: f64,
    error: f64,
}

impl Panel {
    fn new(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Self {
        let m = 0.5 * (a + b);
        let flm = f(0.5 * (a + m));
        let frm = f(0.5 * (m + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let halves = (b - a) / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
        let delta = halves - whole;
        Panel { a, b, fa, fm, fb, flm, frm, value: halves + delta / 15.0, error: delta.abs() / 15.0 }
    }

    fn split(&self, f: &impl Fn(f64) -> f64) -> [Panel; 2] {
        let m = 0.5 * (self.a + self.b);
        [
            Panel::new(f, self.a, m, self.fa, self.flm, self.fm),
            Panel::new(f, m, self.b, self.fm, self.frm, self.fb),
        ]
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Simpson: the panel with the largest error estimate is
/// bisected until the summed estimate drops below `tol` (absolute) or the
/// panel budget is spent. Integrands carrying roundoff noise therefore cost
/// a bounded number of evaluations.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let first = Panel::new(f, a, b, f(a), f(0.5 * (a + b)), f(b));
    let mut total_error = first.error;
    let mut heap = alloc::collections::BinaryHeap::new();
    heap.push(first);
    while total_error > tol && heap.len() < MAX_PANELS {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let [l, r] = worst.split(f);
        total_error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().map(|p| p.value).sum()
}

/// Where and how hard to refine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement {
    /// Subintervals within this many grid spacings of a breakpoint are redone.
    pub reach: usize,
    /// Absolute tolerance per refined subinterval.
    pub tol: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement { reach: 16, tol: 1e-14 }
    }
}

/// Replaces `intervals[j]` near each breakpoint by an adaptive integral of
/// `f`, splitting the subinterval at any breakpoint inside it.
pub fn refine_intervals(
    intervals: &mut [f64],
    times: &[f64],
    f: &impl Fn(f64) -> f64,
    breakpoints: &[f64],
    cfg: &Refinement,
) {
    let n = intervals.len();
    if n == 0 || times.len() != n + 1 {
        return;
    }
    let h = (times[n] - times[0]) / n as f64;
    let mut marked = alloc::vec![false; n];
    for &b in breakpoints {
        let centre = ((b - times[0]) / h).floor();
        if !centre.is_finite() {
            continue;
        }
        let lo = centre - cfg.reach as f64;
        let hi = centre + cfg.reach as f64;
        if hi < 0.0 || lo > (n - 1) as f64 {
            continue;
        }
        let lo = lo.max(0.0) as usize;
        let hi = (hi.min((n - 1) as f64)) as usize;
        for m in &mut marked[lo..=hi] {
            *m = true;
        }
    }
    for (j, _) in marked.iter().enumerate().filter(|(_, &m)| m) {
        let (a, b) = (times[j], times[j + 1]);
        let mut acc = 0.0;
        let mut left = a;
        for &p in breakpoints.iter().filter(|&&p| p > a && p < b) {
            acc += adaptive_simpson(f, left, p, cfg.tol);
            left = p;
        }
        acc += adaptive_simpson(f, left, b, cfg.tol);
        intervals[j] = acc;
    }
}
