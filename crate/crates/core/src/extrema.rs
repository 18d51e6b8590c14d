//! Local extrema of sampled curves, filtered by topographic prominence.

use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

impl ExtremumKind {
    pub fn opposite(self) -> Self {
        match self {
            ExtremumKind::Max => ExtremumKind::Min,
            ExtremumKind::Min => ExtremumKind::Max,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    /// Parabolic estimate of the location.
    pub t: f64,
    /// Parabolic estimate of the value.
    pub value: f64,
    pub kind: ExtremumKind,
    /// Grid index of the sampled extremum.
    pub index: usize,
    pub prominence: f64,
}

/// Interior strict local extrema of `series` sampled on uniform `times`,
/// kept when their prominence is at least `min_prominence`, sorted by time.
pub fn extrema_locator(times: &[f64], series: &[f64], min_prominence: f64) -> Vec<Extremum> {
    let n = series.len().min(times.len());
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    for i in 1..n - 1 {
        let (a, b, c) = (series[i - 1], series[i], series[i + 1]);
        let kind = if b > a && b > c {
            ExtremumKind::Max
        } else if b < a && b < c {
            ExtremumKind::Min
        } else {
            continue;
        };
        let prominence = prominence(&series[..n], i, kind);
        if prominence < min_prominence {
            continue;
        }
        let curvature = a - 2.0 * b + c;
        let offset = if curvature != 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
        out.push(Extremum {
            t: times[i] + offset * h,
            value: b - 0.25 * (a - c) * offset,
            kind,
            index: i,
            prominence,
        });
    }
    out
}

/// Which kinds count as a match when pairing two sets of extrema.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindRelation {
    Same,
    Opposite,
    Any,
}

impl KindRelation {
    fn admits(self, a: ExtremumKind, b: ExtremumKind) -> bool {
        match self {
            KindRelation::Same => a == b,
            KindRelation::Opposite => a != b,
            KindRelation::Any => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KindRelation::Same => "same",
            KindRelation::Opposite => "opposite",
            KindRelation::Any => "any",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    pub source: Extremum,
    /// Nearest admissible target by grid index.
    pub partner: Option<Extremum>,
    /// Index distance to `partner`.
    pub offset: Option<usize>,
    /// `offset <= tolerance`.
    pub matched: bool,
}

/// Pairs every source extremum with the nearest target of an admissible
/// kind; both sets must index the same grid.
pub fn pair_extrema(
    sources: &[Extremum],
    targets: &[Extremum],
    relation: KindRelation,
    tolerance: usize,
) -> Vec<Pairing> {
    sources
        .iter()
        .map(|s| {
            let partner = targets
                .iter()
                .filter(|t| relation.admits(s.kind, t.kind))
                .min_by_key(|t| t.index.abs_diff(s.index))
                .copied();
            let offset = partner.map(|p| p.index.abs_diff(s.index));
            Pairing { source: *s, partner, offset, matched: offset.is_some_and(|o| o <= tolerance) }
        })
        .collect()
}

/// Height of a peak above the higher of the two lowest points reachable on
/// either side before the curve climbs above the peak (depth for minima).
fn prominence(series: &[f64], i: usize, kind: ExtremumKind) -> f64 {
    let sign = match kind {
        ExtremumKind::Max => 1.0,
        ExtremumKind::Min => -1.0,
    };
    let peak = sign * series[i];
    let base = |range: &mut dyn Iterator<Item = usize>| {
        let mut lowest = peak;
        for j in range {
            let v = sign * series[j];
            if v > peak {
                break;
            }
            lowest = lowest.min(v);
        }
        lowest
    };
    let left = base(&mut (0..i).rev());
    let right = base(&mut (i + 1..series.len()));
    peak - left.max(right)
}
