use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative tolerance on grid spacing and grid membership.
const GRID_TOL: f64 = 1e-9;

/// Instantaneous and average charging power along a sampled ergotropy curve.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    pub times: Vec<f64>,
    pub w_series: Vec<f64>,
    /// `dW/dt`; positive while charging.
    pub p_inst: Vec<f64>,
    /// `(W(t) − W(t₀))/(t − t₀)`, `None` for `t ≤ t₀`.
    pub p_avg: Vec<Option<f64>>,
}

/// Central differences in the interior, second-order one-sided differences
/// at both ends.
pub fn power_series(times: &[f64], w: &[f64], t0: f64) -> Result<PowerSeries> {
    let n = times.len();
    if n < 3 || w.len() != n {
        return Err(Error::GridDegenerate);
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::GridDegenerate);
    }
    for (k, &t) in times.iter().enumerate() {
        if (t - (times[0] + k as f64 * h)).abs() > GRID_TOL * h.max(t.abs()) {
            return Err(Error::NonUniformGrid);
        }
    }
    let k0 = ((t0 - times[0]) / h).round();
    if !(k0 >= 0.0 && k0 < n as f64) || (times[k0 as usize] - t0).abs() > GRID_TOL * h {
        return Err(Error::OffGrid(t0));
    }
    let k0 = k0 as usize;

    let mut p_inst = Vec::with_capacity(n);
    p_inst.push((-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h));
    for k in 1..n - 1 {
        p_inst.push((w[k + 1] - w[k - 1]) / (2.0 * h));
    }
    p_inst.push((3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h));

    let p_avg = (0..n)
        .map(|k| (k > k0).then(|| (w[k] - w[k0]) / (times[k] - times[k0])))
        .collect();

    Ok(PowerSeries { times: times.to_vec(), w_series: w.to_vec(), p_inst, p_avg })
}
