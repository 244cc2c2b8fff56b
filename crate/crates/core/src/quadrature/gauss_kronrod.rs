//! Adaptive bisection driven by the Gauss-Kronrod 7/15 pair.

use super::{IntegralResult, QuadratureSpec};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Kronrod-15 abscissae on [-1, 1], positive half, outermost first; the last
// entry is the center. Odd indices carry the embedded Gauss-7 nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Interval {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    id: u64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error.to_bits() == other.error.to_bits() && self.id == other.id
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    // Max-heap on error; older region first on ties so the pop order is
    // reproducible.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// One K15/G7 application on `[lo, hi]` with the QUADPACK error scaling.
fn eval(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [(0.0f64, 0.0f64); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j].0 - reskh).abs() + (fv[j].1 - reskh).abs());
    }
    resasc *= half.abs();
    resabs *= half.abs();

    let value = resk * half;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    // Rounding floor: never claim less error than 50 ulp of the L1 mass.
    err = err.max(50.0 * f64::EPSILON * resabs);
    (value, err)
}

pub(super) fn adaptive(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, spec: &QuadratureSpec) -> IntegralResult {
    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Interval> = Vec::new();
    let mut next_id = 0u64;
    let mut evaluations = 15u64;
    let (v, e) = eval(f, lo, hi);
    let mut total_value = v;
    let mut total_error = e;
    heap.push(Interval { lo, hi, value: v, error: e, id: next_id });

    let mut splits = 0usize;
    while total_error > spec.tolerance_for(total_value) && splits < spec.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) || worst.error == 0.0 {
            // Interval is at machine resolution (or exact); set it aside so the
            // loop cannot spin on it.
            finished.push(worst);
            continue;
        }
        let (v1, e1) = eval(f, worst.lo, mid);
        let (v2, e2) = eval(f, mid, worst.hi);
        evaluations += 30;
        splits += 1;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        next_id += 1;
        heap.push(Interval { lo: worst.lo, hi: mid, value: v1, error: e1, id: next_id });
        next_id += 1;
        heap.push(Interval { lo: mid, hi: worst.hi, value: v2, error: e2, id: next_id });
    }

    // Resum in creation order: deterministic and cheaper in rounding than the
    // incrementally updated totals.
    let mut all: Vec<Interval> = heap.into_vec();
    all.extend(finished);
    all.sort_by_key(|r| r.id);
    let value: f64 = all.iter().map(|r| r.value).sum();
    let error_estimate: f64 = all.iter().map(|r| r.error).sum();

    IntegralResult {
        value,
        error_estimate,
        evaluations,
        converged: error_estimate <= spec.tolerance_for(value),
    }
}
