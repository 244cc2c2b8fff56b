//! Genz-Malik degree-7 cubature with its embedded degree-5 companion, for
//! boxes of two to four dimensions.
//!
//! Per region the rule samples the center, two star distances per axis, all
//! diagonal pairs at the outer star distance, and the corners; the degree-5
//! rule reuses everything but the corners. The axis whose fourth divided
//! difference is largest is bisected, which keeps refinement focused along
//! the direction that actually limits accuracy (for the half-space triplet
//! integrand that is the direction crossing the exclusion-ball surface).

use super::{IntegralResult, QuadratureSpec};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LAMBDA2: f64 = 0.358568582800318073; // sqrt(9/70)
const LAMBDA4: f64 = 0.948683298050513800; // sqrt(9/10)
const LAMBDA5: f64 = 0.688247201611685289; // sqrt(9/19)
const RATIO: f64 = (9.0 / 70.0) / (9.0 / 10.0);

#[derive(Clone, Copy)]
struct Weights {
    w: [f64; 5],
    we: [f64; 4],
}

fn weights(dim: usize) -> Weights {
    let n = dim as f64;
    Weights {
        w: [
            (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0,
            980.0 / 6561.0,
            (1820.0 - 400.0 * n) / 19683.0,
            200.0 / 19683.0,
            6859.0 / 19683.0 / 2f64.powi(dim as i32),
        ],
        we: [
            (729.0 - 950.0 * n + 50.0 * n * n) / 729.0,
            245.0 / 486.0,
            (265.0 - 100.0 * n) / 1458.0,
            25.0 / 729.0,
        ],
    }
}

fn points_per_region(dim: usize) -> u64 {
    (1 + 4 * dim + 2 * dim * (dim - 1) + (1 << dim)) as u64
}

struct Region {
    center: [f64; 4],
    half: [f64; 4],
    value: f64,
    error: f64,
    split_dim: usize,
    id: u64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.error.to_bits() == other.error.to_bits() && self.id == other.id
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Applies the rule pair on one region: returns (value, error, split axis).
fn eval(
    f: &impl Fn(&[f64]) -> f64,
    dim: usize,
    wts: &Weights,
    center: &[f64; 4],
    half: &[f64; 4],
) -> (f64, f64, usize) {
    let mut x = *center;
    let fc = f(&x[..dim]);

    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut divdiff = [0.0f64; 4];
    for i in 0..dim {
        let c = center[i];
        x[i] = c - LAMBDA2 * half[i];
        let f2m = f(&x[..dim]);
        x[i] = c + LAMBDA2 * half[i];
        let f2p = f(&x[..dim]);
        x[i] = c - LAMBDA4 * half[i];
        let f4m = f(&x[..dim]);
        x[i] = c + LAMBDA4 * half[i];
        let f4p = f(&x[..dim]);
        x[i] = c;
        sum2 += f2m + f2p;
        sum3 += f4m + f4p;
        divdiff[i] = (f2m + f2p - 2.0 * fc - RATIO * (f4m + f4p - 2.0 * fc)).abs();
    }

    let mut sum4 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                x[i] = center[i] + si * LAMBDA4 * half[i];
                x[j] = center[j] + sj * LAMBDA4 * half[j];
                sum4 += f(&x[..dim]);
            }
            x[i] = center[i];
            x[j] = center[j];
        }
    }

    let mut sum5 = 0.0;
    for corner in 0..(1usize << dim) {
        for i in 0..dim {
            let sign = if corner & (1 << i) == 0 { 1.0 } else { -1.0 };
            x[i] = center[i] + sign * LAMBDA5 * half[i];
        }
        sum5 += f(&x[..dim]);
    }

    let volume: f64 = half[..dim].iter().map(|h| 2.0 * h).product();
    let v7 = volume
        * (wts.w[0] * fc + wts.w[1] * sum2 + wts.w[2] * sum3 + wts.w[3] * sum4 + wts.w[4] * sum5);
    let v5 = volume * (wts.we[0] * fc + wts.we[1] * sum2 + wts.we[2] * sum3 + wts.we[3] * sum4);

    // Largest fourth difference picks the split axis; fall back to the widest
    // axis when the differences carry no signal.
    let mut split = 0;
    let mut best = -1.0;
    for (i, &d) in divdiff[..dim].iter().enumerate() {
        if d.is_finite() && d > best {
            best = d;
            split = i;
        }
    }
    if best <= 0.0 {
        let mut widest = 0.0;
        for (i, &h) in half[..dim].iter().enumerate() {
            if h > widest {
                widest = h;
                split = i;
            }
        }
    }

    (v7, (v7 - v5).abs(), split)
}

pub(super) fn adaptive(
    f: &impl Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> IntegralResult {
    let dim = bounds.len();
    let wts = weights(dim);
    let per_region = points_per_region(dim);

    let mut center = [0.0f64; 4];
    let mut half = [0.0f64; 4];
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        center[i] = 0.5 * (lo + hi);
        half[i] = 0.5 * (hi - lo);
    }

    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Region> = Vec::new();
    let mut next_id = 0u64;
    let mut evaluations = per_region;
    let (v, e, split_dim) = eval(f, dim, &wts, &center, &half);
    let mut total_value = v;
    let mut total_error = e;
    heap.push(Region { center, half, value: v, error: e, split_dim, id: next_id });

    let mut splits = 0usize;
    while total_error > spec.tolerance_for(total_value) && splits < spec.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let axis = worst.split_dim;
        let h = 0.5 * worst.half[axis];
        if !(h > 0.0 && h.is_finite()) || worst.error == 0.0 {
            finished.push(worst);
            continue;
        }
        let lo_center = {
            let mut c = worst.center;
            c[axis] -= h;
            c
        };
        let hi_center = {
            let mut c = worst.center;
            c[axis] += h;
            c
        };
        if lo_center[axis] == worst.center[axis] || hi_center[axis] == worst.center[axis] {
            finished.push(worst);
            continue;
        }
        let mut child_half = worst.half;
        child_half[axis] = h;
        let (v1, e1, s1) = eval(f, dim, &wts, &lo_center, &child_half);
        let (v2, e2, s2) = eval(f, dim, &wts, &hi_center, &child_half);
        evaluations += 2 * per_region;
        splits += 1;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        next_id += 1;
        heap.push(Region { center: lo_center, half: child_half, value: v1, error: e1, split_dim: s1, id: next_id });
        next_id += 1;
        heap.push(Region { center: hi_center, half: child_half, value: v2, error: e2, split_dim: s2, id: next_id });
    }

    let mut all: Vec<Region> = heap.into_vec();
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
