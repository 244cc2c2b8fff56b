//! Ladder studies: rows of (control parameter, value, error) plus Richardson
//! extrapolation for parameter sequences that halve geometrically.

/// One rung of a convergence study.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceRow {
    pub param: f64,
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
}

/// Result rows in the order they were computed, coarsest parameter first,
/// with the extrapolated limit when one is defensible. `param` of the limit
/// row is 0 (the ladder's target).
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub extrapolated: Option<ConvergenceRow>,
    /// False when the rung differences do not shrink monotonically with a
    /// consistent sign, i.e. when the extrapolated row should be distrusted.
    pub stable: bool,
    /// Observed convergence order used for the extrapolation, when estimated.
    pub order: Option<f64>,
}

impl ConvergenceReport {
    /// CSV with the stable header `param,value,error,evals`; the limit row,
    /// if any, is emitted last with param 0. Rust float formatting is
    /// locale-independent, so the output is byte-reproducible.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,value,error,evals\n");
        for row in self.rows.iter().chain(self.extrapolated.iter()) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.param, row.value, row.error, row.evaluations
            ));
        }
        out
    }
}

/// Richardson-extrapolates a ratio-2 ladder (each row's `param` half the
/// previous). With three or more rungs the convergence order is estimated
/// from the last three values and clamped to `[0.25, 4]`; with two rungs
/// first order is assumed. The returned error combines the applied
/// correction (taken at full size, not discounted) with the propagated
/// per-rung quadrature errors, so it stays honest when the ladder is short.
pub fn richardson(rows: &[ConvergenceRow]) -> ConvergenceReport {
    let n = rows.len();
    if n < 2 {
        return ConvergenceReport {
            rows: rows.to_vec(),
            extrapolated: None,
            stable: false,
            order: None,
        };
    }
    let d_last = rows[n - 1].value - rows[n - 2].value;
    let mut stable = true;
    let mut order = 1.0;
    if n >= 3 {
        let d_prev = rows[n - 2].value - rows[n - 3].value;
        let noise = rows[n - 1].error + 2.0 * rows[n - 2].error + rows[n - 3].error;
        if d_prev.signum() != d_last.signum() || d_last.abs() >= d_prev.abs() {
            // Differences stopped shrinking beyond what quadrature noise
            // explains: keep order 1 and flag it.
            stable = d_last.abs() <= noise;
        } else {
            order = (d_prev.abs() / d_last.abs()).log2().clamp(0.25, 4.0);
        }
    }
    let gain = 2f64.powf(order) - 1.0;
    let correction = d_last / gain;
    let limit = rows[n - 1].value + correction;
    let quad = rows[n - 1].error * (1.0 + 1.0 / gain) + rows[n - 2].error / gain;
    ConvergenceReport {
        rows: rows.to_vec(),
        extrapolated: Some(ConvergenceRow {
            param: 0.0,
            value: limit,
            error: correction.abs() + quad,
            evaluations: rows.iter().map(|r| r.evaluations).sum(),
        }),
        stable,
        order: Some(order),
    }
}
