use serde::{Deserialize, Serialize};

use super::table::WeightTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractOptions {
    /// At most this many `q`, taken as every `⌈#Q/cap⌉`-th element of `Q`.
    pub q_sample_cap: usize,
    /// Off-tuple shifts range over `[−radius, radius]`; `None` means `⌈y/x⌉`.
    pub h_radius: Option<i64>,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions { q_sample_cap: 512, h_radius: None }
    }
}

/// Normalized weight contracts.
///
/// With `S(q, h) = Σ_p w(p, q − h p) / rowsum(p)`:
/// - row sums: spread of `rowsum(p)` across `p`;
/// - on-tuple: `S(q, h_i)` over sampled `q` and every `i`;
/// - off-tuple: `Σ_q S(q, h)` for `h ∉ {h_i}` against the mean on-tuple
///   aggregate `(1/r) Σ_i Σ_q S(q, h_i)`;
/// - point mass: `max_{p,n} w(p, n) / rowsum(p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightContractReport {
    pub kind: String,
    pub r: usize,
    pub theta: f64,
    pub level: f64,
    pub rows: usize,
    pub row_sum_min: f64,
    pub row_sum_max: f64,
    pub row_sum_ratio: f64,
    /// Coefficient of variation of the row sums.
    pub row_sum_dispersion: f64,
    pub row_sum_max_rel_error: f64,
    pub q_sampled: usize,
    /// Mean of `S(q, h_i)` per `i`.
    pub on_tuple_by_shift: Vec<f64>,
    pub on_tuple_mean: f64,
    /// Coefficient of variation of `S(q, h_i)` over all sampled `(q, i)`.
    pub on_tuple_dispersion: f64,
    pub on_tuple_scale: f64,
    /// `(h, Σ_q S(q, h))` for the off-tuple shifts.
    pub off_tuple: Vec<(i64, f64)>,
    pub off_tuple_worst_shift: Option<i64>,
    pub off_tuple_ratio: f64,
    pub max_point_mass: f64,
    pub max_point_mass_p: u64,
    /// `r · mean S(q, h_i) · 2y/x`, the empirical counterpart of `u`.
    pub u_empirical: f64,
}

pub fn weight_contract_report(w: &WeightTable, options: &ContractOptions) -> WeightContractReport {
    let part = w.partition();
    let shifts = w.tuple().shifts();
    let r = shifts.len();
    let sums: Vec<f64> = w.rows().iter().map(|row| row.sum()).collect();
    let (min, max) = sums
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    let (mean_sum, cv_sum) = mean_cv(&sums);
    let _ = mean_sum;

    let step = part.q.len().div_ceil(options.q_sample_cap.max(1)).max(1);
    let qs: Vec<i64> = part.q.iter().step_by(step).map(|&q| q as i64).collect();
    let rows: Vec<(i64, &super::WeightRow)> = w
        .rows()
        .iter()
        .filter(|row| row.sum() > 0.0)
        .map(|row| (row.p() as i64, row))
        .collect();
    let s_of = |q: i64, h: i64| -> f64 {
        rows.iter().map(|&(p, row)| row.prob(q - h * p)).sum()
    };

    let mut on_all = Vec::with_capacity(qs.len() * r);
    let mut by_shift = vec![0.0; r];
    for &q in &qs {
        for (i, &h) in shifts.iter().enumerate() {
            let v = s_of(q, h);
            by_shift[i] += v;
            on_all.push(v);
        }
    }
    let nq = qs.len().max(1) as f64;
    let on_scale = by_shift.iter().sum::<f64>() / r as f64;
    for v in &mut by_shift {
        *v /= nq;
    }
    let (on_mean, on_cv) = mean_cv(&on_all);

    let radius = options
        .h_radius
        .unwrap_or_else(|| (part.y as f64 / part.x as f64).ceil() as i64);
    let off: Vec<(i64, f64)> = (-radius..=radius)
        .filter(|h| !w.tuple().contains(*h))
        .map(|h| (h, qs.iter().map(|&q| s_of(q, h)).sum()))
        .collect();
    let worst = off
        .iter()
        .copied()
        .fold(None, |acc: Option<(i64, f64)>, e| match acc {
            Some(a) if a.1 >= e.1 => Some(a),
            _ => Some(e),
        });
    let off_ratio = match worst {
        Some((_, v)) if on_scale > 0.0 => v / on_scale,
        Some((_, v)) if v > 0.0 => f64::INFINITY,
        _ => 0.0,
    };

    let (point_mass, point_p) = w
        .rows()
        .iter()
        .filter(|row| row.sum() > 0.0)
        .map(|row| (row.max_weight() / row.sum(), row.p()))
        .fold((0.0, 0), |acc, e| if e.0 > acc.0 { e } else { acc });

    WeightContractReport {
        kind: format!("{:?}", w.kind()).to_lowercase(),
        r,
        theta: w.theta(),
        level: w.level(),
        rows: sums.len(),
        row_sum_min: min,
        row_sum_max: max,
        row_sum_ratio: if min > 0.0 { max / min } else { f64::INFINITY },
        row_sum_dispersion: cv_sum,
        row_sum_max_rel_error: w.max_row_sum_error(),
        q_sampled: qs.len(),
        on_tuple_by_shift: by_shift,
        on_tuple_mean: on_mean,
        on_tuple_dispersion: on_cv,
        on_tuple_scale: on_scale,
        off_tuple_worst_shift: worst.map(|e| e.0),
        off_tuple: off,
        off_tuple_ratio: off_ratio,
        max_point_mass: point_mass,
        max_point_mass_p: point_p,
        u_empirical: r as f64 * on_mean * 2.0 * part.y as f64 / part.x as f64,
    }
}

fn mean_cv(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let cv = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
    (mean, cv)
}
