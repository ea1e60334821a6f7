use crate::error::{Error, Result};

/// Benjamini–Yekutieli step-up adjustment, valid under arbitrary
/// dependence. Output is in input order and clipped to 1.
pub fn benjamini_yekutieli_adjust(p_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_values.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let harmonic: f64 = (1..=m).map(|h| 1.0 / h as f64).sum();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));

    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank0, &i) in order.iter().enumerate().rev() {
        let j = (rank0 + 1) as f64;
        running = running.min(m as f64 * harmonic / j * p_values[i]);
        adjusted[i] = running.min(1.0);
    }
    Ok(adjusted)
}
