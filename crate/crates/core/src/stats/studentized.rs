//! Studentized range distribution and Tukey HSD comparison intervals.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use super::psychometric::std_normal_cdf;
use super::quadrature::Composite;
use crate::error::{Error, Result};

/// Above this many error degrees of freedom the infinite-df form is used.
const DF_INFINITE_CUTOFF: f64 = 1e5;

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `P(range of k standard normals ≤ w)`.
fn range_cdf_normal(w: f64, k: usize, inner: &Composite) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let v = k as f64
        * inner.integrate(|z| {
            let band = std_normal_cdf(z) - std_normal_cdf(z - w);
            std_normal_pdf(z) * band.max(0.0).powi(km1)
        });
    v.clamp(0.0, 1.0)
}

fn inner_rule() -> Composite {
    Composite::new(-9.0, 9.0, 36, 16)
}

/// CDF of the studentized range `q` for `k` means and `df` error degrees of
/// freedom (`f64::INFINITY` allowed), by nested Gauss–Legendre quadrature
/// over the chi-distributed scale.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> Result<f64> {
    validate(k, df)?;
    let inner = inner_rule();
    Ok(cdf_with(q, k, df, &inner, outer_rule(df).as_ref()))
}

fn validate(k: usize, df: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid("studentized range needs k >= 2"));
    }
    if !(df >= 1.0) {
        return Err(Error::invalid(format!("error df must be >= 1, got {df}")));
    }
    Ok(())
}

struct OuterRule {
    rule: Composite,
    df: f64,
    ln_norm: f64,
}

/// Quadrature for `s = sqrt(χ²_df / df)`; `None` means `df` is treated as infinite.
fn outer_rule(df: f64) -> Option<OuterRule> {
    if df > DF_INFINITE_CUTOFF {
        return None;
    }
    let chi = ChiSquared::new(df).expect("df >= 1");
    let lo = (chi.inverse_cdf(1e-14) / df).sqrt();
    let hi = (chi.inverse_cdf(1.0 - 1e-14) / df).sqrt();
    // ln of df^(df/2) / (Γ(df/2) 2^(df/2 − 1))
    let ln_norm = 0.5 * df * df.ln() - ln_gamma(0.5 * df) - (0.5 * df - 1.0) * 2f64.ln();
    Some(OuterRule {
        rule: Composite::new(lo, hi, 48, 16),
        df,
        ln_norm,
    })
}

fn cdf_with(q: f64, k: usize, _df: f64, inner: &Composite, outer: Option<&OuterRule>) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    match outer {
        None => range_cdf_normal(q, k, inner),
        Some(o) => o
            .rule
            .integrate(|s| {
                if s <= 0.0 {
                    return 0.0;
                }
                let ln_dens = o.ln_norm + (o.df - 1.0) * s.ln() - 0.5 * o.df * s * s;
                ln_dens.exp() * range_cdf_normal(q * s, k, inner)
            })
            .clamp(0.0, 1.0),
    }
}

/// Upper-`alpha` quantile `q(α; k, df)` by bisection on the CDF.
pub fn studentized_range_quantile(alpha: f64, k: usize, df: f64) -> Result<f64> {
    validate(k, df)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    let inner = inner_rule();
    let outer = outer_rule(df);
    let target = 1.0 - alpha;
    let cdf = |q: f64| cdf_with(q, k, df, &inner, outer.as_ref());
    let mut hi = 4.0;
    while cdf(hi) < target {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::invalid("quantile search diverged"));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Comparison intervals for a table of cell means.
#[derive(Debug, Clone, PartialEq)]
pub struct TukeyHsd {
    pub q: f64,
    /// Minimum significant difference `q·sqrt(mse/n)`.
    pub hsd: f64,
    /// Per-mean halfwidth `hsd / 2`: two intervals are disjoint exactly when
    /// the pair differs by more than `hsd`.
    pub halfwidth: f64,
    /// `(row, column, mean, lo, hi)` in row-major order.
    pub intervals: Vec<(usize, usize, f64, f64, f64)>,
    /// Pairwise significance over the flattened means.
    pub significant: Vec<Vec<bool>>,
}

impl TukeyHsd {
    pub fn interval(&self, row: usize, col: usize) -> Option<(f64, f64)> {
        self.intervals
            .iter()
            .find(|iv| iv.0 == row && iv.1 == col)
            .map(|iv| (iv.3, iv.4))
    }
}

/// Tukey HSD over every cell of `group_means` (conditions × statements) with
/// a single pooled error term.
pub fn tukey_hsd_ci(
    group_means: &[Vec<f64>],
    mse: f64,
    df: f64,
    n_per_cell: usize,
    alpha: f64,
) -> Result<TukeyHsd> {
    if !(mse >= 0.0) || !mse.is_finite() {
        return Err(Error::invalid("mse must be finite and non-negative"));
    }
    if n_per_cell == 0 {
        return Err(Error::invalid("n_per_cell must be positive"));
    }
    let flat: Vec<(usize, usize, f64)> = group_means
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &m)| (r, c, m)))
        .collect();
    if flat.iter().any(|m| !m.2.is_finite()) {
        return Err(Error::invalid("group means must be finite"));
    }
    let q = studentized_range_quantile(alpha, flat.len(), df)?;
    let hsd = q * (mse / n_per_cell as f64).sqrt();
    let halfwidth = hsd / 2.0;
    let intervals = flat
        .iter()
        .map(|&(r, c, m)| (r, c, m, m - halfwidth, m + halfwidth))
        .collect();
    let significant = flat
        .iter()
        .map(|a| flat.iter().map(|b| (a.2 - b.2).abs() > hsd).collect())
        .collect();
    Ok(TukeyHsd {
        q,
        hsd,
        halfwidth,
        intervals,
        significant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_means_at_infinite_df() {
        let q = studentized_range_quantile(0.05, 2, f64::INFINITY).unwrap();
        let identity = 2f64.sqrt() * 1.959_963_984_540_054;
        assert!((q - identity).abs() < 1e-6, "{q}");
        assert!((q - 2.772).abs() < 0.01);
    }

    #[test]
    fn three_means_at_infinite_df() {
        let q = studentized_range_quantile(0.05, 3, f64::INFINITY).unwrap();
        assert!((q - 3.314).abs() < 0.01, "{q}");
    }

    #[test]
    fn finite_df_against_t_identity() {
        // For k = 2, q = sqrt(2)·t_{df, 0.975}.
        use statrs::distribution::StudentsT;
        for df in [1.0, 3.0, 10.0, 60.0] {
            let t = StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(0.975);
            let q = studentized_range_quantile(0.05, 2, df).unwrap();
            assert!((q - 2f64.sqrt() * t).abs() < 1e-4 * q, "df {df}: {q}");
        }
    }

    #[test]
    fn tabulated_finite_df() {
        // Classical table entries q(0.05; k, df).
        for (k, df, expected) in [(3, 10.0, 3.877), (5, 20.0, 4.232), (4, 30.0, 3.845)] {
            let q = studentized_range_quantile(0.05, k, df).unwrap();
            assert!((q - expected).abs() < 2e-3, "k {k} df {df}: {q}");
        }
    }

    #[test]
    fn cdf_is_monotone() {
        let mut prev = 0.0;
        for i in 1..40 {
            let p = studentized_range_cdf(i as f64 * 0.2, 4, 12.0).unwrap();
            assert!(p >= prev - 1e-12);
            prev = p;
        }
        assert!(prev > 0.999);
    }

    #[test]
    fn halfwidth_scales_with_error() {
        let means = vec![vec![1.0, 2.0], vec![0.5, -1.0]];
        let big = tukey_hsd_ci(&means, 1.0, 40.0, 10, 0.05).unwrap();
        let small = tukey_hsd_ci(&means, 1e-12, 40.0, 10, 0.05).unwrap();
        assert!(small.halfwidth < 1e-5);
        assert!((big.halfwidth / small.halfwidth - 1e6).abs() < 1.0);
        assert!(tukey_hsd_ci(&means, 0.0, 40.0, 10, 0.05).unwrap().halfwidth == 0.0);
    }

    #[test]
    fn non_overlap_matches_pairwise_criterion() {
        let means = vec![vec![0.0, 0.4, 0.9, 1.5], vec![-0.2, 2.0, 0.1, 1.1]];
        let t = tukey_hsd_ci(&means, 0.8, 72.0, 10, 0.05).unwrap();
        for (i, a) in t.intervals.iter().enumerate() {
            for (j, b) in t.intervals.iter().enumerate() {
                let disjoint = a.4 < b.3 || b.4 < a.3;
                assert_eq!(disjoint, t.significant[i][j]);
            }
        }
        assert_eq!(t.interval(1, 1).unwrap().0, 2.0 - t.halfwidth);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let means = vec![vec![1.0, 2.0]];
        assert!(tukey_hsd_ci(&means, -1.0, 10.0, 5, 0.05).is_err());
        assert!(tukey_hsd_ci(&means, 1.0, 0.5, 5, 0.05).is_err());
        assert!(tukey_hsd_ci(&[vec![1.0]], 1.0, 10.0, 5, 0.05).is_err());
    }
}
