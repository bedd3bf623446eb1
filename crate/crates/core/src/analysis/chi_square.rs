//! Pearson χ² test of independence on an R×C contingency table.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Domain("contingency table needs at least two rows".into()));
        }
        let cols = rows[0].len();
        if cols < 2 {
            return Err(Error::Domain("contingency table needs at least two columns".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("contingency table rows differ in length".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.iter().all(|&c| c == 0)) {
            return Err(Error::Domain(format!("row {i} has no observations")));
        }
        if let Some(j) = (0..cols).find(|&j| rows.iter().all(|r| r[j] == 0)) {
            return Err(Error::Domain(format!("column {j} has no observations")));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let cols = self.rows[0].len();
        ContingencyTable { rows: (0..cols).map(|j| self.rows.iter().map(|r| r[j]).collect()).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Plain Pearson statistic (no continuity correction) with the upper-tail p-value.
pub fn chi_square_test(table: &ContingencyTable) -> Result<ChiSquare> {
    let rows = table.rows();
    let row_totals: Vec<f64> = rows.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols = rows[0].len();
    let col_totals: Vec<f64> = (0..cols).map(|j| rows.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = row_totals.iter().sum();

    let mut statistic = 0.0;
    for (r, row) in rows.iter().enumerate() {
        for (c, &obs) in row.iter().enumerate() {
            let expected = row_totals[r] * col_totals[c] / total;
            let diff = obs as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    let df = ((rows.len() - 1) * (cols - 1)) as u32;
    let p_value = regularized_gamma_q(df as f64 / 2.0, statistic / 2.0)?;
    Ok(ChiSquare { statistic, df, p_value })
}

const EPS: f64 = 1e-15;
const MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

/// Lanczos approximation (g = 7, nine terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let sum = COEF[1..].iter().enumerate().fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Q(a, x) = Γ(a, x) / Γ(a): series below `a + 1`, continued fraction above.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || x < 0.0 || x.is_nan() {
        return Err(Error::Domain(format!("incomplete gamma undefined for a={a}, x={x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..MAX_ITER {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                return Ok((1.0 - sum * log_prefix.exp()).clamp(0.0, 1.0));
            }
        }
        Err(Error::Domain(format!("gamma series did not converge for a={a}, x={x}")))
    } else {
        // Modified Lentz evaluation.
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                return Ok((log_prefix.exp() * h).clamp(0.0, 1.0));
            }
        }
        Err(Error::Domain(format!("gamma continued fraction did not converge for a={a}, x={x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn table(rows: &[&[u64]]) -> ContingencyTable {
        ContingencyTable::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn two_by_two_reference() {
        // Expected 15 everywhere: 4 * 25/15 = 20/3; Q(1/2, 10/3) = erfc(sqrt(10/3)).
        let r = chi_square_test(&table(&[&[10, 20], &[20, 10]])).unwrap();
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.df, 1);
        assert!((r.p_value - 0.009_823_274_507_519_247).abs() < 1e-10, "{}", r.p_value);

        let r = chi_square_test(&table(&[&[5, 0], &[0, 5]])).unwrap();
        assert!((r.statistic - 10.0).abs() < 1e-12);
        assert!((r.p_value - 0.001_565_402_258_002_549_6).abs() < 1e-10, "{}", r.p_value);
    }

    #[test]
    fn identical_rows_are_independent() {
        let r = chi_square_test(&table(&[&[3, 7, 2], &[3, 7, 2], &[6, 14, 4]])).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert_eq!(r.df, 4);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn degenerate_tables() {
        assert!(ContingencyTable::new(vec![vec![1, 2]]).is_err());
        assert!(ContingencyTable::new(vec![vec![1], vec![2]]).is_err());
        assert!(ContingencyTable::new(vec![vec![1, 0], vec![2, 0]]).is_err());
        assert!(ContingencyTable::new(vec![vec![0, 0], vec![2, 1]]).is_err());
        assert!(ContingencyTable::new(vec![vec![1, 2], vec![2]]).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-13);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn p_values_match_statrs() {
        for df in [1u32, 2, 3, 4, 7, 12, 30] {
            let law = ChiSquared::new(df as f64).unwrap();
            for x in [0.01, 0.5, 1.0, 2.5, 6.6667, 10.0, 25.0, 60.0] {
                let ours = regularized_gamma_q(df as f64 / 2.0, x / 2.0).unwrap();
                let theirs = law.sf(x);
                assert!((ours - theirs).abs() <= 1e-8, "df={df} x={x}: {ours} vs {theirs}");
            }
        }
    }

    proptest! {
        #[test]
        fn invariant_under_permutation_and_transpose(
            rows in prop::collection::vec(prop::collection::vec(1u64..40, 3), 2..5),
            rotate in 0usize..5,
        ) {
            let t = ContingencyTable::new(rows.clone()).unwrap();
            let base = chi_square_test(&t).unwrap();
            let mut permuted = rows;
            let len = permuted.len();
            permuted.rotate_left(rotate % len);
            let p = chi_square_test(&ContingencyTable::new(permuted).unwrap()).unwrap();
            let tr = chi_square_test(&t.transpose()).unwrap();
            prop_assert!((p.statistic - base.statistic).abs() < 1e-9);
            prop_assert!((tr.statistic - base.statistic).abs() < 1e-9);
            prop_assert_eq!(tr.df, base.df);
            prop_assert!((tr.p_value - base.p_value).abs() < 1e-12);
        }

        #[test]
        fn p_value_decreases_with_statistic(df in 1u32..20, x in 0.0f64..80.0, dx in 0.001f64..10.0) {
            let a = df as f64 / 2.0;
            let p1 = regularized_gamma_q(a, x / 2.0).unwrap();
            let p2 = regularized_gamma_q(a, (x + dx) / 2.0).unwrap();
            prop_assert!(p2 <= p1);
        }
    }
}
