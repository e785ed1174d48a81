//! Two-sample tests and the Student t distribution.

use libm::{exp, fabs, lgamma, log};

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x));
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_fraction(b, a, 1.0 - x) / b
    }
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let clamp = |v: f64| if fabs(v) < TINY { TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - (a + b) * x / (a + 1.0));
    let mut h = d;
    for m in 1..=500 {
        let m = f64::from(m);
        let num = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 / clamp(1.0 + num * d);
        c = clamp(1.0 + num / c);
        h *= d * c;
        let num = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 / clamp(1.0 + num * d);
        c = clamp(1.0 + num / c);
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Two-sided tail probability `P(|T| ≥ |t|)` for `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    incomplete_beta(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance t test. Both samples need at least two
/// values. When both samples have zero variance the p-value is 1 for equal
/// means and 0 otherwise.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Option<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let p = if ma == mb { 1.0 } else { 0.0 };
        let t = if ma == mb {
            0.0
        } else {
            f64::INFINITY.copysign(ma - mb)
        };
        return Some(WelchTest {
            t,
            df: (a.len() + b.len() - 2) as f64,
            p_value: p,
        });
    }
    let t = (ma - mb) / libm::sqrt(se2);
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    Some(WelchTest {
        t,
        df,
        p_value: student_t_two_sided(t, df),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_edges_and_symmetry() {
        assert_eq!(incomplete_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(incomplete_beta(2.0, 3.0, 1.0), 1.0);
        let x = 0.3;
        assert!(
            (incomplete_beta(2.5, 1.5, x) + incomplete_beta(1.5, 2.5, 1.0 - x) - 1.0).abs() < 1e-12
        );
        // I_x(1, 1) = x
        assert!((incomplete_beta(1.0, 1.0, 0.42) - 0.42).abs() < 1e-12);
    }

    #[test]
    fn t_tail_known_values() {
        // df = 1 is Cauchy: P(|T| > 1) = 0.5.
        assert!((student_t_two_sided(1.0, 1.0) - 0.5).abs() < 1e-12);
        // df = 2 closed form: 1 - t / sqrt(2 + t^2).
        let t: f64 = 1.7;
        assert!((student_t_two_sided(t, 2.0) - (1.0 - t / (2.0 + t * t).sqrt())).abs() < 1e-12);
        assert_eq!(student_t_two_sided(0.0, 5.0), 1.0);
    }

    #[test]
    fn degenerate_samples() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_none());
        assert_eq!(
            welch_t_test(&[5.0, 5.0], &[5.0, 5.0, 5.0]).unwrap().p_value,
            1.0
        );
        assert_eq!(welch_t_test(&[5.0, 5.0], &[6.0, 6.0]).unwrap().p_value, 0.0);
    }

    type Case<'a> = (&'a [f64], &'a [f64], f64, f64, f64);

    #[test]
    fn welch_matches_reference_values() {
        // Frozen from scipy.stats.ttest_ind(a, b, equal_var=False).
        let cases: [Case; 3] = [
            (
                &[1.0, 2.0, 3.0, 4.0, 5.0],
                &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
                -2.3763541031440183,
                6.972255729794934,
                0.04928433820673049,
            ),
            (
                &[0.1, 0.2, 0.15, 0.3],
                &[0.5, 0.45, 0.6, 0.55, 0.4],
                -5.6373452100212145,
                6.302353651176826,
                0.001128838883016692,
            ),
            (
                &[3.0, 2.0, 4.0, 3.0, 5.0, 1.0, 3.0, 2.0],
                &[20.0, 18.0, 25.0, 19.0, 22.0, 21.0],
                -16.24557206537451,
                6.892227074163545,
                9.489206066670277e-07,
            ),
        ];
        for (a, b, t, df, p) in cases {
            let w = welch_t_test(a, b).unwrap();
            assert!((w.t - t).abs() < 1e-10);
            assert!((w.df - df).abs() < 1e-10);
            assert!(((w.p_value - p) / p).abs() < 1e-8, "{} vs {p}", w.p_value);
        }
    }
}
