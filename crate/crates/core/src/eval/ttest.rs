//! One-sided Welch (unequal-variance, unpaired) t-test.

use statrs::distribution::{ContinuousCDF, StudentsT};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
fn variance(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Welch t statistic and Welch–Satterthwaite degrees of freedom.
pub fn welch_statistic(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a, ma), variance(b, mb));
    let sa = va / na;
    let sb = vb / nb;
    let t = (ma - mb) / (sa + sb).sqrt();
    let dof = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    (t, dof)
}

/// Upper-tail p-value for the hypothesis `mean(a) > mean(b)`.
///
/// When both sample variances are zero the statistic is degenerate; the
/// test then returns `p = 0` if `mean(a) > mean(b)` and `p = 1` otherwise.
/// Both samples must have at least two observations.
pub fn t_test_one_sided(a: &[f64], b: &[f64]) -> f64 {
    assert!(
        a.len() >= 2 && b.len() >= 2,
        "t-test requires at least two observations per sample"
    );
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a, ma), variance(b, mb));
    if va == 0.0 && vb == 0.0 {
        return if ma > mb { 0.0 } else { 1.0 };
    }
    let (t, dof) = welch_statistic(a, b);
    let dist = StudentsT::new(0.0, 1.0, dof).expect("valid dof");
    1.0 - dist.cdf(t)
}
