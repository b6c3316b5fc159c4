use super::tape::Tape;
use super::tensor::Tensor;
use crate::error::Result;

/// Worst-case agreement between analytic and central-difference gradients.
#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    /// Max over coordinates of `|analytic - central| / max(|analytic|,
    /// |central|, floor)`.
    pub max_rel: f64,
    /// Max over coordinates of `|analytic - central|`.
    pub max_abs: f64,
}

/// Finite-difference verification of reverse-mode gradients.
///
/// `f` builds a scalar loss on the tape it is given; it is re-run for every
/// perturbed coordinate, so it must be deterministic across calls (seed any
/// RNG it uses per call). Returns the maximum over all coordinates of all
/// `params` of
///
/// `|analytic - central| / max(|analytic|, |central|, 1e-8)`
///
/// where `central = (f(x + eps·e_i) - f(x - eps·e_i)) / (2·eps)`.
///
/// Near-zero gradient coordinates sit in the absolute regime of this
/// formula; in double precision the central difference itself carries
/// rounding noise of roughly `ulp(|f|)/(2·eps)`, so meaningful checks at
/// `eps = 1e-5` need `|f|` at the probe point to stay below ~0.1 or the
/// gradients to stay above ~1e-7.
pub fn grad_check<F>(f: F, params: &[&Tensor], eps: f64) -> Result<f64>
where
    F: FnMut(&mut Tape) -> Result<Tensor>,
{
    grad_check_report(f, params, eps, 1e-8).map(|r| r.max_rel)
}

/// [`grad_check`] with a configurable denominator floor, also reporting
/// the worst absolute disagreement.
pub fn grad_check_report<F>(
    mut f: F,
    params: &[&Tensor],
    eps: f64,
    floor: f64,
) -> Result<GradCheckReport>
where
    F: FnMut(&mut Tape) -> Result<Tensor>,
{
    assert!(eps > 0.0, "grad_check requires eps > 0");
    for p in params {
        p.set_requires_grad(true);
        p.zero_grad();
    }
    let mut tape = Tape::new();
    let loss = f(&mut tape)?;
    tape.backward(&loss)?;
    let analytic: Vec<Vec<f64>> = params.iter().map(|p| p.grad()).collect();

    let eval = |f: &mut F| -> Result<f64> {
        let mut tape = Tape::new();
        Ok(f(&mut tape)?.value())
    };

    let mut report = GradCheckReport {
        max_rel: 0.0,
        max_abs: 0.0,
    };
    for (pi, p) in params.iter().enumerate() {
        for i in 0..p.len() {
            let orig = p.get(i);
            p.set(i, orig + eps);
            let fp = eval(&mut f)?;
            p.set(i, orig - eps);
            let fm = eval(&mut f)?;
            p.set(i, orig);
            let central = (fp - fm) / (2.0 * eps);
            let a = analytic[pi][i];
            let abs = (a - central).abs();
            let denom = a.abs().max(central.abs()).max(floor);
            report.max_abs = report.max_abs.max(abs);
            report.max_rel = report.max_rel.max(abs / denom);
        }
    }
    Ok(report)
}
