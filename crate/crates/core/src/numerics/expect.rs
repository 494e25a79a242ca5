//! Expectations of bounded functions under positive scale laws.
//!
//! Integration runs in `t = ln v`. Sides whose log-density falls off doubly
//! exponentially are truncated once the density has dropped by `e^-60`
//! relative to its peak. Power-law sides (`p(v) ~ v^(e-1)` at zero or
//! `p(v) ~ v^(-e-1)` at infinity) are mapped onto `(0, 1]` by `w = v^(±e)`,
//! which turns them into smooth finite-range integrals.

use super::{integrate, ln_beta, ln_gamma, Estimate, NumericsError, QuadratureSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TRUNCATION_LOG_DROP: f64 = 60.0;
const MAX_SCAN_STEPS: usize = 4000;

/// A law on `(0, inf)` used for scale mixtures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Density {
    PointMass {
        value: f64,
    },
    Exponential {
        rate: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
    InverseGamma {
        shape: f64,
        scale: f64,
    },
    HalfCauchy {
        scale: f64,
    },
    /// `scale * X` with `X` beta-prime of the second kind, `(alpha, beta)`.
    BetaPrime {
        alpha: f64,
        beta: f64,
        scale: f64,
    },
}

impl Density {
    /// Checks that every parameter is finite and positive.
    pub fn validate(&self) -> Result<(), NumericsError> {
        let params: &[f64] = match self {
            Density::PointMass { value } => &[*value],
            Density::Exponential { rate } => &[*rate],
            Density::Gamma { shape, rate } => &[*shape, *rate],
            Density::InverseGamma { shape, scale } => &[*shape, *scale],
            Density::HalfCauchy { scale } => &[*scale],
            Density::BetaPrime { alpha, beta, scale } => &[*alpha, *beta, *scale],
        };
        if params.iter().all(|p| p.is_finite() && *p > 0.0) {
            Ok(())
        } else {
            Err(NumericsError::Domain(format!(
                "invalid density parameters: {self:?}"
            )))
        }
    }

    /// `E[V^p]`, or `None` when the moment is infinite.
    pub fn raw_moment(&self, p: f64) -> Option<f64> {
        match *self {
            Density::PointMass { value } => Some(value.powf(p)),
            Density::Exponential { rate } => {
                (p > -1.0).then(|| (ln_gamma(1.0 + p) - p * rate.ln()).exp())
            }
            Density::Gamma { shape, rate } => {
                (p > -shape).then(|| (ln_gamma(shape + p) - ln_gamma(shape) - p * rate.ln()).exp())
            }
            Density::InverseGamma { shape, scale } => {
                (p < shape).then(|| (p * scale.ln() + ln_gamma(shape - p) - ln_gamma(shape)).exp())
            }
            Density::HalfCauchy { scale } => {
                (p.abs() < 1.0).then(|| scale.powf(p) / (0.5 * PI * p).cos())
            }
            Density::BetaPrime { alpha, beta, scale } => (p > -alpha && p < beta).then(|| {
                (p * scale.ln() + ln_beta(alpha + p, beta - p) - ln_beta(alpha, beta)).exp()
            }),
        }
    }

    /// The law of `c * V` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Density {
        match *self {
            Density::PointMass { value } => Density::PointMass { value: c * value },
            Density::Exponential { rate } => Density::Exponential { rate: rate / c },
            Density::Gamma { shape, rate } => Density::Gamma {
                shape,
                rate: rate / c,
            },
            Density::InverseGamma { shape, scale } => Density::InverseGamma {
                shape,
                scale: c * scale,
            },
            Density::HalfCauchy { scale } => Density::HalfCauchy { scale: c * scale },
            Density::BetaPrime { alpha, beta, scale } => Density::BetaPrime {
                alpha,
                beta,
                scale: c * scale,
            },
        }
    }

    /// `ln(p(e^t) e^t)`, the log-density of `ln V`.
    fn ln_q(&self, t: f64) -> f64 {
        match *self {
            Density::PointMass { .. } => unreachable!("point masses are evaluated directly"),
            Density::Exponential { rate } => rate.ln() + t - rate * t.exp(),
            Density::Gamma { shape, rate } => {
                shape * rate.ln() - ln_gamma(shape) + shape * t - rate * t.exp()
            }
            Density::InverseGamma { shape, scale } => {
                shape * scale.ln() - ln_gamma(shape) - shape * t - scale * (-t).exp()
            }
            Density::HalfCauchy { scale } => {
                let u = t - scale.ln();
                // 2 e^u / (pi (1 + e^{2u})) written to avoid overflow
                (2.0 / PI).ln() + u - softplus(2.0 * u)
            }
            Density::BetaPrime { alpha, beta, scale } => {
                let u = t - scale.ln();
                alpha * u - (alpha + beta) * softplus(u) - ln_beta(alpha, beta)
            }
        }
    }

    /// Centre of the log-density in `t`.
    fn log_centre(&self) -> f64 {
        match *self {
            Density::PointMass { value } => value.ln(),
            Density::Exponential { rate } => -rate.ln(),
            Density::Gamma { shape, rate } => (shape / rate).ln(),
            Density::InverseGamma { shape, scale } => (scale / shape).ln(),
            Density::HalfCauchy { scale } => scale.ln(),
            Density::BetaPrime { alpha, beta, scale } => (scale * alpha / beta).ln(),
        }
    }

    /// Power-law exponents of the `t`-density at `-inf` and `+inf`.
    fn tail_powers(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            Density::PointMass { .. } => (None, None),
            Density::Exponential { .. } => (Some(1.0), None),
            Density::Gamma { shape, .. } => (Some(shape), None),
            Density::InverseGamma { shape, .. } => (None, Some(shape)),
            Density::HalfCauchy { .. } => (Some(1.0), Some(1.0)),
            Density::BetaPrime { alpha, beta, .. } => (Some(alpha), Some(beta)),
        }
    }
}

/// Relative tolerance of the pass that sizes the error budget.
const COARSE_REL_TOL: f64 = 1e-4;

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `E[f(V)]` for `V` drawn from `density`.
pub fn expect_1d<F: Fn(f64) -> f64>(
    density: &Density,
    f: F,
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError> {
    expect_1d_with_breaks(density, f, spec, &[])
}

/// A mapped integrand on `[a, b]`.
type Piece<'a> = (Box<dyn Fn(f64) -> f64 + 'a>, f64, f64);

/// `E[f(V)]` with extra panel boundaries at the points `breaks` (in `v`).
///
/// Put a break wherever `f` changes character, for example at `v = 1/x`
/// for integrands of the form `g(x v)`.
pub fn expect_1d_with_breaks<F: Fn(f64) -> f64>(
    density: &Density,
    f: F,
    spec: &QuadratureSpec,
    breaks: &[f64],
) -> Result<Estimate, NumericsError> {
    density.validate()?;
    spec.validate()?;
    if let Density::PointMass { value } = *density {
        let v = f(value);
        if !v.is_finite() {
            return Err(NumericsError::Domain(format!(
                "integrand is not finite at {value}"
            )));
        }
        return Ok(Estimate {
            value: v,
            error: 0.0,
        });
    }

    let centre = density.log_centre();
    let peak = density.ln_q(centre);
    let (left_power, right_power) = density.tail_powers();
    let mut knots: Vec<f64> = breaks
        .iter()
        .filter(|b| b.is_finite() && **b > 0.0)
        .map(|b| b.ln())
        .collect();
    knots.push(centre);

    let t_lo = match left_power {
        Some(_) => knots.iter().cloned().fold(centre, f64::min) - 1.0,
        None => scan_cutoff(density, centre, peak, -1.0),
    };
    let t_hi = match right_power {
        Some(_) => knots.iter().cloned().fold(centre, f64::max) + 1.0,
        None => scan_cutoff(density, centre, peak, 1.0),
    };
    knots.retain(|k| *k > t_lo && *k < t_hi);
    knots.push(t_lo);
    knots.push(t_hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let q_of = |t: f64| density.ln_q(t).exp();
    let f = &f;
    let mut pieces: Vec<Piece<'_>> = knots
        .windows(2)
        .map(|pair| {
            (
                Box::new(move |t: f64| f(t.exp()) * q_of(t)) as Box<dyn Fn(f64) -> f64>,
                pair[0],
                pair[1],
            )
        })
        .collect();
    if let Some(e) = left_power {
        // t = t_lo + ln(w) / e
        pieces.push((
            Box::new(move |w: f64| {
                let t = t_lo + w.ln() / e;
                f(clamped_exp(t)) * (density.ln_q(t) - e * (t - t_lo)).exp() / e
            }),
            0.0,
            1.0,
        ));
    }
    if let Some(e) = right_power {
        // t = t_hi - ln(w) / e
        pieces.push((
            Box::new(move |w: f64| {
                let t = t_hi - w.ln() / e;
                f(clamped_exp(t)) * (density.ln_q(t) + e * (t - t_hi)).exp() / e
            }),
            0.0,
            1.0,
        ));
    }

    // A coarse pass over |f q| sets a shared error budget, so a piece that
    // nearly cancels is not held to a relative tolerance on its own value.
    let coarse = QuadratureSpec {
        abs_tol: spec.abs_tol,
        rel_tol: COARSE_REL_TOL.max(spec.rel_tol),
        max_subdivisions: spec.max_subdivisions,
    };
    let mut scale = 0.0;
    for (g, a, b) in &pieces {
        scale += integrate(|t| g(t).abs(), *a, *b, &coarse)?.value;
    }
    let piece_spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(spec.rel_tol * scale / pieces.len() as f64),
        ..*spec
    };
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
    };
    for (g, a, b) in &pieces {
        total = total + integrate(g, *a, *b, &piece_spec)?;
    }
    Ok(total)
}

fn clamped_exp(t: f64) -> f64 {
    t.exp().clamp(f64::MIN_POSITIVE, f64::MAX)
}

fn scan_cutoff(density: &Density, centre: f64, peak: f64, direction: f64) -> f64 {
    let mut t = centre;
    for _ in 0..MAX_SCAN_STEPS {
        t += direction * 0.5;
        if density.ln_q(t) < peak - TRUNCATION_LOG_DROP {
            return t;
        }
    }
    t
}
