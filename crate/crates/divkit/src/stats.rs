//! Expectations of the beta divergence, the Jensen-gap identity, score
//! identities and entropy through the expected-divergence route.
//!
//! Monte Carlo estimation runs on counter-based ChaCha streams: samples are
//! drawn in fixed-size batches, batch `i` on stream `i` of a ChaCha8
//! generator seeded once. The result is therefore a pure function of
//! `(seed, sample_count)` no matter how batches would be scheduled. The
//! sampling layer is `f64`; the scalar-generic math lives in the other
//! modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};

use crate::closed;
use crate::density::{DispersionModel, ModelKind};
use crate::divergence::{beta_divergence, canonical_theta, cumulant_psi, dual_cumulant_phi};
use crate::error::{Error, Result};
use crate::report::PropertyReport;
use crate::special::digamma;
use crate::varfun::{Family, VarianceFunction};

const BATCH: usize = 1 << 16;

/// Sample budget and seed for a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloSpec {
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        Self {
            sample_count: 1_000_000,
            seed: 0xBE7A,
        }
    }
}

impl MonteCarloSpec {
    pub fn new(sample_count: usize, seed: u64) -> Self {
        Self { sample_count, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.sample_count < 1000 {
            return Err(Error::Domain(format!(
                "sample_count = {} is below the 1000-sample floor",
                self.sample_count
            )));
        }
        Ok(())
    }
}

/// Mean with its standard error. Closed-form results carry zero error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub sample_count: usize,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            sample_count: 0,
        }
    }
}

/// Source distributions for the families with densities in scope, plus a
/// degenerate point mass for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    Gaussian {
        mean: f64,
        sigma2: f64,
    },
    Poisson {
        mean: f64,
    },
    /// Shape/rate parameterization; mean = shape / rate.
    Gamma {
        shape: f64,
        rate: f64,
    },
    Constant(f64),
}

impl Sampler {
    pub fn mean(&self) -> f64 {
        match self {
            Sampler::Gaussian { mean, .. } | Sampler::Poisson { mean } => *mean,
            Sampler::Gamma { shape, rate } => shape / rate,
            Sampler::Constant(v) => *v,
        }
    }

    fn draws(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        match self {
            Sampler::Gaussian { mean, sigma2 } => {
                let d = Normal::new(*mean, sigma2.sqrt())
                    .map_err(|e| Error::Domain(format!("gaussian sampler: {e}")))?;
                out.iter_mut().for_each(|slot| *slot = d.sample(rng));
            }
            Sampler::Poisson { mean } => {
                let d = Poisson::new(*mean)
                    .map_err(|e| Error::Domain(format!("poisson sampler: {e}")))?;
                out.iter_mut().for_each(|slot| *slot = d.sample(rng));
            }
            Sampler::Gamma { shape, rate } => {
                let d = Gamma::new(*shape, rate.recip())
                    .map_err(|e| Error::Domain(format!("gamma sampler: {e}")))?;
                out.iter_mut().for_each(|slot| *slot = d.sample(rng));
            }
            Sampler::Constant(v) => out.iter_mut().for_each(|slot| *slot = *v),
        }
        Ok(())
    }
}

/// Means and standard errors of `K` statistics over a common sample
/// stream. Batches are accumulated in index order, so the result does not
/// depend on any parallel schedule.
pub fn monte_carlo_means<const K: usize>(
    spec: &MonteCarloSpec,
    sampler: &Sampler,
    stats: impl Fn(f64) -> Result<[f64; K]>,
) -> Result<[Estimate; K]> {
    spec.validate()?;
    let n = spec.sample_count;
    let mut sums = [0.0f64; K];
    let mut sq_sums = [0.0f64; K];
    let mut buffer = vec![0.0f64; BATCH];

    let batches = n.div_ceil(BATCH);
    for batch in 0..batches {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(batch as u64);
        let take = BATCH.min(n - batch * BATCH);
        let slots = &mut buffer[..take];
        sampler.draws(&mut rng, slots)?;
        let mut batch_sums = [0.0f64; K];
        let mut batch_sqs = [0.0f64; K];
        for &x in slots.iter() {
            let values = stats(x)?;
            for (k, v) in values.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEvaluation { abscissa: x });
                }
                batch_sums[k] += v;
                batch_sqs[k] += v * v;
            }
        }
        for k in 0..K {
            sums[k] += batch_sums[k];
            sq_sums[k] += batch_sqs[k];
        }
    }

    let nf = n as f64;
    let mut out = [Estimate::exact(0.0); K];
    for k in 0..K {
        let mean = sums[k] / nf;
        let variance = ((sq_sums[k] - nf * mean * mean) / (nf - 1.0)).max(0.0);
        out[k] = Estimate {
            value: mean,
            std_error: (variance / nf).sqrt(),
            sample_count: n,
        };
    }
    Ok(out)
}

/// Route selector for expectations that have both analytic and sampled
/// forms.
#[derive(Debug, Clone, Copy)]
pub enum Route<'a> {
    Closed,
    MonteCarlo(&'a MonteCarloSpec),
}

/// Expected Tweedie beta divergence `E[d_beta(x, mu)]` where `x` follows
/// `sampler` with mean `mu`:
/// `(E[x^{2-p}] - mu^{2-p}) / ((1-p)(2-p))`, with the limit rows
/// `(E[x^2] - mu^2)/2`, `E[x ln x] - mu ln mu` and `-E[ln x] + ln mu` at
/// p = 0, 1, 2.
///
/// The closed route exists for p = 0 with a Gaussian sampler (`sigma2 / 2`)
/// and p = 2 with a gamma sampler (`ln a - psi(a)` via the digamma
/// identity `E[ln x] = psi(a) - ln b`); anything else needs Monte Carlo.
pub fn expected_beta_tweedie(p: f64, sampler: &Sampler, route: Route<'_>) -> Result<Estimate> {
    match route {
        Route::Closed => match (p, sampler) {
            (0.0, Sampler::Gaussian { sigma2, .. }) => Ok(Estimate::exact(sigma2 / 2.0)),
            (2.0, Sampler::Gamma { shape, .. }) => {
                Ok(Estimate::exact(shape.ln() - digamma(*shape)))
            }
            _ => Err(Error::Unsupported(format!(
                "no analytic expected beta divergence for p = {p} with {sampler:?}"
            ))),
        },
        Route::MonteCarlo(spec) => {
            let mu = sampler.mean();
            let phi1_mu = closed::tweedie_phi1(p, mu)?;
            let [gap] = monte_carlo_means(spec, sampler, |x| {
                Ok([closed::tweedie_phi1(p, x)? - phi1_mu])
            })?;
            Ok(gap)
        }
    }
}

/// Checks `E[d_beta(x, mu)] = E[phi1(x)] - phi1(E[x])` (the Jensen gap of
/// the nonlinear dual cumulant part) by Monte Carlo. Passes when the two
/// estimates agree within four standard errors of their per-sample
/// difference. Aborts if the sampler's empirical mean drifts more than
/// five standard errors from `mu`.
pub fn jensen_gap_check(
    vf: &VarianceFunction<f64>,
    sampler: &Sampler,
    mu: f64,
    spec: &MonteCarloSpec,
) -> Result<PropertyReport<f64>> {
    let stated = sampler.mean();
    if (stated - mu).abs() > 1e-12 * stated.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "sampler mean {stated} does not match mu = {mu}"
        )));
    }
    // Nonlinear dual cumulant part: closed for Tweedie, quadrature with the
    // default base otherwise (any affine offset cancels in the gap).
    let phi1: Box<dyn Fn(f64) -> Result<f64>> = match vf.family() {
        Family::TweediePower(p) => {
            let p = *p;
            Box::new(move |x: f64| closed::tweedie_phi1(p, x))
        }
        _ => {
            let vf = vf.clone();
            Box::new(move |x: f64| dual_cumulant_phi(&vf, x, vf.default_base()))
        }
    };
    let phi1_mu = phi1(mu)?;

    let [x_est, lhs_est, gap_est, diff_est] = monte_carlo_means(spec, sampler, |x| {
        let d = beta_divergence(vf, x, mu)?.value;
        let g = phi1(x)? - phi1_mu;
        Ok([x, d, g, d - g])
    })?;

    if (x_est.value - mu).abs() > 5.0 * x_est.std_error && x_est.std_error > 0.0 {
        return Err(Error::Diagnostics(format!(
            "sampler mean drifted: {} vs expected {mu} (se {})",
            x_est.value, x_est.std_error
        )));
    }

    let pass = diff_est.value.abs() <= 4.0 * diff_est.std_error;
    Ok(PropertyReport::with_pass(
        "jensen gap",
        lhs_est.value,
        gap_est.value,
        pass,
    ))
}

/// Checks the first score identity `E[(x - mu)/v(mu)] = 0` within four
/// standard errors.
pub fn score_mean_check(
    vf: &VarianceFunction<f64>,
    sampler: &Sampler,
    mu: f64,
    spec: &MonteCarloSpec,
) -> Result<PropertyReport<f64>> {
    let v = vf.eval(mu)?;
    let [score] = monte_carlo_means(spec, sampler, |x| Ok([(x - mu) / v]))?;
    let pass = score.value.abs() <= 4.0 * score.std_error;
    Ok(PropertyReport::with_pass(
        "score mean",
        score.value,
        0.0,
        pass,
    ))
}

/// Checks the curvature identity `E[d2 L / d mu2] = -1/v(mu)` within four
/// standard errors. The second derivative of the quasi-log-likelihood is
/// `-1/v(mu) - (x - mu) v'(mu) / v(mu)^2`, with `v'` taken by central
/// differences.
pub fn score_curvature_check(
    vf: &VarianceFunction<f64>,
    sampler: &Sampler,
    mu: f64,
    spec: &MonteCarloSpec,
) -> Result<PropertyReport<f64>> {
    let v = vf.eval(mu)?;
    let h = 1e-6 * mu.abs().max(1.0);
    let v_prime = (vf.eval(mu + h)? - vf.eval(mu - h)?) / (2.0 * h);
    let target = -v.recip();
    let [curv] = monte_carlo_means(spec, sampler, |x| {
        Ok([-v.recip() - (x - mu) * v_prime / (v * v)])
    })?;
    let pass = (curv.value - target).abs() <= 4.0 * curv.std_error;
    Ok(PropertyReport::with_pass(
        "score curvature",
        curv.value,
        target,
        pass,
    ))
}

/// Checks `E[L(x | mu)] = phi(mu)` (same base on both sides) within four
/// standard errors. `L(x|mu) = theta(mu) x - psi(mu)` is linear in `x`, so
/// only the canonical parameter and cumulant are integrated.
pub fn likelihood_mean_check(
    vf: &VarianceFunction<f64>,
    sampler: &Sampler,
    mu: f64,
    base: f64,
    spec: &MonteCarloSpec,
) -> Result<PropertyReport<f64>> {
    let theta = canonical_theta(vf, mu, base)?;
    let psi = cumulant_psi(vf, mu, base)?;
    let phi = dual_cumulant_phi(vf, mu, base)?;
    let [ll] = monte_carlo_means(spec, sampler, |x| Ok([theta * x - psi]))?;
    let pass = (ll.value - phi).abs() <= 4.0 * ll.std_error;
    Ok(PropertyReport::with_pass(
        "likelihood mean",
        ll.value,
        phi,
        pass,
    ))
}

fn sampler_for(model: &DispersionModel<f64>, mu: f64) -> Result<Sampler> {
    Ok(match model.kind() {
        ModelKind::Gaussian => Sampler::Gaussian {
            mean: mu,
            sigma2: model.dispersion(),
        },
        ModelKind::Poisson => Sampler::Poisson { mean: mu },
        ModelKind::Gamma => {
            let shape = model.dispersion().recip();
            Sampler::Gamma {
                shape,
                rate: shape / mu,
            }
        }
    })
}

/// Entropy through the expected-divergence route,
/// `H = -E[log g(x, phi)] + E[d_beta(x, mu)] / phi`.
///
/// Closed expectations exist for the Gaussian
/// (`ln(2 pi sigma2)/2 + 1/2`) and the gamma
/// (`a - ln b + ln Gamma(a) + (1 - a) psi(a)`); other models sample the
/// two expectations directly.
pub fn entropy_via_divergence(
    model: &DispersionModel<f64>,
    mu: f64,
    route: Route<'_>,
) -> Result<Estimate> {
    match route {
        Route::Closed => match model.kind() {
            ModelKind::Gaussian => {
                let sigma2 = model.dispersion();
                Ok(Estimate::exact(
                    0.5 * (2.0 * std::f64::consts::PI * sigma2).ln() + 0.5,
                ))
            }
            ModelKind::Gamma => {
                if !(mu > 0.0) {
                    return Err(Error::Domain(format!("mu = {mu} must be positive")));
                }
                let a = model.dispersion().recip();
                let b = a / mu;
                Ok(Estimate::exact(
                    a - b.ln() + crate::special::ln_gamma(a) + (1.0 - a) * digamma(a),
                ))
            }
            ModelKind::Poisson => Err(Error::Unsupported(
                "no closed entropy route for the Poisson; use Monte Carlo".into(),
            )),
        },
        Route::MonteCarlo(spec) => {
            model.vf().require_interior("mu", mu)?;
            let sampler = sampler_for(model, mu)?;
            let phi_disp = model.dispersion();
            let [h] = monte_carlo_means(spec, &sampler, |x| {
                let log_g = model.log_normalizer(x)?;
                let d = beta_divergence(model.vf(), x, mu)?.value;
                Ok([-log_g + d / phi_disp])
            })?;
            Ok(h)
        }
    }
}
