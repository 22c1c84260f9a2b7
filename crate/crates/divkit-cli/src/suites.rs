//! Property-verification suites behind `divkit verify`.
//!
//! Each suite evaluates a family of identities on seeded sample points and
//! returns one [`PropertyReport`] per case. The caller turns the pass flags
//! into an exit code.

use divkit::divergence::{
    alpha_divergence, alpha_divergence_via_cumulant, beta_divergence, cumulants,
    quasi_log_likelihood, unit_deviance,
};
use divkit::error::Error;
use divkit::transforms::{
    alpha_from_beta, alpha_symmetry_check, beta_from_alpha, detect_decomposition,
    scale_identity_check, translate_identity_check, DecompositionKind,
};
use divkit::{PropertyReport64, Result, VarianceFunction64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Bregman,
    Scaling,
    Translation,
    Alphabeta,
    Deviance,
    Mu0,
    Symmetry,
}

/// Deterministic in-domain sample points derived from the seed via a
/// splitmix step; spread across the family's domain.
fn sample_points(vf: &VarianceFunction64, seed: u64, count: usize) -> Vec<f64> {
    let d = vf.domain();
    let mut state = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut next_unit = move || {
        state = state
            .wrapping_mul(0xBF58_476D_1CE4_E5B9)
            .wrapping_add(0x94D0_49BB_1331_11EB);
        let bits = (state >> 11) as f64;
        bits / (1u64 << 53) as f64
    };
    (0..count)
        .map(|_| {
            let u = next_unit();
            if d.lower.is_finite() && d.upper.is_finite() {
                d.lower + (d.upper - d.lower) * (0.05 + 0.9 * u)
            } else if d.lower.is_finite() {
                d.lower + 0.1 + 6.0 * u
            } else {
                -4.0 + 8.0 * u
            }
        })
        .collect()
}

fn pairs(vf: &VarianceFunction64, seed: u64) -> Vec<(f64, f64)> {
    let pts = sample_points(vf, seed, 8);
    (0..4).map(|i| (pts[2 * i], pts[2 * i + 1])).collect()
}

pub fn run_suite(
    suite: Suite,
    vf: &VarianceFunction64,
    seed: u64,
) -> Result<Vec<PropertyReport64>> {
    match suite {
        Suite::Bregman => bregman(vf, seed),
        Suite::Scaling => scaling(vf, seed),
        Suite::Translation => translation(vf, seed),
        Suite::Alphabeta => alphabeta(vf, seed),
        Suite::Deviance => deviance(vf, seed),
        Suite::Mu0 => mu0(vf, seed),
        Suite::Symmetry => symmetry(vf, seed),
    }
}

/// d_beta(x, mu) against phi(x) - phi(mu) - (x - mu) theta(mu).
fn bregman(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    let base = vf.default_base();
    let mut cases = Vec::new();
    for (x, mu) in pairs(vf, seed) {
        let d = beta_divergence(vf, x, mu)?.value;
        let at_x = cumulants(vf, x, base)?;
        let at_mu = cumulants(vf, mu, base)?;
        let breg = at_x.phi - at_mu.phi - (x - mu) * at_mu.theta;
        cases.push(PropertyReport64::compare(
            format!("bregman x={x:.4} mu={mu:.4}"),
            d,
            breg,
            1e-8,
            1e-9,
        ));
    }
    Ok(cases)
}

/// d_beta(x, mu) = c^2 / f(c) d_beta(x/c, mu/c); needs multiplicative
/// decomposability.
fn scaling(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    let mut cases = Vec::new();
    for (x, mu) in pairs(vf, seed) {
        for c in [0.5, 2.0, 10.0] {
            // keep the scaled points interior
            if !vf.domain().contains(x / c) || !vf.domain().contains(mu / c) {
                continue;
            }
            let mut report = scale_identity_check(vf, x, mu, c)?;
            report.name = format!("scale c={c} x={x:.4} mu={mu:.4}");
            cases.push(report);
        }
    }
    Ok(cases)
}

/// d_beta(x, mu) = 1/f(c) d_beta(x+c, mu+c); needs translative
/// decomposability.
fn translation(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    let mut cases = Vec::new();
    for (x, mu) in pairs(vf, seed) {
        for c in [-10.0, 0.3, 7.0] {
            if !vf.domain().contains(x + c) || !vf.domain().contains(mu + c) {
                continue;
            }
            let mut report = translate_identity_check(vf, x, mu, c)?;
            report.name = format!("translate c={c} x={x:.4} mu={mu:.4}");
            cases.push(report);
        }
    }
    if cases.is_empty() {
        return Err(Error::Unsupported(
            "no admissible shifts stay inside the mean domain".into(),
        ));
    }
    Ok(cases)
}

/// The alpha-beta connections: alpha from scaled beta, the cumulant route,
/// and (where multiplicatively decomposable) beta recovered from alpha.
fn alphabeta(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    vf.require_interior("alpha base point 1", 1.0)
        .map_err(|_| {
            Error::Unsupported("alpha divergence needs 1 strictly inside the mean domain".into())
        })?;
    let multiplicative = detect_decomposition(vf, DecompositionKind::Multiplicative)
        .kind
        .is_some();
    let mut cases = Vec::new();
    for (x, mu) in positive_pairs(vf, seed) {
        let direct = alpha_divergence(vf, x, mu)?;
        let scaled = alpha_from_beta(vf, x, mu)?;
        cases.push(PropertyReport64::compare(
            format!("alpha from beta x={x:.4} mu={mu:.4}"),
            direct.value,
            scaled.value,
            1e-8,
            (direct.error_estimate + scaled.error_estimate).max(1e-10),
        ));
        let nested = alpha_divergence_via_cumulant(vf, x, mu)?;
        cases.push(PropertyReport64::compare(
            format!("alpha cumulant route x={x:.4} mu={mu:.4}"),
            direct.value,
            nested.value,
            1e-8,
            (direct.error_estimate + nested.error_estimate).max(1e-10),
        ));
        if multiplicative {
            let beta = beta_divergence(vf, x, mu)?;
            let via_alpha = beta_from_alpha(vf, x, mu)?;
            cases.push(PropertyReport64::compare(
                format!("beta from alpha x={x:.4} mu={mu:.4}"),
                beta.value,
                via_alpha.value,
                1e-8,
                (beta.error_estimate + via_alpha.error_estimate).max(1e-10),
            ));
        }
    }
    Ok(cases)
}

/// Alpha arguments must keep x, mu and x/mu inside the domain; resample
/// onto the positive side for families on the real line.
fn positive_pairs(vf: &VarianceFunction64, seed: u64) -> Vec<(f64, f64)> {
    pairs(vf, seed)
        .into_iter()
        .map(|(x, mu)| (x.abs().max(0.2), mu.abs().max(0.2)))
        .collect()
}

/// Unit deviance is exactly twice the beta divergence, and the
/// quasi-log-likelihood difference reproduces it.
fn deviance(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    let base = vf.default_base();
    let mut cases = Vec::new();
    for (x, mu) in pairs(vf, seed) {
        let beta = beta_divergence(vf, x, mu)?.value;
        let dev = unit_deviance(vf, x, mu)?;
        cases.push(PropertyReport64::compare(
            format!("deviance doubles beta x={x:.4} mu={mu:.4}"),
            dev,
            2.0 * beta,
            1e-15,
            0.0,
        ));
        let full = quasi_log_likelihood(vf, x, x, base)?.value;
        let parametric = quasi_log_likelihood(vf, x, mu, base)?.value;
        cases.push(PropertyReport64::compare(
            format!("likelihood ratio x={x:.4} mu={mu:.4}"),
            full - parametric,
            beta,
            1e-8,
            1e-9,
        ));
    }
    Ok(cases)
}

/// The likelihood-ratio form of the beta divergence does not depend on the
/// base point.
fn mu0(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    let d = vf.domain();
    let bases: [f64; 3] = if d.lower.is_finite() && d.upper.is_finite() {
        [0.2, 0.5, 0.8].map(|f| d.lower + (d.upper - d.lower) * f)
    } else if d.lower.is_finite() {
        [d.lower + 0.5, d.lower + 1.0, d.lower + 3.0]
    } else {
        [-2.0, 0.7, 5.0]
    };
    let mut cases = Vec::new();
    for (x, mu) in pairs(vf, seed) {
        let reference = beta_divergence(vf, x, mu)?.value;
        for base in bases {
            let full = quasi_log_likelihood(vf, x, x, base)?.value;
            let parametric = quasi_log_likelihood(vf, x, mu, base)?.value;
            cases.push(PropertyReport64::compare(
                format!("base {base:.4} x={x:.4} mu={mu:.4}"),
                full - parametric,
                reference,
                1e-8,
                1e-9,
            ));
        }
    }
    Ok(cases)
}

/// Symmetry of the alpha divergence under argument exchange.
fn symmetry(vf: &VarianceFunction64, seed: u64) -> Result<Vec<PropertyReport64>> {
    vf.require_interior("alpha base point 1", 1.0)
        .map_err(|_| {
            Error::Unsupported("alpha divergence needs 1 strictly inside the mean domain".into())
        })?;
    let mut cases = Vec::new();
    for (x, mu) in positive_pairs(vf, seed) {
        let mut report = alpha_symmetry_check(vf, x, mu)?;
        report.name = format!("alpha symmetry x={x:.4} mu={mu:.4}");
        cases.push(report);
    }
    Ok(cases)
}
