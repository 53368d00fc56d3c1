//! Closed-form constructors for the named input states: coherent states,
//! squeezed vacuum, odd-photon squeezed states, their photon-subtracted
//! versions, and even/odd cat states.
//!
//! Every subtracted state here is a literal series implementation whose
//! coefficients coincide term by term with the generic engine in
//! [`crate::subtraction`]; the test suite keeps the two routes locked
//! together. Closed-form normalizations (`lambda_vac`, `lambda_odd`) are
//! evaluated through the Gauss hypergeometric series and gated against
//! brute-force sums of their defining coefficients.
//!
//! All magnitudes are accumulated in log space; parity phases like `(-1)^n`
//! are applied exactly rather than through `cos`/`sin` round-off.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::FockAmplitudes;
use crate::special::{gauss_2f1, ln_factorial, SeriesControl};

/// Target fractional weight beyond the automatically chosen truncation.
pub const AUTO_TAIL_TARGET: f64 = 1e-12;
/// Hard ceiling for automatically chosen truncations.
pub const AUTO_TRUNCATION_CAP: usize = 512;

/// Squeezing parameter `xi = magnitude e^(i phase)` with `magnitude < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParam {
    magnitude: f64,
    phase: f64,
}

impl SqueezingParam {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || !phase.is_finite() || magnitude < 0.0 {
            return Err(Error::Domain(format!(
                "squeezing parameter needs a finite non-negative magnitude and \
                 finite phase, got ({magnitude}, {phase})"
            )));
        }
        if magnitude >= 1.0 {
            return Err(Error::Domain(format!(
                "squeezing magnitude must satisfy |xi| < 1, got {magnitude}"
            )));
        }
        Ok(SqueezingParam {
            magnitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn from_complex(xi: C64) -> Result<Self> {
        Self::new(xi.norm(), xi.arg())
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn xi(&self) -> C64 {
        C64::from_polar(self.magnitude, self.phase)
    }
}

/// Coherent amplitude `z = magnitude e^(i phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentParam {
    magnitude: f64,
    phase: f64,
}

impl CoherentParam {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || !phase.is_finite() || magnitude < 0.0 {
            return Err(Error::Domain(format!(
                "coherent parameter needs a finite non-negative magnitude and \
                 finite phase, got ({magnitude}, {phase})"
            )));
        }
        Ok(CoherentParam {
            magnitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn from_complex(z: C64) -> Result<Self> {
        Self::new(z.norm(), z.arg())
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn z(&self) -> C64 {
        C64::from_polar(self.magnitude, self.phase)
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = (phase + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
        - std::f64::consts::PI;
    // rem_euclid can land exactly on +pi; fold it back to -pi
    if wrapped >= std::f64::consts::PI {
        -std::f64::consts::PI
    } else {
        wrapped
    }
}

/// `ln cosh x` without overflow for large `x`.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln sinh x` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

/// One series term on a sparse Fock support: `|amplitude| = exp(log_mag)`
/// with a separately tracked unit phase.
struct SeriesTerm {
    index: usize,
    log_mag: f64,
    phase: C64,
}

/// `(-1)^flips * e^(i power phase)` as an exact sign times one polar factor.
fn signed_phase(flips: usize, power: usize, phase: f64) -> C64 {
    let sign = if flips.is_multiple_of(2) { 1.0 } else { -1.0 };
    C64::from_polar(1.0, power as f64 * phase) * sign
}

/// Assemble amplitudes from sparse log-magnitude terms.
///
/// With `renormalize` the amplitudes are scaled to unit norm over the window;
/// otherwise the magnitudes are taken as already carrying their closed-form
/// normalization. Either way the returned state carries a geometric estimate
/// of the relative weight lost beyond the window, driven by `ratio_bound`,
/// an upper bound on the term-to-term mass ratio past the window edge.
fn assemble(
    terms: Vec<SeriesTerm>,
    trunc: usize,
    renormalize: bool,
    next_log_mass: f64,
    ratio_bound: f64,
) -> FockAmplitudes {
    let peak = terms
        .iter()
        .map(|t| t.log_mag)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut amps = vec![C64::ZERO; trunc + 1];
    let mut window_mass = 0.0;
    for term in &terms {
        let scaled = (term.log_mag - peak).exp();
        window_mass += scaled * scaled;
        amps[term.index] = term.phase * scaled;
    }
    let scale = if renormalize {
        window_mass.sqrt().recip()
    } else {
        peak.exp()
    };
    for amp in &mut amps {
        *amp *= scale;
    }
    let tail = if ratio_bound.is_finite() && ratio_bound < 1.0 {
        let next_mass = (2.0 * (next_log_mass - peak)).exp() / window_mass;
        (next_mass / (1.0 - ratio_bound)).min(1.0)
    } else {
        1.0
    };
    FockAmplitudes::with_tail_bound(amps, tail)
        .expect("window is non-empty and the tail estimate is finite")
}

/// Smallest truncation keeping the relative tail mass of a log-mass series
/// below `tail_target`, capped at [`AUTO_TRUNCATION_CAP`].
fn find_truncation_with(
    tail_target: f64,
    fock_index: impl Fn(usize) -> usize,
    log_mass: impl Fn(usize) -> f64,
) -> usize {
    let mut masses = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut k = 0;
    while fock_index(k) <= AUTO_TRUNCATION_CAP {
        let m = log_mass(k);
        peak = peak.max(m);
        masses.push(m);
        k += 1;
    }
    let total: f64 = masses.iter().map(|m| (m - peak).exp()).sum();
    let mut tail = total;
    for (k, m) in masses.iter().enumerate() {
        tail -= (m - peak).exp();
        if tail <= tail_target * total {
            return fock_index(k);
        }
    }
    AUTO_TRUNCATION_CAP
}

/// Coherent state: amplitudes `e^(-|z|^2/2) z^n / sqrt(n!)`.
pub fn coherent(z: &CoherentParam, trunc: usize) -> FockAmplitudes {
    let m = z.magnitude();
    let half_energy = -0.5 * m * m;
    let terms: Vec<SeriesTerm> = (0..=trunc)
        .filter(|&n| m > 0.0 || n == 0)
        .map(|n| SeriesTerm {
            index: n,
            log_mag: half_energy + pow_log(m, n) - 0.5 * ln_factorial(n as u64),
            phase: signed_phase(0, n, z.phase()),
        })
        .collect();
    let next = half_energy + pow_log(m, trunc + 1) - 0.5 * ln_factorial(trunc as u64 + 1);
    let ratio = m * m / (trunc as f64 + 2.0);
    assemble(terms, trunc, false, next, ratio)
}

/// Window for [`coherent`] meeting the default tail target.
pub fn coherent_truncation(z: &CoherentParam) -> usize {
    coherent_truncation_with_tail(z, AUTO_TAIL_TARGET)
}

/// Window for [`coherent`] meeting the given relative tail-mass target.
pub fn coherent_truncation_with_tail(z: &CoherentParam, tail_target: f64) -> usize {
    let m = z.magnitude();
    if m == 0.0 {
        return 0;
    }
    let half = -m * m;
    find_truncation_with(
        tail_target,
        |n| n,
        |n| 2.0 * (0.5 * half + pow_log(m, n) - 0.5 * ln_factorial(n as u64)),
    )
}

/// `n ln m` with the `0^0 = 1` convention (`0 ln 0 := 0`).
fn pow_log(m: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else if m == 0.0 {
        f64::NEG_INFINITY
    } else {
        n as f64 * m.ln()
    }
}

/// Squeezed vacuum: `(1-|xi|^2)^(1/4) sqrt((2n)!)/n! (-xi/2)^n` on `|2n>`.
pub fn squeezed_vacuum(xi: &SqueezingParam, trunc: usize) -> FockAmplitudes {
    let m = xi.magnitude();
    let prefactor = 0.25 * (1.0 - m * m).ln();
    let log_mag = |p: usize| {
        prefactor + 0.5 * ln_factorial(2 * p as u64) - ln_factorial(p as u64)
            + pow_log(m / 2.0, p)
    };
    let blocks = trunc / 2;
    let terms: Vec<SeriesTerm> = (0..=blocks)
        .filter(|&p| m > 0.0 || p == 0)
        .map(|p| SeriesTerm {
            index: 2 * p,
            log_mag: log_mag(p),
            phase: signed_phase(p, p, xi.phase()),
        })
        .collect();
    assemble(terms, trunc, false, log_mag(blocks + 1), m * m)
}

/// Window for [`squeezed_vacuum`] meeting the default tail target.
pub fn squeezed_vacuum_truncation(xi: &SqueezingParam) -> usize {
    squeezed_vacuum_truncation_with_tail(xi, AUTO_TAIL_TARGET)
}

/// Window for [`squeezed_vacuum`] meeting the given relative tail-mass
/// target.
pub fn squeezed_vacuum_truncation_with_tail(xi: &SqueezingParam, tail_target: f64) -> usize {
    let m = xi.magnitude();
    if m == 0.0 {
        return 0;
    }
    find_truncation_with(
        tail_target,
        |p| 2 * p,
        |p| {
            2.0 * (0.5 * ln_factorial(2 * p as u64) - ln_factorial(p as u64)
                + pow_log(m / 2.0, p))
        },
    )
}

/// The `n`-subtracted squeezed vacuum, normalized over the window.
///
/// Even subtraction `n = 2p` keeps even support with coefficients
/// `(2k+2p)! / [sqrt((2k)!) (k+p)!] (-xi/2)^(k+p)` on `|2k>`; odd
/// subtraction `n = 2p+1` keeps odd support with coefficients
/// `(2k+2p+2)! / [sqrt((2k+1)!) (k+p+1)!] (-xi/2)^(k+p+1)` on `|2k+1>`.
pub fn subtracted_squeezed_vacuum(
    xi: &SqueezingParam,
    n: usize,
    trunc: usize,
) -> Result<FockAmplitudes> {
    let m = xi.magnitude();
    if m == 0.0 && n > 0 {
        return Err(Error::VanishingState {
            subtract: n,
            truncation: trunc,
        });
    }
    let p = n / 2;
    let terms: Vec<SeriesTerm>;
    let next;
    let last_k;
    if n.is_multiple_of(2) {
        let log_mag = |k: usize| {
            ln_factorial(2 * (k + p) as u64) - 0.5 * ln_factorial(2 * k as u64)
                - ln_factorial((k + p) as u64)
                + pow_log(m / 2.0, k + p)
        };
        last_k = trunc / 2;
        terms = (0..=last_k)
            .filter(|&k| m > 0.0 || k + p == 0)
            .map(|k| SeriesTerm {
                index: 2 * k,
                log_mag: log_mag(k),
                phase: signed_phase(k + p, k + p, xi.phase()),
            })
            .collect();
        next = log_mag(last_k + 1);
    } else {
        if trunc == 0 {
            return Err(Error::VanishingState {
                subtract: n,
                truncation: trunc,
            });
        }
        let log_mag = |k: usize| {
            ln_factorial((2 * (k + p) + 2) as u64) - 0.5 * ln_factorial((2 * k + 1) as u64)
                - ln_factorial((k + p + 1) as u64)
                + pow_log(m / 2.0, k + p + 1)
        };
        last_k = (trunc - 1) / 2;
        terms = (0..=last_k)
            .map(|k| SeriesTerm {
                index: 2 * k + 1,
                log_mag: log_mag(k),
                phase: signed_phase(k + p + 1, k + p + 1, xi.phase()),
            })
            .collect();
        next = log_mag(last_k + 1);
    }
    Ok(assemble(terms, trunc, true, next, m * m))
}

/// Closed-form norm of the unnormalized `n`-subtracted squeezed-vacuum
/// series.
///
/// `lambda^2 = (|xi|/2)^(2p) [Gamma(2p+1)/Gamma(p+1)]^2
/// 2F1(p+1/2, p+1/2; 1/2; |xi|^2)` for `n = 2p`, and `lambda^2 =
/// (|xi|/2)^(2p+2) [Gamma(2p+3)/Gamma(p+2)]^2 2F1(p+3/2, p+3/2; 3/2;
/// |xi|^2)` for `n = 2p+1`.
pub fn lambda_vac(xi: &SqueezingParam, n: usize) -> Result<f64> {
    let m = xi.magnitude();
    if m == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let p = n / 2;
    let control = SeriesControl::default();
    let log_sq = if n.is_multiple_of(2) {
        let hyper = gauss_2f1(p as f64 + 0.5, p as f64 + 0.5, 0.5, m * m, &control)?;
        2.0 * p as f64 * (m / 2.0).ln()
            + 2.0 * (ln_factorial(2 * p as u64) - ln_factorial(p as u64))
            + hyper.ln()
    } else {
        let hyper = gauss_2f1(p as f64 + 1.5, p as f64 + 1.5, 1.5, m * m, &control)?;
        (2.0 * p as f64 + 2.0) * (m / 2.0).ln()
            + 2.0 * (ln_factorial(2 * p as u64 + 2) - ln_factorial(p as u64 + 1))
            + hyper.ln()
    };
    Ok((0.5 * log_sq).exp())
}

/// Odd-photon squeezed state: `n!/sqrt((2n+1)!) (-2 xi)^n` on `|2n+1>`,
/// divided by the closed-form norm `[(1-|xi|^2)^(-1/2) arcsin|xi| /
/// |xi|]^(1/2)`.
pub fn odd_squeezed(xi: &SqueezingParam, trunc: usize) -> Result<FockAmplitudes> {
    if trunc == 0 {
        return Err(Error::ShapeMismatch(
            "odd-photon squeezed states need at least truncation 1".into(),
        ));
    }
    let m = xi.magnitude();
    let log_norm = if m == 0.0 {
        0.0
    } else {
        0.5 * ((m.asin() / m).ln() - 0.5 * (1.0 - m * m).ln())
    };
    let log_mag =
        |p: usize| ln_factorial(p as u64) - 0.5 * ln_factorial(2 * p as u64 + 1) + pow_log(2.0 * m, p);
    let blocks = (trunc - 1) / 2;
    let terms: Vec<SeriesTerm> = (0..=blocks)
        .filter(|&p| m > 0.0 || p == 0)
        .map(|p| SeriesTerm {
            index: 2 * p + 1,
            log_mag: log_mag(p) - log_norm,
            phase: signed_phase(p, p, xi.phase()),
        })
        .collect();
    Ok(assemble(terms, trunc, false, log_mag(blocks + 1) - log_norm, m * m))
}

/// Window for [`odd_squeezed`] meeting the default tail target.
pub fn odd_squeezed_truncation(xi: &SqueezingParam) -> usize {
    odd_squeezed_truncation_with_tail(xi, AUTO_TAIL_TARGET)
}

/// Window for [`odd_squeezed`] meeting the given relative tail-mass target.
pub fn odd_squeezed_truncation_with_tail(xi: &SqueezingParam, tail_target: f64) -> usize {
    let m = xi.magnitude();
    if m == 0.0 {
        return 1;
    }
    find_truncation_with(
        tail_target,
        |p| 2 * p + 1,
        |p| {
            2.0 * (ln_factorial(p as u64) - 0.5 * ln_factorial(2 * p as u64 + 1)
                + pow_log(2.0 * m, p))
        },
    )
}

/// The `n`-subtracted odd-photon squeezed state, normalized over the window.
///
/// Even subtraction `n = 2p` keeps odd support with coefficients
/// `(k+p)!/sqrt((2k+1)!) (-2 xi)^(k+p)` on `|2k+1>`; odd subtraction
/// `n = 2p+1` keeps even support with coefficients
/// `(k+p)!/sqrt((2k)!) (-2 xi)^(k+p)` on `|2k>`.
pub fn subtracted_odd_squeezed(
    xi: &SqueezingParam,
    n: usize,
    trunc: usize,
) -> Result<FockAmplitudes> {
    let m = xi.magnitude();
    let p = n / 2;
    if m == 0.0 && n > 1 {
        return Err(Error::VanishingState {
            subtract: n,
            truncation: trunc,
        });
    }
    let terms: Vec<SeriesTerm>;
    let next;
    if n.is_multiple_of(2) {
        if trunc == 0 {
            return Err(Error::VanishingState {
                subtract: n,
                truncation: trunc,
            });
        }
        let log_mag = |k: usize| {
            ln_factorial((k + p) as u64) - 0.5 * ln_factorial(2 * k as u64 + 1)
                + pow_log(2.0 * m, k + p)
        };
        let last_k = (trunc - 1) / 2;
        terms = (0..=last_k)
            .filter(|&k| m > 0.0 || k + p == 0)
            .map(|k| SeriesTerm {
                index: 2 * k + 1,
                log_mag: log_mag(k),
                phase: signed_phase(k + p, k + p, xi.phase()),
            })
            .collect();
        next = log_mag(last_k + 1);
    } else {
        let log_mag = |k: usize| {
            ln_factorial((k + p) as u64) - 0.5 * ln_factorial(2 * k as u64)
                + pow_log(2.0 * m, k + p)
        };
        let last_k = trunc / 2;
        terms = (0..=last_k)
            .filter(|&k| m > 0.0 || k + p == 0)
            .map(|k| SeriesTerm {
                index: 2 * k,
                log_mag: log_mag(k),
                phase: signed_phase(k + p, k + p, xi.phase()),
            })
            .collect();
        next = log_mag(last_k + 1);
    }
    Ok(assemble(terms, trunc, true, next, m * m))
}

/// Closed-form norm of the unnormalized `n`-subtracted odd-photon squeezed
/// series.
///
/// `lambda^2 = (2|xi|)^(2p) Gamma(p+1)^2 2F1(p+1, p+1; 3/2; |xi|^2)` for
/// `n = 2p`, and `lambda^2 = (2|xi|)^(2p) Gamma(p+1)^2 2F1(p+1, p+1; 1/2;
/// |xi|^2)` for `n = 2p+1`.
pub fn lambda_odd(xi: &SqueezingParam, n: usize) -> Result<f64> {
    let m = xi.magnitude();
    let p = n / 2;
    if m == 0.0 {
        return Ok(if n <= 1 { 1.0 } else { 0.0 });
    }
    let control = SeriesControl::default();
    let c = if n.is_multiple_of(2) { 1.5 } else { 0.5 };
    let hyper = gauss_2f1(p as f64 + 1.0, p as f64 + 1.0, c, m * m, &control)?;
    let log_sq = 2.0 * p as f64 * (2.0 * m).ln() + 2.0 * ln_factorial(p as u64) + hyper.ln();
    Ok((0.5 * log_sq).exp())
}

/// Even cat state: `z^(2n)/sqrt((2n)!)` on `|2n>`, over `sqrt(cosh |z|^2)`.
pub fn cat_even(z: &CoherentParam, trunc: usize) -> FockAmplitudes {
    let m = z.magnitude();
    let log_norm = 0.5 * ln_cosh(m * m);
    let log_mag = |p: usize| pow_log(m, 2 * p) - 0.5 * ln_factorial(2 * p as u64) - log_norm;
    let blocks = trunc / 2;
    let terms: Vec<SeriesTerm> = (0..=blocks)
        .filter(|&p| m > 0.0 || p == 0)
        .map(|p| SeriesTerm {
            index: 2 * p,
            log_mag: log_mag(p),
            phase: signed_phase(0, 2 * p, z.phase()),
        })
        .collect();
    let ratio = m.powi(4) / ((trunc as f64 + 1.0) * (trunc as f64 + 2.0));
    assemble(terms, trunc, false, log_mag(blocks + 1), ratio)
}

/// Odd cat state: `z^(2n+1)/sqrt((2n+1)!)` on `|2n+1>`, over
/// `sqrt(sinh |z|^2)`; undefined at `z = 0`.
pub fn cat_odd(z: &CoherentParam, trunc: usize) -> Result<FockAmplitudes> {
    let m = z.magnitude();
    if m == 0.0 {
        return Err(Error::Domain(
            "the odd cat state is undefined at z = 0 (sinh 0 = 0)".into(),
        ));
    }
    if trunc == 0 {
        return Err(Error::ShapeMismatch(
            "odd cat states need at least truncation 1".into(),
        ));
    }
    let log_norm = 0.5 * ln_sinh(m * m);
    let log_mag = |p: usize| pow_log(m, 2 * p + 1) - 0.5 * ln_factorial(2 * p as u64 + 1) - log_norm;
    let blocks = (trunc - 1) / 2;
    let terms: Vec<SeriesTerm> = (0..=blocks)
        .map(|p| SeriesTerm {
            index: 2 * p + 1,
            log_mag: log_mag(p),
            phase: signed_phase(0, 2 * p + 1, z.phase()),
        })
        .collect();
    let ratio = m.powi(4) / ((trunc as f64 + 1.0) * (trunc as f64 + 2.0));
    Ok(assemble(terms, trunc, false, log_mag(blocks + 1), ratio))
}

/// Window covering both cat parities for [`cat_even`] and [`cat_odd`].
pub fn cat_truncation(z: &CoherentParam) -> usize {
    cat_truncation_with_tail(z, AUTO_TAIL_TARGET)
}

/// Cat-state window meeting the given relative tail-mass target.
pub fn cat_truncation_with_tail(z: &CoherentParam, tail_target: f64) -> usize {
    let m = z.magnitude();
    if m == 0.0 {
        return 1;
    }
    find_truncation_with(
        tail_target,
        |n| n,
        |n| 2.0 * (pow_log(m, n) - 0.5 * ln_factorial(n as u64)),
    )
    .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subtraction::{decompose_output, subtracted_state};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sq(m: f64) -> SqueezingParam {
        SqueezingParam::new(m, 0.0).unwrap()
    }

    fn co(m: f64) -> CoherentParam {
        CoherentParam::new(m, 0.0).unwrap()
    }

    /// Brute-force norm of a sparse log-magnitude series.
    fn brute_norm(log_mags: impl Iterator<Item = f64>) -> f64 {
        let mags: Vec<f64> = log_mags.collect();
        let peak = mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = mags.iter().map(|m| (2.0 * (m - peak)).exp()).sum();
        (peak + 0.5 * sum.ln()).exp()
    }

    #[test]
    fn parameters_validate_their_domains() {
        assert!(SqueezingParam::new(1.0, 0.0).is_err());
        assert!(SqueezingParam::new(-0.1, 0.0).is_err());
        assert!(SqueezingParam::new(0.3, f64::NAN).is_err());
        assert!(CoherentParam::new(-1.0, 0.0).is_err());
        assert!(CoherentParam::new(17.0, 0.0).is_ok());
        let wrapped = SqueezingParam::new(0.5, 3.0 * std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(wrapped.phase(), -std::f64::consts::PI, epsilon = 1e-12);
        let xi = SqueezingParam::from_complex(C64::new(0.3, -0.4)).unwrap();
        assert_abs_diff_eq!(xi.magnitude(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let state = coherent(&co(0.0), 4);
        assert_abs_diff_eq!(state.amp(0).re, 1.0, epsilon = 1e-15);
        for n in 1..=4 {
            assert_eq!(state.amp(n), C64::ZERO);
        }
    }

    #[test]
    fn coherent_unit_amplitude_has_unit_mean_photon_number() {
        let state = coherent(&co(1.0), 40);
        assert_relative_eq!(state.mean_photon_number(), 1.0, max_relative = 1e-10);
        assert_relative_eq!(state.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn coherent_norm_and_tail_close_at_forty_photons_for_z_two() {
        let state = coherent(&co(2.0), 40);
        assert_relative_eq!(state.norm(), 1.0, max_relative = 1e-12);
        assert!(state.tail_mass_bound() < 1e-12);
        let auto = coherent_truncation(&co(2.0));
        assert!(auto <= 40, "auto window {auto} should not exceed 40");
        assert!(coherent(&co(2.0), auto).norm() > 1.0 - 1e-11);
    }

    #[test]
    fn squeezed_vacuum_at_zero_is_vacuum_and_norms_close() {
        let vacuum = squeezed_vacuum(&sq(0.0), 6);
        assert_abs_diff_eq!(vacuum.amp(0).re, 1.0, epsilon = 1e-15);
        let state = squeezed_vacuum(&sq(0.5), 80);
        assert_relative_eq!(state.norm(), 1.0, max_relative = 1e-10);
        for n in (1..=79).step_by(2) {
            assert_eq!(state.amp(n), C64::ZERO, "odd component {n} must vanish");
        }
        assert!(state.amp(2).re < 0.0, "the |2> amplitude carries (-xi/2)");
    }

    #[test]
    fn weak_squeezing_matches_the_two_term_expansion() {
        // the series' |2> amplitude is -(xi/sqrt 2): term n=1 of (-xi/2)^n
        let xi = 0.05;
        let state = squeezed_vacuum(&sq(xi), 40);
        let mut reference = vec![C64::ZERO; 41];
        reference[0] = C64::new(1.0, 0.0);
        reference[2] = C64::new(-xi / 2f64.sqrt(), 0.0);
        let (reference, _) = FockAmplitudes::new(reference).unwrap().normalize().unwrap();
        let fidelity = state.normalize().unwrap().0.fidelity(&reference).unwrap();
        assert!(fidelity >= 1.0 - 10.0 * xi.powi(4));
    }

    #[test]
    fn subtracting_zero_photons_recovers_the_squeezed_vacuum() {
        let xi = sq(0.4);
        let closed = subtracted_squeezed_vacuum(&xi, 0, 60).unwrap();
        let parent = squeezed_vacuum(&xi, 60).normalize().unwrap().0;
        assert!(closed.fidelity(&parent).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn one_subtraction_at_weak_squeezing_is_nearly_a_single_photon() {
        let state = subtracted_squeezed_vacuum(&sq(0.1), 1, 30).unwrap();
        let distribution = state.photon_distribution();
        assert!(distribution[1] > 0.9, "P(1) = {}", distribution[1]);
        for n in (0..30).step_by(2) {
            assert_eq!(distribution[n], 0.0, "even component {n} must vanish");
        }
    }

    #[test]
    fn closed_form_subtraction_matches_the_generic_engine() {
        let parent_trunc = 90;
        for &magnitude in &[0.1, 0.3, 0.5, 0.7] {
            for phase in [0.0, 0.7] {
                let xi = SqueezingParam::new(magnitude, phase).unwrap();
                let parent = squeezed_vacuum(&xi, parent_trunc);
                for n in 0..=6usize {
                    let window = parent_trunc - n;
                    let closed = subtracted_squeezed_vacuum(&xi, n, window).unwrap();
                    let (generic, _) = subtracted_state(&parent, n, window).unwrap();
                    assert!(
                        closed.fidelity(&generic).unwrap() > 1.0 - 1e-10,
                        "vacuum family mismatch at |xi|={magnitude}, phase={phase}, n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn subtracted_odd_family_matches_the_generic_engine() {
        let parent_trunc = 91;
        for &magnitude in &[0.1, 0.3, 0.5, 0.7] {
            for phase in [0.0, 0.7] {
                let xi = SqueezingParam::new(magnitude, phase).unwrap();
                let parent = odd_squeezed(&xi, parent_trunc).unwrap();
                for n in 0..=6usize {
                    let window = parent_trunc - n;
                    let closed = subtracted_odd_squeezed(&xi, n, window).unwrap();
                    let (generic, _) = subtracted_state(&parent, n, window).unwrap();
                    assert!(
                        closed.fidelity(&generic).unwrap() > 1.0 - 1e-10,
                        "odd family mismatch at |xi|={magnitude}, phase={phase}, n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn subtraction_from_the_empty_families_vanishes() {
        assert!(matches!(
            subtracted_squeezed_vacuum(&sq(0.0), 1, 10),
            Err(Error::VanishingState { .. })
        ));
        assert!(matches!(
            subtracted_odd_squeezed(&sq(0.0), 2, 10),
            Err(Error::VanishingState { .. })
        ));
        // a lone photon still yields its 0- and 1-subtracted states
        assert!(subtracted_odd_squeezed(&sq(0.0), 0, 10).is_ok());
        let emptied = subtracted_odd_squeezed(&sq(0.0), 1, 10).unwrap();
        assert_abs_diff_eq!(emptied.amp(0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn lambda_vac_matches_brute_force_series_norms() {
        assert_relative_eq!(lambda_vac(&sq(0.0), 0).unwrap(), 1.0, max_relative = 1e-14);
        for n in 0..=5usize {
            let p = n / 2;
            let brute = if n.is_multiple_of(2) {
                brute_norm((0..400).map(|k| {
                    ln_factorial(2 * (k + p) as u64) - 0.5 * ln_factorial(2 * k as u64)
                        - ln_factorial((k + p) as u64)
                        + (k + p) as f64 * (0.25f64).ln()
                }))
            } else {
                brute_norm((0..400).map(|k| {
                    ln_factorial((2 * (k + p) + 2) as u64)
                        - 0.5 * ln_factorial(2 * k as u64 + 1)
                        - ln_factorial((k + p + 1) as u64)
                        + (k + p + 1) as f64 * (0.25f64).ln()
                }))
            };
            let closed = lambda_vac(&sq(0.5), n).unwrap();
            assert_relative_eq!(closed, brute, max_relative = 1e-8);
        }
    }

    #[test]
    fn lambda_odd_matches_brute_force_series_norms() {
        assert_relative_eq!(lambda_odd(&sq(0.0), 0).unwrap(), 1.0, max_relative = 1e-14);
        let m = 0.5f64;
        for n in 0..=5usize {
            let p = n / 2;
            let support_factorials: fn(usize) -> f64 = if n.is_multiple_of(2) {
                |k| 0.5 * ln_factorial(2 * k as u64 + 1)
            } else {
                |k| 0.5 * ln_factorial(2 * k as u64)
            };
            let brute = brute_norm((0..400).map(|k| {
                ln_factorial((k + p) as u64) - support_factorials(k)
                    + (k + p) as f64 * (2.0 * m).ln()
            }));
            let closed = lambda_odd(&sq(m), n).unwrap();
            assert_relative_eq!(closed, brute, max_relative = 1e-8);
        }
    }

    #[test]
    fn zero_subtraction_norm_agrees_with_the_arcsine_closed_form() {
        for &m in &[0.1f64, 0.5, 0.9] {
            let arcsine = ((m.asin() / m) / (1.0 - m * m).sqrt()).sqrt();
            assert_relative_eq!(lambda_odd(&sq(m), 0).unwrap(), arcsine, max_relative = 1e-12);
        }
    }

    #[test]
    fn odd_squeezed_limits_and_norms() {
        let photon = odd_squeezed(&sq(0.0), 5).unwrap();
        assert_abs_diff_eq!(photon.amp(1).re, 1.0, epsilon = 1e-15);
        let state = odd_squeezed(&sq(0.5), 81).unwrap();
        assert_relative_eq!(state.norm(), 1.0, max_relative = 1e-10);
        for n in (0..=80).step_by(2) {
            assert_eq!(state.amp(n), C64::ZERO, "even component {n} must vanish");
        }
    }

    #[test]
    fn weak_odd_squeezing_matches_the_two_term_expansion() {
        // |3> coefficient from the series: (1!/sqrt(3!)) (-2 xi) = -sqrt(2/3) xi
        let xi = 0.1;
        let state = odd_squeezed(&sq(xi), 40).unwrap();
        let mut reference = vec![C64::ZERO; 41];
        reference[1] = C64::new(1.0, 0.0);
        reference[3] = C64::new(-(2f64 / 3.0).sqrt() * xi, 0.0);
        let (reference, _) = FockAmplitudes::new(reference).unwrap().normalize().unwrap();
        let fidelity = state.normalize().unwrap().0.fidelity(&reference).unwrap();
        assert!(fidelity >= 1.0 - 10.0 * xi.powi(4));
    }

    #[test]
    fn one_subtracted_odd_squeezed_is_nearly_vacuum_plus_two() {
        let xi = 0.1;
        let state = subtracted_odd_squeezed(&sq(xi), 1, 30).unwrap();
        let distribution = state.photon_distribution();
        assert!(distribution[0] + distribution[2] > 0.99);
        for n in (1..30).step_by(2) {
            assert_eq!(distribution[n], 0.0, "odd component {n} must vanish");
        }
        let ratio = (state.amp(2) / state.amp(0)).re;
        assert_relative_eq!(ratio, -2f64.sqrt() * xi, max_relative = 0.05);
    }

    #[test]
    fn cats_recombine_into_a_coherent_state() {
        let z = co(1.0);
        let even = cat_even(&z, 40);
        let odd = cat_odd(&z, 40).unwrap();
        let cosh_weight = 1f64.cosh().sqrt();
        let sinh_weight = 1f64.sinh().sqrt();
        let scale = (0.5f64).exp().recip();
        let amps: Vec<C64> = (0..=40)
            .map(|n| (even.amp(n) * cosh_weight + odd.amp(n) * sinh_weight) * scale)
            .collect();
        let combined = FockAmplitudes::new(amps).unwrap();
        let reference = coherent(&z, 40);
        assert!(combined.fidelity(&reference).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn cat_supports_and_degenerate_limits() {
        let ground = cat_even(&co(0.0), 4);
        assert_abs_diff_eq!(ground.amp(0).re, 1.0, epsilon = 1e-15);
        assert!(matches!(cat_odd(&co(0.0), 4), Err(Error::Domain(_))));
        let even = cat_even(&co(1.0), 30);
        assert_relative_eq!(even.norm(), 1.0, max_relative = 1e-12);
        for n in (1..=29).step_by(2) {
            assert_eq!(even.amp(n), C64::ZERO);
        }
        let odd = cat_odd(&co(1.0), 31).unwrap();
        assert_relative_eq!(odd.norm(), 1.0, max_relative = 1e-12);
        for n in (0..=30).step_by(2) {
            assert_eq!(odd.amp(n), C64::ZERO);
        }
    }

    #[test]
    fn zero_count_conditional_of_squeezed_vacuum_is_half_parameter_squeezing() {
        let xi = sq(0.6);
        let input = squeezed_vacuum(&xi, 80);
        let decomposition = decompose_output(&input).unwrap();
        let conditional = decomposition.entries[0].conditional_state.as_ref().unwrap();
        let halved = squeezed_vacuum(&sq(0.3), 80).normalize().unwrap().0;
        assert!(conditional.fidelity(&halved).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn weak_squeezing_heralds_single_photons() {
        let xi = 0.01;
        let input = squeezed_vacuum(&sq(xi), 20);
        let decomposition = decompose_output(&input).unwrap();
        let p1 = decomposition.entries[1].probability;
        assert_relative_eq!(p1, (xi / 2.0) * (xi / 2.0), max_relative = 2e-4);
        let conditional = decomposition.entries[1].conditional_state.as_ref().unwrap();
        let photon = FockAmplitudes::fock_state(1, conditional.truncation()).unwrap();
        assert!(conditional.fidelity(&photon).unwrap() >= 1.0 - 10.0 * xi * xi);
    }

    #[test]
    fn success_probabilities_decay_for_the_vacuum_family() {
        for &m in &[0.1, 0.5, 0.9] {
            let trunc = squeezed_vacuum_truncation(&sq(m)).max(20);
            let probabilities = decompose_output(&squeezed_vacuum(&sq(m), trunc))
                .unwrap()
                .probabilities();
            assert!(
                probabilities[0] > probabilities[1] && probabilities[1] > probabilities[2],
                "expected P0 > P1 > P2 at |xi| = {m}, got {:?}",
                &probabilities[..3]
            );
        }
    }

    #[test]
    fn odd_family_counts_peak_at_one_photon() {
        // the odd family starts from |1>-like states, so a single idler count
        // outranks zero counts at every squeezing strength
        for &m in &[0.1, 0.5, 0.9] {
            let trunc = odd_squeezed_truncation(&sq(m)).max(21);
            let probabilities = decompose_output(&odd_squeezed(&sq(m), trunc).unwrap())
                .unwrap()
                .probabilities();
            assert!(
                probabilities[1] > probabilities[0] && probabilities[0] > probabilities[2],
                "expected P1 > P0 > P2 at |xi| = {m}, got {:?}",
                &probabilities[..3]
            );
        }
    }
}
