//! Conditional photon subtraction.
//!
//! Sending `|psi> = sum_n alpha_n |n>` through one port of a balanced beam
//! splitter and counting `n` photons in the other output port leaves the
//! signal mode in the `n`-photon-subtracted version of the *attenuated*
//! state whose amplitudes are `beta_m = alpha_m / 2^(m/2)`. This module
//! builds those conditional states, the probability of each idler count,
//! the full decomposition of the splitter output along idler counts, and a
//! singular-value separability diagnostic on the input amplitudes.
//!
//! All factorial-weighted magnitudes are accumulated in log space so that
//! deep truncations neither overflow nor lose the small-probability tail.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockAmplitudes, SEPARABILITY_THRESHOLD};
use crate::special::{binomial, ln_factorial};

/// Attenuated amplitudes `beta_m = alpha_m / 2^(m/2)`: the effective input
/// seen by the signal mode of a balanced splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedAmplitudes {
    betas: FockAmplitudes,
}

impl ReducedAmplitudes {
    pub fn from_alphas(alphas: &FockAmplitudes) -> Self {
        let betas: Vec<C64> = alphas
            .amps()
            .iter()
            .enumerate()
            .map(|(m, alpha)| alpha * 2f64.powf(-0.5 * m as f64))
            .collect();
        ReducedAmplitudes {
            betas: FockAmplitudes::new(betas).expect("same length as the input"),
        }
    }

    pub fn betas(&self) -> &[C64] {
        self.betas.amps()
    }

    pub fn amplitudes(&self) -> &FockAmplitudes {
        &self.betas
    }
}

/// One idler count in a [`SubtractionDecomposition`].
///
/// `lambda` is the Euclidean norm of the unnormalized subtracted series; the
/// stored state is normalized. Counts outside the input's support carry
/// probability exactly zero and no state, so sequences stay dense.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub n: usize,
    #[serde(rename = "p")]
    pub probability: f64,
    pub lambda: f64,
    #[serde(rename = "state")]
    pub conditional_state: Option<FockAmplitudes>,
}

/// The balanced-splitter output organised by idler photon count.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubtractionDecomposition {
    pub entries: Vec<DecompositionEntry>,
}

impl SubtractionDecomposition {
    /// Total detection probability; 1 up to truncation loss.
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    /// The idler photon-count distribution, dense in `n`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }
}

/// Normalized amplitudes of the `n`-subtracted series together with the log
/// of its Euclidean norm.
fn subtracted_series(
    alphas: &FockAmplitudes,
    n: usize,
    trunc: usize,
) -> Result<(FockAmplitudes, f64)> {
    let mut log_mags = vec![f64::NEG_INFINITY; trunc + 1];
    let mut phases = vec![C64::new(1.0, 0.0); trunc + 1];
    let mut populated = false;
    for k in 0..=trunc {
        let alpha = alphas.amp(k + n);
        if alpha != C64::ZERO {
            populated = true;
            let magnitude = alpha.norm();
            log_mags[k] = 0.5 * (ln_factorial((k + n) as u64) - ln_factorial(k as u64))
                + magnitude.ln();
            phases[k] = alpha / magnitude;
        }
    }
    if !populated {
        return Err(Error::VanishingState {
            subtract: n,
            truncation: alphas.truncation(),
        });
    }
    let peak = log_mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled_norm_sq: f64 = log_mags.iter().map(|m| (2.0 * (m - peak)).exp()).sum();
    let ln_lambda = peak + 0.5 * scaled_norm_sq.ln();
    let scale = scaled_norm_sq.sqrt().recip();
    let amps: Vec<C64> = (0..=trunc)
        .map(|k| phases[k] * ((log_mags[k] - peak).exp() * scale))
        .collect();
    Ok((FockAmplitudes::new(amps)?, ln_lambda))
}

/// The `n`-photon-subtracted state: amplitudes proportional to
/// `sqrt((k+n)!/k!) alpha_(k+n)` on `|k>` for `k = 0..=trunc`, normalized.
///
/// Also returns `lambda_n`, the Euclidean norm of the unnormalized series
/// (the norm of `a^n |psi>` when the window captures the full support).
pub fn subtracted_state(
    alphas: &FockAmplitudes,
    n: usize,
    trunc: usize,
) -> Result<(FockAmplitudes, f64)> {
    let (state, ln_lambda) = subtracted_series(alphas, n, trunc)?;
    Ok((state, ln_lambda.exp()))
}

/// Decompose the balanced-splitter output of `alphas` by idler photon count.
///
/// Each entry pairs the probability `P_n = lambda_n(beta)^2 / (n! |alpha|^2)`
/// of counting `n` idler photons with the normalized conditional signal
/// state, which lives on the truncation `N - n` left by total photon-number
/// conservation.
pub fn decompose_output(alphas: &FockAmplitudes) -> Result<SubtractionDecomposition> {
    let input_norm = alphas.norm();
    if input_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let trunc = alphas.truncation();
    let reduced = ReducedAmplitudes::from_alphas(alphas);
    let mut entries = Vec::with_capacity(trunc + 1);
    for n in 0..=trunc {
        match subtracted_series(reduced.amplitudes(), n, trunc - n) {
            Ok((state, ln_lambda)) => {
                let ln_probability =
                    2.0 * (ln_lambda - input_norm.ln()) - ln_factorial(n as u64);
                entries.push(DecompositionEntry {
                    n,
                    probability: ln_probability.exp(),
                    lambda: ln_lambda.exp(),
                    conditional_state: Some(state),
                });
            }
            Err(Error::VanishingState { .. }) => entries.push(DecompositionEntry {
                n,
                probability: 0.0,
                lambda: 0.0,
                conditional_state: None,
            }),
            Err(other) => return Err(other),
        }
    }
    Ok(SubtractionDecomposition { entries })
}

/// Numerical rank and second singular value of the amplitude matrix whose
/// `(k, n)` entry couples `|k>` and `|n>` through `alpha_(k+n)`.
///
/// Rank 1 means the amplitudes factorize as `alpha_(k+n) sqrt((k+n)!) =
/// delta_k gamma_n`, the condition under which the splitter output stays
/// separable. The matrix is evaluated with rows and columns rescaled by
/// `1/sqrt(k!)` — entry `alpha_(k+n) sqrt(C(k+n, n))` — which leaves the
/// rank unchanged while keeping deep truncations inside floating-point
/// range; the witness is the second singular value of that rescaled matrix.
pub fn separability_rank(alphas: &FockAmplitudes) -> (usize, f64) {
    let trunc = alphas.truncation();
    let dim = trunc + 1;
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        for n in 0..dim {
            let alpha = alphas.amp(k + n);
            if alpha != C64::ZERO {
                matrix[(k, n)] = alpha * binomial((k + n) as u64, n as i64).sqrt();
            }
        }
    }
    let mut singulars: Vec<f64> = matrix.svd(false, false).singular_values.iter().copied().collect();
    singulars.sort_by(|a, b| b.total_cmp(a));
    let leading = singulars.first().copied().unwrap_or(0.0);
    let witness = singulars.get(1).copied().unwrap_or(0.0);
    if leading == 0.0 {
        return (0, 0.0);
    }
    let rank = singulars
        .iter()
        .filter(|s| **s > SEPARABILITY_THRESHOLD * leading)
        .count();
    (rank, witness)
}

fn assert_parity(alphas: &FockAmplitudes, required: usize, label: &str) -> Result<()> {
    for (index, amp) in alphas.amps().iter().enumerate() {
        if index % 2 != required && *amp != C64::ZERO {
            return Err(Error::ParityViolation(format!(
                "{label} input requires amplitude {index} to vanish, got {amp}"
            )));
        }
    }
    Ok(())
}

/// [`decompose_output`] restricted to even-support inputs.
///
/// The conditional state at idler count `n` then has support only on Fock
/// components of parity `n mod 2`; the parity of the input is checked up
/// front and violated components are rejected rather than clamped.
pub fn even_output(alphas: &FockAmplitudes) -> Result<SubtractionDecomposition> {
    assert_parity(alphas, 0, "even")?;
    decompose_output(alphas)
}

/// [`decompose_output`] restricted to odd-support inputs.
///
/// The conditional state at idler count `n` has support only on parity
/// `(n + 1) mod 2`.
pub fn odd_output(alphas: &FockAmplitudes) -> Result<SubtractionDecomposition> {
    assert_parity(alphas, 1, "odd")?;
    decompose_output(alphas)
}
