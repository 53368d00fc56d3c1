//! Balanced and general two-mode beam splitters.
//!
//! The balanced (50/50) splitter acting on `|0> x |psi>` has a closed form:
//! injecting `n` photons into the second port produces the two-mode state
//! `sum_k 2^(-n/2) sqrt(C(n,k)) i^k |k, n-k>`, and a general single-mode
//! input distributes each Fock layer over the anti-diagonal `n + k = const`
//! with those same coefficients. For arbitrary mixing parameters the splitter
//! is exponentiated exactly, block by block in the total photon number, which
//! the generator conserves.
//!
//! Phase conventions are kept exactly as produced by the generator with
//! `xi = i pi/4` acting on a second-port input (the factor `i^k` rides on the
//! first-mode photon count); nothing is re-phased downstream.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{FockAmplitudes, TwoModeState};
use crate::special::{euler_beta, ln_factorial};

/// Mixing parameter `xi = magnitude * exp(i phase)` of the two-mode rotation
/// `exp(xi a^dag b - conj(xi) a b^dag)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    magnitude: f64,
    phase: f64,
}

impl BeamSplitterParams {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || !phase.is_finite() || magnitude < 0.0 {
            return Err(Error::Domain(format!(
                "beam splitter parameters need a finite non-negative magnitude \
                 and finite phase, got ({magnitude}, {phase})"
            )));
        }
        Ok(BeamSplitterParams { magnitude, phase })
    }

    /// The balanced splitter, `xi = i pi/4`.
    pub fn balanced() -> Self {
        BeamSplitterParams {
            magnitude: std::f64::consts::FRAC_PI_4,
            phase: std::f64::consts::FRAC_PI_2,
        }
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

    /// Transmission amplitude `cos |xi|`.
    pub fn transmissivity(&self) -> f64 {
        self.magnitude.cos()
    }

    /// Reflection amplitude `sin |xi|`.
    pub fn reflectivity(&self) -> f64 {
        self.magnitude.sin()
    }
}

/// `i^k` without trigonometric rounding.
fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Coefficient `2^(-(n+k)/2) sqrt(C(n+k, n))`, evaluated in log space.
fn layer_coefficient(n: usize, k: usize) -> f64 {
    let total = (n + k) as u64;
    (0.5 * (ln_factorial(total) - ln_factorial(n as u64) - ln_factorial(k as u64))
        - 0.5 * total as f64 * std::f64::consts::LN_2)
        .exp()
}

/// The balanced-splitter image of `|0> x |n>`: the two-mode state
/// `sum_k 2^(-n/2) sqrt(C(n,k)) i^k |k, n-k>` on a `(trunc+1)^2` window.
pub fn su2_coherent(n: usize, trunc: usize) -> Result<TwoModeState> {
    if n > trunc {
        return Err(Error::ShapeMismatch(format!(
            "photon number {n} exceeds the window truncation {trunc}"
        )));
    }
    let mut out = TwoModeState::zeros(trunc, trunc);
    for k in 0..=n {
        out.set_amp(k, n - k, layer_coefficient(k, n - k) * i_pow(k));
    }
    Ok(out)
}

/// Balanced splitter applied to `|0> x input` (vacuum in the first port).
///
/// Entry `(n, k)` of the result is `alpha_(k+n) 2^(-(n+k)/2)
/// sqrt(C(n+k, n)) i^n`; everything below the anti-diagonal `n + k = N`
/// stays identically zero. A normalized input yields a normalized output.
pub fn apply_50_50(input: &FockAmplitudes) -> TwoModeState {
    let trunc = input.truncation();
    let mut out = TwoModeState::zeros(trunc, trunc);
    for n in 0..=trunc {
        for k in 0..=(trunc - n) {
            let alpha = input.amp(k + n);
            if alpha != C64::ZERO {
                out.set_amp(n, k, alpha * layer_coefficient(n, k) * i_pow(n));
            }
        }
    }
    out
}

/// General two-mode rotation `exp(xi a^dag b - conj(xi) a b^dag)` applied to
/// an arbitrary two-mode state.
///
/// The generator conserves the total photon number, so it is exponentiated
/// exactly inside each total-number block: the block restriction is
/// phase-similar to a real symmetric tridiagonal matrix (zero diagonal,
/// off-diagonal `|xi| sqrt((m+1)(n-m))`), whose eigendecomposition gives the
/// block unitary. The output window is the full square `(N_a+N_b+1)^2` so
/// that no block is clipped; the operation is then exactly norm-preserving.
pub fn apply_general(params: &BeamSplitterParams, input: &TwoModeState) -> TwoModeState {
    let (na, nb) = input.truncations();
    let total = na + nb;
    let mut out = TwoModeState::zeros(total, total);

    if params.magnitude() == 0.0 {
        for n in 0..=na {
            for m in 0..=nb {
                out.set_amp(n, m, input.amp(n, m));
            }
        }
        return out;
    }

    // theta_m = m (phase - pi/2) maps the Hermitian block generator onto a
    // real symmetric tridiagonal matrix
    let theta_step = params.phase() - std::f64::consts::FRAC_PI_2;

    for n in 0..=total {
        let dim = n + 1;
        let block: Vec<C64> = (0..dim)
            .map(|m| {
                if m <= na && n - m <= nb {
                    input.amp(m, n - m)
                } else {
                    C64::ZERO
                }
            })
            .collect();
        if block.iter().all(|a| *a == C64::ZERO) {
            continue;
        }

        let mut tridiagonal = DMatrix::<f64>::zeros(dim, dim);
        for m in 0..n {
            let coupling = params.magnitude() * (((m + 1) * (n - m)) as f64).sqrt();
            tridiagonal[(m + 1, m)] = coupling;
            tridiagonal[(m, m + 1)] = coupling;
        }
        let eigen = SymmetricEigen::new(tridiagonal);

        // U = D V exp(i Lambda) V^T D^dag acting on the block vector
        let undone: Vec<C64> = (0..dim)
            .map(|m| block[m] * C64::from_polar(1.0, -theta_step * m as f64))
            .collect();
        let mut in_eigenbasis = vec![C64::ZERO; dim];
        for (j, slot) in in_eigenbasis.iter_mut().enumerate() {
            let mut acc = C64::ZERO;
            for (m, amp) in undone.iter().enumerate() {
                acc += eigen.eigenvectors[(m, j)] * amp;
            }
            *slot = acc * C64::from_polar(1.0, eigen.eigenvalues[j]);
        }
        for m in 0..dim {
            let mut acc = C64::ZERO;
            for (j, amp) in in_eigenbasis.iter().enumerate() {
                acc += eigen.eigenvectors[(m, j)] * amp;
            }
            out.set_amp(m, n - m, acc * C64::from_polar(1.0, theta_step * m as f64));
        }
    }
    out
}

/// Probability of finding `m` photons in one balanced-splitter output port
/// and `r` in the other, given `m + r` photons injected into a single input
/// port: `C(m+r, m) / 2^(m+r)`.
pub fn conditional_probability(m: u64, r: u64) -> f64 {
    let total = m + r;
    (ln_factorial(total) - ln_factorial(m) - ln_factorial(r)
        - total as f64 * std::f64::consts::LN_2)
        .exp()
}

/// The same probability written through gamma functions and the Euler beta
/// function; an algebraically equivalent but independently evaluated form
/// kept for cross-checking.
pub fn conditional_probability_beta_form(m: u64, r: u64) -> Result<f64> {
    let (m, r) = (m as f64, r as f64);
    let ln_gammas = crate::special::ln_gamma(r + 0.5)? + crate::special::ln_gamma(m + 0.5)?
        - crate::special::ln_gamma(r + 1.0)?
        - crate::special::ln_gamma(m + 1.0)?;
    let beta = euler_beta(r + 0.5, m + 0.5)?;
    Ok((ln_gammas - (r + m) * std::f64::consts::LN_2 - beta.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Coherent amplitudes built inline so this module's tests do not lean
    /// on the state constructors they help validate.
    fn coherent_amps(z: C64, trunc: usize) -> FockAmplitudes {
        let mut amps = Vec::with_capacity(trunc + 1);
        let mut term = C64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..=trunc {
            amps.push(term);
            term *= z / ((n + 1) as f64).sqrt();
        }
        FockAmplitudes::new(amps).unwrap()
    }

    #[test]
    fn params_validate_and_expose_t_and_r() {
        let params = BeamSplitterParams::new(0.3, -1.2).unwrap();
        assert_relative_eq!(
            params.transmissivity().powi(2) + params.reflectivity().powi(2),
            1.0,
            max_relative = 1e-15
        );
        assert!(BeamSplitterParams::new(-0.1, 0.0).is_err());
        assert!(BeamSplitterParams::new(f64::NAN, 0.0).is_err());
        let xi = BeamSplitterParams::balanced().xi();
        assert_abs_diff_eq!(xi.re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(xi.im, std::f64::consts::FRAC_PI_4, epsilon = 1e-16);
    }

    #[test]
    fn two_photon_image_matches_the_exact_expansion() {
        // |2,0>_B = (|0,2> + i sqrt(2) |1,1> - |2,0>) / 2
        let state = su2_coherent(2, 2).unwrap();
        assert_abs_diff_eq!(state.amp(0, 2).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(state.amp(1, 1).im, 0.5 * 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(state.amp(1, 1).re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(state.amp(2, 0).re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(state.amp(0, 0).re, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn images_are_orthonormal() {
        let trunc = 8;
        let states: Vec<_> = (0..=trunc).map(|n| su2_coherent(n, trunc).unwrap()).collect();
        for (n, sn) in states.iter().enumerate() {
            for (m, sm) in states.iter().enumerate() {
                let overlap = sn.inner(sm).unwrap();
                let expected = if n == m { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(overlap.re, expected, epsilon = 1e-13);
                assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn images_with_photons_are_entangled() {
        for n in 1..=6 {
            let spectrum = su2_coherent(n, 6).unwrap().schmidt();
            assert!(
                spectrum.coefficients[1] > 1e-8,
                "|{n},0> image should not be separable"
            );
        }
    }

    #[test]
    fn single_photon_input_splits_evenly_with_the_phase_on_the_first_mode() {
        let input = FockAmplitudes::fock_state(1, 1).unwrap();
        let out = apply_50_50(&input);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(out.amp(0, 1).re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amp(0, 1).im, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(out.amp(1, 0).im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amp(1, 0).re, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn balanced_output_vanishes_below_the_antidiagonal() {
        let input = coherent_amps(c(0.8, 0.3), 6);
        let out = apply_50_50(&input);
        for n in 0..=6usize {
            for k in 0..=6usize {
                if n + k > 6 {
                    assert_eq!(out.amp(n, k), C64::ZERO);
                }
            }
        }
        assert_relative_eq!(out.norm(), input.norm(), max_relative = 1e-13);
    }

    #[test]
    fn coherent_input_factorizes_into_two_coherent_outputs() {
        let z = c(1.0, 0.0);
        let input = coherent_amps(z, 40);
        let out = apply_50_50(&input);
        let half = 2f64.sqrt().recip();
        let target = TwoModeState::tensor(
            &coherent_amps(C64::i() * z * half, 40),
            &coherent_amps(z * half, 40),
        );
        assert!(out.fidelity(&target).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn zero_mixing_is_the_identity() {
        let input = TwoModeState::tensor(
            &coherent_amps(c(0.5, 0.2), 3),
            &FockAmplitudes::fock_state(1, 2).unwrap(),
        );
        let params = BeamSplitterParams::new(0.0, 0.7).unwrap();
        let out = apply_general(&params, &input);
        for n in 0..=3 {
            for m in 0..=2 {
                assert_abs_diff_eq!((out.amp(n, m) - input.amp(n, m)).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn quarter_turn_swaps_the_modes_up_to_a_phase() {
        // xi = i pi/2 sends |1,0> to e^(i pi/2) |0,1>
        let input = TwoModeState::tensor(
            &FockAmplitudes::fock_state(1, 1).unwrap(),
            &FockAmplitudes::fock_state(0, 0).unwrap(),
        );
        let params = BeamSplitterParams::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
            .unwrap();
        let out = apply_general(&params, &input);
        assert_abs_diff_eq!((out.amp(0, 1) - C64::i()).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amp(1, 0).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn balanced_rotation_reproduces_the_closed_form() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let trunc = 12;
        let amps: Vec<C64> = (0..=trunc)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (input, _) = FockAmplitudes::new(amps).unwrap().normalize().unwrap();
        let closed = apply_50_50(&input);
        let vacuum = FockAmplitudes::fock_state(0, 0).unwrap();
        let rotated = apply_general(
            &BeamSplitterParams::balanced(),
            &TwoModeState::tensor(&vacuum, &input),
        );
        for n in 0..=trunc {
            for k in 0..=trunc {
                assert_abs_diff_eq!(
                    (closed.amp(n, k) - rotated.amp(n, k)).norm(),
                    0.0,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn general_rotation_preserves_the_norm() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..5 {
            let (na, nb) = (rng.gen_range(1..8usize), rng.gen_range(1..8usize));
            let amps: Vec<C64> = (0..(na + 1) * (nb + 1))
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let (input, _) = TwoModeState::new(na, nb, amps).unwrap().normalize().unwrap();
            let params = BeamSplitterParams::new(
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
            .unwrap();
            let out = apply_general(&params, &input);
            assert_relative_eq!(out.norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn general_rotation_on_fock_layers_matches_su2_images() {
        for n in 0..=5 {
            let input = TwoModeState::tensor(
                &FockAmplitudes::fock_state(0, 0).unwrap(),
                &FockAmplitudes::fock_state(n, n.max(1)).unwrap(),
            );
            let out = apply_general(&BeamSplitterParams::balanced(), &input);
            let reference = su2_coherent(n, n.max(1)).unwrap();
            assert!(out.fidelity(&reference).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn conditional_probability_of_two_and_three_is_ten_thirty_seconds() {
        assert_relative_eq!(conditional_probability(2, 3), 0.3125, max_relative = 1e-13);
    }

    #[test]
    fn binomial_and_beta_forms_agree() {
        for total in 0..=40u64 {
            for m in 0..=total {
                let binomial_form = conditional_probability(m, total - m);
                let beta_form = conditional_probability_beta_form(m, total - m).unwrap();
                assert_relative_eq!(binomial_form, beta_form, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn probabilities_for_a_fixed_total_sum_to_one() {
        for total in 0..=20u64 {
            let sum: f64 = (0..=total)
                .map(|m| conditional_probability(m, total - m))
                .sum();
            assert_relative_eq!(sum, 1.0, max_relative = 1e-14);
        }
    }
}
