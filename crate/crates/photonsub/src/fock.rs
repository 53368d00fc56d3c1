//! Dense state containers on truncated Fock spaces.
//!
//! A single-mode state is a vector of complex amplitudes over `|0..N>`; a
//! two-mode state is an `(N_a+1) x (N_b+1)` amplitude matrix. Truncations are
//! explicit everywhere: constructors record an upper bound on the probability
//! mass their truncation discards, and operations never grow or shrink a
//! window silently. Dense storage is deliberate; at the truncations this
//! library targets (N <= a few hundred) nothing sparse is worth the
//! complexity.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A two-mode state whose second Schmidt coefficient falls below this
/// threshold is treated as separable (Schmidt rank 1). The value presumes
/// unit-norm states.
pub const SEPARABILITY_THRESHOLD: f64 = 1e-8;

/// Amplitudes of a single-mode state over `|0..truncation>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FockAmplitudesRepr", into = "FockAmplitudesRepr")]
pub struct FockAmplitudes {
    amps: Vec<C64>,
    tail_mass_bound: f64,
}

impl FockAmplitudes {
    /// Wraps an amplitude vector; index n holds the coefficient of `|n>`.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::with_tail_bound(amps, 0.0)
    }

    /// Wraps an amplitude vector together with an upper bound on the
    /// probability mass beyond the truncation.
    pub fn with_tail_bound(amps: Vec<C64>, tail_mass_bound: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ShapeMismatch(
                "amplitude vector must cover at least |0>".into(),
            ));
        }
        if tail_mass_bound.is_nan() || tail_mass_bound < 0.0 || !tail_mass_bound.is_finite() {
            return Err(Error::Domain(format!(
                "tail mass bound must be finite and non-negative, got {tail_mass_bound}"
            )));
        }
        Ok(FockAmplitudes {
            amps,
            tail_mass_bound,
        })
    }

    /// The photon-number basis state `|n>` on a window truncated at `trunc`.
    pub fn fock_state(n: usize, trunc: usize) -> Result<Self> {
        if n > trunc {
            return Err(Error::ShapeMismatch(format!(
                "|{n}> does not fit in a window truncated at {trunc}"
            )));
        }
        let mut amps = vec![C64::ZERO; trunc + 1];
        amps[n] = C64::ONE;
        Self::new(amps)
    }

    /// Highest Fock index covered by the window.
    pub fn truncation(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `|n>`; zero beyond the window.
    pub fn amp(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or(C64::ZERO)
    }

    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unit-norm copy together with the norm that was divided out.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let amps = self.amps.iter().map(|a| a / norm).collect();
        Ok((
            FockAmplitudes {
                amps,
                tail_mass_bound: self.tail_mass_bound,
            },
            norm,
        ))
    }

    /// Inner product `<self|other>`; both windows must match.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::ShapeMismatch(format!(
                "truncations {} and {} differ",
                self.truncation(),
                other.truncation()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2` for states on matching windows.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Probabilities `|c_n|^2` of each photon number in the window.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Expectation of the photon number over the window.
    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct FockAmplitudesRepr {
    truncation: usize,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<FockAmplitudesRepr> for FockAmplitudes {
    type Error = Error;

    fn try_from(repr: FockAmplitudesRepr) -> Result<Self> {
        if repr.amps.len() != repr.truncation + 1 {
            return Err(Error::ShapeMismatch(format!(
                "declared truncation {} but {} amplitudes",
                repr.truncation,
                repr.amps.len()
            )));
        }
        // the interchange format does not carry the tail bound
        FockAmplitudes::new(repr.amps.iter().map(|[re, im]| C64::new(*re, *im)).collect())
    }
}

impl From<FockAmplitudes> for FockAmplitudesRepr {
    fn from(state: FockAmplitudes) -> Self {
        FockAmplitudesRepr {
            truncation: state.truncation(),
            amps: state.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// Amplitudes of a two-mode state over `|0..N_a> x |0..N_b>`, stored row
/// major with the first mode as the row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TwoModeStateRepr", into = "TwoModeStateRepr")]
pub struct TwoModeState {
    na: usize,
    nb: usize,
    amps: Vec<C64>,
}

impl TwoModeState {
    pub fn new(na: usize, nb: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != (na + 1) * (nb + 1) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} amplitudes for truncations ({na}, {nb}), got {}",
                (na + 1) * (nb + 1),
                amps.len()
            )));
        }
        Ok(TwoModeState { na, nb, amps })
    }

    pub fn zeros(na: usize, nb: usize) -> Self {
        TwoModeState {
            na,
            nb,
            amps: vec![C64::ZERO; (na + 1) * (nb + 1)],
        }
    }

    /// Product state `|a> x |b>` with amplitudes `a_n b_m`.
    pub fn tensor(a: &FockAmplitudes, b: &FockAmplitudes) -> Self {
        let (na, nb) = (a.truncation(), b.truncation());
        let mut amps = Vec::with_capacity((na + 1) * (nb + 1));
        for n in 0..=na {
            for m in 0..=nb {
                amps.push(a.amp(n) * b.amp(m));
            }
        }
        TwoModeState { na, nb, amps }
    }

    /// Truncations `(N_a, N_b)` of the two modes.
    pub fn truncations(&self) -> (usize, usize) {
        (self.na, self.nb)
    }

    /// Amplitude of `|n>|m>`; zero outside the window.
    pub fn amp(&self, n: usize, m: usize) -> C64 {
        if n > self.na || m > self.nb {
            C64::ZERO
        } else {
            self.amps[n * (self.nb + 1) + m]
        }
    }

    pub(crate) fn set_amp(&mut self, n: usize, m: usize, value: C64) {
        let nb = self.nb;
        self.amps[n * (nb + 1) + m] = value;
    }

    /// The row of amplitudes with `n` photons in the first mode.
    pub fn row(&self, n: usize) -> &[C64] {
        let w = self.nb + 1;
        &self.amps[n * w..(n + 1) * w]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&self) -> Result<(Self, f64)> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let amps = self.amps.iter().map(|a| a / norm).collect();
        Ok((
            TwoModeState {
                na: self.na,
                nb: self.nb,
                amps,
            },
            norm,
        ))
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if (self.na, self.nb) != (other.na, other.nb) {
            return Err(Error::ShapeMismatch(format!(
                "truncations ({}, {}) and ({}, {}) differ",
                self.na, self.nb, other.na, other.nb
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Photon-number distributions of the two modes (first, second),
    /// obtained by tracing out the partner mode.
    pub fn marginal_distributions(&self) -> (Vec<f64>, Vec<f64>) {
        let mut first = vec![0.0; self.na + 1];
        let mut second = vec![0.0; self.nb + 1];
        for (n, row_mass) in first.iter_mut().enumerate() {
            for (m, column_mass) in second.iter_mut().enumerate() {
                let p = self.amp(n, m).norm_sqr();
                *row_mass += p;
                *column_mass += p;
            }
        }
        (first, second)
    }

    /// Schmidt decomposition of the amplitude matrix via singular values.
    pub fn schmidt(&self) -> SchmidtSpectrum {
        let matrix = DMatrix::from_fn(self.na + 1, self.nb + 1, |n, m| self.amp(n, m));
        let mut coefficients: Vec<f64> = matrix.svd(false, false).singular_values.iter().copied().collect();
        coefficients.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = coefficients.iter().map(|c| c * c).sum();
        let entanglement_entropy = if total > 0.0 {
            -coefficients
                .iter()
                .map(|c| c * c / total)
                .filter(|&p| p > 0.0)
                .map(|p| p * p.ln())
                .sum::<f64>()
        } else {
            0.0
        };
        SchmidtSpectrum {
            coefficients,
            entanglement_entropy,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TwoModeStateRepr {
    na: usize,
    nb: usize,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<TwoModeStateRepr> for TwoModeState {
    type Error = Error;

    fn try_from(repr: TwoModeStateRepr) -> Result<Self> {
        TwoModeState::new(
            repr.na,
            repr.nb,
            repr.amps.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
        )
    }
}

impl From<TwoModeState> for TwoModeStateRepr {
    fn from(state: TwoModeState) -> Self {
        TwoModeStateRepr {
            na: state.na,
            nb: state.nb,
            amps: state.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// Non-increasing Schmidt coefficients of a two-mode state and the
/// entanglement entropy (in nats) of their normalized squares.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub coefficients: Vec<f64>,
    pub entanglement_entropy: f64,
}

impl SchmidtSpectrum {
    /// Schmidt rank 1 within [`SEPARABILITY_THRESHOLD`].
    pub fn is_separable(&self) -> bool {
        self.coefficients
            .get(1)
            .is_none_or(|&second| second < SEPARABILITY_THRESHOLD)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalize_divides_by_euclidean_norm_and_returns_it() {
        let state = FockAmplitudes::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        let (unit, norm) = state.normalize().unwrap();
        assert_abs_diff_eq!(norm, 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(unit.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(unit.amp(0).re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(unit.amp(1).im, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn normalizing_the_zero_vector_fails() {
        let zero = FockAmplitudes::new(vec![C64::ZERO; 4]).unwrap();
        assert_eq!(zero.normalize().unwrap_err(), Error::ZeroNorm);
    }

    #[test]
    fn fock_state_is_a_unit_basis_vector() {
        let state = FockAmplitudes::fock_state(3, 6).unwrap();
        assert_eq!(state.truncation(), 6);
        let dist = state.photon_distribution();
        for (n, p) in dist.iter().enumerate() {
            assert_eq!(*p, if n == 3 { 1.0 } else { 0.0 });
        }
        assert!(FockAmplitudes::fock_state(7, 6).is_err());
    }

    #[test]
    fn amp_is_zero_padded_beyond_the_window() {
        let state = FockAmplitudes::fock_state(0, 2).unwrap();
        assert_eq!(state.amp(5), C64::ZERO);
    }

    #[test]
    fn tensor_multiplies_amplitudes_entrywise() {
        let a = FockAmplitudes::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = FockAmplitudes::new(vec![c(1.0, 0.0), c(0.5, 0.5), c(0.0, -0.5)]).unwrap();
        let product = TwoModeState::tensor(&a, &b);
        assert_eq!(product.truncations(), (1, 2));
        for n in 0..=1 {
            for m in 0..=2 {
                assert_eq!(product.amp(n, m), a.amp(n) * b.amp(m));
            }
        }
        assert_relative_eq!(product.norm(), a.norm() * b.norm(), max_relative = 1e-14);
    }

    #[test]
    fn schmidt_of_a_product_state_is_rank_one() {
        let a = FockAmplitudes::new(vec![c(0.5, 0.2), c(-0.3, 0.1), c(0.0, 0.7)]).unwrap();
        let b = FockAmplitudes::new(vec![c(0.1, 0.0), c(0.4, -0.4)]).unwrap();
        let (a, _) = a.normalize().unwrap();
        let (b, _) = b.normalize().unwrap();
        let spectrum = TwoModeState::tensor(&a, &b).schmidt();
        assert!(spectrum.is_separable());
        assert_relative_eq!(spectrum.coefficients[0], 1.0, max_relative = 1e-12);
        assert_abs_diff_eq!(spectrum.entanglement_entropy, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn schmidt_of_a_balanced_superposition_has_entropy_ln_two() {
        // (|0,1> + i|1,0>) / sqrt(2): two equal Schmidt coefficients
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let state = TwoModeState::new(1, 1, vec![C64::ZERO, c(s, 0.0), c(0.0, s), C64::ZERO]).unwrap();
        let spectrum = state.schmidt();
        assert_relative_eq!(spectrum.coefficients[0], s, max_relative = 1e-12);
        assert_relative_eq!(spectrum.coefficients[1], s, max_relative = 1e-12);
        assert!(!spectrum.is_separable());
        assert_relative_eq!(
            spectrum.entanglement_entropy,
            std::f64::consts::LN_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fidelity_is_phase_invariant_and_shape_checked() {
        let a = FockAmplitudes::new(vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let rotated = FockAmplitudes::new(
            a.amps().iter().map(|x| x * C64::from_polar(1.0, 1.234)).collect(),
        )
        .unwrap();
        assert_relative_eq!(a.fidelity(&rotated).unwrap(), 1.0, max_relative = 1e-14);
        let longer = FockAmplitudes::new(vec![C64::ONE; 3]).unwrap();
        assert!(matches!(a.fidelity(&longer), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn two_mode_fidelity_requires_matching_truncations() {
        let a = TwoModeState::zeros(2, 2);
        let b = TwoModeState::zeros(2, 3);
        assert!(matches!(a.fidelity(&b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn marginals_of_a_normalized_state_sum_to_one() {
        let state = TwoModeState::new(
            1,
            1,
            vec![c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0)],
        )
        .unwrap();
        let (first, second) = state.marginal_distributions();
        assert_relative_eq!(first.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(second.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn single_mode_json_schema_is_truncation_plus_amp_pairs() {
        let state = FockAmplitudes::new(vec![c(1.0, 0.0), c(0.0, -0.5)]).unwrap();
        let value = serde_json::to_value(state.clone()).unwrap();
        assert_eq!(
            value,
            serde_json::json!({"truncation": 1, "amps": [[1.0, 0.0], [0.0, -0.5]]})
        );
        let back: FockAmplitudes = serde_json::from_value(value).unwrap();
        assert_eq!(back.amps(), state.amps());
    }

    #[test]
    fn single_mode_json_rejects_inconsistent_truncation() {
        let text = r#"{"truncation": 3, "amps": [[1.0, 0.0]]}"#;
        assert!(serde_json::from_str::<FockAmplitudes>(text).is_err());
    }

    #[test]
    fn two_mode_json_round_trips_row_major() {
        let state = TwoModeState::new(
            1,
            2,
            vec![
                c(0.1, 0.0),
                c(0.2, 0.0),
                c(0.3, 0.0),
                c(0.0, 0.4),
                c(0.0, 0.5),
                c(0.0, 0.6),
            ],
        )
        .unwrap();
        let value = serde_json::to_value(state.clone()).unwrap();
        assert_eq!(value["na"], 1);
        assert_eq!(value["nb"], 2);
        assert_eq!(value["amps"][2], serde_json::json!([0.3, 0.0]));
        let back: TwoModeState = serde_json::from_value(value).unwrap();
        assert_eq!(back, state);
    }

    #[test]
    fn schmidt_coefficients_square_sum_to_squared_norm() {
        let state = TwoModeState::new(
            2,
            1,
            vec![
                c(0.3, 0.1),
                c(-0.2, 0.0),
                c(0.05, 0.4),
                c(0.0, -0.3),
                c(0.6, 0.0),
                c(0.1, 0.1),
            ],
        )
        .unwrap();
        let total: f64 = state.schmidt().coefficients.iter().map(|x| x * x).sum();
        assert_relative_eq!(total, state.norm().powi(2), max_relative = 1e-12);
    }
}
