//! Derived observables built on top of the splitter and the state families:
//! Bell-pair diagnostics for cat-state inputs, joint parity tables,
//! detection-probability sweeps over the squeezing strength, and a root
//! search that matches photon-number components between two subtracted
//! families.

use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beamsplitter::apply_50_50;
use crate::error::{Error, Result};
use crate::fock::{FockAmplitudes, TwoModeState};
use crate::states::{
    cat_even, cat_odd, odd_squeezed, odd_squeezed_truncation_with_tail, squeezed_vacuum,
    squeezed_vacuum_truncation_with_tail, subtracted_odd_squeezed, subtracted_squeezed_vacuum,
    CoherentParam, SqueezingParam, AUTO_TAIL_TARGET,
};
use crate::subtraction::decompose_output;

/// Search bracket for [`match_crossing`], open at both squeezing extremes.
const CROSSING_BRACKET_LO: f64 = 0.05;
/// Upper end of the crossing search bracket.
const CROSSING_BRACKET_HI: f64 = 0.95;
/// Number of coarse scan points used to locate a sign change.
const CROSSING_SCAN_POINTS: usize = 19;
/// Bisection stops once the bracket is narrower than this.
const CROSSING_TOLERANCE: f64 = 1e-7;

/// Which optical cat enters the splitter in [`bell_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    /// Even superposition of `|z>` and `|-z>`: even photon numbers only.
    Even,
    /// Odd superposition: odd photon numbers only.
    Odd,
}

/// Overlaps of a split cat state with the two cat-pair superpositions, plus
/// the joint parity statistics of the output.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BellReport {
    /// Squared overlap with the parity-matched pair (even-even plus odd-odd
    /// branches, weighted `cosh(|z|^2/2)` and `sinh(|z|^2/2)`).
    pub fidelity_even: f64,
    /// Squared overlap with the balanced crossed-parity pair.
    pub fidelity_odd: f64,
    /// Probability that a joint photon-count shows the parity pattern
    /// predicted for the chosen input: equal parities for an even cat,
    /// opposite parities for an odd cat.
    pub parity_agreement: f64,
}

/// One of the two single-mode input families whose subtraction behaviour the
/// sweeps compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFamily {
    /// Squeezed vacuum: even photon numbers only.
    SqueezedVacuum,
    /// Odd-photon squeezed state: odd photon numbers only.
    OddSqueezed,
}

impl InputFamily {
    /// The family member at squeezing `xi`, on its automatic window.
    pub fn input_state(&self, xi: &SqueezingParam) -> Result<FockAmplitudes> {
        self.input_state_at(xi, self.parent_truncation(xi, AUTO_TAIL_TARGET))
    }

    /// The family member at squeezing `xi` on a fixed window `0..=trunc`.
    pub fn input_state_at(&self, xi: &SqueezingParam, trunc: usize) -> Result<FockAmplitudes> {
        match self {
            InputFamily::SqueezedVacuum => Ok(squeezed_vacuum(xi, trunc)),
            InputFamily::OddSqueezed => odd_squeezed(xi, trunc),
        }
    }

    /// Window large enough to hold the family at `xi` within the given
    /// relative tail target.
    pub fn parent_truncation(&self, xi: &SqueezingParam, tail_target: f64) -> usize {
        match self {
            InputFamily::SqueezedVacuum => squeezed_vacuum_truncation_with_tail(xi, tail_target),
            InputFamily::OddSqueezed => odd_squeezed_truncation_with_tail(xi, tail_target),
        }
    }
}

impl fmt::Display for InputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFamily::SqueezedVacuum => "squeezed_vacuum",
            InputFamily::OddSqueezed => "odd_squeezed",
        })
    }
}

/// A subtracted family member: the input family together with how many
/// photons have been removed from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubtractedSpec {
    /// Family the photons are subtracted from.
    pub family: InputFamily,
    /// Number of subtracted photons.
    pub subtract: usize,
}

impl SubtractedSpec {
    /// Bundle a family with a subtraction count.
    pub fn new(family: InputFamily, subtract: usize) -> Self {
        Self { family, subtract }
    }

    /// The normalized subtracted state at squeezing `xi` on `0..=trunc`.
    pub fn state(&self, xi: &SqueezingParam, trunc: usize) -> Result<FockAmplitudes> {
        match self.family {
            InputFamily::SqueezedVacuum => subtracted_squeezed_vacuum(xi, self.subtract, trunc),
            InputFamily::OddSqueezed => subtracted_odd_squeezed(xi, self.subtract, trunc),
        }
    }

    /// Automatic window: the parent's window plus slack for the weight the
    /// subtraction factorials push towards higher photon numbers.
    pub fn auto_truncation(&self, xi: &SqueezingParam, tail_target: f64) -> usize {
        self.family.parent_truncation(xi, tail_target) + 2 * self.subtract + 4
    }
}

impl fmt::Display for SubtractedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} minus {}", self.family, self.subtract)
    }
}

/// Joint photon-number parities of a two-mode state.
///
/// Entry `[p][q]` is the probability that the first mode shows parity `p`
/// and the second parity `q` (`0` even, `1` odd). For a normalized state the
/// four entries sum to one.
pub fn parity_joint_distribution(state: &TwoModeState) -> [[f64; 2]; 2] {
    let (na, nb) = state.truncations();
    let mut table = [[0.0; 2]; 2];
    for n in 0..=na {
        for m in 0..=nb {
            table[n % 2][m % 2] += state.amp(n, m).norm_sqr();
        }
    }
    table
}

/// Send the cat state of parity `which` through the balanced splitter and
/// compare the output against both entangled cat-pair superpositions.
///
/// An even cat input produces the parity-matched pair: even-even and odd-odd
/// cat branches on ports `iz/sqrt(2)` and `z/sqrt(2)`, weighted
/// `cosh(|z|^2/2)` and `sinh(|z|^2/2)`. An odd cat input produces the
/// balanced crossed-parity pair. Both overlaps are reported regardless of
/// `which`; the mismatched one vanishes by parity.
///
/// # Errors
///
/// Odd cats need `z != 0`, so the odd input and, for `z = 0`, the odd
/// overlap are unavailable; in the latter case `fidelity_odd` is exactly
/// zero because a zero-amplitude even cat has no odd-parity component.
pub fn bell_check(z: &CoherentParam, which: CatParity, trunc: usize) -> Result<BellReport> {
    let input = match which {
        CatParity::Even => cat_even(z, trunc),
        CatParity::Odd => cat_odd(z, trunc)?,
    };
    let output = apply_50_50(&input);

    let a_port = CoherentParam::from_complex(C64::i() * z.z() / 2f64.sqrt())?;
    let b_port = CoherentParam::from_complex(z.z() / 2f64.sqrt())?;
    let a_even = cat_even(&a_port, trunc);
    let b_even = cat_even(&b_port, trunc);
    let matched_even = TwoModeState::tensor(&a_even, &b_even);

    let fidelity_even;
    let fidelity_odd;
    if z.magnitude() == 0.0 {
        // The odd branches carry no weight at zero amplitude, so the matched
        // pair degenerates to vacuum-vacuum and the crossed overlap vanishes.
        fidelity_even = output.fidelity(&matched_even)?;
        fidelity_odd = 0.0;
    } else {
        let a_odd = cat_odd(&a_port, trunc)?;
        let b_odd = cat_odd(&b_port, trunc)?;
        let matched_odd = TwoModeState::tensor(&a_odd, &b_odd);
        let half = 0.5 * z.magnitude() * z.magnitude();
        let matched_target = superpose(&[
            (C64::from(half.cosh()), &matched_even),
            (C64::from(half.sinh()), &matched_odd),
        ])?
        .normalize()?
        .0;

        let crossed_weight = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let crossed_target = superpose(&[
            (crossed_weight, &TwoModeState::tensor(&a_odd, &b_even)),
            (crossed_weight, &TwoModeState::tensor(&a_even, &b_odd)),
        ])?
        .normalize()?
        .0;

        fidelity_even = output.fidelity(&matched_target)?;
        fidelity_odd = output.fidelity(&crossed_target)?;
    }

    let table = parity_joint_distribution(&output);
    let parity_agreement = match which {
        CatParity::Even => table[0][0] + table[1][1],
        CatParity::Odd => table[0][1] + table[1][0],
    };

    Ok(BellReport {
        fidelity_even,
        fidelity_odd,
        parity_agreement,
    })
}

/// Weighted sum of equally shaped two-mode states.
fn superpose(terms: &[(C64, &TwoModeState)]) -> Result<TwoModeState> {
    let (first, rest) = terms
        .split_first()
        .ok_or_else(|| Error::Domain("superposition needs at least one term".into()))?;
    let (na, nb) = first.1.truncations();
    for (_, state) in rest {
        if state.truncations() != (na, nb) {
            return Err(Error::ShapeMismatch(format!(
                "superposition terms live on {:?} and {:?}",
                (na, nb),
                state.truncations()
            )));
        }
    }
    let mut amps = vec![C64::ZERO; (na + 1) * (nb + 1)];
    for (weight, state) in terms {
        for n in 0..=na {
            for m in 0..=nb {
                amps[n * (nb + 1) + m] += weight * state.amp(n, m);
            }
        }
    }
    TwoModeState::new(na, nb, amps)
}

/// Probability of counting `n` idler photons when the family member at each
/// sampled squeezing strength enters the splitter.
///
/// Returns `(sample, P_n)` pairs in sample order. Samples must lie in the
/// squeezing domain `[0, 1)`; the evaluation itself is pure, so the samples
/// are processed in parallel.
pub fn probability_sweep(
    family: InputFamily,
    n: usize,
    xi_samples: &[f64],
) -> Result<Vec<(f64, f64)>> {
    sweep_core(family, n, xi_samples, None)
}

/// [`probability_sweep`] with a fixed window for every sample.
pub fn probability_sweep_with_truncation(
    family: InputFamily,
    n: usize,
    xi_samples: &[f64],
    trunc: usize,
) -> Result<Vec<(f64, f64)>> {
    sweep_core(family, n, xi_samples, Some(trunc))
}

fn sweep_core(
    family: InputFamily,
    n: usize,
    xi_samples: &[f64],
    trunc: Option<usize>,
) -> Result<Vec<(f64, f64)>> {
    for &sample in xi_samples {
        if !sample.is_finite() || !(0.0..1.0).contains(&sample) {
            return Err(Error::Domain(format!(
                "sweep sample {sample} outside the squeezing domain [0, 1)"
            )));
        }
    }
    let evaluated: Vec<Result<(f64, f64)>> = xi_samples
        .par_iter()
        .map(|&sample| {
            let xi = SqueezingParam::new(sample, 0.0)?;
            let input = match trunc {
                Some(window) => family.input_state_at(&xi, window)?,
                None => family.input_state(&xi)?,
            };
            let decomposition = decompose_output(&input)?;
            let probability = decomposition
                .entries
                .get(n)
                .map_or(0.0, |entry| entry.probability);
            Ok((sample, probability))
        })
        .collect();
    evaluated.into_iter().collect()
}

/// Render sweep samples as CSV with header `xi,p`.
pub fn sweep_to_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("xi,p\n");
    for &(xi, p) in samples {
        out.push_str(&format!("{xi},{p}\n"));
    }
    out
}

/// The squeezing strength at which two subtracted families place equal
/// weight on the photon number `target_fock`.
///
/// Scans `|xi|` over `[0.05, 0.95]` for a sign change of the weight
/// difference and bisects it down to `1e-7`. Windows are chosen
/// automatically per sample.
///
/// # Errors
///
/// [`Error::DegeneratePair`] when both specs are identical (every `|xi|`
/// matches trivially), [`Error::NoCrossing`] when the difference keeps its
/// sign across the whole bracket.
pub fn match_crossing(target_fock: usize, pair: (SubtractedSpec, SubtractedSpec)) -> Result<f64> {
    crossing_root(target_fock, pair, None)
}

/// [`match_crossing`] with a fixed window for every evaluation, for
/// truncation studies and reproducible overrides.
pub fn match_crossing_with_truncation(
    target_fock: usize,
    pair: (SubtractedSpec, SubtractedSpec),
    trunc: usize,
) -> Result<f64> {
    crossing_root(target_fock, pair, Some(trunc))
}

fn crossing_root(
    target_fock: usize,
    pair: (SubtractedSpec, SubtractedSpec),
    trunc: Option<usize>,
) -> Result<f64> {
    let (first, second) = pair;
    if first == second {
        return Err(Error::DegeneratePair(first.to_string()));
    }
    let weight = |spec: &SubtractedSpec, xi: &SqueezingParam| -> Result<f64> {
        let window = trunc.unwrap_or_else(|| spec.auto_truncation(xi, AUTO_TAIL_TARGET));
        let state = spec.state(xi, window)?;
        Ok(state
            .photon_distribution()
            .get(target_fock)
            .copied()
            .unwrap_or(0.0))
    };
    let gap = |magnitude: f64| -> Result<f64> {
        let xi = SqueezingParam::new(magnitude, 0.0)?;
        Ok(weight(&first, &xi)? - weight(&second, &xi)?)
    };

    let step = (CROSSING_BRACKET_HI - CROSSING_BRACKET_LO) / (CROSSING_SCAN_POINTS - 1) as f64;
    let mut lo = CROSSING_BRACKET_LO;
    let mut gap_lo = gap(lo)?;
    if gap_lo == 0.0 {
        return Ok(lo);
    }
    let mut bracket = None;
    for i in 1..CROSSING_SCAN_POINTS {
        let hi = CROSSING_BRACKET_LO + i as f64 * step;
        let gap_hi = gap(hi)?;
        if gap_hi == 0.0 {
            return Ok(hi);
        }
        if gap_lo.signum() != gap_hi.signum() {
            bracket = Some((lo, gap_lo, hi));
            break;
        }
        lo = hi;
        gap_lo = gap_hi;
    }
    let (mut lo, mut gap_lo, mut hi) = bracket.ok_or(Error::NoCrossing {
        lo: CROSSING_BRACKET_LO,
        hi: CROSSING_BRACKET_HI,
    })?;
    while hi - lo > CROSSING_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let gap_mid = gap(mid)?;
        if gap_mid == 0.0 {
            return Ok(mid);
        }
        if gap_mid.signum() == gap_lo.signum() {
            lo = mid;
            gap_lo = gap_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
