//! Full bosonic evolution of one- and two-photon Fock states.
//!
//! The transfer matrix acts on annihilation operators as b = G·a, so a
//! creation operator transforms as â_k† = Σ_i G[i,k]·b̂_i†. Output
//! amplitudes over photon configurations follow from matrix permanents with
//! the usual bosonic normalization; a brute-force operator expansion over
//! all ordered terms provides an independent oracle for cross-checking.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bsnet::{TransferMatrix, MODE_COUNT};
use crate::error::{Error, Result};
use crate::occsim::LogicalState;

/// Largest photon number (and permanent dimension) supported.
pub const MAX_PHOTONS: usize = 4;

/// Photon counts per mode, total at most [`MAX_PHOTONS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockConfiguration {
    occupations: [u8; MODE_COUNT],
}

impl FockConfiguration {
    pub fn new(occupations: [u8; MODE_COUNT]) -> Result<Self> {
        let total: u32 = occupations.iter().map(|&n| u32::from(n)).sum();
        if total as usize > MAX_PHOTONS {
            return Err(Error::UnsupportedSize(total as usize));
        }
        Ok(Self { occupations })
    }

    /// One photon in `mode`.
    pub fn single(mode: usize) -> Self {
        let mut occupations = [0; MODE_COUNT];
        occupations[mode] = 1;
        Self { occupations }
    }

    /// Two photons on modes `i` and `j` (equal indices mean a doubly
    /// occupied mode).
    pub fn pair(i: usize, j: usize) -> Self {
        let mut occupations = [0; MODE_COUNT];
        occupations[i] += 1;
        occupations[j] += 1;
        Self { occupations }
    }

    pub fn occupations(&self) -> &[u8; MODE_COUNT] {
        &self.occupations
    }

    pub fn total(&self) -> u32 {
        self.occupations.iter().map(|&n| u32::from(n)).sum()
    }

    /// Occupied modes with multiplicity, ascending.
    pub fn mode_list(&self) -> Vec<usize> {
        let mut modes = Vec::new();
        for (mode, &n) in self.occupations.iter().enumerate() {
            for _ in 0..n {
                modes.push(mode);
            }
        }
        modes
    }

    /// True when every photon sits in a mode accepted by `keep`.
    pub fn confined_to(&self, keep: impl Fn(usize) -> bool) -> bool {
        self.occupations
            .iter()
            .enumerate()
            .all(|(mode, &n)| n == 0 || keep(mode))
    }

    /// True when some mode holds more than one photon.
    pub fn has_bunching(&self) -> bool {
        self.occupations.iter().any(|&n| n > 1)
    }
}

impl std::fmt::Display for FockConfiguration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let modes: Vec<String> = self.mode_list().iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", modes.join(","))
    }
}

/// Two photons entering the network.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoPhotonInput {
    /// Definite injection into modes `k ≤ l` (equal for a doubly occupied
    /// input mode).
    Pair { k: usize, l: usize },
    /// Superposition over the four dual-rail injections 00, 01, 10, 11
    /// with unit-norm complex amplitudes.
    Superposition([Complex64; 4]),
}

impl TwoPhotonInput {
    pub fn pair(k: usize, l: usize) -> Result<Self> {
        if k >= MODE_COUNT || l >= MODE_COUNT {
            return Err(Error::InvalidArgument(format!(
                "input modes ({k}, {l}) out of range"
            )));
        }
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        Ok(Self::Pair { k, l })
    }

    pub fn superposition(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "superposition norm² = {norm}, expected 1"
            )));
        }
        Ok(Self::Superposition(amplitudes))
    }

    /// The dual-rail injection modes for a logical basis state: the control
    /// photon enters mode 0 or 1, the target photon mode 2 or 3.
    pub fn logical(state: LogicalState) -> Self {
        let (k, l) = injection_modes(state);
        Self::Pair { k, l }
    }
}

/// Injection modes (k, l) encoding a logical basis state.
pub fn injection_modes(state: LogicalState) -> (usize, usize) {
    (state.control() as usize, 2 + state.target() as usize)
}

/// Complex amplitudes over output Fock configurations, with squared
/// magnitudes summing to one for a lossless network.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventDistribution {
    amplitudes: BTreeMap<FockConfiguration, Complex64>,
}

impl EventDistribution {
    pub(crate) fn insert(&mut self, config: FockConfiguration, amplitude: Complex64) {
        if amplitude.norm_sqr() > 0.0 {
            self.amplitudes.insert(config, amplitude);
        }
    }

    pub fn amplitude(&self, config: &FockConfiguration) -> Complex64 {
        self.amplitudes
            .get(config)
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    pub fn probability(&self, config: &FockConfiguration) -> f64 {
        self.amplitude(config).norm_sqr()
    }

    pub fn total_probability(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    /// Configurations in ascending order with their amplitudes.
    pub fn iter(&self) -> impl Iterator<Item = (&FockConfiguration, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Largest probability discrepancy against another distribution,
    /// taken over the union of configurations.
    pub fn max_amplitude_gap(&self, other: &Self) -> f64 {
        let mut gap: f64 = 0.0;
        for (config, amp) in self.iter() {
            gap = gap.max((amp - other.amplitude(config)).norm());
        }
        for (config, amp) in other.iter() {
            gap = gap.max((amp - self.amplitude(config)).norm());
        }
        gap
    }
}

/// Permanent of an n×n complex matrix, n ≤ 4, by Ryser's formula.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "permanent needs a square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if n == 0 || n > MAX_PHOTONS {
        return Err(Error::UnsupportedSize(n));
    }
    let mut total = Complex64::ZERO;
    for subset in 1u32..(1 << n) {
        let mut product = Complex64::new(1.0, 0.0);
        for i in 0..n {
            let mut row_sum = Complex64::ZERO;
            for j in 0..n {
                if subset & (1 << j) != 0 {
                    row_sum += m[(i, j)];
                }
            }
            product *= row_sum;
        }
        if subset.count_ones() % 2 == 0 {
            total -= product;
        } else {
            total += product;
        }
    }
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    Ok(total * sign)
}

/// Permanent of a real matrix.
pub fn permanent_real(m: &DMatrix<f64>) -> Result<f64> {
    let lifted = m.map(|v| Complex64::new(v, 0.0));
    permanent(&lifted).map(|p| p.re)
}

fn check_orthogonal(g: &TransferMatrix) -> Result<()> {
    let residual = g.orthogonality_residual();
    if !(residual < 1e-9) {
        return Err(Error::Inconsistent(format!(
            "transfer matrix is not orthogonal: residual {residual:.3e}"
        )));
    }
    Ok(())
}

/// Send a single photon through the network: amplitude G[i,k] on each
/// output mode i.
pub fn evolve_single_photon(g: &TransferMatrix, mode: usize) -> Result<EventDistribution> {
    check_orthogonal(g)?;
    if mode >= MODE_COUNT {
        return Err(Error::InvalidArgument(format!("input mode {mode} out of range")));
    }
    let mut dist = EventDistribution::default();
    for i in 0..MODE_COUNT {
        dist.insert(
            FockConfiguration::single(i),
            Complex64::new(g.entry(i, mode), 0.0),
        );
    }
    Ok(dist)
}

/// Real amplitude map for a definite pair injection, via 2×2 permanents
/// with the bosonic √n! factors.
fn pair_distribution(g: &TransferMatrix, k: usize, l: usize) -> EventDistribution {
    let input_norm = if k == l { std::f64::consts::SQRT_2 } else { 1.0 };
    let mut dist = EventDistribution::default();
    for i in 0..MODE_COUNT {
        for j in i..MODE_COUNT {
            let sub = DMatrix::from_row_slice(
                2,
                2,
                &[g.entry(i, k), g.entry(i, l), g.entry(j, k), g.entry(j, l)],
            );
            let perm = permanent_real(&sub).expect("2x2 permanent");
            let output_norm = if i == j { std::f64::consts::SQRT_2 } else { 1.0 };
            let amp = perm / (output_norm * input_norm);
            dist.insert(FockConfiguration::pair(i, j), Complex64::new(amp, 0.0));
        }
    }
    dist
}

/// Evolve a two-photon input through the network.
///
/// For a definite pair (k, l) the amplitude on the unordered output (i, j)
/// is G[i,k]G[j,l] + G[i,l]G[j,k], with a √2 factor on doubly occupied
/// modes and a 1/√2 input normalization when k = l. Superpositions combine
/// the four dual-rail injection maps linearly.
pub fn evolve_two_photon(g: &TransferMatrix, input: &TwoPhotonInput) -> Result<EventDistribution> {
    check_orthogonal(g)?;
    match input {
        TwoPhotonInput::Pair { k, l } => {
            if *k >= MODE_COUNT || *l >= MODE_COUNT {
                return Err(Error::InvalidArgument(format!(
                    "input modes ({k}, {l}) out of range"
                )));
            }
            Ok(pair_distribution(g, *k, *l))
        }
        TwoPhotonInput::Superposition(amps) => {
            let mut dist = EventDistribution::default();
            let mut combined: BTreeMap<FockConfiguration, Complex64> = BTreeMap::new();
            for (state, coeff) in LogicalState::all().into_iter().zip(amps.iter()) {
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let (k, l) = injection_modes(state);
                for (config, amp) in pair_distribution(g, k, l).iter() {
                    *combined.entry(*config).or_insert(Complex64::ZERO) += coeff * amp;
                }
            }
            for (config, amp) in combined {
                dist.insert(config, amp);
            }
            Ok(dist)
        }
    }
}

/// Independent oracle: expand the product of transformed creation
/// operators over all 64 ordered terms and collect by unordered
/// configuration with the bosonic normalization. Must agree with
/// [`evolve_two_photon`] to 1e-12 entrywise.
pub fn brute_force_distribution(
    g: &TransferMatrix,
    input: &TwoPhotonInput,
) -> Result<EventDistribution> {
    check_orthogonal(g)?;
    match input {
        TwoPhotonInput::Pair { k, l } => {
            if *k >= MODE_COUNT || *l >= MODE_COUNT {
                return Err(Error::InvalidArgument(format!(
                    "input modes ({k}, {l}) out of range"
                )));
            }
            Ok(brute_force_pair(g, *k, *l, Complex64::new(1.0, 0.0)))
        }
        TwoPhotonInput::Superposition(amps) => {
            let mut combined: BTreeMap<FockConfiguration, Complex64> = BTreeMap::new();
            for (state, coeff) in LogicalState::all().into_iter().zip(amps.iter()) {
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let (k, l) = injection_modes(state);
                for (config, amp) in brute_force_pair(g, k, l, *coeff).iter() {
                    *combined.entry(*config).or_insert(Complex64::ZERO) += amp;
                }
            }
            let mut dist = EventDistribution::default();
            for (config, amp) in combined {
                dist.insert(config, amp);
            }
            Ok(dist)
        }
    }
}

fn brute_force_pair(g: &TransferMatrix, k: usize, l: usize, scale: Complex64) -> EventDistribution {
    // Ordered coefficients c[i][j] of b̂_i† b̂_j† from (Σ_i G[i,k] b̂_i†)(Σ_j G[j,l] b̂_j†).
    let mut ordered = [[0.0f64; MODE_COUNT]; MODE_COUNT];
    for i in 0..MODE_COUNT {
        for j in 0..MODE_COUNT {
            ordered[i][j] = g.entry(i, k) * g.entry(j, l);
        }
    }
    let input_norm = if k == l { std::f64::consts::SQRT_2 } else { 1.0 };
    let mut dist = EventDistribution::default();
    for i in 0..MODE_COUNT {
        for j in i..MODE_COUNT {
            // b̂_i†b̂_j†|0⟩ is the normalized state for i≠j; b̂_i†²|0⟩ = √2·|2_i⟩.
            let amp = if i == j {
                std::f64::consts::SQRT_2 * ordered[i][i]
            } else {
                ordered[i][j] + ordered[j][i]
            };
            dist.insert(
                FockConfiguration::pair(i, j),
                scale * amp / input_norm,
            );
        }
    }
    dist
}
