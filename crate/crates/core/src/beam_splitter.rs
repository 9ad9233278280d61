//! Fock-state evolution through a lossless two-port beam splitter.
//!
//! The splitter acts on the output creation operators as
//! `b1+ = sqrt(T) a1+ + e^(-i phi) sqrt(R) a2+` and
//! `b2+ = -e^(i phi) sqrt(R) a1+ + sqrt(T) a2+`. An input `|s1, s2>` leaves
//! as `sum_k c_k |k, N - k>` with `N = s1 + s2`; `k` always counts photons
//! in output port 1.
//!
//! Amplitudes are evaluated from a closed expansion in phase factors
//! `e^(-2 i n theta)` whose coefficients are Jacobi polynomials at an
//! argument below -1. A direct binomial expansion of the operator
//! polynomials is kept alongside as an independent check.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::numerics::{binomial, jacobi_reciprocal_expansion, ln_factorial};

/// Largest total photon number accepted by [`FockPair`].
pub const MAX_TOTAL_PHOTONS: usize = 40;

pub type Matrix2 = [[Complex64; 2]; 2];

/// Input photon numbers `(s1, s2)` in the two input ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockPair {
    s1: usize,
    s2: usize,
}

impl FockPair {
    pub fn new(s1: usize, s2: usize) -> Result<Self> {
        if s1 + s2 > MAX_TOTAL_PHOTONS {
            return Err(invalid(
                "s1 + s2",
                format!("total photon number {} exceeds {MAX_TOTAL_PHOTONS}", s1 + s2),
            ));
        }
        Ok(FockPair { s1, s2 })
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> usize {
        self.s2
    }

    pub fn total(&self) -> usize {
        self.s1 + self.s2
    }

    pub fn swapped(&self) -> FockPair {
        FockPair { s1: self.s2, s2: self.s1 }
    }
}

/// Reflectance `R` and splitting phase `phi` of a lossless splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsParams {
    reflectance: f64,
    phase: f64,
}

impl BsParams {
    /// `R` must lie in `[0, 1]`; `phi` is reduced to `[0, 2 pi)`.
    pub fn new(reflectance: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectance) {
            return Err(invalid("R", format!("must lie in [0, 1], got {reflectance}")));
        }
        if !phase.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        Ok(BsParams {
            reflectance,
            phase: phase.rem_euclid(2.0 * PI),
        })
    }

    /// `R` with the symmetric phase `phi = pi/2`.
    pub fn with_reflectance(reflectance: f64) -> Result<Self> {
        Self::new(reflectance, FRAC_PI_2)
    }

    /// The 50:50 splitter with `phi = pi/2`.
    pub fn balanced() -> Self {
        BsParams { reflectance: 0.5, phase: FRAC_PI_2 }
    }

    pub fn reflectance(&self) -> f64 {
        self.reflectance
    }

    pub fn transmittance(&self) -> f64 {
        1.0 - self.reflectance
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// The 2x2 splitter matrix `[[sqrt T, e^(i phi) sqrt R], [-e^(-i phi) sqrt R, sqrt T]]`.
pub fn bs_matrix(params: &BsParams) -> Matrix2 {
    let t = Complex64::new(params.transmittance().sqrt(), 0.0);
    let r = params.reflectance().sqrt();
    let e = Complex64::from_polar(1.0, params.phase());
    [[t, e * r], [-e.conj() * r, t]]
}

/// Output photon-number distribution `P(k)` for `k = 0..=N` photons in port 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    pub probs: Vec<f64>,
}

impl OutputDistribution {
    pub fn total_photons(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn normalization(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mean photon number in output port 1.
    pub fn mean_port1(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// Mean photon number in output port 2.
    pub fn mean_port2(&self) -> f64 {
        self.total_photons() as f64 - self.mean_port1()
    }
}

/// `ln sqrt(m! n! / (k! p!))`.
fn ln_sqrt_factorial_ratio(m: usize, n: usize, k: usize, p: usize) -> f64 {
    0.5 * (ln_factorial(m) + ln_factorial(n) - ln_factorial(k) - ln_factorial(p))
}

/// Coefficient table `A^{k, N-k}_{n, N-n}` for a given `mu`.
///
/// Each entry is `mu^(k-n) sqrt(m! n!/(k! p!)) (1 + mu^2)^(-N/2) (-1)^n S`
/// where `S = sum_j e_j mu^(2j)` uses the exact integer expansion of the
/// Jacobi polynomial, so no cancellation occurs in floating point.
fn coefficient_table(total: usize, mu: f64) -> Vec<Vec<f64>> {
    let alpha = -(1 + total as i64);
    let u = mu * mu;
    let scale = -(total as f64) / 2.0 * (1.0 + u).ln();
    let mut table = vec![vec![0.0; total + 1]; total + 1];
    for (k, row) in table.iter_mut().enumerate() {
        let p = total - k;
        for (n, a) in row.iter_mut().enumerate() {
            let m = total - n;
            let beta = m as i64 - k as i64;
            let e = jacobi_reciprocal_expansion(n, alpha, beta)
                .expect("integer expansion fits i128 up to MAX_TOTAL_PHOTONS");
            let shift = k as i32 - n as i32;
            let s: f64 = if mu == 1.0 {
                let exact: i128 = e.iter().sum();
                exact as f64
            } else {
                e.iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(j, &c)| c as f64 * mu.powi(shift + 2 * j as i32))
                    .sum()
            };
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            *a = sign * s * (ln_sqrt_factorial_ratio(m, n, k, p) + scale).exp();
        }
    }
    table
}

/// Amplitudes `c_k = sum_n A^{s1,s2}_n A^{k,N-k}_n e^(-2 i n theta)`.
fn expansion_amplitudes(pair: FockPair, table: &[Vec<f64>], theta: f64) -> Vec<Complex64> {
    let total = pair.total();
    let phases: Vec<Complex64> = (0..=total)
        .map(|n| Complex64::from_polar(1.0, -2.0 * n as f64 * theta))
        .collect();
    let src = &table[pair.s1];
    (0..=total)
        .map(|k| {
            table[k]
                .iter()
                .zip(src)
                .zip(&phases)
                .map(|((a, b), e)| e * (a * b))
                .sum()
        })
        .collect()
}

/// Precomputed evolution of one input pair at the symmetric phase `phi = pi/2`.
///
/// At that phase the expansion coefficients do not depend on `R`, so a
/// sweep over reflectance costs `O(N^2)` per point after construction.
#[derive(Debug, Clone)]
pub struct FockPropagator {
    pair: FockPair,
    table: Vec<Vec<f64>>,
}

impl FockPropagator {
    pub fn new(pair: FockPair) -> Self {
        FockPropagator {
            pair,
            table: coefficient_table(pair.total(), 1.0),
        }
    }

    pub fn pair(&self) -> FockPair {
        self.pair
    }

    /// Amplitudes `c_k` at reflectance `r` (up to a `k`-independent phase).
    pub fn amplitudes(&self, r: f64) -> Vec<Complex64> {
        let r = r.clamp(0.0, 1.0);
        let theta = r.sqrt().atan2((1.0 - r).sqrt());
        expansion_amplitudes(self.pair, &self.table, theta)
    }

    pub fn probabilities(&self, r: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.pair.total() + 1];
        self.probabilities_into(r, &mut out);
        out
    }

    /// Writes `|c_k|^2` into `out` without allocating; `out.len()` must be `N + 1`.
    pub fn probabilities_into(&self, r: f64, out: &mut [f64]) {
        let r = r.clamp(0.0, 1.0);
        let theta = r.sqrt().atan2((1.0 - r).sqrt());
        let step = Complex64::from_polar(1.0, -2.0 * theta);
        let src = &self.table[self.pair.s1];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut e = Complex64::new(1.0, 0.0);
            for (a, b) in self.table[k].iter().zip(src) {
                acc += e * (a * b);
                e *= step;
            }
            *o = acc.norm_sqr();
        }
    }

    pub fn distribution(&self, r: f64) -> OutputDistribution {
        OutputDistribution { probs: self.probabilities(r) }
    }
}

/// Amplitude `c_{k,p}` of `|k, p>` in the output of `pair`.
///
/// For `phi` in `(0, pi/2]` the expansion is evaluated at the given phase;
/// other phases use `phi = pi/2`, which changes only the phase of `c` and
/// leaves `|c|^2` intact. Returns zero when `k + p != s1 + s2`.
pub fn amplitude_c(k: usize, p: usize, pair: FockPair, params: &BsParams) -> Result<Complex64> {
    let total = pair.total();
    if k + p != total {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = params.reflectance();
    let t = params.transmittance();
    if r == 0.0 || t == 0.0 {
        return Ok(brute_force_amplitudes(pair, params)[k]);
    }
    let phi = params.phase();
    let phi = if phi > 0.0 && phi <= FRAC_PI_2 { phi } else { FRAC_PI_2 };
    let x = phi.cos() * (t / r).sqrt();
    // mu = sqrt(1 + x^2) - x, written to avoid cancellation.
    let mu = 1.0 / ((1.0 + x * x).sqrt() + x);
    let st = t.sqrt() * phi.sin();
    let theta = (1.0 - st * st).max(0.0).sqrt().atan2(st);
    let table = coefficient_table(total, mu);
    Ok(expansion_amplitudes(pair, &table, theta)[k])
}

/// Output amplitudes from direct binomial expansion of
/// `(b1+)^s1 (b2+)^s2 |0> / sqrt(s1! s2!)`.
pub fn brute_force_amplitudes(pair: FockPair, params: &BsParams) -> Vec<Complex64> {
    let (s1, s2) = (pair.s1(), pair.s2());
    let total = pair.total();
    let st = params.transmittance().sqrt();
    let sr = params.reflectance().sqrt();
    let e = Complex64::from_polar(1.0, params.phase());
    // b1+ = st x + e^(-i phi) sr y,  b2+ = -e^(i phi) sr x + st y
    let c1x = Complex64::new(st, 0.0);
    let c1y = e.conj() * sr;
    let c2x = -e * sr;
    let c2y = Complex64::new(st, 0.0);
    let mut coeff = vec![Complex64::new(0.0, 0.0); total + 1];
    for i in 0..=s1 {
        let a = binomial(s1 as f64, i) * c1x.powu(i as u32) * c1y.powu((s1 - i) as u32);
        for j in 0..=s2 {
            let b = binomial(s2 as f64, j) * c2x.powu(j as u32) * c2y.powu((s2 - j) as u32);
            coeff[i + j] += a * b;
        }
    }
    let ln_norm = ln_factorial(s1) + ln_factorial(s2);
    coeff
        .into_iter()
        .enumerate()
        .map(|(k, c)| c * (0.5 * (ln_factorial(k) + ln_factorial(total - k) - ln_norm)).exp())
        .collect()
}

/// `|c_k|^2` from the direct operator expansion.
pub fn brute_force_distribution(pair: FockPair, params: &BsParams) -> OutputDistribution {
    OutputDistribution {
        probs: brute_force_amplitudes(pair, params)
            .iter()
            .map(|c| c.norm_sqr())
            .collect(),
    }
}

/// Output distribution of `pair`. The probabilities do not depend on `phi`.
pub fn output_distribution(pair: FockPair, params: &BsParams) -> OutputDistribution {
    let r = params.reflectance();
    let total = pair.total();
    if r == 0.0 || r == 1.0 {
        let mut probs = vec![0.0; total + 1];
        probs[if r == 0.0 { pair.s1() } else { pair.s2() }] = 1.0;
        return OutputDistribution { probs };
    }
    FockPropagator::new(pair).distribution(r)
}

/// Mean photon numbers in both output ports for the input `|s1, 0>`:
/// `(s1 T, s1 R)`.
pub fn mean_photon_numbers(s1: usize, r: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&r) {
        return Err(invalid("R", format!("must lie in [0, 1], got {r}")));
    }
    let s = s1 as f64;
    Ok((s * (1.0 - r), s * r))
}

/// One component `amplitude |k, p>` of a state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockAmplitude {
    pub k: usize,
    pub p: usize,
    pub amplitude: Complex64,
}

/// Twin-Fock output of `|s, s>` at a 50:50 splitter, as a superposition of
/// `|2n, 2s - 2n>` for `n = 0..=s`. Only even `s` is accepted.
pub fn holland_burnett_state(s: usize, phi: f64) -> Result<Vec<FockAmplitude>> {
    if s == 0 || s % 2 == 1 {
        return Err(invalid("s", format!("must be even and positive, got {s}")));
    }
    if 2 * s > MAX_TOTAL_PHOTONS {
        return Err(invalid("s", format!("2s exceeds {MAX_TOTAL_PHOTONS}")));
    }
    if !phi.is_finite() {
        return Err(invalid("phi", "must be finite"));
    }
    Ok((0..=s)
        .map(|n| {
            let ln_mag = 0.5 * (ln_factorial(2 * n) + ln_factorial(2 * s - 2 * n))
                - s as f64 * 2f64.ln()
                - ln_factorial(n)
                - ln_factorial(s - n);
            FockAmplitude {
                k: 2 * n,
                p: 2 * s - 2 * n,
                amplitude: Complex64::from_polar(ln_mag.exp(), 2.0 * n as f64 * phi),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(max_total: usize) -> Vec<FockPair> {
        let mut v = Vec::new();
        for n in 0..=max_total {
            for s1 in 0..=n {
                v.push(FockPair::new(s1, n - s1).unwrap());
            }
        }
        v
    }

    #[test]
    fn matrix_is_unitary() {
        for &(r, phi) in &[(0.0, 0.3), (0.3, 1.1), (0.5, FRAC_PI_2), (1.0, 4.0)] {
            let u = bs_matrix(&BsParams::new(r, phi).unwrap());
            for i in 0..2 {
                for j in 0..2 {
                    let dot: Complex64 = (0..2).map(|l| u[i][l] * u[j][l].conj()).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn single_photon_splits_as_r_and_t() {
        let pair = FockPair::new(1, 0).unwrap();
        let d = output_distribution(pair, &BsParams::with_reflectance(0.3).unwrap());
        assert!((d.probs[0] - 0.3).abs() < 1e-14);
        assert!((d.probs[1] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn balanced_pair_bunches() {
        let d = output_distribution(FockPair::new(1, 1).unwrap(), &BsParams::balanced());
        assert!((d.probs[0] - 0.5).abs() < 1e-14);
        assert!(d.probs[1].abs() < 1e-14);
        assert!((d.probs[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn expansion_matches_operator_algebra() {
        for pair in pairs(8) {
            for &r in &[0.01, 0.2, 0.5, 0.77, 0.999] {
                let params = BsParams::with_reflectance(r).unwrap();
                let a = output_distribution(pair, &params);
                let b = brute_force_distribution(pair, &params);
                for (x, y) in a.probs.iter().zip(&b.probs) {
                    assert!((x - y).abs() < 1e-13, "{pair:?} R={r}");
                }
            }
        }
    }

    #[test]
    fn general_phase_amplitudes_have_the_same_modulus() {
        for pair in pairs(6) {
            for &r in &[0.1, 0.45, 0.8] {
                for &phi in &[0.2, 0.9, 1.4, FRAC_PI_2] {
                    let params = BsParams::new(r, phi).unwrap();
                    let b = brute_force_distribution(pair, &params);
                    for k in 0..=pair.total() {
                        let c = amplitude_c(k, pair.total() - k, pair, &params).unwrap();
                        assert!((c.norm_sqr() - b.probs[k]).abs() < 1e-12, "{pair:?} R={r} phi={phi} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn forty_photons_stay_normalized() {
        let pair = FockPair::new(20, 20).unwrap();
        for &r in &[0.05, 0.5, 0.93] {
            let d = output_distribution(pair, &BsParams::with_reflectance(r).unwrap());
            assert!((d.normalization() - 1.0).abs() < 1e-10);
            assert!(d.probs.iter().all(|p| *p >= 0.0));
        }
        assert!(FockPair::new(21, 20).is_err());
    }

    #[test]
    fn endpoints_are_exact() {
        let pair = FockPair::new(3, 2).unwrap();
        let d = output_distribution(pair, &BsParams::with_reflectance(0.0).unwrap());
        assert_eq!(d.probs[3], 1.0);
        let d = output_distribution(pair, &BsParams::with_reflectance(1.0).unwrap());
        assert_eq!(d.probs[2], 1.0);
        let c = amplitude_c(2, 3, pair, &BsParams::new(1.0, 0.4).unwrap()).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mismatched_photon_number_gives_zero() {
        let pair = FockPair::new(2, 1).unwrap();
        let c = amplitude_c(2, 2, pair, &BsParams::balanced()).unwrap();
        assert_eq!(c, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mean_photon_numbers_follow_r() {
        let pair = FockPair::new(7, 0).unwrap();
        let params = BsParams::with_reflectance(0.35).unwrap();
        let d = output_distribution(pair, &params);
        let (kbar, pbar) = mean_photon_numbers(7, 0.35).unwrap();
        assert!((d.mean_port1() - kbar).abs() < 1e-12);
        assert!((d.mean_port2() - pbar).abs() < 1e-12);
        assert!(mean_photon_numbers(3, 1.5).is_err());
    }

    #[test]
    fn holland_burnett_matches_balanced_twin_fock_output() {
        let hb = holland_burnett_state(2, 0.0).unwrap();
        assert!((hb[0].amplitude.norm() - 24f64.sqrt() / 8.0).abs() < 1e-15);
        for s in [2usize, 4, 6, 10, 20] {
            let hb = holland_burnett_state(s, 0.7).unwrap();
            let norm: f64 = hb.iter().map(|a| a.amplitude.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            let d = output_distribution(FockPair::new(s, s).unwrap(), &BsParams::balanced());
            for (k, p) in d.probs.iter().enumerate() {
                let want = hb.iter().find(|a| a.k == k).map_or(0.0, |a| a.amplitude.norm_sqr());
                assert!((p - want).abs() < 1e-12, "s={s} k={k}");
            }
        }
        assert!(holland_burnett_state(3, 0.0).is_err());
        assert!(holland_burnett_state(0, 0.0).is_err());
        assert!(holland_burnett_state(22, 0.0).is_err());
    }
}
