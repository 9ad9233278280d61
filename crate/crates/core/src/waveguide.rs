//! Two coupled waveguides acting as a frequency-dependent beam splitter.
//!
//! For photons of frequencies `w1`, `w2` the detuning `eps = (w2 - w1)/Omega`
//! sets the reflectance `R = sin^2(Omega t/2 sqrt(1 + eps^2)) / (1 + eps^2)`.
//! Averaging the output Schmidt coefficients over the photons' spectra gives
//! the mode weights `Lambda_k` of non-monochromatic inputs.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beam_splitter::{FockPair, FockPropagator, Matrix2};
use crate::entanglement::SchmidtSpectrum;
use crate::error::{invalid, Error, Result};
use crate::numerics::{erfcx, gaussian_expectation, QuadSettings};

const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const ELECTRON_MASS: f64 = 9.109_383_7015e-31;
const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;

/// Coupling frequency `Omega` (rad/s) and interaction time `t_bs` (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideParams {
    pub omega_coupling: f64,
    pub t_bs: f64,
}

impl WaveguideParams {
    pub fn new(omega_coupling: f64, t_bs: f64) -> Result<Self> {
        if !(omega_coupling > 0.0 && omega_coupling.is_finite()) {
            return Err(invalid("omega_coupling", "must be positive and finite"));
        }
        if !(t_bs >= 0.0 && t_bs.is_finite()) {
            return Err(invalid("t_bs", "must be non-negative and finite"));
        }
        Ok(WaveguideParams { omega_coupling, t_bs })
    }

    /// Dimensionless interaction strength `Omega t_bs`.
    pub fn omega_tbs(&self) -> f64 {
        self.omega_coupling * self.t_bs
    }
}

/// Electron medium between the guides, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Effective number of participating electrons.
    pub electron_count: f64,
    /// Modal volume in m^3.
    pub modal_volume: f64,
    /// Overlap `u1 . u2` of the two polarization vectors.
    pub polarization_overlap: f64,
    /// Carrier frequency in rad/s.
    pub center_frequency: f64,
}

/// Coupling frequency `Omega = (u1 . u2) omega_p^2 / omega_0` with the plasma
/// frequency `omega_p^2 = n e^2 / (eps_0 m_e)` of the density `n = N / V`.
///
/// In Gaussian atomic units this is `4 pi n (u1 . u2) / omega_0`.
pub fn omega_from_medium(m: &MediumParams) -> Result<f64> {
    if !(m.modal_volume > 0.0) {
        return Err(invalid("modal_volume", "must be positive"));
    }
    if !(m.electron_count > 0.0) {
        return Err(invalid("electron_count", "must be positive"));
    }
    if !(m.center_frequency > 0.0) {
        return Err(invalid("center_frequency", "must be positive"));
    }
    if !(-1.0..=1.0).contains(&m.polarization_overlap) {
        return Err(invalid("polarization_overlap", "must lie in [-1, 1]"));
    }
    let n = m.electron_count / m.modal_volume;
    let omega_p2 = n * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (VACUUM_PERMITTIVITY * ELECTRON_MASS);
    Ok(m.polarization_overlap * omega_p2 / m.center_frequency)
}

/// Gaussian spectral amplitude of one photon: `|phi(w)|^2` has mean
/// `center` and variance `width^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralProfile {
    pub center: f64,
    pub width: f64,
}

impl SpectralProfile {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) {
            return Err(invalid("center", "must be positive and finite"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("width", "must be positive and finite"));
        }
        Ok(SpectralProfile { center, width })
    }
}

/// Reflectance at detuning `eps` and interaction strength `omega_tbs`.
pub fn reflectance_at(eps: f64, omega_tbs: f64) -> f64 {
    let g = 1.0 + eps * eps;
    (0.5 * omega_tbs * g.sqrt()).sin().powi(2) / g
}

/// Reflectance and splitting phase for photons at `omega1`, `omega2`.
///
/// The phase satisfies `cos(phi) = -eps sqrt(R/T)`; the branch with
/// `sin(phi) >= 0` is taken, so that `eps = 0` gives `phi = pi/2`.
pub fn reflectance(omega1: f64, omega2: f64, wg: &WaveguideParams) -> Result<(f64, f64)> {
    if !(omega1 > 0.0 && omega2 > 0.0) {
        return Err(invalid("omega", "frequencies must be positive"));
    }
    let eps = (omega2 - omega1) / wg.omega_coupling;
    let r = reflectance_at(eps, wg.omega_tbs());
    let t = 1.0 - r;
    if t <= 0.0 {
        return Err(Error::DegeneratePhase);
    }
    let c = (-eps * (r / t).sqrt()).clamp(-1.0, 1.0);
    Ok((r, c.acos()))
}

/// Transfer matrix of two guides with coupling `kappa` and mismatch `delta`
/// over a length `z`.
///
/// `u11 = u22* = cos(Sz) - i cos(eta) sin(Sz)`,
/// `u12 = u21 = -i sin(eta) sin(Sz)` with `S = sqrt(delta^2 + kappa^2)` and
/// `tan(eta) = kappa / delta`.
pub fn coupled_mode_transfer(kappa: f64, delta: f64, z: f64) -> Result<Matrix2> {
    if !(kappa >= 0.0) || !delta.is_finite() || !z.is_finite() || !kappa.is_finite() {
        return Err(invalid("kappa", "need kappa >= 0 and finite arguments"));
    }
    let s = delta.hypot(kappa);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if s == 0.0 {
        return Ok([[one, zero], [zero, one]]);
    }
    let (cos_eta, sin_eta) = (delta / s, kappa / s);
    let (sn, cs) = (s * z).sin_cos();
    let u11 = Complex64::new(cs, -cos_eta * sn);
    let u12 = Complex64::new(0.0, -sin_eta * sn);
    Ok([[u11, u12], [u12, u11.conj()]])
}

/// Distribution of the detuning `eps = mean + scale * y` with `y` weighted
/// by `e^(-y^2)/sqrt(pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSpread {
    pub mean: f64,
    pub scale: f64,
}

impl DetuningSpread {
    /// Two independent Gaussian photons: `w2 - w1` is Gaussian with mean
    /// `c2 - c1` and variance `s1^2 + s2^2`.
    pub fn from_profiles(p1: &SpectralProfile, p2: &SpectralProfile, omega: f64) -> Self {
        DetuningSpread {
            mean: (p2.center - p1.center) / omega,
            scale: (2.0 * (p1.width.powi(2) + p2.width.powi(2))).sqrt() / omega,
        }
    }

    /// Two photons with identical profiles of relative width `sigma/Omega`.
    pub fn identical(sigma_over_omega: f64) -> Self {
        DetuningSpread { mean: 0.0, scale: 2.0 * sigma_over_omega }
    }

    fn eps(&self, y: f64) -> f64 {
        self.mean + self.scale * y
    }
}

fn check_spread(spread: &DetuningSpread) -> Result<()> {
    if !(spread.scale >= 0.0 && spread.scale.is_finite() && spread.mean.is_finite()) {
        return Err(invalid("sigma_over_omega", "must be non-negative and finite"));
    }
    Ok(())
}

/// `Lambda_k` for photons with Gaussian spectra at a waveguide splitter.
///
/// The reflectance depends on the two frequencies only through their
/// difference, so the double spectral integral reduces exactly to a single
/// Gauss-Hermite integral over the detuning.
pub fn averaged_schmidt_modes(
    pair: FockPair,
    wg: &WaveguideParams,
    p1: &SpectralProfile,
    p2: &SpectralProfile,
) -> Result<SchmidtSpectrum> {
    let spread = DetuningSpread::from_profiles(p1, p2, wg.omega_coupling);
    averaged_schmidt_modes_scaled(pair, &spread, wg.omega_tbs())
}

/// `Lambda_k` in dimensionless form: detuning distribution and `Omega t_bs`.
pub fn averaged_schmidt_modes_scaled(
    pair: FockPair,
    spread: &DetuningSpread,
    omega_tbs: f64,
) -> Result<SchmidtSpectrum> {
    check_spread(spread)?;
    if !(omega_tbs >= 0.0 && omega_tbs.is_finite()) {
        return Err(invalid("omega_tbs", "must be non-negative and finite"));
    }
    let prop = FockPropagator::new(pair);
    let dim = pair.total() + 1;
    let e = gaussian_expectation(
        dim,
        |y, out| prop.probabilities_into(reflectance_at(spread.eps(y), omega_tbs), out),
        &QuadSettings::default(),
    )?;
    Ok(SchmidtSpectrum::from_probabilities(e.values))
}

/// Large-`Omega t_bs` limit of `Lambda_k`: all terms oscillating in
/// `Omega t_bs` are dropped.
///
/// At fixed detuning, `lambda_k(a sin^2 psi)` with `a = 1/(1 + eps^2)` is a
/// trigonometric polynomial of degree `N` in `2 psi`. Its constant Fourier
/// term is therefore the exact average over `N + 1` equally spaced phases.
pub fn asymptotic_schmidt_modes(pair: FockPair, spread: &DetuningSpread) -> Result<SchmidtSpectrum> {
    check_spread(spread)?;
    let prop = FockPropagator::new(pair);
    let dim = pair.total() + 1;
    let phases = dim;
    let sin2: Vec<f64> = (0..phases)
        .map(|j| (PI * j as f64 / phases as f64).sin().powi(2))
        .collect();
    let e = gaussian_expectation(
        dim,
        |y, out| {
            let eps = spread.eps(y);
            let a = 1.0 / (1.0 + eps * eps);
            let mut tmp = vec![0.0; dim];
            out.iter_mut().for_each(|o| *o = 0.0);
            for s in &sin2 {
                prop.probabilities_into(a * s, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o += t / phases as f64;
                }
            }
        },
        &QuadSettings::default(),
    )?;
    Ok(SchmidtSpectrum::from_probabilities(e.values))
}

/// Coincidence probability `J = P_{1,1}` of `|1,1>` for `Omega t_bs -> infinity`.
///
/// With `x = Omega / (2 sigma)`:
/// `J = 1 + 3x^2/2 - sqrt(pi) x erfcx(x) (5/4 + 3x^2/2)`.
pub fn coincidence_11_asymptotic(sigma_over_omega: f64) -> Result<f64> {
    if !(sigma_over_omega > 0.0 && sigma_over_omega.is_finite()) {
        return Err(invalid("sigma_over_omega", "must be positive and finite"));
    }
    let x = 0.5 / sigma_over_omega;
    let x2 = x * x;
    // h = 1 - sqrt(pi) x erfcx(x)
    let h = if x < 25.0 {
        1.0 - PI.sqrt() * x * erfcx(x)
    } else {
        // Asymptotic series sum_{m>=1} (-1)^(m+1) (2m-1)!! / (2x^2)^m.
        let mut term = 1.0;
        let mut sum = 0.0;
        for m in 1..40 {
            term *= (2 * m - 1) as f64 / (2.0 * x2);
            let t = if m % 2 == 1 { term } else { -term };
            sum += t;
            if term < 1e-18 {
                break;
            }
        }
        sum
    };
    Ok(-0.25 + (1.25 + 1.5 * x2) * h)
}

/// Entropy and `J` of `|1,1>` in the large-`Omega t_bs` limit.
///
/// The Schmidt weights are `((1 - J)/2, J, (1 - J)/2)`, so
/// `S_N = (1 - J) ln 2 - J ln J - (1 - J) ln(1 - J)`.
pub fn entropy_asymptotic_11(sigma_over_omega: f64) -> Result<(f64, f64)> {
    let j = coincidence_11_asymptotic(sigma_over_omega)?;
    let jc = (1.0 - j).max(0.0);
    let j = j.clamp(0.0, 1.0);
    let jlnj = if j > 0.0 { j * j.ln() } else { 0.0 };
    // (1 - J)^(J - 1) via exp((J - 1) ln(1 - J)), which tends to 1 as J -> 1.
    let pow = if jc > 0.0 { (-jc * jc.ln()).exp() } else { 1.0 };
    let s = jc * std::f64::consts::LN_2 - jlnj + pow.ln();
    Ok((s.max(0.0), j))
}

/// `(P_{1,1}, P_{2,0})` of `|1,1>` in the large-`Omega t_bs` limit.
pub fn coincidence_probs_asymptotic(sigma_over_omega: f64) -> Result<(f64, f64)> {
    let j = coincidence_11_asymptotic(sigma_over_omega)?;
    Ok((j, 0.5 * (1.0 - j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam_splitter::{output_distribution, BsParams};
    use crate::numerics::composite_legendre;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn conventional_limit() {
        let wg = WaveguideParams::new(1.0, 1.3).unwrap();
        let (r, phi) = reflectance(5.0, 5.0, &wg).unwrap();
        assert!((r - (0.65f64).sin().powi(2)).abs() < 1e-15);
        assert!((phi - FRAC_PI_2).abs() < 1e-15);
        let wg = WaveguideParams::new(2.0, PI / 2.0).unwrap();
        assert_eq!(reflectance(5.0, 5.0, &wg), Err(Error::DegeneratePhase));
        assert!((reflectance_at(0.0, PI) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn envelope_symmetry_and_phase_relation() {
        let wg = WaveguideParams::new(1.0, 2.5 * PI).unwrap();
        for &(w1, w2) in &[(10.0, 13.0), (10.0, 10.4), (7.0, 5.5), (3.0, 3.0001)] {
            let eps: f64 = (w2 - w1) / wg.omega_coupling;
            let (r, phi) = reflectance(w1, w2, &wg).unwrap();
            let (r2, _) = reflectance(w2, w1, &wg).unwrap();
            assert!(r <= 1.0 / (1.0 + eps * eps) + 1e-15);
            assert_eq!(r, r2);
            assert!(phi.sin() >= 0.0);
            assert!((phi.cos() + eps * (r / (1.0 - r)).sqrt()).abs() < 1e-12);
        }
        let (r, _) = reflectance(1.0, 4.0, &wg).unwrap();
        assert!(r <= 0.1);
    }

    #[test]
    fn medium_coupling_scale() {
        let m = MediumParams {
            electron_count: 1e28 * 1e-18,
            modal_volume: 1e-18,
            polarization_overlap: 1.0,
            center_frequency: 2.0 * PI * 3e8 / 800e-9,
        };
        let omega = omega_from_medium(&m).unwrap();
        assert!((1e14..=1e17).contains(&omega), "{omega}");
        let doubled = omega_from_medium(&MediumParams { electron_count: 2.0 * m.electron_count, ..m }).unwrap();
        assert!((doubled / omega - 2.0).abs() < 1e-14);
        let zero = omega_from_medium(&MediumParams { polarization_overlap: 0.0, ..m }).unwrap();
        assert_eq!(zero, 0.0);
        assert!(omega_from_medium(&MediumParams { modal_volume: 0.0, ..m }).is_err());
    }

    /// The coupled-mode equations `da/dz = -i [[delta, kappa], [kappa, -delta]] a`
    /// integrated by RK4, as an independent route to the transfer matrix.
    fn rk4_transfer(kappa: f64, delta: f64, z: f64) -> Matrix2 {
        let i = Complex64::new(0.0, 1.0);
        let rhs = |a: [Complex64; 2]| [-i * (delta * a[0] + kappa * a[1]), -i * (kappa * a[0] - delta * a[1])];
        let mut cols = [[Complex64::new(0.0, 0.0); 2]; 2];
        for c in 0..2 {
            let mut a = [Complex64::new(0.0, 0.0); 2];
            a[c] = Complex64::new(1.0, 0.0);
            let steps = 4000;
            let h = z / steps as f64;
            for _ in 0..steps {
                let k1 = rhs(a);
                let k2 = rhs([a[0] + k1[0] * (h / 2.0), a[1] + k1[1] * (h / 2.0)]);
                let k3 = rhs([a[0] + k2[0] * (h / 2.0), a[1] + k2[1] * (h / 2.0)]);
                let k4 = rhs([a[0] + k3[0] * h, a[1] + k3[1] * h]);
                for r in 0..2 {
                    a[r] += (k1[r] + k2[r] * 2.0 + k3[r] * 2.0 + k4[r]) * (h / 6.0);
                }
            }
            cols[c] = a;
        }
        [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
    }

    #[test]
    fn coupled_mode_matrix_solves_the_coupled_equations() {
        for &(kappa, delta, z) in &[(1.0, 0.0, 0.7), (0.8, 0.5, 2.0), (0.0, 1.2, 1.0), (2.0, -0.7, 1.5)] {
            let u = coupled_mode_transfer(kappa, delta, z).unwrap();
            let v = rk4_transfer(kappa, delta, z);
            for r in 0..2 {
                for c in 0..2 {
                    assert!((u[r][c] - v[r][c]).norm() < 1e-10);
                }
            }
            for r in 0..2 {
                for c in 0..2 {
                    let dot: Complex64 = (0..2).map(|l| u[r][l] * u[c][l].conj()).sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((dot - want).norm() < 1e-12);
                }
            }
        }
        let u = coupled_mode_transfer(1.0, 0.0, PI / 4.0).unwrap();
        assert!((u[0][1].norm_sqr() - 0.5).abs() < 1e-15);
        let u = coupled_mode_transfer(1.0, 0.3, 0.0).unwrap();
        assert_eq!(u[0][0], Complex64::new(1.0, 0.0));
        let u = coupled_mode_transfer(0.0, 0.3, 2.0).unwrap();
        assert!((u[0][0].norm() - 1.0).abs() < 1e-15 && u[0][1].norm() == 0.0);
        assert!(coupled_mode_transfer(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn narrow_spectra_reduce_to_a_fixed_splitter() {
        let spread = DetuningSpread::identical(1e-4);
        for (s1, s2) in [(1, 1), (0, 2), (2, 3), (3, 3)] {
            let pair = FockPair::new(s1, s2).unwrap();
            let lam = averaged_schmidt_modes_scaled(pair, &spread, 2.5 * PI).unwrap();
            let d = output_distribution(pair, &BsParams::with_reflectance(0.5).unwrap());
            for (a, b) in lam.lambdas.iter().zip(&d.probs) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn broad_spectra_suppress_splitting() {
        let pair = FockPair::new(1, 1).unwrap();
        let lam = averaged_schmidt_modes_scaled(pair, &DetuningSpread::identical(50.0), 2.5 * PI).unwrap();
        assert!(lam.lambdas[1] > 0.95, "{}", lam.lambdas[1]);
        assert!((lam.normalization() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profile_form_matches_scaled_form() {
        let wg = WaveguideParams::new(2.0, 3.0).unwrap();
        let p1 = SpectralProfile::new(100.0, 0.6).unwrap();
        let p2 = SpectralProfile::new(100.5, 0.9).unwrap();
        let pair = FockPair::new(2, 1).unwrap();
        let a = averaged_schmidt_modes(pair, &wg, &p1, &p2).unwrap();
        // Direct double integral over both frequencies as the oracle.
        let n = pair.total() + 1;
        let prop = FockPropagator::new(pair);
        let mut want = vec![0.0; n];
        for k in 0..n {
            let inner = |w1: f64| {
                composite_legendre(
                    |w2| {
                        let g1 = (-(w1 - p1.center).powi(2) / (2.0 * p1.width.powi(2))).exp()
                            / (2.0 * PI * p1.width.powi(2)).sqrt();
                        let g2 = (-(w2 - p2.center).powi(2) / (2.0 * p2.width.powi(2))).exp()
                            / (2.0 * PI * p2.width.powi(2)).sqrt();
                        let r = reflectance_at((w2 - w1) / wg.omega_coupling, wg.omega_tbs());
                        g1 * g2 * prop.probabilities(r)[k]
                    },
                    p2.center - 10.0 * p2.width,
                    p2.center + 10.0 * p2.width,
                    40,
                    16,
                )
                .unwrap()
            };
            want[k] = composite_legendre(inner, p1.center - 10.0 * p1.width, p1.center + 10.0 * p1.width, 40, 16)
                .unwrap();
        }
        for (x, y) in a.lambdas.iter().zip(&want) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn closed_asymptote_matches_frozen_values() {
        // J and S_N from 40-digit evaluation of the same closed form.
        let cases = [
            (0.05, 0.49518034154895070866, 1.0430150445718731586),
            (0.25, 0.43618277527296859924, 1.0757879633334263923),
            (0.5, 0.41585157061139170838, 1.0838184786748339164),
            (1.0, 0.48833278875679855659, 1.0475355930701123141),
            (3.0, 0.7224520102350616195, 0.78300415615253550334),
            (10.0, 0.89864038333099249281, 0.39831726039411990309),
        ];
        for (s, j, sn) in cases {
            let (got_s, got_j) = entropy_asymptotic_11(s).unwrap();
            assert!((got_j - j).abs() < 1e-12, "J({s})");
            assert!((got_s - sn).abs() < 1e-12, "S({s})");
        }
    }

    #[test]
    fn closed_asymptote_matches_quadrature_asymptote() {
        let pair = FockPair::new(1, 1).unwrap();
        for &s in &[0.01, 0.1, 0.44, 1.0, 3.0, 20.0] {
            let lam = asymptotic_schmidt_modes(pair, &DetuningSpread::identical(s)).unwrap();
            let j = coincidence_11_asymptotic(s).unwrap();
            assert!((lam.lambdas[1] - j).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn asymptote_limits() {
        let (s, j) = entropy_asymptotic_11(1e4).unwrap();
        assert!(j > 0.999 && s < 0.01);
        let (_, j) = entropy_asymptotic_11(1e-5).unwrap();
        assert!((j - 0.5).abs() < 1e-8);
        let (p11, p20) = coincidence_probs_asymptotic(0.7).unwrap();
        assert!((p11 + 2.0 * p20 - 1.0).abs() < 1e-15);
        assert!(entropy_asymptotic_11(0.0).is_err());
    }
}
