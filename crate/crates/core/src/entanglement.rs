//! Entanglement of the two output modes.
//!
//! For a pure two-mode output `sum_k c_k |k, N - k>` the Schmidt
//! coefficients are simply `lambda_k = |c_k|^2`, so the von Neumann entropy
//! and the Schmidt parameter follow directly from the photon-number
//! distribution.

use std::f64::consts::LN_2;

use crate::beam_splitter::{holland_burnett_state, output_distribution, BsParams, FockPair, FockPropagator};
use crate::error::{invalid, Result};
use crate::numerics::{hyp2f1_terminating, hyp4f3_terminating, ln_factorial, scan_maximize};

/// Schmidt coefficients with the derived entropy (nats) and Schmidt parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub lambdas: Vec<f64>,
    pub s_n: f64,
    pub k_param: f64,
}

impl SchmidtSpectrum {
    pub fn from_probabilities(lambdas: Vec<f64>) -> Self {
        let s_n = von_neumann_entropy(&lambdas);
        let k_param = schmidt_parameter(&lambdas);
        SchmidtSpectrum { lambdas, s_n, k_param }
    }

    pub fn normalization(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// `-sum p ln p` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(p: &[f64]) -> f64 {
    let s: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    s.max(0.0)
}

/// `1 / sum p^2`.
pub fn schmidt_parameter(p: &[f64]) -> f64 {
    1.0 / p.iter().map(|x| x * x).sum::<f64>()
}

pub fn schmidt_spectrum(pair: FockPair, params: &BsParams) -> SchmidtSpectrum {
    SchmidtSpectrum::from_probabilities(output_distribution(pair, params).probs)
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy of `|1,1>` after a splitter of reflectance `r`.
pub fn entropy_11_closed(r: f64) -> f64 {
    let a = (1.0 - 2.0 * r).powi(2);
    let b = 2.0 * r * (1.0 - r);
    (-xlnx(a) - 2.0 * xlnx(b)).max(0.0)
}

/// Schmidt parameter of `|1,1>` after a splitter of reflectance `r`.
pub fn schmidt_k_11_closed(r: f64) -> f64 {
    let rt = r * (1.0 - r);
    1.0 / (1.0 - 8.0 * rt * (1.0 - 3.0 * rt))
}

/// Largest `s` accepted by [`schmidt_k_hb`].
pub const HB_MAX_S: usize = 60;

/// Schmidt parameter of the balanced output of `|s, s>` through the
/// terminating `4F3(1/2, 1/2, -s, -s; 1, 1/2 - s, 1/2 - s; 1)`.
///
/// Uses `Gamma(s + 1/2) = (2s)! sqrt(pi) / (4^s s!)`, so that
/// `pi (s!)^2 / Gamma(s + 1/2)^2 = (4^s / C(2s, s))^2`.
pub fn schmidt_k_hb(s: usize) -> Result<f64> {
    if s < 2 || s % 2 == 1 {
        return Err(invalid("s", format!("must be even and at least 2, got {s}")));
    }
    if s > HB_MAX_S {
        return Err(invalid("s", format!("exceeds {HB_MAX_S}; terms overflow")));
    }
    let sf = s as f64;
    let half = 0.5 - sf;
    let f = hyp4f3_terminating([0.5, 0.5, -sf, -sf], [1.0, half, half], 1.0)?;
    let ln_central = ln_factorial(2 * s) - 2.0 * ln_factorial(s);
    let ln_prefactor = 2.0 * (2.0 * sf * LN_2 - ln_central);
    Ok((ln_prefactor - f.ln()).exp())
}

/// Schmidt parameter computed from the squared twin-Fock amplitudes.
pub fn schmidt_k_hb_direct(s: usize) -> Result<f64> {
    let state = holland_burnett_state(s, 0.0)?;
    let p: Vec<f64> = state.iter().map(|a| a.amplitude.norm_sqr()).collect();
    Ok(schmidt_parameter(&p))
}

/// Schmidt parameter of `|s1, 0>` after a splitter of reflectance `r`:
/// `1 / ((1 - r)^(2 s1) 2F1(-s1, -s1; 1; (r / (1 - r))^2))`.
pub fn schmidt_k_s0(s1: usize, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("R", format!("must lie in [0, 1), got {r}")));
    }
    let t = 1.0 - r;
    let x = (r / t).powi(2);
    let f = hyp2f1_terminating(s1, -(s1 as f64), 1.0, x)?;
    Ok(1.0 / (2.0 * s1 as f64 * t.ln() + f.ln()).exp())
}

/// `K_max(s1) = 4^s1 (s1!)^2 / (2 s1)!`, attained at `R = 1/2`.
pub fn schmidt_k_s0_max(s1: usize) -> f64 {
    let ln = 2.0 * s1 as f64 * LN_2 + 2.0 * ln_factorial(s1) - ln_factorial(2 * s1);
    ln.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    VonNeumann,
    Schmidt,
}

impl Measure {
    pub fn of(&self, spectrum: &[f64]) -> f64 {
        match self {
            Measure::VonNeumann => von_neumann_entropy(spectrum),
            Measure::Schmidt => schmidt_parameter(spectrum),
        }
    }
}

/// Reflectance in `[0, 1/2]` that maximizes the chosen measure.
///
/// A 401-point scan picks the best bracket, then golden-section search
/// refines it to `|dR| < 1e-7`. The mirror maximizer is `1 - R`. A measure
/// that is constant in `R` (the vacuum input) returns `R = 1/2`.
pub fn argmax_entanglement(pair: FockPair, measure: Measure) -> (f64, f64) {
    let prop = FockPropagator::new(pair);
    let mut buf = vec![0.0; pair.total() + 1];
    let mut f = |r: f64| {
        prop.probabilities_into(r, &mut buf);
        Ok(measure.of(&buf))
    };
    if pair.total() == 0 {
        return (0.5, f(0.5).expect("infallible"));
    }
    scan_maximize(&mut f, 0.0, 0.5, 401, 1e-7).expect("scan on a fixed interval cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const R_K3: f64 = 0.211_324_865_405_187_1; // (1 - 1/sqrt 3) / 2

    #[test]
    fn closed_forms_match_spectrum() {
        let pair = FockPair::new(1, 1).unwrap();
        for i in 0..=200 {
            let r = i as f64 / 200.0;
            let sp = schmidt_spectrum(pair, &BsParams::with_reflectance(r).unwrap());
            assert!((sp.s_n - entropy_11_closed(r)).abs() < 1e-10, "R={r}");
            assert!((sp.k_param - schmidt_k_11_closed(r)).abs() < 1e-10, "R={r}");
        }
    }

    #[test]
    fn named_points() {
        assert!((entropy_11_closed(0.5) - LN_2).abs() < 1e-15);
        assert_eq!(entropy_11_closed(0.0), 0.0);
        assert!((entropy_11_closed(R_K3) - 3f64.ln()).abs() < 1e-12);
        assert!((schmidt_k_11_closed(0.5) - 2.0).abs() < 1e-15);
        assert!((schmidt_k_11_closed(R_K3) - 3.0).abs() < 1e-12);
        assert_eq!(schmidt_k_11_closed(0.0), 1.0);
    }

    #[test]
    fn twin_fock_k_agrees_with_amplitudes() {
        for s in [2usize, 4, 6, 8, 10, 20] {
            let a = schmidt_k_hb(s).unwrap();
            let b = schmidt_k_hb_direct(s).unwrap();
            assert!(((a - b) / b).abs() < 1e-12, "s={s}: {a} vs {b}");
        }
        assert!(schmidt_k_hb(3).is_err());
        assert!(schmidt_k_hb(62).is_err());
        assert!(schmidt_k_hb(60).unwrap().is_finite());
    }

    #[test]
    fn single_port_k_and_its_maximum() {
        assert!((schmidt_k_s0(1, 0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!((schmidt_k_s0(2, 0.5).unwrap() - 8.0 / 3.0).abs() < 1e-14);
        assert!((schmidt_k_s0_max(3) - 3.2).abs() < 1e-13);
        assert!((schmidt_k_s0(4, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(schmidt_k_s0(1, 1.0).is_err());
        let ratio = schmidt_k_s0(50, 0.5).unwrap() / (50.0 * std::f64::consts::PI).sqrt();
        assert!((0.98..=1.02).contains(&ratio));
        for s1 in 1..6 {
            for &r in &[0.1, 0.3, 0.7] {
                let pair = FockPair::new(s1, 0).unwrap();
                let k = schmidt_spectrum(pair, &BsParams::with_reflectance(r).unwrap()).k_param;
                assert!((schmidt_k_s0(s1, r).unwrap() - k).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn argmax_finds_known_extrema() {
        let (r, k) = argmax_entanglement(FockPair::new(1, 1).unwrap(), Measure::Schmidt);
        assert!((r - R_K3).abs() < 1e-6);
        assert!((k - 3.0).abs() < 1e-9);
        let (r, _) = argmax_entanglement(FockPair::new(1, 0).unwrap(), Measure::VonNeumann);
        assert!((r - 0.5).abs() < 1e-6);
        let (r, k) = argmax_entanglement(FockPair::new(0, 0).unwrap(), Measure::Schmidt);
        assert_eq!((r, k), (0.5, 1.0));
    }

    #[test]
    fn entropy_edge_cases() {
        assert_eq!(von_neumann_entropy(&[1.0, 0.0]), 0.0);
        assert!((von_neumann_entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(schmidt_parameter(&[0.5, 0.5]), 2.0);
    }
}
