//! Hong-Ou-Mandel coincidence curves.
//!
//! Photon pairs are described by the Gaussian joint spectral amplitude
//! `phi(w1, w2) = C exp(-(w1 + w2 - Wp)^2 / 2sp^2 - (w1 - w01)^2 / 2s1^2 - (w2 - w02)^2 / 2s2^2)`.
//! A finite pump width `sp` models type-I down-conversion; `sp -> infinity`
//! factorizes the amplitude into two independent single-photon (Fock) inputs.
//!
//! Delays are the total delay `dtau` between the two detections.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::numerics::{erfcx, gaussian_expectation, scan_roots, QuadSettings};
use crate::waveguide::{reflectance_at, WaveguideParams};

/// Spectral width of the pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpWidth {
    Finite(f64),
    /// The factorized Fock limit.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsaParams {
    pub pump_center: f64,
    pub pump_width: PumpWidth,
    pub center1: f64,
    pub center2: f64,
    pub width1: f64,
    pub width2: f64,
}

impl JsaParams {
    pub fn new(
        pump_center: f64,
        pump_width: PumpWidth,
        center1: f64,
        center2: f64,
        width1: f64,
        width2: f64,
    ) -> Result<Self> {
        let j = JsaParams { pump_center, pump_width, center1, center2, width1, width2 };
        j.validate()?;
        Ok(j)
    }

    /// Two independent photons with Gaussian spectra.
    pub fn fock(center1: f64, center2: f64, width1: f64, width2: f64) -> Result<Self> {
        JsaParams::new(center1 + center2, PumpWidth::Infinite, center1, center2, width1, width2)
    }

    /// Identical independent photons of width `sigma`.
    pub fn identical(center: f64, sigma: f64) -> Result<Self> {
        JsaParams::fock(center, center, sigma, sigma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("width1", self.width1), ("width2", self.width2)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {w}")));
            }
        }
        if let PumpWidth::Finite(w) = self.pump_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("pump_width", format!("must be positive, got {w}")));
            }
        }
        for (name, c) in [
            ("pump_center", self.pump_center),
            ("center1", self.center1),
            ("center2", self.center2),
        ] {
            if !c.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Whether `phi(w1, w2) = phi(w2, w1)`, up to a relative `1e-12`.
    pub fn is_exchange_symmetric(&self) -> bool {
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-12 * scale;
        let wscale = self.width1.max(self.width2);
        let cscale = self.center1.abs().max(self.center2.abs()).max(wscale);
        close(self.width1, self.width2, wscale) && close(self.center1, self.center2, cscale)
    }

    /// Unnormalized `ln phi(w1, w2)` with frequencies measured from `origin`.
    #[cfg(test)]
    fn ln_amplitude(&self, w1: f64, w2: f64, origin: f64) -> f64 {
        let d1 = w1 - (self.center1 - origin);
        let d2 = w2 - (self.center2 - origin);
        let mut v = -d1 * d1 / (2.0 * self.width1 * self.width1) - d2 * d2 / (2.0 * self.width2 * self.width2);
        if let PumpWidth::Finite(sp) = self.pump_width {
            let u = w1 + w2 - (self.pump_center - 2.0 * origin);
            v -= u * u / (2.0 * sp * sp);
        }
        v
    }
}

/// Parameters of the reduced one-dimensional coincidence integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsaDerived {
    pub a_param: f64,
    pub b_param: f64,
    /// Effective bandwidth `Omega_g`.
    pub omega_g: f64,
    /// Effective detuning `Delta omega` between the photons.
    pub delta_omega: f64,
    /// Carrier frequency at which the coupling is evaluated.
    pub omega0_eff: f64,
    /// `|2 sp s1^2 s2^2| / |sp^2 (s2^2 w01 + s1^2 w02)|`, the relative size of
    /// the two numerator terms of `omega0_eff` (0 in the Fock limit).
    pub omega0_term_ratio: f64,
    /// Exact normalization constant relative to the closed-form `C`, minus 1.
    pub normalization_deviation: f64,
}

impl JsaDerived {
    /// Coherence time `2 / (B Omega_g)`.
    pub fn coherence_time(&self) -> f64 {
        2.0 / (self.b_param * self.omega_g)
    }
}

pub fn jsa_derived(j: &JsaParams) -> Result<JsaDerived> {
    j.validate()?;
    let (s1, s2) = (j.width1 * j.width1, j.width2 * j.width2);
    let s = s1 + s2;
    let a = 2.0 * j.width1 * j.width2 / s;
    match j.pump_width {
        PumpWidth::Infinite => Ok(JsaDerived {
            a_param: a,
            b_param: a,
            omega_g: s.sqrt(),
            delta_omega: j.center2 - j.center1,
            omega0_eff: (s2 * j.center1 + s1 * j.center2) / s,
            omega0_term_ratio: 0.0,
            normalization_deviation: 0.0,
        }),
        PumpWidth::Finite(sp) => {
            let p = sp * sp;
            let sigma = s + p;
            let r = p / s;
            let b = a * ((1.0 + r) / (a * a + r)).sqrt();
            let omega_g = ((4.0 * s1 * s2 + s * p) / sigma).sqrt();
            let delta_omega = j.center2 * (p + 2.0 * s1) / sigma - j.center1 * (p + 2.0 * s2) / sigma
                + j.pump_center * (s2 - s1) / sigma;
            let first = 2.0 * sp * s1 * s2;
            let second = p * (s2 * j.center1 + s1 * j.center2);
            let omega0_eff = (first + second) / (4.0 * s1 * s2 + s * p);
            let omega0_term_ratio = if second != 0.0 { (first / second).abs() } else { f64::INFINITY };
            let mismatch = j.pump_center - j.center1 - j.center2;
            let normalization_deviation = (mismatch * mismatch / (2.0 * sigma)).exp_m1();
            Ok(JsaDerived {
                a_param: a,
                b_param: b,
                omega_g,
                delta_omega,
                omega0_eff,
                omega0_term_ratio,
                normalization_deviation,
            })
        }
    }
}

/// Symmetric 2x2 quadratic form `x^T M x - 2 b^T x + c`.
#[derive(Debug, Clone, Copy)]
struct Quadratic {
    m: [[f64; 2]; 2],
    b: [f64; 2],
    c: f64,
}

impl Quadratic {
    /// `-ln phi` as a quadratic form, frequencies measured from `origin`;
    /// `swapped` gives `-ln phi(w2, w1)`.
    fn of_amplitude(j: &JsaParams, origin: f64, swapped: bool) -> Quadratic {
        let inv_p = match j.pump_width {
            PumpWidth::Finite(sp) => 1.0 / (sp * sp),
            PumpWidth::Infinite => 0.0,
        };
        let pc = j.pump_center - 2.0 * origin;
        let (u1, u2) = (1.0 / (j.width1 * j.width1), 1.0 / (j.width2 * j.width2));
        let (c1, c2) = (j.center1 - origin, j.center2 - origin);
        let mut q = Quadratic {
            m: [[0.5 * (u1 + inv_p), 0.5 * inv_p], [0.5 * inv_p, 0.5 * (u2 + inv_p)]],
            b: [0.5 * (c1 * u1 + pc * inv_p), 0.5 * (c2 * u2 + pc * inv_p)],
            c: 0.5 * (c1 * c1 * u1 + c2 * c2 * u2 + pc * pc * inv_p),
        };
        if swapped {
            q.m = [[q.m[1][1], q.m[0][1]], [q.m[1][0], q.m[0][0]]];
            q.b = [q.b[1], q.b[0]];
        }
        q
    }

    fn add(&self, o: &Quadratic) -> Quadratic {
        let mut q = *self;
        for i in 0..2 {
            q.b[i] += o.b[i];
            for k in 0..2 {
                q.m[i][k] += o.m[i][k];
            }
        }
        q.c += o.c;
        q
    }

    fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    fn center(&self) -> [f64; 2] {
        let d = self.det();
        [
            (self.m[1][1] * self.b[0] - self.m[0][1] * self.b[1]) / d,
            (self.m[0][0] * self.b[1] - self.m[1][0] * self.b[0]) / d,
        ]
    }

    /// Minimum value `c - b^T M^-1 b`.
    fn minimum(&self) -> f64 {
        let m = self.center();
        self.c - self.b[0] * m[0] - self.b[1] * m[1]
    }

    /// Eigenvalues and unit eigenvectors (columns).
    fn eigen(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let (a, b, d) = (self.m[0][0], self.m[0][1], self.m[1][1]);
        let theta = 0.5 * (2.0 * b).atan2(a - d);
        let (s, c) = theta.sin_cos();
        let l1 = a * c * c + 2.0 * b * s * c + d * s * s;
        let l2 = a * s * s - 2.0 * b * s * c + d * c * c;
        ([l1, l2], [[c, -s], [s, c]])
    }
}

/// Coincidence probability at a conventional balanced splitter,
/// `1/2 (1 - Re <phi(w1,w2) phi*(w2,w1) e^(-i(w2 - w1) dtau)>)`.
///
/// The exchange overlap is a two-dimensional Gaussian integral; it is
/// evaluated by nested Gauss-Hermite quadrature in the principal axes of the
/// product `phi(w1,w2) phi(w2,w1)` and normalized by the exact norm of `phi`.
pub fn hom_conventional(j: &JsaParams, delta_tau: f64) -> Result<f64> {
    j.validate()?;
    if !delta_tau.is_finite() {
        return Err(invalid("delta_tau", "must be finite"));
    }
    let origin = 0.5 * (j.center1 + j.center2);
    let direct = Quadratic::of_amplitude(j, origin, false);
    let exchange = direct.add(&Quadratic::of_amplitude(j, origin, true));
    let norm = direct.add(&direct);

    // Prefactors pi / sqrt(det M) e^(-min) of the two Gaussian integrals.
    let ln_ratio = -exchange.minimum() + norm.minimum() - 0.5 * exchange.det().ln() + 0.5 * norm.det().ln();
    let prefactor = ln_ratio.exp();

    let center = exchange.center();
    let (lambda, v) = exchange.eigen();
    let k0 = (center[1] - center[0]) * delta_tau;
    let k1 = (v[1][0] - v[0][0]) * delta_tau / lambda[0].sqrt();
    let k2 = (v[1][1] - v[0][1]) * delta_tau / lambda[1].sqrt();

    let settings = QuadSettings::default();
    let inner = |z1: f64| -> Result<f64> {
        let e = gaussian_expectation(1, |z2, out| out[0] = (k0 + k1 * z1 + k2 * z2).cos(), &settings)?;
        Ok(e.values[0])
    };
    // The inner integral is computed once per outer node; errors are carried
    // out of the closure and surfaced afterwards.
    let failure = std::sync::Mutex::new(None);
    let outer = gaussian_expectation(
        1,
        |z1, out| {
            out[0] = match inner(z1) {
                Ok(v) => v,
                Err(e) => {
                    failure.lock().expect("poisoned").get_or_insert(e);
                    0.0
                }
            }
        },
        &settings,
    )?;
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(0.5 * (1.0 - prefactor * outer.values[0]))
}

/// Dimensionless form of the frequency-dependent coincidence integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledHom {
    /// `Omega_g / Omega`.
    pub omega_g_over_omega: f64,
    /// `Omega t_bs`.
    pub omega_tbs: f64,
    pub b_param: f64,
    /// `Delta omega / Omega_g`.
    pub detuning: f64,
}

impl ScaledHom {
    pub fn new(j: &JsaParams, wg: &WaveguideParams) -> Result<Self> {
        let d = jsa_derived(j)?;
        Ok(ScaledHom {
            omega_g_over_omega: d.omega_g / wg.omega_coupling,
            omega_tbs: wg.omega_tbs(),
            b_param: d.b_param,
            detuning: d.delta_omega / d.omega_g,
        })
    }

    /// Identical photons: `B = 1`, no detuning.
    pub fn identical(omega_g_over_omega: f64, omega_tbs: f64) -> Self {
        ScaledHom { omega_g_over_omega, omega_tbs, b_param: 1.0, detuning: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        check_ratio(self.omega_g_over_omega)?;
        check_tbs(self.omega_tbs)?;
        if !(self.b_param > 0.0 && self.b_param <= 1.0 + 1e-12) {
            return Err(invalid("b_param", format!("must lie in (0, 1], got {}", self.b_param)));
        }
        if !self.detuning.is_finite() {
            return Err(invalid("detuning", "must be finite"));
        }
        Ok(())
    }

    /// Coherence time `2 / B` in units of `1 / Omega_g`.
    pub fn coherence_time(&self) -> f64 {
        2.0 / self.b_param
    }

    fn r(&self, y: f64) -> f64 {
        reflectance_at(self.omega_g_over_omega * y, self.omega_tbs)
    }

    /// Coincidence probability at the scaled delay `x = Omega_g dtau`:
    /// `<(T^2 + R^2)(y + y0)> - 2B e^(-y0^2) <T(By) R(By) cos(B x y)>`
    /// over `y ~ e^(-y^2)/sqrt(pi)`.
    pub fn coincidence(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if !x.is_finite() {
            return Err(invalid("delay", "must be finite"));
        }
        let (b, y0) = (self.b_param, self.detuning);
        let e = gaussian_expectation(
            2,
            |y, out| {
                let r = self.r(y + y0);
                out[0] = (1.0 - r) * (1.0 - r) + r * r;
                let rb = self.r(b * y);
                out[1] = (1.0 - rb) * rb * (b * x * y).cos();
            },
            &QuadSettings::default(),
        )?;
        let p = e.values[0] - 2.0 * b * (-y0 * y0).exp() * e.values[1];
        Ok(snap_to_zero(p))
    }
}

/// Rounding can push a perfect dip a few ulps below zero.
fn snap_to_zero(p: f64) -> f64 {
    if p < 0.0 && p > -1e-12 {
        0.0
    } else {
        p
    }
}

fn check_ratio(g: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(invalid("omega_g_over_omega", format!("must be non-negative and finite, got {g}")));
    }
    Ok(())
}

fn check_tbs(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("omega_tbs", format!("must be non-negative and finite, got {t}")));
    }
    Ok(())
}

/// Coincidence probability at a waveguide splitter, normalized so that
/// `t_bs = 0` gives 1.
pub fn hom_frequency_dependent(j: &JsaParams, wg: &WaveguideParams, delta_tau: f64) -> Result<f64> {
    let scaled = ScaledHom::new(j, wg)?;
    let omega_g = jsa_derived(j)?.omega_g;
    scaled.coincidence(omega_g * delta_tau)
}

/// Moments `(<R>, <R^2>)` of the reflectance over `eps = g y`.
pub fn reflectance_moments(omega_g_over_omega: f64, omega_tbs: f64) -> Result<(f64, f64)> {
    check_ratio(omega_g_over_omega)?;
    check_tbs(omega_tbs)?;
    let e = gaussian_expectation(
        2,
        |y, out| {
            let r = reflectance_at(omega_g_over_omega * y, omega_tbs);
            out[0] = r;
            out[1] = r * r;
        },
        &QuadSettings::default(),
    )?;
    Ok((e.values[0], e.values[1]))
}

/// Zero-delay coincidence of identical photons,
/// `(<T> - <R>)^2 + 4 (<R^2> - <R>^2)`.
pub fn hom_identical_zero_delay(j: &JsaParams, wg: &WaveguideParams) -> Result<f64> {
    j.validate()?;
    if !j.is_exchange_symmetric() {
        return Err(Error::NonSymmetricJsa(format!(
            "widths ({}, {}) and centers ({}, {}) must coincide",
            j.width1, j.width2, j.center1, j.center2
        )));
    }
    let d = jsa_derived(j)?;
    let (r1, r2) = reflectance_moments(d.omega_g / wg.omega_coupling, wg.omega_tbs())?;
    let mean_diff = 1.0 - 2.0 * r1;
    Ok(snap_to_zero(mean_diff * mean_diff + 4.0 * (r2 - r1 * r1)))
}

/// Mean reflectance `<R>` of identical photons with bandwidth ratio
/// `g = Omega_g / Omega`.
pub fn mean_reflectance(omega_g_over_omega: f64, omega_tbs: f64) -> Result<f64> {
    Ok(reflectance_moments(omega_g_over_omega, omega_tbs)?.0)
}

/// Large-`Omega t_bs` limit of [`mean_reflectance`]:
/// `sqrt(pi) / (2g) erfcx(1/g)`, with the value `1/2` at `g = 0`.
pub fn mean_reflectance_asymptotic(omega_g_over_omega: f64) -> Result<f64> {
    check_ratio(omega_g_over_omega)?;
    let g = omega_g_over_omega;
    if g == 0.0 {
        return Ok(0.5);
    }
    Ok(PI.sqrt() / (2.0 * g) * erfcx(1.0 / g))
}

/// Scan step for the balanced-splitter root search, in units of `Omega t_bs`.
const BALANCED_SCAN_STEP: f64 = 0.05;

/// All `Omega t_bs` in `[0, max_omega_tbs]` with `<R> = 1/2`.
pub fn balanced_tbs(omega_g_over_omega: f64, max_omega_tbs: f64) -> Result<Vec<f64>> {
    balanced_tbs_in(omega_g_over_omega, 0.0, max_omega_tbs)
}

/// Balanced `Omega t_bs` values restricted to `[lo, hi]`.
pub fn balanced_tbs_in(omega_g_over_omega: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
    check_ratio(omega_g_over_omega)?;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(invalid("max_omega_tbs", format!("need 0 <= lo < hi < inf, got [{lo}, {hi}]")));
    }
    scan_roots(
        |t| Ok(mean_reflectance(omega_g_over_omega, t)? - 0.5),
        lo,
        hi,
        BALANCED_SCAN_STEP,
        1e-9,
    )
}

/// The balanced `Omega t_bs` in `[0, max_omega_tbs]` closest to `target`.
///
/// A window of one period `2 pi` on each side of the target is searched
/// first; any root found there is nearer than every root outside it.
pub fn balanced_tbs_nearest(omega_g_over_omega: f64, target: f64, max_omega_tbs: f64) -> Result<Option<f64>> {
    if !(target >= 0.0 && target <= max_omega_tbs) {
        return Err(invalid("omega_tbs_target", format!("must lie in [0, {max_omega_tbs}], got {target}")));
    }
    let nearest = |roots: Vec<f64>| {
        roots
            .into_iter()
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
    };
    let lo = (target - 2.0 * PI).max(0.0);
    let hi = (target + 2.0 * PI).min(max_omega_tbs);
    if let Some(r) = nearest(balanced_tbs_in(omega_g_over_omega, lo, hi)?) {
        return Ok(Some(r));
    }
    if lo == 0.0 && hi == max_omega_tbs {
        return Ok(None);
    }
    Ok(nearest(balanced_tbs(omega_g_over_omega, max_omega_tbs)?))
}

/// A sampled coincidence curve.
///
/// `delays` and `coherence_time` share one unit: seconds for curves built
/// from [`hom_curve`], `1 / Omega_g` for [`hom_curve_scaled`].
#[derive(Debug, Clone, PartialEq)]
pub struct HomCurve {
    pub delays: Vec<f64>,
    pub p12: Vec<f64>,
    pub coherence_time: f64,
    /// `None` when the grid lacks a zero-delay or a plateau sample.
    pub visibility: Option<f64>,
}

fn build_curve(delays: &[f64], coherence_time: f64, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<HomCurve> {
    let p12 = delays.par_iter().map(|&d| f(d)).collect::<Result<Vec<_>>>()?;
    let mut curve = HomCurve { delays: delays.to_vec(), p12, coherence_time, visibility: None };
    curve.visibility = visibility(&curve).ok();
    Ok(curve)
}

pub fn hom_curve(j: &JsaParams, wg: &WaveguideParams, delays: &[f64]) -> Result<HomCurve> {
    let scaled = ScaledHom::new(j, wg)?;
    let omega_g = jsa_derived(j)?.omega_g;
    build_curve(delays, scaled.coherence_time() / omega_g, |d| scaled.coincidence(omega_g * d))
}

/// Curve over scaled delays `Omega_g dtau`.
pub fn hom_curve_scaled(p: &ScaledHom, scaled_delays: &[f64]) -> Result<HomCurve> {
    p.validate()?;
    build_curve(scaled_delays, p.coherence_time(), |x| p.coincidence(x))
}

/// `V = (P(dtau >> tau_c) - P(0)) / P(dtau >> tau_c)`.
///
/// The plateau is read at the largest delay, which must be at least ten
/// coherence times.
pub fn visibility(curve: &HomCurve) -> Result<f64> {
    let tc = curve.coherence_time;
    let zero_tol = 1e-9 * tc;
    let p0 = curve
        .delays
        .iter()
        .zip(&curve.p12)
        .find(|(d, _)| d.abs() <= zero_tol)
        .map(|(_, p)| *p)
        .ok_or(Error::IncompleteCurve("zero delay"))?;
    let (d_far, p_far) = curve
        .delays
        .iter()
        .zip(&curve.p12)
        .max_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .ok_or(Error::IncompleteCurve("zero delay"))?;
    if d_far.abs() < 10.0 * tc {
        return Err(Error::IncompleteCurve("a delay of at least ten coherence times"));
    }
    Ok((p_far - p0) / p_far)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::composite_legendre;
    use crate::waveguide::reflectance;
    use std::f64::consts::FRAC_PI_2;

    const FIVE_HALVES_PI: f64 = 5.0 * FRAC_PI_2;

    fn spdc(sigma: f64, sp: f64) -> JsaParams {
        JsaParams::new(2.0e3, PumpWidth::Finite(sp), 1.0e3, 1.0e3, sigma, sigma).unwrap()
    }

    #[test]
    fn derived_parameter_limits() {
        let d = jsa_derived(&JsaParams::identical(100.0, 2.0).unwrap()).unwrap();
        assert_eq!((d.a_param, d.b_param), (1.0, 1.0));
        assert!((d.omega_g - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(d.delta_omega, 0.0);
        assert_eq!(d.omega0_eff, 100.0);

        let d = jsa_derived(&spdc(1.5, 0.7)).unwrap();
        assert!((d.b_param - 1.0).abs() < 1e-15);
        assert!(d.delta_omega.abs() < 1e-12);

        // A very wide pump approaches the Fock limit.
        let fin = JsaParams::new(3.0, PumpWidth::Finite(1e6), 1.0, 1.4, 0.8, 1.3).unwrap();
        let inf = JsaParams { pump_width: PumpWidth::Infinite, ..fin };
        let (a, b) = (jsa_derived(&fin).unwrap(), jsa_derived(&inf).unwrap());
        assert!((a.b_param - b.b_param).abs() < 1e-9);
        assert!((a.omega_g - b.omega_g).abs() < 1e-9);
        assert!((a.delta_omega - b.delta_omega).abs() < 1e-9);
        assert!((a.omega0_eff - b.omega0_eff).abs() < 1e-5);
        assert!(b.b_param < 1.0 && b.b_param > 0.0);
    }

    #[test]
    fn normalization_against_exact_gaussian_norm() {
        // The closed-form C is exact when the pump is centered on w01 + w02.
        let j = JsaParams::new(2.5, PumpWidth::Finite(0.6), 1.0, 1.5, 0.4, 0.9).unwrap();
        assert_eq!(jsa_derived(&j).unwrap().normalization_deviation, 0.0);
        let j = JsaParams { pump_center: 3.1, ..j };
        let dev = jsa_derived(&j).unwrap().normalization_deviation;
        let norm = composite_legendre(
            |a| {
                composite_legendre(|b| (2.0 * j.ln_amplitude(a, b, 0.0)).exp(), -6.0, 9.0, 60, 20).unwrap()
            },
            -6.0,
            9.0,
            60,
            20,
        )
        .unwrap();
        let (s1, s2, sp) = (j.width1, j.width2, 0.6f64);
        let c2 = (s1 * s1 + s2 * s2 + sp * sp).sqrt() / (PI * s1 * s2 * sp);
        let exact_c = 1.0 / norm.sqrt();
        assert!((exact_c / c2.sqrt() - 1.0 - dev).abs() < 1e-10, "{} vs {dev}", exact_c / c2.sqrt() - 1.0);
    }

    #[test]
    fn conventional_dip_of_identical_photons() {
        let sigma = 0.8;
        let j = JsaParams::identical(5.0e3, sigma).unwrap();
        assert!(hom_conventional(&j, 0.0).unwrap().abs() < 1e-12);
        let dw = sigma / 2f64.sqrt();
        for &t in &[0.3, 1.0 / dw, 2.0, 4.0] {
            let want = 0.5 * (1.0 - (-(dw * t).powi(2)).exp());
            assert!((hom_conventional(&j, t).unwrap() - want).abs() < 1e-10);
        }
        assert!((hom_conventional(&j, 60.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conventional_general_jsa_matches_reduced_form() {
        for j in [
            JsaParams::new(2.0, PumpWidth::Finite(0.7), 1.0, 1.2, 0.5, 0.9).unwrap(),
            JsaParams::fock(1.0, 1.3, 0.6, 1.1).unwrap(),
            spdc(0.4, 0.25),
        ] {
            let d = jsa_derived(&j).unwrap();
            let y0 = d.delta_omega / d.omega_g;
            for &t in &[0.0, 0.5, 1.5, 3.0] {
                let x = d.b_param * d.omega_g * t;
                let want = 0.5 * (1.0 - d.b_param * (-y0 * y0).exp() * (-0.25 * x * x).exp());
                let got = hom_conventional(&j, t).unwrap();
                assert!((got - want).abs() < 1e-10, "{j:?} dtau={t}: {got} vs {want}");
            }
        }
    }

    /// Direct two-dimensional integral of the coincidence probability with
    /// frequency-dependent `R(w1, w2)`, independent of the reduced form.
    fn direct_coincidence(j: &JsaParams, wg: &WaveguideParams, dtau: f64) -> f64 {
        let lo = j.center1.min(j.center2) - 9.0 * j.width1.max(j.width2);
        let hi = j.center1.max(j.center2) + 9.0 * j.width1.max(j.width2);
        let integrate = |f: &dyn Fn(f64, f64) -> f64| {
            composite_legendre(|a| composite_legendre(|b| f(a, b), lo, hi, 48, 16).unwrap(), lo, hi, 48, 16).unwrap()
        };
        let phi = |a: f64, b: f64| j.ln_amplitude(a, b, 0.0).exp();
        let refl = |a: f64, b: f64| reflectance(a, b, wg).map(|x| x.0).unwrap();
        let norm = integrate(&|a, b| phi(a, b).powi(2));
        let direct = integrate(&|a, b| {
            let r = refl(a, b);
            phi(a, b).powi(2) * ((1.0 - r).powi(2) + r * r)
        });
        let cross = integrate(&|a, b| {
            let r12 = refl(a, b);
            let r21 = refl(b, a);
            phi(a, b) * phi(b, a) * (1.0 - r12) * r21 * ((b - a) * dtau).cos()
        });
        (direct - 2.0 * cross) / norm
    }

    #[test]
    fn reduced_integral_matches_direct_double_integral() {
        let wg = WaveguideParams::new(1.0, FIVE_HALVES_PI).unwrap();
        for (j, dtau) in [
            (JsaParams::identical(50.0, 1.0).unwrap(), 0.0),
            (JsaParams::identical(50.0, 1.0).unwrap(), 1.3),
            (JsaParams::fock(50.0, 50.5, 1.0, 1.0).unwrap(), 0.7),
            (JsaParams::fock(50.0, 50.5, 1.0, 2.0).unwrap(), 0.0),
            (JsaParams::new(100.2, PumpWidth::Finite(0.5), 50.0, 50.3, 1.0, 2.0).unwrap(), 0.4),
        ] {
            let got = hom_frequency_dependent(&j, &wg, dtau).unwrap();
            let want = direct_coincidence(&j, &wg, dtau);
            assert!((got - want).abs() < 1e-8, "{j:?}: {got} vs {want}");
        }
    }

    #[test]
    fn narrow_band_reduces_to_constant_splitter() {
        let j = JsaParams::new(2.0, PumpWidth::Finite(0.7), 1.0, 1.2, 0.5, 0.9).unwrap();
        let d = jsa_derived(&j).unwrap();
        let wg = WaveguideParams::new(d.omega_g * 1e4, FIVE_HALVES_PI / (d.omega_g * 1e4)).unwrap();
        for i in 0..20 {
            let t = 0.25 * i as f64;
            let y0 = d.delta_omega / d.omega_g;
            let x = d.b_param * d.omega_g * t;
            let want = 0.5 * (1.0 - d.b_param * (-y0 * y0).exp() * (-0.25 * x * x).exp());
            assert!((hom_frequency_dependent(&j, &wg, t).unwrap() - want).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_length_coupler_gives_unit_coincidence() {
        let j = spdc(1.0, 0.5);
        let wg = WaveguideParams::new(1.0, 0.0).unwrap();
        for t in [0.0, 0.3, 5.0] {
            assert!((hom_frequency_dependent(&j, &wg, t).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_delay_fluctuation_identity() {
        let j = JsaParams::identical(0.0, 1.0 / 2f64.sqrt()).unwrap(); // Omega_g = 1
        let t = balanced_tbs_nearest(1.0, FIVE_HALVES_PI, 40.0).unwrap().unwrap();
        let wg = WaveguideParams::new(1.0, t).unwrap();
        let p0 = hom_identical_zero_delay(&j, &wg).unwrap();
        let fd = hom_frequency_dependent(&j, &wg, 0.0).unwrap();
        assert!((p0 - fd).abs() < 1e-9);
        assert!(p0 > 1e-3);
        let (r1, r2) = reflectance_moments(1.0, t).unwrap();
        assert!((r1 - 0.5).abs() < 1e-8);
        assert!((p0 - 4.0 * (r2 - r1 * r1)).abs() < 1e-8);

        let asym = JsaParams::fock(0.0, 0.1, 1.0, 1.0).unwrap();
        assert!(matches!(hom_identical_zero_delay(&asym, &wg), Err(Error::NonSymmetricJsa(_))));
    }

    #[test]
    fn mean_reflectance_limits() {
        for t in [0.3, 1.0, 2.5, 7.0] {
            assert!((mean_reflectance(0.0, t).unwrap() - (0.5 * t).sin().powi(2)).abs() < 1e-15);
        }
        // The slowest oscillation has period 2 pi in Omega t_bs; averaging over
        // one period at large Omega t_bs isolates the limit.
        for g in [0.5, 1.0, 2.0] {
            let n = 32;
            let far: f64 = (0..n)
                .map(|i| mean_reflectance(g, 400.0 + 2.0 * PI * i as f64 / n as f64).unwrap())
                .sum::<f64>()
                / n as f64;
            assert!((far - mean_reflectance_asymptotic(g).unwrap()).abs() < 2e-4, "g={g}");
        }
        // Direct quadrature of <1/(1 + g^2 y^2)> / 2.
        let g = 0.7;
        let direct = composite_legendre(
            |y| 0.5 * (-y * y).exp() / PI.sqrt() / (1.0 + g * g * y * y),
            -10.0,
            10.0,
            40,
            20,
        )
        .unwrap();
        assert!((mean_reflectance_asymptotic(g).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn balanced_roots() {
        let roots = balanced_tbs(0.0, 10.0).unwrap();
        let want = [FRAC_PI_2, 3.0 * FRAC_PI_2, 5.0 * FRAC_PI_2];
        assert_eq!(roots.len(), want.len());
        for (r, w) in roots.iter().zip(want) {
            assert!((r - w).abs() < 1e-8);
        }
        let roots = balanced_tbs(1.0, 40.0).unwrap();
        assert!(!roots.is_empty());
        for r in &roots {
            assert!((mean_reflectance(1.0, *r).unwrap() - 0.5).abs() < 1e-8);
        }
        assert!(balanced_tbs(3.0, 40.0).unwrap().is_empty());
        let near = balanced_tbs_nearest(1.0, 20.0, 40.0).unwrap().unwrap();
        let best = roots.iter().copied().min_by(|a, b| (a - 20.0).abs().total_cmp(&(b - 20.0).abs())).unwrap();
        assert!((near - best).abs() < 1e-8);
        assert_eq!(balanced_tbs_nearest(3.0, 5.0, 40.0).unwrap(), None);
    }

    #[test]
    fn curves_and_visibility() {
        let ideal = ScaledHom::identical(0.0, FIVE_HALVES_PI);
        let grid: Vec<f64> = (0..=100).map(|i| 0.25 * i as f64).collect();
        let curve = hom_curve_scaled(&ideal, &grid).unwrap();
        assert!((curve.visibility.unwrap() - 1.0).abs() < 1e-12);
        assert!(curve.p12.iter().all(|p| (0.0..=1.0).contains(p)));

        let t = balanced_tbs_nearest(1.0, FIVE_HALVES_PI, 40.0).unwrap().unwrap();
        let real = ScaledHom::identical(1.0, t);
        let curve = hom_curve_scaled(&real, &grid).unwrap();
        assert!(curve.visibility.unwrap() < 1.0);
        let (r1, r2) = reflectance_moments(1.0, t).unwrap();
        let t2 = 1.0 - 2.0 * r1 + r2;
        assert!((curve.p12.last().unwrap() - 2.0 * t2).abs() < 1e-3);

        let short = hom_curve_scaled(&ideal, &[0.0, 1.0, 2.0]).unwrap();
        assert!(short.visibility.is_none());
        assert!(matches!(visibility(&short), Err(Error::IncompleteCurve(_))));
        let no_zero = hom_curve_scaled(&ideal, &[1.0, 30.0]).unwrap();
        assert!(matches!(visibility(&no_zero), Err(Error::IncompleteCurve(_))));
    }

    #[test]
    fn physical_units_curve_matches_scaled_curve() {
        let j = JsaParams::identical(3.0e3, 0.9).unwrap();
        let wg = WaveguideParams::new(2.0, 1.1).unwrap();
        let d = jsa_derived(&j).unwrap();
        let delays: Vec<f64> = (0..=40).map(|i| i as f64 / d.omega_g).collect();
        let a = hom_curve(&j, &wg, &delays).unwrap();
        let b = hom_curve_scaled(&ScaledHom::new(&j, &wg).unwrap(), &(0..=40).map(|i| i as f64).collect::<Vec<_>>())
            .unwrap();
        assert_eq!(a.p12, b.p12);
        assert!((a.coherence_time * d.omega_g - b.coherence_time).abs() < 1e-12);
        assert!((a.visibility.unwrap() - b.visibility.unwrap()).abs() < 1e-15);
    }
}
