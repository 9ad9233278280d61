use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use super::figures;
use super::output::{number_json, Column, Dataset};
use super::{CliError, Command, DipModel, DipTbs, Grid, HomDipArgs, MeasureArg, Tbs};
use crate::beam_splitter::{output_distribution, BsParams, FockPair};
use crate::entanglement::{argmax_entanglement, schmidt_parameter, von_neumann_entropy, Measure, SchmidtSpectrum};
use crate::hom::{
    balanced_tbs_nearest, hom_conventional, hom_curve_scaled, jsa_derived, reflectance_moments, JsaParams,
    PumpWidth, ScaledHom,
};
use crate::waveguide::{asymptotic_schmidt_modes, averaged_schmidt_modes_scaled, DetuningSpread};

pub(crate) const EQ_FOCK: &str =
    "lambda_k(R) = |c_{k,N-k}|^2, amplitudes from Jacobi polynomials P_n^(k-n, s1+s2-k-n)";
pub(crate) const EQ_ENTROPY: &str = "S_N = -sum_k lambda_k ln lambda_k";
pub(crate) const EQ_SCHMIDT: &str = "K = 1 / sum_k lambda_k^2";
pub(crate) const EQ_REFLECTANCE: &str = "R(eps) = sin^2(Omega t_bs/2 sqrt(1 + eps^2)) / (1 + eps^2)";
pub(crate) const EQ_AVERAGED: &str = "Lambda_k = integral |phi(w1, w2)|^2 lambda_k(R(w1, w2)) dw1 dw2";
pub(crate) const EQ_SPECTRUM: &str = "phi_i(w) = (2 pi)^(-1/4) sigma_i^(-1/2) exp(-(w - w0i)^2 / (4 sigma_i^2))";
pub(crate) const EQ_ASYMPTOTE: &str = "Omega t_bs -> infinity: oscillating terms in Omega t_bs averaged out";
pub(crate) const EQ_J: &str =
    "J = 1 + 3/8 (Omega/sigma)^2 - sqrt(pi)/16 (Omega/sigma)^3 (3 + 10 (sigma/Omega)^2) erfc(Omega/2sigma) e^((Omega/2sigma)^2)";
pub(crate) const EQ_S_J: &str = "S_N = ln(2 (1 - J)^(J - 1) / (2J)^J)";
pub(crate) const EQ_JSA: &str =
    "phi(w1, w2) = C exp(-(w1 + w2 - Wp)^2/2sp^2 - (w1 - w01)^2/2s1^2 - (w2 - w02)^2/2s2^2)";
pub(crate) const EQ_CONVENTIONAL: &str =
    "P12 = 1/2 (1 - Re integral phi(w1, w2) phi*(w2, w1) exp(-i (w2 - w1) dtau))";
pub(crate) const EQ_DIP: &str =
    "P12 = integral [e^(-(y - dw/Og)^2) (T^2 + R^2)(y) - 2B e^(-(dw/Og)^2) T(By) R(By) e^(-y^2) cos(B dtau Og y)] dy / sqrt(pi)";
pub(crate) const EQ_DIP_PARAMS: &str =
    "A = 2 s1 s2/(s1^2 + s2^2), B = A sqrt((1 + sp^2/(s1^2+s2^2)) / (A^2 + sp^2/(s1^2+s2^2))), Og = sqrt((4 s1^2 s2^2 + (s1^2 + s2^2) sp^2) / (s1^2 + s2^2 + sp^2)), eps = (Og/Omega) y";
pub(crate) const EQ_CONSTANT_DIP: &str = "P12 = 1/2 (1 - B e^(-(dw/Og)^2) e^(-(B Og dtau)^2 / 4))";
pub(crate) const EQ_VISIBILITY: &str = "V = (P12(dtau >> tau_c) - P12(0)) / P12(dtau >> tau_c)";
pub(crate) const EQ_MEAN_R: &str = "<R> = integral e^(-y^2)/sqrt(pi) R(eps = (Og/Omega) y) dy";

pub(crate) fn pair(s1: usize, s2: usize) -> Result<FockPair, CliError> {
    Ok(FockPair::new(s1, s2)?)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_unit(name: &str, v: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(usage(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<(), CliError> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(usage(format!("{name} must be non-negative and finite, got {v}")));
    }
    Ok(())
}

fn jsa_from(a: &HomDipArgs) -> Result<JsaParams, CliError> {
    let pump = match a.sigma_p.0 {
        Some(w) => PumpWidth::Finite(w),
        None => PumpWidth::Infinite,
    };
    let pc = a.pump_center.unwrap_or(a.center1 + a.center2);
    Ok(JsaParams::new(pc, pump, a.center1, a.center2, a.sigma1, a.sigma2)?)
}

/// Checks every parameter of `cmd` before anything is computed.
pub(crate) fn validate(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Evolve(a) => {
            pair(a.s1, a.s2)?;
            check_unit("r", a.r)?;
            if !a.phi.is_finite() {
                return Err(usage("phi must be finite"));
            }
        }
        Command::EntropySweep(a) => {
            pair(a.s1, a.s2)?;
            a.r_grid.check_within("r-grid", 0.0, 1.0)?;
        }
        Command::Stats(a) => {
            pair(a.s1, a.s2)?;
            match (a.r, a.sigma_over_omega) {
                (Some(r), None) => {
                    check_unit("r", r)?;
                    if a.omega_tbs.is_some() {
                        return Err(usage("--omega-tbs applies only with --sigma-over-omega"));
                    }
                }
                (None, Some(s)) => {
                    check_nonneg("sigma-over-omega", s)?;
                    if a.omega_tbs.is_none() {
                        return Err(usage("--sigma-over-omega needs --omega-tbs"));
                    }
                }
                _ => return Err(usage("give exactly one of --r and --sigma-over-omega")),
            }
        }
        Command::WaveguideEntropy(a) => {
            pair(a.s1, a.s2)?;
            match (a.sigma_over_omega, a.sigma_grid) {
                (Some(s), None) => check_nonneg("sigma-over-omega", s)?,
                (None, Some(g)) => g.check_within("sigma-grid", 0.0, f64::MAX)?,
                _ => return Err(usage("give one of --sigma-over-omega and --sigma-grid")),
            }
            match (a.omega_tbs, a.omega_tbs_grid) {
                (Some(_), None) => {}
                (None, Some(g)) => g.check_within("omega-tbs-grid", 0.0, f64::MAX)?,
                _ => return Err(usage("give one of --omega-tbs and --omega-tbs-grid")),
            }
        }
        Command::HomDip(a) => {
            check_nonneg("omega-g-over-omega", a.omega_g_over_omega)?;
            jsa_from(a)?;
            if let DipTbs::Value(t) = a.omega_tbs {
                check_nonneg("omega-tbs", t)?;
            }
        }
        Command::Visibility(a) => {
            a.omega_g_grid.check_within("omega-g-grid", 0.0, f64::MAX)?;
            check_nonneg("max-omega-tbs", a.max_omega_tbs)?;
            if !(a.omega_tbs_target >= 0.0 && a.omega_tbs_target <= a.max_omega_tbs) {
                return Err(usage(format!(
                    "omega-tbs-target must lie in [0, {}], got {}",
                    a.max_omega_tbs, a.omega_tbs_target
                )));
            }
        }
        Command::Figure(a) => {
            if !a.list {
                let name = a.name.as_deref().unwrap_or("");
                figures::find(name).ok_or_else(|| {
                    usage(format!("unknown figure `{name}`; run `qbs figure --list` for the recipes"))
                })?;
                figures::validate_overrides(a)?;
            }
        }
    }
    Ok(())
}

pub(crate) fn execute(cmd: &Command) -> Result<Dataset, CliError> {
    match cmd {
        Command::Evolve(a) => evolve(a.s1, a.s2, a.r, a.phi),
        Command::EntropySweep(a) => entropy_sweep(a.s1, a.s2, &a.r_grid, a.measure),
        Command::Stats(a) => match (a.r, a.sigma_over_omega, a.omega_tbs) {
            (Some(r), _, _) => stats_constant(a.s1, a.s2, r),
            (None, Some(s), Some(t)) => stats_waveguide(a.s1, a.s2, s, t),
            _ => unreachable!("validated"),
        },
        Command::WaveguideEntropy(a) => {
            let sigmas = match (a.sigma_over_omega, a.sigma_grid) {
                (Some(s), _) => vec![s],
                (None, Some(g)) => g.points(),
                _ => unreachable!("validated"),
            };
            let tbs = match (a.omega_tbs, a.omega_tbs_grid) {
                (Some(t), _) => vec![t],
                (None, Some(g)) => g.points().into_iter().map(Tbs::Finite).collect(),
                _ => unreachable!("validated"),
            };
            waveguide_entropy(pair(a.s1, a.s2)?, &sigmas, &tbs)
        }
        Command::HomDip(a) => hom_dip(a),
        Command::Visibility(a) => visibility_scan(&a.omega_g_grid.points(), a.omega_tbs_target, a.max_omega_tbs),
        Command::Figure(a) => {
            if a.list {
                Ok(figures::listing())
            } else {
                figures::run(a)
            }
        }
    }
}

pub(crate) fn evolve(s1: usize, s2: usize, r: f64, phi: f64) -> Result<Dataset, CliError> {
    let p = pair(s1, s2)?;
    let params = BsParams::new(r, phi)?;
    let dist = output_distribution(p, &params);
    let n = p.total();
    let mut d = Dataset::default();
    d.grid.push(Column::num("k", "photons", (0..=n).map(|k| k as f64).collect()));
    d.grid.push(Column::num("p", "photons", (0..=n).map(|k| (n - k) as f64).collect()));
    d.values.push(Column::num("probs", "1", dist.probs.clone()));
    d.equations = vec![EQ_FOCK, EQ_ENTROPY, EQ_SCHMIDT];
    d.summarize_num("S_N", von_neumann_entropy(&dist.probs));
    d.summarize_num("K", schmidt_parameter(&dist.probs));
    d.summarize_num("mean_port1", dist.mean_port1());
    d.summarize_num("mean_port2", dist.mean_port2());
    d.summarize_num("normalization", dist.normalization());
    Ok(d)
}

pub(crate) fn entropy_sweep(s1: usize, s2: usize, grid: &Grid, measure: MeasureArg) -> Result<Dataset, CliError> {
    let p = pair(s1, s2)?;
    let m = match measure {
        MeasureArg::Vn => Measure::VonNeumann,
        MeasureArg::Schmidt => Measure::Schmidt,
    };
    let rs = grid.points();
    let vals = rs
        .par_iter()
        .map(|&r| Ok(m.of(&output_distribution(p, &BsParams::with_reflectance(r)?).probs)))
        .collect::<crate::Result<Vec<f64>>>()?;
    let (name, unit, eq) = match measure {
        MeasureArg::Vn => ("S_N", "nat", EQ_ENTROPY),
        MeasureArg::Schmidt => ("K", "1", EQ_SCHMIDT),
    };
    let mut d = Dataset::default();
    let best = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    d.summarize_num("grid_argmax_R", rs[best.0]);
    d.summarize_num("grid_max", best.1);
    let (r_star, v_star) = argmax_entanglement(p, m);
    d.summarize_num("refined_argmax_R", r_star);
    d.summarize_num("refined_max", v_star);
    d.grid.push(Column::num("R", "1", rs));
    d.values.push(Column::num(name, unit, vals));
    d.equations = vec![EQ_FOCK, eq];
    Ok(d)
}

fn spectrum_columns(d: &mut Dataset, lambdas: &[f64], name: &str) {
    let n = lambdas.len() - 1;
    d.grid.push(Column::num("k", "photons", (0..=n).map(|k| k as f64).collect()));
    d.grid.push(Column::num("p", "photons", (0..=n).map(|k| (n - k) as f64).collect()));
    d.values.push(Column::num(name, "1", lambdas.to_vec()));
}

pub(crate) fn stats_constant(s1: usize, s2: usize, r: f64) -> Result<Dataset, CliError> {
    let p = pair(s1, s2)?;
    let dist = output_distribution(p, &BsParams::with_reflectance(r)?);
    let mut d = Dataset::default();
    spectrum_columns(&mut d, &dist.probs, "P_k");
    d.equations = vec![EQ_FOCK, "P_k = lambda_k"];
    d.summarize_num("mean_port1", dist.mean_port1());
    d.summarize_num("mean_port2", dist.mean_port2());
    Ok(d)
}

pub(crate) fn waveguide_spectrum(p: FockPair, sigma: f64, tbs: Tbs) -> crate::Result<SchmidtSpectrum> {
    let spread = DetuningSpread::identical(sigma);
    match tbs {
        Tbs::Finite(t) => averaged_schmidt_modes_scaled(p, &spread, t),
        Tbs::Infinite => asymptotic_schmidt_modes(p, &spread),
    }
}

pub(crate) fn stats_waveguide(s1: usize, s2: usize, sigma: f64, tbs: Tbs) -> Result<Dataset, CliError> {
    let p = pair(s1, s2)?;
    let sp = waveguide_spectrum(p, sigma, tbs)?;
    let mut d = Dataset::default();
    spectrum_columns(&mut d, &sp.lambdas, "P_k");
    d.equations = vec![EQ_FOCK, EQ_REFLECTANCE, EQ_SPECTRUM, EQ_AVERAGED, "P_k = Lambda_k"];
    if tbs == Tbs::Infinite {
        d.equations.push(EQ_ASYMPTOTE);
    }
    d.summarize_num("normalization", sp.normalization());
    Ok(d)
}

pub(crate) fn waveguide_entropy(p: FockPair, sigmas: &[f64], tbs: &[Tbs]) -> Result<Dataset, CliError> {
    let cells: Vec<(f64, Tbs)> = sigmas.iter().flat_map(|&s| tbs.iter().map(move |&t| (s, t))).collect();
    let spectra = cells
        .par_iter()
        .map(|&(s, t)| waveguide_spectrum(p, s, t))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut d = Dataset::default();
    d.grid.push(Column::num("sigma_over_omega", "1", cells.iter().map(|c| c.0).collect()));
    d.grid.push(Column::num(
        "omega_tbs",
        "1",
        cells
            .iter()
            .map(|c| match c.1 {
                Tbs::Finite(t) => t,
                Tbs::Infinite => f64::INFINITY,
            })
            .collect(),
    ));
    d.values.push(Column::num("S_N", "nat", spectra.iter().map(|s| s.s_n).collect()));
    d.values.push(Column::num("K", "1", spectra.iter().map(|s| s.k_param).collect()));
    for k in 0..=p.total() {
        d.values.push(Column::num(format!("Lambda_{k}"), "1", spectra.iter().map(|s| s.lambdas[k]).collect()));
    }
    d.equations = vec![EQ_FOCK, EQ_REFLECTANCE, EQ_SPECTRUM, EQ_AVERAGED, EQ_ENTROPY, EQ_SCHMIDT];
    if tbs.contains(&Tbs::Infinite) {
        d.equations.push(EQ_ASYMPTOTE);
    }
    Ok(d)
}

/// Target `Omega t_bs` used when a dip asks for a balanced coupler.
pub(crate) const BALANCED_TARGET: f64 = 2.5 * PI;
const BALANCED_SEARCH_MAX: f64 = 40.0;

pub(crate) fn hom_dip(a: &HomDipArgs) -> Result<Dataset, CliError> {
    let j = jsa_from(a)?;
    let derived = jsa_derived(&j)?;
    let g = a.omega_g_over_omega;
    let xs = a.delay_grid.points();
    let mut d = Dataset::default();
    d.summarize_num("B", derived.b_param);
    d.summarize_num("A", derived.a_param);
    d.summarize_num("detuning_over_omega_g", derived.delta_omega / derived.omega_g);
    d.summarize_num("omega_g", derived.omega_g);
    d.summarize_num("omega0_eff", derived.omega0_eff);
    d.summarize_num("omega0_term_ratio", derived.omega0_term_ratio);
    d.summarize("omega0_first_term_significant", derived.omega0_term_ratio > 1e-3);
    d.summarize_num("normalization_deviation", derived.normalization_deviation);

    let constant = |x: f64| {
        let y0 = derived.delta_omega / derived.omega_g;
        let bx = derived.b_param * x;
        0.5 * (1.0 - derived.b_param * (-y0 * y0).exp() * (-0.25 * bx * bx).exp())
    };
    let (p12, tbs, tc) = match a.model {
        DipModel::Waveguide => {
            let tbs = match a.omega_tbs {
                DipTbs::Value(t) => t,
                DipTbs::Balanced => balanced_tbs_nearest(g, BALANCED_TARGET, BALANCED_SEARCH_MAX)?.ok_or_else(|| {
                    usage(format!(
                        "no balanced coupler (<R> = 1/2) exists for omega-g-over-omega = {g} on [0, {BALANCED_SEARCH_MAX}]"
                    ))
                })?,
            };
            let scaled = ScaledHom {
                omega_g_over_omega: g,
                omega_tbs: tbs,
                b_param: derived.b_param,
                detuning: derived.delta_omega / derived.omega_g,
            };
            let curve = hom_curve_scaled(&scaled, &xs)?;
            d.summarize_num("mean_R", reflectance_moments(g, tbs)?.0);
            d.summarize(
                "visibility",
                curve.visibility.map(number_json).unwrap_or(serde_json::Value::Null),
            );
            d.notes.push("normalized so that t_bs = 0 gives P12 = 1".into());
            d.equations = vec![EQ_JSA, EQ_DIP, EQ_DIP_PARAMS, EQ_REFLECTANCE, EQ_VISIBILITY];
            (curve.p12, tbs, curve.coherence_time)
        }
        DipModel::Conventional => {
            let p12 = xs
                .par_iter()
                .map(|&x| hom_conventional(&j, x / derived.omega_g))
                .collect::<crate::Result<Vec<_>>>()?;
            d.notes.push("balanced constant splitter; normalized so that R = 0 gives P12 = 1".into());
            d.equations = vec![EQ_JSA, EQ_CONVENTIONAL];
            (p12, 0.5 * PI, 2.0 / derived.b_param)
        }
    };
    d.summarize_num("omega_tbs", tbs);
    d.summarize_num("coherence_time_omega_g", tc);
    d.equations.push(EQ_CONSTANT_DIP);
    d.grid.push(Column::num("omega_g_dtau", "1", xs.clone()));
    d.values.push(Column::num("P12", "1", p12));
    d.values.push(Column::num("P12_constant", "1", xs.iter().map(|&x| constant(x)).collect()));
    if a.model == DipModel::Waveguide && curve_lacks_plateau(&xs, tc) {
        d.notes.push("visibility needs delays 0 and at least ten coherence times".into());
    }
    d.params.insert("resolved_omega_tbs".into(), json!(tbs));
    Ok(d)
}

fn curve_lacks_plateau(xs: &[f64], tc: f64) -> bool {
    !xs.contains(&0.0) || xs.iter().all(|x| x.abs() < 10.0 * tc)
}

/// Scaled delay at which the plateau is read.
pub(crate) const PLATEAU_DELAY: f64 = 50.0;

pub(crate) fn visibility_scan(gs: &[f64], target: f64, max_tbs: f64) -> Result<Dataset, CliError> {
    let rows = gs
        .par_iter()
        .map(|&g| -> crate::Result<[f64; 4]> {
            let Some(t) = balanced_tbs_nearest(g, target, max_tbs)? else {
                return Ok([f64::NAN; 4]);
            };
            let curve = hom_curve_scaled(&ScaledHom::identical(g, t), &[0.0, PLATEAU_DELAY])?;
            Ok([t, curve.visibility.unwrap_or(f64::NAN), curve.p12[0], curve.p12[1]])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut d = Dataset::default();
    d.grid.push(Column::num("omega_g_over_omega", "1", gs.to_vec()));
    let names = ["omega_tbs", "V", "P12_zero_delay", "P12_plateau"];
    for (i, n) in names.iter().enumerate() {
        d.values.push(Column::num(*n, "1", rows.iter().map(|r| r[i]).collect()));
    }
    d.equations = vec![EQ_DIP, EQ_REFLECTANCE, EQ_MEAN_R, EQ_VISIBILITY];
    d.notes.push(format!(
        "identical photons; balanced coupler nearest Omega t_bs = {target} on [0, {max_tbs}]; plateau read at Omega_g dtau = {PLATEAU_DELAY}; nan marks no balanced coupler"
    ));
    Ok(d)
}
