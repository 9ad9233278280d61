//! Named, reproducible figure datasets.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::commands::{
    pair, waveguide_spectrum, BALANCED_TARGET, EQ_ASYMPTOTE, EQ_AVERAGED, EQ_DIP, EQ_ENTROPY, EQ_FOCK, EQ_J,
    EQ_MEAN_R, EQ_REFLECTANCE, EQ_SCHMIDT, EQ_SPECTRUM, EQ_S_J, EQ_VISIBILITY, PLATEAU_DELAY,
};
use super::output::{Column, Dataset};
use super::{CliError, FigureArgs, Grid, Tbs};
use crate::beam_splitter::{output_distribution, BsParams};
use crate::entanglement::Measure;
use crate::hom::{
    balanced_tbs_nearest, hom_curve_scaled, mean_reflectance, mean_reflectance_asymptotic, ScaledHom,
};
use crate::numerics::scan_maximize;
use crate::waveguide::{coincidence_probs_asymptotic, entropy_asymptotic_11};

/// One named dataset: what it shows and how it is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRecipe {
    pub name: &'static str,
    pub shows: &'static str,
    pub operation: &'static str,
    pub parameters: &'static str,
    /// Grid flags that may replace the default grids.
    pub overrides: &'static [&'static str],
}

const PAIRS_5A: [(usize, usize); 4] = [(1, 1), (1, 2), (1, 6), (2, 3)];
const PAIRS_5B: [(usize, usize); 4] = [(1, 0), (2, 0), (3, 0), (5, 0)];
const TWIN_S: [usize; 8] = [1, 2, 3, 4, 5, 6, 8, 10];
const PAIRS_7: [(usize, usize); 4] = [(1, 1), (2, 3), (4, 2), (3, 3)];
const SIGMAS_7: [f64; 6] = [10.0, 5.0, 3.0, 1.0, 1.0 / 3.0, 0.0];
const SIGMAS_11: [f64; 5] = [0.0, 1.0 / 3.0, 1.0, 3.0, 10.0];
const RATIOS_13: [f64; 4] = [1.0, 0.5, 0.25, 0.0];
const INSET_14A: [f64; 4] = [1.0, 2.0, 5.0, 10.0];
const TARGETS_14B: [f64; 5] = [2.0, 8.0, 14.0, 20.0, 30.0];

const RECIPES: &[FigureRecipe] = &[
    FigureRecipe {
        name: "fig5a",
        shows: "von Neumann entropy vs R",
        operation: "entropy-sweep --measure vn",
        parameters: "pairs (1,1) (1,2) (1,6) (2,3); R 0:1:201",
        overrides: &["r-grid"],
    },
    FigureRecipe {
        name: "fig5b",
        shows: "von Neumann entropy vs R, one port empty",
        operation: "entropy-sweep --measure vn",
        parameters: "pairs (1,0) (2,0) (3,0) (5,0); R 0:1:201",
        overrides: &["r-grid"],
    },
    FigureRecipe {
        name: "fig5c",
        shows: "Schmidt parameter vs R",
        operation: "entropy-sweep --measure schmidt",
        parameters: "pairs (1,1) (1,2) (1,6) (2,3); R 0:1:201",
        overrides: &["r-grid"],
    },
    FigureRecipe {
        name: "fig5d",
        shows: "Schmidt parameter vs R, one port empty",
        operation: "entropy-sweep --measure schmidt",
        parameters: "pairs (1,0) (2,0) (3,0) (5,0); R 0:1:201",
        overrides: &["r-grid"],
    },
    FigureRecipe {
        name: "fig6a",
        shows: "von Neumann entropy of |s,s> vs R",
        operation: "entropy-sweep --measure vn",
        parameters: "s = 1 2 3 4 5 6 8 10; R 0:0.5:101",
        overrides: &["r-grid"],
    },
    FigureRecipe {
        name: "fig6b",
        shows: "Schmidt parameter of |s,s> vs R",
        operation: "entropy-sweep --measure schmidt",
        parameters: "s = 1 2 3 4 5 6 8 10; R 0:0.5:101",
        overrides: &["r-grid"],
    },
    FigureRecipe {
        name: "fig7",
        shows: "entropy vs Omega t_bs for spectrally broad photons",
        operation: "waveguide-entropy",
        parameters: "pairs (1,1) (2,3) (4,2) (3,3); sigma/Omega = 10 5 3 1 1/3 0; Omega t_bs 0:20:201",
        overrides: &["omega-tbs-grid"],
    },
    FigureRecipe {
        name: "fig8a",
        shows: "entropy of |1,1> over (sigma/Omega, Omega t_bs)",
        operation: "waveguide-entropy",
        parameters: "pair (1,1); sigma/Omega 0:3:61; Omega t_bs 0:20:101",
        overrides: &["sigma-grid", "omega-tbs-grid"],
    },
    FigureRecipe {
        name: "fig8b",
        shows: "large-Omega t_bs entropy of |1,1> vs sigma/Omega (closed form)",
        operation: "closed-form J and S_N",
        parameters: "sigma/Omega 0.01:3:300",
        overrides: &["sigma-grid"],
    },
    FigureRecipe {
        name: "fig9a",
        shows: "entropy of |0,2> vs Omega t_bs",
        operation: "waveguide-entropy",
        parameters: "pair (0,2); sigma/Omega = 10 5 3 1 1/3 0; Omega t_bs 0:20:201",
        overrides: &["omega-tbs-grid"],
    },
    FigureRecipe {
        name: "fig9b",
        shows: "entropy of |0,2> over (sigma/Omega, Omega t_bs) with its large-Omega t_bs maximum",
        operation: "waveguide-entropy",
        parameters: "pair (0,2); sigma/Omega 0:3:61; Omega t_bs 0:20:101",
        overrides: &["sigma-grid", "omega-tbs-grid"],
    },
    FigureRecipe {
        name: "fig10",
        shows: "photon-number probabilities at a constant splitter",
        operation: "stats --r",
        parameters: "pairs (1,1) (0,2); R = 1/2 and 1/2 (1 + 1/sqrt 3)",
        overrides: &[],
    },
    FigureRecipe {
        name: "fig11",
        shows: "photon-number probabilities of |1,1> at a waveguide coupler",
        operation: "stats --sigma-over-omega",
        parameters: "sigma/Omega = 0 1/3 1 3 10; Omega t_bs = 5 pi/2 and the value giving R = 1/2 (1 + 1/sqrt 3)",
        overrides: &[],
    },
    FigureRecipe {
        name: "fig12",
        shows: "large-Omega t_bs coincidence P11 and pair probability P20 vs sigma/Omega",
        operation: "closed-form J",
        parameters: "sigma/Omega 0.01:3:300",
        overrides: &["sigma-grid"],
    },
    FigureRecipe {
        name: "fig13",
        shows: "two-photon dips of identical photons at balanced couplers",
        operation: "hom-dip --omega-tbs balanced",
        parameters: "Omega_g/Omega = 1 0.5 0.25 0; Omega_g dtau 0:10:201",
        overrides: &["delay-grid"],
    },
    FigureRecipe {
        name: "fig14a",
        shows: "mean reflectance: large-Omega t_bs limit vs Omega_g/Omega, and vs Omega t_bs",
        operation: "mean reflectance",
        parameters: "Omega_g/Omega 0:10:201 (limit); Omega_g/Omega = 1 2 5 10 over Omega t_bs 0:30:301",
        overrides: &["omega-g-grid", "omega-tbs-grid"],
    },
    FigureRecipe {
        name: "fig14b",
        shows: "dip visibility at balanced couplers vs Omega_g/Omega",
        operation: "visibility",
        parameters: "Omega t_bs near 2 8 14 20 30; Omega_g/Omega 0:2:21",
        overrides: &["omega-g-grid"],
    },
];

pub fn figure_recipes() -> &'static [FigureRecipe] {
    RECIPES
}

pub(crate) fn find(name: &str) -> Option<&'static FigureRecipe> {
    RECIPES.iter().find(|r| r.name == name)
}

fn given(a: &FigureArgs) -> Vec<(&'static str, Grid)> {
    [
        ("r-grid", a.r_grid),
        ("sigma-grid", a.sigma_grid),
        ("omega-tbs-grid", a.omega_tbs_grid),
        ("omega-g-grid", a.omega_g_grid),
        ("delay-grid", a.delay_grid),
    ]
    .into_iter()
    .filter_map(|(k, g)| g.map(|g| (k, g)))
    .collect()
}

pub(crate) fn validate_overrides(a: &FigureArgs) -> Result<(), CliError> {
    let name = a.name.as_deref().unwrap_or("");
    let recipe = find(name).ok_or_else(|| CliError::Usage(format!("unknown figure `{name}`")))?;
    for (flag, g) in given(a) {
        if !recipe.overrides.contains(&flag) {
            return Err(CliError::Usage(format!("--{flag} does not apply to {name}")));
        }
        match flag {
            "r-grid" => g.check_within("r-grid", 0.0, 1.0)?,
            "sigma-grid" if matches!(name, "fig8b" | "fig12") => {
                if !(g.start > 0.0) {
                    return Err(CliError::Usage("sigma-grid must be positive for the closed form".into()));
                }
                g.check_within("sigma-grid", 0.0, f64::MAX)?
            }
            "sigma-grid" | "omega-tbs-grid" | "omega-g-grid" => g.check_within(flag, 0.0, f64::MAX)?,
            _ => {}
        }
    }
    Ok(())
}

pub(crate) fn listing() -> Dataset {
    let mut d = Dataset::default();
    let col = |f: fn(&FigureRecipe) -> String| RECIPES.iter().map(f).collect::<Vec<_>>();
    d.grid.push(Column::text("name", col(|r| r.name.to_string())));
    d.values.push(Column::text("shows", col(|r| r.shows.to_string())));
    d.values.push(Column::text("operation", col(|r| r.operation.to_string())));
    d.values.push(Column::text("parameters", col(|r| r.parameters.to_string())));
    d.values.push(Column::text("overrides", col(|r| r.overrides.join(" "))));
    d
}

/// Rows of equal width, turned into named numeric columns.
struct Long {
    names: Vec<(String, &'static str)>,
    grid_cols: usize,
    rows: Vec<Vec<f64>>,
}

impl Long {
    fn new(grid: &[(&str, &'static str)], values: &[(&str, &'static str)]) -> Self {
        let names = grid.iter().chain(values).map(|(n, u)| (n.to_string(), *u)).collect();
        Long { names, grid_cols: grid.len(), rows: Vec::new() }
    }

    fn into_dataset(self) -> Dataset {
        let mut d = Dataset::default();
        for (i, (n, u)) in self.names.iter().enumerate() {
            let c = Column::num(n.clone(), u, self.rows.iter().map(|r| r[i]).collect());
            if i < self.grid_cols {
                d.grid.push(c);
            } else {
                d.values.push(c);
            }
        }
        d
    }
}

fn grid_or(g: Option<Grid>, default: Grid) -> Vec<f64> {
    g.unwrap_or(default).points()
}

pub(crate) fn run(a: &FigureArgs) -> Result<Dataset, CliError> {
    let name = a.name.as_deref().unwrap_or("");
    let mut d = match name {
        "fig5a" => r_sweeps(&PAIRS_5A, Measure::VonNeumann, grid_or(a.r_grid, Grid::new(0.0, 1.0, 201)))?,
        "fig5b" => r_sweeps(&PAIRS_5B, Measure::VonNeumann, grid_or(a.r_grid, Grid::new(0.0, 1.0, 201)))?,
        "fig5c" => r_sweeps(&PAIRS_5A, Measure::Schmidt, grid_or(a.r_grid, Grid::new(0.0, 1.0, 201)))?,
        "fig5d" => r_sweeps(&PAIRS_5B, Measure::Schmidt, grid_or(a.r_grid, Grid::new(0.0, 1.0, 201)))?,
        "fig6a" | "fig6b" => {
            let pairs: Vec<(usize, usize)> = TWIN_S.iter().map(|&s| (s, s)).collect();
            let m = if name == "fig6a" { Measure::VonNeumann } else { Measure::Schmidt };
            r_sweeps(&pairs, m, grid_or(a.r_grid, Grid::new(0.0, 0.5, 101)))?
        }
        "fig7" => tbs_sweeps(&PAIRS_7, &SIGMAS_7, &grid_or(a.omega_tbs_grid, Grid::new(0.0, 20.0, 201)))?,
        "fig8a" => contour(
            (1, 1),
            &grid_or(a.sigma_grid, Grid::new(0.0, 3.0, 61)),
            &grid_or(a.omega_tbs_grid, Grid::new(0.0, 20.0, 101)),
        )?,
        "fig8b" => asymptotic_11(&grid_or(a.sigma_grid, Grid::new(0.01, 3.0, 300)), false)?,
        "fig9a" => tbs_sweeps(&[(0, 2)], &SIGMAS_7, &grid_or(a.omega_tbs_grid, Grid::new(0.0, 20.0, 201)))?,
        "fig9b" => {
            let mut d = contour(
                (0, 2),
                &grid_or(a.sigma_grid, Grid::new(0.0, 3.0, 61)),
                &grid_or(a.omega_tbs_grid, Grid::new(0.0, 20.0, 101)),
            )?;
            let p = pair(0, 2)?;
            let (s, v) = scan_maximize(|s| Ok(waveguide_spectrum(p, s, Tbs::Infinite)?.s_n), 0.01, 3.0, 300, 1e-6)?;
            d.summarize_num("asymptotic_max_S_N", v);
            d.summarize_num("asymptotic_argmax_sigma_over_omega", s);
            d.equations.push(EQ_ASYMPTOTE);
            d
        }
        "fig10" => fig10()?,
        "fig11" => fig11()?,
        "fig12" => asymptotic_11(&grid_or(a.sigma_grid, Grid::new(0.01, 3.0, 300)), true)?,
        "fig13" => fig13(&grid_or(a.delay_grid, Grid::new(0.0, 10.0, 201)))?,
        "fig14a" => fig14a(
            &grid_or(a.omega_g_grid, Grid::new(0.0, 10.0, 201)),
            &grid_or(a.omega_tbs_grid, Grid::new(0.0, 30.0, 301)),
        )?,
        "fig14b" => fig14b(&grid_or(a.omega_g_grid, Grid::new(0.0, 2.0, 21)))?,
        other => return Err(CliError::Usage(format!("unknown figure `{other}`"))),
    };
    let recipe = find(name).expect("validated");
    d.params.insert("figure".into(), recipe.name.into());
    d.params.insert("shows".into(), recipe.shows.into());
    d.params.insert("recipe".into(), recipe.parameters.into());
    Ok(d)
}

fn measure_label(m: Measure) -> (&'static str, &'static str, &'static str) {
    match m {
        Measure::VonNeumann => ("S_N", "nat", EQ_ENTROPY),
        Measure::Schmidt => ("K", "1", EQ_SCHMIDT),
    }
}

fn r_sweeps(pairs: &[(usize, usize)], m: Measure, rs: Vec<f64>) -> Result<Dataset, CliError> {
    let (label, unit, eq) = measure_label(m);
    let mut d = Dataset::default();
    for &(s1, s2) in pairs {
        let p = pair(s1, s2)?;
        let vals = rs
            .par_iter()
            .map(|&r| Ok(m.of(&output_distribution(p, &BsParams::with_reflectance(r)?).probs)))
            .collect::<crate::Result<Vec<_>>>()?;
        d.values.push(Column::num(format!("{label}({s1},{s2})"), unit, vals));
    }
    d.grid.push(Column::num("R", "1", rs));
    d.equations = vec![EQ_FOCK, eq];
    Ok(d)
}

fn tbs_sweeps(pairs: &[(usize, usize)], sigmas: &[f64], tbs: &[f64]) -> Result<Dataset, CliError> {
    let mut cells = Vec::new();
    for &(s1, s2) in pairs {
        for &s in sigmas {
            for &t in tbs {
                cells.push((s1, s2, s, t));
            }
        }
    }
    let vals = cells
        .par_iter()
        .map(|&(s1, s2, s, t)| Ok(waveguide_spectrum(pair(s1, s2)?, s, Tbs::Finite(t))?.s_n))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut long = Long::new(
        &[("s1", "photons"), ("s2", "photons"), ("sigma_over_omega", "1"), ("omega_tbs", "1")],
        &[("S_N", "nat")],
    );
    for (c, v) in cells.iter().zip(vals) {
        long.rows.push(vec![c.0 as f64, c.1 as f64, c.2, c.3, v]);
    }
    let mut d = long.into_dataset();
    d.equations = vec![EQ_FOCK, EQ_REFLECTANCE, EQ_SPECTRUM, EQ_AVERAGED, EQ_ENTROPY];
    Ok(d)
}

fn contour(p: (usize, usize), sigmas: &[f64], tbs: &[f64]) -> Result<Dataset, CliError> {
    let fp = pair(p.0, p.1)?;
    let cells: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| tbs.iter().map(move |&t| (s, t))).collect();
    let vals = cells
        .par_iter()
        .map(|&(s, t)| waveguide_spectrum(fp, s, Tbs::Finite(t)))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut long = Long::new(&[("sigma_over_omega", "1"), ("omega_tbs", "1")], &[("S_N", "nat"), ("K", "1")]);
    for (c, sp) in cells.iter().zip(&vals) {
        long.rows.push(vec![c.0, c.1, sp.s_n, sp.k_param]);
    }
    let mut d = long.into_dataset();
    d.params.insert("s1".into(), p.0.into());
    d.params.insert("s2".into(), p.1.into());
    d.equations = vec![EQ_FOCK, EQ_REFLECTANCE, EQ_SPECTRUM, EQ_AVERAGED, EQ_ENTROPY, EQ_SCHMIDT];
    Ok(d)
}

fn asymptotic_11(sigmas: &[f64], probabilities: bool) -> Result<Dataset, CliError> {
    let mut d = Dataset::default();
    let (lo, hi) = (sigmas[0], *sigmas.last().expect("non-empty grid"));
    if probabilities {
        let rows = sigmas
            .iter()
            .map(|&s| coincidence_probs_asymptotic(s))
            .collect::<crate::Result<Vec<_>>>()?;
        d.values.push(Column::num("P11", "1", rows.iter().map(|r| r.0).collect()));
        d.values.push(Column::num("P20", "1", rows.iter().map(|r| r.1).collect()));
        if hi > lo {
            let (s, v) = scan_maximize(|s| Ok(-coincidence_probs_asymptotic(s)?.0), lo, hi, 401, 1e-9)?;
            d.summarize_num("argmin_P11_sigma_over_omega", s);
            d.summarize_num("min_P11", -v);
        }
        d.equations = vec![EQ_J, "P11 = J, P20 = P02 = (1 - J) / 2"];
    } else {
        let rows = sigmas
            .iter()
            .map(|&s| entropy_asymptotic_11(s))
            .collect::<crate::Result<Vec<_>>>()?;
        d.values.push(Column::num("S_N", "nat", rows.iter().map(|r| r.0).collect()));
        d.values.push(Column::num("J", "1", rows.iter().map(|r| r.1).collect()));
        if hi > lo {
            let (s, v) = scan_maximize(|s| Ok(entropy_asymptotic_11(s)?.0), lo, hi, 401, 1e-9)?;
            d.summarize_num("argmax_S_N_sigma_over_omega", s);
            d.summarize_num("max_S_N", v);
        }
        d.equations = vec![EQ_J, EQ_S_J];
    }
    d.grid.insert(0, Column::num("sigma_over_omega", "1", sigmas.to_vec()));
    d.notes.push("J uses erfc; printing it with erf makes J diverge".into());
    Ok(d)
}

fn fig10() -> Result<Dataset, CliError> {
    let r_max = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
    let mut long = Long::new(&[("s1", "photons"), ("s2", "photons"), ("R", "1"), ("k", "photons")], &[("P_k", "1")]);
    for (s1, s2) in [(1, 1), (0, 2)] {
        for r in [0.5, r_max] {
            let dist = output_distribution(pair(s1, s2)?, &BsParams::with_reflectance(r)?);
            for (k, p) in dist.probs.iter().enumerate() {
                long.rows.push(vec![s1 as f64, s2 as f64, r, k as f64, *p]);
            }
        }
    }
    let mut d = long.into_dataset();
    d.equations = vec![EQ_FOCK, "P_k = lambda_k"];
    Ok(d)
}

/// `Omega t_bs` on the same branch as `5 pi / 2` at which the monochromatic
/// reflectance equals `1/2 (1 + 1/sqrt 3)`.
fn tbs_for_max_entanglement() -> f64 {
    let r = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
    2.0 * PI + 2.0 * r.sqrt().asin()
}

fn fig11() -> Result<Dataset, CliError> {
    let p = pair(1, 1)?;
    let mut long = Long::new(&[("omega_tbs", "1"), ("sigma_over_omega", "1"), ("k", "photons")], &[("P_k", "1")]);
    for t in [BALANCED_TARGET, tbs_for_max_entanglement()] {
        for &s in &SIGMAS_11 {
            let sp = waveguide_spectrum(p, s, Tbs::Finite(t))?;
            for (k, v) in sp.lambdas.iter().enumerate() {
                long.rows.push(vec![t, s, k as f64, *v]);
            }
        }
    }
    let mut d = long.into_dataset();
    d.equations = vec![EQ_FOCK, EQ_REFLECTANCE, EQ_SPECTRUM, EQ_AVERAGED, "P_k = Lambda_k"];
    Ok(d)
}

fn fig13(xs: &[f64]) -> Result<Dataset, CliError> {
    let mut long = Long::new(&[("omega_g_over_omega", "1"), ("omega_g_dtau", "1")], &[("P12", "1")]);
    let mut d_summary = Vec::new();
    for &g in &RATIOS_13 {
        let t = balanced_tbs_nearest(g, BALANCED_TARGET, 40.0)?
            .ok_or_else(|| CliError::Usage(format!("no balanced coupler for Omega_g/Omega = {g}")))?;
        let curve = hom_curve_scaled(&ScaledHom::identical(g, t), xs)?;
        for (x, p) in xs.iter().zip(&curve.p12) {
            long.rows.push(vec![g, *x, *p]);
        }
        d_summary.push((g, t, curve.visibility));
    }
    let mut d = long.into_dataset();
    for (g, t, v) in d_summary {
        d.summarize_num(&format!("omega_tbs(g={g})"), t);
        if let Some(v) = v {
            d.summarize_num(&format!("V(g={g})"), v);
        }
    }
    d.equations = vec![EQ_DIP, EQ_REFLECTANCE, EQ_MEAN_R, EQ_VISIBILITY];
    d.notes.push("identical photons; coupler with <R> = 1/2 nearest Omega t_bs = 5 pi/2".into());
    Ok(d)
}

fn fig14a(gs: &[f64], tbs: &[f64]) -> Result<Dataset, CliError> {
    let mut long = Long::new(&[("omega_g_over_omega", "1"), ("omega_tbs", "1")], &[("mean_R", "1")]);
    for &g in gs {
        long.rows.push(vec![g, f64::INFINITY, mean_reflectance_asymptotic(g)?]);
    }
    let cells: Vec<(f64, f64)> = INSET_14A.iter().flat_map(|&g| tbs.iter().map(move |&t| (g, t))).collect();
    let vals = cells
        .par_iter()
        .map(|&(g, t)| mean_reflectance(g, t))
        .collect::<crate::Result<Vec<_>>>()?;
    for (c, v) in cells.iter().zip(vals) {
        long.rows.push(vec![c.0, c.1, v]);
    }
    let mut d = long.into_dataset();
    d.equations = vec![EQ_MEAN_R, "Omega t_bs -> infinity: <R> = sqrt(pi)/(2g) erfcx(1/g), g = Omega_g/Omega"];
    d.notes.push("rows with omega_tbs = inf hold the large-Omega t_bs limit".into());
    Ok(d)
}

fn fig14b(gs: &[f64]) -> Result<Dataset, CliError> {
    let cells: Vec<(f64, f64)> = TARGETS_14B.iter().flat_map(|&t| gs.iter().map(move |&g| (t, g))).collect();
    let rows = cells
        .par_iter()
        .map(|&(target, g)| -> crate::Result<[f64; 2]> {
            let Some(t) = balanced_tbs_nearest(g, target, target + 2.0 * PI)? else {
                return Ok([f64::NAN, f64::NAN]);
            };
            let curve = hom_curve_scaled(&ScaledHom::identical(g, t), &[0.0, PLATEAU_DELAY])?;
            Ok([t, curve.visibility.unwrap_or(f64::NAN)])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut long = Long::new(
        &[("omega_tbs_target", "1"), ("omega_g_over_omega", "1")],
        &[("omega_tbs", "1"), ("V", "1")],
    );
    for (c, r) in cells.iter().zip(rows) {
        long.rows.push(vec![c.0, c.1, r[0], r[1]]);
    }
    let mut d = long.into_dataset();
    d.equations = vec![EQ_DIP, EQ_REFLECTANCE, EQ_MEAN_R, EQ_VISIBILITY];
    d.notes.push("identical photons; nan marks targets without a balanced coupler".into());
    Ok(d)
}
