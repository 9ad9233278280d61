use std::collections::{BinaryHeap, HashMap};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{invalid, Error, Result};

/// Default Gauss-Hermite order before the doubling check.
pub const DEFAULT_QUAD_ORDER: usize = 96;
/// Largest Gauss-Hermite order the doubling check will try.
pub const MAX_QUAD_ORDER: usize = 512;
/// Environment variable that overrides [`DEFAULT_QUAD_ORDER`].
pub const QUAD_ORDER_ENV: &str = "QBS_QUAD_ORDER";

/// Nodes and weights of an interpolatory quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// shifts. `d` holds the diagonal, `e[i]` couples rows `i` and `i + 1`
/// (its last entry is ignored). Eigenvalues overwrite `d`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence("tridiagonal QL iteration".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Gauss-Hermite rule for the weight `e^(-x^2)` on the real line.
///
/// Nodes are eigenvalues of the Jacobi matrix, polished by Newton steps on
/// the orthonormal Hermite recurrence, which also yields the weights.
/// Nodes are returned in increasing order. For orders above roughly 350 the
/// outermost weights fall below the smallest subnormal and are stored as 0.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(invalid("order", "must be positive"));
    }
    let n = order;
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);

    // Orthonormal Hermite value of degree n at z, and its derivative.
    let hermite = |z: f64| -> (f64, f64) {
        let mut p1 = pim4;
        let mut p2 = 0.0;
        for j in 0..n {
            let p3 = p2;
            p2 = p1;
            let jf = j as f64;
            p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        }
        (p1, (2.0 * nf).sqrt() * p2)
    };

    let mut x = vec![0.0; n];
    let mut off: Vec<f64> = (1..=n).map(|k| (0.5 * k as f64).sqrt()).collect();
    tridiagonal_eigenvalues(&mut x, &mut off)?;
    x.sort_by(f64::total_cmp);

    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Polish the non-negative half and mirror it.
        let j = n - 1 - i;
        let mut z = x[j].abs();
        for _ in 0..3 {
            let (p, dp) = hermite(z);
            if !(p.is_finite() && dp.is_finite()) || dp == 0.0 {
                break;
            }
            z -= p / dp;
        }
        if i == j {
            z = 0.0;
        }
        let (_, dp) = hermite(z);
        x[j] = z;
        x[i] = -z;
        w[j] = 2.0 / (dp * dp);
        w[i] = w[j];
    }
    Ok(QuadratureRule { nodes: x, weights: w })
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(invalid("order", "must be positive"));
    }
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    Ok(QuadratureRule { nodes: x, weights: w })
}

/// Shared, lazily built Gauss-Hermite rules.
pub fn gauss_hermite_cached(order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&order) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_hermite(order)?);
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .insert(order, rule.clone());
    Ok(rule)
}

fn legendre16() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16).expect("order 16 is valid"))
}

/// Parses and range-checks a quadrature order override.
pub fn parse_quad_order(raw: &str) -> Result<usize> {
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| invalid("QBS_QUAD_ORDER", format!("not an integer: {raw:?}")))?;
    if !(2..=MAX_QUAD_ORDER).contains(&n) {
        return Err(invalid(
            "QBS_QUAD_ORDER",
            format!("must lie in 2..={MAX_QUAD_ORDER}, got {n}"),
        ));
    }
    Ok(n)
}

/// Base quadrature order: `QBS_QUAD_ORDER` if it is set and valid, else 96.
pub fn default_quad_order() -> usize {
    static ORDER: OnceLock<usize> = OnceLock::new();
    *ORDER.get_or_init(|| {
        std::env::var(QUAD_ORDER_ENV)
            .ok()
            .and_then(|v| parse_quad_order(&v).ok())
            .unwrap_or(DEFAULT_QUAD_ORDER)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Starting Gauss-Hermite order; doubled until two orders agree.
    pub base_order: usize,
    /// Max-norm agreement required between successive estimates.
    pub tolerance: f64,
    /// Segment budget for the adaptive fallback.
    pub max_segments: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            base_order: default_quad_order(),
            tolerance: 1e-9,
            max_segments: 40_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    GaussHermite { order: usize },
    AdaptiveLegendre { segments: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub values: Vec<f64>,
    pub method: QuadMethod,
}

/// Half-width of the truncated domain used by the adaptive fallback.
/// The Gaussian mass beyond it is below 1e-36.
const GAUSS_CUTOFF: f64 = 9.0;

/// Expectation of the vector-valued `f` under the density `e^(-y^2)/sqrt(pi)`.
///
/// `f(y, out)` writes `dim` values into `out`. Gauss-Hermite orders
/// `n, 2n, 4n, ...` are compared until two agree to `settings.tolerance`;
/// integrands that oscillate too fast for that fall back to adaptive
/// Gauss-Legendre on `[-9, 9]`.
pub fn gaussian_expectation<F>(dim: usize, f: F, settings: &QuadSettings) -> Result<Expectation>
where
    F: Fn(f64, &mut [f64]),
{
    let mut buf = vec![0.0; dim];
    let gh = |order: usize, buf: &mut [f64]| -> Result<Vec<f64>> {
        let rule = gauss_hermite_cached(order)?;
        let mut acc = vec![0.0; dim];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            if w == 0.0 {
                continue;
            }
            f(x, buf);
            for (a, v) in acc.iter_mut().zip(buf.iter()) {
                *a += w * v;
            }
        }
        let norm = PI.sqrt();
        Ok(acc.into_iter().map(|a| a / norm).collect())
    };

    let mut order = settings.base_order.clamp(2, MAX_QUAD_ORDER);
    if order * 2 > MAX_QUAD_ORDER {
        order = MAX_QUAD_ORDER / 2;
    }
    let mut prev = gh(order, &mut buf)?;
    while order * 2 <= MAX_QUAD_ORDER {
        let next_order = order * 2;
        let next = gh(next_order, &mut buf)?;
        if max_diff(&prev, &next) <= settings.tolerance {
            return Ok(Expectation {
                values: next,
                method: QuadMethod::GaussHermite { order: next_order },
            });
        }
        prev = next;
        order = next_order;
    }

    let weighted = |y: f64, out: &mut [f64]| {
        f(y, out);
        let w = (-y * y).exp() / PI.sqrt();
        for v in out.iter_mut() {
            *v *= w;
        }
    };
    let (values, segments) = adaptive_legendre(
        dim,
        weighted,
        -GAUSS_CUTOFF,
        GAUSS_CUTOFF,
        settings.tolerance,
        settings.max_segments,
    )?;
    Ok(Expectation {
        values,
        method: QuadMethod::AdaptiveLegendre { segments },
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct Segment {
    a: f64,
    b: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn legendre_on<F: Fn(f64, &mut [f64])>(f: &F, a: f64, b: f64, buf: &mut [f64]) -> Vec<f64> {
    let rule = legendre16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = vec![0.0; buf.len()];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        f(mid + half * x, buf);
        for (s, v) in acc.iter_mut().zip(buf.iter()) {
            *s += w * half * v;
        }
    }
    acc
}

/// Globally adaptive 16-point Gauss-Legendre on `[lo, hi]`.
///
/// Each segment's error is estimated by comparing the rule on the whole
/// segment with the sum over its two halves; the worst segment is bisected
/// until the summed estimate drops below `tol`.
pub fn adaptive_legendre<F: Fn(f64, &mut [f64])>(
    dim: usize,
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_segments: usize,
) -> Result<(Vec<f64>, usize)> {
    let mut buf = vec![0.0; dim];
    let make = |a: f64, b: f64, whole: Option<Vec<f64>>, buf: &mut [f64]| -> Segment {
        let whole = whole.unwrap_or_else(|| legendre_on(&f, a, b, buf));
        let m = 0.5 * (a + b);
        let left = legendre_on(&f, a, m, buf);
        let right = legendre_on(&f, m, b, buf);
        let err = whole
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(w, (l, r))| (w - l - r).abs())
            .fold(0.0, f64::max);
        Segment { a, b, left, right, err }
    };

    let initial = 32;
    let mut heap = BinaryHeap::new();
    let h = (hi - lo) / initial as f64;
    for i in 0..initial {
        let a = lo + h * i as f64;
        let b = if i + 1 == initial { hi } else { a + h };
        heap.push(make(a, b, None, &mut buf));
    }
    // Running total of the error estimates; re-summed exactly before it is
    // trusted for termination.
    let mut total_err: f64 = heap.iter().map(|s| s.err).sum();
    loop {
        if total_err <= tol {
            total_err = heap.iter().map(|s| s.err).sum();
            if total_err <= tol {
                break;
            }
        }
        if heap.len() >= max_segments {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature exhausted {max_segments} segments (error estimate {total_err:.3e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let left = make(worst.a, m, Some(worst.left), &mut buf);
        let right = make(m, worst.b, Some(worst.right), &mut buf);
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut total = vec![0.0; dim];
    for s in &segs {
        for (t, (l, r)) in total.iter_mut().zip(s.left.iter().zip(&s.right)) {
            *t += l + r;
        }
    }
    Ok((total, segs.len()))
}

/// Composite Gauss-Legendre with `panels` equal panels of `order` points.
pub fn composite_legendre<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
) -> Result<f64> {
    if panels == 0 {
        return Err(invalid("panels", "must be positive"));
    }
    let rule = gauss_legendre(order)?;
    let h = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = lo + h * (p as f64 + 0.5);
        sum += 0.5 * h * rule.integrate(|x| f(mid + 0.5 * h * x));
    }
    Ok(sum)
}
