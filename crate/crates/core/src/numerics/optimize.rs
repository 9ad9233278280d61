use crate::error::{invalid, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok((x, fx))
}

/// Global maximum of `f` on `[lo, hi]`: a uniform scan of `points` samples
/// locates the best bracket, golden-section search refines it to `tol`.
///
/// Ties in the scan resolve to the smallest abscissa.
pub fn scan_maximize<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if points < 3 || !(hi > lo) {
        return Err(invalid("scan", "need at least 3 points on a non-empty interval"));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..points {
        let v = f(lo + step * i as f64)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let a = lo + step * i.saturating_sub(1) as f64;
    let b = (lo + step * (i + 1) as f64).min(hi);
    let (x, fx) = golden_section_max(&mut f, a, b, tol)?;
    if fx >= best.1 {
        Ok((x, fx))
    } else {
        Ok((lo + step * i as f64, best.1))
    }
}

/// Bisection on a sign-changing bracket, to an abscissa tolerance `tol`.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(invalid("bracket", "function does not change sign"));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// All sign changes of `f` on a uniform scan of `[lo, hi]` with spacing
/// at most `step`, each refined by bisection to `tol`.
pub fn scan_roots<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    if !(hi > lo) || !(step > 0.0) {
        return Err(invalid("scan", "need hi > lo and a positive step"));
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let mut roots = Vec::new();
    let mut xa = lo;
    let mut fa = f(xa)?;
    if fa == 0.0 {
        roots.push(xa);
    }
    for i in 1..=n {
        let xb = if i == n { hi } else { lo + h * i as f64 };
        let fb = f(xb)?;
        if fb == 0.0 {
            roots.push(xb);
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            roots.push(bisect(&mut f, xa, xb, tol)?);
        }
        xa = xb;
        fa = fb;
    }
    Ok(roots)
}
