//! Derivative-free scalar minimization and bracketed root finding.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// followed by a three-point parabolic step that is kept only if it lowers `f`.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> Minimum {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while b - a > x_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
        if evals > 10_000 {
            break;
        }
    }
    let (mut x, mut fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };

    // endpoints can win for monotone f
    for e in [lo, hi] {
        let fe = f(e);
        evals += 1;
        if fe < fx {
            x = e;
            fx = fe;
        }
    }

    if x > lo && x < hi {
        let step = (b - a).max(x_tol);
        let (xa, xc) = ((x - step).max(lo), (x + step).min(hi));
        let (fa, fc) = (f(xa), f(xc));
        evals += 2;
        let denom = (x - xa) * (fx - fc) - (x - xc) * (fx - fa);
        if denom.abs() > 0.0 {
            let num = (x - xa).powi(2) * (fx - fc) - (x - xc).powi(2) * (fx - fa);
            let xq = x - 0.5 * num / denom;
            if xq.is_finite() && xq > xa && xq < xc {
                let fq = f(xq);
                evals += 1;
                if fq < fx {
                    x = xq;
                    fx = fq;
                }
            }
        }
    }
    Minimum {
        x,
        value: fx,
        evaluations: evals,
    }
}

/// Bisection on a sign-changing bracket. Returns `None` if `f(lo)` and `f(hi)`
/// have the same strict sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, x_tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bisection to a coarse bracket followed by safeguarded Newton polishing.
pub fn bisect_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    coarse_tol: f64,
) -> Option<f64> {
    let mut x = bisect(&f, lo, hi, coarse_tol)?;
    let (blo, bhi) = (x - coarse_tol, x + coarse_tol);
    for _ in 0..50 {
        let fx = f(x);
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(blo..=bhi).contains(&next) {
            break;
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_kink_minimum() {
        let m = golden_section(|x| (x - 0.3).abs() + 1.0, 0.0, 1.0, 1e-12);
        assert!((m.x - 0.3).abs() < 1e-11);
        assert!((m.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn golden_monotone_hits_endpoint() {
        let m = golden_section(|x| x, 0.0, 2.0, 1e-12);
        assert_eq!(m.x, 0.0);
    }

    #[test]
    fn bisect_needs_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn newton_polish_reaches_machine_precision() {
        let r = bisect_newton(|x| x.cos() - x, |x| -x.sin() - 1.0, 0.0, 1.0, 1e-3).unwrap();
        assert!((r.cos() - r).abs() < 1e-15);
    }
}
