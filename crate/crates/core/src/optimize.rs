//! One-dimensional root finding and maximisation.

/// Inverse golden ratio (φ − 1).
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Finds a root of `f` on `[lo, hi]` by bisection.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero);
/// returns `None` otherwise. Iterates until the bracket is narrower than `tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return None;
    }
    // 200 halvings exhaust f64 resolution on any finite bracket.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iters: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol * (1.0 + c.abs() + d.abs()) && iters < max_iter {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    if fc > fd {
        Maximum {
            x: c,
            value: fc,
            iters,
        }
    } else {
        Maximum {
            x: d,
            value: fd,
            iters,
        }
    }
}

/// Maximises `f` over `[lo, hi]` (with `lo > 0`) by scanning a geometric grid
/// of `points` nodes and refining the best bracket with golden-section search.
///
/// Handles multimodal objectives as long as the grid resolves the modes.
pub fn grid_refined_max<F>(mut f: F, lo: f64, hi: f64, points: usize) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    assert!(lo > 0.0 && hi > lo && points >= 3);
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    let nodes: Vec<f64> = (0..points).map(|i| lo * ratio.powi(i as i32)).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let a = nodes[best.saturating_sub(1)];
    let b = nodes[(best + 1).min(points - 1)];
    let refined = golden_section_max(&mut f, a, b, 1e-12, 500);
    if refined.value >= values[best] {
        refined
    } else {
        Maximum {
            x: nodes[best],
            value: values[best],
            iters: refined.iters,
        }
    }
}
