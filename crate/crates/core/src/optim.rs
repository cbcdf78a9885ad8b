//! Derivative-free one-dimensional maximization.

/// Result of a bracketed 1-D search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// The maximizer sits on (or within tolerance of) an end of the bracket.
    pub at_boundary: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Both end points are evaluated as well, so a function that is monotone on
/// the bracket is reported at the matching end with `at_boundary` set.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    assert!(lo < hi, "empty bracket [{lo}, {hi}]");
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc >= fd {
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
    }
    let (mut x, mut value) = if fc >= fd { (c, fc) } else { (d, fd) };
    let flo = f(lo);
    let fhi = f(hi);
    if flo > value {
        x = lo;
        value = flo;
    }
    if fhi > value {
        x = hi;
        value = fhi;
    }
    let at_boundary = (x - lo) <= 2.0 * tol || (hi - x) <= 2.0 * tol;
    Maximum { x, value, at_boundary }
}

/// Grid scan over `points` equally spaced abscissae followed by a
/// golden-section refinement inside the cell pair around the best point.
///
/// Used where unimodality is not guaranteed.
pub fn scan_then_golden_max<F>(mut f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    assert!(points >= 3, "need at least three scan points");
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..points {
        let v = f(lo + step * i as f64);
        if v > best.1 {
            best = (i, v);
        }
    }
    let left = lo + step * best.0.saturating_sub(1) as f64;
    let right = (lo + step * (best.0 + 1) as f64).min(hi);
    let mut m = golden_section_max(&mut f, left, right, tol);
    let grid_x = lo + step * best.0 as f64;
    if best.1 > m.value {
        m.x = grid_x;
        m.value = best.1;
    }
    m.at_boundary = (m.x - lo) <= 2.0 * tol || (hi - m.x) <= 2.0 * tol;
    m
}
