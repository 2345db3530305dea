//! Scalar search routines: golden-section maximization and a bracketed
//! secant/bisection root finder.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[a, b]` until the bracket is narrower than `tol`.
/// Returns the best abscissa seen together with its value.
pub fn golden_section_maximize<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 >= f2 {
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
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOutcome {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Finds `g(x) = 0` inside `[lo, hi]` given `g(lo)` and `g(hi)` of opposite sign.
///
/// Each iteration takes a secant (false-position) step across the bracket and
/// falls back to bisection when the bracket fails to halve. An optional
/// starting guess is tried first. Stops as soon as `|g| < value_tol`.
pub fn bracketed_root<G, E>(
    mut g: G,
    (mut lo, mut g_lo): (f64, f64),
    (mut hi, mut g_hi): (f64, f64),
    start: Option<f64>,
    value_tol: f64,
    max_iterations: usize,
) -> Result<RootOutcome, E>
where
    G: FnMut(f64) -> Result<f64, E>,
{
    let mut best = if g_lo.abs() <= g_hi.abs() {
        (lo, g_lo)
    } else {
        (hi, g_hi)
    };
    let mut width = hi - lo;
    let mut force_bisect = false;
    for iteration in 1..=max_iterations {
        let candidate = match start {
            Some(x0) if iteration == 1 && x0 > lo && x0 < hi => x0,
            _ if force_bisect => 0.5 * (lo + hi),
            _ => {
                let x = lo - g_lo * (hi - lo) / (g_hi - g_lo);
                if x.is_finite() && x > lo && x < hi {
                    x
                } else {
                    0.5 * (lo + hi)
                }
            }
        };
        let value = g(candidate)?;
        if value.abs() < best.1.abs() {
            best = (candidate, value);
        }
        if value.abs() < value_tol {
            return Ok(RootOutcome {
                x: candidate,
                value,
                iterations: iteration,
                converged: true,
            });
        }
        if (value < 0.0) == (g_lo < 0.0) {
            lo = candidate;
            g_lo = value;
        } else {
            hi = candidate;
            g_hi = value;
        }
        let new_width = hi - lo;
        force_bisect = new_width > 0.5 * width;
        width = new_width;
        if width <= f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
    }
    Ok(RootOutcome {
        x: best.0,
        value: best.1,
        iterations: max_iterations,
        converged: false,
    })
}
