/// Adaptive Simpson quadrature of `f` over `[lo, hi]`.
///
/// The range is first cut into `panels` equal pieces so narrow features are
/// not skipped by the initial coarse estimate; each piece then refines until
/// the Richardson error estimate falls below its share of `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (hi - lo) / panels as f64;
    let share = tol / panels as f64;
    (0..panels)
        .map(|p| {
            let a = lo + p as f64 * width;
            let b = if p + 1 == panels { hi } else { a + width };
            let fa = f(a);
            let fb = f(b);
            let m = 0.5 * (a + b);
            let fm = f(m);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            refine(&f, a, b, fa, fm, fb, whole, share, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
