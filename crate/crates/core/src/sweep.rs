//! One-dimensional maximization helpers shared by the angular sweeps.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`. Returns the best
/// `(x, f(x))` seen, including the endpoints supplied through `fa`/`fb`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Indices of the `k` largest local maxima of a periodic sample sequence,
/// falling back to the largest samples when there are fewer local maxima.
pub fn best_periodic_peaks(values: &[f64], k: usize) -> Vec<usize> {
    let n = values.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] >= prev && values[i] >= next
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    peaks.dedup();
    if peaks.len() < k {
        let mut rest: Vec<usize> = (0..n).filter(|i| !peaks.contains(i)).collect();
        rest.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        peaks.extend(rest);
    }
    peaks.truncate(k);
    peaks
}

/// Maximizes a 2π-periodic function: `samples`-point sweep, then golden
/// section on the `refine` best peaks. Returns `(θ, value)`.
pub fn maximize_angle(
    mut f: impl FnMut(f64) -> f64,
    samples: usize,
    refine: usize,
    tol: f64,
) -> (f64, f64) {
    let h = std::f64::consts::TAU / samples as f64;
    let values: Vec<f64> = (0..samples).map(|i| f(i as f64 * h)).collect();
    let mut best = (0.0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i as f64 * h, v);
        }
    }
    for i in best_periodic_peaks(&values, refine) {
        let c = i as f64 * h;
        let r = golden_max(&mut f, c - h, c + h, tol);
        if r.1 > best.1 {
            best = r;
        }
    }
    best
}
