//! Special functions for discrete tail normalizers.
//!
//! All normalizers are series over integer support, truncated where the
//! residual tail mass drops below 1e-12 of the total; the residual itself is
//! carried analytically (Euler-Maclaurin / erfc / incomplete gamma) rather
//! than dropped.

/// Hurwitz zeta sum_{k=a}^inf k^{-s} for s > 1, integer a >= 1.
///
/// Direct summation of the first 1024 terms plus an Euler-Maclaurin tail;
/// absolute error is far below 1e-12 over the fitting range of s.
pub fn hurwitz_zeta(s: f64, a: u64) -> f64 {
    debug_assert!(s > 1.0 && a >= 1);
    let k0 = a + 1024;
    let mut sum = 0.0;
    for k in a..k0 {
        sum += (k as f64).powf(-s);
    }
    let k = k0 as f64;
    let tail = k.powf(1.0 - s) / (s - 1.0)
        + 0.5 * k.powf(-s)
        + s * k.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * k.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * k.powf(-s - 5.0) / 30240.0;
    sum + tail
}

/// Upper incomplete gamma for non-integer `a` (possibly negative) and small
/// `z` (< 1), via the series for positive parameter plus downward recurrence
/// Gamma(a, z) = (Gamma(a+1, z) - z^a e^-z) / a.
pub fn upper_gamma_small_z(a: f64, z: f64) -> f64 {
    debug_assert!(z > 0.0 && z < 1.0);
    debug_assert!(a.fract() != 0.0 || a > 0.0);
    let shift = if a > 0.0 { 0 } else { (-a).ceil() as i32 };
    let a_pos = a + shift as f64;
    // Gamma(a_pos) - z^a_pos * sum_n (-z)^n / (n! (a_pos + n))
    let mut sum = 0.0;
    let mut c = 1.0; // (-z)^n / n!
    let mut n = 0u32;
    loop {
        let term = c / (a_pos + n as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-18 + 1e-300 {
            break;
        }
        n += 1;
        c *= -z / n as f64;
        if n > 500 {
            break;
        }
    }
    let mut g = libm::tgamma(a_pos) - z.powf(a_pos) * sum;
    let mut ai = a_pos;
    for _ in 0..shift {
        ai -= 1.0;
        g = (g - z.powf(ai) * (-z).exp()) / ai;
    }
    g
}

/// Golden-section maximization of a unimodal function on [lo, hi].
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
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
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx >= fc && fx >= fd {
        (x, fx)
    } else if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Nelder-Mead maximization in two dimensions. Returns the best point and
/// value, plus whether the simplex met the value tolerance within budget.
pub fn nelder_mead_2d(
    mut f: impl FnMut(f64, f64) -> f64,
    start: (f64, f64),
    scale: (f64, f64),
    tol: f64,
    max_iter: usize,
) -> ((f64, f64), f64, bool) {
    let mut pts = [
        start,
        (start.0 + scale.0, start.1),
        (start.0, start.1 + scale.1),
    ];
    let mut vals = [f(pts[0].0, pts[0].1), f(pts[1].0, pts[1].1), f(pts[2].0, pts[2].1)];

    let order = |pts: &mut [(f64, f64); 3], vals: &mut [f64; 3]| {
        // Descending by value: best first.
        for i in 0..2 {
            for j in i + 1..3 {
                if vals[j] > vals[i] {
                    vals.swap(i, j);
                    pts.swap(i, j);
                }
            }
        }
    };
    order(&mut pts, &mut vals);

    let mut converged = false;
    for _ in 0..max_iter {
        if (vals[0] - vals[2]).abs() < tol {
            converged = true;
            break;
        }
        let centroid = (
            (pts[0].0 + pts[1].0) / 2.0,
            (pts[0].1 + pts[1].1) / 2.0,
        );
        let worst = pts[2];
        let refl = (2.0 * centroid.0 - worst.0, 2.0 * centroid.1 - worst.1);
        let f_refl = f(refl.0, refl.1);
        if f_refl > vals[0] {
            let exp = (
                centroid.0 + 2.0 * (refl.0 - centroid.0),
                centroid.1 + 2.0 * (refl.1 - centroid.1),
            );
            let f_exp = f(exp.0, exp.1);
            if f_exp > f_refl {
                pts[2] = exp;
                vals[2] = f_exp;
            } else {
                pts[2] = refl;
                vals[2] = f_refl;
            }
        } else if f_refl > vals[1] {
            pts[2] = refl;
            vals[2] = f_refl;
        } else {
            let contr = (
                centroid.0 + 0.5 * (worst.0 - centroid.0),
                centroid.1 + 0.5 * (worst.1 - centroid.1),
            );
            let f_contr = f(contr.0, contr.1);
            if f_contr > vals[2] {
                pts[2] = contr;
                vals[2] = f_contr;
            } else {
                // Shrink toward the best point.
                for i in 1..3 {
                    pts[i] = (
                        pts[0].0 + 0.5 * (pts[i].0 - pts[0].0),
                        pts[0].1 + 0.5 * (pts[i].1 - pts[0].1),
                    );
                    vals[i] = f(pts[i].0, pts[i].1);
                }
            }
        }
        order(&mut pts, &mut vals);
    }
    (pts[0], vals[0], converged)
}

/// Ordinary least squares on (x, y) pairs: (slope, intercept, r).
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    debug_assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r = if syy > 0.0 { sxy / (sxx * syy).sqrt() } else { 0.0 };
    (slope, my - slope * mx, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_matches_reference_values() {
        // zeta(2) = pi^2/6, zeta(3) = 1.2020569...; Hurwitz shifts subtract
        // the leading terms exactly.
        assert!((hurwitz_zeta(2.0, 1) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!((hurwitz_zeta(3.0, 1) - 1.202_056_903_159_594_2).abs() < 1e-12);
        let shifted = hurwitz_zeta(2.0, 3);
        let direct = std::f64::consts::PI.powi(2) / 6.0 - 1.0 - 0.25;
        assert!((shifted - direct).abs() < 1e-12);
    }

    #[test]
    fn zeta_near_one_stays_finite_and_accurate() {
        // Compare a slowly-converging case against a long direct sum with an
        // integral tail bound.
        let s = 1.05;
        let a = 5u64;
        let mut direct = 0.0;
        let k_end = 50_000_000u64;
        for k in a..k_end {
            direct += (k as f64).powf(-s);
        }
        direct += (k_end as f64).powf(1.0 - s) / (s - 1.0) + 0.5 * (k_end as f64).powf(-s);
        assert!((hurwitz_zeta(s, a) - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn incomplete_gamma_matches_numeric_integral() {
        // Gamma(-1.5, 0.3) via adaptive trapezoid on [0.3, 60].
        let a = -1.5;
        let z = 0.3;
        let f = |t: f64| t.powf(a - 1.0) * (-t).exp();
        let mut acc = 0.0;
        let steps = 4_000_000;
        let hi: f64 = 60.0;
        let h = (hi - z) / steps as f64;
        for i in 0..steps {
            let t0 = z + i as f64 * h;
            acc += 0.5 * h * (f(t0) + f(t0 + h));
        }
        let got = upper_gamma_small_z(a, z);
        assert!((got - acc).abs() / acc.abs() < 1e-6, "got {got}, want {acc}");
    }

    #[test]
    fn golden_finds_the_peak() {
        let (x, _) = golden_max(|x| -(x - 2.7).powi(2), 0.0, 10.0, 1e-10);
        assert!((x - 2.7).abs() < 1e-8);
    }

    #[test]
    fn ols_recovers_exact_lines() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.85 * x + 0.3).collect();
        let (slope, intercept, r) = ols(&xs, &ys);
        assert!((slope - 0.85).abs() < 1e-12);
        assert!((intercept - 0.3).abs() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
    }
}
