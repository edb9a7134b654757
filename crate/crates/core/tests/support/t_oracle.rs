//! Two-sided Student t tail by direct quadrature of the density. Shared by
//! the statistics tests and the acceptance suite.

/// ln Γ((df+1)/2) − ln Γ(df/2) for integer df by the half-integer recursion.
fn ln_gamma_ratio(df: u32) -> f64 {
    let half_pi_ln = std::f64::consts::PI.ln() / 2.0;
    // Γ(k + 1/2) and Γ(k) for integer k built from products.
    let ln_g = |twice: u32| -> f64 {
        // Γ(twice / 2)
        if twice.is_multiple_of(2) {
            (1..twice / 2).map(|k| (k as f64).ln()).sum()
        } else {
            let mut acc = half_pi_ln;
            let mut z = 0.5;
            while z < twice as f64 / 2.0 - 0.25 {
                acc += z.ln();
                z += 1.0;
            }
            acc
        }
    };
    ln_g(df + 1) - ln_g(df)
}

fn ln_density(s: f64, df: f64, ln_c: f64) -> f64 {
    ln_c - (df + 1.0) / 2.0 * (s * s / df).ln_1p()
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // Split in 64 panels first so narrow peaks are not missed.
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(&f, lo, hi, fa, fm, fb, whole, tol, 40)
        })
        .sum()
}

/// ln of 2·P(T ≥ |t|) by quadrature.
pub fn ln_tail_oracle(t: f64, df: u32) -> f64 {
    let t = t.abs();
    let d = df as f64;
    let ln_c = ln_gamma_ratio(df) - 0.5 * (d * std::f64::consts::PI).ln();
    if t < 1.0 {
        let body = integrate(|s| ln_density(s, d, ln_c).exp(), 0.0, t, 1e-16);
        return (1.0 - 2.0 * body).ln();
    }
    // s = t / v on v in (0, 1], scaled by the density at t.
    let ln_ft = ln_density(t, d, ln_c);
    // For df = 1 the integrand tends to (1 + t²) / t as v -> 0; otherwise to 0.
    let g0 = if df == 1 { (1.0 + t * t) / t } else { 0.0 };
    let g = |v: f64| {
        if v == 0.0 {
            return g0;
        }
        let s = t / v;
        (ln_density(s, d, ln_c) - ln_ft).exp() * t / (v * v)
    };
    let integral = integrate(g, 0.0, 1.0, 1e-14);
    std::f64::consts::LN_2 + ln_ft + integral.ln()
}
