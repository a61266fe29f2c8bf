//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use qspd::manifold::metric_raw;
use qspd::{QMatrix, SpdQMatrix};
use statrs::distribution::{ContinuousCDF, Normal};

/// `E[Σ r_i²]` under the n = 2 radial density, from an mpmath quadrature at 30 digits.
pub const FROZEN_N2_SECOND_MOMENT: [(f64, f64); 3] =
    [(0.25, 0.388_377_333_427_421_6), (0.5, 1.731_797_737_287_446_7), (1.0, 10.882_584_137_641_866)];

/// Adaptive Simpson quadrature on `[a, b]` to relative accuracy `rel_tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
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
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= 1e-15 * (left + right).abs() {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // Start from a composite rule so narrow peaks are not missed, then refine
    // each panel against its share of the tolerance.
    const PANELS: usize = 256;
    let h = (b - a) / PANELS as f64;
    let panels: Vec<[f64; 5]> = (0..PANELS)
        .map(|i| {
            let x = a + i as f64 * h;
            let (fa, fm, fb) = (f(x), f(x + 0.5 * h), f(x + h));
            [x, fa, fm, fb, simpson(fa, fm, fb, x, x + h)]
        })
        .collect();
    let tol = rel_tol * panels.iter().map(|p| p[4]).sum::<f64>().abs() / PANELS as f64;
    panels.iter().map(|&[x, fa, fm, fb, whole]| recurse(f, x, x + h, fa, fm, fb, whole, tol, 40)).sum()
}

/// `E[r₁² + r₂²]` for n = 2 by rotating to `u = (r₁+r₂)/√2`, `v = (r₁−r₂)/√2`:
/// `u ~ N(0, σ²)` and `v` has density `∝ exp(−v²/2σ²) sinh⁴(|v|/√2)`.
pub fn n2_radial_second_moment(sigma: f64) -> f64 {
    let g = |v: f64| (-v * v / (2.0 * sigma * sigma)).exp() * (v / std::f64::consts::SQRT_2).sinh().powi(4);
    let upper = 2.0 * std::f64::consts::SQRT_2 * sigma * sigma + 40.0 * sigma;
    let z = adaptive_simpson(&g, 0.0, upper, 1e-13);
    let m2 = adaptive_simpson(&|v| v * v * g(v), 0.0, upper, 1e-13);
    sigma * sigma + m2 / z
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Naive i.i.d. standard error of the mean.
pub fn stderr(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Batch-means standard error for correlated chains (100 batches).
pub fn batch_stderr(xs: &[f64]) -> f64 {
    let b = 100.min(xs.len());
    let size = xs.len() / b;
    let means: Vec<f64> = (0..b).map(|i| mean(&xs[i * size..(i + 1) * size])).collect();
    (variance(&means) / b as f64).sqrt()
}

/// Kolmogorov–Smirnov statistic against `N(0, σ²)`.
pub fn ks_normal(xs: &[f64], sigma: f64) -> f64 {
    let dist = Normal::new(0.0, sigma).unwrap();
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = dist.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Squared length of the velocity of `t ↦ exp(tX) diag(e^{r + t dr}) exp(tX)†`
/// at `t = 0` by central differences, measured with the metric at `diag(e^r)`.
pub fn fd_polar_speed_sq(r: &[f64], dr: &[f64], x: &QMatrix, h: f64) -> f64 {
    let curve = |t: f64| {
        let e = x.scale(t).expm();
        let d = QMatrix::real_diagonal(&r.iter().zip(dr).map(|(a, b)| (a + t * b).exp()).collect::<Vec<_>>());
        &(&e * &d) * &e.dagger()
    };
    let vel = (&curve(h) - &curve(-h)).scale(0.5 / h).hermitian_part();
    let base = SpdQMatrix::real_diagonal(&r.iter().map(|a| a.exp()).collect::<Vec<_>>()).unwrap();
    metric_raw(&base, &vel, &vel)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let m = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..m).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Real 4n×4n symmetric image of the complex adjoint: `[[Re χ, −Im χ], [Im χ, Re χ]]`.
/// Each quaternion eigenvalue appears four times in its spectrum.
pub fn real_embedding(s: &QMatrix) -> Vec<Vec<f64>> {
    let c = s.complex_adjoint();
    let m = c.nrows();
    let mut a = vec![vec![0.0; 2 * m]; 2 * m];
    for i in 0..m {
        for j in 0..m {
            let z = c[(i, j)];
            a[i][j] = z.re;
            a[i][j + m] = -z.im;
            a[i + m][j] = z.im;
            a[i + m][j + m] = z.re;
        }
    }
    a
}
