//! Composite Gauss–Legendre helpers shared by the pairing routines.
//!
//! Everything here works on explicit breakpoint lists so that callers keep
//! full control over where panels start and stop (poles, kinks, support
//! edges). Summation order is fixed by the breakpoint order, which keeps
//! results bit-stable across runs.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Default number of nodes per panel.
pub const PANEL_ORDER: usize = 10;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// sorted by node. Rules are built once and cached for the process.
pub fn rule(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard.entry(n).or_insert_with(|| {
        let degree = NonZeroUsize::new(n.max(1)).expect("nonzero");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree)
            .as_node_weight_pairs()
            .to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Box::leak(pairs.into_boxed_slice())
    })
}

/// Gauss rule of order `n` on a single panel `[a, b]`.
pub fn panel<F>(a: f64, b: f64, n: usize, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in rule(n) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Real-valued variant of [`panel`].
pub fn panel_real<F>(a: f64, b: f64, n: usize, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule(n).iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Sum of [`panel`] over consecutive breakpoints.
pub fn composite<F>(breaks: &[f64], n: usize, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| panel(w[0], w[1], n, &mut f))
        .sum()
}

/// Real-valued variant of [`composite`].
pub fn composite_real<F>(breaks: &[f64], n: usize, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| panel_real(w[0], w[1], n, &mut f))
        .sum()
}

/// Uniform breakpoints covering `[a, b]` with panels no wider than `h`.
pub fn uniform(a: f64, b: f64, h: f64) -> Vec<f64> {
    if b <= a {
        return vec![a];
    }
    let count = ((b - a) / h).ceil().max(1.0) as usize;
    (0..=count)
        .map(|i| if i == count { b } else { a + (b - a) * i as f64 / count as f64 })
        .collect()
}

/// Breakpoints from `near` to `far` whose widths grow with the distance from
/// `focus`. Panel width is half the current distance to the focus, capped at
/// `h_max`. Works in either direction (`far < near` is allowed) and always
/// returns the points ordered from `near` to `far`.
pub fn graded(focus: f64, near: f64, far: f64, h_max: f64) -> Vec<f64> {
    let dir = if far >= near { 1.0 } else { -1.0 };
    let mut pts = vec![near];
    let mut x = near;
    while dir * (far - x) > 0.0 {
        let dist = (x - focus).abs();
        let w = (0.5 * dist).min(h_max).max(1e-300);
        let next = x + dir * w;
        if dir * (far - next) <= 0.25 * w {
            pts.push(far);
            break;
        }
        pts.push(next);
        x = next;
    }
    pts
}

/// Dyadic breakpoints on `[0, a]` refining towards 0: `0, a/2^levels, …, a/2, a`,
/// each dyadic shell further split so no panel exceeds `h_max`.
pub fn dyadic_to_zero(a: f64, levels: u32, h_max: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for j in (0..=levels).rev() {
        let hi = a / 2f64.powi(j as i32);
        let lo = *pts.last().expect("nonempty");
        if hi <= lo {
            continue;
        }
        let seg = uniform(lo, hi, h_max);
        pts.extend_from_slice(&seg[1..]);
    }
    pts
}

/// Concatenate breakpoint lists, dropping duplicated junction points.
pub fn join(parts: &[Vec<f64>]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for part in parts {
        for &x in part {
            if out.last().is_none_or(|&l| x > l) {
                out.push(x);
            }
        }
    }
    out
}

/// Insert extra breakpoints (sorted, inside the range) into an ordered list.
pub fn with_extra(mut pts: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    if pts.len() < 2 {
        return pts;
    }
    let lo = pts[0];
    let hi = *pts.last().expect("nonempty");
    for &e in extra {
        if e > lo && e < hi {
            pts.push(e);
        }
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = rule(10);
        let s: f64 = r.iter().map(|&(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-15);
        assert!(r.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn composite_handles_oscillation() {
        let pts = uniform(0.0, 50.0, 0.5);
        let v = composite_real(&pts, PANEL_ORDER, |x| x.cos());
        assert!((v - 50f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn graded_breakpoints_reach_far_end() {
        let pts = graded(1.0, 1.001, 10.0, 0.25);
        assert_eq!(*pts.last().unwrap(), 10.0);
        assert!(pts.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.25 + 1e-12));
        let back = graded(1.0, 0.999, -5.0, 0.25);
        assert_eq!(*back.last().unwrap(), -5.0);
        assert!(back.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn dyadic_resolves_log_singularity() {
        let pts = dyadic_to_zero(1.0, 60, 0.25);
        let v = composite_real(&pts, PANEL_ORDER, |u| u.ln());
        assert!((v + 1.0).abs() < 1e-14);
    }
}
