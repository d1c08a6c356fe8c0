//! Gauss-Legendre quadrature used for moment constants without a closed form.

use std::sync::OnceLock;

/// Number of Gauss-Legendre nodes per integration segment.
pub const NODES: usize = 2048;

/// Half-width of the central integration window for unbounded supports,
/// in standard deviations.
pub const WINDOW: f64 = 20.0;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(NODES))
}

/// Nodes and weights on [-1, 1] by Newton iteration on `P_n`.
fn legendre_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `int_a^b f(x) dx`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        s += w * f(mid + half * x);
    }
    s * half
}

/// `int_l^inf f(x) dx` via `x = l / v^2`, which keeps polynomial tails of
/// heavy-tailed densities integrable in `v`.
pub fn integrate_upper_tail(f: impl Fn(f64) -> f64, l: f64) -> f64 {
    integrate(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            let x = l / (v * v);
            let fx = f(x);
            if fx == 0.0 || !fx.is_finite() {
                0.0
            } else {
                fx * 2.0 * l / (v * v * v)
            }
        },
        0.0,
        1.0,
    )
}

/// Integral over the whole line, split at the given interior breakpoints
/// (sorted), with tails beyond `[-window, window]`.
pub fn integrate_line(f: impl Fn(f64) -> f64, breaks: &[f64], window: f64) -> f64 {
    let mut pts = vec![-window];
    pts.extend(breaks.iter().copied().filter(|b| b.abs() < window));
    pts.push(window);
    let mut s = 0.0;
    for w in pts.windows(2) {
        s += integrate(&f, w[0], w[1]);
    }
    s + integrate_upper_tail(&f, window) + integrate_upper_tail(|x| f(-x), window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        assert!((integrate(|x| x * x, 0.0, 3.0) - 9.0).abs() < 1e-12);
        assert!((integrate(|x| x.powi(7) - x, -1.0, 2.0) - (255.0 / 8.0 - 1.5)).abs() < 1e-10);
    }

    #[test]
    fn weights_sum_to_two() {
        let r = rule();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass_and_tails() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((integrate_line(phi, &[0.0], WINDOW) - 1.0).abs() < 1e-12);
        // Cauchy density has heavy tails; check total mass
        let cauchy = |x: f64| 1.0 / (std::f64::consts::PI * (1.0 + x * x));
        assert!((integrate_line(cauchy, &[], WINDOW) - 1.0).abs() < 1e-10);
    }
}
