//! Gauss–Legendre rules and panel layouts.

use crate::scalar::Real;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let tol = T::epsilon() * T::of(8.0);
        for i in 0..n.div_ceil(2) {
            let guess = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = T::of(guess);
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= tol {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * T::of(0.5);
        let mid = (a + b) * T::of(0.5);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over consecutive breakpoints.
    pub fn integrate_panels<F: FnMut(T) -> T>(&self, breaks: &[T], mut f: F) -> T {
        breaks.windows(2).map(|p| self.integrate(p[0], p[1], &mut f)).sum()
    }
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for j in 1..n {
        let jf = T::of_usize(j);
        let p2 = ((T::of_usize(2 * j + 1)) * x * p1 - jf * p0) / (jf + T::one());
        p0 = p1;
        p1 = p2;
    }
    let d = T::of_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Breakpoints of a geometric mesh refining toward `start`:
/// `start`, `start + len·ratio^levels`, …, `start + len·ratio`, `start + len`.
pub fn graded_breaks<T: Real>(start: T, len: T, levels: usize, ratio: T) -> Vec<T> {
    let mut out = Vec::with_capacity(levels + 2);
    out.push(start);
    for j in (0..=levels).rev() {
        out.push(start + len * ratio.powi(j as i32));
    }
    out
}

/// Breakpoints splitting [a, b] into equal panels no longer than `max_len`.
pub fn uniform_breaks<T: Real>(a: T, b: T, max_len: T) -> Vec<T> {
    if b <= a {
        return vec![a];
    }
    let count = ((b - a) / max_len).ceil().to64().max(1.0) as usize;
    let step = (b - a) / T::of_usize(count);
    (0..=count).map(|i| if i == count { b } else { a + step * T::of_usize(i) }).collect()
}
