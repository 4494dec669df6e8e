//! Quadrature nodes, finite-difference stencils and deterministic reductions
//! for the polar grids.
//!
//! Radial profiles are sampled at Gauss-Legendre nodes mapped to the polar
//! interval `(0, pi)`. Derivatives use 5-point stencils with weights from
//! Fornberg's algorithm on the actual (non-uniform) node set; pole closure
//! comes from parity ghosts, since every admissible profile is an even
//! function of the polar angle across both poles.

use crate::scalar::Real;

/// Gauss-Legendre nodes (ascending, in `(-1, 1)`) and weights.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 2, "need at least two quadrature nodes");
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = R::from_f(n as f64);
    for i in 0..n.div_ceil(2) {
        // Standard initial guess, then Newton on P_n.
        let theta = (R::from_f(i as f64) + R::from_f(0.75)) / (nf + R::from_f(0.5));
        let mut x = (theta * R::PI()).cos();
        let mut dp = R::one();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= R::epsilon() * (R::one() + x.abs()) {
                break;
            }
        }
        let w = R::from_f(2.0) / ((R::one() - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p_prev = R::one();
    let mut p = x;
    for j in 2..=n {
        let jf = R::from_f(j as f64);
        let next = ((R::from_f(2.0 * j as f64 - 1.0)) * x * p - (jf - R::one()) * p_prev) / jf;
        p_prev = p;
        p = next;
    }
    let d = R::from_f(n as f64) * (x * p - p_prev) / (x * x - R::one());
    (p, d)
}

/// Finite-difference weights at `x0` from arbitrary nodes `xs`, for all
/// derivative orders `0..=max_order` (Fornberg's recursion).
pub fn fd_weights<R: Real>(x0: R, xs: &[R], max_order: usize) -> Vec<Vec<R>> {
    let n = xs.len();
    let m = max_order;
    let mut c = vec![vec![R::zero(); m + 1]; n];
    let mut c1 = R::one();
    let mut c4 = xs[0] - x0;
    c[0][0] = R::one();
    for i in 1..n {
        let mut c2 = R::one();
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=m.min(i)).rev() {
                    c[i][k] = c1 * (R::from_f(k as f64) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=m.min(i)).rev() {
                c[j][k] = (c4 * c[j][k] - R::from_f(k as f64) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    // transpose to [order][node]
    (0..=m)
        .map(|k| (0..n).map(|i| c[i][k]).collect())
        .collect()
}

/// Pairwise tree sum: deterministic for a fixed slice regardless of how the
/// values were produced.
pub fn tree_sum<R: Real>(vals: &[R]) -> R {
    match vals.len() {
        0 => R::zero(),
        1 => vals[0],
        n => {
            let mid = n / 2;
            tree_sum(&vals[..mid]) + tree_sum(&vals[mid..])
        }
    }
}

/// Reference for a stencil node: either an interior sample or a parity ghost
/// mirrored across one of the poles. For full lat-long grids the mirrored
/// sample additionally lives on the antipodal azimuth column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef {
    Interior(usize),
    MirrorStart(usize),
    MirrorEnd(usize),
}

/// One 5-point stencil: node references with first- and second-derivative
/// weights.
#[derive(Debug, Clone)]
pub struct Stencil<R> {
    pub nodes: [NodeRef; 5],
    pub d1: [R; 5],
    pub d2: [R; 5],
}

/// Polar quadrature grid: Gauss-Legendre nodes on `(0, pi)` with parity-ghost
/// difference stencils.
#[derive(Debug, Clone)]
pub struct PolarGrid<R> {
    /// Polar angles, ascending, strictly inside `(0, pi)`.
    pub nodes: Vec<R>,
    /// Plain Gauss-Legendre weights mapped to `[0, pi]` (no angular density).
    pub weights: Vec<R>,
    pub stencils: Vec<Stencil<R>>,
    /// Smallest gap between adjacent nodes (first/last gap measured to the
    /// mirrored ghost).
    pub min_spacing: R,
}

impl<R: Real> PolarGrid<R> {
    /// Gauss-Legendre nodes mapped to `(0, pi)`; the quadrature choice for
    /// axisymmetric profiles.
    pub fn gauss(resolution: usize) -> Self {
        assert!(resolution >= 8, "polar grid needs at least 8 nodes");
        let (x, w) = gauss_legendre::<R>(resolution);
        let half_pi = R::PI() / R::from_f(2.0);
        let nodes: Vec<R> = x.iter().map(|&xi| (xi + R::one()) * half_pi).collect();
        let weights: Vec<R> = w.iter().map(|&wi| wi * half_pi).collect();
        Self::build(nodes, weights)
    }

    /// Uniform cell-centered nodes `(i + 1/2) pi / n` with midpoint weights;
    /// used by the full lat-long grids, where node clustering at the poles
    /// would cripple explicit time stepping.
    pub fn uniform(resolution: usize) -> Self {
        assert!(resolution >= 8, "polar grid needs at least 8 nodes");
        let h = R::PI() / R::from_f(resolution as f64);
        let half = R::from_f(0.5);
        let nodes: Vec<R> = (0..resolution)
            .map(|i| (R::from_f(i as f64) + half) * h)
            .collect();
        let weights = vec![h; resolution];
        Self::build(nodes, weights)
    }

    fn build(nodes: Vec<R>, weights: Vec<R>) -> Self {
        let n = nodes.len();
        // Extended axis: two ghosts mirrored across each pole.
        let pi = R::PI();
        let ext_coord = |r: NodeRef| -> R {
            match r {
                NodeRef::Interior(i) => nodes[i],
                NodeRef::MirrorStart(i) => -nodes[i],
                NodeRef::MirrorEnd(i) => pi + (pi - nodes[i]),
            }
        };
        let extended: Vec<NodeRef> = std::iter::once(NodeRef::MirrorStart(1))
            .chain(std::iter::once(NodeRef::MirrorStart(0)))
            .chain((0..n).map(NodeRef::Interior))
            .chain(std::iter::once(NodeRef::MirrorEnd(n - 1)))
            .chain(std::iter::once(NodeRef::MirrorEnd(n - 2)))
            .collect();

        let mut stencils = Vec::with_capacity(n);
        for (i, &node) in nodes.iter().enumerate() {
            // Node i sits at extended position i + 2; take the centered
            // 5-point window.
            let window: Vec<NodeRef> = extended[i..i + 5].to_vec();
            let xs: Vec<R> = window.iter().map(|&r| ext_coord(r)).collect();
            let w = fd_weights(node, &xs, 2);
            stencils.push(Stencil {
                nodes: [window[0], window[1], window[2], window[3], window[4]],
                d1: [w[1][0], w[1][1], w[1][2], w[1][3], w[1][4]],
                d2: [w[2][0], w[2][1], w[2][2], w[2][3], w[2][4]],
            });
        }

        let mut min_spacing = nodes[0] + nodes[0];
        for pair in nodes.windows(2) {
            let gap = pair[1] - pair[0];
            if gap < min_spacing {
                min_spacing = gap;
            }
        }
        let end_gap = (pi - nodes[n - 1]) + (pi - nodes[n - 1]);
        if end_gap < min_spacing {
            min_spacing = end_gap;
        }

        PolarGrid {
            nodes,
            weights,
            stencils,
            min_spacing,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// First and second derivative of an axisymmetric sample vector at node
    /// `i`, using the parity ghosts (mirrored values equal the interior ones).
    pub fn derivatives(&self, values: &[R], i: usize) -> (R, R) {
        let st = &self.stencils[i];
        let mut d1 = R::zero();
        let mut d2 = R::zero();
        for (a, node) in st.nodes.iter().enumerate() {
            let v = match *node {
                NodeRef::Interior(j) | NodeRef::MirrorStart(j) | NodeRef::MirrorEnd(j) => values[j],
            };
            d1 = d1 + st.d1[a] * v;
            d2 = d2 + st.d2[a] * v;
        }
        (d1, d2)
    }
}

/// Barycentric interpolation weights for an arbitrary node set.
pub fn barycentric_weights<R: Real>(nodes: &[R]) -> Vec<R> {
    let n = nodes.len();
    let mut w = vec![R::one(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[i] = w[i] / (nodes[i] - nodes[j]);
            }
        }
    }
    w
}

/// Barycentric evaluation of the interpolant through `(nodes, values)` at `x`.
pub fn barycentric_eval<R: Real>(nodes: &[R], weights: &[R], values: &[R], x: R) -> R {
    let mut num = R::zero();
    let mut den = R::zero();
    for i in 0..nodes.len() {
        let d = x - nodes[i];
        if d.abs() < R::epsilon() {
            return values[i];
        }
        let t = weights[i] / d;
        num = num + t * values[i];
        den = den + t;
    }
    num / den
}

/// Classic centered 4th-order periodic stencils for the azimuthal direction.
pub fn periodic_d1<R: Real>(values: &[R], i: usize, h: R) -> R {
    let n = values.len();
    let at = |o: isize| values[((i as isize + o).rem_euclid(n as isize)) as usize];
    (at(-2) - R::from_f(8.0) * at(-1) + R::from_f(8.0) * at(1) - at(2)) / (R::from_f(12.0) * h)
}

pub fn periodic_d2<R: Real>(values: &[R], i: usize, h: R) -> R {
    let n = values.len();
    let at = |o: isize| values[((i as isize + o).rem_euclid(n as isize)) as usize];
    (-at(-2) + R::from_f(16.0) * at(-1) - R::from_f(30.0) * at(0) + R::from_f(16.0) * at(1)
        - at(2))
        / (R::from_f(12.0) * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(6);
        // degree <= 11 exact: try x^10
        let int: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(10)).sum();
        assert!((int - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polar_grid_integrates_sine_powers() {
        let grid = PolarGrid::<f64>::gauss(32);
        // int_0^pi sin u du = 2
        let s: f64 = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .map(|(u, w)| w * u.sin())
            .sum();
        assert!((s - 2.0).abs() < 1e-13, "got {s}");
        // int_0^pi sin^3 u du = 4/3
        let s: f64 = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .map(|(u, w)| w * u.sin().powi(3))
            .sum();
        assert!((s - 4.0 / 3.0).abs() < 1e-13, "got {s}");
    }

    #[test]
    fn fornberg_recovers_uniform_stencil() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fd_weights(0.0f64, &xs, 2);
        let d1_expected = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2_expected = [
            -1.0 / 12.0,
            16.0 / 12.0,
            -30.0 / 12.0,
            16.0 / 12.0,
            -1.0 / 12.0,
        ];
        for i in 0..5 {
            assert!((w[1][i] - d1_expected[i]).abs() < 1e-13);
            assert!((w[2][i] - d2_expected[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn polar_derivatives_of_even_profile() {
        // r(u) = cos(2u) is even across both poles; derivatives must match.
        let grid = PolarGrid::<f64>::gauss(64);
        let values: Vec<f64> = grid.nodes.iter().map(|u| (2.0 * u).cos()).collect();
        for i in 0..grid.len() {
            let (d1, d2) = grid.derivatives(&values, i);
            let u = grid.nodes[i];
            assert!(
                (d1 + 2.0 * (2.0 * u).sin()).abs() < 1e-4,
                "d1 at node {i}: {d1}"
            );
            assert!(
                (d2 + 4.0 * (2.0 * u).cos()).abs() < 2e-3,
                "d2 at node {i}: {d2}"
            );
        }
    }

    #[test]
    fn derivative_convergence_order() {
        // Empirical order of the 5-point stencils on the Gauss-Legendre axis.
        let err = |n: usize| -> f64 {
            let grid = PolarGrid::<f64>::gauss(n);
            let values: Vec<f64> = grid.nodes.iter().map(|u| (2.0 * u).cos()).collect();
            (0..n)
                .map(|i| {
                    let (d1, _) = grid.derivatives(&values, i);
                    (d1 + 2.0 * (2.0 * grid.nodes[i]).sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let e1 = err(24);
        let e2 = err(48);
        let order = (e1 / e2).log2();
        assert!(order > 2.0, "measured order {order}");
    }

    #[test]
    fn periodic_stencils() {
        let n = 64;
        let h = std::f64::consts::TAU / n as f64;
        let vals: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * h).sin()).collect();
        for i in 0..n {
            let x = i as f64 * h;
            assert!((periodic_d1(&vals, i, h) - 3.0 * (3.0 * x).cos()).abs() < 1e-3);
            assert!((periodic_d2(&vals, i, h) + 9.0 * (3.0 * x).sin()).abs() < 1e-2);
        }
    }

    #[test]
    fn tree_sum_matches_naive() {
        let vals: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = vals.iter().sum();
        assert!((tree_sum(&vals) - naive).abs() < 1e-9);
    }
}
