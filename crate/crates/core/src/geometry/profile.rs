//! Radial profiles for building graph hypersurfaces: constants, off-center
//! geodesic spheres, Legendre perturbations (axisymmetric) and real
//! spherical-harmonic perturbations (full grids on `S^2`).

use crate::scalar::Real;

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre_p<R: Real>(l: u32, x: R) -> R {
    match l {
        0 => R::one(),
        1 => x,
        _ => {
            let mut p_prev = R::one();
            let mut p = x;
            for j in 2..=l {
                let jf = R::from_f(j as f64);
                let next =
                    ((R::from_f(2.0 * j as f64 - 1.0)) * x * p - (jf - R::one()) * p_prev) / jf;
                p_prev = p;
                p = next;
            }
            p
        }
    }
}

/// Associated Legendre `P_l^m(x)` (unnormalized, Condon-Shortley phase).
pub fn assoc_legendre_p<R: Real>(l: u32, m: u32, x: R) -> R {
    assert!(m <= l, "order must not exceed degree");
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
    let mut pmm = R::one();
    if m > 0 {
        let somx2 = ((R::one() - x) * (R::one() + x)).sqrt();
        let mut fact = R::one();
        for _ in 0..m {
            pmm = -pmm * fact * somx2;
            fact = fact + R::from_f(2.0);
        }
    }
    if l == m {
        return pmm;
    }
    // P_{m+1}^m = x (2m+1) P_m^m
    let mut pmmp1 = x * R::from_f(2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = R::zero();
    for ll in (m + 2)..=l {
        pll = (x * R::from_f(2.0 * ll as f64 - 1.0) * pmmp1
            - R::from_f((ll + m) as f64 - 1.0) * pmm)
            / R::from_f((ll - m) as f64);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Axisymmetric radial profile `r(u)`, `u` the polar angle.
#[derive(Debug, Clone)]
pub enum AxisymProfile<R> {
    /// Geodesic sphere about the origin.
    Constant { radius: R },
    /// Geodesic sphere of radius `radius` centered at distance `offset`
    /// along the axis; a nonconstant graph with fully known geometry.
    OffsetSphere { radius: R, offset: R },
    /// `r(u) = base + sum_j amplitude_j P_{degree_j}(cos u)`.
    LegendreModes { base: R, modes: Vec<(u32, R)> },
}

impl<R: Real> AxisymProfile<R> {
    pub fn eval(&self, u: R) -> R {
        match self {
            AxisymProfile::Constant { radius } => *radius,
            AxisymProfile::OffsetSphere { radius, offset } => {
                offset_sphere_radius(*radius, *offset, u)
            }
            AxisymProfile::LegendreModes { base, modes } => {
                let x = u.cos();
                let mut r = *base;
                for &(l, amp) in modes {
                    r = r + amp * legendre_p(l, x);
                }
                r
            }
        }
    }
}

/// Radial graph of the geodesic sphere of radius `rho` centered at distance
/// `d < rho` along the polar axis. From the hyperbolic law of cosines,
/// `cosh rho = cosh d cosh r - sinh d sinh r cos u`, solved for `r`.
pub fn offset_sphere_radius<R: Real>(rho: R, d: R, u: R) -> R {
    let b_over_a = d.tanh() * u.cos();
    let shift = b_over_a.atanh();
    // sqrt(cosh^2 d - sinh^2 d cos^2 u) = sqrt(1 + sinh^2 d sin^2 u)
    let s = d.sinh() * u.sin();
    let root = (R::one() + s * s).sqrt();
    shift + (rho.cosh() / root).acosh()
}

/// One real spherical-harmonic mode on `S^2`:
/// `amplitude * P_l^m(cos u) cos(m phi + phase)`.
#[derive(Debug, Clone)]
pub struct HarmonicMode<R> {
    pub degree: u32,
    pub order: u32,
    pub amplitude: R,
    pub phase: R,
}

/// Profile for full lat-long grids in `H^3`.
#[derive(Debug, Clone)]
pub struct Grid3Profile<R> {
    pub base: R,
    pub modes: Vec<HarmonicMode<R>>,
}

impl<R: Real> Grid3Profile<R> {
    pub fn eval(&self, u: R, phi: R) -> R {
        let x = u.cos();
        let mut r = self.base;
        for mode in &self.modes {
            let angular = (R::from_f(mode.order as f64) * phi + mode.phase).cos();
            r = r + mode.amplitude * assoc_legendre_p(mode.degree, mode.order, x) * angular;
        }
        r
    }
}
