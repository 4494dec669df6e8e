//! Closed forms for geodesic spheres in `H^n` and the round-sphere
//! constants. These back the analytic path of every sphere-valued quantity
//! and serve as quadrature oracles for the grid path.

use crate::combo::binomial;
use crate::scalar::Real;

/// Area of the unit round sphere `S^dim`, `omega_dim = 2 pi^{(dim+1)/2} /
/// Gamma((dim+1)/2)`.
pub fn unit_sphere_area<R: Real>(dim: usize) -> R {
    let m = dim + 1; // Gamma argument is m/2
    let pi = R::PI();
    let two = R::from_f(2.0);
    two * pi.powf(R::from_f(m as f64 / 2.0)) / gamma_half_integer::<R>(m)
}

/// `Gamma(m/2)` for positive integer `m`.
fn gamma_half_integer<R: Real>(m: usize) -> R {
    if m.is_multiple_of(2) {
        R::from_count(crate::combo::factorial(m / 2 - 1))
    } else {
        // Gamma(m/2) = sqrt(pi) (m-2)!! / 2^{(m-1)/2}
        let df = R::from_count(crate::combo::double_factorial(m as i64 - 2));
        let denom = R::from_f(2.0).powi(((m - 1) / 2) as i32);
        R::PI().sqrt() * df / denom
    }
}

/// `int_0^r sinh^m(s) ds`, reduced through the standard recurrence.
pub fn sinh_power_integral<R: Real>(m: usize, r: R) -> R {
    match m {
        0 => r,
        1 => r.cosh() - R::one(),
        _ => {
            let mf = R::from_f(m as f64);
            let s = r.sinh();
            let c = r.cosh();
            (s.powi(m as i32 - 1) * c - (mf - R::one()) * sinh_power_integral(m - 2, r)) / mf
        }
    }
}

/// Area of the geodesic sphere of radius `rho` in `H^n`.
pub fn sphere_area<R: Real>(n: usize, rho: R) -> R {
    unit_sphere_area::<R>(n - 1) * rho.sinh().powi(n as i32 - 1)
}

/// Enclosed volume of the geodesic sphere.
pub fn sphere_volume<R: Real>(n: usize, rho: R) -> R {
    unit_sphere_area::<R>(n - 1) * sinh_power_integral(n - 1, rho)
}

/// `int sigma_k` over the geodesic sphere: `C(n-1,k) coth^k(rho) * area`.
pub fn sphere_sigma_integral<R: Real>(n: usize, k: usize, rho: R) -> R {
    R::from_count(binomial(n - 1, k)) * rho.tanh().recip().powi(k as i32) * sphere_area(n, rho)
}

/// `int L_k` over the geodesic sphere:
/// `(2k)! C(n-1,2k) omega_{n-1} sinh^{n-1-2k}(rho)`.
pub fn sphere_lk_integral<R: Real>(n: usize, k: usize, rho: R) -> R {
    let factor = R::from_count(crate::symfunc::gauss_bonnet_factor(n - 1, k));
    factor * unit_sphere_area::<R>(n - 1) * rho.sinh().powi((n - 1 - 2 * k) as i32)
}

/// Quermassintegral chain `W_0..W_n` of the geodesic sphere via the
/// recursion `W_{r+1} = (1/n) int p_r - (r/(n-r+1)) W_{r-1}` with
/// `int p_r = coth^r(rho) * area`, all in closed form.
pub fn sphere_quermass<R: Real>(n: usize, rho: R) -> Vec<R> {
    let nf = R::from_f(n as f64);
    let area = sphere_area(n, rho);
    let coth = rho.tanh().recip();
    let mut w = vec![R::zero(); n + 1];
    w[0] = sphere_volume(n, rho);
    w[1] = area / nf;
    for r in 1..n {
        let int_p = coth.powi(r as i32) * area;
        let back = R::from_f(r as f64) / R::from_f((n - r + 1) as f64);
        w[r + 1] = int_p / nf - back * w[r - 1];
    }
    w
}
