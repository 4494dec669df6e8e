//! Elementary symmetric functions of principal-curvature vectors and the
//! inequality margins built from them.
//!
//! Everything here is generic over [`Scalar`], so the same formulas run on
//! `f64` (flow diagnostics) and on `BigRational` (exact sweeps and oracles).
//! Sigma tables are computed by the coefficient recurrence of the defining
//! polynomial `prod_i (1 + t kappa_i) = sum_k sigma_k t^k`, never by subset
//! enumeration.

mod oracles;

pub use oracles::{lk_gauss_oracle, perm_sum_oracle, sigma_k_delta_oracle, PermSumVariant};

use serde::Serialize;

use crate::combo::binomial;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};

/// Principal-curvature tuple `kappa` in `R^{n-1}` for a hypersurface in
/// `H^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureVector<S> {
    entries: Vec<S>,
    ambient_dim: usize,
}

impl<S: Scalar> CurvatureVector<S> {
    /// Validates the invariants: `entries.len() == n - 1 >= 2`, all entries
    /// finite.
    pub fn new(entries: Vec<S>, ambient_dim: usize) -> Result<Self> {
        if ambient_dim < 3 || entries.len() + 1 != ambient_dim {
            return Err(Error::InvalidInput(format!(
                "curvature vector needs n - 1 = {} entries for n = {}, got {}",
                ambient_dim.saturating_sub(1),
                ambient_dim,
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite_val()) {
            return Err(Error::InvalidInput(
                "curvature entries must be finite".into(),
            ));
        }
        Ok(CurvatureVector {
            entries,
            ambient_dim,
        })
    }

    /// `kappa = c * (1, ..., 1)`.
    pub fn isotropic(c: S, ambient_dim: usize) -> Self {
        CurvatureVector::new(vec![c; ambient_dim - 1], ambient_dim)
            .expect("isotropic vector always valid")
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Hypersurface dimension `n - 1`.
    pub fn dim(&self) -> usize {
        self.ambient_dim - 1
    }

    /// Cone diagnostics for this vector at tolerance `tol`.
    pub fn cone_membership(&self, tol: &S) -> ConeMembership<S> {
        cone_membership(self, tol)
    }
}

/// Cached normalized symmetric functions of one curvature vector:
/// `sigma_0..sigma_{n-1}` and `p_k = sigma_k / C(n-1, k)`.
#[derive(Debug, Clone)]
pub struct SymTable<S> {
    n: usize,
    kappa: Vec<S>,
    sigma: Vec<S>,
    p: Vec<S>,
}

/// Builds the full sigma/p table via the stable coefficient recurrence over
/// `prod_i (1 + t kappa_i)`.
pub fn build_sym_table<S: Scalar>(kappa: &CurvatureVector<S>) -> SymTable<S> {
    let m = kappa.dim();
    let mut sigma = vec![S::zero(); m + 1];
    sigma[0] = S::one();
    for (count, x) in kappa.entries.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            sigma[j] = sigma[j].clone() + x.clone() * sigma[j - 1].clone();
        }
    }
    let p = sigma
        .iter()
        .enumerate()
        .map(|(k, s)| s.clone() / S::from_count(binomial(m, k)))
        .collect();
    SymTable {
        n: kappa.ambient_dim,
        kappa: kappa.entries.clone(),
        sigma,
        p,
    }
}

/// Inequality margin together with its equality flag.
#[derive(Debug, Clone)]
pub struct Margin<S> {
    pub value: S,
    pub equality: bool,
}

/// Sign report for the reversed cone `0 < kappa_i <= 1`: the three signed
/// quantities of the reversed inequalities.
#[derive(Debug, Clone)]
pub struct ReversedConeSigns<S> {
    /// `(-1)^k (p_1 Ltilde_k - Ntilde_k)`, certified `<= 0`.
    pub s1: S,
    /// `(-1)^k Ntilde_k`, certified `>= 0`.
    pub s2: S,
    /// `(-1)^k Ltilde_k`, certified `>= 0`.
    pub s3: S,
}

impl<S: Scalar> SymTable<S> {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Hypersurface dimension `n - 1`; the table holds `sigma_0..sigma_{n-1}`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn kappa(&self) -> &[S] {
        &self.kappa
    }

    pub fn sigma(&self, k: usize) -> Result<&S> {
        self.sigma.get(k).ok_or(Error::IndexOutOfRange {
            what: "sigma index",
            got: k,
            n: self.n,
        })
    }

    pub fn p(&self, k: usize) -> Result<&S> {
        self.p.get(k).ok_or(Error::IndexOutOfRange {
            what: "p index",
            got: k,
            n: self.n,
        })
    }

    pub fn sigmas(&self) -> &[S] {
        &self.sigma
    }

    pub fn ps(&self) -> &[S] {
        &self.p
    }

    /// Newton-MacLaurin margins at order `k`:
    /// `m1 = p_k^2 - p_{k-1} p_{k+1} >= 0` and `m2 = p_1 p_{k-1} - p_k >= 0`
    /// on the Garding cone, both vanishing exactly at isotropic vectors.
    pub fn newton_maclaurin_margins(
        &self,
        k: usize,
        tol: &Tolerances<S>,
    ) -> Result<(Margin<S>, Margin<S>)> {
        if k == 0 || k + 1 > self.dim() {
            return Err(Error::IndexOutOfRange {
                what: "Newton-MacLaurin order",
                got: k,
                n: self.n,
            });
        }
        self.require_garding(k)?;
        let m1 = self.p(k)?.clone() * self.p(k)?.clone()
            - self.p(k - 1)?.clone() * self.p(k + 1)?.clone();
        let m2 = self.p(1)?.clone() * self.p(k - 1)?.clone() - self.p(k)?.clone();
        let scale = S::one() + self.p(k)?.abs();
        Ok((self.flag(m1, &scale, tol), self.flag(m2, &scale, tol)))
    }

    /// `Ltilde_k = sum_{i=0}^{k} C(k,i) (-1)^i p_{2k-2i}`. Needs `2k <= n-1`.
    pub fn tilde_l(&self, k: usize) -> Result<S> {
        if 2 * k > self.dim() {
            return Err(Error::IndexOutOfRange {
                what: "tilde_l order 2k",
                got: 2 * k,
                n: self.n,
            });
        }
        Ok(self.alternating_sum(k, 0))
    }

    /// `Ntilde_k = sum_{i=0}^{k} C(k,i) (-1)^i p_{2k-2i+1}`. Needs `2k+1 <= n-1`.
    pub fn tilde_n(&self, k: usize) -> Result<S> {
        if 2 * k + 1 > self.dim() {
            return Err(Error::IndexOutOfRange {
                what: "tilde_n order 2k+1",
                got: 2 * k + 1,
                n: self.n,
            });
        }
        Ok(self.alternating_sum(k, 1))
    }

    fn alternating_sum(&self, k: usize, shift: usize) -> S {
        let mut acc = S::zero();
        for i in 0..=k {
            let term = S::from_count(binomial(k, i)) * self.p[2 * k - 2 * i + shift].clone();
            if i % 2 == 0 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        acc
    }

    /// Gauss-Bonnet curvature `L_k = (2k)! C(n-1, 2k) Ltilde_k` of the
    /// induced metric.
    pub fn gauss_bonnet_l(&self, k: usize) -> Result<S> {
        let tl = self.tilde_l(k)?;
        Ok(S::from_count(gauss_bonnet_factor(self.dim(), k)) * tl)
    }

    /// Margin of the flow-speed inequality
    /// `(p_{2k-1}/p_{2k}) Ntilde_k <= Ltilde_k` on horospherically convex
    /// vectors. Returns `Ltilde_k - (p_{2k-1}/p_{2k}) Ntilde_k >= 0`.
    pub fn flow_speed_margin(&self, k: usize, tol: &Tolerances<S>) -> Result<Margin<S>> {
        self.require_hconvex(tol)?;
        if k == 0 {
            return Err(Error::IndexOutOfRange {
                what: "flow order k",
                got: 0,
                n: self.n,
            });
        }
        let p2k = self.p(2 * k)?.clone();
        if p2k <= tol.eps_div {
            return Err(Error::DivisionBySmall {
                what: "p_{2k}",
                value: p2k.approx_f64(),
            });
        }
        let tl = self.tilde_l(k)?;
        let tn = self.tilde_n(k)?;
        let value = tl.clone() - self.p(2 * k - 1)?.clone() * tn / p2k;
        let scale = S::one() + tl.abs();
        Ok(self.flag(value, &scale, tol))
    }

    /// Margin of `Ntilde_k <= p_1 Ltilde_k` on horospherically convex
    /// vectors: returns `p_1 Ltilde_k - Ntilde_k >= 0`.
    pub fn p1_bound_margin(&self, k: usize, tol: &Tolerances<S>) -> Result<Margin<S>> {
        self.require_hconvex(tol)?;
        let tl = self.tilde_l(k)?;
        let tn = self.tilde_n(k)?;
        let value = self.p(1)?.clone() * tl.clone() - tn;
        let scale = S::one() + tl.abs();
        Ok(self.flag(value, &scale, tol))
    }

    /// Margin of `p_{2k} Ntilde_k <= p_{2k+1} Ltilde_k` on horospherically
    /// convex vectors: returns `p_{2k+1} Ltilde_k - p_{2k} Ntilde_k >= 0`.
    pub fn top_ratio_margin(&self, k: usize, tol: &Tolerances<S>) -> Result<Margin<S>> {
        self.require_hconvex(tol)?;
        if 2 * k + 1 > self.dim() {
            return Err(Error::IndexOutOfRange {
                what: "top ratio order 2k+1",
                got: 2 * k + 1,
                n: self.n,
            });
        }
        let tl = self.tilde_l(k)?;
        let tn = self.tilde_n(k)?;
        let value = self.p(2 * k + 1)?.clone() * tl.clone() - self.p(2 * k)?.clone() * tn;
        let scale = S::one() + tl.abs();
        Ok(self.flag(value, &scale, tol))
    }

    /// Signed quantities of the reversed inequalities on the unit-subconvex
    /// cone `0 < kappa_i <= 1`.
    pub fn reversed_cone_signs(
        &self,
        k: usize,
        tol: &Tolerances<S>,
    ) -> Result<ReversedConeSigns<S>> {
        let membership = cone_membership_from_parts(&self.kappa, &self.sigma, &tol.cone);
        if !membership.unit_subconvex {
            return Err(Error::ConeViolation(format!(
                "kappa must satisfy 0 < kappa_i <= 1, got {:?}",
                self.kappa
                    .iter()
                    .map(|x| x.approx_f64())
                    .collect::<Vec<_>>()
            )));
        }
        let tl = self.tilde_l(k)?;
        let tn = self.tilde_n(k)?;
        let raw = self.p(1)?.clone() * tl.clone() - tn.clone();
        let parity_neg = k % 2 == 1;
        let apply = |x: S| if parity_neg { -x } else { x };
        Ok(ReversedConeSigns {
            s1: apply(raw),
            s2: apply(tn),
            s3: apply(tl),
        })
    }

    fn flag(&self, value: S, scale: &S, tol: &Tolerances<S>) -> Margin<S> {
        let equality = value.abs() <= tol.equality_rel.clone() * scale.clone();
        Margin { value, equality }
    }

    fn require_garding(&self, k: usize) -> Result<()> {
        for j in 1..=k {
            if self.sigma[j] <= S::zero() {
                return Err(Error::ConeViolation(format!(
                    "sigma_{j} = {} <= 0, vector not in the Garding cone of order {k}",
                    self.sigma[j].approx_f64()
                )));
            }
        }
        Ok(())
    }

    fn require_hconvex(&self, tol: &Tolerances<S>) -> Result<()> {
        let floor = S::one() - tol.cone.clone();
        if let Some(bad) = self.kappa.iter().find(|x| **x < floor) {
            return Err(Error::ConeViolation(format!(
                "kappa_i = {} < 1 - tol, vector not horospherically convex",
                bad.approx_f64()
            )));
        }
        Ok(())
    }
}

/// `(2k)! C(n-1, 2k)`, the factor between `Ltilde_k` and `L_k`.
pub fn gauss_bonnet_factor(dim: usize, k: usize) -> u128 {
    crate::combo::factorial(2 * k) * binomial(dim, 2 * k)
}

/// Cone diagnostics of a curvature vector.
#[derive(Debug, Clone, Serialize)]
pub struct ConeMembership<S> {
    /// Largest `k` such that `sigma_j > 0` for every `j <= k`.
    pub gamma_plus_up_to: usize,
    /// All `kappa_i >= 1 - tol`.
    pub horospherically_convex: bool,
    /// All `0 < kappa_i <= 1 + tol`.
    pub unit_subconvex: bool,
    pub tol: S,
}

/// Computes cone membership: Garding order from the sigma signs plus the two
/// curvature-interval flags.
pub fn cone_membership<S: Scalar>(kappa: &CurvatureVector<S>, tol: &S) -> ConeMembership<S> {
    let table = build_sym_table(kappa);
    cone_membership_from_parts(&table.kappa, &table.sigma, tol)
}

fn cone_membership_from_parts<S: Scalar>(kappa: &[S], sigma: &[S], tol: &S) -> ConeMembership<S> {
    let mut gamma_plus_up_to = 0usize;
    for (j, s) in sigma.iter().enumerate().skip(1) {
        if *s > S::zero() {
            gamma_plus_up_to = j;
        } else {
            break;
        }
    }
    let one = S::one();
    let hconvex_floor = one.clone() - tol.clone();
    let subconvex_ceil = one + tol.clone();
    let horospherically_convex = kappa.iter().all(|x| *x >= hconvex_floor);
    let unit_subconvex = kappa.iter().all(|x| *x > S::zero() && *x <= subconvex_ceil);
    ConeMembership {
        gamma_plus_up_to,
        horospherically_convex,
        unit_subconvex,
        tol: tol.clone(),
    }
}
