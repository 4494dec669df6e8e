//! Brute-force oracles: literal generalized-Kronecker-delta contractions and
//! permutation sums. These are deliberately independent of the table-based
//! formulas in the parent module; they exist to cross-check them in exact
//! arithmetic. Hard size guards keep the factorial costs bounded.

use crate::combo::{self, kronecker_sign};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symfunc::CurvatureVector;

/// Guard for the sigma_k delta contraction.
const MAX_DELTA_DIM: usize = 9;
/// Guards for the Gauss-equation Lovelock contraction.
const MAX_GAUSS_DIM: usize = 8;
const MAX_GAUSS_ORDER: usize = 3;
/// Guards for the permutation sums.
const MAX_PERM_DIM: usize = 9;
const MAX_PERM_ORDER: usize = 3;

/// Evaluates `sigma_k(B) = (1/k!) delta^{i_1..i_k}_{j_1..j_k} b_{i_1}^{j_1}
/// ... b_{i_k}^{j_k}` by expanding the generalized Kronecker delta over index
/// subsets and signed permutations.
pub fn sigma_k_delta_oracle<S: Scalar>(b: &[Vec<S>], k: usize) -> Result<S> {
    let m = b.len();
    if m > MAX_DELTA_DIM {
        return Err(Error::DimensionTooLarge {
            what: "matrix size",
            got: m,
            max: MAX_DELTA_DIM,
        });
    }
    if b.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidInput("matrix must be square".into()));
    }
    if k > m {
        return Err(Error::IndexOutOfRange {
            what: "sigma order",
            got: k,
            n: m + 1,
        });
    }
    if k == 0 {
        return Ok(S::one());
    }
    // The delta vanishes unless the lower tuple is a permutation of the upper
    // one; summing the ordered upper tuples cancels the 1/k! normalization,
    // leaving one signed permutation expansion per ascending subset.
    let mut total = S::zero();
    combo::for_each_subset(m, k, |subset| {
        let mut perm: Vec<usize> = subset.to_vec();
        combo::for_each_permutation_signed(&mut perm, |j_tuple, sign| {
            let mut term = S::one();
            for (a, &i) in subset.iter().enumerate() {
                term = term * b[i][j_tuple[a]].clone();
            }
            if sign > 0 {
                total = total.clone() + term;
            } else {
                total = total.clone() - term;
            }
        });
    });
    Ok(total)
}

/// Riemann tensor of the induced metric from the Gauss equation with
/// `h = diag(kappa)`:
/// `R_ij^kl = (h_i^k h_j^l - h_i^l h_j^k) - (delta_i^k delta_j^l - delta_i^l delta_j^k)`.
struct GaussRiemann<S> {
    values: Vec<S>,
    nonzero: Vec<bool>,
    m: usize,
}

impl<S: Scalar> GaussRiemann<S> {
    fn assemble(kappa: &[S]) -> Self {
        let m = kappa.len();
        let h = |i: usize, k: usize| -> S {
            if i == k {
                kappa[i].clone()
            } else {
                S::zero()
            }
        };
        let delta = |i: usize, k: usize| -> S {
            if i == k {
                S::one()
            } else {
                S::zero()
            }
        };
        let mut values = Vec::with_capacity(m * m * m * m);
        let mut nonzero = Vec::with_capacity(m * m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = (h(i, k) * h(j, l) - h(i, l) * h(j, k))
                            - (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k));
                        nonzero.push(!v.is_zero());
                        values.push(v);
                    }
                }
            }
        }
        GaussRiemann { values, nonzero, m }
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        &self.values[self.idx(i, j, k, l)]
    }

    fn is_nonzero(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        self.nonzero[self.idx(i, j, k, l)]
    }
}

/// Evaluates the Lovelock invariant
/// `L_k = (1/2^k) delta^{i_1..i_{2k}}_{j_1..j_{2k}} R_{i_1 i_2}^{j_1 j_2} ...`
/// literally, with `R` assembled from the Gauss equation at `h = diag(kappa)`.
/// Branches whose `R` factor vanishes are skipped; the delta sign is computed
/// per surviving upper tuple.
pub fn lk_gauss_oracle<S: Scalar>(kappa: &CurvatureVector<S>, k: usize) -> Result<S> {
    let m = kappa.dim();
    if m > MAX_GAUSS_DIM {
        return Err(Error::DimensionTooLarge {
            what: "hypersurface dimension",
            got: m,
            max: MAX_GAUSS_DIM,
        });
    }
    if k > MAX_GAUSS_ORDER {
        return Err(Error::DimensionTooLarge {
            what: "Lovelock order",
            got: k,
            max: MAX_GAUSS_ORDER,
        });
    }
    if k == 0 {
        return Ok(S::one());
    }
    if 2 * k > m {
        return Err(Error::IndexOutOfRange {
            what: "Lovelock order 2k",
            got: 2 * k,
            n: m + 1,
        });
    }
    let riemann = GaussRiemann::assemble(kappa.entries());
    let mut total = S::zero();
    combo::for_each_distinct_tuple(m, 2 * k, |lower| {
        contract_upper(&riemann, lower, &mut Vec::with_capacity(2 * k), S::one(), &mut total);
    });
    Ok(total / S::from_count(1u128 << k))
}

/// Recursively assigns the upper tuple pairwise from the unused values of
/// `lower`, pruning exact zeros of `R`, and adds sign * product at the leaves.
fn contract_upper<S: Scalar>(
    riemann: &GaussRiemann<S>,
    lower: &[usize],
    upper: &mut Vec<usize>,
    partial: S,
    total: &mut S,
) {
    let pair = upper.len() / 2;
    let pairs = lower.len() / 2;
    if pair == pairs {
        let sign = kronecker_sign(lower, upper);
        if sign > 0 {
            *total = total.clone() + partial;
        } else {
            *total = total.clone() - partial;
        }
        return;
    }
    let (li, lj) = (lower[2 * pair], lower[2 * pair + 1]);
    for &x in lower {
        if upper.contains(&x) {
            continue;
        }
        for &y in lower {
            if y == x || upper.contains(&y) {
                continue;
            }
            if !riemann.is_nonzero(li, lj, x, y) {
                continue;
            }
            upper.push(x);
            upper.push(y);
            let next = partial.clone() * riemann.get(li, lj, x, y).clone();
            contract_upper(riemann, lower, upper, next, total);
            upper.pop();
            upper.pop();
        }
    }
}

/// The three permutation-sum shapes over ordered `(2k+1)`-tuples of distinct
/// indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermSumVariant {
    /// `kappa_{i_1} (kappa kappa - 1) x k` pairs: proportional to `Ntilde_k`.
    WeightedPairs,
    /// `(kappa kappa - 1) x k` pairs with a free leading index: proportional
    /// to `Ltilde_k`.
    Pairs,
    /// `kappa_{i_1} (kappa kappa - 1) x (k-1)` pairs and a final squared
    /// difference: proportional to `p_1 Ltilde_k - Ntilde_k`.
    SquaredDiff,
}

impl PermSumVariant {
    pub fn from_index(v: usize) -> Result<Self> {
        match v {
            1 => Ok(PermSumVariant::WeightedPairs),
            2 => Ok(PermSumVariant::Pairs),
            3 => Ok(PermSumVariant::SquaredDiff),
            _ => Err(Error::InvalidInput(format!(
                "permutation-sum variant must be 1, 2 or 3, got {v}"
            ))),
        }
    }
}

/// Exact permutation sum in the requested variant.
///
/// The sum ranges over all permutations of the full index set `{0..n-2}`,
/// with the factor pattern evaluated on the first `2k+1` entries. Since the
/// pattern ignores the tail, every ordered `(2k+1)`-tuple of distinct indices
/// occurs with multiplicity `(n-2-2k)!`; the implementation enumerates the
/// tuples and multiplies by that count.
pub fn perm_sum_oracle<S: Scalar>(
    kappa: &CurvatureVector<S>,
    k: usize,
    variant: PermSumVariant,
) -> Result<S> {
    let m = kappa.dim();
    if m > MAX_PERM_DIM {
        return Err(Error::DimensionTooLarge {
            what: "hypersurface dimension",
            got: m,
            max: MAX_PERM_DIM,
        });
    }
    if k == 0 || k > MAX_PERM_ORDER {
        return Err(Error::DimensionTooLarge {
            what: "permutation-sum order",
            got: k,
            max: MAX_PERM_ORDER,
        });
    }
    if 2 * k + 1 > m {
        return Err(Error::IndexOutOfRange {
            what: "tuple length 2k+1",
            got: 2 * k + 1,
            n: m + 1,
        });
    }
    let entries = kappa.entries();
    // pair_factor[i][j] = kappa_i kappa_j - 1
    let pair_factor: Vec<Vec<S>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| entries[i].clone() * entries[j].clone() - S::one())
                .collect()
        })
        .collect();
    let mut total = S::zero();
    combo::for_each_distinct_tuple(m, 2 * k + 1, |t| {
        let mut term = match variant {
            PermSumVariant::WeightedPairs | PermSumVariant::SquaredDiff => entries[t[0]].clone(),
            PermSumVariant::Pairs => S::one(),
        };
        let paired = match variant {
            PermSumVariant::SquaredDiff => k - 1,
            _ => k,
        };
        for a in 0..paired {
            if term.is_zero() {
                break;
            }
            term = term * pair_factor[t[2 * a + 1]][t[2 * a + 2]].clone();
        }
        if variant == PermSumVariant::SquaredDiff && !term.is_zero() {
            let d = entries[t[2 * k - 1]].clone() - entries[t[2 * k]].clone();
            term = term * d.clone() * d;
        }
        total = total.clone() + term;
    });
    Ok(total * S::from_count(combo::factorial(m - 2 * k - 1)))
}
