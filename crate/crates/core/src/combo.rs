//! Small combinatorial helpers shared by the symmetric-function algebra and
//! the brute-force oracles. All counts stay far below `u128` overflow for the
//! dimensions admitted by the guards.

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Double factorial with the conventions `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> u128 {
    if n <= 0 {
        return 1;
    }
    let mut acc: u128 = 1;
    let mut m = n as u128;
    while m > 1 {
        acc *= m;
        m -= 2;
    }
    acc
}

/// Sign of the permutation taking `from` to `to`, where `to` rearranges the
/// distinct entries of `from`. This is the value of the generalized Kronecker
/// delta on the index pair.
pub fn kronecker_sign(from: &[usize], to: &[usize]) -> i8 {
    debug_assert_eq!(from.len(), to.len());
    // pi[a] = position in `from` of to[a]; sign = parity of pi.
    let mut pi = [0usize; 32];
    for (a, t) in to.iter().enumerate() {
        let p = from
            .iter()
            .position(|f| f == t)
            .expect("to must permute from");
        pi[a] = p;
    }
    let m = from.len();
    let mut inversions = 0usize;
    for a in 0..m {
        for b in (a + 1)..m {
            if pi[a] > pi[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Visit every ordered tuple of `len` distinct indices drawn from `0..m`.
pub fn for_each_distinct_tuple(m: usize, len: usize, mut f: impl FnMut(&[usize])) {
    assert!(m <= 16, "tuple enumeration capped at 16 indices");
    let mut tuple = vec![0usize; len];
    fn rec(
        m: usize,
        len: usize,
        depth: usize,
        used: &mut u32,
        tuple: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if depth == len {
            f(tuple);
            return;
        }
        for i in 0..m {
            if *used & (1 << i) == 0 {
                *used |= 1 << i;
                tuple[depth] = i;
                rec(m, len, depth + 1, used, tuple, f);
                *used &= !(1 << i);
            }
        }
    }
    let mut used = 0u32;
    rec(m, len, 0, &mut used, &mut tuple, &mut f);
}

/// Visit every `k`-element ascending subset of `0..m`.
pub fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut subset = vec![0usize; k];
    fn rec(m: usize, k: usize, depth: usize, start: usize, subset: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if depth == k {
            f(subset);
            return;
        }
        for i in start..m {
            subset[depth] = i;
            rec(m, k, depth + 1, i + 1, subset, f);
        }
    }
    rec(m, k, 0, 0, &mut subset, &mut f);
}

/// Visit every permutation of `values` together with its sign. Heap's
/// algorithm; each swap flips the sign.
pub fn for_each_permutation_signed(values: &mut [usize], mut f: impl FnMut(&[usize], i8)) {
    let n = values.len();
    let mut c = vec![0usize; n];
    let mut sign: i8 = 1;
    f(values, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                values.swap(0, i);
            } else {
                values.swap(c[i], i);
            }
            sign = -sign;
            f(values, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
