//! Exact and real-valued binomials, subset iteration and the Lovász form of
//! the Kruskal–Katona shadow bound.

use num_bigint::BigUint;

/// Exact binomial coefficient, saturating at `u128::MAX`.
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

pub fn binom_f64(n: f64, k: u32) -> f64 {
    binom_real(n, k)
}

/// `x (x-1) ... (x-k+1) / k!` for real `x`.
pub fn binom_real(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (x - i as f64) / (i as f64 + 1.0);
    }
    acc
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Lower bound on `|shadow_i(F)|` for a `k`-graph with `m` edges: solve
/// `binom(x, k) = m` for the unique real `x >= k - 1` and return `binom(x, i)`.
pub fn lovasz_shadow_lower_bound(m: u64, k: u32, i: u32) -> crate::Result<f64> {
    if m == 0 {
        return Err(crate::Error::Parameter("m must be at least 1".into()));
    }
    if i == 0 || i >= k {
        return Err(crate::Error::Parameter(format!(
            "need 1 <= i <= k-1, got i={i}, k={k}"
        )));
    }
    let x = solve_binom(m as f64, k);
    Ok(binom_real(x, i))
}

/// Bisection for `binom(x, k) = target` on `x >= k - 1`, where the map is
/// increasing from 0.
pub fn solve_binom(target: f64, k: u32) -> f64 {
    let mut lo = k as f64 - 1.0;
    let mut hi = (k as f64).max(1.0);
    while binom_real(hi, k) < target {
        hi *= 2.0;
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if binom_real(mid, k) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Combinations {
    Combinations {
        n,
        cur: if r <= n { Some((0..r).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let r = out.len();
        let mut next = out.clone();
        let mut i = r;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - r + i {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Calls `f` on every permutation of `items` (Heap's algorithm order is not
/// needed; this is plain recursive lexicographic order on positions).
pub fn for_each_permutation<T: Clone>(items: &[T], mut f: impl FnMut(&[T])) {
    fn rec<T: Clone>(rest: &mut Vec<T>, cur: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
        if rest.is_empty() {
            f(cur);
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, f);
            let x = cur.pop().unwrap();
            rest.insert(i, x);
        }
    }
    let mut rest = items.to_vec();
    let mut cur = Vec::with_capacity(items.len());
    rec(&mut rest, &mut cur, &mut f);
}

/// `floor(x)` with a small tolerance so that values like `2.9999999999` that
/// come from powers of exact reals still floor to 3.
pub fn floor_tol(x: f64) -> f64 {
    (x + 1e-9).floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(6, 4), 15);
        assert_eq!(binom(3, 5), 0);
        assert_eq!(binom(0, 0), 1);
        assert_eq!(binom_big(126, 4).to_string(), binom(126, 4).to_string());
    }

    #[test]
    fn combinations_count_and_order() {
        let all: Vec<_> = combinations(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn lovasz_examples() {
        // binom(3,3) = 1 -> x = 3
        assert!((lovasz_shadow_lower_bound(1, 3, 2).unwrap() - 3.0).abs() < 1e-6);
        assert!((lovasz_shadow_lower_bound(20, 3, 2).unwrap() - 15.0).abs() < 1e-6);
        assert!((lovasz_shadow_lower_bound(10, 3, 1).unwrap() - 5.0).abs() < 1e-6);
        assert!(lovasz_shadow_lower_bound(0, 3, 1).is_err());
        assert!(lovasz_shadow_lower_bound(5, 3, 3).is_err());
    }

    #[test]
    fn permutations_visit_all() {
        let mut seen = Vec::new();
        for_each_permutation(&[1, 2, 3], |p| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 6);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 6);
    }
}
