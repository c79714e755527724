//! Independent oracles shared by the integration tests. Nothing here calls
//! the library routine it is used to check.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Binomial coefficient in exact integer arithmetic (n <= 60).
pub fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// `P(X >= k_min)` for `X ~ Binomial(n, p)` by direct summation of
/// `C(n, k) p^k (1 - p)^(n - k)`.
pub fn binomial_tail(n: u64, k_min: u64, p: f64) -> f64 {
    (k_min..=n)
        .map(|k| choose(n, k) as f64 * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .sum()
}

/// Every sign vector in `{-1, +1}^n`, in binary order.
pub fn all_signs(n: usize) -> impl Iterator<Item = Vec<f64>> {
    (0u32..(1u32 << n)).map(move |mask| {
        (0..n)
            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect()
    })
}

/// Exact empirical Rademacher complexity of a finite class, averaging the
/// supremum over all `2^n` sign vectors. `values[k][i]` is function `k` at
/// point `i`.
pub fn exhaustive_rademacher(values: &[Vec<f64>]) -> f64 {
    let n = values[0].len();
    let total: f64 = all_signs(n)
        .map(|s| {
            values
                .iter()
                .map(|f| f.iter().zip(&s).map(|(v, si)| v * si).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
                / n as f64
        })
        .sum();
    total / (1u64 << n) as f64
}

/// `sup_{||w|| <= lambda} (1/n) sum_i s_i <w, x_i>` via the Gram matrix:
/// `lambda sqrt(s^T G s) / n`.
///
/// The quadratic form cancels heavily when the signed sum is short, so every
/// product is split exactly with an fma and the pieces are added with
/// Neumaier compensation.
pub fn gram_linear_sup(points: &[Vec<f64>], lambda: f64, signs: &[f64]) -> f64 {
    let n = points.len();
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut add = |v: f64| {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    };
    for i in 0..n {
        for j in 0..n {
            let s = signs[i] * signs[j];
            for (a, b) in points[i].iter().zip(&points[j]) {
                let p = a * b;
                add(s * p);
                add(s * a.mul_add(*b, -p));
            }
        }
    }
    lambda * (sum + comp).max(0.0).sqrt() / n as f64
}

/// Minimal proper cover size by brute force over subsets, given a distance
/// matrix.
pub fn brute_force_cover(dist: &[Vec<f64>], eps: f64) -> usize {
    let k = dist.len();
    for size in 1..=k {
        let found = (0u32..(1u32 << k)).filter(|m| m.count_ones() as usize == size).any(|m| {
            (0..k).all(|j| (0..k).any(|c| m >> c & 1 == 1 && dist[c][j] < eps))
        });
        if found {
            return size;
        }
    }
    k
}

/// Random finite class on the grid `0, 1, ..., n-1`: `m` functions with
/// values uniform in `[-1, 1]`, or random signs when `binary`.
pub fn random_finite_values(rng: &mut impl Rng, m: usize, n: usize, binary: bool) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if binary {
                        if rng.random::<bool>() { 1.0 } else { -1.0 }
                    } else {
                        rng.random_range(-1.0..=1.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}
