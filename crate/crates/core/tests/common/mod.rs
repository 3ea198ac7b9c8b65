//! Oracles shared by the integration tests. Everything here works on plain
//! vectors and index arithmetic and does not call into the transforms it is
//! used to check.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixed-radix digits, last factor fastest.
pub fn digits(orders: &[usize], mut i: usize) -> Vec<usize> {
    let mut out = vec![0; orders.len()];
    for k in (0..orders.len()).rev() {
        out[k] = i % orders[k];
        i /= orders[k];
    }
    out
}

pub fn undigits(orders: &[usize], d: &[usize]) -> usize {
    d.iter().zip(orders).fold(0, |acc, (&x, &n)| acc * n + x)
}

pub fn signed(orders: &[usize], i: usize) -> Vec<i64> {
    digits(orders, i)
        .iter()
        .zip(orders)
        .map(|(&c, &n)| if 2 * c > n { c as i64 - n as i64 } else { c as i64 })
        .collect()
}

pub fn from_signed(orders: &[usize], s: &[i64]) -> usize {
    let d: Vec<usize> = s.iter().zip(orders).map(|(&c, &n)| c.rem_euclid(n as i64) as usize).collect();
    undigits(orders, &d)
}

pub fn add(orders: &[usize], i: usize, j: usize) -> usize {
    let (a, b) = (digits(orders, i), digits(orders, j));
    let d: Vec<usize> = a.iter().zip(&b).zip(orders).map(|((&x, &y), &n)| (x + y) % n).collect();
    undigits(orders, &d)
}

pub fn neg(orders: &[usize], i: usize) -> usize {
    let d: Vec<usize> = digits(orders, i).iter().zip(orders).map(|(&x, &n)| (n - x) % n).collect();
    undigits(orders, &d)
}

pub fn len(orders: &[usize]) -> usize {
    orders.iter().product()
}

/// `γ(x) = exp(2πi Σ γ_j x_j / N_j)`.
pub fn chi(orders: &[usize], gamma: usize, x: usize) -> Complex64 {
    let (g, y) = (digits(orders, gamma), digits(orders, x));
    let turns: f64 = g.iter().zip(&y).zip(orders).map(|((&a, &b), &n)| ((a * b) % n) as f64 / n as f64).sum();
    let th = 2.0 * PI * turns.fract();
    Complex64::new(th.cos(), th.sin())
}

/// `f̂(γ) = |G|⁻¹ Σ_x f(x) conj γ(x)` by the defining sum.
pub fn dft(orders: &[usize], f: &[Complex64]) -> Vec<Complex64> {
    let n = len(orders);
    (0..n)
        .map(|gm| (0..n).map(|x| f[x] * chi(orders, gm, x).conj()).sum::<Complex64>() / n as f64)
        .collect()
}

/// `Σ_{γ ∈ B} f̂(γ) γ(x)` by direct synthesis.
pub fn synth(orders: &[usize], coeffs: &[Complex64], members: &[bool]) -> Vec<Complex64> {
    let n = len(orders);
    (0..n)
        .map(|x| (0..n).filter(|&g| members[g]).map(|g| coeffs[g] * chi(orders, g, x)).sum())
        .collect()
}

pub fn max_abs_coord(orders: &[usize], i: usize) -> usize {
    signed(orders, i).iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
}

/// `c + Π_j {−r_j..r_j}` as a membership vector.
pub fn box_set(orders: &[usize], center: usize, half: &[usize]) -> Vec<bool> {
    let n = len(orders);
    let mut out = vec![false; n];
    for y in 0..n {
        let s = signed(orders, y);
        if s.iter().zip(half).all(|(&c, &r)| c.unsigned_abs() as usize <= r) {
            out[add(orders, center, y)] = true;
        }
    }
    out
}

/// Seeded random subset of `0..n` of the given size.
pub fn random_subset(seed: u64, n: usize, size: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    let mut out = idx[..size].to_vec();
    out.sort_unstable();
    out
}

/// Paley rank: factor 0 is the least significant digit.
pub fn paley_rank(orders: &[usize], i: usize) -> usize {
    let d = digits(orders, i);
    let mut rank = 0;
    for k in (0..orders.len()).rev() {
        rank = rank * orders[k] + d[k];
    }
    rank
}
