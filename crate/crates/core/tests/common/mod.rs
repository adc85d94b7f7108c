//! Random filter generators shared by the integration tests.

#![allow(dead_code)]

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcswave::arith::{int, rat, Rational};
use pcswave::filters::Filter1D;
use pcswave::lattice::Convention;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rat(rng: &mut ChaCha8Rng) -> Rational {
    let mut v = 0;
    while v == 0 {
        v = rng.gen_range(-9..=9);
    }
    rat(v, rng.gen_range(1..=6))
}

/// Random taps on `offsets`, then the last one adjusted so the sum is `target`.
/// Returns `None` if the adjustment would zero that tap.
pub fn taps_with_sum(rng: &mut ChaCha8Rng, offsets: &[i64], target: Rational) -> Option<Vec<(i64, Rational)>> {
    let mut taps: Vec<(i64, Rational)> = offsets.iter().map(|&k| (k, random_rat(rng))).collect();
    let rest: Rational = taps[..taps.len() - 1].iter().map(|(_, v)| v.clone()).sum();
    let last = target - rest;
    if last.is_zero() {
        return None;
    }
    taps.last_mut().unwrap().1 = last;
    Some(taps)
}

/// Interpolatory: 1 at the origin, nothing else on pZ, sum p.
pub fn random_interpolatory(rng: &mut ChaCha8Rng, p: i64) -> Filter1D {
    loop {
        let mut offsets: Vec<i64> = (-4..=4).filter(|k| k % p != 0 && rng.gen_bool(0.6)).collect();
        if offsets.is_empty() {
            offsets.push(1);
        }
        if let Some(mut taps) = taps_with_sum(rng, &offsets, int(p - 1)) {
            taps.push((0, int(1)));
            return Filter1D::new(p, taps);
        }
    }
}

/// Solves `m·x = b` over the rationals; `m` is square and invertible.
pub fn solve(mut m: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("invertible");
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                let pivot_row = m[col].clone();
                for (dst, src) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                    *dst -= &f * src;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    (0..n).map(|i| &b[i] / &m[i][i]).collect()
}

/// Interpolatory with accuracy at least `m`: on every nonzero residue class
/// the moments of order below `m` match those of the unit tap at the origin,
/// so the class sums are 1 and the higher moments vanish.
pub fn random_interpolatory_with_accuracy(rng: &mut ChaCha8Rng, p: i64, m: usize) -> Filter1D {
    let mut taps = vec![(0, int(1))];
    for c in 1..p {
        let shift = rng.gen_range(-(m as i64)..=0);
        let ks: Vec<i64> = (0..=m as i64).map(|j| c + p * (shift + j)).collect();
        let free = random_rat(rng);
        let (last, head) = ks.split_last().unwrap();
        let powers = |k: i64| (0..m as u32).map(move |r| int(k.pow(r)));
        let a: Vec<Vec<Rational>> = (0..m)
            .map(|r| head.iter().map(|&k| int(k.pow(r as u32))).collect())
            .collect();
        let b: Vec<Rational> = powers(*last)
            .enumerate()
            .map(|(r, kr)| int((r == 0) as i64) - &free * kr)
            .collect();
        taps.extend(head.iter().copied().zip(solve(a, b)));
        taps.push((*last, free));
    }
    Filter1D::new(p, taps.into_iter().filter(|(_, v)| !v.is_zero()))
}

pub fn random_lowpass(rng: &mut ChaCha8Rng, p: i64) -> Filter1D {
    loop {
        let len = rng.gen_range(1..=5);
        let start = rng.gen_range(-3..=0);
        let offsets: Vec<i64> = (start..start + len).collect();
        if let Some(taps) = taps_with_sum(rng, &offsets, int(p)) {
            return Filter1D::new(p, taps);
        }
    }
}

/// `(1 + z + … + z^{p−1})^m · r(z)` scaled to sum p: accuracy at least m.
pub fn random_with_accuracy(rng: &mut ChaCha8Rng, p: i64) -> Filter1D {
    let m = rng.gen_range(1..=3);
    let r = random_lowpass(rng, p);
    let mut poly: Vec<(i64, Rational)> = r.iter().map(|(k, v)| (k, v.clone())).collect();
    for _ in 0..m {
        let mut next = std::collections::BTreeMap::<i64, Rational>::new();
        for (k, v) in &poly {
            for s in 0..p {
                *next.entry(k + s).or_insert_with(Rational::zero) += v;
            }
        }
        poly = next.into_iter().collect();
    }
    let scale = rat(1, p.pow(m));
    Filter1D::new(p, poly.into_iter().map(|(k, v)| (k, v * &scale)))
}

pub fn random_convention(rng: &mut ChaCha8Rng, p: i64) -> Convention {
    if p == 2 || rng.gen_bool(0.5) {
        Convention::Standard
    } else {
        Convention::Centered
    }
}
