//! The fast prime coset sum algorithm. One level, with `y0(k) = y(pk)`:
//!
//! ```text
//! (i)   w_ν(k)   = y(pk+ν) − c1 Σ_{m≢0} H(m) y0(k + e(m,ν))
//! (ii)  y_c(k)   = y0(k)   + c2 Σ_ν Σ_{m≢0} G(m) w_ν(k − e(m,ν))
//! (iii) y0(k)    = y_c(k)  − c2 Σ_ν Σ_{m≢0} G(m) w_ν(k − e(m,ν))
//! (iv)  y(pk+ν)  = w_ν(k)  + c1 Σ_{m≢0} H(m) y0(k + e(m,ν))
//! ```
//!
//! where `e(m,ν) = (ν − η(m,ν)·m)/p` is integral, `c1 = 1/(p−1)` and
//! `c2 = 1/((p−1)p^n)`. Step (i) reads only lattice samples besides
//! `y(pk+ν)`, which is what lets step (iv) run after step (iii).
//!
//! Multiplication counts per output: `β` in steps (i) and (iv) (one per
//! `H(m)`, `m ≢ 0`, plus the `c1` scale); `(q−1)α̃ + n + 1` in steps (ii)
//! and (iii) (one per tap, the `c2` scale, and `n` for forming `pk`).

use rayon::prelude::*;

use crate::arith::rat;
use crate::error::{Error, Result};
use crate::filterbank::{Provenance, WaveletFilterBank};
use crate::lattice::{CosetSystem, MultiIndex};

use super::{check_shape, MultiresCoeffs, Scalar, Tensor};

/// Per-direction tap tables for one bank.
#[derive(Clone, Debug)]
pub struct FastPlan<T> {
    p: i64,
    n: usize,
    q: usize,
    nus: Vec<MultiIndex>,
    /// `(e(m,ν), H(m))` per ν.
    h_terms: Vec<Vec<(Vec<i64>, T)>>,
    /// `(e(m,ν), G(m))` per ν.
    g_terms: Vec<Vec<(Vec<i64>, T)>>,
    c1: T,
    c2: T,
}

impl<T: Scalar> FastPlan<T> {
    pub fn new(bank: &WaveletFilterBank) -> Result<Self> {
        let (g, h) = match bank.provenance() {
            Provenance::PrimeCosetSum { g, h } => (g, h),
            Provenance::General => return Err(Error::WrongProvenance),
        };
        let sys: &CosetSystem = bank.sys();
        let p = sys.p();
        let offsets = |f: &crate::filters::Filter1D, pos: usize, nu: &MultiIndex| -> Vec<(Vec<i64>, T)> {
            f.iter()
                .filter(|(m, _)| m.rem_euclid(p) != 0)
                .map(|(m, v)| {
                    let eta = &sys.gamma()[sys.eta_position(m, pos)];
                    let e = (nu - &eta.scale(m))
                        .div_exact(p)
                        .unwrap_or_else(|| panic!("ν − η·m not divisible by p at m={m}, ν={nu}"));
                    (e.0, T::from_rational(v))
                })
                .collect()
        };
        let nus = sys.gamma_prime().to_vec();
        let h_terms = nus.iter().enumerate().map(|(i, nu)| offsets(h, i + 1, nu)).collect();
        let g_terms = nus.iter().enumerate().map(|(i, nu)| offsets(g, i + 1, nu)).collect();
        Ok(FastPlan {
            p,
            n: sys.n(),
            q: sys.q(),
            nus,
            h_terms,
            g_terms,
            c1: T::from_rational(&rat(1, p - 1)),
            c2: T::from_rational(&rat(1, (p - 1) * sys.q() as i64)),
        })
    }

    fn step2_sum(&self, k: &[i64], w: &[Tensor<T>]) -> (T, u64) {
        let mut acc = T::zero();
        let mut ops = 0u64;
        let mut idx = vec![0i64; self.n];
        for (terms, wt) in self.g_terms.iter().zip(w) {
            for (e, c) in terms {
                for a in 0..self.n {
                    idx[a] = k[a] - e[a];
                }
                acc = acc.add(&c.mul(wt.get(&idx)));
                ops += 1;
            }
        }
        (acc.mul(&self.c2), ops + 1)
    }

    fn step1_sum(&self, i: usize, k: &[i64], y0: &Tensor<T>) -> (T, u64) {
        let mut acc = T::zero();
        let mut idx = vec![0i64; self.n];
        let terms = &self.h_terms[i];
        for (e, c) in terms {
            for a in 0..self.n {
                idx[a] = k[a] + e[a];
            }
            acc = acc.add(&c.mul(y0.get(&idx)));
        }
        (acc.mul(&self.c1), terms.len() as u64 + 1)
    }

    /// `pk` for every coarse coordinate: `n` multiplications.
    fn lattice_point(&self, k: &[i64]) -> (Vec<i64>, u64) {
        (k.iter().map(|&c| c * self.p).collect(), self.n as u64)
    }

    fn decompose_level(&self, y: &Tensor<T>) -> (Tensor<T>, Vec<Tensor<T>>, u64) {
        let coarse_shape: Vec<usize> = y.shape().iter().map(|&s| s / self.p as usize).collect();
        let y0 = Tensor::from_fn(coarse_shape.clone(), |k| {
            let c: Vec<i64> = k.iter().map(|&c| c as i64 * self.p).collect();
            y.get(&c).clone()
        });
        let len = y0.len();

        // (i)
        let per_nu: Vec<(Tensor<T>, u64)> = (0..self.nus.len())
            .into_par_iter()
            .map(|i| {
                let nu = &self.nus[i];
                let (vals, ops): (Vec<T>, Vec<u64>) = (0..len)
                    .map(|lin| {
                        let k = y0.coords_of(lin);
                        let x: Vec<i64> = k.iter().zip(&nu.0).map(|(&c, &v)| c * self.p + v).collect();
                        let (s, ops) = self.step1_sum(i, &k, &y0);
                        (y.get(&x).sub(&s), ops)
                    })
                    .unzip();
                (
                    Tensor::new(coarse_shape.clone(), vals).expect("coarse shape"),
                    ops.iter().sum(),
                )
            })
            .collect();
        let mut ops: u64 = per_nu.iter().map(|(_, o)| o).sum();
        let w: Vec<Tensor<T>> = per_nu.into_iter().map(|(t, _)| t).collect();

        // (ii)
        let (vals, ops2): (Vec<T>, Vec<u64>) = (0..len)
            .into_par_iter()
            .map(|lin| {
                let k = y0.coords_of(lin);
                let (x, o1) = self.lattice_point(&k);
                let (s, o2) = self.step2_sum(&k, &w);
                (y.get(&x).add(&s), o1 + o2)
            })
            .unzip();
        ops += ops2.iter().sum::<u64>();
        (Tensor::new(coarse_shape, vals).expect("coarse shape"), w, ops)
    }

    fn reconstruct_level(&self, coarse: &Tensor<T>, w: &[Tensor<T>]) -> (Tensor<T>, u64) {
        let len = coarse.len();
        // (iii)
        let (y0_vals, ops3): (Vec<T>, Vec<u64>) = (0..len)
            .into_par_iter()
            .map(|lin| {
                let k = coarse.coords_of(lin);
                let (_, o1) = self.lattice_point(&k);
                let (s, o2) = self.step2_sum(&k, w);
                (coarse.get(&k).sub(&s), o1 + o2)
            })
            .unzip();
        let y0 = Tensor::new(coarse.shape().to_vec(), y0_vals).expect("coarse shape");
        let mut ops: u64 = ops3.iter().sum();

        // (iv)
        let per_nu: Vec<(Vec<T>, u64)> = (0..self.nus.len())
            .into_par_iter()
            .map(|i| {
                let (vals, o): (Vec<T>, Vec<u64>) = (0..len)
                    .map(|lin| {
                        let k = y0.coords_of(lin);
                        let (s, o) = self.step1_sum(i, &k, &y0);
                        (w[i].get(&k).add(&s), o)
                    })
                    .unzip();
                (vals, o.iter().sum())
            })
            .collect();

        let fine_shape: Vec<usize> = coarse.shape().iter().map(|&s| s * self.p as usize).collect();
        let mut y = Tensor::zeros(fine_shape);
        for lin in 0..len {
            let k = y0.coords_of(lin);
            let x: Vec<i64> = k.iter().map(|&c| c * self.p).collect();
            y.set(&x, y0.data()[lin].clone());
        }
        for (i, (vals, o)) in per_nu.into_iter().enumerate() {
            ops += o;
            let nu = &self.nus[i];
            for (lin, v) in vals.into_iter().enumerate() {
                let k = y0.coords_of(lin);
                let x: Vec<i64> = k.iter().zip(&nu.0).map(|(&c, &d)| c * self.p + d).collect();
                y.set(&x, v);
            }
        }
        (y, ops)
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

/// `J`-level decomposition and its multiplication count (one entry per
/// level, finest first).
pub fn decompose_fast_counted<T: Scalar>(
    y: &Tensor<T>,
    bank: &WaveletFilterBank,
    levels: usize,
) -> Result<(MultiresCoeffs<T>, Vec<u64>)> {
    let plan = FastPlan::<T>::new(bank)?;
    check_shape(y.shape(), plan.n, plan.p, levels)?;
    let mut current = y.clone();
    let mut details = Vec::with_capacity(levels);
    let mut counts = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (c, w, ops) = plan.decompose_level(&current);
        details.push(w);
        counts.push(ops);
        current = c;
    }
    details.reverse();
    Ok((
        MultiresCoeffs {
            p: plan.p,
            levels,
            input_shape: y.shape().to_vec(),
            coarse: current,
            details,
        },
        counts,
    ))
}

pub fn decompose_fast<T: Scalar>(y: &Tensor<T>, bank: &WaveletFilterBank, levels: usize) -> Result<MultiresCoeffs<T>> {
    decompose_fast_counted(y, bank, levels).map(|(c, _)| c)
}

/// Inverse of [`decompose_fast_counted`]; counts are listed finest first.
pub fn reconstruct_fast_counted<T: Scalar>(
    c: &MultiresCoeffs<T>,
    bank: &WaveletFilterBank,
) -> Result<(Tensor<T>, Vec<u64>)> {
    let plan = FastPlan::<T>::new(bank)?;
    c.validate(plan.q)?;
    check_shape(&c.input_shape, plan.n, plan.p, c.levels)?;
    let mut current = c.coarse.clone();
    let mut counts = Vec::with_capacity(c.levels);
    for w in &c.details {
        let (y, ops) = plan.reconstruct_level(&current, w);
        counts.push(ops);
        current = y;
    }
    counts.reverse();
    Ok((current, counts))
}

pub fn reconstruct_fast<T: Scalar>(c: &MultiresCoeffs<T>, bank: &WaveletFilterBank) -> Result<Tensor<T>> {
    reconstruct_fast_counted(c, bank).map(|(y, _)| y)
}
