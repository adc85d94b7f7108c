//! Filter-and-resample transforms using the materialized bank.
//!
//! Analysis: `s_f(k) = (1/q) Σ_x f(x) y(pk + x)`.
//! Synthesis: `y(x) = Σ_f Σ_k f^d(x − pk) s_f(k)`.

use rayon::prelude::*;

use crate::arith::rat;
use crate::error::Result;
use crate::filterbank::WaveletFilterBank;
use crate::filters::FilterND;

use super::{check_shape, MultiresCoeffs, Scalar, Tensor};

fn taps_as<T: Scalar>(f: &FilterND, scale: &crate::arith::Rational) -> Vec<(Vec<i64>, T)> {
    f.taps()
        .iter()
        .map(|(k, v)| (k.0.clone(), T::from_rational(&(v * scale))))
        .collect()
}

fn analyze<T: Scalar>(y: &Tensor<T>, taps: &[(Vec<i64>, T)], p: i64) -> Tensor<T> {
    let coarse_shape: Vec<usize> = y.shape().iter().map(|&s| s / p as usize).collect();
    let probe = Tensor::<T>::zeros(coarse_shape.clone());
    let vals: Vec<T> = (0..probe.len())
        .into_par_iter()
        .map(|lin| {
            let k = probe.coords_of(lin);
            let mut idx = vec![0i64; k.len()];
            let mut acc = T::zero();
            for (x, c) in taps {
                for a in 0..k.len() {
                    idx[a] = k[a] * p + x[a];
                }
                acc = acc.add(&c.mul(y.get(&idx)));
            }
            acc
        })
        .collect();
    Tensor::new(coarse_shape, vals).expect("coarse shape")
}

fn synthesize_into<T: Scalar>(out: &mut Tensor<T>, s: &Tensor<T>, taps: &[(Vec<i64>, T)], p: i64) {
    let mut idx = vec![0i64; s.dim()];
    for lin in 0..s.len() {
        let k = s.coords_of(lin);
        let v = &s.data()[lin];
        for (x, c) in taps {
            for a in 0..k.len() {
                idx[a] = k[a] * p + x[a];
            }
            let cur = out.get(&idx).add(&c.mul(v));
            out.set(&idx, cur);
        }
    }
}

/// Oracle decomposition; works for any bank provenance.
pub fn decompose_direct<T: Scalar>(
    y: &Tensor<T>,
    bank: &WaveletFilterBank,
    levels: usize,
) -> Result<MultiresCoeffs<T>> {
    let sys = bank.sys();
    let p = sys.p();
    check_shape(y.shape(), sys.n(), p, levels)?;
    let inv_q = rat(1, sys.q() as i64);
    let tau = taps_as::<T>(bank.tau(), &inv_q);
    let t: Vec<_> = bank.t().iter().map(|f| taps_as::<T>(f, &inv_q)).collect();
    let mut current = y.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let w: Vec<Tensor<T>> = t.iter().map(|taps| analyze(&current, taps, p)).collect();
        current = analyze(&current, &tau, p);
        details.push(w);
    }
    details.reverse();
    Ok(MultiresCoeffs {
        p,
        levels,
        input_shape: y.shape().to_vec(),
        coarse: current,
        details,
    })
}

/// Oracle reconstruction with the synthesis filters.
pub fn reconstruct_direct<T: Scalar>(c: &MultiresCoeffs<T>, bank: &WaveletFilterBank) -> Result<Tensor<T>> {
    let sys = bank.sys();
    let p = sys.p();
    c.validate(sys.q())?;
    check_shape(&c.input_shape, sys.n(), p, c.levels)?;
    let one = rat(1, 1);
    let tau_d = taps_as::<T>(bank.tau_d(), &one);
    let t_d: Vec<_> = bank.t_d().iter().map(|f| taps_as::<T>(f, &one)).collect();
    let mut current = c.coarse.clone();
    for w in &c.details {
        let fine: Vec<usize> = current.shape().iter().map(|&s| s * p as usize).collect();
        let mut out = Tensor::zeros(fine);
        synthesize_into(&mut out, &current, &tau_d, p);
        for (s, taps) in w.iter().zip(&t_d) {
            synthesize_into(&mut out, s, taps, p);
        }
        current = out;
    }
    Ok(current)
}
