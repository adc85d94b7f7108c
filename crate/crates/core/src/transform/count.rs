//! Multiplication accounting for the fast algorithm.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{format_rational, int, rat, Rational};
use crate::error::{Error, Result};
use crate::filterbank::{Provenance, WaveletFilterBank};

use super::{decompose_fast_counted, reconstruct_fast_counted, Tensor};

/// Counting convention, printed with every report.
pub const CONVENTION: &str = "one count per scalar multiplication or division; \
steps (i) and (iv): one per H tap off pZ plus the 1/(p-1) scale; \
steps (ii) and (iii): one per G tap off pZ and direction, the 1/((p-1)p^n) scale, \
and n for forming the lattice point pk";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpCount {
    pub p: i64,
    pub n: usize,
    pub levels: usize,
    pub samples: usize,
    /// Decompose plus reconstruct, all levels.
    pub multiplicative_ops: u64,
    /// One full cycle per level, finest first.
    pub per_level: Vec<u64>,
    /// Closed form summed over levels with `N_j = N / q^j`.
    pub predicted: Rational,
    /// `(2(q−1)β + 2(q−1)α̃ + 2n + 2) / q`.
    pub per_sample_constant: Rational,
    /// `2β + 2(p−1)(α+1)/p + 1`; equals `α + 2β + 2` when `p = 2`.
    pub per_sample_bound: Rational,
    pub alpha: usize,
    pub beta: usize,
    pub alpha_tilde: usize,
    /// `(α+β)n` per sample.
    pub tensor_model: Rational,
}

impl OpCount {
    pub fn matches_prediction(&self) -> bool {
        Rational::from_integer(self.multiplicative_ops.into()) == self.predicted
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "n": self.n,
            "levels": self.levels,
            "samples": self.samples,
            "measured": self.multiplicative_ops,
            "per_level": self.per_level,
            "predicted": format_rational(&self.predicted),
            "per_sample_constant": format_rational(&self.per_sample_constant),
            "per_sample_bound": format_rational(&self.per_sample_bound),
            "alpha": self.alpha,
            "beta": self.beta,
            "alpha_tilde": self.alpha_tilde,
            "tensor_model": format_rational(&self.tensor_model),
            "convention": CONVENTION,
        })
    }
}

/// `(2(q−1)β + 2(q−1)α̃ + 2n + 2) / q`.
pub fn per_sample_constant(p: i64, n: usize, beta: usize, alpha_tilde: usize) -> Rational {
    let q = p.pow(n as u32);
    rat(
        2 * (q - 1) * beta as i64 + 2 * (q - 1) * alpha_tilde as i64 + 2 * n as i64 + 2,
        q,
    )
}

/// `2β + 2(p−1)(α+1)/p + 1`.
pub fn per_sample_bound(p: i64, alpha: usize, beta: usize) -> Rational {
    int(2 * beta as i64 + 1) + rat(2 * (p - 1) * (alpha as i64 + 1), p)
}

/// Runs one decompose and reconstruct cycle over `levels` levels on a zero
/// tensor of `shape` and compares the count with the closed form.
pub fn count_ops(bank: &WaveletFilterBank, shape: &[usize], levels: usize) -> Result<OpCount> {
    let (g, h) = match bank.provenance() {
        Provenance::PrimeCosetSum { g, h } => (g, h),
        Provenance::General => return Err(Error::WrongProvenance),
    };
    let sys = bank.sys();
    let p = sys.p();
    let n = sys.n();
    let y = Tensor::<f64>::zeros(shape.to_vec());
    let (coeffs, dec) = decompose_fast_counted(&y, bank, levels)?;
    let (_, rec) = reconstruct_fast_counted(&coeffs, bank)?;
    let per_level: Vec<u64> = dec.iter().zip(&rec).map(|(a, b)| a + b).collect();

    let alpha = g.support_size();
    let beta = h.support_size();
    let alpha_tilde = g.iter().filter(|(m, v)| m.rem_euclid(p) != 0 && !v.is_zero()).count();
    let c = per_sample_constant(p, n, beta, alpha_tilde);
    let samples: usize = shape.iter().product();
    let q = sys.q();
    let predicted = (0..levels).fold(Rational::zero(), |acc, j| {
        acc + &c * Rational::from_integer(((samples / q.pow(j as u32)) as i64).into())
    });
    Ok(OpCount {
        p,
        n,
        levels,
        samples,
        multiplicative_ops: per_level.iter().sum(),
        per_level,
        predicted,
        per_sample_constant: c,
        per_sample_bound: per_sample_bound(p, alpha, beta),
        alpha,
        beta,
        alpha_tilde,
        tensor_model: int(((alpha + beta) * n) as i64),
    })
}
