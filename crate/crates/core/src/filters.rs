//! Finitely supported rational filters on Z^n and their exact diagnostics.
//!
//! Taps are stored unnormalized. The mask of a filter `h` with dilation
//! `p·I_n` is `τ(ω) = (1/q) Σ_k h(k) e^{-ik·ω}` with `q = p^n`; the `1/q`
//! factor is applied on evaluation only. A filter is lowpass when its taps sum
//! to `q` and highpass when they sum to zero.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, int, parse_rational, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::lattice::MultiIndex;

/// Search bound for [`FilterND::diagnostics`] when the caller has no opinion.
pub const DEFAULT_MAX_ORDER: u32 = 20;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FilterND {
    p: i64,
    n: usize,
    taps: BTreeMap<MultiIndex, Rational>,
}

impl FilterND {
    /// Collects taps, summing repeated offsets and dropping zeros.
    pub fn new<I>(p: i64, n: usize, taps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut f = FilterND::zero(p, n);
        for (k, v) in taps {
            if k.dim() != n {
                return Err(Error::DimensionMismatch(format!("tap at {k:?} in a {n}-D filter")));
            }
            f.add_tap(k, &v);
        }
        Ok(f)
    }

    pub fn zero(p: i64, n: usize) -> Self {
        FilterND {
            p,
            n,
            taps: BTreeMap::new(),
        }
    }

    /// Kronecker delta scaled by `v` at `k`.
    pub fn delta(p: i64, k: MultiIndex, v: Rational) -> Self {
        let n = k.dim();
        let mut f = FilterND::zero(p, n);
        f.add_tap(k, &v);
        f
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// q = p^n.
    pub fn q(&self) -> i64 {
        self.p.pow(self.n as u32)
    }

    pub fn taps(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.taps
    }

    pub fn tap(&self, k: &MultiIndex) -> Rational {
        self.taps.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.taps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn add_tap(&mut self, k: MultiIndex, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let entry = self.taps.entry(k);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn tap_sum(&self) -> Rational {
        self.taps.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_lowpass(&self) -> bool {
        self.tap_sum() == int(self.q())
    }

    pub fn is_highpass(&self) -> bool {
        self.tap_sum().is_zero()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        FilterND::new(self.p, self.n, self.taps.iter().map(|(k, v)| (k.clone(), v * s))).expect("same dimension")
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.taps {
            out.add_tap(k.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// k ↦ −k; the filter of the conjugate mask for real taps.
    pub fn reflect(&self) -> Self {
        FilterND {
            p: self.p,
            n: self.n,
            taps: self.taps.iter().map(|(k, v)| (-k, v.clone())).collect(),
        }
    }

    /// Exact mask value at γ = (2π/p)·g:
    /// `(1/q) Σ_k h(k) ζ_p^{k·g}` with `ζ_p = e^{-2πi/p}`.
    pub fn mask_eval(&self, g: &MultiIndex) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(self.p as u32);
        for (k, v) in &self.taps {
            acc.add_term(v, k.dot(g));
        }
        acc.scale(&Rational::new(BigInt::one(), BigInt::from(self.q())))
    }

    /// First tap violating `h(0) = 1, h(pZ^n ∖ 0) = 0`, with the value it
    /// should have had.
    pub fn interpolatory_violation(&self) -> Option<(MultiIndex, Rational, i64)> {
        let origin = MultiIndex::zero(self.n);
        let h0 = self.tap(&origin);
        if !h0.is_one() {
            return Some((origin, h0, 1));
        }
        self.taps
            .iter()
            .find(|(k, _)| !k.is_zero() && k.is_multiple_of(self.p))
            .map(|(k, v)| (k.clone(), v.clone(), 0))
    }

    /// [`Error::NotInterpolatory`] naming the filter as `name`.
    pub fn interpolatory_error(&self, name: &str) -> Option<Error> {
        self.interpolatory_violation()
            .map(|(k, v, want)| Error::NotInterpolatory {
                name: name.to_string(),
                detail: format!("{name}({k}) = {} ≠ {want}", format_rational(&v)),
            })
    }

    pub fn is_interpolatory(&self) -> bool {
        self.interpolatory_violation().is_none()
    }

    /// Exact check of `Σ_k h(k) g(k + p·l) = q·δ_{l,0}` for every `l`.
    pub fn is_biorthogonal(&self, other: &FilterND) -> Result<bool> {
        self.check_compatible(other)?;
        let mut corr: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (a, ha) in &self.taps {
            for (b, gb) in &other.taps {
                let d = b - a;
                if d.is_multiple_of(self.p) {
                    *corr.entry(d).or_insert_with(Rational::zero) += ha * gb;
                }
            }
        }
        let q = int(self.q());
        Ok(corr
            .iter()
            .all(|(d, v)| if d.is_zero() { *v == q } else { v.is_zero() })
            && corr.contains_key(&MultiIndex::zero(self.n)))
    }

    pub(crate) fn check_compatible(&self, other: &FilterND) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "filters with (p, n) = ({}, {}) and ({}, {})",
                self.p, self.n, other.p, other.n
            )));
        }
        Ok(())
    }

    /// Exact orders of zeros, searched up to `max_order`.
    ///
    /// * accuracy: order of zero of the mask at every γ ∈ Γ* ∖ 0;
    /// * vanishing moments: order of zero at the origin;
    /// * flatness: order of zero of `1 − τ` at the origin.
    ///
    /// A reported value equal to `max_order` means the search saturated.
    pub fn diagnostics(&self, max_order: u32) -> MaskDiagnostics {
        let max_order = max_order.max(1);
        let moments = MomentTable::new(self, max_order);
        let mut vanishing = max_order;
        'vm: for r in 0..max_order {
            for mu in multi_indices(self.n, r) {
                if !moments.moment(&mu).is_zero() {
                    vanishing = r;
                    break 'vm;
                }
            }
        }
        let flatness = if !self.is_lowpass() {
            0
        } else if vanishing == 0 {
            // lowpass: the zeroth-order term of 1 − τ vanishes, moments decide
            let mut fl = max_order;
            'fl: for r in 1..max_order {
                for mu in multi_indices(self.n, r) {
                    if !moments.moment(&mu).is_zero() {
                        fl = r;
                        break 'fl;
                    }
                }
            }
            fl
        } else {
            0
        };

        let freqs: Vec<MultiIndex> = nonzero_frequencies(self.p, self.n);
        let mut accuracy = max_order;
        'acc: for r in 0..max_order {
            for mu in multi_indices(self.n, r) {
                for g in &freqs {
                    if !moments.phased_moment_vanishes(&mu, g) {
                        accuracy = r;
                        break 'acc;
                    }
                }
            }
        }

        MaskDiagnostics {
            is_lowpass: self.is_lowpass(),
            is_interpolatory: self.is_interpolatory(),
            accuracy,
            vanishing_moments: vanishing,
            flatness,
            support_size: self.support_size(),
            max_order_searched: max_order,
        }
    }

    pub fn to_json(&self) -> FilterJson {
        FilterJson {
            p: self.p,
            dim: self.n,
            taps: self
                .taps
                .iter()
                .map(|(k, v)| TapJson {
                    k: k.0.clone(),
                    v: format_rational(v),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FilterJson) -> Result<Self> {
        let mut f = FilterND::zero(j.p, j.dim);
        for t in &j.taps {
            let k = MultiIndex(t.k.clone());
            if k.dim() != j.dim {
                return Err(Error::Parse(format!(
                    "tap {:?} has {} coordinates, filter has dim {}",
                    t.k,
                    k.dim(),
                    j.dim
                )));
            }
            let v = parse_rational(&t.v)?;
            if v.is_zero() {
                return Err(Error::Parse(format!("zero tap stored at {k}")));
            }
            if f.taps.contains_key(&k) {
                return Err(Error::Parse(format!("tap {k} listed twice")));
            }
            f.taps.insert(k, v);
        }
        Ok(f)
    }
}

/// Exact order-of-zero summary for one mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskDiagnostics {
    pub is_lowpass: bool,
    pub is_interpolatory: bool,
    pub accuracy: u32,
    pub vanishing_moments: u32,
    pub flatness: u32,
    pub support_size: usize,
    pub max_order_searched: u32,
}

impl MaskDiagnostics {
    /// Wavelet masks are exactly those with a zero at the origin.
    pub fn is_wavelet_mask(&self) -> bool {
        self.vanishing_moments >= 1
    }
}

/// Integer-scaled moments `Σ_k c(k) k^μ` bucketed by phase class.
struct MomentTable {
    p: i64,
    taps: Vec<(MultiIndex, BigInt)>,
}

impl MomentTable {
    fn new(f: &FilterND, _max_order: u32) -> Self {
        // clear denominators: zero tests are scale-invariant
        let lcm = f.taps.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let taps = f
            .taps
            .iter()
            .map(|(k, v)| (k.clone(), (v * Rational::from_integer(lcm.clone())).to_integer()))
            .collect();
        MomentTable { p: f.p, taps }
    }

    fn moment(&self, mu: &[u32]) -> BigInt {
        self.taps
            .iter()
            .map(|(k, c)| c * k.monomial(mu))
            .fold(BigInt::zero(), |a, b| a + b)
    }

    /// `Σ_k c(k) k^μ ζ^{k·g} = 0` in Q(ζ_p): true iff all p phase buckets agree.
    fn phased_moment_vanishes(&self, mu: &[u32], g: &MultiIndex) -> bool {
        let p = self.p as usize;
        let mut buckets = vec![BigInt::zero(); p];
        for (k, c) in &self.taps {
            let j = k.dot(g).rem_euclid(self.p) as usize;
            buckets[j] += c * k.monomial(mu);
        }
        buckets.windows(2).all(|w| w[0] == w[1])
    }
}

/// All exponent vectors μ ∈ N^n with |μ| = order.
pub fn multi_indices(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
    }
    if n == 0 {
        return out;
    }
    rec(0, order, &mut cur, &mut out);
    out
}

/// g ∈ {0,…,p−1}^n ∖ 0, the integer form of Γ* ∖ 0.
pub fn nonzero_frequencies(p: i64, n: usize) -> Vec<MultiIndex> {
    let total = (p as usize).pow(n as u32);
    (1..total)
        .map(|mut code| {
            let mut v = vec![0i64; n];
            for c in v.iter_mut().rev() {
                *c = (code % p as usize) as i64;
                code /= p as usize;
            }
            MultiIndex(v)
        })
        .collect()
}

/// A 1-D filter; a thin view over an `n = 1` [`FilterND`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Filter1D(FilterND);

impl Filter1D {
    pub fn new<I>(p: i64, taps: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        Filter1D(FilterND::new(p, 1, taps.into_iter().map(|(k, v)| (MultiIndex(vec![k]), v))).expect("1-D taps"))
    }

    pub fn from_nd(f: FilterND) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected a 1-D filter, got dim {}",
                f.dim()
            )));
        }
        Ok(Filter1D(f))
    }

    pub fn p(&self) -> i64 {
        self.0.p
    }

    pub fn tap(&self, k: i64) -> Rational {
        self.0.tap(&MultiIndex(vec![k]))
    }

    /// Nonzero taps as `(offset, value)` in increasing offset order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.0.taps.iter().map(|(k, v)| (k.0[0], v))
    }

    pub fn as_nd(&self) -> &FilterND {
        &self.0
    }

    pub fn support_size(&self) -> usize {
        self.0.support_size()
    }

    /// Centered Haar with odd dilation p: ones on −(p−1)/2 ..= (p−1)/2.
    pub fn centered_haar(p: i64) -> Self {
        let h = (p - 1) / 2;
        Filter1D::new(p, (-h..=h).map(|k| (k, int(1))))
    }

    /// Haar on 0 ..= p−1.
    pub fn haar(p: i64) -> Self {
        Filter1D::new(p, (0..p).map(|k| (k, int(1))))
    }

    /// Interpolatory dilation-3 filter with accuracy 4 (taps over 81).
    pub fn interpolatory_accuracy4_p3() -> Self {
        use crate::arith::rat;
        Filter1D::new(
            3,
            [
                (-5, rat(-4, 81)),
                (-4, rat(-5, 81)),
                (-2, rat(30, 81)),
                (-1, rat(60, 81)),
                (0, int(1)),
                (1, rat(60, 81)),
                (2, rat(30, 81)),
                (4, rat(-5, 81)),
                (5, rat(-4, 81)),
            ],
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapJson {
    pub k: Vec<i64>,
    pub v: String,
}

/// `{"p": int, "dim": int, "taps": [{"k": [ints], "v": "num/den"}, ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterJson {
    pub p: i64,
    pub dim: usize,
    pub taps: Vec<TapJson>,
}

impl FilterJson {
    pub fn parse(text: &str) -> Result<FilterND> {
        let j: FilterJson = serde_json::from_str(text)?;
        FilterND::from_json(&j)
    }
}
