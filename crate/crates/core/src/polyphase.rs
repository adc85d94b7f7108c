//! Laurent polynomials in n variables and the polyphase form of filters and
//! filter banks.
//!
//! An exponent `e` stands for `e^{-ie·ω}`, matching the mask convention of
//! [`FilterND`]. Conjugation of a rational Laurent polynomial is exponent
//! negation, and the substitution `ω → pω` multiplies exponents by `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{format_rational, int, rat, Rational};
use crate::error::{Error, Result};
use crate::filters::{Filter1D, FilterND};
use crate::lattice::{CosetSystem, MultiIndex};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    pub fn monomial(e: MultiIndex, c: Rational) -> Self {
        let mut out = LaurentPoly::zero(e.dim());
        out.add_term(e, &c);
        out
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut out = LaurentPoly::zero(n);
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn coeff(&self, e: &MultiIndex) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: MultiIndex, c: &Rational) {
        debug_assert_eq!(e.dim(), self.n);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return LaurentPoly::zero(self.n);
        }
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Complex conjugate for rational coefficients.
    pub fn conj(&self) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// `P(ω) ↦ P(pω)`.
    pub fn dilate(&self, p: i64) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.scale(p), c.clone())).collect(),
        }
    }

    /// Multiplication by `e^{-is·ω}`.
    pub fn shift(&self, s: &MultiIndex) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect(),
        }
    }

    /// 1-D polynomial in ξ mapped to n variables by `ξ = ω·ν`.
    pub fn along(&self, nu: &MultiIndex) -> Self {
        assert_eq!(self.n, 1, "ray substitution needs a univariate polynomial");
        LaurentPoly::from_terms(nu.dim(), self.terms.iter().map(|(e, c)| (nu.scale(e.0[0]), c.clone())))
    }

    /// Reads `q·P` back as a filter, the inverse of the mask normalization.
    pub fn to_filter(&self, p: i64) -> FilterND {
        let q = int(p.pow(self.n as u32));
        FilterND::new(p, self.n, self.terms.iter().map(|(e, c)| (e.clone(), c * &q))).expect("consistent dimension")
    }

    /// `(1/q) Σ_k f(k) e^{-ik·ω}`, the mask of `f` as a Laurent polynomial.
    pub fn from_filter(f: &FilterND) -> Self {
        let inv = rat(1, f.q());
        LaurentPoly::from_terms(f.dim(), f.taps().iter().map(|(k, v)| (k.clone(), v * &inv)))
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.terms
                .iter()
                .map(|(e, c)| (e.to_string(), Value::String(format_rational(c))))
                .collect(),
        )
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                if e.is_zero() {
                    format_rational(c)
                } else {
                    format!("{}·x^({})", format_rational(c), e)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&int(-1))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.n);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, &(x * y));
            }
        }
        out
    }
}

/// Which polyphase convention to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `H_ν(ξ) = (1/q) Σ_k h(ν + pk) ξ^k`
    Synthesis,
    /// `G_ν(ξ) = (1/q) Σ_k g(ν − pk) ξ^k`
    Analysis,
}

/// Polyphase components of `f`, indexed like `sys.gamma()`.
pub fn polyphase_decompose(f: &FilterND, sys: &CosetSystem, side: Side) -> Result<Vec<LaurentPoly>> {
    if f.p() != sys.p() || f.dim() != sys.n() {
        return Err(Error::DimensionMismatch(format!(
            "filter (p, n) = ({}, {}) against coset system ({}, {})",
            f.p(),
            f.dim(),
            sys.p(),
            sys.n()
        )));
    }
    let p = sys.p();
    let inv = rat(1, sys.q() as i64);
    let mut out = vec![LaurentPoly::zero(sys.n()); sys.q()];
    for (x, v) in f.taps() {
        let pos = sys.position_of(x);
        let nu = &sys.gamma()[pos];
        let k = match side {
            Side::Synthesis => (x - nu).div_exact(p),
            Side::Analysis => (nu - x).div_exact(p),
        }
        .expect("x is congruent to its representative");
        out[pos].add_term(k, &(v * &inv));
    }
    Ok(out)
}

/// Inverse of [`polyphase_decompose`] on the synthesis side:
/// `q Σ_ν ξ^ν H_ν(ξ^p)` as filter taps.
pub fn polyphase_recompose(components: &[LaurentPoly], sys: &CosetSystem) -> FilterND {
    let mut acc = LaurentPoly::zero(sys.n());
    for (nu, c) in sys.gamma().iter().zip(components) {
        acc = &acc + &c.dilate(sys.p()).shift(nu);
    }
    acc.to_filter(sys.p())
}

/// ν-th synthesis component of `C[H]` computed from the 1-D filter alone:
/// `(1/((p−1)q)) Σ_{m ≢ 0} H(m) ξ^{(η(m,ν)·m − ν)/p}`.
pub fn coset_sum_polyphase(h: &Filter1D, sys: &CosetSystem, nu: &MultiIndex) -> Result<LaurentPoly> {
    crate::cosetsum::check_generator(h, sys, "H")?;
    let nu_pos = sys
        .index_of(nu)
        .filter(|&i| i != 0)
        .ok_or_else(|| Error::Domain(format!("{nu} is not in the nonzero representative set")))?;
    let p = sys.p();
    let scale = rat(1, (p - 1) * sys.q() as i64);
    let mut out = LaurentPoly::zero(sys.n());
    for (m, v) in h.iter() {
        if m.rem_euclid(p) == 0 {
            continue;
        }
        let eta = &sys.gamma()[sys.eta_position(m, nu_pos)];
        let e = (&eta.scale(m) - nu)
            .div_exact(p)
            .unwrap_or_else(|| panic!("η({m},{nu})·{m} − {nu} is not divisible by {p}"));
        out.add_term(e, &(v * &scale));
    }
    Ok(out)
}

/// Dense grid of Laurent polynomials, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyphaseMatrix {
    rows: usize,
    cols: usize,
    n: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyphaseMatrix {
    pub fn zeros(rows: usize, cols: usize, n: usize) -> Self {
        PolyphaseMatrix {
            rows,
            cols,
            n,
            entries: vec![LaurentPoly::zero(n); rows * cols],
        }
    }

    /// `c·I`.
    pub fn scaled_identity(size: usize, n: usize, c: &Rational) -> Self {
        let mut m = Self::zeros(size, size, n);
        for i in 0..size {
            m.set(i, i, LaurentPoly::constant(n, c.clone()));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        self.entries[i * self.cols + j] = v;
    }

    /// Sparse product: zero entries are skipped, rows run in parallel.
    pub fn mul(&self, rhs: &PolyphaseMatrix) -> Result<PolyphaseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let rhs_rows: Vec<Vec<(usize, &LaurentPoly)>> = (0..rhs.rows)
            .map(|k| {
                (0..rhs.cols)
                    .map(|j| (j, rhs.get(k, j)))
                    .filter(|(_, e)| !e.is_zero())
                    .collect()
            })
            .collect();
        let n = self.n;
        let cols = rhs.cols;
        let entries: Vec<LaurentPoly> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = vec![LaurentPoly::zero(n); cols];
                for (k, rk) in rhs_rows.iter().enumerate() {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in rk {
                        let prod = a * *b;
                        row[*j] = &row[*j] + &prod;
                    }
                }
                row.into_iter()
            })
            .collect();
        Ok(PolyphaseMatrix {
            rows: self.rows,
            cols,
            n,
            entries,
        })
    }

    /// Entries of `self − c·I` that are not zero.
    pub fn identity_residuals(&self, c: &Rational) -> Vec<(usize, usize, LaurentPoly)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let mut r = self.get(i, j).clone();
                if i == j {
                    r.add_term(MultiIndex::zero(self.n), &-c);
                }
                if !r.is_zero() {
                    out.push((i, j, r));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array((0..self.cols).map(|j| self.get(i, j).to_json()).collect()))
            .collect();
        json!({ "rows": self.rows, "cols": self.cols, "entries": rows })
    }
}

/// Rows are the analysis components of each filter in order.
pub fn analysis_matrix(filters: &[&FilterND], sys: &CosetSystem) -> Result<PolyphaseMatrix> {
    let q = sys.q();
    let mut m = PolyphaseMatrix::zeros(filters.len(), q, sys.n());
    for (i, f) in filters.iter().enumerate() {
        for (j, c) in polyphase_decompose(f, sys, Side::Analysis)?.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    Ok(m)
}

/// Columns are the synthesis components of each filter in order.
pub fn synthesis_matrix(filters: &[&FilterND], sys: &CosetSystem) -> Result<PolyphaseMatrix> {
    let q = sys.q();
    let mut m = PolyphaseMatrix::zeros(q, filters.len(), sys.n());
    for (j, f) in filters.iter().enumerate() {
        for (i, c) in polyphase_decompose(f, sys, Side::Synthesis)?.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    Ok(m)
}

/// Exact check of `S·A = (1/q)·I`.
pub fn matmul_check(s: &PolyphaseMatrix, a: &PolyphaseMatrix, q: usize) -> bool {
    match s.mul(a) {
        Ok(prod) => prod.rows == q && prod.cols == q && prod.identity_residuals(&rat(1, q as i64)).is_empty(),
        Err(_) => false,
    }
}

/// `B = 1/q − Σ_ν G_ν H_ν`; zero iff `g` and `h` are biorthogonal.
pub fn bias_poly(gp: &[LaurentPoly], hp: &[LaurentPoly], q: usize, n: usize) -> LaurentPoly {
    let mut b = LaurentPoly::constant(n, rat(1, q as i64));
    for (g, h) in gp.iter().zip(hp) {
        b = &b - &(g * h);
    }
    b
}

fn interpolatory_components(
    g: &FilterND,
    h: &FilterND,
    sys: &CosetSystem,
) -> Result<(Vec<LaurentPoly>, Vec<LaurentPoly>)> {
    g.check_compatible(h)?;
    if let Some(e) = h.interpolatory_error("h") {
        return Err(e);
    }
    let gp = polyphase_decompose(g, sys, Side::Analysis)?;
    let hp = polyphase_decompose(h, sys, Side::Synthesis)?;
    Ok((gp, hp))
}

/// Polyphase matrices of the general interpolatory construction:
///
/// ```text
/// A = [ G_0 + qB   G̃ ]      S = [ 1/q   −(1/q) G̃       ]
///     [ −q H̃       I ]          [ H̃     (1/q) I − H̃ G̃ ]
/// ```
///
/// with `G̃`, `H̃` the components at `ν ∈ Γ′`.
pub fn build_a_s(g: &FilterND, h: &FilterND, sys: &CosetSystem) -> Result<(PolyphaseMatrix, PolyphaseMatrix)> {
    build_a_s_signed(g, h, sys, -1)
}

/// [`build_a_s`] with the sign of S's top-right block as a parameter; only
/// `−1` yields a perfect-reconstruction pair.
#[allow(clippy::needless_range_loop)]
pub fn build_a_s_signed(
    g: &FilterND,
    h: &FilterND,
    sys: &CosetSystem,
    top_right_sign: i64,
) -> Result<(PolyphaseMatrix, PolyphaseMatrix)> {
    let (gp, hp) = interpolatory_components(g, h, sys)?;
    let q = sys.q();
    let n = sys.n();
    let qr = int(q as i64);
    let inv_q = rat(1, q as i64);
    let b = bias_poly(&gp, &hp, q, n);

    let mut a = PolyphaseMatrix::zeros(q, q, n);
    a.set(0, 0, &gp[0] + &b.scale(&qr));
    for j in 1..q {
        a.set(0, j, gp[j].clone());
        a.set(j, 0, hp[j].scale(&-&qr));
        a.set(j, j, LaurentPoly::constant(n, Rational::one()));
    }

    let mut s = PolyphaseMatrix::zeros(q, q, n);
    s.set(0, 0, LaurentPoly::constant(n, inv_q.clone()));
    for j in 1..q {
        s.set(0, j, gp[j].scale(&(&inv_q * int(top_right_sign))));
        s.set(j, 0, hp[j].clone());
        for k in 1..q {
            let mut e = -&(&hp[j] * &gp[k]);
            if j == k {
                e.add_term(MultiIndex::zero(n), &inv_q);
            }
            s.set(j, k, e);
        }
    }
    Ok((a, s))
}

/// `A = [[1, G̃], [0, I]] · [[1, 0], [−qH̃, I]]`.
pub fn triangular_factors(g: &FilterND, h: &FilterND, sys: &CosetSystem) -> Result<(PolyphaseMatrix, PolyphaseMatrix)> {
    let (gp, hp) = interpolatory_components(g, h, sys)?;
    let q = sys.q();
    let n = sys.n();
    let one = Rational::one();
    let mut upper = PolyphaseMatrix::scaled_identity(q, n, &one);
    let mut lower = PolyphaseMatrix::scaled_identity(q, n, &one);
    for j in 1..q {
        upper.set(0, j, gp[j].clone());
        lower.set(j, 0, hp[j].scale(&int(-(q as i64))));
    }
    Ok((upper, lower))
}
