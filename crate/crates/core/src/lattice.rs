//! Coset representatives of Z^n / pZ^n and Z / pZ, the inverse map ρ and the
//! direction map η used by the prime coset sum.
//!
//! Frequencies γ ∈ Γ* are never stored as angles: a frequency is the integer
//! vector `g` with `γ = (2π/p) g`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::check_prime;
use crate::error::{Error, Result};

/// A point of Z^n.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, s: i64) -> Self {
        MultiIndex(self.0.iter().map(|c| c * s).collect())
    }

    pub fn dot(&self, other: &Self) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Componentwise residues in `0..p`.
    pub fn residue(&self, p: i64) -> Self {
        MultiIndex(self.0.iter().map(|c| c.rem_euclid(p)).collect())
    }

    /// Exact componentwise division; `None` if some coordinate is not a
    /// multiple of `p`.
    pub fn div_exact(&self, p: i64) -> Option<Self> {
        self.0
            .iter()
            .map(|&c| (c % p == 0).then_some(c / p))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn is_multiple_of(&self, p: i64) -> bool {
        self.0.iter().all(|c| c % p == 0)
    }

    /// Product of `k_j^{μ_j}` as an integer monomial value.
    pub fn monomial(&self, mu: &[u32]) -> num_bigint::BigInt {
        let mut acc = num_bigint::BigInt::from(1);
        for (&k, &e) in self.0.iter().zip(mu) {
            if e > 0 {
                acc *= num_bigint::BigInt::from(k).pow(e);
            }
        }
        acc
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[i64; N]> for MultiIndex {
    fn from(v: [i64; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Comma-joined coordinates, e.g. `-1,1`. Used as JSON map keys.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("invalid multi-index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Γ = {0, …, p−1}^n, F_p = {0, …, p−1}.
    Standard,
    /// Γ = {−(p−1)/2, …, (p−1)/2}^n (odd p only), F_p likewise.
    Centered,
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Convention::Standard),
            "centered" => Ok(Convention::Centered),
            _ => Err(Error::Parse(format!(
                "unknown convention {s:?} (expected standard or centered)"
            ))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Standard => "standard",
            Convention::Centered => "centered",
        })
    }
}

/// ρ(l): the inverse of `l` modulo the prime `p`, returned in `1..p`.
pub fn mult_inverse(l: i64, p: i64) -> Result<i64> {
    check_prime(p)?;
    let r = l.rem_euclid(p);
    if r == 0 {
        return Err(Error::ZeroResidue { value: l, p });
    }
    // Fermat: r^{p-2}
    let mut acc = 1i64;
    let mut base = r;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    Ok(acc)
}

/// #{ν ∈ {0,…,m−1}^n : g·ν ≡ 0 (mod m)} for an arbitrary modulus `m`.
///
/// No primality requirement, so composite moduli can be compared with the
/// prime case.
pub fn zero_count_with_modulus(modulus: i64, g: &MultiIndex) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::Domain(format!("modulus {modulus} < 2")));
    }
    if g.is_multiple_of(modulus) {
        return Err(Error::Domain(format!("frequency {g:?} is zero modulo {modulus}")));
    }
    let n = g.dim();
    let total = (modulus as u64).pow(n as u32);
    let mut count = 0;
    let mut nu = vec![0i64; n];
    for _ in 0..total {
        let dot: i64 = nu.iter().zip(&g.0).map(|(a, b)| a * b).sum();
        if dot.rem_euclid(modulus) == 0 {
            count += 1;
        }
        for c in nu.iter_mut() {
            *c += 1;
            if *c < modulus {
                break;
            }
            *c = 0;
        }
    }
    Ok(count)
}

/// Representatives Γ of Z^n/pZ^n and F_p of Z/pZ, both containing 0.
///
/// `gamma[0]` is the origin; the remaining elements (Γ′) are ordered
/// lexicographically by their standard residue vector. That order is the row
/// and column order of every polyphase matrix.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    p: i64,
    n: usize,
    convention: Convention,
    gamma: Vec<MultiIndex>,
    fp: Vec<i64>,
    // residue code (mixed radix) -> position in `gamma`
    by_residue: Vec<usize>,
    // eta_table[l residue][nu position] -> nu position
    eta_table: Vec<Vec<usize>>,
}

impl PartialEq for CosetSystem {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.convention == other.convention
    }
}

impl Eq for CosetSystem {}

impl CosetSystem {
    pub fn new(p: i64, n: usize, convention: Convention) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if convention == Convention::Centered && p == 2 {
            return Err(Error::InvalidConvention(p));
        }
        let digits: Vec<i64> = match convention {
            Convention::Standard => (0..p).collect(),
            Convention::Centered => (-(p - 1) / 2..=(p - 1) / 2).collect(),
        };
        let mut fp = digits.clone();
        fp.sort_by_key(|&d| (d.rem_euclid(p), d));

        let q = (p as usize).pow(n as u32);
        let mut gamma = Vec::with_capacity(q);
        let mut cur = vec![0usize; n];
        for _ in 0..q {
            gamma.push(MultiIndex(cur.iter().map(|&i| digits[i]).collect()));
            for c in cur.iter_mut().rev() {
                *c += 1;
                if *c < digits.len() {
                    break;
                }
                *c = 0;
            }
        }
        gamma.sort_by_key(|g| g.residue(p));

        // completeness: every residue class hit exactly once
        let mut by_residue = vec![usize::MAX; q];
        for (i, g) in gamma.iter().enumerate() {
            let code = residue_code(g, p);
            if by_residue[code] != usize::MAX {
                return Err(Error::Domain(format!("{g:?} duplicates a residue class modulo {p}")));
            }
            by_residue[code] = i;
        }
        if !gamma[0].is_zero() {
            return Err(Error::Domain("representatives must contain 0".into()));
        }

        let mut sys = CosetSystem {
            p,
            n,
            convention,
            gamma,
            fp,
            by_residue,
            eta_table: Vec::new(),
        };
        sys.eta_table = (0..p)
            .map(|l| {
                if l == 0 {
                    return Vec::new();
                }
                let rho = mult_inverse(l, p).expect("nonzero residue");
                (0..q)
                    .map(|i| {
                        if i == 0 {
                            0
                        } else {
                            sys.position_of(&sys.gamma[i].scale(rho))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(sys)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// q = p^n.
    pub fn q(&self) -> usize {
        self.gamma.len()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn gamma(&self) -> &[MultiIndex] {
        &self.gamma
    }

    /// Γ′ = Γ ∖ {0}.
    pub fn gamma_prime(&self) -> &[MultiIndex] {
        &self.gamma[1..]
    }

    pub fn fp(&self) -> &[i64] {
        &self.fp
    }

    pub fn fp_prime(&self) -> &[i64] {
        &self.fp[1..]
    }

    /// Position in Γ of the representative of `k`'s coset.
    pub fn position_of(&self, k: &MultiIndex) -> usize {
        self.by_residue[residue_code(k, self.p)]
    }

    pub fn representative(&self, k: &MultiIndex) -> &MultiIndex {
        &self.gamma[self.position_of(k)]
    }

    /// Position of `nu` in Γ if `nu` is literally one of the representatives.
    pub fn index_of(&self, nu: &MultiIndex) -> Option<usize> {
        if nu.dim() != self.n {
            return None;
        }
        let i = self.position_of(nu);
        (self.gamma[i] == *nu).then_some(i)
    }

    /// η(l, ν): the element of Γ′ congruent to ρ(l)·ν modulo p.
    pub fn eta(&self, l: i64, nu: &MultiIndex) -> Result<MultiIndex> {
        if l == 0 || !self.fp.contains(&l) {
            return Err(Error::Domain(format!("{l} is not in F_p' for p = {}", self.p)));
        }
        match self.index_of(nu) {
            Some(i) if i > 0 => Ok(self.gamma[self.eta_position(l, i)].clone()),
            _ => Err(Error::Domain(format!("{nu:?} is not in Gamma'"))),
        }
    }

    /// Table form of η: `l` is any integer not divisible by p (only its
    /// residue matters), `nu_pos` a position in Γ′ (≥ 1).
    pub fn eta_position(&self, l: i64, nu_pos: usize) -> usize {
        let r = l.rem_euclid(self.p) as usize;
        debug_assert!(r != 0 && nu_pos != 0);
        self.eta_table[r][nu_pos]
    }

    /// #{ν ∈ Γ : g·ν ≡ 0 (mod p)} by enumeration over this system's Γ.
    pub fn coset_zero_count(&self, g: &MultiIndex) -> Result<u64> {
        if g.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "frequency has {} coordinates, system has {}",
                g.dim(),
                self.n
            )));
        }
        if g.is_multiple_of(self.p) {
            return Err(Error::Domain(format!("frequency {g:?} is zero modulo p")));
        }
        Ok(self.gamma.iter().filter(|nu| nu.dot(g).rem_euclid(self.p) == 0).count() as u64)
    }

    /// All frequency vectors g ∈ {0,…,p−1}^n, origin first.
    pub fn frequencies(&self) -> Vec<MultiIndex> {
        let mut v: Vec<MultiIndex> = self.gamma.iter().map(|g| g.residue(self.p)).collect();
        v.sort();
        v
    }
}

fn residue_code(k: &MultiIndex, p: i64) -> usize {
    k.0.iter()
        .fold(0usize, |acc, &c| acc * p as usize + c.rem_euclid(p) as usize)
}
