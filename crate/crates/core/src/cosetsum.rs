//! The prime coset sum: a 1-D lowpass filter with prime dilation `p` becomes
//! an n-D lowpass filter with dilation `p·I_n` by averaging it along the rays
//! `Z·ν`, `ν ∈ Γ′`.

use num_traits::Zero;

use crate::arith::{int, rat, Cyclotomic};
use crate::error::{Error, Result};
use crate::filters::{Filter1D, FilterND};
use crate::lattice::{CosetSystem, MultiIndex};

/// A point `l·ν` on the ray through `ν ∈ Γ′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayIndex {
    pub l: i64,
    pub nu: MultiIndex,
}

impl RayIndex {
    pub fn point(&self) -> MultiIndex {
        self.nu.scale(self.l)
    }
}

/// Every `(l, ν)` with `l ∈ supp(H) ∖ 0` and `ν ∈ Γ′`, in Γ′ order.
pub fn rays<'a>(h: &'a Filter1D, sys: &'a CosetSystem) -> impl Iterator<Item = RayIndex> + 'a {
    sys.gamma_prime().iter().flat_map(move |nu| {
        h.iter()
            .filter(|(l, _)| *l != 0)
            .map(move |(l, _)| RayIndex { l, nu: nu.clone() })
    })
}

pub(crate) fn check_generator(h: &Filter1D, sys: &CosetSystem, name: &str) -> Result<()> {
    if h.p() != sys.p() {
        return Err(Error::DimensionMismatch(format!(
            "{name} has dilation {} but the coset system uses p = {}",
            h.p(),
            sys.p()
        )));
    }
    let sum = h.as_nd().tap_sum();
    if sum != int(sys.p()) {
        return Err(Error::NotLowpass {
            sum: crate::arith::format_rational(&sum),
            expected: sys.p().to_string(),
        });
    }
    Ok(())
}

/// Filter-domain prime coset sum:
/// `h(0) = (p − p^n + (p^n − 1)H(0)) / (p − 1)` and, for `k ≠ 0`,
/// `h(k) = (1/(p−1)) Σ_{(l,ν): lν = k} H(l)`.
pub fn prime_coset_sum(h: &Filter1D, sys: &CosetSystem) -> Result<FilterND> {
    check_generator(h, sys, "H")?;
    let p = sys.p();
    let q = sys.q() as i64;
    let inv = rat(1, p - 1);
    let mut out = FilterND::zero(p, sys.n());
    for ray in rays(h, sys) {
        out.add_tap(ray.point(), &(h.tap(ray.l) * &inv));
    }
    let h0 = (int(p - q) + int(q - 1) * h.tap(0)) * &inv;
    out.add_tap(MultiIndex::zero(sys.n()), &h0);
    Ok(out)
}

/// `C[R](γ) = (1 − p^{n−1} + Σ_{ν∈Γ′} R(γ·ν)) / ((p−1)p^{n−1})` evaluated
/// exactly at `γ = (2π/p)·g` from the 1-D mask alone.
pub fn coset_sum_mask_eval(h: &Filter1D, sys: &CosetSystem, g: &MultiIndex) -> Result<Cyclotomic> {
    check_generator(h, sys, "H")?;
    if g.dim() != sys.n() {
        return Err(Error::DimensionMismatch(format!(
            "frequency {g} in dimension {}",
            sys.n()
        )));
    }
    let p = sys.p();
    let pn1 = p.pow(sys.n() as u32 - 1);
    let mut acc = Cyclotomic::from_rational(p as u32, int(1 - pn1));
    let inv_p = rat(1, p);
    for nu in sys.gamma_prime() {
        let phase = g.dot(nu);
        for (l, v) in h.iter() {
            acc.add_term(&(v * &inv_p), l * phase);
        }
    }
    Ok(acc.scale(&rat(1, (p - 1) * pn1)))
}

/// `1 + (|supp H| − 1)(p^n − 1)`.
pub fn support_bound(h: &Filter1D, sys: &CosetSystem) -> usize {
    let nonzero = h.iter().filter(|(l, v)| *l != 0 && !v.is_zero()).count();
    1 + nonzero * (sys.q() - 1)
}
