//! Non-redundant wavelet filter banks: one lowpass and `q − 1` highpass
//! filters per side, built from an interpolatory synthesis lowpass `h` and an
//! arbitrary analysis lowpass `g`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{int, rat};
use crate::cosetsum::{check_generator, prime_coset_sum};
use crate::error::{Error, Result};
use crate::filters::{Filter1D, FilterJson, FilterND, MaskDiagnostics};
use crate::lattice::{Convention, CosetSystem, MultiIndex};
use crate::polyphase::{
    analysis_matrix, bias_poly, polyphase_decompose, synthesis_matrix, LaurentPoly, PolyphaseMatrix, Side,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    General,
    /// Both lowpass filters are prime coset sums of these 1-D generators.
    PrimeCosetSum {
        g: Filter1D,
        h: Filter1D,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveletFilterBank {
    sys: CosetSystem,
    provenance: Provenance,
    tau: FilterND,
    /// Aligned with `sys.gamma_prime()`.
    t: Vec<FilterND>,
    tau_d: FilterND,
    t_d: Vec<FilterND>,
}

fn require_lowpass(f: &FilterND, name: &str) -> Result<()> {
    if !f.is_lowpass() {
        return Err(Error::NotLowpass {
            sum: format!("{} (for {name})", crate::arith::format_rational(&f.tap_sum())),
            expected: f.q().to_string(),
        });
    }
    Ok(())
}

impl WaveletFilterBank {
    /// General construction from lowpass `g` and interpolatory lowpass `h`:
    ///
    /// * `τ^d = h`;
    /// * `t_ν(x) = q·δ_{x,ν} − q·h(ν − x)` for `x ∈ pZ^n`, `q·δ_{x,ν}` elsewhere;
    /// * `t^d_ν(y) = δ_{y,ν} − (1/q) Σ_k g(ν + pk) h(y + pk)`;
    /// * `τ = g + q·conj(B(pω))` with `B = 1/q − Σ_ν G_ν H_ν`.
    pub fn build_general(g: &FilterND, h: &FilterND, sys: &CosetSystem) -> Result<Self> {
        g.check_compatible(h)?;
        if g.p() != sys.p() || g.dim() != sys.n() {
            return Err(Error::DimensionMismatch(format!(
                "filters with (p, n) = ({}, {}) for a coset system with ({}, {})",
                g.p(),
                g.dim(),
                sys.p(),
                sys.n()
            )));
        }
        require_lowpass(g, "g")?;
        require_lowpass(h, "h")?;
        if let Some(e) = h.interpolatory_error("h") {
            return Err(e);
        }
        let p = sys.p();
        let q = sys.q() as i64;
        let n = sys.n();

        let gp = polyphase_decompose(g, sys, Side::Analysis)?;
        let hp = polyphase_decompose(h, sys, Side::Synthesis)?;
        let b = bias_poly(&gp, &hp, sys.q(), n);
        let correction = b.conj().dilate(p).scale(&int(q)).to_filter(p);
        let tau = g.add(&correction);

        let t: Vec<FilterND> = sys
            .gamma_prime()
            .par_iter()
            .map(|nu| {
                let mut f = FilterND::delta(p, nu.clone(), int(q));
                for (y, v) in h.taps() {
                    if (y - nu).is_multiple_of(p) {
                        f.add_tap(nu - y, &(v * int(-q)));
                    }
                }
                f
            })
            .collect();

        let inv_q = rat(1, q);
        let t_d: Vec<FilterND> = sys
            .gamma_prime()
            .par_iter()
            .map(|nu| {
                let mut f = FilterND::delta(p, nu.clone(), int(1));
                for (a, ga) in g.taps() {
                    if !(a - nu).is_multiple_of(p) {
                        continue;
                    }
                    let shift = a - nu;
                    let w = -(ga * &inv_q);
                    for (bb, hb) in h.taps() {
                        f.add_tap(bb - &shift, &(&w * hb));
                    }
                }
                f
            })
            .collect();

        Ok(WaveletFilterBank {
            sys: sys.clone(),
            provenance: Provenance::General,
            tau,
            t,
            tau_d: h.clone(),
            t_d,
        })
    }

    /// Prime coset sum bank: `build_general(C[G], C[H])`, cross-checked
    /// against the closed forms built from the 1-D generators directly.
    pub fn build_pcs_bank(g: &Filter1D, h: &Filter1D, n: usize, convention: Convention) -> Result<Self> {
        if g.p() != h.p() {
            return Err(Error::DimensionMismatch(format!(
                "G has dilation {} but H has dilation {}",
                g.p(),
                h.p()
            )));
        }
        let sys = CosetSystem::new(g.p(), n, convention)?;
        check_generator(g, &sys, "G")?;
        check_generator(h, &sys, "H")?;
        if let Some(e) = h.as_nd().interpolatory_error("H") {
            return Err(e);
        }
        let gn = prime_coset_sum(g, &sys)?;
        let hn = prime_coset_sum(h, &sys)?;
        let mut bank = Self::build_general(&gn, &hn, &sys)?;
        let (t, t_d) = closed_form_wavelets(g, h, &hn, &sys);
        for (i, nu) in sys.gamma_prime().iter().enumerate() {
            if t[i] != bank.t[i] || t_d[i] != bank.t_d[i] {
                return Err(Error::Domain(format!(
                    "closed-form wavelet filters disagree with the general construction at {nu}"
                )));
            }
        }
        bank.provenance = Provenance::PrimeCosetSum {
            g: g.clone(),
            h: h.clone(),
        };
        Ok(bank)
    }

    pub fn sys(&self) -> &CosetSystem {
        &self.sys
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn tau(&self) -> &FilterND {
        &self.tau
    }

    pub fn tau_d(&self) -> &FilterND {
        &self.tau_d
    }

    /// Analysis highpass filters in Γ′ order.
    pub fn t(&self) -> &[FilterND] {
        &self.t
    }

    /// Synthesis highpass filters in Γ′ order.
    pub fn t_d(&self) -> &[FilterND] {
        &self.t_d
    }

    pub fn t_at(&self, nu: &MultiIndex) -> Option<&FilterND> {
        self.sys.index_of(nu).filter(|&i| i > 0).map(|i| &self.t[i - 1])
    }

    pub fn t_d_at(&self, nu: &MultiIndex) -> Option<&FilterND> {
        self.sys.index_of(nu).filter(|&i| i > 0).map(|i| &self.t_d[i - 1])
    }

    /// `[τ, t_ν…]`, the rows of the analysis polyphase matrix.
    pub fn analysis_filters(&self) -> Vec<&FilterND> {
        std::iter::once(&self.tau).chain(self.t.iter()).collect()
    }

    /// `[τ^d, t^d_ν…]`, the columns of the synthesis polyphase matrix.
    pub fn synthesis_filters(&self) -> Vec<&FilterND> {
        std::iter::once(&self.tau_d).chain(self.t_d.iter()).collect()
    }

    /// Replaces one materialized filter, for corruption tests and tooling.
    pub fn with_filter(mut self, which: FilterId, f: FilterND) -> Self {
        match which {
            FilterId::Tau => self.tau = f,
            FilterId::TauD => self.tau_d = f,
            FilterId::T(i) => self.t[i] = f,
            FilterId::TD(i) => self.t_d[i] = f,
        }
        self
    }

    /// Filters whose stored taps differ from a fresh construction out of the
    /// generators. Empty for general banks.
    pub fn rederive_mismatches(&self) -> Result<Vec<String>> {
        let (g, h) = match &self.provenance {
            Provenance::General => return Ok(Vec::new()),
            Provenance::PrimeCosetSum { g, h } => (g, h),
        };
        let fresh = Self::build_pcs_bank(g, h, self.sys.n(), self.sys.convention())?;
        let mut out = Vec::new();
        let names = self.filter_names();
        let ours = self.analysis_filters().into_iter().chain(self.synthesis_filters());
        let theirs = fresh.analysis_filters().into_iter().chain(fresh.synthesis_filters());
        for ((name, a), b) in names.iter().zip(ours).zip(theirs) {
            if a != b {
                out.push(name.clone());
            }
        }
        Ok(out)
    }

    /// Labels in the order analysis filters then synthesis filters.
    pub fn filter_names(&self) -> Vec<String> {
        let mut names = vec!["tau".to_string()];
        names.extend(self.sys.gamma_prime().iter().map(|nu| format!("t[{nu}]")));
        names.push("tau_d".into());
        names.extend(self.sys.gamma_prime().iter().map(|nu| format!("t_d[{nu}]")));
        names
    }

    pub fn to_json(&self) -> BankJson {
        let key = |nu: &MultiIndex| nu.to_string();
        let (g, h) = match &self.provenance {
            Provenance::General => (None, None),
            Provenance::PrimeCosetSum { g, h } => (Some(g.as_nd().to_json()), Some(h.as_nd().to_json())),
        };
        BankJson {
            p: self.sys.p(),
            dim: self.sys.n(),
            convention: self.sys.convention(),
            g,
            h,
            filters: BankFilters {
                tau: self.tau.to_json(),
                tau_d: self.tau_d.to_json(),
                t: self
                    .sys
                    .gamma_prime()
                    .iter()
                    .zip(&self.t)
                    .map(|(nu, f)| (key(nu), f.to_json()))
                    .collect(),
                t_d: self
                    .sys
                    .gamma_prime()
                    .iter()
                    .zip(&self.t_d)
                    .map(|(nu, f)| (key(nu), f.to_json()))
                    .collect(),
            },
        }
    }

    /// Loads materialized filters as stored; see [`Self::rederive_mismatches`]
    /// for the consistency check against the generators.
    pub fn from_json(j: &BankJson) -> Result<Self> {
        let sys = CosetSystem::new(j.p, j.dim, j.convention)?;
        let load = |f: &FilterJson, name: &str| -> Result<FilterND> {
            let f = FilterND::from_json(f)?;
            if f.p() != sys.p() || f.dim() != sys.n() {
                return Err(Error::Parse(format!(
                    "filter {name} has (p, dim) = ({}, {}), bank has ({}, {})",
                    f.p(),
                    f.dim(),
                    sys.p(),
                    sys.n()
                )));
            }
            Ok(f)
        };
        let family = |m: &BTreeMap<String, FilterJson>, name: &str| -> Result<Vec<FilterND>> {
            if m.len() != sys.q() - 1 {
                return Err(Error::Parse(format!(
                    "{name} has {} entries, expected {}",
                    m.len(),
                    sys.q() - 1
                )));
            }
            sys.gamma_prime()
                .iter()
                .map(|nu| {
                    let k = nu.to_string();
                    m.get(&k)
                        .ok_or_else(|| Error::Parse(format!("{name} has no entry for {k}")))
                        .and_then(|f| load(f, &format!("{name}[{k}]")))
                })
                .collect()
        };
        let provenance = match (&j.g, &j.h) {
            (Some(g), Some(h)) => Provenance::PrimeCosetSum {
                g: Filter1D::from_nd(FilterND::from_json(g)?)?,
                h: Filter1D::from_nd(FilterND::from_json(h)?)?,
            },
            (None, None) => Provenance::General,
            _ => return Err(Error::Parse("bank must list both G and H or neither".into())),
        };
        Ok(WaveletFilterBank {
            tau: load(&j.filters.tau, "tau")?,
            tau_d: load(&j.filters.tau_d, "tau_d")?,
            t: family(&j.filters.t, "t")?,
            t_d: family(&j.filters.t_d, "t_d")?,
            provenance,
            sys,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let j: BankJson = serde_json::from_str(text)?;
        Self::from_json(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("bank JSON serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterId {
    Tau,
    TauD,
    /// Index into Γ′.
    T(usize),
    TD(usize),
}

/// Closed forms of the wavelet filters from the 1-D generators:
///
/// * `t_ν(x) = q·δ_{x,ν} − (q/(p−1)) Σ_{m≢0} H(m)·δ_{x, ν − m·η(m,ν)}`;
/// * `t^d_ν(x) = δ_{x,ν} − (1/(q(p−1))) Σ_{m≢0} G(m)·h(x − ν + m·η(m,ν))`.
pub fn closed_form_wavelets(
    g: &Filter1D,
    h: &Filter1D,
    hn: &FilterND,
    sys: &CosetSystem,
) -> (Vec<FilterND>, Vec<FilterND>) {
    let p = sys.p();
    let q = sys.q() as i64;
    let pairs: Vec<(FilterND, FilterND)> = sys
        .gamma_prime()
        .par_iter()
        .enumerate()
        .map(|(i, nu)| {
            let pos = i + 1;
            let mut t = FilterND::delta(p, nu.clone(), int(q));
            let wt = rat(-q, p - 1);
            for (m, v) in h.iter() {
                if m.rem_euclid(p) != 0 {
                    let eta = &sys.gamma()[sys.eta_position(m, pos)];
                    t.add_tap(nu - &eta.scale(m), &(v * &wt));
                }
            }
            let mut td = FilterND::delta(p, nu.clone(), int(1));
            let wd = rat(-1, q * (p - 1));
            for (m, v) in g.iter() {
                if m.rem_euclid(p) != 0 {
                    let eta = &sys.gamma()[sys.eta_position(m, pos)];
                    let shift = &eta.scale(m) - nu;
                    let c = v * &wd;
                    for (y, hv) in hn.taps() {
                        td.add_tap(y - &shift, &(&c * hv));
                    }
                }
            }
            (t, td)
        })
        .collect();
    pairs.into_iter().unzip()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankFilters {
    pub tau: FilterJson,
    pub tau_d: FilterJson,
    pub t: BTreeMap<String, FilterJson>,
    pub t_d: BTreeMap<String, FilterJson>,
}

/// `{"p", "dim", "convention", "G", "H", "filters": {"tau", "tau_d", "t", "t_d"}}`;
/// `G` and `H` are null for general banks, `t` and `t_d` are keyed by `"a,b"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankJson {
    pub p: i64,
    pub dim: usize,
    pub convention: Convention,
    #[serde(rename = "G")]
    pub g: Option<FilterJson>,
    #[serde(rename = "H")]
    pub h: Option<FilterJson>,
    pub filters: BankFilters,
}

/// One nonzero entry of `S·A − (1/q)I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualEntry {
    pub row: String,
    pub col: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiorthogonalityReport {
    pub passed: bool,
    pub q: usize,
    pub residuals: Vec<ResidualEntry>,
}

/// The polyphase matrices of a bank: rows of `A` from the analysis filters,
/// columns of `S` from the synthesis filters.
pub fn bank_matrices(bank: &WaveletFilterBank) -> Result<(PolyphaseMatrix, PolyphaseMatrix)> {
    let a = analysis_matrix(&bank.analysis_filters(), &bank.sys)?;
    let s = synthesis_matrix(&bank.synthesis_filters(), &bank.sys)?;
    Ok((a, s))
}

/// Exact check of `S·A = (1/q)·I` with every failing entry located by its
/// pair of coset representatives.
pub fn verify_combined_biorthogonality(bank: &WaveletFilterBank) -> BiorthogonalityReport {
    let q = bank.sys.q();
    let residuals = match bank_matrices(bank).and_then(|(a, s)| s.mul(&a)) {
        Ok(prod) => prod
            .identity_residuals(&rat(1, q as i64))
            .into_iter()
            .map(|(i, j, r): (usize, usize, LaurentPoly)| ResidualEntry {
                row: bank.sys.gamma()[i].to_string(),
                col: bank.sys.gamma()[j].to_string(),
                residual: r.to_string(),
            })
            .collect(),
        Err(e) => vec![ResidualEntry {
            row: "-".into(),
            col: "-".into(),
            residual: e.to_string(),
        }],
    };
    BiorthogonalityReport {
        passed: residuals.is_empty(),
        q,
        residuals,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub name: String,
    pub diagnostics: MaskDiagnostics,
}

/// Orders that feed the guaranteed floor: accuracy of the synthesis lowpass,
/// accuracy and flatness of the analysis lowpass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GuaranteeInputs {
    pub alpha1: u32,
    pub alpha2: u32,
    pub alpha3: u32,
}

impl GuaranteeInputs {
    pub fn floor(&self) -> u32 {
        self.alpha1.min(self.alpha2).min(self.alpha3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BankReport {
    pub filters: Vec<FilterReport>,
    pub guarantee: GuaranteeInputs,
    pub floor: u32,
    pub violations: Vec<String>,
}

impl BankReport {
    pub fn get(&self, name: &str) -> Option<&MaskDiagnostics> {
        self.filters.iter().find(|f| f.name == name).map(|f| &f.diagnostics)
    }
}

/// Diagnostics for all `2q` filters plus the guaranteed floor
/// `min{α1, α2, α3}`. For prime coset sum banks the inputs come from the 1-D
/// generators, otherwise from the materialized lowpass pair `(τ^d, τ)`.
pub fn bank_report(bank: &WaveletFilterBank, max_order: u32) -> BankReport {
    let names = bank.filter_names();
    let all: Vec<&FilterND> = bank
        .analysis_filters()
        .into_iter()
        .chain(bank.synthesis_filters())
        .collect();
    let filters: Vec<FilterReport> = names
        .into_par_iter()
        .zip(all.into_par_iter())
        .map(|(name, f)| FilterReport {
            name,
            diagnostics: f.diagnostics(max_order),
        })
        .collect();

    let guarantee = match &bank.provenance {
        Provenance::PrimeCosetSum { g, h } => {
            let dg = g.as_nd().diagnostics(max_order);
            GuaranteeInputs {
                alpha1: h.as_nd().diagnostics(max_order).accuracy,
                alpha2: dg.accuracy,
                alpha3: dg.flatness,
            }
        }
        Provenance::General => {
            let dg = bank.tau.diagnostics(max_order);
            GuaranteeInputs {
                alpha1: bank.tau_d.diagnostics(max_order).accuracy,
                alpha2: dg.accuracy,
                alpha3: dg.flatness,
            }
        }
    };
    let floor = guarantee.floor();
    let mut violations = Vec::new();
    for fr in &filters {
        let d = &fr.diagnostics;
        let short = if fr.name == "tau" {
            d.accuracy < floor
        } else if fr.name.starts_with("t[") || fr.name.starts_with("t_d[") {
            d.vanishing_moments < floor
        } else {
            false
        };
        if short {
            violations.push(format!("{} is below the guaranteed order {floor}", fr.name));
        }
    }
    BankReport {
        filters,
        guarantee,
        floor,
        violations,
    }
}

/// `Σ_b g(x + b) h(b)` restricted to `x ∈ pZ^n`; used by tests as an
/// independent route to the lowpass correction.
pub fn lattice_correlation(g: &FilterND, h: &FilterND) -> FilterND {
    let p = g.p();
    let mut out = FilterND::zero(p, g.dim());
    for (a, ga) in g.taps() {
        for (b, hb) in h.taps() {
            let x = a - b;
            if x.is_multiple_of(p) {
                out.add_tap(x, &(ga * hb));
            }
        }
    }
    out
}
