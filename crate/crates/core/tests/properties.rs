//! Property tests over randomly generated filters and banks.

mod common;

use proptest::prelude::*;
use rand::Rng;

use pcswave::arith::{int, rat, Rational};
use pcswave::cosetsum::{coset_sum_mask_eval, prime_coset_sum, support_bound};
use pcswave::filterbank::{verify_combined_biorthogonality, WaveletFilterBank};
use pcswave::filters::{Filter1D, FilterND};
use pcswave::lattice::{Convention, CosetSystem};
use pcswave::polyphase::{coset_sum_polyphase, polyphase_decompose, polyphase_recompose, Side};
use pcswave::transform::{decompose_direct, decompose_fast, reconstruct_fast, Tensor};

use common::*;

const MAX_ORDER: u32 = 10;

fn setup() -> impl Strategy<Value = (u64, i64, usize)> {
    (any::<u64>(), prop::sample::select(vec![2i64, 3, 5]), 1usize..=3)
        .prop_map(|(seed, p, n)| (seed, p, if p == 5 { n.min(2) } else { n }))
}

fn any_lowpass(rng: &mut rand_chacha::ChaCha8Rng, p: i64) -> Filter1D {
    match rng.gen_range(0..4) {
        0 => random_interpolatory(rng, p),
        1 => {
            let m = rng.gen_range(2..=3);
            random_interpolatory_with_accuracy(rng, p, m)
        }
        2 => random_with_accuracy(rng, p),
        _ => random_lowpass(rng, p),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn biorthogonality_is_symmetric((seed, p, n) in setup()) {
        let mut r = rng(seed);
        let sys = CosetSystem::new(p, n, random_convention(&mut r, p)).unwrap();
        let a = prime_coset_sum(&any_lowpass(&mut r, p), &sys).unwrap();
        let b = prime_coset_sum(&any_lowpass(&mut r, p), &sys).unwrap();
        prop_assert_eq!(a.is_biorthogonal(&b).unwrap(), b.is_biorthogonal(&a).unwrap());
    }

    /// `1 − R(ξ) = Σ_{j≠0} R(ξ + 2πj/p)` for interpolatory R, so flatness is at
    /// least the accuracy; the terms coincide up to conjugation only when p = 2.
    #[test]
    fn interpolatory_flatness_bounds_accuracy(seed in any::<u64>(), p in prop::sample::select(vec![2i64, 3, 5]), m in 1usize..=3) {
        let mut r = rng(seed);
        let h = random_interpolatory_with_accuracy(&mut r, p, m);
        let d = h.as_nd().diagnostics(MAX_ORDER);
        prop_assert!(d.is_interpolatory);
        prop_assert!(d.accuracy as usize >= m);
        prop_assert!(d.flatness >= d.accuracy);
        if p == 2 {
            prop_assert_eq!(d.accuracy, d.flatness);
        }
    }

    #[test]
    fn wavelet_masks_are_the_highpass_filters(seed in any::<u64>(), p in prop::sample::select(vec![2i64, 3, 5])) {
        let mut r = rng(seed);
        let f = random_lowpass(&mut r, p);
        let shifted = f.as_nd().sub(&FilterND::delta(p, pcswave::MultiIndex(vec![r.gen_range(-3..=3)]), int(p)));
        let df = f.as_nd().diagnostics(MAX_ORDER);
        let ds = shifted.diagnostics(MAX_ORDER);
        prop_assert!(!df.is_wavelet_mask());
        prop_assert!(shifted.is_zero() || ds.is_wavelet_mask());
        prop_assert_eq!(ds.is_wavelet_mask(), shifted.is_highpass());
    }

    #[test]
    fn coset_sum_preserves_structure((seed, p, n) in setup()) {
        let mut r = rng(seed);
        let sys = CosetSystem::new(p, n, random_convention(&mut r, p)).unwrap();
        let h = any_lowpass(&mut r, p);
        let c = prime_coset_sum(&h, &sys).unwrap();
        prop_assert!(c.is_lowpass());
        prop_assert_eq!(c.tap_sum(), int(sys.q() as i64));
        prop_assert!(c.support_size() <= support_bound(&h, &sys));
        if h.as_nd().is_interpolatory() {
            prop_assert!(c.is_interpolatory());
        }
        let d1 = h.as_nd().diagnostics(MAX_ORDER);
        let dn = c.diagnostics(MAX_ORDER);
        prop_assert!(dn.accuracy >= d1.accuracy.min(d1.flatness));
        prop_assert!(dn.flatness >= d1.flatness);
    }

    #[test]
    fn mask_values_agree_between_routes((seed, p, n) in setup()) {
        let mut r = rng(seed);
        let sys = CosetSystem::new(p, n, random_convention(&mut r, p)).unwrap();
        let h = any_lowpass(&mut r, p);
        let c = prime_coset_sum(&h, &sys).unwrap();
        for g in sys.frequencies() {
            prop_assert_eq!(coset_sum_mask_eval(&h, &sys, &g).unwrap(), c.mask_eval(&g));
        }
    }

    #[test]
    fn polyphase_round_trip_and_closed_form((seed, p, n) in setup()) {
        let mut r = rng(seed);
        let sys = CosetSystem::new(p, n, random_convention(&mut r, p)).unwrap();
        let h = any_lowpass(&mut r, p);
        let c = prime_coset_sum(&h, &sys).unwrap();
        let parts = polyphase_decompose(&c, &sys, Side::Synthesis).unwrap();
        prop_assert_eq!(&polyphase_recompose(&parts, &sys), &c);
        for (nu, part) in sys.gamma_prime().iter().zip(&parts[1..]) {
            prop_assert_eq!(&coset_sum_polyphase(&h, &sys, nu).unwrap(), part);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_banks_reconstruct_perfectly(seed in any::<u64>(), p in prop::sample::select(vec![2i64, 3]), n in 1usize..=2) {
        let mut r = rng(seed);
        let h = random_interpolatory(&mut r, p);
        let g = random_lowpass(&mut r, p);
        let conv = random_convention(&mut r, p);
        let bank = WaveletFilterBank::build_pcs_bank(&g, &h, n, conv).unwrap();
        prop_assert!(verify_combined_biorthogonality(&bank).passed);
        let len = (p * p) as usize;
        let y = Tensor::<Rational>::from_fn(vec![len; n], |_| random_rat(&mut r));
        let fast = decompose_fast(&y, &bank, 2).unwrap();
        prop_assert_eq!(&fast, &decompose_direct(&y, &bank, 2).unwrap());
        prop_assert_eq!(reconstruct_fast(&fast, &bank).unwrap(), y);
    }
}

/// The centered pair stays biorthogonal at p = 3 but not at p = 5, where the
/// zero-lag correlation is 17 instead of 25.
#[test]
fn centered_haar_biorthogonality_depends_on_p() {
    let sys3 = CosetSystem::new(3, 2, Convention::Centered).unwrap();
    let h3 = prime_coset_sum(&Filter1D::centered_haar(3), &sys3).unwrap();
    assert!(h3.is_biorthogonal(&h3).unwrap());
    let sys5 = CosetSystem::new(5, 2, Convention::Centered).unwrap();
    let h5 = prime_coset_sum(&Filter1D::centered_haar(5), &sys5).unwrap();
    assert!(!h5.is_biorthogonal(&h5).unwrap());
    let zero_lag: Rational = h5.taps().values().map(|v| v * v).sum();
    assert_eq!(zero_lag, int(17));
}

/// Interpolatory with class moments equal through order 2 but not 3, while
/// every total moment of order 1 to 3 vanishes: accuracy 3, flatness 4.
#[test]
fn interpolatory_flatness_can_exceed_accuracy() {
    let taps = [
        (-5, rat(79, 18)),
        (-2, rat(-233, 18)),
        (-1, rat(-71, 18)),
        (0, int(1)),
        (1, rat(253, 18)),
        (2, rat(253, 18)),
        (4, rat(-9, 2)),
        (5, rat(-245, 18)),
        (8, rat(9, 2)),
    ];
    let h = Filter1D::new(3, taps);
    let d = h.as_nd().diagnostics(MAX_ORDER);
    assert!(d.is_interpolatory && d.is_lowpass);
    assert_eq!((d.accuracy, d.flatness), (3, 4));
    let sys = CosetSystem::new(3, 2, Convention::Centered).unwrap();
    let c = prime_coset_sum(&h, &sys).unwrap().diagnostics(MAX_ORDER);
    assert!(c.accuracy >= 3 && c.flatness >= 4);
}
