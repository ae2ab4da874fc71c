use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use gausscb::capacity::{holevo_chi, ModulatedEnsemble};
use gausscb::channels::{apply, compose, tensor_channels, validate_channel};
use gausscb::classify::{classify_with, decompose_incoherent, synthesize_incoherent};
use gausscb::matcore::{hermitian_psd, is_psd, min_eigenvalue, sym_eigen};
use gausscb::phase_space::{entropy, symplectic_eigenvalues, tensor_states, validate_state};
use gausscb::sampling::{sample_channel, sample_state, ChannelKind, Sampler, SamplerConfig, StateKind};
use gausscb::{GaussianState, RealMatrix, SymMatrix};

fn sym(dim: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-3.0f64..3.0, dim * dim).prop_map(move |v| SymMatrix::new(RealMatrix::new(dim, dim, v).unwrap()).unwrap())
}

fn skew(dim: usize) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(-2.0f64..2.0, dim * dim).prop_map(move |v| {
        let g = RealMatrix::new(dim, dim, v).unwrap();
        (&g - &g.transpose()).scale(0.5)
    })
}

fn cfg(seed: u64, n: usize) -> SamplerConfig {
    SamplerConfig::new(seed, n, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstructs(m in (1usize..7).prop_flat_map(sym)) {
        let e = sym_eigen(&m).unwrap();
        let back = e.rebuild(|w| w);
        prop_assert!((back.as_matrix() - m.as_matrix()).max_abs() <= 1e-12 * (1.0 + m.max_abs()));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn hermitian_psd_is_conjugation_symmetric(a in sym(4), b in skew(4), shift in 0.0f64..6.0) {
        let a = a.try_add(&SymMatrix::scaled_identity(4, shift)).unwrap();
        prop_assert_eq!(hermitian_psd(&a, &b, 1e-9).unwrap(), hermitian_psd(&a, &b.scale(-1.0), 1e-9).unwrap());
    }

    #[test]
    fn psd_is_scale_invariant(m in sym(4), c in 0.01f64..100.0) {
        let gram = SymMatrix::new(m.as_matrix() * &m.as_matrix().transpose()).unwrap();
        prop_assert!(is_psd(&gram, 1e-9));
        prop_assert!(is_psd(&gram.scale(c), 1e-9));
        let shifted = m.try_sub(&SymMatrix::scaled_identity(4, 1.0 + m.frobenius_norm())).unwrap();
        prop_assert!(min_eigenvalue(&shifted).unwrap() < 0.0);
        prop_assert!(!is_psd(&shifted.scale(c), 1e-9));
    }

    #[test]
    fn symplectic_spectrum_is_invariant(seed in any::<u64>(), n in 1usize..4) {
        let mut s = Sampler::new(&cfg(seed, n));
        let nu = s.valid_cm(n);
        let moved = nu.congruence(&s.symplectic(n)).unwrap();
        let (a, b) = (symplectic_eigenvalues(&nu).unwrap(), symplectic_eigenvalues(&moved).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x));
            prop_assert!(*x >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>(), n in 1usize..3) {
        let c = cfg(seed, n);
        let [a, b, d] = [0u64, 1, 2].map(|i| sample_channel(&c.fork(i), ChannelKind::Generic));
        let left = compose(&compose(&a, &b).unwrap(), &d).unwrap();
        let right = compose(&a, &compose(&b, &d).unwrap()).unwrap();
        let scale = 1.0 + left.k().max_abs() + left.m().max_abs();
        prop_assert!((left.k() - right.k()).max_abs() <= 1e-12 * scale);
        prop_assert!((left.m().as_matrix() - right.m().as_matrix()).max_abs() <= 1e-12 * scale);
        prop_assert!(validate_channel(&left));
    }

    #[test]
    fn tensor_commutes_with_apply(seed in any::<u64>()) {
        let c1 = sample_channel(&cfg(seed, 1), ChannelKind::Incoherent);
        let c2 = sample_channel(&cfg(seed, 2).fork(1), ChannelKind::Generic);
        let s1 = sample_state(&cfg(seed, 1).fork(2), StateKind::Displaced).unwrap();
        let s2 = sample_state(&cfg(seed, 2).fork(3), StateKind::Generic).unwrap();
        let joint = apply(&tensor_channels(&c1, &c2), &tensor_states(&s1, &s2)).unwrap();
        let parts = tensor_states(&apply(&c1, &s1).unwrap(), &apply(&c2, &s2).unwrap());
        prop_assert_eq!(joint, parts);
    }

    #[test]
    fn chi_is_nonnegative_and_monotone(seed in any::<u64>(), n in 1usize..3, boost in 1.0f64..4.0) {
        let mut s = Sampler::new(&cfg(seed, n));
        let ch = s.channel(ChannelKind::Generic);
        let st = GaussianState::centered(s.valid_cm(n)).unwrap();
        let nu_mod = s.psd(2 * n);
        let small = holevo_chi(&ch, &ModulatedEnsemble::new(st.clone(), nu_mod.clone()).unwrap()).unwrap();
        let large = holevo_chi(&ch, &ModulatedEnsemble::new(st, nu_mod.scale(boost)).unwrap()).unwrap();
        prop_assert!(small >= -1e-12);
        prop_assert!(large >= small - 1e-10);
    }

    #[test]
    fn entropy_is_additive(seed in any::<u64>()) {
        let a = sample_state(&cfg(seed, 1), StateKind::Squeezed).unwrap();
        let b = sample_state(&cfg(seed, 2).fork(1), StateKind::Generic).unwrap();
        let joint = entropy(&tensor_states(&a, &b)).unwrap();
        assert_abs_diff_eq!(joint, entropy(&a).unwrap() + entropy(&b).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn sampler_is_deterministic(seed in any::<u64>(), stream in any::<u64>(), n in 1usize..4) {
        let c = cfg(seed, n).fork(stream);
        for kind in ChannelKind::ALL {
            prop_assert_eq!(sample_channel(&c, kind), sample_channel(&c, kind));
        }
        let s = sample_state(&c, StateKind::Generic).unwrap();
        prop_assert!(validate_state(&s));
        prop_assert_eq!(s, sample_state(&c, StateKind::Generic).unwrap());
    }

    #[test]
    fn incoherent_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let d = Sampler::new(&cfg(seed, n)).incoherent_decomposition();
        let c = synthesize_incoherent(&d).unwrap();
        let got = decompose_incoherent(&c, 1e-9).unwrap();
        prop_assert_eq!(&got.pi, &d.pi);
        let again = synthesize_incoherent(&got).unwrap();
        prop_assert!((again.k() - c.k()).max_abs() <= 1e-12 * (1.0 + c.k().max_abs()));
        prop_assert!((again.m().as_matrix() - c.m().as_matrix()).max_abs() <= 1e-9);
    }

    #[test]
    fn sampled_channels_respect_the_chain(seed in any::<u64>(), n in 1usize..3, pick in 0usize..5) {
        let c = sample_channel(&cfg(seed, n), ChannelKind::ALL[pick]);
        let r = classify_with(&c, 1e-9, 500).unwrap();
        prop_assert!(r.chain_holds(), "{:?}", r.chain_violations);
    }
}
