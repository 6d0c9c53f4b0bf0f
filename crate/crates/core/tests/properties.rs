use num_complex::Complex64;
use ostbc_relay::analytic::{ser_exact, MgfTermSum};
use ostbc_relay::capacity::{delta_bar_exact, min_receive_antennas};
use ostbc_relay::montecarlo::{alamouti_encode, select_antennas, ChannelRealization, Modem};
use ostbc_relay::specfun::{bessel_k, hyp_u};
use ostbc_relay::terms::{exact_moment, gsc_pdf, gsc_terms_exact};
use ostbc_relay::{Constellation, SelectionConfig};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = SelectionConfig> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(k, n)| (Just(k), Just(n), 1..=k, 1..=n))
        .prop_map(|(k, n, ks, ns)| SelectionConfig::new(k, n, ks, ns).unwrap())
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_power_identity(a in 1u32..8, x in 1e-3f64..1e3) {
        let u: f64 = hyp_u(a, a as i32 + 1, x).unwrap();
        prop_assert!((u * x.powi(a as i32) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bessel_symmetric_and_recurrent(nu in 0.1f64..6.0, x in 0.05f64..40.0) {
        let k = |v: f64| -> f64 { bessel_k(v, x).unwrap() };
        prop_assert!((k(-nu) / k(nu) - 1.0).abs() < 1e-11);
        let lhs = k(nu + 1.0);
        let rhs = k(nu - 1.0) + 2.0 * nu / x * k(nu);
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-10);
    }

    #[test]
    fn selection_pdf_mass_and_mean_exact(n in 1usize..=12, frac in 0.0f64..1.0) {
        let l = 1 + ((n - 1) as f64 * frac) as usize;
        let terms = gsc_terms_exact(n, l);
        let one = num_rational::BigRational::from_integer(1.into());
        prop_assert_eq!(exact_moment(&terms, 0), one.clone());
        let mut want = one.clone();
        for i in (l + 1)..=n {
            want += num_rational::BigRational::new(1.into(), (i as i64).into());
        }
        want *= num_rational::BigRational::from_integer((l as i64).into());
        prop_assert_eq!(exact_moment(&terms, 1), want);
    }

    #[test]
    fn selection_cdf_is_a_distribution(n in 1usize..=8, frac in 0.0f64..1.0, x in 0.0f64..30.0) {
        let l = 1 + ((n - 1) as f64 * frac) as usize;
        let p = gsc_pdf::<f64>(n, l).unwrap();
        let c = p.cdf(x);
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&c));
        prop_assert!((c + p.survival(x) - 1.0).abs() < 1e-9);
        prop_assert!(p.cdf(x + 0.5) >= c - 1e-9);
    }

    #[test]
    fn mgf_is_decreasing_and_bounded(cfg in config(), s in 0.01f64..20.0) {
        let m = MgfTermSum::<f64>::for_config(&cfg);
        let a = m.eval(s).unwrap();
        let b = m.eval(s * 1.5).unwrap();
        prop_assert!(a > 0.0 && a < 1.0);
        prop_assert!(b < a);
    }

    #[test]
    fn selected_gain_never_exceeds_full(
        h in prop::collection::vec(complex(), 1..6),
        g in prop::collection::vec(complex(), 1..6),
        ks in 1usize..6,
        ns in 1usize..6,
    ) {
        let ks = ks.min(h.len());
        let ns = ns.min(g.len());
        let ch = ChannelRealization { h: h.clone(), g: g.clone() };
        let sel = select_antennas(&ch, ks, ns);
        let full = select_antennas(&ch, h.len(), g.len());
        prop_assert!(sel.theta <= full.theta * (1.0 + 1e-12));
        // The chosen antennas are at least as strong as any other.
        let weakest = sel.tx_indices.iter().map(|&i| h[i].norm_sqr()).fold(f64::INFINITY, f64::min);
        prop_assert!(h.iter().enumerate().all(|(i, v)| sel.tx_indices.contains(&i) || v.norm_sqr() <= weakest));
    }

    #[test]
    fn alamouti_columns_orthogonal(x1 in complex(), x2 in complex()) {
        let c = alamouti_encode(x1, x2);
        let energy = x1.norm_sqr() + x2.norm_sqr();
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|t| c[t][i].conj() * c[t][j]).sum();
                let want = if i == j { energy } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn detection_inverts_noiseless_symbols(bits in 1u32..7, qam in any::<bool>(), idx in 0usize..128, gain in 0.01f64..100.0) {
        let c = if qam && bits % 2 == 0 { Constellation::qam(1 << bits) } else { Constellation::psk(1 << bits) }.unwrap();
        let modem = Modem::new(c);
        let i = idx % modem.order();
        prop_assert_eq!(modem.detect(modem.point(i) * gain, gain), i);
        prop_assert_eq!(modem.bit_errors(i, i), 0);
    }

    #[test]
    fn mean_snr_grows_with_selected_antennas(k in 1usize..8, n in 2usize..12) {
        for ns in 1..n {
            prop_assert!(delta_bar_exact(k, n, ns + 1).unwrap() > delta_bar_exact(k, n, ns).unwrap());
        }
        let ns = min_receive_antennas(k, n).unwrap();
        prop_assert!(ns >= 1 && ns <= n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ser_decreases_with_snr(cfg in config(), db in 0.0f64..25.0, qam in any::<bool>()) {
        let c = if qam { Constellation::qam(16) } else { Constellation::psk(8) }.unwrap();
        let mu = 10f64.powf(db / 10.0);
        let lo: f64 = ser_exact(&c, &cfg, mu, 1.0).unwrap();
        let hi: f64 = ser_exact(&c, &cfg, 2.0 * mu, 1.0).unwrap();
        prop_assert!(hi < lo);
        prop_assert!(lo < 1.0 - 1.0 / f64::from(c.order()));
    }
}
