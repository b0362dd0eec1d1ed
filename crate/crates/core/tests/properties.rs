use edgelab::bridge::{smooth_cutoff, smooth_cutoff_derivative, theta_eta, theta_eta_mass, BridgeParams, ObservableX};
use edgelab::ensembles::{
    cumulants, flow_cumulants, flow_trajectory, read_container, sample_replicate, write_container, EnsembleSpec, EntryLaw,
};
use edgelab::flow_lab::{all_perms, Perm, WeingartenTable};
use edgelab::fredholm::{grid, DistributionCurve, Provenance};
use edgelab::harness::{edge_rescale, empirical_cdf, ks_distance, EdgeMode};
use edgelab::kernels::{hermite_phi, hermite_table, KernelOperator};
use edgelab::linalg::{eigh, max_residual, orthonormality_defect, Beta, HermitianMatrix};
use edgelab::spectral::{classical_location, eigen_decompose, m_sc, ward_sides, SpectralDomain, SpectralSample};
use num_complex::Complex64;
use proptest::prelude::*;

fn law() -> impl Strategy<Value = EntryLaw> {
    prop_oneof![
        Just(EntryLaw::gaussian()),
        Just(EntryLaw::rademacher()),
        Just(EntryLaw::uniform()),
        (0.05f64..0.95).prop_map(|p| EntryLaw::shifted_bernoulli(p).unwrap()),
    ]
}

fn beta() -> impl Strategy<Value = Beta> {
    prop_oneof![Just(Beta::Real), Just(Beta::Complex)]
}

fn upper_half_plane() -> impl Strategy<Value = Complex64> {
    (-6.0f64..6.0, 1e-4f64..10.0).prop_map(|(e, eta)| Complex64::new(e, eta))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m_sc_solves_self_consistent_equation(z in upper_half_plane()) {
        let m = m_sc(z).unwrap();
        prop_assert!(m.im > 0.0);
        prop_assert!((m * m + z * m + 1.0).norm() <= 1e-12 * (1.0 + z.norm()));
        prop_assert!(m.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn samples_are_exactly_hermitian_and_reproducible(
        law in law(), b in beta(), n in 2usize..24, seed in any::<u64>(), r in 0u64..4,
    ) {
        let spec = EnsembleSpec::new(b, n, law).unwrap();
        let h = sample_replicate(&spec, seed, r).unwrap();
        prop_assert!(h.is_exactly_hermitian());
        prop_assert_eq!(h.max_abs_diff(&sample_replicate(&spec, seed, r).unwrap()), 0.0);
        let mut buf = Vec::new();
        write_container(&mut buf, &h).unwrap();
        prop_assert_eq!(read_container(&buf[..]).unwrap().max_abs_diff(&h), 0.0);
    }

    #[test]
    fn eigendecomposition_reconstructs(law in law(), b in beta(), n in 2usize..30, seed in any::<u64>()) {
        let h = sample_replicate(&EnsembleSpec::new(b, n, law).unwrap(), seed, 0).unwrap();
        let scale = h.max_abs();
        let (res, orth, vals) = match &h {
            HermitianMatrix::Real(a) => { let e = eigh(a).unwrap(); (max_residual(a, &e), orthonormality_defect(&e), e.values) }
            HermitianMatrix::Complex(a) => { let e = eigh(a).unwrap(); (max_residual(a, &e), orthonormality_defect(&e), e.values) }
        };
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(res <= 1e-10 * scale * n as f64);
        prop_assert!(orth <= 1e-10);
    }

    #[test]
    fn flow_is_reproducible_and_ends_near_gaussian(law in law(), b in beta(), seed in any::<u64>(), t in 0.0f64..20.0) {
        let spec = EnsembleSpec::new(b, 12, law).unwrap();
        let p = flow_trajectory(&spec, seed, seed ^ 0x5a5a, 1).unwrap();
        let q = flow_trajectory(&spec, seed, seed ^ 0x5a5a, 1).unwrap();
        let (ht, ht2) = (p.at(t).unwrap(), q.at(t).unwrap());
        prop_assert_eq!(ht.max_abs_diff(&ht2), 0.0);
        prop_assert!(ht.is_exactly_hermitian());
        // ||H(t) - G|| <= e^{-t/2} ||H0|| + (1 - sqrt(1 - e^{-t})) ||G|| entrywise
        let bound = (-t / 2.0).exp() * p.h0.max_abs() + (1.0 - (1.0 - (-t).exp()).sqrt()) * p.g.max_abs();
        prop_assert!(ht.max_abs_diff(&p.g) <= bound * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn flow_cumulants_scale_with_order(law in law(), t in 0.0f64..10.0) {
        let c0 = cumulants(&law, Beta::Real, 6).unwrap();
        let ct = flow_cumulants(&c0, t).unwrap();
        prop_assert_eq!(ct.real(1).unwrap(), 0.0);
        prop_assert!((ct.real(2).unwrap() - 1.0).abs() < 1e-12);
        for k in 3..=6u32 {
            let want = (-(k as f64) * t / 2.0).exp() * c0.real(k).unwrap();
            prop_assert!((ct.real(k).unwrap() - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn theta_eta_is_even_and_its_mass_adds(x in -5.0f64..5.0, a in -3.0f64..3.0, w1 in 0.0f64..2.0, w2 in 0.0f64..2.0, eta in 1e-4f64..1.0) {
        prop_assert_eq!(theta_eta(x, eta), theta_eta(-x, eta));
        prop_assert!(theta_eta(x, eta) > 0.0);
        let (b, c) = (a + w1, a + w1 + w2);
        let lhs = theta_eta_mass(a, c, eta);
        prop_assert!((lhs - theta_eta_mass(a, b, eta) - theta_eta_mass(b, c, eta)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&lhs));
    }

    #[test]
    fn observable_x_is_additive_and_nonnegative(
        eigs in prop::collection::vec(1.9f64..2.1, 1..40), k1 in -0.02f64..0.0, w1 in 0.0f64..0.02, w2 in 0.0f64..0.02, eta in 1e-4f64..1e-2,
    ) {
        let s = SpectralSample::from_eigenvalues(eigs);
        let x = |a: f64, b: f64| ObservableX { kappa1: a, kappa2: b, eta }.value(&s);
        let (k2, k3) = (k1 + w1, k1 + w1 + w2);
        prop_assert!(x(k1, k3) >= 0.0);
        prop_assert!((x(k1, k3) - x(k1, k2) - x(k2, k3)).abs() < 1e-9);
    }

    #[test]
    fn smooth_cutoff_shape(x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let f = smooth_cutoff(x);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert_eq!(f, smooth_cutoff(-x));
        if x.abs() <= 1.0 / 9.0 { prop_assert_eq!(f, 1.0); }
        if x.abs() >= 2.0 / 9.0 { prop_assert_eq!(f, 0.0); }
        if x.abs() <= y.abs() { prop_assert!(smooth_cutoff(y) <= f); }
        prop_assert!(smooth_cutoff_derivative(x) * x <= 0.0);
    }

    #[test]
    fn bridge_ladder_is_ordered(n in 100usize..100_000, eps in 0.02f64..0.3) {
        if let Ok(p) = BridgeParams::new(n, eps, 2.0) {
            let g = (n as f64).powf(eps / 2.0);
            prop_assert!(p.eta >= g / n as f64);
            prop_assert!(p.l1 >= g * p.eta && p.l >= g * p.l1 && p.e_l - p.e >= g * p.l);
            prop_assert!((p.mollifier_error_term() - (n as f64).powf(-eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_group_laws(n in 1usize..6, i in 0usize..120, j in 0usize..120) {
        let perms = all_perms(n);
        let (a, b) = (&perms[i % perms.len()], &perms[j % perms.len()]);
        prop_assert_eq!(a.compose(&a.inverse()), Perm::identity(n));
        let ab = a.compose(b);
        prop_assert_eq!(ab.inverse(), b.inverse().compose(&a.inverse()));
        // cycle count is a class function
        prop_assert_eq!(b.compose(a).compose(&b.inverse()).cycle_count(), a.cycle_count());
        prop_assert_eq!(Perm::parse_cycles(&a.to_cycle_string(), n).unwrap(), a.clone());
    }

    #[test]
    fn weingarten_inverts_the_gram_matrix(n in 1usize..5, extra in 0usize..20) {
        let t = WeingartenTable::new(n, n + extra).unwrap();
        prop_assert!(t.orthogonality_residual() <= 1e-10);
        // Wg is a class function
        for p in all_perms(n) {
            let c = all_perms(n).last().unwrap().clone();
            let conj = c.compose(&p).compose(&c.inverse());
            prop_assert!((t.get(&p).unwrap() - t.get(&conj).unwrap()).abs() <= 1e-12 * t.get(&p).unwrap().abs().max(1e-300));
        }
    }

    #[test]
    fn empirical_cdf_is_a_cdf(values in prop::collection::vec(-8.0f64..6.0, 1..200)) {
        let g = grid(-6.0, 4.0, 0.1).unwrap();
        let (c, clamp) = empirical_cdf(&values, &g, Beta::Complex).unwrap();
        prop_assert!(c.cdf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*c.cdf.last().unwrap(), 1.0);
        let below = values.iter().filter(|&&v| v < -6.0).count();
        prop_assert_eq!(clamp.below, below);
        for (r, f) in c.grid.iter().zip(&c.cdf) {
            let want = values.iter().filter(|&&v| v.max(-6.0).min(4.0) <= *r).count() as f64 / values.len() as f64;
            prop_assert!((f - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ks_is_symmetric_and_bounded(a in prop::collection::vec(-6.0f64..4.0, 1..100), b in prop::collection::vec(-6.0f64..4.0, 1..100), r0 in -5.0f64..3.0) {
        let g = grid(-6.0, 4.0, 0.1).unwrap();
        let (ca, _) = empirical_cdf(&a, &g, Beta::Real).unwrap();
        let (cb, _) = empirical_cdf(&b, &g, Beta::Real).unwrap();
        let d = ks_distance(&ca, &cb, r0).unwrap();
        prop_assert_eq!(d, ks_distance(&cb, &ca, r0).unwrap());
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_distance(&ca, &ca, r0).unwrap(), 0.0);
        let flat = DistributionCurve::new(g.clone(), vec![0.5; g.len()], Provenance::FredholmAiry, Beta::Real).unwrap();
        prop_assert!(ks_distance(&ca, &flat, r0).unwrap() <= 0.5);
    }

    #[test]
    fn edge_rescale_is_affine_and_monotone(l1 in 1.5f64..2.5, l2 in 1.5f64..2.5, n in 2usize..5000) {
        let f = |l| edge_rescale(l, n, Beta::Complex, EdgeMode::Standard).unwrap();
        prop_assert_eq!(f(2.0), 0.0);
        prop_assert!((f(l1) - (n as f64).powf(2.0 / 3.0) * (l1 - 2.0)).abs() < 1e-9);
        if l1 < l2 { prop_assert!(f(l1) < f(l2)); }
        let g = |l| edge_rescale(l, n, Beta::Real, EdgeMode::GoeRefined).unwrap();
        if l1 < l2 { prop_assert!(g(l1) < g(l2)); }
        prop_assert!(edge_rescale(l1, n, Beta::Complex, EdgeMode::GoeRefined).is_err());
    }

    #[test]
    fn kernels_are_symmetric(x in -8.0f64..8.0, y in -8.0f64..8.0, n in 1usize..120) {
        for k in [KernelOperator::Hermite { n }, KernelOperator::Rescaled { n }, KernelOperator::Edge { n }, KernelOperator::Airy] {
            let (a, b) = (k.eval(x, y).unwrap(), k.eval(y, x).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{:?}: {} vs {}", k, a, b);
            prop_assert!(k.eval(x, x).unwrap().is_finite());
        }
    }

    #[test]
    fn hermite_recurrence(k in 1usize..300, x in -40.0f64..40.0) {
        let t = hermite_table(k + 1, x);
        let rhs = (x * t[k] - (k as f64).sqrt() * t[k - 1]) / ((k + 1) as f64).sqrt();
        prop_assert!((t[k + 1] - rhs).abs() <= 1e-12 * (1.0 + t[k].abs() + t[k - 1].abs()));
        prop_assert!((t[k] - hermite_phi(k, x)).abs() <= 1e-14);
    }

    #[test]
    fn classical_locations_increase(n in 2usize..3000, j in 1usize..3000) {
        let j = 1 + j % n;
        let g = classical_location(j, n).unwrap();
        prop_assert!((-2.0..=2.0).contains(&g));
        if j < n { prop_assert!(g < classical_location(j + 1, n).unwrap()); }
    }

    #[test]
    fn ward_identity_and_counting(b in beta(), n in 2usize..40, seed in any::<u64>(), z in upper_half_plane(), e1 in -3.0f64..3.0, w in 0.0f64..3.0) {
        let h = sample_replicate(&EnsembleSpec::gaussian(b, n).unwrap(), seed, 0).unwrap();
        let s = eigen_decompose(&h, true).unwrap();
        let (lhs, rhs) = ward_sides(&s, z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-300));
        let e2 = e1 + w + 1e-9;
        let c = s.counting(e1, e2).unwrap();
        prop_assert_eq!(c, s.eigenvalues.iter().filter(|&&l| l >= e1 && l <= e2).count());
        prop_assert_eq!(s.counting_above(e1), s.eigenvalues.iter().filter(|&&l| l >= e1).count());
    }

    #[test]
    fn domains_are_nested(e in -6.0f64..6.0, eta in 1e-6f64..11.0, n in 10usize..100_000, eps in 0.01f64..0.3, c0 in 0.1f64..5.0) {
        let z = Complex64::new(e, eta);
        if SpectralDomain::edge(eps, c0).contains(z, n) { prop_assert!(SpectralDomain::s(eps).contains(z, n)); }
        if SpectralDomain::s(eps).contains(z, n) { prop_assert!(SpectralDomain::s0().contains(z, n)); }
    }
}
