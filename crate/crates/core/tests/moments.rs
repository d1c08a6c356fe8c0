use proptest::prelude::*;
use qforma::linalg::{gen_uniform_random, SymmetricMatrix};
use qforma::montecarlo::{empirical_moment, empirical_profile, exact_moment_rademacher, QuadformSampler};
use qforma::ComponentDistribution;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // For signs x_j, x^T A x - tr A = sum_{j != k} a_jk x_j x_k, whose
    // second moment is 2 sum_{j != k} a_jk^2.
    #[test]
    fn rademacher_second_moment_closed_form(p in 1usize..9, seed in any::<u64>()) {
        let a = gen_uniform_random::<f64>(p, seed).unwrap();
        let off: f64 = (0..p)
            .flat_map(|j| (0..p).map(move |k| (j, k)))
            .filter(|(j, k)| j != k)
            .map(|(j, k)| a.get(j, k).powi(2))
            .sum();
        let exact = exact_moment_rademacher(&a, 2.0).unwrap();
        prop_assert!((exact - 2.0 * off).abs() <= 1e-12 * (1.0 + off));
    }
}

#[test]
fn fourth_moment_of_a_single_pair() {
    // x^T A x - tr A = 2 a x_1 x_2 is +-2a
    let a = SymmetricMatrix::from_rows(&[vec![0.0, 0.75], vec![0.75, 0.0]]).unwrap();
    assert!((exact_moment_rademacher(&a, 4.0).unwrap() - 1.5f64.powi(4)).abs() < 1e-12);
}

#[test]
fn empirical_agrees_with_enumeration() {
    let a = gen_uniform_random::<f64>(6, 12).unwrap();
    let exact = exact_moment_rademacher(&a, 3.0).unwrap();
    let emp = empirical_moment(&a, &ComponentDistribution::Rademacher, 3.0, 100_000, 4).unwrap();
    assert!((emp.estimate - exact).abs() <= 5.0 * emp.std_error);
}

#[test]
fn heavy_tailed_components_run_at_admissible_df() {
    let a = gen_uniform_random::<f64>(5, 1).unwrap();
    let dist: ComponentDistribution = "student_t(8)".parse().unwrap();
    assert!(empirical_moment(&a, &dist, 4.0, 1000, 0).is_err());
    let dist: ComponentDistribution = "student_t(8.5)".parse().unwrap();
    let m = empirical_moment(&a, &dist, 4.0, 20_000, 0).unwrap();
    assert!(m.estimate.is_finite() && m.estimate > 0.0);
}

#[test]
fn samples_are_reproducible() {
    let a = gen_uniform_random::<f64>(7, 3).unwrap();
    let s = QuadformSampler::new(&a, ComponentDistribution::Gaussian, 5).unwrap();
    let first = s.collect(500);
    let again = QuadformSampler::new(&a, ComponentDistribution::Gaussian, 5).unwrap().collect(500);
    assert_eq!(
        first.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        again.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    let other = QuadformSampler::new(&a, ComponentDistribution::Gaussian, 6).unwrap().collect(500);
    assert_ne!(first, other);
}

#[test]
fn empirical_profile_tracks_analytic_gaussian() {
    let samples: Vec<f64> = {
        let id = qforma::linalg::gen_identity::<f64>(1).unwrap();
        let data = qforma::hyptest::simulate_observations(&id, &ComponentDistribution::Gaussian, 200_000, 3).unwrap();
        data.rows().map(|r| r[0]).collect()
    };
    let emp = empirical_profile(&samples, 4.0).unwrap();
    assert!((emp.kappa4.powi(4) - 3.0).abs() < 0.1);
    assert!((emp.kappa2 - 1.0).abs() < 0.01);
}
