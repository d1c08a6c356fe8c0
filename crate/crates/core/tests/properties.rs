//! Invariants of the norms and bounds over random symmetric matrices.

use proptest::prelude::*;
use qforma::bounds::MomentProfile;
use qforma::linalg::{eigen, gen_sparse_member, singular_values, SymmetricMatrix};
use qforma::montecarlo::{analytic_profile, markov_tail_check};
use qforma::{bai_silverstein_bound, corollary1_bound, theorem1_bound, ComponentDistribution, EigenMethod, Matrix};

fn symmetric(max_p: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_p).prop_flat_map(|p| {
        prop::collection::vec(-2.0f64..2.0, p * p)
            .prop_map(move |v| SymmetricMatrix::from_upper_fn(p, |j, k| v[j * p + k]).unwrap())
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn base_terms_dominated_by_frobenius(a in symmetric(16), q in 2.01f64..8.0) {
        let prof = MomentProfile::unit(q).unwrap();
        let b = theorem1_bound(&a, &prof).unwrap();
        let t = b.term_values();
        let f = a.frobenius_norm().powf(q);
        prop_assert!(t[0] + t[1] + t[2] <= 2.0 * f * (1.0 + 1e-12), "{t:?} vs {f}");
    }

    #[test]
    fn bounds_scale_with_q_th_power(a in symmetric(10), c in -3.0f64..3.0, q in 2.5f64..6.0) {
        prop_assume!(c.abs() > 1e-3);
        let prof = MomentProfile::unit(q).unwrap();
        let base = theorem1_bound(&a, &prof).unwrap();
        let scaled = theorem1_bound(&a.scaled(c), &prof).unwrap();
        for (x, y) in base.term_values().iter().zip(scaled.term_values()) {
            prop_assert!(rel_close(x * c.abs().powf(q), y, 1e-9) || (x * c.abs().powf(q) - y).abs() < 1e-12);
        }
        let bs = bai_silverstein_bound(&a, &prof).unwrap();
        let bs_scaled = bai_silverstein_bound(&a.scaled(c), &prof).unwrap();
        prop_assert!(rel_close(bs.structural_total * c.abs().powf(q), bs_scaled.structural_total, 1e-9));
    }

    #[test]
    fn bounds_invariant_under_permutation(a in symmetric(10), seed in any::<u64>()) {
        let p = a.dim();
        let mut perm: Vec<usize> = (0..p).collect();
        // Fisher-Yates with a small LCG
        let mut s = seed;
        for i in (1..p).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = a.permuted(&perm).unwrap();
        let prof = MomentProfile::unit(4.0).unwrap();
        let x = theorem1_bound(&a, &prof).unwrap();
        let y = theorem1_bound(&b, &prof).unwrap();
        for (u, v) in x.term_values().iter().zip(y.term_values()) {
            prop_assert!(rel_close(*u, v, 1e-9) || (u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn schatten_norms_are_ordered(a in symmetric(12)) {
        let s = singular_values(&a).unwrap();
        let ws = [1.0, 2.0, 3.0, 4.0, 8.0];
        let norms: Vec<f64> = ws.iter().map(|&w| s.norm(w)).collect();
        for pair in norms.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
        prop_assert!(s.spectral_norm() <= norms[4] * (1.0 + 1e-12));
        prop_assert!(rel_close(norms[1], a.frobenius_norm(), 1e-10) || a.is_zero());
    }

    #[test]
    fn singular_values_are_absolute_eigenvalues(a in symmetric(12)) {
        let mut ev: Vec<f64> = eigen(&a, false, EigenMethod::Jacobi).unwrap().values.iter().map(|v| v.abs()).collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        let s = singular_values(&a).unwrap().singular_values;
        let scale = a.frobenius_norm().max(1.0);
        for (x, y) in ev.iter().zip(&s) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn eigenvectors_reconstruct(a in symmetric(20)) {
        for method in [EigenMethod::Jacobi, EigenMethod::TridiagonalQl] {
            let e = eigen(&a, true, method).unwrap();
            let back = e.reconstruct_with(|l| l).unwrap();
            let err = back.sub(&a).unwrap().frobenius_norm();
            prop_assert!(err <= 1e-10 * (1.0 + a.frobenius_norm()), "{method:?}: {err}");
        }
    }

    #[test]
    fn generated_members_respect_tracked_bound(p in 2usize..40, r in 0.0f64..0.9, seed in any::<u64>()) {
        let m_p = (p as f64).sqrt().max(1.0);
        let c0 = 1.5;
        let a = gen_sparse_member::<f64>(p, r, m_p, c0, seed).unwrap();
        let q = 4.0;
        let t1 = theorem1_bound(&a, &MomentProfile::unit(q).unwrap()).unwrap();
        let cor = corollary1_bound(p, q, r, m_p, c0).unwrap();
        for name in ["diagonal", "offdiagonal_entries", "offdiagonal_rows", "spectral"] {
            let got = t1.term(name).unwrap();
            let cap = cor.tracked.term(name).unwrap();
            prop_assert!(got <= cap * (1.0 + 1e-9), "{name}: {got} > {cap}");
        }
    }

    #[test]
    fn single_precision_tracks_double(a in symmetric(8)) {
        let prof = MomentProfile::unit(4.0).unwrap();
        let d = theorem1_bound(&a, &prof).unwrap().structural_total;
        let a32 = a.cast::<f32>();
        let prof32 = MomentProfile::<f32>::unit(4.0).unwrap();
        let s = theorem1_bound(&a32, &prof32).unwrap().structural_total as f64;
        prop_assert!(rel_close(d, s, 1e-3) || d < 1e-6);
    }

    #[test]
    fn markov_holds_on_any_sample(
        values in prop::collection::vec(-1e3f64..1e3, 1..200),
        q in 0.5f64..8.0,
        r in 1e-3f64..1e3,
    ) {
        let c = markov_tail_check(&values, q, r).unwrap();
        prop_assert!(c.holds);
    }
}

#[test]
fn gaussian_profile_inflates_bounds() {
    let a = qforma::linalg::gen_uniform_random::<f64>(12, 5).unwrap();
    let unit = theorem1_bound(&a, &MomentProfile::unit(4.0).unwrap()).unwrap();
    let gauss = theorem1_bound(&a, &analytic_profile(&ComponentDistribution::Gaussian, 4.0).unwrap()).unwrap();
    for (u, g) in unit.term_values().iter().zip(gauss.term_values()) {
        assert!(g >= *u);
    }
}
