//! Comparisons against independent reference computations.

use harper_core::greenm::{green_entry, m_from_resolvent, m_plus, truncated_resolvent_column};
use harper_core::model::family::HarperFamily;
use harper_core::spectrum::{gauge_to_real, hermitian_eigenvalues, kolmogorov_distance, pooled_eigenvalues, truncate};
use harper_core::{golden_mean, ConstantModel, Coupling, HarperModel, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(rng: &mut ChaCha8Rng) -> HarperModel {
    let l = Coupling::new(rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5)).unwrap();
    HarperModel::new(l, rng.gen_range(0.05..0.95), rng.gen_range(0.0..1.0)).unwrap()
}

fn dense(diag: &[f64], offdiag: &[C64]) -> DMatrix<C64> {
    let n = diag.len();
    let mut h = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for k in 0..n {
        h[(k, k)] = C64::new(diag[k], 0.0);
    }
    for (k, a) in offdiag.iter().enumerate() {
        h[(k, k + 1)] = *a;
        h[(k + 1, k)] = a.conj();
    }
    h
}

#[test]
fn gauged_sturm_matches_dense_hermitian_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let model = random_model(&mut rng);
        let n = rng.gen_range(2..60);
        let op = truncate(&model, n, rng.gen_range(-100..100)).unwrap();
        let ours = hermitian_eigenvalues(&op, 1e-13).unwrap();
        let mut oracle: Vec<f64> = dense(&op.diag, &op.offdiag).symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn gauge_is_a_unitary_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let model = random_model(&mut rng);
    let op = truncate(&model, 12, 3).unwrap();
    let g = gauge_to_real(&op);
    let h = dense(&op.diag, &op.offdiag);
    let hg = dense(&g.operator.diag, &g.operator.offdiag);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(g.phases.clone()));
    let diff = d.adjoint() * h * d - hg;
    assert!(diff.iter().all(|x| x.norm() < 1e-14));
}

#[test]
fn green_entries_match_centered_truncation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let model = random_model(&mut rng);
        let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.5..1.0));
        for col in [-2i64, 0, 1, 3] {
            let column = truncated_resolvent_column(&model, z, -1000, 2001, col).unwrap();
            for row in -3i64..=3 {
                let ours = green_entry(&model, z, row, col, 2000).unwrap();
                let oracle = column[(row + 1000) as usize];
                assert!((ours - oracle).norm() < 1e-8, "G({row},{col}) = {ours} vs {oracle}");
            }
        }
    }
}

#[test]
fn green_entries_match_dense_inverse() {
    let model = HarperModel::new(Coupling::new(0.4, 0.7, 0.2).unwrap(), golden_mean(), 0.35).unwrap();
    let z = C64::new(0.3, 0.6);
    let half = 150i64;
    let op = truncate(&model, (2 * half + 1) as usize, -half).unwrap();
    let mut h = dense(&op.diag, &op.offdiag);
    for k in 0..h.nrows() {
        h[(k, k)] -= z;
    }
    let g = h.try_inverse().unwrap();
    for (n, m) in [(0i64, 0i64), (1, 1), (0, 2), (2, 0), (-1, 1)] {
        let ours = green_entry(&model, z, n, m, 2000).unwrap();
        let oracle = g[((n + half) as usize, (m + half) as usize)];
        assert!((ours - oracle).norm() < 1e-8, "G({n},{m})");
    }
}

#[test]
fn green_diagonal_is_herglotz() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..50 {
        let model = random_model(&mut rng);
        let z = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.1..2.0));
        assert!(green_entry(&model, z, 0, 0, 2000).unwrap().im > 0.0);
    }
}

#[test]
fn m_function_and_resolvent_agree_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..20 {
        let model = random_model(&mut rng);
        let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.5..2.0));
        let a = m_plus(&model, z, 2000, 0).unwrap().value;
        let b = m_from_resolvent(&model, z, 2000).unwrap();
        assert!((a - b).norm() <= 1e-10);
    }
}

#[test]
fn free_dos_approaches_arcsine_law() {
    // integrated density of states of the free chain: 1/2 + asin(E/2)/pi
    let pool = pooled_eigenvalues(&ConstantModel::free(), 2000, 1).unwrap();
    let exact: Vec<f64> = (0..20_000)
        .map(|k| 2.0 * (std::f64::consts::PI * ((k as f64 + 0.5) / 20_000.0 - 0.5)).sin())
        .collect();
    assert!(kolmogorov_distance(&pool, &exact) < 0.005);
}

#[test]
fn dos_converges_weakly_in_section_size() {
    let f = HarperFamily::new(Coupling::new(0.3, 0.5, 0.2).unwrap(), golden_mean()).unwrap();
    let coarse = pooled_eigenvalues(&f, 100, 20).unwrap();
    let fine = pooled_eigenvalues(&f, 800, 20).unwrap();
    let finer = pooled_eigenvalues(&f, 1600, 10).unwrap();
    let d1 = kolmogorov_distance(&coarse, &finer);
    let d2 = kolmogorov_distance(&fine, &finer);
    assert!(d2 < d1 && d2 < 0.01, "{d1} {d2}");
}
