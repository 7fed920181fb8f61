//! Cross-checks of the structured operator and the analytic spectrum against
//! dense diagonalization.

use adiabatic_search::spectrum::reduced_eigenvectors;
use adiabatic_search::{
    apply_hamiltonian, coupling_matrix_element, dense_matrix, eigenvalues, gap,
    make_uniform_state, reduced_block, QuantumState, SearchHamiltonian,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &idx.iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

fn dense_apply(m: &DMatrix<f64>, psi: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| psi[j] * m[(i, j)]).sum())
        .collect()
}

fn normalized(raw: Vec<(f64, f64)>) -> QuantumState {
    let v: Vec<Complex64> = raw.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    QuantumState::from_raw(v.into_iter().map(|z| z / norm).collect())
}

fn state_strategy() -> impl Strategy<Value = (usize, usize, QuantumState)> {
    prop::sample::select(vec![2usize, 4, 8, 16, 64]).prop_flat_map(|n| {
        (
            Just(n),
            0..n,
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
                .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
                .prop_map(normalized),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structured_product_matches_dense((n, m, psi) in state_strategy()) {
        let h = SearchHamiltonian::from_size(n, m).unwrap();
        for k in 0..=10 {
            let s = k as f64 / 10.0;
            let fast = apply_hamiltonian(&h, s, &psi).unwrap();
            let slow = dense_apply(&dense_matrix(&h, s).unwrap(), psi.amplitudes());
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn span_is_invariant(n_exp in 1u32..=6, m_frac in 0.0f64..1.0, a in -1.0f64..1.0, b in -1.0f64..1.0, s in 0.0f64..=1.0) {
        let n = 1usize << n_exp;
        let m = ((m_frac * n as f64) as usize).min(n - 1);
        let h = SearchHamiltonian::from_size(n, m).unwrap();
        let psi0 = make_uniform_state(&h);
        let mut v: Vec<Complex64> = psi0.amplitudes().iter().map(|z| z * a).collect();
        v[m] += Complex64::new(b, 0.0);
        let out = apply_hamiltonian(&h, s, &QuantumState::from_raw(v)).unwrap();
        // component orthogonal to span{|m>, |psi0>}
        let coords = h.project_reduced(&out);
        let inside = h.expand_reduced(coords);
        let off: f64 = out.iter().zip(&inside).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(off < 1e-13);
    }
}

#[test]
fn dense_symmetric_with_degenerate_top_level() {
    for n in [2usize, 4, 8, 16, 32, 64] {
        let h = SearchHamiltonian::from_size(n, n / 2).unwrap();
        for k in 0..=10 {
            let s = k as f64 / 10.0;
            let m = dense_matrix(&h, s).unwrap();
            assert_eq!(m, m.transpose());
            let (values, _) = sorted_eigen(&m);
            let sp = eigenvalues(s, n).unwrap();
            assert!((values[0] - sp.e0).abs() < 1e-11, "N={n} s={s}");
            assert!((values[1] - sp.e1).abs() < 1e-11, "N={n} s={s}");
            let ones = values[2..].iter().filter(|v| (*v - 1.0).abs() < 1e-11).count();
            assert_eq!(ones, n - 2);
            assert_eq!(sp.e2_multiplicity, n - 2);
        }
    }
}

#[test]
fn gap_at_quarter_for_four_items() {
    let h = SearchHamiltonian::from_size(4, 0).unwrap();
    let (values, _) = sorted_eigen(&dense_matrix(&h, 0.25).unwrap());
    let dense_gap = values[1] - values[0];
    assert!((dense_gap - 0.6614378277661477).abs() < 1e-12);
    assert!((gap(0.25, 4).unwrap() - dense_gap).abs() < 1e-12);
}

#[test]
fn dense_eigenvalues_at_midpoint() {
    let h = SearchHamiltonian::from_size(4, 2).unwrap();
    let (values, _) = sorted_eigen(&dense_matrix(&h, 0.5).unwrap());
    let sp = eigenvalues(0.5, 4).unwrap();
    assert!((values[0] - sp.e0).abs() < 1e-12);
    assert!((values[1] - sp.e1).abs() < 1e-12);
    assert!((values[2] - 1.0).abs() < 1e-12 && (values[3] - 1.0).abs() < 1e-12);

    let h = SearchHamiltonian::from_size(64, 9).unwrap();
    let (values, _) = sorted_eigen(&dense_matrix(&h, 0.5).unwrap());
    assert!((values[0] - 0.4375).abs() < 1e-12);
    assert!((values[1] - 0.5625).abs() < 1e-12);
}

#[test]
fn reduced_block_matches_dense_lowest_pair() {
    let h = SearchHamiltonian::from_size(16, 7).unwrap();
    let block = reduced_block(&h, 0.3);
    let mut red: Vec<f64> = block.symmetric_eigen().eigenvalues.iter().copied().collect();
    red.sort_by(f64::total_cmp);
    let (values, _) = sorted_eigen(&dense_matrix(&h, 0.3).unwrap());
    assert!((red[0] - values[0]).abs() < 1e-12);
    assert!((red[1] - values[1]).abs() < 1e-12);
}

#[test]
fn coupling_matches_dense_eigenvectors() {
    for (n, s) in [(16usize, 0.5), (16, 0.3), (8, 0.9), (64, 0.5)] {
        let h = SearchHamiltonian::from_size(n, 3).unwrap();
        let (_, vectors) = sorted_eigen(&dense_matrix(&h, s).unwrap());
        let psi0 = DVector::from_element(n, (1.0 / n as f64).sqrt());
        let mut mark = DVector::zeros(n);
        mark[3] = 1.0;
        let derivative = &psi0 * psi0.transpose() - &mark * mark.transpose();
        let e0 = vectors.column(0);
        let e1 = vectors.column(1);
        let dense_value = (e1.transpose() * &derivative * e0)[(0, 0)].abs();
        let value = coupling_matrix_element(s, n).unwrap();
        assert!((value - dense_value).abs() < 1e-12, "N={n} s={s}: {value} vs {dense_value}");
    }
}

#[test]
fn coupling_is_sign_convention_independent() {
    // flipping either eigenvector leaves the absolute value unchanged
    let (g, e) = reduced_eigenvectors(0.4, 32).unwrap();
    let a2: f64 = 1.0 / 32.0;
    let ab = (a2 * (1.0 - a2)).sqrt();
    let d = [[a2 - 1.0, ab], [ab, 1.0 - a2]];
    let elem = |x: [f64; 2], y: [f64; 2]| {
        x[0] * (d[0][0] * y[0] + d[0][1] * y[1]) + x[1] * (d[1][0] * y[0] + d[1][1] * y[1])
    };
    let v = coupling_matrix_element(0.4, 32).unwrap();
    assert!((elem(e, g).abs() - v).abs() < 1e-15);
    assert!((elem([-e[0], -e[1]], g).abs() - v).abs() < 1e-15);
    assert!((elem(e, [-g[0], -g[1]]).abs() - v).abs() < 1e-15);
}

#[test]
fn coupling_bounded_by_one() {
    let mut n = 2usize;
    while n <= 1024 {
        for k in 0..=1000 {
            let s = k as f64 / 1000.0;
            assert!(coupling_matrix_element(s, n).unwrap() <= 1.0 + 1e-12);
        }
        n *= 2;
    }
}

#[test]
fn gap_identities() {
    for n in [2usize, 3, 4, 17, 64, 1000, 1 << 20] {
        let nf = n as f64;
        for k in 0..=200 {
            let s = k as f64 / 200.0;
            let g = gap(s, n).unwrap();
            assert!((g * g + 4.0 * (nf - 1.0) / nf * s * (1.0 - s) - 1.0).abs() < 1e-14);
            assert!((g - gap(1.0 - s, n).unwrap()).abs() < 1e-14);
            let sp = eigenvalues(s, n).unwrap();
            assert!((sp.e0 + sp.e1 - 1.0).abs() < 1e-14);
            assert!(sp.gap >= 0.0);
        }
    }
}
