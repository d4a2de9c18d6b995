//! Cross-checks the bitmask Hamiltonian assembly against an independent
//! builder that uses nothing but explicit Kronecker products of 2x2 site
//! matrices (see `common`). Agreement here validates the bit-level scatter,
//! the bond pattern, and the site-to-bit convention all at once.

mod common;

use common::{kron_chain, max_abs_diff, on_site, site_number};
use nalgebra::{DMatrix, SymmetricEigen};
use usctopo::basis::build_basis;
use usctopo::hamiltonian::{
    apply_chain, build_chain, build_dimer, number_operator, Boundary, ChainSpec, Coupling,
};
use usctopo::spectra::diagonalize;

fn chain_operator(
    n_sites: usize,
    omega0: f64,
    epsilon: f64,
    jbar: f64,
    rwa: bool,
    boundary: Boundary,
) -> usctopo::hamiltonian::HermitianOperator {
    let coupling = Coupling::from_dimerization(epsilon, jbar).unwrap();
    let spec = ChainSpec::new(n_sites, omega0, coupling, rwa, boundary).unwrap();
    let basis = build_basis(n_sites).unwrap();
    build_chain(&spec, &basis).unwrap()
}

/// Eigenvalues of a symmetric matrix, sorted ascending, computed here
/// without going through the library's presentation layer.
fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

#[test]
fn bitmask_assembly_matches_kronecker_products_entrywise() {
    let eps_grid = [-1.0, -0.7, -0.2, 0.0, 0.4, 0.9, 1.0];
    let jbar_grid = [0.0, 0.1, 0.5, 1.3];
    for n in 1..=4 {
        for &eps in &eps_grid {
            for &jbar in &jbar_grid {
                for rwa in [false, true] {
                    let op = chain_operator(n, 1.0, eps, jbar, rwa, Boundary::Open);
                    let coupling = Coupling::from_dimerization(eps, jbar).unwrap();
                    let oracle =
                        kron_chain(n, 1.0, coupling.j1(), coupling.j2(), rwa, false);
                    assert!(
                        max_abs_diff(op.entries(), &oracle) <= 1e-12,
                        "open N={n}, eps={eps}, jbar={jbar}, rwa={rwa}"
                    );
                }
            }
        }
    }
}

#[test]
fn periodic_assembly_matches_kronecker_products_entrywise() {
    let eps_grid = [-0.8, 0.0, 0.6];
    for n in [2, 4] {
        for &eps in &eps_grid {
            for rwa in [false, true] {
                let op = chain_operator(n, 1.0, eps, 0.7, rwa, Boundary::Periodic);
                let coupling = Coupling::from_dimerization(eps, 0.7).unwrap();
                let oracle = kron_chain(n, 1.0, coupling.j1(), coupling.j2(), rwa, true);
                assert!(
                    max_abs_diff(op.entries(), &oracle) <= 1e-12,
                    "periodic N={n}, eps={eps}, rwa={rwa}"
                );
            }
        }
    }
}

#[test]
fn full_four_site_spectrum_matches_the_oracle() {
    let op = chain_operator(4, 1.0, 0.4, 0.5, false, Boundary::Open);
    let spectrum = diagonalize(&op).unwrap();
    let coupling = Coupling::from_dimerization(0.4, 0.5).unwrap();
    let oracle_vals =
        sorted_eigenvalues(kron_chain(4, 1.0, coupling.j1(), coupling.j2(), false, false));
    assert_eq!(spectrum.len(), 16);
    for (lib, oracle) in spectrum.eigenvalues().iter().zip(&oracle_vals) {
        assert!(
            (lib - oracle).abs() <= 1e-10,
            "eigenvalue mismatch: {lib} vs {oracle}"
        );
    }
}

#[test]
fn chain_of_two_reduces_to_the_dimer_against_both_builders() {
    for &j in &[0.0, 0.3, 1.0, 2.5] {
        for rwa in [false, true] {
            // A two-site chain has a single intra-cell bond, so j2 is inert.
            let coupling = Coupling::from_pair(j, 0.123).unwrap();
            let spec = ChainSpec::new(2, 1.0, coupling, rwa, Boundary::Open).unwrap();
            let basis = build_basis(2).unwrap();
            let chain = build_chain(&spec, &basis).unwrap();
            let dimer = build_dimer(1.0, j, rwa).unwrap();
            let oracle = kron_chain(2, 1.0, j, 0.0, rwa, false);
            assert!(max_abs_diff(chain.entries(), dimer.entries()) <= 1e-15);
            assert!(max_abs_diff(chain.entries(), &oracle) <= 1e-15);
        }
    }
}

#[test]
fn number_operator_matches_the_kronecker_sum() {
    for n in 1..=4 {
        let basis = build_basis(n).unwrap();
        let op = number_operator(&basis);
        let dim = 1usize << n;
        let mut oracle = DMatrix::zeros(dim, dim);
        for site in 1..=n {
            oracle += on_site(n, site, &site_number());
        }
        assert!(max_abs_diff(op.entries(), &oracle) <= 1e-15, "N={n}");
    }
}

#[test]
fn matrix_free_application_agrees_with_the_oracle_matrix() {
    let coupling = Coupling::from_dimerization(-0.6, 0.8).unwrap();
    let spec = ChainSpec::new(3, 1.0, coupling, false, Boundary::Open).unwrap();
    let oracle = kron_chain(3, 1.0, coupling.j1(), coupling.j2(), false, false);
    for i in 0..8 {
        let mut v = nalgebra::DVector::zeros(8);
        v[i] = 1.0;
        let applied = apply_chain(&spec, &v).unwrap();
        let expected = &oracle * &v;
        assert!(
            (applied - expected).amax() <= 1e-12,
            "column {i} of the matrix-free product disagrees"
        );
    }
}
