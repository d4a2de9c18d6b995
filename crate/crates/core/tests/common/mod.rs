//! Shared helpers for integration tests.
//!
//! The centerpiece is an independent chain-Hamiltonian builder that works
//! entirely through explicit Kronecker products of 2x2 site matrices. It
//! shares no code with the library's bitmask scatter assembly, so entrywise
//! agreement between the two is a genuine cross-check rather than a tautology.

use nalgebra::DMatrix;

/// 2x2 identity on a single site.
pub fn site_identity() -> DMatrix<f64> {
    DMatrix::identity(2, 2)
}

/// Lowering operator on a single site in the `{|0>, |1>}` basis.
pub fn site_lowering() -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 1)] = 1.0;
    m
}

/// Raising operator on a single site: the adjoint of lowering.
pub fn site_raising() -> DMatrix<f64> {
    site_lowering().transpose()
}

/// Transition operator `sigma + sigma^dagger` on a single site.
pub fn site_transition() -> DMatrix<f64> {
    site_lowering() + site_raising()
}

/// Number operator `sigma^dagger sigma` on a single site.
pub fn site_number() -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 1.0]))
}

/// Embeds one 2x2 factor per site into the full `2^N` space.
///
/// `factors[k]` acts on site `k+1`. Site 1 occupies the least significant
/// bit of the basis index, so it sits rightmost in the Kronecker chain and
/// the fold runs from site N down to site 1.
pub fn embed(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors
        .iter()
        .rev()
        .fold(DMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// Full-space operator acting as `op` on `site` (1-based) and trivially
/// elsewhere.
pub fn on_site(n_sites: usize, site: usize, op: &DMatrix<f64>) -> DMatrix<f64> {
    let factors: Vec<DMatrix<f64>> = (1..=n_sites)
        .map(|s| if s == site { op.clone() } else { site_identity() })
        .collect();
    embed(&factors)
}

/// Two-site product `a` on `site_a` times `b` on `site_b`.
pub fn on_pair(
    n_sites: usize,
    site_a: usize,
    a: &DMatrix<f64>,
    site_b: usize,
    b: &DMatrix<f64>,
) -> DMatrix<f64> {
    let factors: Vec<DMatrix<f64>> = (1..=n_sites)
        .map(|s| {
            if s == site_a {
                a.clone()
            } else if s == site_b {
                b.clone()
            } else {
                site_identity()
            }
        })
        .collect();
    embed(&factors)
}

/// One bond of the chain Hamiltonian between distinct sites `a` and `b`.
///
/// The full form is `(sigma_a + sigma_a^dagger)(sigma_b + sigma_b^dagger)`;
/// the number-conserving form keeps only the two hopping products.
pub fn bond_term(n_sites: usize, a: usize, b: usize, rwa: bool) -> DMatrix<f64> {
    if rwa {
        on_pair(n_sites, a, &site_raising(), b, &site_lowering())
            + on_pair(n_sites, a, &site_lowering(), b, &site_raising())
    } else {
        on_pair(n_sites, a, &site_transition(), b, &site_transition())
    }
}

/// Chain Hamiltonian assembled purely from Kronecker products.
///
/// Bond pattern, replicated here from first principles: intra-cell bonds
/// `(2k-1, 2k)` carry `j1` for `k = 1..floor(N/2)`, inter-cell bonds
/// `(2k, 2k+1)` carry `j2` for `k = 1..floor((N-1)/2)`, and a periodic chain
/// closes `(N, 1)` with `j2`.
pub fn kron_chain(
    n_sites: usize,
    omega0: f64,
    j1: f64,
    j2: f64,
    rwa: bool,
    periodic: bool,
) -> DMatrix<f64> {
    let dim = 1usize << n_sites;
    let mut h = DMatrix::zeros(dim, dim);
    for site in 1..=n_sites {
        h += omega0 * on_site(n_sites, site, &site_number());
    }
    let mut bonds: Vec<(usize, usize, f64)> = Vec::new();
    for k in 1..=n_sites / 2 {
        bonds.push((2 * k - 1, 2 * k, j1));
    }
    for k in 1..=(n_sites - 1) / 2 {
        bonds.push((2 * k, 2 * k + 1, j2));
    }
    if periodic {
        bonds.push((n_sites, 1, j2));
    }
    for (a, b, g) in bonds {
        h += g * bond_term(n_sites, a, b, rwa);
    }
    h
}

/// Largest absolute entrywise difference between two equally sized matrices.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "comparing differently shaped matrices");
    (a - b).iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
