//! Dense Hamiltonian assembly for the dimer and the dimerized chain.
//!
//! The chain couples site pairs `(2n-1, 2n)` with strength `J1` and
//! `(2n, 2n+1)` with strength `J2`; every bond carries the full
//! `(sigma + sigma^dag)(sigma + sigma^dag)` product. Dropping the
//! counter-rotating halves (`sigma sigma` and `sigma^dag sigma^dag`)
//! yields the rotating-wave approximation, which conserves the total
//! excitation number. All coefficients are real, so operators are stored
//! as real symmetric matrices and only widened to complex where dynamics
//! requires it.

use std::io::{self, Read, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::basis::{BasisError, SectorTable, MAX_SITES};

/// Errors from Hamiltonian construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("omega0 must be positive and finite, got {0}")]
    InvalidOmega0(f64),
    #[error("coupling must be non-negative and finite, got {0}")]
    InvalidCoupling(f64),
    #[error("dimerization epsilon must lie in [-1, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("periodic boundary requires an even chain, got N = {0}")]
    OddPeriodicChain(usize),
    #[error("spec is for {spec} sites but basis is for {basis}")]
    DimensionMismatch { spec: usize, basis: usize },
    #[error("operator is not Hermitian: defect {defect:.3e} exceeds {limit:.3e}")]
    NotHermitian { defect: f64, limit: f64 },
    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// Boundary condition of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Alternating bond couplings, stored canonically as `(J1, J2)`.
///
/// The equivalent parametrization is the dimerization `epsilon` and total
/// coupling `jbar`: `epsilon = (J1 - J2) / jbar`, `jbar = J1 + J2`, with the
/// inverses `J1 = (1 + epsilon) jbar / 2` and `J2 = (1 - epsilon) jbar / 2`.
/// At `jbar = 0` the dimerization is defined as `0` (both bonds vanish, so
/// the spectrum no longer depends on it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    j1: f64,
    j2: f64,
}

fn check_coupling(j: f64) -> Result<f64, HamiltonianError> {
    if !j.is_finite() || j < 0.0 {
        Err(HamiltonianError::InvalidCoupling(j))
    } else {
        Ok(j)
    }
}

impl Coupling {
    /// Couplings given directly as the bond pair `(J1, J2)`.
    pub fn from_pair(j1: f64, j2: f64) -> Result<Self, HamiltonianError> {
        Ok(Self {
            j1: check_coupling(j1)?,
            j2: check_coupling(j2)?,
        })
    }

    /// Couplings given as dimerization and total strength `(epsilon, jbar)`.
    pub fn from_dimerization(epsilon: f64, jbar: f64) -> Result<Self, HamiltonianError> {
        if !epsilon.is_finite() || !(-1.0..=1.0).contains(&epsilon) {
            return Err(HamiltonianError::InvalidEpsilon(epsilon));
        }
        check_coupling(jbar)?;
        Ok(Self {
            j1: (1.0 + epsilon) * jbar / 2.0,
            j2: (1.0 - epsilon) * jbar / 2.0,
        })
    }

    pub fn j1(&self) -> f64 {
        self.j1
    }

    pub fn j2(&self) -> f64 {
        self.j2
    }

    /// Total bond strength `J1 + J2`.
    pub fn jbar(&self) -> f64 {
        self.j1 + self.j2
    }

    /// Dimerization `(J1 - J2) / (J1 + J2)`, defined as `0` when both bonds
    /// vanish.
    pub fn epsilon(&self) -> f64 {
        let jbar = self.jbar();
        if jbar == 0.0 {
            0.0
        } else {
            (self.j1 - self.j2) / jbar
        }
    }
}

/// The physical model: chain size, bare frequency, couplings, whether the
/// counter-rotating terms are kept, and the boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    omega0: f64,
    coupling: Coupling,
    rwa: bool,
    boundary: Boundary,
}

impl ChainSpec {
    pub fn new(
        n_sites: usize,
        omega0: f64,
        coupling: Coupling,
        rwa: bool,
        boundary: Boundary,
    ) -> Result<Self, HamiltonianError> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(BasisError::SizeOutOfRange { n_sites }.into());
        }
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(HamiltonianError::InvalidOmega0(omega0));
        }
        if boundary == Boundary::Periodic && !n_sites.is_multiple_of(2) {
            return Err(HamiltonianError::OddPeriodicChain(n_sites));
        }
        Ok(Self {
            n_sites,
            omega0,
            coupling,
            rwa,
            boundary,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn rwa(&self) -> bool {
        self.rwa
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Hilbert-space dimension `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Same chain with different couplings (used by parameter sweeps).
    pub fn with_coupling(&self, coupling: Coupling) -> Self {
        Self { coupling, ..*self }
    }

    /// Bond list as `(site_a, site_b, strength)` with 1-based sites.
    ///
    /// The floor-function limits make the list correct for even and odd `N`;
    /// a periodic chain closes with a `J2` bond from site `N` to site 1,
    /// continuing the alternation.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_sites;
        let mut bonds = Vec::with_capacity(n);
        for k in 1..=(n / 2) {
            bonds.push((2 * k - 1, 2 * k, self.coupling.j1));
        }
        for k in 1..=((n - 1) / 2) {
            bonds.push((2 * k, 2 * k + 1, self.coupling.j2));
        }
        if self.boundary == Boundary::Periodic {
            bonds.push((n, 1, self.coupling.j2));
        }
        bonds
    }
}

/// Which builder produced an operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Dimer { omega0: f64, j: f64, rwa: bool },
    Chain(ChainSpec),
    NumberOperator { n_sites: usize },
    Custom(String),
}

impl Provenance {
    /// Whether the operator is guaranteed to conserve the total excitation
    /// number (block-diagonal over sectors).
    pub fn conserves_excitations(&self) -> bool {
        match self {
            Provenance::Dimer { rwa, .. } => *rwa,
            Provenance::Chain(spec) => spec.rwa(),
            Provenance::NumberOperator { .. } => true,
            Provenance::Custom(_) => false,
        }
    }

    /// The bare frequency scale, where the builder had one.
    pub fn omega0(&self) -> Option<f64> {
        match self {
            Provenance::Dimer { omega0, .. } => Some(*omega0),
            Provenance::Chain(spec) => Some(spec.omega0()),
            _ => None,
        }
    }
}

/// Relative Hermiticity defect allowed on operator construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A dense real symmetric operator on the full `2^N` Hilbert space, with a
/// record of which builder produced it. Basis index equals mask value.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: DMatrix<f64>,
    provenance: Provenance,
}

impl HermitianOperator {
    /// Wrap a matrix, enforcing the Hermiticity invariant
    /// `max |H[a][b] - H[b][a]| <= 1e-12 * max |H|`.
    pub fn from_matrix(
        entries: DMatrix<f64>,
        provenance: Provenance,
    ) -> Result<Self, HamiltonianError> {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        let scale = entries.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let defect = hermiticity_defect(&entries);
        let limit = HERMITICITY_TOL * scale.max(1.0);
        if defect > limit {
            return Err(HamiltonianError::NotHermitian { defect, limit });
        }
        Ok(Self {
            dim: entries.nrows(),
            entries,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Dense matrix-vector product `H v`.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }
}

/// Max absolute asymmetry of a square matrix.
pub fn hermiticity_defect(m: &DMatrix<f64>) -> f64 {
    let mut defect = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            defect = defect.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    defect
}

/// Build the two-site Hamiltonian
/// `omega0 (n_1 + n_2) + J (sigma_1 + sigma_1^dag)(sigma_2 + sigma_2^dag)`
/// in the mask basis `{|00>, |10>, |01>, |11>}`.
///
/// With `rwa` the `|00> <-> |11>` coupling is dropped.
pub fn build_dimer(omega0: f64, j: f64, rwa: bool) -> Result<HermitianOperator, HamiltonianError> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(HamiltonianError::InvalidOmega0(omega0));
    }
    check_coupling(j)?;
    let mut h = DMatrix::zeros(4, 4);
    h[(1, 1)] = omega0;
    h[(2, 2)] = omega0;
    h[(3, 3)] = 2.0 * omega0;
    h[(1, 2)] = j;
    h[(2, 1)] = j;
    if !rwa {
        h[(0, 3)] = j;
        h[(3, 0)] = j;
    }
    HermitianOperator::from_matrix(h, Provenance::Dimer { omega0, j, rwa })
}

/// Scatter the four operator products of one bond from column `mask` into
/// the accumulator `out[target] += g * amp`.
fn scatter_bond<F: FnMut(usize, f64)>(
    mask: u32,
    bit_a: u32,
    bit_b: u32,
    g: f64,
    rwa: bool,
    mut add: F,
) {
    let has_a = mask & bit_a != 0;
    let has_b = mask & bit_b != 0;
    match (has_a, has_b) {
        // sigma_a^dag sigma_b: hop b -> a
        (false, true) => add(((mask & !bit_b) | bit_a) as usize, g),
        // sigma_a sigma_b^dag: hop a -> b
        (true, false) => add(((mask & !bit_a) | bit_b) as usize, g),
        // counter-rotating pair creation / annihilation
        (false, false) if !rwa => add((mask | bit_a | bit_b) as usize, g),
        (true, true) if !rwa => add((mask & !bit_a & !bit_b) as usize, g),
        _ => {}
    }
}

/// Assemble the dense `2^N x 2^N` chain Hamiltonian.
pub fn build_chain(
    spec: &ChainSpec,
    basis: &SectorTable,
) -> Result<HermitianOperator, HamiltonianError> {
    if spec.n_sites() != basis.n_sites() {
        return Err(HamiltonianError::DimensionMismatch {
            spec: spec.n_sites(),
            basis: basis.n_sites(),
        });
    }
    let dim = spec.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for state in basis.states() {
        let mask = state.mask();
        let col = mask as usize;
        h[(col, col)] = spec.omega0() * state.excitations() as f64;
        for &(a, b, g) in &spec.bonds() {
            let (bit_a, bit_b) = (1u32 << (a - 1), 1u32 << (b - 1));
            scatter_bond(mask, bit_a, bit_b, g, spec.rwa(), |row, amp| {
                h[(row, col)] += amp;
            });
        }
    }
    HermitianOperator::from_matrix(h, Provenance::Chain(*spec))
}

/// Matrix-free application of the chain Hamiltonian, `H v`, via bit
/// operations. Produces the same vector as `build_chain(..).apply(v)`
/// without materializing the matrix; useful to accelerate sweeps at larger
/// `N`.
pub fn apply_chain(
    spec: &ChainSpec,
    v: &DVector<f64>,
) -> Result<DVector<f64>, HamiltonianError> {
    let dim = spec.dim();
    if v.len() != dim {
        return Err(HamiltonianError::DimensionMismatch {
            spec: dim,
            basis: v.len(),
        });
    }
    let bonds = spec.bonds();
    let mut out = DVector::zeros(dim);
    for mask in 0..dim as u32 {
        let col = mask as usize;
        out[col] += spec.omega0() * mask.count_ones() as f64 * v[col];
        for &(a, b, g) in &bonds {
            let (bit_a, bit_b) = (1u32 << (a - 1), 1u32 << (b - 1));
            scatter_bond(mask, bit_a, bit_b, g, spec.rwa(), |row, amp| {
                out[row] += amp * v[col];
            });
        }
    }
    Ok(out)
}

/// The total number operator, diagonal with entry `popcount(mask)`.
pub fn number_operator(basis: &SectorTable) -> HermitianOperator {
    let dim = basis.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for state in basis.states() {
        let i = state.mask() as usize;
        h[(i, i)] = state.excitations() as f64;
    }
    HermitianOperator::from_matrix(
        h,
        Provenance::NumberOperator {
            n_sites: basis.n_sites(),
        },
    )
    .expect("diagonal matrix is Hermitian")
}

const DUMP_MAGIC: &[u8; 4] = b"USCH";

/// Flag bits of the debug dump header.
pub mod dump_flags {
    /// Set when the operator conserves excitation number.
    pub const CONSERVING: u32 = 1;
    /// Set when the operator came from a periodic chain.
    pub const PERIODIC: u32 = 1 << 1;
}

fn dump_flag_bits(op: &HermitianOperator) -> u32 {
    let mut flags = 0;
    if op.provenance().conserves_excitations() {
        flags |= dump_flags::CONSERVING;
    }
    if let Provenance::Chain(spec) = op.provenance() {
        if spec.boundary() == Boundary::Periodic {
            flags |= dump_flags::PERIODIC;
        }
    }
    flags
}

/// Write a matrix dump for debugging: a 16-byte header (magic `USCH`,
/// little-endian `u32` dim, `u32` flags, `u32` reserved = 0) followed by the
/// entries as row-major little-endian `f64`. Not a stability-guaranteed
/// format.
pub fn write_matrix_dump<W: Write>(op: &HermitianOperator, mut w: W) -> io::Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&(op.dim() as u32).to_le_bytes())?;
    w.write_all(&dump_flag_bits(op).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            w.write_all(&op.entries()[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read back a debug dump, returning `(flags, matrix)`.
pub fn read_matrix_dump<R: Read>(mut r: R) -> io::Result<(u32, DMatrix<f64>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[0..4] != DUMP_MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "bad magic in matrix dump",
        ));
    }
    let dim = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let flags = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let mut buf = vec![0u8; dim * dim * 8];
    r.read_exact(&mut buf)?;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let off = (i * dim + j) * 8;
            m[(i, j)] = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
        }
    }
    Ok((flags, m))
}
