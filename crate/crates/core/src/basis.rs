//! Bitmask Fock basis of `N` two-level systems and excitation-number sectors.
//!
//! Sites are numbered `1..=N` from the left end of the chain; site `n` maps
//! to bit `n-1` of the mask. The global basis index of a state equals its
//! mask value, and sectors are ordered by ascending mask internally. Every
//! other module relies on this layout.

use thiserror::Error;

/// Hard ceiling on the chain size for dense work (`2^14` is the practical
/// limit for a dense Hermitian eigensolve).
pub const MAX_SITES: usize = 14;

/// Errors from basis construction and on-site operator application.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("chain size {n_sites} outside supported range 1..={MAX_SITES}")]
    SizeOutOfRange { n_sites: usize },
    #[error("site {site} outside chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("mask {mask:#b} has bits set above site {n_sites}")]
    MaskOutOfRange { mask: u32, n_sites: usize },
}

/// A bare Fock state of `N` two-level systems, encoded as a bitmask.
///
/// Bit `n-1` set means site `n` is excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    mask: u32,
    n_sites: usize,
}

impl BasisIndex {
    /// Build a basis state, checking that the mask fits inside the chain.
    pub fn new(mask: u32, n_sites: usize) -> Result<Self, BasisError> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(BasisError::SizeOutOfRange { n_sites });
        }
        if mask >= (1u32 << n_sites) {
            return Err(BasisError::MaskOutOfRange { mask, n_sites });
        }
        Ok(Self { mask, n_sites })
    }

    /// The fully unexcited state `|0...0>`.
    pub fn vacuum(n_sites: usize) -> Result<Self, BasisError> {
        Self::new(0, n_sites)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Number of excited sites (popcount of the mask).
    pub fn excitations(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Excitation-number parity, `(-1)^excitations`.
    pub fn parity(&self) -> i32 {
        if self.excitations().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Whether site `n` (1-based) is excited.
    pub fn is_excited(&self, site: usize) -> Result<bool, BasisError> {
        self.check_site(site)?;
        Ok(self.mask & (1 << (site - 1)) != 0)
    }

    /// Apply the on-site lowering operator at `site`.
    ///
    /// Returns the resulting state and phase when the site was excited, and
    /// `None` when the operator annihilates the state. The sigma operators
    /// act on hard-core two-level sites, so the phase is always `+1.0` (no
    /// fermionic sign strings).
    pub fn lower(&self, site: usize) -> Result<Option<(BasisIndex, f64)>, BasisError> {
        self.check_site(site)?;
        let bit = 1u32 << (site - 1);
        if self.mask & bit != 0 {
            Ok(Some((
                Self {
                    mask: self.mask & !bit,
                    n_sites: self.n_sites,
                },
                1.0,
            )))
        } else {
            Ok(None)
        }
    }

    /// Apply the on-site raising operator at `site` (the exact adjoint of
    /// [`lower`](Self::lower)).
    pub fn raise(&self, site: usize) -> Result<Option<(BasisIndex, f64)>, BasisError> {
        self.check_site(site)?;
        let bit = 1u32 << (site - 1);
        if self.mask & bit == 0 {
            Ok(Some((
                Self {
                    mask: self.mask | bit,
                    n_sites: self.n_sites,
                },
                1.0,
            )))
        } else {
            Ok(None)
        }
    }

    fn check_site(&self, site: usize) -> Result<(), BasisError> {
        if site == 0 || site > self.n_sites {
            Err(BasisError::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            })
        } else {
            Ok(())
        }
    }
}

/// Location of a mask inside the sector decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorRank {
    /// Excitation count of the sector the mask belongs to.
    pub sector: usize,
    /// Position within the ascending-mask ordering of that sector.
    pub position: usize,
}

/// The complete excitation-sector decomposition of an `N`-site Hilbert space.
///
/// Sector sizes follow Pascal's triangle: sector `k` holds `C(N, k)` states.
/// Immutable after construction and safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct SectorTable {
    n_sites: usize,
    sector_sizes: Vec<usize>,
    sector_members: Vec<Vec<BasisIndex>>,
    rank: Vec<SectorRank>,
}

/// Enumerate the full basis of `n_sites` two-level systems, grouped by
/// excitation number.
///
/// Fails with [`BasisError::SizeOutOfRange`] beyond [`MAX_SITES`]; callers
/// that need larger chains must work sector-restricted instead of dense.
pub fn build_basis(n_sites: usize) -> Result<SectorTable, BasisError> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(BasisError::SizeOutOfRange { n_sites });
    }
    let dim = 1usize << n_sites;
    let mut sector_members: Vec<Vec<BasisIndex>> = vec![Vec::new(); n_sites + 1];
    let mut rank = Vec::with_capacity(dim);
    for mask in 0..dim as u32 {
        let state = BasisIndex { mask, n_sites };
        let sector = state.excitations();
        rank.push(SectorRank {
            sector,
            position: sector_members[sector].len(),
        });
        sector_members[sector].push(state);
    }
    let sector_sizes = sector_members.iter().map(Vec::len).collect();
    Ok(SectorTable {
        n_sites,
        sector_sizes,
        sector_members,
        rank,
    })
}

impl SectorTable {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Full Hilbert-space dimension, `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Number of states in each excitation sector, indexed `0..=N`.
    pub fn sector_sizes(&self) -> &[usize] {
        &self.sector_sizes
    }

    /// States of one sector, sorted ascending by mask.
    pub fn sector_members(&self, sector: usize) -> &[BasisIndex] {
        &self.sector_members[sector]
    }

    /// Sector and in-sector position of a mask.
    pub fn rank(&self, mask: u32) -> SectorRank {
        self.rank[mask as usize]
    }

    /// All basis states in global (mask) order.
    pub fn states(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        let n_sites = self.n_sites;
        (0..self.dim() as u32).map(move |mask| BasisIndex { mask, n_sites })
    }

    /// All basis states in sector-sorted order (sector ascending, mask
    /// ascending inside each sector). This is the permutation that makes an
    /// excitation-conserving Hamiltonian block-diagonal.
    pub fn sector_sorted_states(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        self.sector_members.iter().flatten().copied()
    }
}
