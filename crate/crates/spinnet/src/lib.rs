//! Spin-network quantum circuits: SU(2)-equivariant gates built from
//! Clebsch-Gordan coupling and Schur transforms, their permutation-algebra
//! equivalents, and a variational eigensolver for Heisenberg models on
//! frustrated lattices.

pub mod error;
pub mod ham;
pub mod lattice;
pub mod linalg;
pub mod perm;
pub mod rng;
pub mod schur;
pub mod sim;
pub mod su2;
pub mod twirl;
pub mod verify;
pub mod vertex;
pub mod vqe;

pub use error::{Result, SpinNetError};

#[cfg(test)]
pub(crate) mod testutil {
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    pub fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }
}
