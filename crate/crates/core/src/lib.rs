//! Vanishing theta constants of abelian varieties with multiplication by
//! `i`, computed from unimodular Gaussian lattices.
//!
//! The pipeline: [`lattice`] builds and validates `(S, J)`; [`torsion`]
//! reduces to the 2-torsion and enumerates the i-invariant theta
//! characteristics; [`quadratic`] supplies Arf and Brown invariants;
//! [`census`] counts forms by `m₀ mod 4`; [`theta`], [`period`] and
//! [`verify`] confirm the vanishing numerically.

pub mod bits;
pub mod census;
pub mod checks;
pub mod error;
pub mod lattice;
pub mod period;
pub mod quadratic;
pub mod symplectic;
pub mod theta;
pub mod torsion;
pub mod verify;
pub mod zmat;

pub use census::{census, closed_formula, CensusConfig, CensusReport, FormRecord};
pub use error::{Error, Result};
pub use lattice::{
    classify, direct_sum, gamma_2g, gauss_e8, gauss_zn, gaussify, load_lattice, make_lattice, Classification,
    GaussianLattice, LatticeFile,
};
pub use period::{period_matrix, PeriodMatrix};
pub use quadratic::{arf, brown, gauss_sum, sigma_from_gauss_sum, F2Form, GaussSum, Z4Form, Z4, Z8};
pub use symplectic::{symplectic_basis, SymplecticBasisZ};
pub use theta::{form_to_characteristic, theta_constant, Characteristic, ThetaValue};
pub use torsion::{enumerate_invariant_forms, induce, multiplicity_mod4, reduce, InvariantThetaForm, TwoTorsionSpace};
pub use verify::{verify_census_numeric, NumericConfig, VerificationRecord};
