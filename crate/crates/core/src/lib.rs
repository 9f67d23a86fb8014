//! Association schemes, their Bose–Mesner algebras and the structures built
//! on top of them: Krein parameters, hypergroup random walks, quantum Markov
//! chains driven by Schur multipliers, Szegedy walks and anyon fusion data.
//!
//! The combinatorial layer ([`group`], [`field`], [`scheme`] and the
//! intersection numbers in [`parameters`]) is exact integer arithmetic. The
//! numerical layer is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, with `…32` variants for `f32`.

pub mod anyons;
pub mod error;
pub mod field;
pub mod group;
pub mod hypergroup;
pub mod io;
pub mod parameters;
pub mod qmc;
pub mod scalar;
pub mod scheme;
pub mod spectral;

pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use parameters::IntersectionTensor;
pub use scalar::Real;
pub use scheme::AssociationScheme;

pub type Decomposition = spectral::BoseMesnerDecomposition<f64>;
pub type Decomposition32 = spectral::BoseMesnerDecomposition<f32>;
pub type KreinTensor = parameters::KreinTensor<f64>;
pub type KreinTensor32 = parameters::KreinTensor<f32>;
pub type Hypergroup = hypergroup::Hypergroup<f64>;
pub type Hypergroup32 = hypergroup::Hypergroup<f32>;
pub type SchurChannel = qmc::SchurChannel<f64>;
pub type SchurChannel32 = qmc::SchurChannel<f32>;
pub type TransitionExpectation = qmc::TransitionExpectation<f64>;
pub type TransitionExpectation32 = qmc::TransitionExpectation<f32>;
pub type WalkOperator = qmc::WalkOperator<f64>;
pub type WalkOperator32 = qmc::WalkOperator<f32>;
pub type FusionSystem = anyons::FusionSystem<f64>;
pub type FusionSystem32 = anyons::FusionSystem<f32>;
pub type Matrix = scalar::RMatrix<f64>;
pub type ComplexMatrix = scalar::CMatrix<f64>;
