//! Exact computation and certification of the partition bound and the
//! public-coin partition bound of small relations, for both communication and
//! query complexity, plus constructive protocol synthesis from LP solutions.

pub mod bounds;
pub mod caps;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod io;
pub mod lp;
pub mod oracles;
pub mod rational;
pub mod relation;
pub mod report;
pub mod suite;
pub mod synth;

pub use bounds::{compute_bound, BoundKind, BoundReport, BoundResult, DualCertificate, Epsilon, PprtMode};
pub use caps::Caps;
pub use error::{Error, Result};
pub use rational::Rational;
pub use relation::{Assignment, Block, LabeledBlock, LabeledPartition, Rectangle, Relation, Shape, Side};
