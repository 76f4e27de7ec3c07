//! Exact arithmetic for finitely presented modules over truncated Iwasawa
//! algebras `A_n = Z_p[[X_1, ..., X_n]][G]`.
//!
//! Layers, bottom-up:
//!
//! - [`padic`]: residues modulo `p^N`.
//! - [`powerseries`]: sparse truncated series, level maps, Weierstrass
//!   preparation, gcds and factorisation of distinguished polynomials.
//! - [`groupring`]: the group ring over a finite abelian group and its
//!   character idempotents.
//! - [`fpmod`]: presentations, Fitting ideals, characteristic ideals.
//! - [`structure`]: elementary-divisor decompositions at height-one primes.
//! - [`tower`]: compatible families of presentations over rising levels.
//! - [`oracle`]: brute-force cokernel counts over finite quotient rings.

pub mod error;
pub mod padic;
pub mod powerseries;
pub mod groupring;
pub mod fpmod;
pub mod structure;
pub mod oracle;
pub mod tower;
mod matrix;
pub mod sample;

pub use error::{Error, Result};
pub use fpmod::{Presentation, PrincipalIdeal};
pub use groupring::{AbelianGroupSpec, Character, GroupRingElement};
pub use padic::{PadicInt, PrecisionContext, Valuation};
pub use powerseries::{CanonicalForm, DistinguishedPoly, Monomial, Series, WeierstrassData};
