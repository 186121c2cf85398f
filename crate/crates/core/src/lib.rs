//! Time evolution of single-mode Wigner functions and photon-number
//! distributions in photon-loss, laser (gain and loss) and thermal channels.
//!
//! Three independent routes compute the same quantities:
//!
//! * closed forms for photon-added coherent states ([`evolution::evolve_pacs_damping`],
//!   [`evolution::evolve_pacs`], [`photon::pnd_pacs_closed`]);
//! * quadrature of the Gaussian channel kernels against any initial Wigner
//!   function ([`evolution::evolve_wigner`], [`photon::pnd_evolved`]);
//! * a truncated Fock-space master-equation integration with Wigner
//!   reconstruction by displaced parity ([`oracle`]).
//!
//! [`verify`] cross-checks them. Wigner functions follow the
//! `W = Tr[D(2α)(-1)^{a†a} ρ] / π` convention and integrate to 1/2.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod evolution;
pub mod field;
pub mod oracle;
pub mod phase;
pub mod photon;
pub mod quad;
pub mod special;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use evolution::{ChannelKind, ChannelParams, KernelFactors};
pub use phase::{Envelope, PhaseSpaceFn, PhasePoint};
pub use photon::PhotonNumberDistribution;
pub use quad::QuadSettings;
pub use states::StateSpec;
