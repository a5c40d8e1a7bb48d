//! Littlewood-Paley blocks and the Besov, Chemin-Lerner, Kato and Lorentz
//! norms evaluated on grid fields and trajectories.

pub mod besov;
pub mod embedding;
pub mod export;
pub mod littlewood_paley;
pub mod lorentz;
pub mod time_norms;

pub use besov::{band_lp_norms, besov_norm, lp_norm, s_p, BesovIndex};
pub use embedding::{embedding_report, EmbeddingReport};
pub use littlewood_paley::{dyadic_block, psi, DyadicCutoff};
pub use lorentz::{lorentz_norm, weak_l3};
pub use time_norms::{critical_pair_norm, kato_norm, time_besov_norm, BandProfile, TimeNormSpec};
