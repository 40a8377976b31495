//! MT19937 and the tools used to exhibit its GF(2)-linear structure.

pub mod gf2;
pub mod mt19937;
pub mod recurrence;

pub use gf2::{Gf2Matrix32, Gf2Vector32};
pub use mt19937::{mt_init, mt_next, mt_outputs, temper, untemper, MtState, DEFAULT_SEED};
pub use recurrence::{
    lag_pair_uniformity, lag_pairs_csv, load_recurrence_matrices, match_count_model, recover_matrices,
    scan_conditions_ab, verify_recurrence, LagPair, RecurrenceCheck,
};
