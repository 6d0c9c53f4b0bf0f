//! Monte Carlo model of the selected relay link, used as an independent
//! oracle for every closed form in [`crate::analytic`].
//!
//! All randomness comes from counter-indexed ChaCha substreams: work is cut
//! into fixed chunks, chunk `i` always draws from substream `i`, and chunk
//! results are merged in index order. Results therefore depend only on the
//! configuration and seed, never on the number of worker threads.

mod channel;
mod link;
mod modem;
mod parallel;
mod rng;
mod sim;

pub use channel::{sample_channel, select_antennas, ChannelRealization, SelectionResult};
pub use link::{alamouti_encode, Link};
pub use modem::{gray, Modem};
pub use parallel::run_chunked;
pub use rng::{substream, GaussianSource, Purpose};
pub use sim::{
    estimate_mgf, estimate_mgf_many, run_fast_equivalent_sim, run_ser_sim, sample_theta, Code, SimConfig, SimResult,
};
