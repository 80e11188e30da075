//! Multilevel Daubechies DWT and the LP/HP split of ERP channels.

mod dwt;
mod filters;

use rayon::prelude::*;

pub use dwt::{dwt_decompose, reconstruct_hp, reconstruct_lp, split_signal, BoundaryMode, WaveletDecomposition};
pub use filters::WaveletFilterPair;

use crate::error::Result;
use crate::signal::ErpAverage;

/// Low- and high-pass parts of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSplit {
    pub lp: Vec<f64>,
    pub hp: Vec<f64>,
}

/// The db4 split of every channel, in channel order.
pub fn split_erp(erp: &ErpAverage, levels: usize) -> Result<Vec<ChannelSplit>> {
    split_erp_with(erp, levels, WaveletFilterPair::db4(), BoundaryMode::Periodic)
}

pub fn split_erp_with(
    erp: &ErpAverage,
    levels: usize,
    filters: &WaveletFilterPair,
    boundary: BoundaryMode,
) -> Result<Vec<ChannelSplit>> {
    erp.channel_values
        .par_iter()
        .map(|x| split_signal(x, levels, filters, boundary).map(|(lp, hp)| ChannelSplit { lp, hp }))
        .collect()
}
