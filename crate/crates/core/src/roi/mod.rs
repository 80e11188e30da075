//! Mapping selected features back to electrodes and scalp regions.

mod layout;
mod report;

pub use layout::{Electrode, ElectrodeLayout, Hemisphere, Region};
pub use report::{
    aggregate_regions, asymmetry, attribute_selection, render_scalp_map, scalp_map_svg, Attribution, ElectrodeRow,
    RegionCell, RegionReport,
};
