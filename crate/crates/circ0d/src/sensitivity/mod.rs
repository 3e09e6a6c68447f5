//! Global sensitivity analysis: Sobol sequences, Saltelli designs with
//! total-index estimation, and multi-parameter group campaigns.

mod groups;
mod saltelli;
mod sobol;
mod sobol_table;

pub use groups::{
    builtin_groups, group_campaign, group_coefficients, indicators, CampaignRow, CoefficientKind,
    GroupSpec, IndicatorSet, NUANCES,
};
pub use saltelli::{
    relevant_parameters, row_parameters, saltelli_design, saltelli_design_on, total_indices,
    RowKind, SamplingDesign, SobolResult,
};
pub use sobol::{sobol_sequence, SobolSequence, MAX_DIM};

#[cfg(test)]
mod tests;
