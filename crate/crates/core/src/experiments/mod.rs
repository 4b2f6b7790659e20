//! Configuration-driven experiment suite.
//!
//! | id | study |
//! |----|-------|
//! | E1 | single-step piston error against bits per variable, per solver |
//! | E2 | piston coupling, fixed against adaptive encoding |
//! | E3 | composite rod penalty method, fixed against adaptive encoding |
//! | E4 | composite rod, relaxation factor sweep |
//! | E5 | composite rod, initial range sweep |
//! | E6 | composite rod, reads sweep |

mod config;
mod output;
mod runner;
mod stats;

pub use config::{
    EncodingSection, ExperimentConfig, ExperimentId, ExperimentSection, FsiSection, Overrides,
    PairSelectionName, PenaltySection, RodSection, SolverSection, SweepSection,
};
pub use output::{
    fmt_f64, history_rows, records, write_csv, write_results, ExperimentRecord, ERROR_VS_BITS_HEADER,
    HISTORY_HEADER, METRICS,
};
pub use runner::{
    run_experiment, ErrorVsBitsRow, ExperimentData, ExperimentResults, IterationRow, Metadata,
    RunHistory, Scheme, Variant,
};
pub use stats::{quantile, Aggregate};
