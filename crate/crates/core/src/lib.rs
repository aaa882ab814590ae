//! Subset repair of relational data under functional and conditional
//! functional dependencies.
//!
//! Pipeline: [`detection::detect_conflicts`] builds the conflict graph,
//! [`decomposition::decompose`] splits it into independent components,
//! [`scoring`] assigns each conflicting row a density/conflict penalty, and
//! [`repair::repair`] picks the rows to delete per component.
//!
//! ```
//! use subrepair::{Dataset, parse_rules_str, run_pipeline, PipelineOptions};
//!
//! let rows = [["a", "z1", "x"], ["a", "z1", "x"], ["a", "z2", "y"], ["b", "z3", "x"], ["c", "z4", "x"]];
//! let ds = Dataset::from_rows(
//!     vec!["city".into(), "zip".into(), "state".into()],
//!     rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
//!     "",
//! )?;
//! let rules = parse_rules_str("city -> zip", &ds)?;
//! let run = run_pipeline(&ds, &rules, &PipelineOptions::default())?;
//! assert_eq!(run.plan.removal_set, vec![2]);
//! # Ok::<(), subrepair::Error>(())
//! ```

pub mod cover;
pub mod dataset;
pub mod decomposition;
pub mod detection;
pub mod error;
pub mod eval;
pub mod graph;
pub mod pipeline;
pub mod repair;
pub mod rules;
pub mod scoring;

pub use dataset::{load_dataset, load_ground_truth, AttrKind, Dataset, GroundTruth, Label, LoadOptions};
pub use decomposition::{decompose, Component};
pub use detection::{detect_conflicts, DetectionStats, InvertedIndex};
pub use error::{Error, Result};
pub use eval::{evaluate, inject_errors, synthetic_clean, RepairMetrics, SyntheticSpec};
pub use graph::ConflictGraph;
pub use pipeline::{run_pipeline, PipelineOptions, RunConfig};
pub use repair::{repair, Algorithm, RepairConfig, RepairPlan, Strategy};
pub use rules::{group_rules, parse_rules, parse_rules_str, CfdRule, RuleGroup};
pub use scoring::{compute_density, AttributeWeights, DensityTable};
