//! Protocol models, execution and cost accounting.

mod cost;
mod exec;
mod graph;
mod input;
mod message;
mod pattern;
mod protocol;
mod truth_table;
mod view;

pub use cost::{measure_cost, Budget, ChannelCost, CostReport, DEFAULT_BUDGET};
pub(crate) use cost::{sweep, CostAccumulator};
pub use exec::{run_protocol, run_protocol_checked};
pub use graph::{PartyId, RestrictionGraph, MAX_PARTIES};
pub use input::{InputMatrix, Shape};
pub use message::{board_outputs, Label, MessageRecord, Outgoing, Recipient, Transcript};
pub use pattern::CommPattern;
pub use protocol::{Model, OutputContext, PartyContext, ProtocolSpec, Rules};
pub use truth_table::{Symmetry, TruthTable, MAX_TABLE_BITS};
pub use view::View;
