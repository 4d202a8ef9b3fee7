//! Nowhere-zero 8-flows: the case analysis on 3-edge-colored cubic graphs,
//! vertex blow-ups that reduce the general case to it, and the pipeline
//! tying both together.

mod blowup;
mod cubic;
mod pipeline;

pub use blowup::{blow_up_vertex, expand_to_cubic, BlowUpCase, BlowUpRecord};
pub use cubic::{classify_parity, cubic_8_flow, cubic_8_flow_with_budget, CasePath, ColorClasses, CubicCaseTranscript};
pub use pipeline::{eight_flow, eight_flow_with_budget, ComponentRoute, ComponentTranscript, EightFlowTranscript};
