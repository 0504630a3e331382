//! Transition diagrams: construction by the inductive recursion over the tower,
//! exhaustive verification, and transport of slices and open families through charts.

mod chart;
mod diagram;
mod generic;

pub use chart::{
    chart_independence_check, is_structured_at, j_independence_check, structure_profile, transport_open, BallSpec,
    Chart, ChartIndependenceReport, JForm, JIndependenceReport, Radius, UFamily,
};
pub use diagram::{
    build_transition, build_transition_with, depth_coherence, verify_td, CoherenceReport, CycloTower, TransitionDiagram,
};
pub use generic::{build_table, verify_table, DiagramTable, FiniteTower, TdAxiom, TdReport, TdViolation, TieBreak};
