//! Scenario-level verification and reports.
