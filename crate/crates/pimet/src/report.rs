//! Report schema and CSV flattening.
