//! Holds the end-to-end acceptance test target; no library code.
