//! Test support shared by the workspace's integration and acceptance tests.
//!
//! Everything here is written independently of the code under test: the
//! oracles recompute results from first principles and the checkers parse
//! generated output with their own small grammars.

pub mod corpus;
pub mod css;
pub mod gen;
pub mod html;
pub mod oracle;
