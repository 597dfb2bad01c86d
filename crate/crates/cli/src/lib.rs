//! Library surface of the `ruin` command line tool: the chain document
//! format, result records, the parallel simulation driver and the
//! verification suites. The binary in `main.rs` is a thin dispatcher over
//! these modules, and the acceptance tests call them directly.

pub mod document;
pub mod record;
pub mod simulate;
pub mod verify;
