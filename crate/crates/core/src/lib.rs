//! Fair deletion problems on graphs.
//!
//! Deciding and minimizing the fair cost of vertex- or edge-deletion sets
//! whose removal (or the set itself) satisfies an FO/MSO-definable
//! property. The fair cost of a deleted set is the worst number of
//! deletions seen from any single vertex: for a vertex set `W` it is
//! `max_v |N(v) ∩ W|`, for an edge set `F` the maximum number of deleted
//! edges incident to one vertex.
//!
//! The crate provides:
//!
//! * [`graph`] — graph representation, text IO, neighborhood-diversity
//!   partitions and minimum vertex covers;
//! * [`logic`] — the FO/MSO1/MSO2 formula dialect with parser, counting
//!   desugaring, and the MSO2-to-MSO1 translation over a vertex cover;
//! * [`mc`] — model checking: a brute-force evaluator and a kernelized
//!   evaluator for bounded neighborhood diversity;
//! * [`shapes`] — the shape algebra for vertex sets and edge-set
//!   signatures, fair-cost evaluation, and representative enumeration;
//! * [`solvers`] — the two parameterized solvers, brute-force oracles, and
//!   an exact equitable 3-coloring search;
//! * [`reductions`] — generators for the equitable-coloring gadget
//!   instances plus a pruned reverse search.

pub mod graph;
pub mod logic;
pub mod mc;
pub mod reductions;
pub mod shapes;
pub mod solvers;
