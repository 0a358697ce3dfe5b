//! Yarn-level topology of weft-knitted fabric from a grid of stitch
//! instructions.
//!
//! A pattern is written into a grid of contact neighborhoods ([`CnGrid`]),
//! the yarn is traced through it ([`follow_the_yarn`]) and the result is
//! turned into a [`TopologyGraph`] that can be rendered or serialized.
//!
//! ```
//! use topoknit::{topology, StitchPattern};
//!
//! let p = StitchPattern::parse("K K\nK K").unwrap();
//! let (grid, path, graph) = topology(&p).unwrap();
//! assert_eq!((grid.width(), grid.height()), (4, 3));
//! assert_eq!(path.len(), 16);
//! assert_eq!(graph.contacts().count(), 12);
//! ```

pub mod bench;
pub mod error;
pub mod eval;
pub mod graph;
pub mod grid;
pub mod oracle;
pub mod pattern;
pub mod random;
pub mod render;
pub mod suite;

pub use error::{Error, Result};
pub use eval::{evaluate, follow_the_yarn, YarnPath, YarnPathEntry};
pub use graph::{build_graph, row_snapshots, topology, NodeKind, TopologyGraph};
pub use grid::{Actualization, CnCell, CnGrid, Movement, StitchMark};
pub use pattern::{validate, Stitch, StitchPattern, ValidationReport};
pub use render::{to_dot, to_svg, RenderStyle};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/patterns.md")]
    pub struct Patterns;
    #[doc = include_str!("../../../book/src/cn-grid.md")]
    pub struct CnGrid;
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub struct Evaluation;
    #[doc = include_str!("../../../book/src/graph.md")]
    pub struct Graph;
    #[doc = include_str!("../../../book/src/oracle.md")]
    pub struct Oracle;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
