//! Exact-arithmetic toolkit for body-and-hinge rigidity.
//!
//! The crate has two halves that check each other:
//!
//! * a combinatorial half ([`multigraph`], [`tree_packing`], [`decomposition`])
//!   that decides body-and-hinge rigidity of a multigraph `G` by packing
//!   `D = C(d+1,2)` edge-disjoint spanning trees into `(D-1)G`, and
//! * a geometric half ([`geometry`], [`rigidity_matrix`], [`realization`],
//!   [`molecular`]) that constructs panel-and-hinge frameworks over the
//!   rationals and certifies, by exact rank computation, that they attain
//!   the rank the combinatorics predicts.
//!
//! Everything is exact: graph surgeries are pure functions, all coordinates
//! are arbitrary-precision rationals, and every genericity assumption is
//! replaced by a draw-verify-resample loop.
//!
//! ```
//! use rigidkit_core::multigraph::{Dimension, Multigraph};
//! use rigidkit_core::tree_packing::deficiency;
//! use rigidkit_core::realization::realize_panel_hinge;
//!
//! let dim = Dimension::new(3)?;
//! let g = Multigraph::cycle(6);
//! assert_eq!(deficiency(&g, &dim).k, 0);       // 5*C6 packs 6 spanning trees
//! let out = realize_panel_hinge(&g, &dim, 0)?; // exact rank D(|V|-1) = 30
//! assert_eq!(out.rank, 30);
//! # Ok::<(), rigidkit_core::Error>(())
//! ```

// Matrix code reads better with explicit row/column indices.
#![allow(clippy::needless_range_loop)]

pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod molecular;
pub mod multigraph;
pub mod realization;
pub mod rigidity_matrix;
pub mod tree_packing;

pub use error::Error;
pub use multigraph::{Dimension, EdgeId, Multigraph, Partition, VertexId};
