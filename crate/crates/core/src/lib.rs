//! Sections of graph configuration spaces, made computable.
//!
//! The crate builds the discrete cube-complex model `K_n(G)` of the ordered
//! configuration space `Conf_n(G)` of a finite graph, computes how complement
//! components are carried along basic paths, searches for consistent systems
//! of components, and constructs explicit identifying functions (maps
//! `Conf_n(G) -> G` avoiding every token).
//!
//! Everything here is pure and allocation-only; file formats and the CLI live
//! in the `confsect` crate.
#![no_std]

extern crate alloc;

pub mod builders;
pub mod catalog;
pub mod complex;
pub mod geometry;
pub mod graph;
pub mod rational;
pub mod search;
pub mod transitions;
pub mod unionfind;
pub mod verify;

pub use complex::{Face, OrientedEdge, Skeleton};
pub use geometry::{Complement, Component, Configuration, Piece, Point};
pub use graph::{CoreClass, End, EdgeId, Graph, GraphError, GraphSpec, VertexId};
pub use rational::Q;
