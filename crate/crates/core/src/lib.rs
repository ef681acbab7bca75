//! Crooked planes in Minkowski 3-space: disjointness tests and foliations of
//! the region between two disjoint crooked planes.
//!
//! The building blocks, in dependency order:
//!
//! * [`lorentz`]: the Lorentzian form, cross product and null frames;
//! * [`geometry`]: crooked planes, piece membership and meshing;
//! * [`cone`] and [`disjoint`]: the stem-quadrant cone test for disjointness;
//! * [`quadrature`], [`nnls`] and [`foliation`]: directing paths, vertex
//!   curves and the foliation itself;
//! * [`oracle`]: brute-force mesh intersection, used for cross-checking;
//! * [`io`]: scene/foliation JSON and OBJ export.

pub mod cone;
pub mod disjoint;
pub mod error;
pub mod foliation;
pub mod geometry;
pub mod io;
pub mod lorentz;
pub mod nnls;
pub mod oracle;
pub mod quadrature;

pub use cone::{cone_contains, ConeMembership, ConicalHull};
pub use disjoint::{cone_a, consistently_oriented, crooked_disjoint, orient_pair, Sign, SignChoice, Verdict};
pub use error::{Error, Result};
pub use foliation::{
    build_foliation, interp_path, leaf, solve_vertex_path, validate_foliation, validate_path, DirectingPath, Foliation,
    SolverOptions, ValidationReport, VertexCurve,
};
pub use geometry::{crooked_contains, mesh_crooked_plane, CrookedPlane, Mesh, MinPoint, Piece, PieceLabel};
pub use io::{FoliationFile, FormatError, Scene};
pub use lorentz::{lorentz_cross, lorentz_dot, null_frame, CausalClass, LVec3, NullFrame};
pub use oracle::{crooked_intersect_oracle, Witness};
