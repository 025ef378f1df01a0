//! Cell complexes: polygonal 2-complexes, formal products, simplicial
//! complexes, vertex links, and integral homology.

pub mod homology;
pub mod link;
pub mod polygonal;
pub mod simplicial;

pub use homology::{homology, smith_elementary_divisors, HomologyGroup, HomologyProfile};
pub use link::{
    join_links, product_link, vertex_link, CornerRef, EdgeEnd, EndKind, LinkComplex, LinkEdge,
    LinkVertex, Polarity,
};
pub use polygonal::{
    validate_complex, ComplexError, ComplexViolation, Dir, Edge, EdgeId, Face, FaceId,
    PolygonalComplex, ProductComplex, SignedEdge, VertexId,
};
pub use simplicial::{SimplicialComplex, Trilean};
