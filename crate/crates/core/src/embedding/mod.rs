//! Hardware graphs, origin embeddings of subspace shapes, defect trimming
//! and the programming/readout rules that connect subproblems to hardware.

mod cover;
mod hardware;
mod io;
mod origin;
mod program;

pub use cover::{min_vertex_cover, Cover, EXACT_COVER_LIMIT};
pub use hardware::{DefectSpec, HardwareGraph};
pub use io::{read_embedding, write_embedding};
pub use origin::{cubic_embedding, make_origin_embeddings, pegasus_embedding, OriginEmbedding};
pub use program::{footprint, program, readout, ProgrammedProblem};
