//! Exact tools for counting rational and integral points on conics lying on
//! cubic surfaces: polynomial arithmetic, Chow/Cayley forms in Plücker
//! coordinates, heights, Hilbert-Samuel bookkeeping, point enumeration and the
//! determinant method.

pub mod linalg;
pub mod poly;
pub mod arith;
pub mod cayley;
pub mod cubic;
pub mod heights;
pub mod hilbert;
pub mod report;
pub mod count;
pub mod detmethod;
