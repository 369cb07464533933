pub mod bem;
pub mod coupling;
pub mod fem;
pub mod geometry;
pub mod oracles;
pub mod special;
