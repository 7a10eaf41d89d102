//! File formats: MatrixMarket matrices and plain-text vectors.

mod mtx;
mod vector;

pub use mtx::{
    read_matrix_market, read_matrix_market_file, write_matrix_market, write_matrix_market_file,
    HEADER as MATRIX_MARKET_HEADER,
};
pub use vector::{read_vector, read_vector_file, write_vector, write_vector_file};
