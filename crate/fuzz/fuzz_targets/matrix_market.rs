#![no_main]
//! MatrixMarket reader: never panics, and anything it accepts survives a
//! write/read round trip unchanged.

use gk_kaczmarz::io::{read_matrix_market, write_matrix_market};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(a) = read_matrix_market(data) else {
        return;
    };
    assert!(a.row_norm_sq().iter().all(|&v| v > 0.0));
    let mut buf = Vec::new();
    write_matrix_market(&a, &mut buf).unwrap();
    let b = read_matrix_market(buf.as_slice()).expect("written matrix must parse");
    assert_eq!(a, b);
});
