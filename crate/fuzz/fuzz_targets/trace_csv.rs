#![no_main]
//! Trace and comparison CSV readers; accepted rows must re-serialize.

use gk_kaczmarz::trace::{read_compare_csv, read_trace_csv, write_compare_csv, write_trace_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_trace_csv(data) {
        let mut buf = Vec::new();
        write_trace_csv(&rows, &mut buf).unwrap();
    }
    if let Ok(rows) = read_compare_csv(data) {
        let mut buf = Vec::new();
        write_compare_csv(&rows, &mut buf).unwrap();
    }
});
