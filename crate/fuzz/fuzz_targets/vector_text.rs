#![no_main]

use gk_kaczmarz::io::{read_vector, write_vector};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = read_vector(data) else {
        return;
    };
    assert!(v.iter().all(|x| x.is_finite()));
    let mut buf = Vec::new();
    write_vector(&v, &mut buf).unwrap();
    assert_eq!(read_vector(buf.as_slice()).unwrap(), v);
});
