#![no_main]
//! Flag values: variant names, window sizes and weightings.

use gk_kaczmarz::{Variant, Weighting, WindowSize};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(v) = data.parse::<Variant>() {
        assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
    }
    if let Ok(w) = data.parse::<WindowSize>() {
        assert_eq!(w.to_string().parse::<WindowSize>().unwrap(), w);
        if let WindowSize::Bounded(l) = w {
            assert!(l >= 1);
        }
    }
    let _ = data.parse::<Weighting>();
});
