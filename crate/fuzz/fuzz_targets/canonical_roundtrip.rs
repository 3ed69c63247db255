#![no_main]

use libfuzzer_sys::fuzz_target;
use trendscape::dataset::{parse_trends_csv, to_canonical_csv};

// anything that parses must survive a trip through the canonical form
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(d) = parse_trends_csv(text) else {
        return;
    };
    let again = parse_trends_csv(&to_canonical_csv(&d)).expect("canonical output parses");
    assert_eq!(d.keywords(), again.keywords());
    assert_eq!(d.time_axis(), again.time_axis());
    for (a, b) in d.series().iter().zip(again.series()) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(x == y || (x.is_nan() && y.is_nan()));
        }
    }
});
