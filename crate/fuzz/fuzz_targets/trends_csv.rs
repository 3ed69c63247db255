#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(d) = trendscape::dataset::parse_trends_csv(text) {
            let _ = trendscape::dataset::validate(&d);
        }
    }
});
