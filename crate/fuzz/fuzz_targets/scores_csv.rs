#![no_main]

use libfuzzer_sys::fuzz_target;
use trendscape_cli::report::{comparison_table, parse_scores_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_scores_csv(text) {
            let _ = comparison_table(&rows).into_bytes();
        }
    }
});
