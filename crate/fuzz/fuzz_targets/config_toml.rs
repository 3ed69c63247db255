#![no_main]

use libfuzzer_sys::fuzz_target;
use trendscape_cli::config::{Overrides, PipelineConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(o) = Overrides::from_toml_str(text) {
            let _ = PipelineConfig::resolve(Overrides::default(), Some(o));
        }
    }
});
