#![no_main]

use libfuzzer_sys::fuzz_target;
use photon_filter::experiment::parse_experiment;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match parse_experiment(text) {
        Ok(parsed) => {
            assert!(parsed.spec.n >= 1);
            assert!((0.0..=1.0).contains(&parsed.spec.eta));
        }
        Err(e) => assert!(e.to_string().contains(&format!("line {}", e.line))),
    }
});
