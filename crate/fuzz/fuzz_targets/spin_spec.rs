#![no_main]
//! Fuzz the spin state-spec parser: arbitrary input must parse or fail
//! cleanly, never panic.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = macrocoh_cli::specs::parse_spin_spec(text);
    }
});
