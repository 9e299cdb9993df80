#![no_main]

use libfuzzer_sys::fuzz_target;
use opembed::embed::classify;
use opembed::specfile::SpecFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = SpecFile::parse(text) else {
        return;
    };
    let Ok(op) = spec.to_operator() else {
        return;
    };
    // classification is cubic in the truncation; keep iterations cheap
    if op.dim().is_some_and(|n| n <= 64) {
        let _ = classify(&op);
    }
});
