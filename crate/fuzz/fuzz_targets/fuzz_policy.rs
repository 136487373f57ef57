#![no_main]

use libfuzzer_sys::fuzz_target;

use dipeval::io::parse_policy;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(policy) = parse_policy(text) {
        // the distance bound never exceeds the string length
        for len in 0..64usize {
            let bound = policy.max_lev_distance(len);
            assert!(bound <= len.max(1));
        }
    }
});
