#![no_main]

use libfuzzer_sys::fuzz_target;

use dipeval::io::parse_label_set;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ls) = parse_label_set(text) {
        assert!(ls.contains("None"));
        assert_eq!(ls.index_of("None"), Some(0));
        // names are unique, so indices are stable
        for (i, class) in ls.classes.iter().enumerate() {
            assert_eq!(ls.index_of(&class.name), Some(i));
        }
    }
});
