#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(fam) = radiobc::io::parse_setfam(text) {
            // accepted input is canonical: it must round-trip byte-exactly
            let formatted = radiobc::io::format_setfam(&fam);
            assert_eq!(formatted, text);
            let reparsed = radiobc::io::parse_setfam(&formatted).expect("own output parses");
            assert_eq!(reparsed, fam);
        }
    }
});
