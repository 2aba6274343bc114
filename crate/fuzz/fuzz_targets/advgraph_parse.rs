#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(adv) = radiobc::io::parse_advgraph(text) {
            let formatted = radiobc::io::format_advgraph(&adv);
            assert_eq!(formatted, text);
            let reparsed = radiobc::io::parse_advgraph(&formatted).expect("own output parses");
            assert_eq!(reparsed, adv);
        }
    }
});
