#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(seqs) = radiobc::io::parse_seqset(text) {
            let formatted = radiobc::io::format_seqset(&seqs);
            assert_eq!(formatted, text);
            let reparsed = radiobc::io::parse_seqset(&formatted).expect("own output parses");
            assert_eq!(reparsed, seqs);
        }
    }
});
