#![no_main]

use libfuzzer_sys::fuzz_target;
use stratalab_cli::cache::parse_record;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(record) = parse_record(line) {
        assert_eq!(parse_record(&record.to_line()).as_ref().ok(), Some(&record));
        let _ = record.outcome();
    }
});
