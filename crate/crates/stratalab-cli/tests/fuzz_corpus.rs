//! Replays the checked-in cache-record fuzz seeds.

use std::fs;
use std::path::PathBuf;

use stratalab_cli::cache::parse_record;

#[test]
fn cache_record_seeds() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/cache_record_parse");
    let mut parsed = Vec::new();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if let Ok(record) = parse_record(&text) {
            assert_eq!(parse_record(&record.to_line()).unwrap(), record);
            record.outcome().unwrap();
            parsed.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    assert_eq!(parsed, ["valid"]);
}
