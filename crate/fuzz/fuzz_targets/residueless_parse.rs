#![no_main]

use libfuzzer_sys::fuzz_target;
use stratalab::ResiduelessSignature;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sig) = text.parse::<ResiduelessSignature>() {
        assert_eq!(sig.to_string().parse::<ResiduelessSignature>().as_ref(), Ok(&sig));
        assert_eq!(sig.zero(), sig.poles().iter().sum::<u64>());
    }
});
