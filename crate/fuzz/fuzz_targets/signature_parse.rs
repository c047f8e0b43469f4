#![no_main]

use libfuzzer_sys::fuzz_target;
use stratalab::Signature;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sig) = text.parse::<Signature>() {
        // the display form parses back to the same value
        assert_eq!(sig.to_string().parse::<Signature>().as_ref(), Ok(&sig));
    }
});
