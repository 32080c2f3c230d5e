#![no_main]

use frameproof::{Code, Document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(code) = text.parse::<Code>() {
        let emitted = code.to_string();
        let again: Code = emitted.parse().expect("emitted code reparses");
        assert_eq!(again, code);
        assert_eq!(again.to_string(), emitted);
    }
    if let Ok(doc) = text.parse::<Document>() {
        let again: Document = doc.to_string().parse().expect("emitted document reparses");
        assert_eq!(again, doc);
    }
});
