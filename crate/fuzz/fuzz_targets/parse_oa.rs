#![no_main]

use frameproof::{verify_oa, OrthogonalArray};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(array) = text.parse::<OrthogonalArray>() {
        let emitted = array.to_string();
        let again: OrthogonalArray = emitted.parse().expect("emitted array reparses");
        assert_eq!(again, array);
        assert_eq!(again.to_string(), emitted);
        if array.runs() * array.constraints() <= 4096 && array.strength() <= 3 {
            let report = verify_oa(&array);
            assert_eq!(report.verdict, report.witness.is_none());
        }
    }
});
