#![no_main]

use frameproof::{ConstructionPlan, PlanStep};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(plan) = text.parse::<ConstructionPlan>() {
        let line = plan.to_line();
        let again: ConstructionPlan = line.parse().expect("emitted plan reparses");
        assert_eq!(again, plan);
        assert_eq!(again.to_line(), line);
        let trace = plan.trace().expect("parsed plans trace");
        assert_eq!(trace.last().map(|&(q, _)| q), Some(plan.target.q));
    }
    for token in text.split_whitespace() {
        if let Ok(step) = token.parse::<PlanStep>() {
            assert_eq!(step.to_string().parse::<PlanStep>(), Ok(step));
        }
    }
});
