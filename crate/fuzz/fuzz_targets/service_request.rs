#![no_main]

use cxo_service::api::{NewGame, PriceRequest, StepRequest};
use cxo_service::game::SessionRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(req) = serde_json::from_slice::<PriceRequest>(data) {
        let _ = req.market.params();
    }
    if let Ok(req) = serde_json::from_slice::<NewGame>(data) {
        let _ = req.market.params();
    }
    let _ = serde_json::from_slice::<StepRequest>(data);
    let _ = serde_json::from_slice::<Vec<SessionRecord>>(data);
});
