#![no_main]

use libfuzzer_sys::fuzz_target;
use rotovac_core::units::{Config, Preset};

fuzz_target!(|data: &[u8]| {
    let Ok(name) = std::str::from_utf8(data) else { return };
    match name.parse::<Preset>() {
        Ok(p) => {
            assert_eq!(p.name(), name);
            assert!(Config::default().material(name).is_ok());
        }
        Err(_) => assert!(Config::default().material(name).is_err()),
    }
});
