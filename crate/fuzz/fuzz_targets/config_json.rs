#![no_main]

use libfuzzer_sys::fuzz_target;
use rotovac_core::units::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = Config::from_json_str(text) else { return };
    // an accepted config resolves everything it declares
    let consts = config.constants().expect("validated constants");
    assert!(consts.hbar > 0.0 && consts.c > 0.0);
    for name in config.materials.keys() {
        let m = config.material(name).expect("validated material");
        assert!(m.wave_speed > 0.0 && m.wave_speed <= consts.c);
    }
    let text = serde_json::to_string(&config).expect("serializes");
    assert_eq!(Config::from_json_str(&text).expect("round trip"), config);
});
