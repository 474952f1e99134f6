#![no_main]

use cantor_spectra::treemap::TreeMappingSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = s.parse::<TreeMappingSpec>() {
        let again: TreeMappingSpec = spec.to_json().to_string().parse().expect("serialized spec reparses");
        assert_eq!(again.to_json(), spec.to_json());
    }
});
