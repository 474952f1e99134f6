#![no_main]

use cantor_spectra::numtheory::parse_integer_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_integer_list(s) {
        let joined = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(parse_integer_list(&joined).unwrap(), v);
    }
});
