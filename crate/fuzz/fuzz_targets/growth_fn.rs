#![no_main]

use cantor_spectra::growth::GrowthFn;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = s.parse::<GrowthFn>() {
        for r in [1.0, 2.0, 16.0, 1e6] {
            let _ = g.eval(r);
        }
    }
});
