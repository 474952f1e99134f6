use cantor_spectra::fourier::compute_mask_constants;
use cantor_spectra::treemap::{enumerate, nonspectrum_spec, slow_growth_spec, stats};
use cantor_spectra::MeasureParams;

#[test]
fn slow_growth_digit_bounds_up_to_ten_thousand() {
    for (q, b) in [(2u32, 4u32), (3, 6)] {
        let p = MeasureParams::new(q, b).unwrap();
        let mc = compute_mask_constants(&p, 1e-4).unwrap();
        let base = mc.c1().powi(-2).ln();
        let c = enumerate(&slow_growth_spec(&p, &mc).unwrap(), 10_001).unwrap();
        for e in &c.entries[2..] {
            let n = e.index as f64;
            let log_q = n.ln() / (q as f64).ln();
            let bound = if log_q >= 1.0 { log_q.ln() / base } else { 0.0 };
            let n_star = e.n_star.unwrap() as f64;
            let stem_len = e.word.as_ref().unwrap().len() as f64;
            assert!(n_star <= bound + 1e-12, "N*_{} = {n_star} > {bound}", e.index);
            assert!(e.n_last as f64 <= stem_len + n_star, "index {}", e.index);
            assert!(e.n_last as f64 <= log_q + bound + 1.0, "index {}", e.index);
        }
    }
}

#[test]
fn nonspectrum_tails_grow_like_the_log() {
    let p = MeasureParams::new(2, 4).unwrap();
    let mc = compute_mask_constants(&p, 1e-4).unwrap();
    let c = enumerate(&nonspectrum_spec(&p, 1.0, &mc).unwrap(), 1 << 12).unwrap();
    let s = stats(&c, 12).unwrap();
    for n in 1..12 {
        let target = 2.0 * (n as f64).ln() / (1.0 / mc.c2()).ln();
        assert!(s.lstar(n).unwrap() as f64 >= target - 1e-12, "level {n}");
    }
}
