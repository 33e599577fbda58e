//! Scratch probe: terminated A7 BP thresholds versus coupling length.

use scgldpc::density_evolution::{bp_threshold, DeOptions};
use scgldpc::protograph::Builtin;

fn main() {
    let e = Builtin::A7.ensemble();
    let opts = DeOptions::default();
    for l in [1usize, 2, 3, 5, 10, 20, 50, 100] {
        let start = std::time::Instant::now();
        let t = e.terminated(l).unwrap();
        let eps = bp_threshold(&t.protograph, 1e-4f64, &opts).unwrap();
        let r = *t.rate.numer() as f64 / *t.rate.denom() as f64;
        println!(
            "L={l:4}  R_L={r:+.5}  eps_BP={eps:.5}  delta={}  [{:.1?}]",
            t.delta,
            start.elapsed()
        );
    }
}
