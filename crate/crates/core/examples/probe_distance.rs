//! Scratch probe: tail-biting growth rates and free-distance bounds.

use scgldpc::protograph::Builtin;
use scgldpc::spectral::{free_distance_bounds, min_distance_growth_rate, SpectralOptions};

fn main() {
    let e = Builtin::A7.ensemble();
    let opts = SpectralOptions::<f64>::default();
    for lam in [1usize, 2, 4, 8, 10, 12] {
        let start = std::time::Instant::now();
        let tb = e.tailbiting(lam).unwrap();
        let d = min_distance_growth_rate(&tb, &opts).unwrap();
        println!("TB lambda={lam:2}  delta_min={d:.4}  [{:.1?}]", start.elapsed());
    }
    for l in [7usize, 10, 12] {
        let start = std::time::Instant::now();
        let t = e.terminated(l).unwrap();
        let d = min_distance_growth_rate(&t.protograph, &opts).unwrap();
        println!("TERM L={l:2}  delta_min={d:.4}  [{:.1?}]", start.elapsed());
    }
    let start = std::time::Instant::now();
    let b = free_distance_bounds(&e, 10, &opts).unwrap();
    println!(
        "T=10 bounds: lower={:.4} upper={:.4}  [{:.1?}]",
        b.lower,
        b.upper,
        start.elapsed()
    );
}
