//! Scratch probe: terminated shape from an interior flat-bump start.

use scgldpc::protograph::Builtin;
use scgldpc::spectral::{r_of_delta, SpectralOptions};

fn main() {
    let e = Builtin::A7.ensemble();
    let opts = SpectralOptions::<f64>::default();
    let term = e.terminated(10).unwrap().protograph;
    let delta = 0.17;
    // Flat bump over positions 2..7 (vars 14..49), height delta*70/35.
    let mut warm = vec![1e-9f64; 70];
    for v in 14..49 {
        warm[v] = 0.34;
    }
    let (r, arg) = r_of_delta(&term, delta, &opts, Some(&warm)).unwrap();
    println!("TERM r(0.17) with interior warm = {r:.6}");
    let sums: Vec<String> = arg
        .chunks(7)
        .map(|c| format!("{:.2}", c.iter().sum::<f64>()))
        .collect();
    println!("argmax positions [{}]", sums.join(" "));
}
