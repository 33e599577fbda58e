//! Scratch probe: maximizer profiles near the zero crossing for
//! tail-biting vs terminated couplings.

use scgldpc::protograph::Builtin;
use scgldpc::spectral::{r_of_delta, SpectralOptions};

fn show(label: &str, arg: &[f64]) {
    // Per-time-position sums (7 variables per position).
    let sums: Vec<f64> = arg.chunks(7).map(|c| c.iter().sum::<f64>()).collect();
    let s: Vec<String> = sums.iter().map(|x| format!("{x:.2}")).collect();
    println!("{label}: positions [{}]", s.join(" "));
}

fn main() {
    let e = Builtin::A7.ensemble();
    let opts = SpectralOptions::<f64>::default();
    let delta = 0.17;

    let tb = e.tailbiting(10).unwrap();
    let (r_tb, arg_tb) = r_of_delta(&tb, delta, &opts, None).unwrap();
    println!("TB lambda=10: r({delta}) = {r_tb:.6}");
    show("TB", &arg_tb);

    let term = e.terminated(10).unwrap().protograph;
    let (r_t, arg_t) = r_of_delta(&term, delta, &opts, None).unwrap();
    println!("TERM L=10: r({delta}) = {r_t:.6}");
    show("TERM", &arg_t);

    // Feed the TB profile into the terminated evaluation as a start.
    let (r_cross, arg_cross) = r_of_delta(&term, delta, &opts, Some(&arg_tb)).unwrap();
    println!("TERM with TB warm: r({delta}) = {r_cross:.6}");
    show("TERM+warm", &arg_cross);
}
