//! Scratch probe: the degenerate inner solve of the deg-4 end node.

use scgldpc::protograph::Builtin;
use scgldpc::spectral::{constraint_exponent, r_of_delta, SpectralOptions};

fn main() {
    let e = Builtin::A7.ensemble();
    let opts = SpectralOptions::<f64>::default();
    let tb = e.tailbiting(10).unwrap();
    let (_, arg_tb) = r_of_delta(&tb, 0.17, &opts, None).unwrap();
    println!("position 9 vars: {:?}", &arg_tb[63..70]);

    let term = e.terminated(10).unwrap().protograph;
    let node = &term.constraints()[20];
    let words = term.node_codewords().unwrap()[20].clone();
    println!("node 20 degree {} words {:?}", node.degree(), words);
    let local: Vec<f64> = node.vars.iter().map(|&v| arg_tb[v]).collect();
    println!("node 20 local fractions {local:?}");
    let (a, u) = constraint_exponent(&words, node.degree(), &local, &opts);
    println!("a = {a}, u = {u:?}");
}
