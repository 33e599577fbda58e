//! Scratch probe: inspect the outer maximizer on the all-SPC (2,7)
//! protograph.

use scgldpc::gf2::ConstraintCode;
use scgldpc::protograph::{GldpcProtograph, IntMatrix};
use scgldpc::spectral::{constraint_exponent, r_of_delta, SpectralOptions};
use std::sync::Arc;

fn main() {
    let base = IntMatrix::ones(2, 7);
    let code = Arc::new(ConstraintCode::single_parity_check(7).unwrap());
    let maps = vec![(0..7).collect::<Vec<_>>(); 2];
    let proto =
        GldpcProtograph::from_base(&base, &[code.clone(), code.clone()], &maps, vec![false; 7])
            .unwrap();

    let opts = SpectralOptions::default();
    let delta = 0.05f64;
    let (r, arg) = r_of_delta(&proto, delta, &opts, None).unwrap();
    println!("r({delta}) = {r}");
    println!("argmax = {arg:?}");
    println!("mean(argmax) = {}", arg.iter().sum::<f64>() / 7.0);

    // Re-evaluate the claimed objective by explicit inner solves.
    let words = code.codewords().unwrap();
    let local: Vec<f64> = arg.clone();
    let (a, u) = constraint_exponent(&words, 7, &local, &opts);
    println!("a_c(argmax) = {a}, u = {u:?}");
    // Independent slow check of the inner value: random-restart
    // coordinate descent at high precision.
    let f = |u: &[f64]| -> f64 {
        let mut z = 0.0f64;
        for &w in &words {
            let s: f64 = (0..7).filter(|&b| w >> b & 1 == 1).map(|b| u[b]).sum();
            z += s.exp();
        }
        z.ln() - local.iter().zip(u).map(|(&d, &x)| d * x).sum::<f64>()
    };
    let mut best = f(&u);
    let mut uu = u.clone();
    let mut improved = true;
    while improved {
        improved = false;
        for b in 0..7 {
            for step in [1.0, 0.1, 0.01, 0.001, 1e-4, 1e-5] {
                for dir in [-1.0, 1.0] {
                    let mut t = uu.clone();
                    t[b] += dir * step;
                    let v = f(&t);
                    if v < best - 1e-13 {
                        best = v;
                        uu = t;
                        improved = true;
                    }
                }
            }
        }
    }
    println!("inner refined value = {best}");

    let entropy = |x: f64| -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            -(1.0 - x) * (1.0 - x).ln() - x * x.ln()
        }
    };
    let total = 2.0 * best - local.iter().map(|&d| entropy(d)).sum::<f64>();
    println!("independent objective/n_v = {}", total / 7.0);
}
