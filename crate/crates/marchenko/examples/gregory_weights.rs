//! Generate Gregory weight vectors and demonstrate their accuracy.
//!
//! ```sh
//! cargo run --release --example gregory_weights
//! ```

use marchenko::quadrature::{gregory_weights, integrate, Sidedness};
use num_complex::Complex64 as C64;

fn main() {
    println!("two-sided edge coefficients (interior weights are exactly 1):");
    for n in 1..=6 {
        let w = gregory_weights(n, 2 * n + 8, Sidedness::TwoSided).unwrap();
        let edge: Vec<String> = w.weights[..n].iter().map(|x| format!("{x:.12}")).collect();
        println!("  n = {n} (exact through degree {}): [{}]", w.exact_degree, edge.join(", "));
    }

    println!("\none-sided n = 3 on 8 subintervals:");
    let w = gregory_weights(3, 8, Sidedness::LeftSided).unwrap();
    println!(
        "  [{}]",
        w.weights
            .iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    );

    // convergence on a smooth integral: errors against e - 1 on [0, 1]
    let exact = std::f64::consts::E - 1.0;
    println!("\nintegral of e^x over [0,1], error vs subinterval count:");
    println!("  M      n=1          n=2          n=4          n=6");
    for m in [16usize, 32, 64, 128] {
        let h = 1.0 / m as f64;
        let samples: Vec<C64> = (0..=m)
            .map(|j| C64::new((j as f64 * h).exp(), 0.0))
            .collect();
        let mut row = format!("  {m:<5}");
        for n in [1usize, 2, 4, 6] {
            let w = gregory_weights(n, m, Sidedness::TwoSided).unwrap();
            let err = (integrate(&samples, h, &w).unwrap().re - exact).abs();
            row.push_str(&format!("{err:.3e}  "));
        }
        println!("{row}");
    }
}
