//! Divisor minima, Bryuno partial sums, the scale sequences and the cutoff
//! partition for the golden-mean frequency pair.
//!
//! Run: cargo run --release --example smalldiv_scales

use lindstedt::smalldiv::{alpha_m, bryuno_partial, Frequency, ScaleSystem};

fn main() {
    let budget = 50_000_000;
    let freq = Frequency::golden2(14, budget).expect("golden pair is non-resonant");
    println!("omega = {:?}", freq.omega());
    println!("\n m   alpha_m           minimizer        Bryuno partial");
    for m in 0..=12 {
        let e = alpha_m(&freq, m, budget).unwrap();
        let b = bryuno_partial(&freq, m, budget).unwrap();
        println!("{:2}   {:<16.12}  {:<15}  {:.12}", m, e.value, format!("{:?}", e.minimizer), b);
    }

    let scales = ScaleSystem::build(freq, 8, 16, budget).unwrap();
    println!("\nscale sequences: m_n = {:?}", scales.m_seq());
    println!("                 p_n = {:?}", scales.p_seq());
    println!("halving failures: {:?}", scales.halving_failures());
    for n in 0..scales.m_seq().len() - 1 {
        let a = scales.alpha_scale(n as i64).unwrap();
        let a_next = scales.alpha_scale(n as i64 + 1).unwrap();
        println!(
            "  alpha[m_{n}] = {a:.6e}  ->  alpha[m_{}] = {a_next:.6e}  (ratio {:.3})",
            n + 1,
            a_next / a
        );
    }

    // partition of unity across the admissible band
    let lo = scales.alpha_scale(8).unwrap() / 8.0;
    let hi = scales.alpha_scale(0).unwrap();
    let mut worst = 0.0f64;
    for i in 0..5000 {
        let x = lo * (hi / lo).powf(i as f64 / 4999.0);
        worst = worst.max((scales.partition_sum(x).unwrap() - 1.0).abs());
    }
    println!("\npartition-of-unity deviation on [{lo:.3e}, {hi:.3e}]: {worst:.3e}");
    for n in 0..=4usize {
        let (l, h) = scales.psi_support(n).unwrap();
        println!("  support of member {n}: ({l:.6e}, {h:.6e})");
    }
}
