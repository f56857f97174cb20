//! The formal expansion of the reference system through order four:
//! table sizes, sample coefficients, zero modes and the range identity.
//!
//! Run: cargo run --release --example series_expansion

use lindstedt::fourier::TrigPoly;
use lindstedt::series::{compute_series, range_identity_defect};
use lindstedt::smalldiv::Frequency;

fn main() {
    let freq = Frequency::golden2(12, 50_000_000).unwrap();
    let mut f = TrigPoly::new(2);
    f.add_cos(vec![1, 0], 1, 1.0); // cos(a1 + b)
    f.add_cos(vec![0, 1], 0, 1.0); // cos(a2)
    f.add_cos(vec![0, 0], 1, 1.0); // cos(b)

    let k_max = 4;
    let table = compute_series(&f, &freq, k_max).unwrap();

    println!("expansion of the reference system to order {k_max}\n");
    for k in 1..=k_max {
        let modes = table.modes_at_order(k);
        println!("order {k}: {} active fast modes, scale {:.3e}", modes.len(), table.order_scale(k));
    }

    let nu = vec![1i64, 0];
    let a1 = &table.a(1, &nu).unwrap()[0];
    println!("\nfirst-order fast coefficient at mode {nu:?} (slow harmonics):");
    for (m, c) in a1.iter() {
        println!("  harmonic {m:+}: {c:.6}");
    }

    println!("\nzero modes:");
    for k in 0..=k_max {
        let g = table.zero_mode_beta(k);
        let za = table.zero_mode_alpha(k);
        let za_norm = za.iter().map(|p| p.norm_inf()).fold(0.0f64, f64::max);
        println!(
            "  order {k}: slow |G| = {:.3e} (mean {:.1e}), fast cancellation residue {:.1e}",
            g.norm_inf(),
            g.coeff(0).norm(),
            za_norm
        );
    }
    println!("\nleading bifurcation function at a few phases:");
    let g0 = table.zero_mode_beta(0);
    for b0 in [0.0f64, 0.5, 1.5707963, 3.1415927] {
        println!("  G(beta0 = {b0:.4}) = {:+.6e}", g0.eval(b0).re);
    }

    println!(
        "\nrange identity re-derived from the stored table: defect {:.3e}",
        range_identity_defect(&table, &freq)
    );

    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    let out = std::env::temp_dir().join("lindstedt_series_example.csv");
    std::fs::write(&out, csv).unwrap();
    println!("coefficient table written to {}", out.display());
}
