// temporary probe for compression drift rates
use num_complex::Complex64 as C64;
use qgel::model::Word;
use qgel::primal::{free_state_functional, CompressionConfig};
use std::collections::BTreeMap;

fn entropy_fn(eigs: &[f64], ov: &[f64]) -> f64 {
    -eigs
        .iter()
        .zip(ov)
        .map(|(&l, &w)| if l > 0.0 { l * l.ln() * w } else { 0.0 })
        .sum::<f64>()
}

fn probe(label: &str, m: &BTreeMap<Word, C64>, radii: &[u32]) {
    println!("--- {label} ---");
    for &radius in radii {
        let cfg = CompressionConfig { radius, growth_check: false };
        let t0 = std::time::Instant::now();
        match free_state_functional(m, cfg, 1e-3, &entropy_fn) {
            Ok(ev) => println!(
                "  R={radius:3} dim={:5} H={:+.9}  ({:.2?})",
                ev.dim,
                ev.value,
                t0.elapsed()
            ),
            Err(e) => {
                println!("  R={radius:3} error: {e}");
                break;
            }
        }
    }
}

fn main() {
    for (n, radii) in [
        (2u32, vec![2u32, 4, 8, 16, 32, 64, 128]),
        (3, vec![2, 4, 8, 16]),
        (4, vec![2, 4, 8]),
        (5, vec![2, 4, 8]),
        (6, vec![2, 4]),
    ] {
        let c = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        let m: BTreeMap<Word, C64> =
            (1..=n as i32).map(|j| (Word::reduced(&[j]).unwrap(), c)).collect();
        probe(&format!("leinert n={n}"), &m, &radii);
    }

    let coeffs = [0.31, -0.52, 0.63];
    let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let m: BTreeMap<Word, C64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| (Word::reduced(&[(j + 1) as i32]).unwrap(), C64::new(c / norm, 0.0)))
        .collect();
    println!("(l1 norm probe)");
    for &radius in &[2u32, 4, 8] {
        let cfg = CompressionConfig { radius, growth_check: false };
        let t0 = std::time::Instant::now();
        match free_state_functional(&m, cfg, 1e-3, &|eigs: &[f64], ov: &[f64]| {
            eigs.iter().zip(ov).map(|(&l, &w)| l.max(0.0).sqrt() * w).sum::<f64>()
        }) {
            Ok(ev) => println!(
                "  R={radius:3} dim={:5} |f|_1={:.9}  ({:.2?})",
                ev.dim,
                ev.value,
                t0.elapsed()
            ),
            Err(e) => {
                println!("  R={radius:3} error: {e}");
                break;
            }
        }
    }

    // identity + generators, 2 generators: full-ball component
    let mut m2: BTreeMap<Word, C64> = BTreeMap::new();
    m2.insert(Word::identity(), C64::new(0.4, 0.1));
    m2.insert(Word::reduced(&[1]).unwrap(), C64::new(0.5, -0.2));
    m2.insert(Word::reduced(&[2]).unwrap(), C64::new(-0.3, 0.3));
    m2.insert(Word::reduced(&[-1]).unwrap(), C64::new(0.2, 0.25));
    let nn: f64 = m2.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let m2: BTreeMap<Word, C64> = m2.into_iter().map(|(w, c)| (w, c / nn)).collect();
    probe("random full-ball g=2 (entropy)", &m2, &[2, 4, 6]);
}
