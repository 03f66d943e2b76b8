use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stcq_core::metrics::{
    coherence_improvement, connectivity_ratio, effective_noise, entangled_fidelity, fidelity, fidelity_decay,
    CoherenceModel, DensityMatrix, NoiseModel, SpectralDensity,
};
use stcq_core::qubits::{monochromatic_graph, polychromatic_graph, CouplingMapConfig, QubitArray};
use stcq_core::{Harmonic, HarmonicSpectrum};

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Mixture of `rank` random pure states with random weights.
fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DensityMatrix {
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for w in weights {
        let v = random_vector(rng, dim);
        for i in 0..dim {
            for j in 0..dim {
                rows[i][j] += v[i] * v[j].conj() * (w / total);
            }
        }
    }
    // Exact Hermiticity and unit trace after rounding.
    for i in 0..dim {
        rows[i][i].im = 0.0;
        for j in 0..i {
            rows[i][j] = rows[j][i].conj();
        }
    }
    let trace: f64 = (0..dim).map(|i| rows[i][i].re).sum();
    for row in rows.iter_mut() {
        for z in row.iter_mut() {
            *z /= trace;
        }
    }
    DensityMatrix::new(rows).unwrap()
}

fn distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            s += (a.get(i, j) - b.get(i, j)).norm_sqr();
        }
    }
    s.sqrt()
}

#[test]
fn randomized_fidelity_symmetry_and_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let dim = rng.gen_range(2..=6);
        let (ra, rb) = (rng.gen_range(1..=dim), rng.gen_range(1..=dim));
        let rho = random_density(&mut rng, dim, ra);
        let sigma = random_density(&mut rng, dim, rb);
        let f = fidelity(&rho, &sigma).unwrap();
        let g = fidelity(&sigma, &rho).unwrap();
        assert!((f - g).abs() < 1e-10, "case {case}: {f} vs {g}");
        assert!((0.0..=1.0).contains(&f));
        assert!(distance(&rho, &sigma) > 1e-8 && f < 1.0 - 1e-10, "case {case}: F = {f}");
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10, "case {case}");
    }
}

#[test]
fn pure_states_reduce_to_overlap() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let dim = rng.gen_range(2..=5);
        let (u, v) = (random_vector(&mut rng, dim), random_vector(&mut rng, dim));
        let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let f = fidelity(
            &DensityMatrix::from_pure(&u).unwrap(),
            &DensityMatrix::from_pure(&v).unwrap(),
        )
        .unwrap();
        assert!((f - overlap.norm_sqr()).abs() < 1e-10);
    }
}

#[test]
fn mixed_state_against_closed_form() {
    // Commuting (diagonal) states: F = (sum sqrt(p_i q_i))^2.
    let p: [f64; 3] = [0.5, 0.3, 0.2];
    let q: [f64; 3] = [0.1, 0.6, 0.3];
    let diag = |w: &[f64]| {
        DensityMatrix::new(
            (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| Complex64::new(if i == j { w[i] } else { 0.0 }, 0.0))
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    };
    let expected: f64 = p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).sum::<f64>().powi(2);
    assert!((fidelity(&diag(&p), &diag(&q)).unwrap() - expected).abs() < 1e-12);
}

fn all_to_all_spectrum() -> HarmonicSpectrum {
    let harmonic = |n: i64, r: f64| Harmonic {
        n,
        f_hz: 5e9 + n as f64 * 1e9,
        re_r: r,
        im_r: 0.0,
        re_t: 0.0,
        im_t: 0.0,
        theta_r_rad: Some(0.0),
        power_r: r * r,
        power_t: 0.0,
        evanescent: false,
    };
    HarmonicSpectrum {
        f_0_hz: 5e9,
        f_mod_hz: 1e9,
        theta_i_rad: 0.0,
        truncation: 1,
        harmonics: vec![harmonic(-1, 0.0), harmonic(0, 0.4), harmonic(1, 0.1)],
    }
}

#[test]
fn grid_connectivity_gain() {
    let array = QubitArray::uniform(4, 4, 5e9, 1e6);
    let mono = monochromatic_graph(&array).unwrap();
    let poly = polychromatic_graph(&array, &all_to_all_spectrum(), &CouplingMapConfig::new(1e6)).unwrap();
    let r = connectivity_ratio(&mono, &poly, 1.0).unwrap();
    assert_eq!(mono.edges.len(), 24);
    assert_eq!(r.pairs_poly, 120);
    assert_eq!(r.c_ratio, 5.0);
    assert_eq!(r.d_poly, 1.0 / 5.0);
}

proptest! {
    #[test]
    fn coherence_monotone(t2 in 1e-7f64..1e-3, df in 0.0f64..1e8, gamma in 1e3f64..1e9, step in 1.01f64..10.0) {
        let base = coherence_improvement(&CoherenceModel { t2, delta_f: df, gamma_dec: gamma }).unwrap();
        let wider = coherence_improvement(&CoherenceModel { t2, delta_f: df * step + 1.0, gamma_dec: gamma }).unwrap();
        let noisier = coherence_improvement(&CoherenceModel { t2, delta_f: df + 1.0, gamma_dec: gamma * step }).unwrap();
        let reference = coherence_improvement(&CoherenceModel { t2, delta_f: df + 1.0, gamma_dec: gamma }).unwrap();
        prop_assert!(wider > base);
        prop_assert!(noisier < reference);
        prop_assert!(base >= t2);
    }

    #[test]
    fn noise_suppression_monotone(sigma in 1e3f64..1e9, a in 0.0f64..5.0, b in 0.0f64..5.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let m = NoiseModel { s0: SpectralDensity::Constant { value: 1.0 }, sigma_bw: sigma };
        let sa = effective_noise(&m, 0.0, a * sigma).unwrap();
        let sb = effective_noise(&m, 0.0, -b * sigma).unwrap();
        prop_assert_eq!(sa < sb, a > b);
        prop_assert!(sa <= 1.0 && sb <= 1.0);
    }

    #[test]
    fn entangled_matches_decay_without_separation(f0 in 0.0f64..=1.0, t in 0.0f64..1e-4, t2 in 1e-6f64..1e-3) {
        let t2p = coherence_improvement(&CoherenceModel { t2, delta_f: 0.0, gamma_dec: 1e6 }).unwrap();
        prop_assert_eq!(entangled_fidelity(f0, t, t2p).unwrap(), f0 * fidelity_decay(t, t2).unwrap());
    }

    #[test]
    fn longer_coherence_gives_higher_fidelity(f0 in 0.01f64..=1.0, t in 1e-7f64..1e-4, t2 in 1e-6f64..1e-3, gain in 0.01f64..5.0) {
        let t2p = coherence_improvement(&CoherenceModel { t2, delta_f: gain * 1e6 / (2.0 * std::f64::consts::PI), gamma_dec: 1e6 }).unwrap();
        prop_assert!(entangled_fidelity(f0, t, t2p).unwrap() > entangled_fidelity(f0, t, t2).unwrap());
    }
}
