use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stcq_core::floquet::{solve_slab, Harmonic, HarmonicSpectrum, IncidentWave, SolverConfig};
use stcq_core::modulation::ModulationProfile;
use stcq_core::qubits::{
    evolve, monochromatic_graph, polychromatic_graph, Basis, CouplingGraph, CouplingMapConfig, Edge, EvolveConfig,
    Frame, PureState, QubitArray,
};

type Dense = Vec<Vec<Complex64>>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Dense H built directly from the edge list, independent of the crate's
/// sparse assembly. Static graphs only: rotating frame needs zero detunings,
/// lab frame needs m = 0.
fn dense_hamiltonian(graph: &CouplingGraph, array: &QubitArray, basis: Basis, frame: Frame) -> Dense {
    let n = array.len();
    let mean: f64 = (0..n).map(|q| array.omega(q)).sum::<f64>() / n as f64;
    let energy = |q: usize| match frame {
        Frame::Rotating => 0.0,
        Frame::Lab => array.omega(q) - mean,
    };
    match basis {
        Basis::SingleExcitation => {
            let mut h = vec![vec![zero(); n]; n];
            for q in 0..n {
                h[q][q] = Complex64::new(energy(q), 0.0);
            }
            for e in &graph.edges {
                let g = Complex64::new(2.0 * PI * e.g_hz, 0.0);
                h[e.b][e.a] += g;
                h[e.a][e.b] += g;
            }
            h
        }
        Basis::FullHilbert => {
            let dim = 1usize << n;
            let mut h = vec![vec![zero(); dim]; dim];
            for (s, row) in h.iter_mut().enumerate() {
                let e: f64 = (0..n).filter(|&q| s & (1 << q) != 0).map(energy).sum();
                row[s] = Complex64::new(e, 0.0);
            }
            for e in &graph.edges {
                let g = Complex64::new(2.0 * PI * e.g_hz, 0.0);
                for s in 0..dim {
                    let (ia, ib) = (s & (1 << e.a) != 0, s & (1 << e.b) != 0);
                    if ia && !ib {
                        let t = s - (1 << e.a) + (1 << e.b);
                        h[t][s] += g;
                        h[s][t] += g;
                    }
                }
            }
            h
        }
    }
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// exp(-i H t) by scaling and squaring a 30-term Taylor series.
fn expm(h: &Dense, t: f64) -> Dense {
    let n = h.len();
    let norm = h
        .iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(0.0, -t / 2f64.powi(squarings as i32));
    let a: Dense = h.iter().map(|r| r.iter().map(|z| z * scale).collect()).collect();
    let mut result: Dense = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Complex64::new(1.0, 0.0) } else { zero() })
                .collect()
        })
        .collect();
    let mut term = result.clone();
    for k in 1..=30 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

fn apply(u: &Dense, x: &[Complex64]) -> Vec<Complex64> {
    u.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn random_state(rng: &mut ChaCha8Rng, basis: Basis, qubits: usize) -> PureState {
    let dim = basis.dimension(qubits).unwrap();
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in amps.iter_mut() {
        *z /= norm;
    }
    PureState::new(basis, qubits, amps).unwrap()
}

#[test]
fn resonant_rabi_full_transfer() {
    let g = 2e6;
    let array = QubitArray::uniform(1, 2, 5e9, g);
    let graph = monochromatic_graph(&array).unwrap();
    let state = PureState::excited(Basis::SingleExcitation, 2, 0).unwrap();
    let g_rad = 2.0 * PI * g;
    let traj = evolve(&state, &graph, &array, &EvolveConfig::new(PI / (2.0 * g_rad))).unwrap();
    let p = traj.final_state.excitation_probabilities();
    assert!((p[1] - 1.0).abs() < 1e-6, "P2 = {}", p[1]);
    for (t, pops) in traj.times.iter().zip(&traj.populations) {
        assert!((pops[1] - (g_rad * t).sin().powi(2)).abs() < 1e-9);
    }
}

#[test]
fn detuned_rabi_maximum() {
    let g = 1e6;
    let g_rad = 2.0 * PI * g;
    for delta_hz in [0.5e6, 1.5e6, 4e6] {
        let delta = 2.0 * PI * delta_hz;
        let array = QubitArray::new(1, 2, vec![5e9, 5e9 + delta_hz], g);
        let graph = monochromatic_graph(&array).unwrap();
        let state = PureState::excited(Basis::SingleExcitation, 2, 0).unwrap();
        let omega = (g_rad * g_rad + delta * delta / 4.0).sqrt();
        let expected = g_rad * g_rad / (omega * omega);
        let config = EvolveConfig::new(PI / (2.0 * omega)).with_frame(Frame::Lab);
        let traj = evolve(&state, &graph, &array, &config).unwrap();
        let p = traj.final_state.excitation_probabilities()[1];
        assert!((p - expected).abs() < 1e-6, "delta {delta_hz}: {p} vs {expected}");
        let peak = traj.populations.iter().map(|p| p[1]).fold(0.0, f64::max);
        assert!(peak <= expected + 1e-9);
    }
}

#[test]
fn static_graphs_match_dense_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..50 {
        let qubits = rng.gen_range(2..=4usize);
        let (rows, cols) = if qubits == 4 && rng.gen_bool(0.5) {
            (2, 2)
        } else {
            (1, qubits)
        };
        let frame = if rng.gen_bool(0.5) { Frame::Lab } else { Frame::Rotating };
        let basis = if rng.gen_bool(0.5) {
            Basis::FullHilbert
        } else {
            Basis::SingleExcitation
        };
        let f_q: Vec<f64> = (0..qubits).map(|_| 5e9 + rng.gen_range(-20e6..20e6)).collect();
        let array = QubitArray::new(rows, cols, f_q, 0.0);
        let mut edges = Vec::new();
        for a in 0..qubits {
            for b in a + 1..qubits {
                if rng.gen_bool(0.7) {
                    let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                    edges.push(Edge {
                        a,
                        b,
                        m: 0,
                        g_hz: rng.gen_range(0.1e6..5e6),
                        delta_omega: match frame {
                            Frame::Rotating => 0.0,
                            Frame::Lab => array.omega(b) - array.omega(a),
                        },
                    });
                }
            }
        }
        let graph = CouplingGraph {
            qubits,
            omega_mod: 0.0,
            edges,
        };
        let state = random_state(&mut rng, basis, qubits);
        let t_final = rng.gen_range(0.05e-6..1e-6);
        let mut config = EvolveConfig::new(t_final).with_frame(frame);
        config.samples = 5;
        let traj = evolve(&state, &graph, &array, &config).unwrap();
        assert!(
            traj.max_norm_drift < 1e-10,
            "case {case}: drift {}",
            traj.max_norm_drift
        );

        let h = dense_hamiltonian(&graph, &array, basis, frame);
        let expected = apply(&expm(&h, t_final), &state.amplitudes);
        let worst = expected
            .iter()
            .zip(&traj.final_state.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "case {case}: amplitude error {worst:e}");

        for (t, pops) in traj.times.iter().zip(&traj.populations) {
            let psi = apply(&expm(&h, *t), &state.amplitudes);
            let oracle = PureState {
                basis,
                qubits,
                amplitudes: psi,
            }
            .excitation_probabilities();
            for (p, q) in pops.iter().zip(&oracle) {
                assert!((p - q).abs() < 1e-8, "case {case} at t = {t:e}");
            }
        }
    }
}

fn synthetic_spectrum(f0: f64, fs: f64, amplitudes: &[(i64, f64)], n: usize) -> HarmonicSpectrum {
    let harmonics = (-(n as i64)..=n as i64)
        .map(|k| {
            let r = amplitudes.iter().find(|(m, _)| *m == k).map_or(0.0, |p| p.1);
            let f_hz = f0 + k as f64 * fs;
            Harmonic {
                n: k,
                f_hz,
                re_r: r,
                im_r: 0.0,
                re_t: 0.0,
                im_t: 0.0,
                theta_r_rad: (f_hz > 0.0).then_some(0.0),
                power_r: r * r,
                power_t: 0.0,
                evanescent: f_hz <= 0.0,
            }
        })
        .collect();
    HarmonicSpectrum {
        f_0_hz: f0,
        f_mod_hz: fs,
        theta_i_rad: 0.0,
        truncation: n,
        harmonics,
    }
}

/// Ladder at k * 20 MHz with slightly detuned top qubit, so that the graph
/// holds both resonant and off-resonant time-dependent couplings.
fn ladder_case() -> (QubitArray, CouplingGraph) {
    let mut array = QubitArray::ladder(1, 4, 20e6, 0.0);
    array.f_q[3] += 0.3e6;
    let spectrum = synthetic_spectrum(20e6, 20e6, &[(0, 0.2), (1, 0.5), (2, 0.3), (3, 0.25)], 4);
    let mapping = CouplingMapConfig {
        g_ms: 1e6,
        w_rwa: Some(2.0 * PI * 1e6),
    };
    let graph = polychromatic_graph(&array, &spectrum, &mapping).unwrap();
    assert!(!graph.is_static());
    (array, graph)
}

#[test]
fn frames_agree_on_populations() {
    let (array, graph) = ladder_case();
    for basis in [Basis::SingleExcitation, Basis::FullHilbert] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let state = random_state(&mut rng, basis, 4);
        let t_final = 0.4e-6;
        let run = |frame| {
            let mut config = EvolveConfig::new(t_final).with_frame(frame).with_dt(2e-12);
            config.samples = 9;
            evolve(&state, &graph, &array, &config).unwrap()
        };
        let lab = run(Frame::Lab);
        let rot = run(Frame::Rotating);
        for (a, b) in lab.populations.iter().zip(&rot.populations) {
            for (p, q) in a.iter().zip(b) {
                assert!((p - q).abs() < 1e-8, "{basis:?}: {p} vs {q}");
            }
        }
    }
}

#[test]
fn full_basis_conserves_excitation_number() {
    let (array, graph) = ladder_case();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let state = random_state(&mut rng, Basis::FullHilbert, 4);
    let n0 = state.excitation_number();
    let traj = evolve(&state, &graph, &array, &EvolveConfig::new(1e-6)).unwrap();
    for n in &traj.excitation_numbers {
        assert!((n - n0).abs() < 1e-8);
    }
    assert!(traj.max_norm_drift < 1e-10);
}

#[test]
fn monochromatic_transfer_is_slow_to_distant_qubit() {
    // A 1x4 chain: the excitation needs three hops to reach the far end.
    let g = 1e6;
    let array = QubitArray::uniform(1, 4, 5e9, g);
    let graph = monochromatic_graph(&array).unwrap();
    let state = PureState::excited(Basis::SingleExcitation, 4, 0).unwrap();
    let t = 0.05 / (2.0 * PI * g);
    let traj = evolve(&state, &graph, &array, &EvolveConfig::new(t)).unwrap();
    let p = traj.final_state.excitation_probabilities();
    assert!(p[3] < 1e-6 && p[1] > p[2] && p[2] > p[3]);
}

#[test]
fn ladder_reaches_most_distant_qubit() {
    // Qubits at k * 3 GHz over a metasurface modulated at 3 GHz.
    let profile = ModulationProfile::new(0.95, 0.4, 0.4, 3e9, 0.5);
    let spectrum = solve_slab(&profile, &IncidentWave::normal(3e9), &SolverConfig::with_truncation(24)).unwrap();
    let array = QubitArray::ladder(1, 4, 3e9, 0.0);
    let graph = polychromatic_graph(&array, &spectrum, &CouplingMapConfig::new(5e6)).unwrap();
    assert!(graph.has_pair(0, 3));
    for (b, m) in [(1, 1), (2, 2), (3, 3)] {
        assert!(graph.edges_between(0, b).any(|e| e.m == m && e.a == 0));
    }
    let mono = monochromatic_graph(&QubitArray::ladder(1, 4, 3e9, 1e6)).unwrap();
    assert!(!mono.has_pair(0, 3));
}
