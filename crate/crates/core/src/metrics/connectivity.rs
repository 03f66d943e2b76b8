use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::qubits::CouplingGraph;

/// Pair counts and gate depths of two coupling graphs over one array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub pairs_mono: usize,
    pub pairs_poly: usize,
    /// Polychromatic edges counted with harmonic multiplicity. Reported
    /// only; the ratio uses unordered pairs.
    pub edges_poly: usize,
    pub c_ratio: f64,
    pub d_mono: f64,
    pub d_poly: f64,
}

/// Connectivity gain `<C> = pairs_poly / pairs_mono` and the reduced depth
/// `D_p = D_m / <C>`.
pub fn connectivity_ratio(mono: &CouplingGraph, poly: &CouplingGraph, d_mono: f64) -> Result<ConnectivityReport> {
    if mono.qubits != poly.qubits {
        return Err(Error::DimensionMismatch {
            left: mono.qubits,
            right: poly.qubits,
        });
    }
    ensure_finite("d_mono", d_mono)?;
    if d_mono <= 0.0 {
        return Err(Error::invalid("d_mono", "must be positive"));
    }
    let pairs_mono = mono.pairs().len();
    if pairs_mono == 0 {
        return Err(Error::NoMonochromaticPairs);
    }
    let pairs_poly = poly.pairs().len();
    let c_ratio = pairs_poly as f64 / pairs_mono as f64;
    Ok(ConnectivityReport {
        pairs_mono,
        pairs_poly,
        edges_poly: poly.edges.len(),
        c_ratio,
        d_mono,
        d_poly: d_mono / c_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubits::{monochromatic_graph, Edge, QubitArray};

    fn all_to_all(n: usize) -> CouplingGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for m in 0..2 {
                    edges.push(Edge {
                        a,
                        b,
                        m,
                        g_hz: 1e6,
                        delta_omega: 0.0,
                    });
                }
            }
        }
        CouplingGraph {
            qubits: n,
            omega_mod: 0.0,
            edges,
        }
    }

    #[test]
    fn grid_against_all_to_all() {
        let mono = monochromatic_graph(&QubitArray::uniform(4, 4, 5e9, 1e6)).unwrap();
        let r = connectivity_ratio(&mono, &all_to_all(16), 10.0).unwrap();
        assert_eq!((r.pairs_mono, r.pairs_poly, r.edges_poly), (24, 120, 240));
        assert_eq!(r.c_ratio, 5.0);
        assert_eq!(r.d_poly, 2.0);
    }

    #[test]
    fn identical_graphs() {
        let g = monochromatic_graph(&QubitArray::uniform(1, 2, 5e9, 1e6)).unwrap();
        let r = connectivity_ratio(&g, &g, 1.0).unwrap();
        assert_eq!((r.c_ratio, r.d_poly), (1.0, 1.0));
    }

    #[test]
    fn errors() {
        let empty = CouplingGraph {
            qubits: 2,
            omega_mod: 0.0,
            edges: vec![],
        };
        assert_eq!(
            connectivity_ratio(&empty, &all_to_all(2), 1.0),
            Err(Error::NoMonochromaticPairs)
        );
        assert!(matches!(
            connectivity_ratio(&all_to_all(3), &all_to_all(2), 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
