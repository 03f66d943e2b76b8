use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, singular_values, CMat};

/// Tolerance on Hermiticity, trace and negative eigenvalues.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Validated density matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Complex64>>", into = "Vec<Vec<Complex64>>")]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDensityMatrix("empty matrix".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::InvalidDensityMatrix(format!(
                "row of length {} in a {dim}x{dim} matrix",
                r.len()
            )));
        }
        let rho = Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        };
        rho.validate()?;
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let rows = psi.iter().map(|a| psi.iter().map(|b| a * b.conj()).collect()).collect();
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
                }
                let defect = (z - self.get(j, i).conj()).norm();
                if defect > DENSITY_TOLERANCE {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j}): {defect:.3e}"
                    )));
                }
            }
        }
        let trace: f64 = (0..n).map(|i| self.get(i, i).re).sum();
        if (trace - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let (values, _) = hermitian_eig(&self.hermitian_part())?;
        if let Some(&min) = values.first() {
            if min < -DENSITY_TOLERANCE {
                return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(())
    }

    fn hermitian_part(&self) -> CMat {
        Mat::from_fn(self.dim, self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Positive square root with eigenvalues floored at zero.
    fn sqrt(&self) -> Result<CMat> {
        let (values, u) = hermitian_eig(&self.hermitian_part())?;
        let n = self.dim;
        let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
        Ok(Mat::from_fn(n, n, |i, j| {
            (0..n).map(|k| u[(i, k)] * u[(j, k)].conj() * roots[k]).sum()
        }))
    }
}

impl TryFrom<Vec<Vec<Complex64>>> for DensityMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<DensityMatrix> for Vec<Vec<Complex64>> {
    fn from(rho: DensityMatrix) -> Self {
        rho.data.chunks(rho.dim).map(|r| r.to_vec()).collect()
    }
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
///
/// The trace equals the nuclear norm of `sqrt(rho) sqrt(sigma)`, which is
/// what is evaluated: its singular values stay accurate where the product's
/// eigenvalues are near zero.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim != sigma.dim {
        return Err(Error::DimensionMismatch {
            left: rho.dim,
            right: sigma.dim,
        });
    }
    let product = rho.sqrt()? * sigma.sqrt()?;
    let trace: f64 = singular_values(&product)?.iter().sum();
    let f = trace * trace;
    if !(-DENSITY_TOLERANCE..=1.0 + DENSITY_TOLERANCE).contains(&f) {
        return Err(Error::InvalidDensityMatrix(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}
