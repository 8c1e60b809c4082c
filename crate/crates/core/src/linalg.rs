//! Small dense complex matrices, sized for desk-scale unitary checks.

use num_complex::Complex64;

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add_assign_at(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] += value;
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Max-norm of the elementwise difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `self† self − I`; zero for a unitary.
    pub fn unitarity_defect(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&CMatrix::identity(self.dim))
    }

    /// Max-norm difference after aligning `other` to `self` by global phase.
    ///
    /// The phase is fixed at the largest-magnitude element of `self`; if the
    /// matrices differ by more than a phase the residual stays large.
    pub fn phase_aligned_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let mut best = 0usize;
        let mut best_mag = -1.0;
        for (idx, z) in self.data.iter().enumerate() {
            if z.norm() > best_mag {
                best_mag = z.norm();
                best = idx;
            }
        }
        let a = self.data[best];
        let b = other.data[best];
        if b.norm() < 1e-300 {
            // no phase can map a zero onto the pivot element
            return self.max_abs_diff(other);
        }
        let phase = (a / b) / (a / b).norm();
        self.max_abs_diff(&other.scale(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary() {
        assert_eq!(CMatrix::identity(4).unitarity_defect(), 0.0);
    }

    #[test]
    fn mul_against_hand_product() {
        let mut a = CMatrix::zeros(2);
        a.set(0, 1, Complex64::new(1.0, 0.0));
        a.set(1, 0, Complex64::new(1.0, 0.0));
        let b = CMatrix::identity(2).scale(Complex64::new(0.0, 1.0));
        let c = a.mul(&b);
        assert_eq!(c.get(0, 1), Complex64::new(0.0, 1.0));
        assert_eq!(c.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let a = CMatrix::identity(3);
        let b = a.scale(Complex64::from_polar(1.0, 1.234));
        assert!(a.phase_aligned_diff(&b) < 1e-14);
        let c = CMatrix::zeros(3);
        assert!(a.phase_aligned_diff(&c) > 0.5);
    }
}
