use nalgebra::{DMatrix, Dim, Matrix, RawStorage};
use num_complex::Complex64;

/// Ascending eigenvalues of a Hermitian matrix.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub(crate) fn max_hermitian_defect<R, C, S>(m: &Matrix<Complex64, R, C, S>) -> f64
where
    R: Dim,
    C: Dim,
    S: RawStorage<Complex64, R, C>,
{
    let (rows, cols) = m.shape();
    let mut worst = 0.0_f64;
    for i in 0..rows {
        for j in 0..cols {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
