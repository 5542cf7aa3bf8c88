//! Shared families for unit tests.

use crate::linalg::{MatrixFamily, SymMatrix};

pub(crate) fn sym(rows: [[f64; 2]; 2]) -> SymMatrix {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub(crate) fn example1() -> MatrixFamily {
    MatrixFamily::new(vec![
        sym([[1.0, -1.0], [-1.0, 1.0]]),
        sym([[-2.0, 1.0], [1.0, 1.0]]),
        sym([[4.0, -3.0], [-3.0, 1.0]]),
    ])
    .unwrap()
}

pub(crate) fn example2() -> MatrixFamily {
    MatrixFamily::new(vec![
        sym([[-1.0, 0.0], [0.0, 1.0]]),
        sym([[1.0, 2.0], [2.0, -2.0]]),
        sym([[0.0, -2.0], [-2.0, 1.0]]),
    ])
    .unwrap()
}

/// `E₁₁`, `E₂₂` and the symmetrized `E₁₂`: set rank three.
pub(crate) fn rank3() -> MatrixFamily {
    MatrixFamily::new(vec![
        SymMatrix::from_diag(&[1.0, 0.0]),
        SymMatrix::from_diag(&[0.0, 1.0]),
        sym([[0.0, 1.0], [1.0, 0.0]]),
    ])
    .unwrap()
}
