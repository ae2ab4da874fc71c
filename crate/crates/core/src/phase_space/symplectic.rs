//! Elementary symplectic matrices: one-mode rotations and squeezers, two-mode
//! beam splitters, each embedded in `n` modes.

use crate::matcore::RealMatrix;

pub fn rotation(theta: f64) -> RealMatrix {
    let (s, c) = theta.sin_cos();
    RealMatrix::from_rows(&[[c, s], [-s, c]]).expect("2x2")
}

/// `diag(e^{-r}, e^{r})`.
pub fn squeezer(r: f64) -> RealMatrix {
    RealMatrix::from_diagonal(&[(-r).exp(), r.exp()])
}

/// Reflection `[[cos θ, sin θ], [sin θ, -cos θ]]`; orthogonal with determinant −1,
/// hence not symplectic.
pub fn reflection(theta: f64) -> RealMatrix {
    let (s, c) = theta.sin_cos();
    RealMatrix::from_rows(&[[c, s], [s, -c]]).expect("2x2")
}

/// Identity on `n` modes except `block` acting on `mode`.
pub fn embed_one_mode(n: usize, mode: usize, block: &RealMatrix) -> RealMatrix {
    assert!(mode < n && block.rows() == 2 && block.cols() == 2);
    let mut s = RealMatrix::identity(2 * n);
    s.set_block(2 * mode, 2 * mode, block);
    s
}

/// Beam splitter of angle `theta` mixing modes `i` and `j`.
pub fn beam_splitter(n: usize, i: usize, j: usize, theta: f64) -> RealMatrix {
    assert!(i < n && j < n && i != j);
    let (s, c) = theta.sin_cos();
    let mut m = RealMatrix::identity(2 * n);
    for q in 0..2 {
        let (a, b) = (2 * i + q, 2 * j + q);
        m.set(a, a, c);
        m.set(b, b, c);
        m.set(a, b, s);
        m.set(b, a, -s);
    }
    m
}
