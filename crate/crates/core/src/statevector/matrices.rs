//! Fixed gate matrices. Two-qubit matrices use the first operand as the high
//! bit of the row/column index.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Matrix2 = [[Complex64; 2]; 2];
pub type Matrix4 = [[Complex64; 4]; 4];

const fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const ZERO: Complex64 = r(0.0);
const ONE: Complex64 = r(1.0);

pub fn identity2() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn hadamard() -> Matrix2 {
    let h = r(FRAC_1_SQRT_2);
    [[h, h], [h, -h]]
}

pub fn pauli_x() -> Matrix2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_z() -> Matrix2 {
    [[ONE, ZERO], [ZERO, r(-1.0)]]
}

pub fn t_gate() -> Matrix2 {
    [
        [ONE, ZERO],
        [
            ZERO,
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        ],
    ]
}

pub fn t_dagger() -> Matrix2 {
    [
        [ONE, ZERO],
        [
            ZERO,
            Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
        ],
    ]
}

fn diag4(d: [f64; 4]) -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, v) in d.into_iter().enumerate() {
        m[i][i] = r(v);
    }
    m
}

pub fn cz() -> Matrix4 {
    diag4([1.0, 1.0, 1.0, -1.0])
}

/// Controlled-X with the first operand as control.
pub fn cx() -> Matrix4 {
    let mut m = diag4([1.0, 1.0, 0.0, 0.0]);
    m[2][3] = ONE;
    m[3][2] = ONE;
    m
}

pub fn swap() -> Matrix4 {
    let mut m = diag4([1.0, 0.0, 0.0, 1.0]);
    m[1][2] = ONE;
    m[2][1] = ONE;
    m
}

/// `I - 2|s2><s2|`: every entry of `|s2><s2|` is 1/4.
pub fn diffuser2() -> Matrix4 {
    let mut m = [[r(-0.5); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = r(0.5);
    }
    m
}

pub fn matmul4(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Max |(U†U - I)_ij|.
pub fn unitarity_deviation2(u: &Matrix2) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v: Complex64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
            let e = if i == j { ONE } else { ZERO };
            dev = dev.max((v - e).norm());
        }
    }
    dev
}

pub fn unitarity_deviation4(u: &Matrix4) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let v: Complex64 = (0..4).map(|k| u[k][i].conj() * u[k][j]).sum();
            let e = if i == j { ONE } else { ZERO };
            dev = dev.max((v - e).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixed_gates_are_unitary() {
        for m in [
            identity2(),
            hadamard(),
            pauli_x(),
            pauli_z(),
            t_gate(),
            t_dagger(),
        ] {
            assert!(unitarity_deviation2(&m) < 1e-15);
        }
        for m in [cz(), cx(), swap(), diffuser2()] {
            assert!(unitarity_deviation4(&m) < 1e-15);
        }
    }

    #[test]
    fn diffuser_squares_to_identity() {
        let d = diffuser2();
        let dd = matmul4(&d, &d);
        assert_eq!(dd, diag4([1.0; 4]));
    }
}
