//! In-place gate kernels over a flat amplitude buffer addressed by bit masks.

use num_complex::Complex64 as C64;

use super::gates::{Matrix2, Matrix4};

pub(crate) fn apply_1q(amps: &mut [C64], mask: usize, m: &Matrix2) {
    for i in 0..amps.len() {
        if i & mask != 0 {
            continue;
        }
        let j = i | mask;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0][0] * a + m[0][1] * b;
        amps[j] = m[1][0] * a + m[1][1] * b;
    }
}

pub(crate) fn apply_diag_1q(amps: &mut [C64], mask: usize, d: &[C64; 2]) {
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= d[(i & mask != 0) as usize];
    }
}

/// `hi` is the mask of the gate's first qubit (high bit of the 4x4 basis).
pub(crate) fn apply_2q(amps: &mut [C64], hi: usize, lo: usize, m: &Matrix4) {
    for i in 0..amps.len() {
        if i & (hi | lo) != 0 {
            continue;
        }
        let idx = [i, i | lo, i | hi, i | hi | lo];
        let v = idx.map(|k| amps[k]);
        for (r, &k) in idx.iter().enumerate() {
            amps[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

pub(crate) fn apply_diag_2q(amps: &mut [C64], hi: usize, lo: usize, d: &[C64; 4]) {
    for (i, a) in amps.iter_mut().enumerate() {
        let k = ((i & hi != 0) as usize) << 1 | (i & lo != 0) as usize;
        *a *= d[k];
    }
}

pub(crate) fn conj2(m: &Matrix2) -> Matrix2 {
    m.map(|row| row.map(|z| z.conj()))
}

pub(crate) fn conj4(m: &Matrix4) -> Matrix4 {
    m.map(|row| row.map(|z| z.conj()))
}
