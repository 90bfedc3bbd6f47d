//! Small f64 helpers shared by the numeric modules.
//!
//! The crate is no_std, so transcendental functions come from `libm`.

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

/// In-place softmax with max subtraction.
pub(crate) fn softmax_inplace(xs: &mut [f64]) {
    let mut max = f64::NEG_INFINITY;
    for &x in xs.iter() {
        if x > max {
            max = x;
        }
    }
    let mut sum = 0.0;
    for x in xs.iter_mut() {
        *x = exp(*x - max);
        sum += *x;
    }
    for x in xs.iter_mut() {
        *x /= sum;
    }
}

/// out = A x for a row-major (rows x cols) matrix.
pub(crate) fn matvec(a: &[f64], rows: usize, cols: usize, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(out.len(), rows);
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        let mut acc = 0.0;
        for c in 0..cols {
            acc += row[c] * x[c];
        }
        out[r] = acc;
    }
}

/// out += A^T x for a row-major (rows x cols) matrix; out has length cols.
pub(crate) fn matvec_t_acc(a: &[f64], rows: usize, cols: usize, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(x.len(), rows);
    debug_assert_eq!(out.len(), cols);
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        let xr = x[r];
        for c in 0..cols {
            out[c] += row[c] * xr;
        }
    }
}

/// da += u (outer) v, row-major (u.len() x v.len()).
pub(crate) fn outer_acc(da: &mut [f64], u: &[f64], v: &[f64]) {
    debug_assert_eq!(da.len(), u.len() * v.len());
    for (r, &ur) in u.iter().enumerate() {
        let row = &mut da[r * v.len()..(r + 1) * v.len()];
        for (c, &vc) in v.iter().enumerate() {
            row[c] += ur * vc;
        }
    }
}

pub(crate) fn add_acc(dst: &mut [f64], src: &[f64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d += s;
    }
}
