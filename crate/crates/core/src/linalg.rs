//! Dense matrix products with rigorous error radii (midpoint-radius form).

use nalgebra::DMatrix;

use crate::ball::{add_up, div_up, mul_up};

const U: f64 = f64::EPSILON / 2.0;

/// Floating product `a b` (column-major, any summation order).
pub fn gemm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, k) = a.shape();
    let (k2, n) = b.shape();
    assert_eq!(k, k2, "inner dimensions differ");
    let mut c = DMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: the pointers and strides describe the column-major storage of
    // `a` (m×k), `b` (k×n) and `c` (m×n), which outlive the call and do not alias.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

/// `γ_n = n u / (1 - n u)` rounded up.
fn gamma(n: usize) -> f64 {
    let nu = mul_up(n as f64, U);
    div_up(nu, (1.0 - nu).next_down())
}

/// Absolute error floor for underflow in a sum of `k` products.
fn tiny(k: usize) -> f64 {
    (k as f64 + 2.0) * f64::from_bits(2)
}

/// Upper bound on the entries of `a b` for nonnegative `a`, `b`.
pub fn mul_nonneg_up(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let k = a.ncols();
    let g = gamma(k + 2);
    let den = (1.0 - g).next_down();
    let mut c = gemm(a, b);
    let t = tiny(k);
    c.iter_mut().for_each(|x| *x = add_up(div_up(*x, den), t));
    c
}

/// Midpoint and radius enclosing `{x y : x ∈ a, y ∈ b}` entrywise, where
/// `a = am ± ar` and `b = bm ± br` entrywise.
pub fn mul_mr(
    am: &DMatrix<f64>,
    ar: Option<&DMatrix<f64>>,
    bm: &DMatrix<f64>,
    br: Option<&DMatrix<f64>>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let k = am.ncols();
    let cm = gemm(am, bm);
    let aa = am.abs();
    let ba = bm.abs();
    let mut r = gemm(&aa, &ba);
    let g = gamma(2 * k + 4);
    r.iter_mut().for_each(|x| *x = mul_up(*x, g));
    if let Some(br) = br {
        r += gemm(&aa, br);
    }
    if let Some(ar) = ar {
        let bb = match br {
            Some(br) => &ba + br,
            None => ba,
        };
        r += gemm(ar, &bb);
    }
    let den = (1.0 - g).next_down();
    let t = tiny(2 * k);
    // Each entry of `r` carries at most `3k + 2` roundings of nonnegative terms.
    let g3 = gamma(3 * k + 4);
    r.iter_mut().for_each(|x| *x = add_up(div_up(add_up(*x, mul_up(*x, g3)), den), t));
    (cm, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_matches_naive() {
        let a = DMatrix::from_fn(5, 3, |i, j| (i * 3 + j) as f64 - 4.0);
        let b = DMatrix::from_fn(3, 4, |i, j| (i + 2 * j) as f64 * 0.5);
        assert_eq!(gemm(&a, &b), &a * &b);
    }

    #[test]
    fn enclosure_contains_exact() {
        let a = DMatrix::from_fn(4, 4, |i, j| 1.0 / (i + j + 1) as f64);
        let b = DMatrix::from_fn(4, 1, |i, _| 0.1 * (i as f64 + 1.0));
        let (cm, cr) = mul_mr(&a, None, &b, None);
        // Exact in rationals: entries of the Hilbert matrix times (1,2,3,4)/10.
        for i in 0..4 {
            let mut exact = num_rational::BigRational::from_integer(0.into());
            for j in 0..4 {
                let aij = num_rational::BigRational::from_float(a[(i, j)]).unwrap();
                let bj = num_rational::BigRational::from_float(b[(j, 0)]).unwrap();
                exact += aij * bj;
            }
            let lo = num_rational::BigRational::from_float(cm[(i, 0)] - cr[(i, 0)]).unwrap();
            let hi = num_rational::BigRational::from_float(cm[(i, 0)] + cr[(i, 0)]).unwrap();
            assert!(lo <= exact && exact <= hi);
        }
    }
}
