//! Minimal FFI binding to LAPACK's `zgeev` for dense complex non-Hermitian
//! eigenproblems, plus a safe wrapper returning eigenvalues and (optionally)
//! right eigenvectors. Matrices are passed in column-major order.

use crate::core::{Error, Result, C64};

extern "C" {
    /// LAPACK complex double-precision general eigensolver.
    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut C64,
        vl: *mut C64,
        ldvl: *const i32,
        vr: *mut C64,
        ldvr: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
}

/// Eigen-decomposition of a dense complex matrix.
pub struct EigenDecomposition {
    /// Eigenvalues, in LAPACK's return order.
    pub values: Vec<C64>,
    /// Right eigenvectors as columns, flattened column-major; empty when the
    /// decomposition was requested without vectors.
    pub vectors: Vec<C64>,
    /// Matrix dimension.
    pub n: usize,
}

impl EigenDecomposition {
    /// Returns the `k`-th right eigenvector as a slice.
    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }
}

/// Computes eigenvalues (and right eigenvectors when `with_vectors` is set)
/// of the dense complex matrix `a`, given flattened column-major with
/// dimension `n`. `a` is consumed as scratch space.
pub fn eig_complex(mut a: Vec<C64>, n: usize, with_vectors: bool) -> Result<EigenDecomposition> {
    if n == 0 || a.len() != n * n {
        return Err(Error::InvalidParameter(format!(
            "matrix buffer of length {} does not match dimension {}",
            a.len(),
            n
        )));
    }
    let ni = i32::try_from(n).map_err(|_| Error::InvalidParameter("dimension overflow".into()))?;
    let jobvl = b'N';
    let jobvr = if with_vectors { b'V' } else { b'N' };
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut vectors = if with_vectors {
        vec![C64::new(0.0, 0.0); n * n]
    } else {
        vec![C64::new(0.0, 0.0); 1]
    };
    let ldvr = if with_vectors { ni } else { 1 };
    let mut rwork = vec![0.0_f64; 2 * n];
    let mut info: i32 = 0;

    // Workspace query, then the actual factorization.
    let mut work_query = [C64::new(0.0, 0.0)];
    let lwork_query: i32 = -1;
    unsafe {
        zgeev_(
            &jobvl,
            &jobvr,
            &ni,
            a.as_mut_ptr(),
            &ni,
            values.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            vectors.as_mut_ptr(),
            &ldvr,
            work_query.as_mut_ptr(),
            &lwork_query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::NumericFailure(format!(
            "zgeev workspace query failed with info {info}"
        )));
    }
    let lwork = work_query[0].re.max(1.0) as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zgeev_(
            &jobvl,
            &jobvr,
            &ni,
            a.as_mut_ptr(),
            &ni,
            values.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            vectors.as_mut_ptr(),
            &ldvr,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::NumericFailure(format!(
            "zgeev failed with info {info}"
        )));
    }
    if !with_vectors {
        vectors.clear();
    }
    Ok(EigenDecomposition { values, vectors, n })
}
