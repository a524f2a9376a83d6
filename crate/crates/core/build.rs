fn main() {
    // The transport ensemble diagonalizes dense complex non-Hermitian matrices
    // via LAPACK's zgeev; link against the system reference LAPACK.
    println!("cargo:rustc-link-lib=dylib=lapack");
}
