fn main() {
    // Dense Hermitian/tridiagonal eigensolvers call LAPACK routines from the
    // system OpenBLAS (which bundles LAPACK on Debian-family systems).
    println!("cargo:rustc-link-lib=dylib=openblas");
}
