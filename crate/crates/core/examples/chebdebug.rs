fn main() {
    use toeplitz_spectra::symbol::Symbol;
    use toeplitz_spectra::moments::moments;
    use toeplitz_spectra::jacobi::{jacobi_params, JacobiMode};
    let b = Symbol::new_int(&[(-1, 1), (0, 3), (1, 3), (2, 1)]).unwrap();
    let ms = moments(&b, 62);
    let pe = jacobi_params(&ms, 20, JacobiMode::ExactHankel).unwrap();
    let pc = jacobi_params(&ms, 30, JacobiMode::ChebyshevExtended).unwrap();
    println!("chebyshev reliable to {}", pc.n_reliable);
    for k in 0..pe.len().min(pc.len()) {
        println!("k={:2}  a: {:+.16e} vs {:+.16e}  diff {:.1e}   b diff {:.1e}",
            k+1, pe.a[k], pc.a[k], (pe.a[k]-pc.a[k]).abs(), (pe.b[k]-pc.b[k]).abs());
    }
}
