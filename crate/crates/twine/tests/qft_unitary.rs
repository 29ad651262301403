use num_complex::Complex64 as C;
use twine::bench::Method;
use twine::sim::{circuit_unitary, equiv_up_to_phase, unpermute_outputs, Matrix};

// Built from the definition, without going through the library's helper.
fn dft(n: usize) -> Matrix {
    let d = 1usize << n;
    let w = 2.0 * std::f64::consts::PI / d as f64;
    Matrix::from_fn(d, |j, k| {
        C::from_polar(1.0 / (d as f64).sqrt(), w * ((j * k) % d) as f64)
    })
}

fn deviation(method: Method, n: usize) -> f64 {
    let c = method.compile(n).unwrap();
    let u = circuit_unitary(&c.circuit).unwrap();
    let u = unpermute_outputs(&u, &c.sigma);
    equiv_up_to_phase(&u, &dft(n)).1
}

#[test]
fn every_method_is_the_dft() {
    for n in 1..=7 {
        for m in Method::ALL {
            let d = deviation(m, n);
            assert!(d <= 1e-10, "{m} n={n}: deviation {d}");
        }
    }
}

#[test]
fn swapped_dft_is_not_the_dft() {
    let f = dft(2);
    let swapped = f.permute_rows(|r| ((r & 1) << 1) | (r >> 1));
    assert!(equiv_up_to_phase(&swapped, &f).1 > 0.5);
    let shifted = f.scale(C::from_polar(1.0, std::f64::consts::PI / 7.0));
    assert!(equiv_up_to_phase(&shifted, &f).1 < 1e-14);
}
