fn main() {
    for (kmax, x) in [(8usize, 21.5f64), (8, 21.7), (20, 35.9), (20, 36.1)] {
        let v = subconv_core::oscint::spherical_bessel(kmax, x);
        println!("{} {} [{:.8}, {:.8}, {:.8}, {:.8}]", kmax, x, v[0], v[1], v[kmax/2], v[kmax]);
    }
}
