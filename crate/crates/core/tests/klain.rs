use valkit_core::crofton::{even_fourier_klain, sample_grassmannian, KlainFunction, KlainTable};
use valkit_core::intrinsic::AngleConfig;
use valkit_core::valuation::Valuation;

#[test]
fn fourier_of_constant_table_is_constant() {
    let kl = KlainFunction::new(3, 1, |_| Ok(2.5));
    let f = even_fourier_klain(&kl);
    assert_eq!((f.n, f.i), (3, 2));
    let t = KlainTable::build(&f, &sample_grassmannian(3, 2, 40, 1).unwrap()).unwrap();
    assert!(t.rows.iter().all(|(_, v)| *v == 2.5));
}

#[test]
fn intrinsic_volumes_have_constant_klain_tables() {
    for i in 1..=2 {
        let kl = KlainFunction::of_valuation(&Valuation::intrinsic(3, i, AngleConfig::default()), i);
        let t = KlainTable::build(&kl, &sample_grassmannian(3, i, 20, 7).unwrap()).unwrap();
        assert!(t.rows.iter().all(|(_, v)| (v - 1.0).abs() < 1e-6), "i = {i}: {:?}", t.rows);
        let f = KlainTable::build(&even_fourier_klain(&kl), &sample_grassmannian(3, 3 - i, 20, 8).unwrap()).unwrap();
        assert!(f.rows.iter().all(|(_, v)| (v - 1.0).abs() < 1e-6));
    }
}

#[test]
fn fourier_of_klain_is_an_involution() {
    let kl = KlainFunction::new(3, 1, |e| Ok(e[0][0] * e[0][0]));
    let ff = even_fourier_klain(&even_fourier_klain(&kl));
    for (frame, v) in KlainTable::build(&kl, &sample_grassmannian(3, 1, 20, 2).unwrap()).unwrap().rows {
        assert!((ff.eval(&frame).unwrap() - v).abs() < 1e-9);
    }
}
