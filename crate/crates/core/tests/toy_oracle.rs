mod common;

use common::oracle::{self, Toy};

fn run(check: fn(&Toy, &hss_core::PublicKey, &hss_core::PrivateKey) -> oracle::Check) {
    let (pk, sk) = common::toy_keys();
    let o = Toy::new();
    match check(&o, &pk, &sk) {
        Ok(n) => assert!(n > 0),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn encryption_matches_formula() {
    run(|o, pk, _| oracle::check_encrypt(o, pk));
}

#[test]
fn decryption_of_every_unit() {
    run(oracle::check_decrypt);
}

#[test]
fn ddlog_formula_and_difference() {
    run(|o, _, _| oracle::check_ddlog(o));
}

#[test]
fn init_and_upload() {
    run(oracle::check_init_upload);
}

#[test]
fn smul_exhaustive() {
    run(oracle::check_smul);
}

#[test]
fn s2c_on_integer_shares() {
    run(oracle::check_s2c);
}

#[test]
fn c2s_every_plaintext() {
    run(oracle::check_c2s);
}

#[test]
fn scmp_step_by_step() {
    run(oracle::check_scmp);
}

#[test]
fn endpoints_agree_with_oracle() {
    run(oracle::check_end_to_end);
}

#[test]
fn worked_examples() {
    run(oracle::check_examples);
}

#[test]
fn oracle_self_consistency() {
    let o = Toy::new();
    assert_eq!(oracle::inv(290, 649), Some(47));
    assert_eq!(oracle::powm(2, 10, 1000), 24);
    for m in [0, 1, 12, 648] {
        assert_eq!(o.dec(o.enc(m, 200)), Some(m));
    }
}
