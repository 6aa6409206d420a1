use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rnmatrix::bivaluation::entails;
use rnmatrix::gen::{atoms, enumerate, random_formula};
use rnmatrix::tableau::ProveOptions;
use rnmatrix::{decide, prove_with, Formula, Logic};

const LOGICS: [Logic; 6] = [Logic::Cn(1), Logic::Cn(2), Logic::Cn(3), Logic::Cn(4), Logic::MbCcl, Logic::Cila];

fn check(logic: Logic, f: &Formula) {
    let table = decide(logic, f, &[]).unwrap();
    for use_derived in [false, true] {
        // Complete tableaux grow too large from n = 3 on; the verdict is the same.
        let stop_at_first_open = logic.n() >= 3;
        let opts = ProveOptions { use_derived, stop_at_first_open, ..ProveOptions::default() };
        let proof = prove_with(logic, f, &[], &opts).unwrap();
        assert_eq!(proof.proved, table.verdict.is_valid(), "{logic} {f} derived={use_derived}");
        if let Some(v) = &proof.countermodel {
            assert!(v.refutes(f, &[]).unwrap(), "{logic} {f} countermodel");
        }
    }
    if let Some(v) = &table.countermodel {
        assert!(v.refutes(f, &[]).unwrap(), "{logic} {f} table countermodel");
    }
}

#[test]
fn table_and_tableau_agree_on_small_formulas() {
    let pq = atoms(&["p", "q"]);
    for logic in LOGICS {
        enumerate(logic, &pq, 3).par_iter().for_each(|f| check(logic, f));
    }
}

#[test]
fn table_and_tableau_agree_on_random_formulas() {
    let pq = atoms(&["p", "q", "r"]);
    for (k, logic) in LOGICS.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let fs: Vec<Formula> = (0..150).map(|_| random_formula(&mut rng, logic, &pq, 8)).collect();
        fs.par_iter().for_each(|f| check(logic, f));
    }
}

#[test]
fn bivaluations_agree_with_tables() {
    let pq = atoms(&["p", "q"]);
    for logic in LOGICS {
        let fs = enumerate(logic, &pq, 3);
        fs.par_iter().for_each(|f| {
            let by_table = decide(logic, f, &[]).unwrap().verdict.is_valid();
            assert_eq!(entails(logic, f, &[]).valid, by_table, "{logic} {f}");
        });
    }
}
