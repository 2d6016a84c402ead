use std::path::PathBuf;

use nashpoly::phc::{
    parse_decimal, read_solutions, read_system, real_system, write_solutions, write_system, ExactSystem, SolutionRecord,
};
use nashpoly::validate::{validate_solutions, DEFAULT_TOLERANCE};
use nashpoly_core::{build_start_system, Injection, Monomial, PolySystem, Polynomial, TNMatrix};
use nashpoly_core::GameFormat;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use proptest::prelude::*;

fn data(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn built_start_system() -> ExactSystem {
    let format = GameFormat::new(vec![2, 2, 2]).unwrap();
    let start = build_start_system(&format, &TNMatrix::for_format(&format, Injection::PowersOfTwo)).unwrap();
    let sys = real_system(&start.expanded_exact());
    PolySystem::new(sys.names().to_vec(), sys.equations().iter().rev().cloned().collect()).unwrap()
}

#[test]
fn listed_start_system_matches_construction_up_to_one_sign_pattern() {
    let listed = read_system(&data("gameof3x3x3_start_phc")).unwrap();
    let built = built_start_system();
    assert_eq!(listed.names(), ["s11", "s12", "s21", "s22", "s31", "s32"]);
    assert_eq!(listed.names(), built.names());
    for (k, (a, b)) in listed.equations().iter().zip(built.equations()).enumerate() {
        if k != 2 {
            assert_eq!(a, b, "equation {}", k + 1);
        }
    }
    // The listing expands (8 s11 - 32 s12 - 1)(8 s31 - 32 s32 - 1) with
    // the sign of every s12 and s32 term flipped; the roots in the
    // accompanying solution file satisfy the factored form only.
    let flip = |p: &Polynomial<Complex<BigRational>>| {
        Polynomial::from_terms(p.terms().iter().map(|(c, m)| {
            let odd = m.exponents().iter().filter(|&&(v, _)| v == 1 || v == 5).count() % 2 == 1;
            (if odd { -c.clone() } else { c.clone() }, m.clone())
        }))
    };
    assert_eq!(flip(&listed.equations()[2]), built.equations()[2]);
    let roots = read_solutions(&data("gameof3x3x3_start_phc.roots")).unwrap();
    // File values carry 15 digits, so residuals reach about 1e-12 against
    // coefficients up to 65536.
    let on_built = validate_solutions(&built, &roots, 16, 1e-10).unwrap();
    assert!(on_built.iter().all(|r| !r.flagged), "{on_built:?}");
    let on_listed = validate_solutions(&listed, &roots, 16, 1e-10).unwrap();
    assert!(on_listed.iter().all(|r| r.value > 1e-2), "{on_listed:?}");
}

#[test]
fn written_start_system_reads_like_the_listing() {
    let text = write_system(&built_start_system()).unwrap();
    let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    let listed = data("gameof3x3x3_start_phc");
    let (ours, theirs): (Vec<_>, Vec<_>) = (text.split(';').collect(), listed.split(';').collect());
    assert_eq!(ours.len(), theirs.len());
    for (k, (a, b)) in ours.iter().zip(&theirs).enumerate() {
        if k != 2 {
            assert_eq!(squash(a), squash(b));
        }
    }
    assert_eq!(
        squash(ours[2]),
        "1 - 8*s11 + 32*s12 - 8*s31 + 32*s32 + 64*s11*s31 - 256*s11*s32 - 256*s12*s31 + 1024*s12*s32"
    );
}

#[test]
fn target_system_parses_exactly() {
    let sys = read_system(&data("gameof3x3x3_phc")).unwrap();
    assert_eq!(sys.len(), 6);
    assert_eq!(sys.names(), ["s11", "s12", "s21", "s22", "s31", "s32"]);
    let first = &sys.equations()[0];
    let re = |n: i64| Complex::new(q(n, 1), q(0, 1));
    assert_eq!(first.constant_term(), re(1));
    assert_eq!(first.coefficient(&Monomial::from_exponents([(0, 1), (2, 1)])), re(-7));
    assert_eq!(first.coefficient(&Monomial::from_exponents([(1, 1), (3, 1)])), re(2));
    assert_eq!(first.terms().len(), 9);
}

#[test]
fn solution_files_parse() {
    let start = read_solutions(&data("gameof3x3x3_start_phc.roots")).unwrap();
    assert_eq!(start.len(), 10);
    assert_eq!(start[0].coordinates[0], ("s11".to_string(), Complex64::new(4.6875e-2, 0.0)));
    assert_eq!(start[1].coordinates[5].1.re, -4.16666666666667e-02);
    let real = read_solutions(&data("gameof3x3x3_phc.real_roots")).unwrap();
    assert_eq!(real.len(), 2);
    assert_eq!(real[1].coordinates[2], ("s21".to_string(), Complex64::new(49.3650795841189, 0.0)));
    assert_eq!((real[1].err, real[1].rco, real[1].res), (2.780e-13, 1.820e-05, 1.670e-13));
    assert_eq!(real[0].t, Complex64::new(1.0, 0.0));
}

#[test]
fn listed_files_survive_a_round_trip() {
    for name in ["gameof3x3x3_start_phc", "gameof3x3x3_phc"] {
        let first = read_system(&data(name)).unwrap();
        assert_eq!(read_system(&write_system(&first).unwrap()).unwrap(), first, "{name}");
    }
    for name in ["gameof3x3x3_start_phc.roots", "gameof3x3x3_phc.real_roots"] {
        let first = read_solutions(&data(name)).unwrap();
        let text = write_solutions(&first, 6).unwrap();
        assert_eq!(read_solutions(&text).unwrap(), first, "{name}");
    }
}

#[test]
fn real_roots_validate_against_target() {
    let sys = read_system(&data("gameof3x3x3_phc")).unwrap();
    let records = read_solutions(&data("gameof3x3x3_phc.real_roots")).unwrap();
    for digits in [15, 16] {
        let res = validate_solutions(&sys, &records, digits, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(res.len(), 2);
        assert!(res.iter().all(|r| r.value <= 1e-12 && !r.flagged), "{res:?}");
    }
    let mut bumped = records.clone();
    bumped[0].coordinates[0].1.re += 0.1;
    let res = validate_solutions(&sys, &bumped, 16, DEFAULT_TOLERANCE).unwrap();
    assert!(res[0].value > 1e-3 && res[0].flagged);
    assert!(!res[1].flagged);
}

const NAMES: [&str; 4] = ["x", "y1", "zz", "s32"];

fn coefficient() -> impl Strategy<Value = Complex<BigRational>> {
    let part = prop_oneof![
        (-50i64..50).prop_map(|n| q(n, 1)),
        (-99_999i64..99_999, 0u32..6).prop_map(|(n, e)| q(n, 10i64.pow(e))),
    ];
    (part.clone(), prop_oneof![3 => Just(q(0, 1)), 1 => part]).prop_map(|(re, im)| Complex::new(re, im))
}

fn system() -> impl Strategy<Value = ExactSystem> {
    let monomial = prop::collection::vec((0usize..4, 1u32..3), 0..3).prop_map(Monomial::from_exponents);
    let poly = prop::collection::vec((coefficient(), monomial), 1..6).prop_map(Polynomial::from_terms);
    prop::collection::vec(poly, 1..4).prop_map(|eqs| {
        PolySystem::new(NAMES.iter().map(|s| s.to_string()).collect(), eqs).unwrap()
    })
}

/// A value carrying at most 15 significant digits, as the format stores.
fn stored() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        (-999_999_999_999_999i64..999_999_999_999_999, -30i32..30).prop_map(|(m, e)| {
            let text = format!("{m}e{e}");
            parse_decimal(&text).map(|_| text.parse::<f64>().unwrap()).unwrap()
        }),
    ]
}

fn record() -> impl Strategy<Value = SolutionRecord> {
    (
        1usize..1000,
        stored(),
        1u32..4,
        prop::collection::vec((stored(), stored()), 3),
        (0u32..1000, 0u32..1000, 0u32..1000),
    )
        .prop_map(|(index, t, m, coords, (err, rco, res))| SolutionRecord {
            index,
            t: Complex64::new(t, 0.0),
            m,
            coordinates: ["a", "bb", "s32"]
                .iter()
                .zip(coords)
                .map(|(n, (re, im))| (n.to_string(), Complex64::new(re, im)))
                .collect(),
            err: format!("{err}e-18").parse().unwrap(),
            rco: format!("{rco}e-3").parse().unwrap(),
            res: format!("{res}e-17").parse().unwrap(),
        })
}

proptest! {
    #[test]
    fn systems_round_trip(sys in system()) {
        let text = write_system(&sys).unwrap();
        let back = read_system(&text).unwrap();
        // Variables come back in order of appearance and unused ones are
        // dropped; compare over the names that occur.
        let used: Vec<String> = NAMES.iter().map(|s| s.to_string()).filter(|n| back.names().contains(n)).collect();
        let back = back.reorder_variables(&used).unwrap();
        for (a, b) in sys.equations().iter().zip(back.equations()) {
            let a_named: Vec<_> = a.terms().iter().map(|(c, m)| {
                let vars: Vec<_> = m.exponents().iter().map(|&(v, e)| (NAMES[v].to_string(), e)).collect();
                (c.clone(), vars)
            }).collect();
            let mut b_named: Vec<_> = b.terms().iter().map(|(c, m)| {
                let vars: Vec<_> = m.exponents().iter().map(|&(v, e)| (used[v].clone(), e)).collect();
                (c.clone(), vars)
            }).collect();
            let mut a_sorted = a_named;
            a_sorted.sort_by(|x, y| format!("{:?}", x.1).cmp(&format!("{:?}", y.1)));
            b_named.sort_by(|x, y| format!("{:?}", x.1).cmp(&format!("{:?}", y.1)));
            for ((ca, ma), (cb, mb)) in a_sorted.iter().zip(&b_named) {
                prop_assert_eq!(ma, mb);
                // Non-integers are written with 15 significant digits.
                let close = |x: &BigRational, y: &BigRational| {
                    let d: f64 = num_traits::ToPrimitive::to_f64(&(x - y)).unwrap();
                    let s: f64 = num_traits::ToPrimitive::to_f64(x).unwrap();
                    d.abs() <= 1e-14 * s.abs().max(1e-300)
                };
                prop_assert!(close(&ca.re, &cb.re) && close(&ca.im, &cb.im), "{:?} vs {:?}", ca, cb);
            }
            prop_assert_eq!(a.terms().len(), b.terms().len());
        }
        let again = read_system(&write_system(&back).unwrap()).unwrap().reorder_variables(back.names()).unwrap();
        prop_assert_eq!(again.equations(), back.equations());
    }

    #[test]
    fn solutions_round_trip(records in prop::collection::vec(record(), 0..5)) {
        let text = write_solutions(&records, 3).unwrap();
        prop_assert_eq!(read_solutions(&text).unwrap(), records);
    }
}
