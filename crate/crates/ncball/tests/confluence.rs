//! Randomized joinability testing: reducing random polynomials with two
//! independently seeded redex-selection strategies (and the deterministic
//! leftmost strategy) must give identical normal forms.

use ncball::algebra::{Generator, Polynomial, Word};
use ncball::presentation::{build_presentation, Family, Strategy, DEFAULT_BUDGET};
use ncball::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_polynomial(rng: &mut ChaCha8Rng, family: Family, max_degree: usize) -> Polynomial {
    let n = family.n();
    let label = family.label();
    let n_terms = rng.gen_range(1..=3);
    let mut p = Polynomial::zero();
    for _ in 0..n_terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut letters = Vec::with_capacity(deg);
        for _ in 0..deg {
            let index = rng.gen_range(1..=n);
            let starred = rng.gen_bool(0.5);
            letters.push(Generator { label, index, starred });
        }
        let coeff = Scalar::term(
            num_rational::BigRational::new(
                num_bigint::BigInt::from(rng.gen_range(-4i64..=4)),
                num_bigint::BigInt::from(rng.gen_range(1i64..=3)),
            ),
            rng.gen_range(-2i64..=2),
        );
        p.add_term(Word(letters), coeff);
    }
    p
}

fn fuzz_family(family: Family, samples: usize, seed: u64) {
    let pres = build_presentation(family, family.n()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut divergences = 0usize;
    for k in 0..samples {
        let p = random_polynomial(&mut rng, family, 6);
        let a = pres
            .normal_form_with(&p, Strategy::Seeded(seed ^ (2 * k as u64 + 1)), DEFAULT_BUDGET)
            .unwrap();
        let b = pres
            .normal_form_with(&p, Strategy::Seeded(seed.rotate_left(17) ^ (k as u64)), DEFAULT_BUDGET)
            .unwrap();
        let c = pres.normal_form(&p).unwrap();
        if a != b || a != c {
            divergences += 1;
            eprintln!("divergence in {} on {}", family, p);
            eprintln!("  strategy A: {}", a);
            eprintln!("  strategy B: {}", b);
            eprintln!("  leftmost:   {}", c);
        }
    }
    assert_eq!(divergences, 0, "{}: {} divergences", family, divergences);
}

#[test]
fn confluence_smoke_all_families() {
    // A fast cross-section; the acceptance suite runs the full 10^4 sweep.
    for n in 1..=4u32 {
        for family in [
            Family::BallEven(n),
            Family::BallOdd(n),
            Family::BoundaryEven(n),
            Family::BoundaryOdd(n),
        ] {
            fuzz_family(family, 150, 0xC0FFEE ^ n as u64);
        }
    }
}
