//! Exact coefficient ring: Laurent polynomials in the symbol `s` over the
//! rationals, where `s` stands for q^{1/2} (so `q = s^2`). The deformation
//! parameter is never specialized symbolically; numeric layers substitute a
//! concrete value through [`Scalar::eval`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Laurent polynomial in `s = q^{1/2}` with rational coefficients.
///
/// The map is exponent-of-`s` to coefficient and never stores zeros, so
/// structural equality is coefficient-wise equality. Complex conjugation
/// fixes every `Scalar`: `s` is a real parameter in (0,1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<i64, BigRational>,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::term(big(n), 0)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::term(r, 0)
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        Scalar::term(big(numer) / big(denom), 0)
    }

    /// A single Laurent term `coeff * s^exp`.
    pub fn term(coeff: BigRational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Scalar { terms }
    }

    /// `s^k`, i.e. `q^{k/2}`.
    pub fn s_power(k: i64) -> Self {
        Scalar::term(BigRational::one(), k)
    }

    /// `q^k = s^{2k}`.
    pub fn q_power(k: i64) -> Self {
        Scalar::s_power(2 * k)
    }

    /// `1 - q`.
    pub fn one_minus_q() -> Self {
        Scalar::one() - Scalar::q_power(1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Substitute a numeric value of `q`; returns the real number
    /// `sum coeff * q^{exp/2}`.
    pub fn eval(&self, q: f64) -> f64 {
        let s = q.sqrt();
        self.terms
            .iter()
            .map(|(e, c)| rational_to_f64(c) * s.powi(*e as i32))
            .sum()
    }

    fn insert(&mut self, exp: i64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, coeff);
            }
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Good enough for desk-scale coefficients; exact layers never round.
    let n = r.numer();
    let d = r.denom();
    let fn_ = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let fd = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    fn_ / fd
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += rhs;
        self
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        for (e, c) in rhs.terms {
            self.insert(e, c);
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= rhs;
        self
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        for (e, c) in rhs.terms {
            self.insert(e, -c);
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = &*self * &rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_power(exp: i64) -> String {
    // Even powers of s print as powers of q, odd ones stay in s.
    debug_assert!(exp != 0);
    if exp % 2 == 0 {
        let k = exp / 2;
        if k == 1 {
            "q".to_string()
        } else {
            format!("q^{}", k)
        }
    } else if exp == 1 {
        "s".to_string()
    } else {
        format!("s^{}", exp)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, coeff) in &self.terms {
            let neg = coeff.is_negative();
            let abs = coeff.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *exp == 0 {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", fmt_power(*exp))?;
            } else {
                write!(f, "{} {}", fmt_rational(&abs), fmt_power(*exp))?;
            }
        }
        Ok(())
    }
}
