//! Free *-algebra on indexed generators: words, polynomials with [`Scalar`]
//! coefficients, and the adjoint anti-automorphism.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Generator letter families used throughout. `z/w` are the even ball and its
/// boundary, `x/t` the odd ball and its boundary, `e/f` the glued spheres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenLabel {
    Z,
    W,
    X,
    T,
    E,
    F,
}

impl GenLabel {
    pub fn letter(self) -> char {
        match self {
            GenLabel::Z => 'z',
            GenLabel::W => 'w',
            GenLabel::X => 'x',
            GenLabel::T => 't',
            GenLabel::E => 'e',
            GenLabel::F => 'f',
        }
    }

    pub fn from_letter(c: char) -> Option<GenLabel> {
        match c {
            'z' => Some(GenLabel::Z),
            'w' => Some(GenLabel::W),
            'x' => Some(GenLabel::X),
            't' => Some(GenLabel::T),
            'e' => Some(GenLabel::E),
            'f' => Some(GenLabel::F),
            _ => None,
        }
    }
}

/// One letter of a word: a labelled, indexed generator with an adjoint flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub label: GenLabel,
    pub index: u32,
    pub starred: bool,
}

impl Generator {
    pub fn new(label: GenLabel, index: u32) -> Self {
        Generator { label, index, starred: false }
    }

    pub fn starred(label: GenLabel, index: u32) -> Self {
        Generator { label, index, starred: true }
    }

    pub fn adjoint(self) -> Self {
        Generator { starred: !self.starred, ..self }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.label.letter(), self.index, if self.starred { "'" } else { "" })
    }
}

/// A finite product of generators; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn single(g: Generator) -> Self {
        Word(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.adjoint()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for g in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", g)?;
            first = false;
        }
        Ok(())
    }
}

/// Finite formal sum of words with [`Scalar`] coefficients, kept canonical
/// (no zero coefficients stored).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Word, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Polynomial::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        Polynomial::monomial(c, Word::one())
    }

    pub fn monomial(c: Scalar, w: Word) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Polynomial { terms }
    }

    pub fn generator(g: Generator) -> Self {
        Polynomial::monomial(Scalar::one(), Word::single(g))
    }

    pub fn word(w: Word) -> Self {
        Polynomial::monomial(Scalar::one(), w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut out = Polynomial::zero();
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// The unique anti-linear anti-automorphism with `g -> g*`; scalars are
    /// fixed (they are real).
    pub fn adjoint(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (w, c) in &self.terms {
            out.add_term(w.adjoint(), c.clone());
        }
        out
    }

    /// Every generator occurring in the polynomial, without star flags.
    pub fn support(&self) -> Vec<(GenLabel, u32)> {
        let mut v: Vec<(GenLabel, u32)> = self
            .terms
            .keys()
            .flat_map(|w| w.0.iter().map(|g| (g.label, g.index)))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Integer exponent of a formal power; negative powers are rejected at
    /// the parser level.
    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.into_iter().map(|(w, c)| (w, -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then word order; scalars come last.
        let mut items: Vec<(&Word, &Scalar)> = self.terms.iter().collect();
        items.sort_by(|(w1, _), (w2, _)| w2.len().cmp(&w1.len()).then_with(|| w1.cmp(w2)));
        let mut first = true;
        for (w, c) in items {
            let (joiner_neg, c_disp) = if c.num_terms() == 1 {
                // Pull the sign of a single-term coefficient into the joiner.
                let (e, r) = c.iter().next().unwrap();
                use num_traits::Signed;
                if r.is_negative() {
                    (true, Scalar::term(-r.clone(), *e))
                } else {
                    (false, c.clone())
                }
            } else {
                (false, c.clone())
            };
            if first {
                if joiner_neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if joiner_neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_str = if c_disp.num_terms() > 1 {
                format!("({})", c_disp)
            } else {
                format!("{}", c_disp)
            };
            if w.is_empty() {
                write!(f, "{}", coeff_str)?;
            } else if c_disp.is_one() {
                write!(f, "{}", w)?;
            } else {
                write!(f, "{} {}", coeff_str, w)?;
            }
        }
        Ok(())
    }
}
