//! Presentations of the ball and boundary-sphere algebras: oriented rewrite
//! rules, normal forms, symbolic identity verification and phase-substitution
//! checks.
//!
//! Rule orientation sends adjoints to the right and sorts indices inside the
//! unstarred and starred blocks. Ball families sort both blocks ascending,
//! which yields the monomial basis `g_1^{a_1}..g_n^{a_n} g_1^{*b_1}..g_n^{*b_n}`.
//! Boundary families sort the starred block *descending*, so that monomials
//! containing both `g_n` and `g_n*` expose the adjacent subword `g_n g_n*`
//! eliminated by the sphere rule; with the ascending convention that subword
//! is not adjacent and reduction provably diverges.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GenLabel, Generator, Polynomial, Word};
use crate::error::{Error, Result};
use crate::report::{CheckEntry, VerificationReport};
use crate::scalar::Scalar;

/// The four relation families of the presentation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    BallEven(u32),
    BallOdd(u32),
    BoundaryEven(u32),
    BoundaryOdd(u32),
}

impl Family {
    pub fn n(self) -> u32 {
        match self {
            Family::BallEven(n)
            | Family::BallOdd(n)
            | Family::BoundaryEven(n)
            | Family::BoundaryOdd(n) => n,
        }
    }

    pub fn label(self) -> GenLabel {
        match self {
            Family::BallEven(_) => GenLabel::Z,
            Family::BallOdd(_) => GenLabel::X,
            Family::BoundaryEven(_) => GenLabel::W,
            Family::BoundaryOdd(_) => GenLabel::T,
        }
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, Family::BoundaryEven(_) | Family::BoundaryOdd(_))
    }

    pub fn is_odd(self) -> bool {
        matches!(self, Family::BallOdd(_) | Family::BoundaryOdd(_))
    }

    /// Boundary families keep the starred block in descending index order.
    fn starred_descending(self) -> bool {
        self.is_boundary()
    }

    /// The monomial eliminated by the sphere rule, when there is one.
    fn sphere_word(self) -> Option<Word> {
        let n = self.n();
        let l = self.label();
        match self {
            Family::BoundaryEven(_) => Some(Word(vec![
                Generator::new(l, n),
                Generator::starred(l, n),
            ])),
            Family::BoundaryOdd(_) => {
                if n == 1 {
                    Some(Word(vec![Generator::new(l, 1), Generator::new(l, 1)]))
                } else {
                    Some(Word(vec![
                        Generator::new(l, n),
                        Generator::starred(l, n),
                    ]))
                }
            }
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            Family::BallEven(n) => format!("ball-even({})", n),
            Family::BallOdd(n) => format!("ball-odd({})", n),
            Family::BoundaryEven(n) => format!("boundary-even({})", n),
            Family::BoundaryOdd(n) => format!("boundary-odd({})", n),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Termination rank of a word. Lexicographic comparison; every rule strictly
/// decreases it, in every context:
///   1. total degree,
///   2. number of starred letters,
///   3. star inversions: pairs (p < q) with position p starred, q unstarred,
///   4. index inversions within the unstarred and starred subsequences,
///      counted against the family's target order,
///   5. occurrences of the sphere monomial.
pub type Rank = (usize, usize, usize, usize, usize);

fn rank(word: &Word, family: Family) -> Rank {
    let letters = &word.0;
    let degree = letters.len();
    let stars = letters.iter().filter(|g| g.starred).count();

    let mut star_inv = 0usize;
    for p in 0..letters.len() {
        if letters[p].starred {
            for g in &letters[p + 1..] {
                if !g.starred {
                    star_inv += 1;
                }
            }
        }
    }

    let desc = family.starred_descending();
    let mut block_inv = 0usize;
    for p in 0..letters.len() {
        for r in p + 1..letters.len() {
            let (a, b) = (letters[p], letters[r]);
            if a.starred != b.starred {
                continue;
            }
            let bad = if a.starred && desc {
                a.index < b.index
            } else {
                a.index > b.index
            };
            if bad {
                block_inv += 1;
            }
        }
    }

    let sphere = match family.sphere_word() {
        Some(sw) => {
            let pat = &sw.0;
            letters
                .windows(pat.len())
                .filter(|win| *win == &pat[..])
                .count()
        }
        None => 0,
    };

    (degree, stars, star_inv, block_inv, sphere)
}

/// Oriented rewrite rule `lhs -> rhs`; every monomial of `rhs` has strictly
/// smaller rank than `lhs`.
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Polynomial,
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// Orient a relation polynomial into a rule: the unique monomial of maximal
/// rank becomes the left side. Returns `None` when the maximum is tied.
fn orient(relation: &Polynomial, family: Family) -> Option<RewriteRule> {
    let mut best: Option<(&Word, &Scalar, Rank)> = None;
    let mut tied = false;
    for (w, c) in relation.iter() {
        let r = rank(w, family);
        match &best {
            None => best = Some((w, c, r)),
            Some((_, _, br)) => {
                if r > *br {
                    best = Some((w, c, r));
                    tied = false;
                } else if r == *br {
                    tied = true;
                }
            }
        }
    }
    let (lhs, coeff, lhs_rank) = best?;
    if tied {
        return None;
    }
    // lhs * coeff + rest = 0  =>  lhs = -rest / coeff.
    let inv = invert_unit(coeff)?;
    let mut rhs = Polynomial::zero();
    for (w, c) in relation.iter() {
        if w == lhs {
            continue;
        }
        if rank(w, family) >= lhs_rank {
            return None;
        }
        rhs.add_term(w.clone(), -(c * &inv));
    }
    Some(RewriteRule { lhs: lhs.clone(), rhs })
}

/// Invert a one-term scalar `r * s^e`; relation leading coefficients are
/// always of this shape.
fn invert_unit(c: &Scalar) -> Option<Scalar> {
    if c.num_terms() != 1 {
        return None;
    }
    let (e, r) = c.iter().next().unwrap();
    Some(Scalar::term(r.recip(), -e))
}

/// A named relation in unoriented polynomial form (reduces to zero).
#[derive(Debug, Clone)]
pub struct NamedRelation {
    pub name: String,
    pub poly: Polynomial,
}

/// Rule-selection strategy for reduction.
#[derive(Debug, Clone, Copy)]
pub enum Strategy {
    /// Leftmost redex, first matching rule in list order.
    Leftmost,
    /// Uniformly random redex, drawn from a seeded deterministic stream.
    Seeded(u64),
}

pub const DEFAULT_BUDGET: usize = 2_000_000;

/// A generator family together with its oriented, *-closed rewrite system.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub family: Family,
    pub rules: Vec<RewriteRule>,
    pub relations: Vec<NamedRelation>,
}

fn un(label: GenLabel, i: u32) -> Polynomial {
    Polynomial::generator(Generator::new(label, i))
}

fn st(label: GenLabel, i: u32) -> Polynomial {
    Polynomial::generator(Generator::starred(label, i))
}

/// Build the oriented rule set for one of the four families.
///
/// Commutation instances are enumerated over ordered pairs, and every binary
/// rule is paired with its *-conjugate so the list is manifestly *-closed;
/// self-conjugate instances are kept, not deduplicated (they are harmless to
/// the reducer).
pub fn build_presentation(family: Family, n: u32) -> Result<Presentation> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "presentation size n must be at least 1".into(),
        ));
    }
    let family = match family {
        Family::BallEven(_) => Family::BallEven(n),
        Family::BallOdd(_) => Family::BallOdd(n),
        Family::BoundaryEven(_) => Family::BoundaryEven(n),
        Family::BoundaryOdd(_) => Family::BoundaryOdd(n),
    };
    let l = family.label();
    let odd = family.is_odd();
    let s = Scalar::s_power(1);
    let s_inv = Scalar::s_power(-1);

    let mut relations: Vec<NamedRelation> = Vec::new();
    let mut sources: Vec<Polynomial> = Vec::new();

    // Self-adjointness of the first generator (odd families).
    if odd {
        let p = st(l, 1) - un(l, 1);
        relations.push(NamedRelation {
            name: format!("selfadjoint-{}1", l.letter()),
            poly: p.clone(),
        });
        sources.push(p);
    }

    // g_i g_j = q^{1/2} g_j g_i for i < j.
    for i in 1..=n {
        for j in (i + 1)..=n {
            let p = &un(l, i) * &un(l, j) - (&un(l, j) * &un(l, i)).scale(&s);
            relations.push(NamedRelation {
                name: format!("comm-{}{}-{}{}", l.letter(), i, l.letter(), j),
                poly: p.clone(),
            });
            sources.push(p);
        }
    }

    // g_i g_j* = q^{-1/2} g_j* g_i; printed for i < j (odd families: 2 <= i),
    // plus the adjoint instances, which orient the mirror-image subwords.
    let star_lo = if odd { 2 } else { 1 };
    for i in star_lo..=n {
        for j in (i + 1)..=n {
            let p = &un(l, i) * &st(l, j) - (&st(l, j) * &un(l, i)).scale(&s_inv);
            relations.push(NamedRelation {
                name: format!("starcomm-{}{}-{}{}", l.letter(), i, l.letter(), j),
                poly: p.clone(),
            });
            sources.push(p.adjoint());
            sources.push(p);
        }
    }
    if odd {
        // g_a* g_1 = q^{1/2} g_1 g_a*: consequence of the commutation with
        // g_1 and g_1 = g_1*, needed as an explicit reordering instance.
        for a in 2..=n {
            let p = &st(l, a) * &un(l, 1) - (&un(l, 1) * &st(l, a)).scale(&s);
            sources.push(p);
        }
    }

    // g_i* g_i - q g_i g_i* = (1-q)(1 - sum_{j>i} g_j g_j*); even families
    // carry it for all i, odd families for i >= 2.
    let defect_lo = if odd { 2 } else { 1 };
    for i in defect_lo..=n {
        let mut tail = Polynomial::one();
        for j in (i + 1)..=n {
            tail = tail - &un(l, j) * &st(l, j);
        }
        let p = &st(l, i) * &un(l, i)
            - (&un(l, i) * &st(l, i)).scale(&Scalar::q_power(1))
            - tail.scale(&Scalar::one_minus_q());
        relations.push(NamedRelation {
            name: format!("defect-{}{}", l.letter(), i),
            poly: p.clone(),
        });
        sources.push(p);
    }

    // Sphere relation for boundary families.
    if family.is_boundary() {
        let mut p = -Polynomial::one();
        if odd {
            p = p + &un(l, 1) * &un(l, 1);
            for j in 2..=n {
                p = p + &un(l, j) * &st(l, j);
            }
        } else {
            for j in 1..=n {
                p = p + &un(l, j) * &st(l, j);
            }
        }
        relations.push(NamedRelation { name: "sphere".into(), poly: p.clone() });
        sources.push(p);
    }

    let mut rules: Vec<RewriteRule> = Vec::new();
    for src in &sources {
        let rule = orient(src, family).ok_or_else(|| {
            Error::InvalidParameter(format!("relation cannot be oriented: {}", src))
        })?;
        rules.push(rule);
    }
    // *-conjugates of the binary rules; single-letter rules re-orient to
    // themselves and are not repeated.
    let binary: Vec<Polynomial> = rules
        .iter()
        .filter(|r| r.lhs.len() >= 2)
        .map(|r| (Polynomial::word(r.lhs.clone()) - r.rhs.clone()).adjoint())
        .collect();
    for src in &binary {
        if let Some(rule) = orient(src, family) {
            rules.push(rule);
        }
    }

    let mut pres = Presentation { family, rules, relations };
    pres.interreduce()?;
    pres.assert_ranks();
    Ok(pres)
}

impl Presentation {
    pub fn n(&self) -> u32 {
        self.family.n()
    }

    /// Generators of the presentation, unstarred.
    pub fn generators(&self) -> Vec<Generator> {
        (1..=self.n())
            .map(|i| Generator::new(self.family.label(), i))
            .collect()
    }

    pub fn contains(&self, label: GenLabel, index: u32) -> bool {
        label == self.family.label() && index >= 1 && index <= self.n()
    }

    fn check_support(&self, p: &Polynomial) -> Result<()> {
        for (label, index) in p.support() {
            if !self.contains(label, index) {
                return Err(Error::InvalidParameter(format!(
                    "generator {}{} does not belong to {}",
                    label.letter(),
                    index,
                    self.family
                )));
            }
        }
        Ok(())
    }

    /// Reduce every rule's right side against the full system until stable,
    /// so stored rules are in normal form with respect to each other.
    fn interreduce(&mut self) -> Result<()> {
        for _pass in 0..16 {
            let mut changed = false;
            for i in 0..self.rules.len() {
                let rhs = self.rules[i].rhs.clone();
                let reduced =
                    self.reduce(&rhs, Strategy::Leftmost, DEFAULT_BUDGET)?;
                if reduced != self.rules[i].rhs {
                    self.rules[i].rhs = reduced;
                    changed = true;
                }
            }
            if !changed {
                return Ok(());
            }
        }
        Err(Error::InvalidParameter(
            "rule inter-reduction did not stabilize".into(),
        ))
    }

    /// Every rule must strictly decrease the termination rank.
    fn assert_ranks(&self) {
        for rule in &self.rules {
            let lr = rank(&rule.lhs, self.family);
            for (w, _) in rule.rhs.iter() {
                assert!(
                    rank(w, self.family) < lr,
                    "rule {} does not decrease the termination rank",
                    rule
                );
            }
        }
    }

    fn find_redex_leftmost(&self, word: &Word) -> Option<(usize, usize)> {
        for pos in 0..word.len() {
            for (ri, rule) in self.rules.iter().enumerate() {
                let l = rule.lhs.len();
                if pos + l <= word.len() && word.0[pos..pos + l] == rule.lhs.0[..] {
                    return Some((pos, ri));
                }
            }
        }
        None
    }

    fn all_redexes(&self, word: &Word) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for pos in 0..word.len() {
            for (ri, rule) in self.rules.iter().enumerate() {
                let l = rule.lhs.len();
                if pos + l <= word.len() && word.0[pos..pos + l] == rule.lhs.0[..] {
                    out.push((pos, ri));
                }
            }
        }
        out
    }

    pub fn is_normal_word(&self, word: &Word) -> bool {
        self.find_redex_leftmost(word).is_none()
    }

    fn apply_at(&self, word: &Word, pos: usize, rule_idx: usize) -> Polynomial {
        let rule = &self.rules[rule_idx];
        let l = rule.lhs.len();
        let prefix = &word.0[..pos];
        let suffix = &word.0[pos + l..];
        let mut out = Polynomial::zero();
        for (w, c) in rule.rhs.iter() {
            let mut v = Vec::with_capacity(prefix.len() + w.len() + suffix.len());
            v.extend_from_slice(prefix);
            v.extend_from_slice(&w.0);
            v.extend_from_slice(suffix);
            out.add_term(Word(v), c.clone());
        }
        out
    }

    fn reduce(
        &self,
        p: &Polynomial,
        strategy: Strategy,
        budget: usize,
    ) -> Result<Polynomial> {
        let mut rng = match strategy {
            Strategy::Leftmost => None,
            Strategy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        // `active` holds only words with a known redex; irreducible words
        // accumulate in `done`. Coefficients merge on insertion, so
        // cancellations prune the worklist early.
        let mut active: BTreeMap<Word, Scalar> = BTreeMap::new();
        let mut done = Polynomial::zero();
        let route = |w: Word, c: Scalar, active: &mut BTreeMap<Word, Scalar>, done: &mut Polynomial| {
            if c.is_zero() {
                return;
            }
            if self.is_normal_word(&w) {
                done.add_term(w, c);
            } else {
                match active.get_mut(&w) {
                    Some(existing) => {
                        *existing += c;
                        if existing.is_zero() {
                            active.remove(&w);
                        }
                    }
                    None => {
                        active.insert(w, c);
                    }
                }
            }
        };
        for (w, c) in p.iter() {
            route(w.clone(), c.clone(), &mut active, &mut done);
        }

        let mut steps = 0usize;
        while !active.is_empty() {
            steps += 1;
            let (word, coeff) = match &mut rng {
                None => {
                    let w = active.keys().next().unwrap().clone();
                    let c = active.remove(&w).unwrap();
                    (w, c)
                }
                Some(r) => {
                    let i = r.gen_range(0..active.len());
                    let w = active.keys().nth(i).unwrap().clone();
                    let c = active.remove(&w).unwrap();
                    (w, c)
                }
            };
            if steps > budget {
                return Err(Error::ReductionBudgetExceeded { word: word.to_string() });
            }
            let (pos, ri) = match &mut rng {
                None => self.find_redex_leftmost(&word).expect("redex vanished"),
                Some(r) => {
                    let redexes = self.all_redexes(&word);
                    redexes[r.gen_range(0..redexes.len())]
                }
            };
            let expansion = self.apply_at(&word, pos, ri);
            for (w, c) in expansion.iter() {
                route(w.clone(), c * &coeff, &mut active, &mut done);
            }
        }
        Ok(done)
    }

    /// Normal form under leftmost-innermost reduction with the default
    /// step budget.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial> {
        self.normal_form_with(p, Strategy::Leftmost, DEFAULT_BUDGET)
    }

    pub fn normal_form_with(
        &self,
        p: &Polynomial,
        strategy: Strategy,
        budget: usize,
    ) -> Result<Polynomial> {
        self.check_support(p)?;
        self.reduce(p, strategy, budget)
    }

    /// Reduce every presentation relation and every family-specific derived
    /// identity to zero.
    pub fn verify_identities_symbolic(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        for rel in &self.relations {
            self.check_zero(&mut report, &rel.name, &rel.poly);
        }
        let l = self.family.label();
        let n = self.n();
        match self.family {
            Family::BoundaryEven(_) => {
                // w_1 normal, and w_i*w_i - w_iw_i* = (1-q) sum_{j<i} w_jw_j*.
                let norm1 = &st(l, 1) * &un(l, 1) - &un(l, 1) * &st(l, 1);
                self.check_zero(&mut report, "derived-normal-w1", &norm1);
                for i in 2..=n {
                    let mut sum = Polynomial::zero();
                    for j in 1..i {
                        sum = sum + &un(l, j) * &st(l, j);
                    }
                    let p = &st(l, i) * &un(l, i)
                        - &un(l, i) * &st(l, i)
                        - sum.scale(&Scalar::one_minus_q());
                    self.check_zero(&mut report, &format!("derived-selfcomm-w{}", i), &p);
                }
            }
            Family::BoundaryOdd(_) => {
                // t_i*t_i - t_it_i* = (1-q)(t_1^2 + sum_{2<=j<i} t_jt_j*).
                for i in 2..=n {
                    let mut sum = &un(l, 1) * &un(l, 1);
                    for j in 2..i {
                        sum = sum + &un(l, j) * &st(l, j);
                    }
                    let p = &st(l, i) * &un(l, i)
                        - &un(l, i) * &st(l, i)
                        - sum.scale(&Scalar::one_minus_q());
                    self.check_zero(&mut report, &format!("derived-selfcomm-t{}", i), &p);
                }
            }
            _ => {}
        }
        report
    }

    fn check_zero(&self, report: &mut VerificationReport, name: &str, p: &Polynomial) {
        match self.normal_form(p) {
            Ok(nf) => {
                let mut entry = CheckEntry::new(name, nf.is_zero());
                if !nf.is_zero() {
                    entry = entry.with_detail(format!("residue: {}", nf));
                }
                report.push(entry);
            }
            Err(e) => {
                report.push(CheckEntry::new(name, false).with_detail(e.to_string()));
            }
        }
    }
}

/// Formal unimodular phase assigned to one generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseValue {
    /// A fresh formal symbol of modulus one (with its conjugate).
    Formal,
    PlusOne,
    MinusOne,
}

/// Does the generator substitution `g_i -> phase_i * g_i` (with the first
/// generator optionally sent to its adjoint) preserve every relation of the
/// ball presentation? The check is exact: formal phases are tracked as
/// integer exponent vectors and never evaluated numerically.
pub fn check_phase_automorphism(pres: &Presentation, phases: &[PhaseValue]) -> Result<bool> {
    check_substitution(pres, phases, false)
}

pub fn check_substitution(
    pres: &Presentation,
    phases: &[PhaseValue],
    conjugate_first: bool,
) -> Result<bool> {
    let n = pres.n() as usize;
    if !matches!(pres.family, Family::BallEven(_) | Family::BallOdd(_)) {
        return Err(Error::InvalidParameter(
            "phase substitution checks apply to ball presentations".into(),
        ));
    }
    if phases.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {} phases, got {}",
            n,
            phases.len()
        )));
    }
    if matches!(pres.family, Family::BallOdd(_)) && phases[0] == PhaseValue::Formal {
        return Err(Error::InvalidParameter(
            "the phase of the self-adjoint generator must be +1 or -1".into(),
        ));
    }

    for rel in &pres.relations {
        // Bucket the substituted image by the formal phase monomial; the
        // image vanishes iff every bucket reduces to zero.
        let mut buckets: BTreeMap<Vec<i64>, Polynomial> = BTreeMap::new();
        for (word, coeff) in rel.poly.iter() {
            let mut phi = vec![0i64; n];
            let mut sign = false;
            let mut letters = Vec::with_capacity(word.len());
            for g in &word.0 {
                let i = (g.index - 1) as usize;
                match phases[i] {
                    PhaseValue::Formal => phi[i] += if g.starred { -1 } else { 1 },
                    PhaseValue::MinusOne => sign = !sign,
                    PhaseValue::PlusOne => {}
                }
                if conjugate_first && g.index == 1 {
                    letters.push(g.adjoint());
                } else {
                    letters.push(*g);
                }
            }
            let c = if sign { -coeff.clone() } else { coeff.clone() };
            buckets
                .entry(phi)
                .or_insert_with(Polynomial::zero)
                .add_term(Word(letters), c);
        }
        for poly in buckets.values() {
            if !pres.normal_form(poly)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
