//! The irreducible-representation catalog of the ball algebras, boundary
//! descents, the quantum double suspension on representations, and the
//! numeric verifications tied to representations.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{GenLabel, Generator, Polynomial};
use crate::error::{Error, Result};
use crate::fock::{
    hermitian_extremes, jacobi_hermitian_eig, polar_isometry, q_diagonal, residual,
    weighted_shift, Assignment, OperatorMatrix, QValue, TruncatedSpace,
};
use crate::presentation::{Family, Presentation};
use crate::report::{CheckEntry, VerificationReport};

/// Catalog label of an irreducible representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RepKind {
    /// Circle family: `rho_j^theta` on the even balls, `eta_j^theta` on the
    /// odd ones; `j = 1` is the one-dimensional case.
    Circle { j: u32, theta: Complex64 },
    /// The faithful shift representation `sigma` of the even ball.
    Shift,
    /// The interval family `sigma_s`, `s` in [-1, 1], of the odd ball.
    Interval { s: f64 },
}

impl RepKind {
    pub fn name(&self) -> String {
        match self {
            RepKind::Circle { j, theta } => {
                format!("rho{}(theta={:+.4}{:+.4}i)", j, theta.re, theta.im)
            }
            RepKind::Shift => "sigma".to_string(),
            RepKind::Interval { s } => format!("sigma(s={:+.2})", s),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RepSpec {
    pub family: Family,
    pub kind: RepKind,
    pub q: QValue,
    pub cutoff: usize,
}

/// A concrete representation: one matrix per generator on a shared space.
#[derive(Debug, Clone)]
pub struct Representation {
    pub family: Family,
    pub kind: RepKind,
    pub q: f64,
    pub space: TruncatedSpace,
    pub label: GenLabel,
    mats: BTreeMap<u32, OperatorMatrix>,
}

impl Representation {
    pub fn n(&self) -> u32 {
        self.family.n()
    }

    pub fn matrix(&self, index: u32) -> &OperatorMatrix {
        &self.mats[&index]
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }

    /// Move to the boundary generator alphabet (descent along the quotient).
    pub fn relabel(mut self, family: Family) -> Representation {
        assert_eq!(family.n(), self.family.n());
        self.family = family;
        self.label = family.label();
        self
    }

    pub fn assignment(&self) -> Assignment {
        let mut a = Assignment::new(self.space.clone(), self.q);
        for (i, m) in &self.mats {
            a.insert(self.label, *i, m.clone());
        }
        a
    }

    /// The trivial representation of the scalars, the seed of the even
    /// suspension chain.
    pub fn point(q: QValue) -> Representation {
        Representation {
            family: Family::BallEven(0),
            kind: RepKind::Shift,
            q: q.get(),
            space: TruncatedSpace::cube(0, 1),
            label: GenLabel::Z,
            mats: BTreeMap::new(),
        }
    }
}

fn check_theta(theta: Complex64) -> Result<()> {
    if (theta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "theta must have modulus one, got |theta| = {}",
            theta.norm()
        )));
    }
    Ok(())
}

/// Catalog representation of the even ball (generators `z_1..z_n`):
/// `rho_j^theta` acts on `H_{j-1}` with `z_i = 0` for `i <= n-j`, the
/// `theta`-weighted diagonal at `i = n-j+1` and shifts above; `sigma` is all
/// shifts on `H_n`.
pub fn irrep_ball_even(spec: &RepSpec) -> Result<Representation> {
    let n = match spec.family {
        Family::BallEven(n) => n,
        other => {
            return Err(Error::InvalidParameter(format!(
                "irrep_ball_even expects a ball-even family, got {}",
                other
            )))
        }
    };
    let q = spec.q;
    let mut mats = BTreeMap::new();
    let space;
    match spec.kind {
        RepKind::Shift => {
            space = TruncatedSpace::cube(n as usize, spec.cutoff);
            for i in 1..=n {
                mats.insert(i, weighted_shift(i as usize, &space, q)?);
            }
        }
        RepKind::Circle { j, theta } => {
            check_theta(theta)?;
            if j < 1 || j > n {
                return Err(Error::InvalidParameter(format!(
                    "circle family index {} out of range 1..={}",
                    j, n
                )));
            }
            space = TruncatedSpace::cube((j - 1) as usize, spec.cutoff);
            let all: Vec<usize> = (1..=(j as usize - 1)).collect();
            for i in 1..=n {
                let m = if i <= n - j {
                    OperatorMatrix::zeros(space.dim())
                } else if i == n - j + 1 {
                    q_diagonal(&space, q, &all)?.scale(theta)
                } else {
                    weighted_shift((i + j - n - 1) as usize, &space, q)?
                };
                mats.insert(i, m);
            }
        }
        RepKind::Interval { .. } => {
            return Err(Error::InvalidParameter(
                "the even ball has no interval family".into(),
            ))
        }
    }
    Ok(Representation {
        family: spec.family,
        kind: spec.kind,
        q: q.get(),
        space,
        label: GenLabel::Z,
        mats,
    })
}

/// Catalog representation of the odd ball (generators `x_1..x_m`, with the
/// self-adjoint `x_1`): circle families `eta_j^theta` for `j = 1..m-1` and
/// the interval family `sigma_s` with `x_1 = s q^{(k_1+...+k_{m-1})/2}`.
pub fn irrep_ball_odd(spec: &RepSpec) -> Result<Representation> {
    let m = match spec.family {
        Family::BallOdd(m) => m,
        other => {
            return Err(Error::InvalidParameter(format!(
                "irrep_ball_odd expects a ball-odd family, got {}",
                other
            )))
        }
    };
    let q = spec.q;
    let mut mats = BTreeMap::new();
    let space;
    match spec.kind {
        RepKind::Interval { s } => {
            if !(-1.0..=1.0).contains(&s) {
                return Err(Error::InvalidParameter(format!(
                    "interval parameter must lie in [-1, 1], got {}",
                    s
                )));
            }
            space = TruncatedSpace::cube((m - 1) as usize, spec.cutoff);
            let all: Vec<usize> = (1..=(m as usize - 1)).collect();
            mats.insert(
                1,
                q_diagonal(&space, q, &all)?.scale(Complex64::new(s, 0.0)),
            );
            for i in 2..=m {
                mats.insert(i, weighted_shift((i - 1) as usize, &space, q)?);
            }
        }
        RepKind::Circle { j, theta } => {
            check_theta(theta)?;
            if j < 1 || j + 1 > m {
                return Err(Error::InvalidParameter(format!(
                    "circle family index {} out of range 1..={}",
                    j,
                    m.saturating_sub(1)
                )));
            }
            space = TruncatedSpace::cube((j - 1) as usize, spec.cutoff);
            let all: Vec<usize> = (1..=(j as usize - 1)).collect();
            for i in 1..=m {
                let m_i = if i <= m - j {
                    OperatorMatrix::zeros(space.dim())
                } else if i == m - j + 1 {
                    q_diagonal(&space, q, &all)?.scale(theta)
                } else {
                    weighted_shift((i + j - m - 1) as usize, &space, q)?
                };
                mats.insert(i, m_i);
            }
        }
        RepKind::Shift => {
            return Err(Error::InvalidParameter(
                "the odd ball catalog has interval and circle families only".into(),
            ))
        }
    }
    Ok(Representation {
        family: spec.family,
        kind: spec.kind,
        q: q.get(),
        space,
        label: GenLabel::X,
        mats,
    })
}

/// The default grid of unit phases: 8th roots of unity.
pub fn default_theta_grid() -> Vec<Complex64> {
    (0..8)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * k as f64))
        .collect()
}

/// The default interval-parameter grid for `sigma_s` sweeps.
pub fn default_s_grid() -> Vec<f64> {
    vec![-1.0, -0.5, 0.0, 0.5, 1.0]
}

/// Full catalog of a ball family over the given parameter grids.
pub fn catalog(
    family: Family,
    q: QValue,
    cutoff: usize,
    thetas: &[Complex64],
    s_grid: &[f64],
) -> Result<Vec<Representation>> {
    let mut out = Vec::new();
    match family {
        Family::BallEven(n) => {
            for j in 1..=n {
                for theta in thetas {
                    out.push(irrep_ball_even(&RepSpec {
                        family,
                        kind: RepKind::Circle { j, theta: *theta },
                        q,
                        cutoff,
                    })?);
                }
            }
            out.push(irrep_ball_even(&RepSpec { family, kind: RepKind::Shift, q, cutoff })?);
        }
        Family::BallOdd(m) => {
            for j in 1..m {
                for theta in thetas {
                    out.push(irrep_ball_odd(&RepSpec {
                        family,
                        kind: RepKind::Circle { j, theta: *theta },
                        q,
                        cutoff,
                    })?);
                }
            }
            for s in s_grid {
                out.push(irrep_ball_odd(&RepSpec {
                    family,
                    kind: RepKind::Interval { s: *s },
                    q,
                    cutoff,
                })?);
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "catalog applies to ball families, got {}",
                other
            )))
        }
    }
    Ok(out)
}

/// The catalog members that annihilate the boundary ideal, relabeled in
/// boundary generators: every circle family descends; on the odd side the
/// interval family contributes only its endpoints `sigma_{+1}`, `sigma_{-1}`.
pub fn boundary_descents(
    family: Family,
    q: QValue,
    cutoff: usize,
    thetas: &[Complex64],
) -> Result<Vec<Representation>> {
    match family {
        Family::BoundaryEven(n) => {
            let ball = Family::BallEven(n);
            let mut out = Vec::new();
            for j in 1..=n {
                for theta in thetas {
                    out.push(
                        irrep_ball_even(&RepSpec {
                            family: ball,
                            kind: RepKind::Circle { j, theta: *theta },
                            q,
                            cutoff,
                        })?
                        .relabel(family),
                    );
                }
            }
            Ok(out)
        }
        Family::BoundaryOdd(n) => {
            let ball = Family::BallOdd(n);
            let mut out = Vec::new();
            for j in 1..n {
                for theta in thetas {
                    out.push(
                        irrep_ball_odd(&RepSpec {
                            family: ball,
                            kind: RepKind::Circle { j, theta: *theta },
                            q,
                            cutoff,
                        })?
                        .relabel(family),
                    );
                }
            }
            for s in [1.0, -1.0] {
                out.push(
                    irrep_ball_odd(&RepSpec {
                        family: ball,
                        kind: RepKind::Interval { s },
                        q,
                        cutoff,
                    })?
                    .relabel(family),
                );
            }
            Ok(out)
        }
        other => Err(Error::InvalidParameter(format!(
            "boundary_descents expects a boundary family, got {}",
            other
        ))),
    }
}

/// Quantum double suspension of a representation: `G_j = g_j (x) diag(q^{k/2})`
/// for the old generators and `G_{n+1} = 1 (x) W` with the weighted shift `W`
/// on a fresh level space of size `factor_cutoff`.
pub fn suspend_rep(rep: &Representation, factor_cutoff: usize) -> Result<Representation> {
    let q = QValue::new(rep.q)?;
    let level = TruncatedSpace::cube(1, factor_cutoff);
    let shift = weighted_shift(1, &level, q)?;
    let diag = q_diagonal(&level, q, &[1])?;
    let space = rep.space.tensor_axis(factor_cutoff);
    let n = rep.n();
    let mut mats = BTreeMap::new();
    for i in 1..=n {
        mats.insert(i, rep.matrix(i).kron(&diag));
    }
    mats.insert(
        n + 1,
        OperatorMatrix::identity(rep.space.dim()).kron(&shift),
    );
    let family = match rep.family {
        Family::BallEven(n) => Family::BallEven(n + 1),
        Family::BallOdd(m) => Family::BallOdd(m + 1),
        other => {
            return Err(Error::InvalidParameter(format!(
                "suspension applies to ball representations, got {}",
                other
            )))
        }
    };
    Ok(Representation {
        family,
        kind: rep.kind,
        q: rep.q,
        space,
        label: rep.label,
        mats,
    })
}

fn un(label: GenLabel, i: u32) -> Polynomial {
    Polynomial::generator(Generator::new(label, i))
}

fn st(label: GenLabel, i: u32) -> Polynomial {
    Polynomial::generator(Generator::starred(label, i))
}

/// Smallest eigenvalue of the interior restriction of a self-adjoint
/// polynomial expression in the representation.
fn min_eig_interior(
    rep: &Representation,
    expr: &Polynomial,
    margin: usize,
) -> Result<f64> {
    let a = rep.assignment();
    let m = a.eval(expr)?;
    let flags = rep.space.interior_flags(margin);
    let sub = m.restrict(&flags);
    if sub.dim() == 0 {
        return Err(Error::InvalidParameter(
            "margin leaves no interior to check".into(),
        ));
    }
    Ok(hermitian_extremes(&sub).0)
}

/// Check every relation of `pres` in the representation (interior residual
/// at the given margin) plus the family's positivity inequalities.
pub fn verify_rep(
    rep: &Representation,
    pres: &Presentation,
    margin: usize,
    tol: f64,
) -> Result<VerificationReport> {
    if pres.family.label() != rep.label || pres.n() != rep.n() {
        return Err(Error::InvalidParameter(format!(
            "representation of {} checked against {}",
            rep.family, pres.family
        )));
    }
    let mut report = VerificationReport::new();
    let assignment = rep.assignment();
    for rel in &pres.relations {
        let r = residual(&rel.poly, &assignment, margin)?;
        report.push(
            CheckEntry::new(format!("{}[{}]", rel.name, rep.name()), r <= tol).with_value(r),
        );
    }
    let l = rep.label;
    let n = rep.n();
    match pres.family {
        Family::BallEven(_) => {
            let mut radius = Polynomial::one();
            for j in 1..=n {
                radius = radius - &un(l, j) * &st(l, j);
            }
            let lo = min_eig_interior(rep, &radius, margin)?;
            report.push(
                CheckEntry::new(format!("pos-radius[{}]", rep.name()), lo >= -tol)
                    .with_value(lo),
            );
            let comm = &st(l, 1) * &un(l, 1) - &un(l, 1) * &st(l, 1);
            let lo = min_eig_interior(rep, &comm, margin)?;
            report.push(
                CheckEntry::new(format!("pos-selfcomm-z1[{}]", rep.name()), lo >= -tol)
                    .with_value(lo),
            );
            // Z_n*Z_n >= 1 - q on the interior.
            let zz = &st(l, n) * &un(l, n);
            let lo = min_eig_interior(rep, &zz, margin)?;
            let bound = 1.0 - rep.q;
            report.push(
                CheckEntry::new(format!("pos-invertible-zn[{}]", rep.name()), lo >= bound - tol)
                    .with_value(lo - bound),
            );
        }
        Family::BallOdd(_) => {
            let mut radius = Polynomial::one() - &un(l, 1) * &un(l, 1);
            for j in 2..=n {
                radius = radius - &un(l, j) * &st(l, j);
            }
            let lo = min_eig_interior(rep, &radius, margin)?;
            report.push(
                CheckEntry::new(format!("pos-radius[{}]", rep.name()), lo >= -tol)
                    .with_value(lo),
            );
        }
        _ => {}
    }
    Ok(report)
}

/// Identity (`oddradius`): in a suspension, `1 - sum_{j<=n+1} G_j G_j*`
/// equals `(1 - sum_{j<=n} g_j g_j*) (x) diag(q^k)`, entrywise on the
/// interior.
pub fn check_oddradius(
    base: &Representation,
    suspended: &Representation,
    margin: usize,
) -> Result<f64> {
    let q = QValue::new(base.q)?;
    let dim = suspended.space.dim();
    let mut lhs = OperatorMatrix::identity(dim);
    for i in 1..=suspended.n() {
        let g = suspended.matrix(i);
        lhs = lhs.sub(&g.matmul(&g.adjoint()));
    }
    let mut base_radius = OperatorMatrix::identity(base.space.dim());
    for i in 1..=base.n() {
        let g = base.matrix(i);
        base_radius = base_radius.sub(&g.matmul(&g.adjoint()));
    }
    let factor_dim = dim / base.space.dim().max(1);
    let level = TruncatedSpace::cube(1, factor_dim);
    let qk = q_diagonal(&level, q, &[1])?;
    let rhs = base_radius.kron(&qk.matmul(&qk)); // diag(q^k)
    let flags = suspended.space.interior_flags(margin);
    Ok(lhs.max_abs_diff_on(&rhs, &flags))
}

/// The suspension identities: `G_j G_{n+1} = q^{1/2} G_{n+1} G_j`,
/// `G_j G_{n+1}* = q^{-1/2} G_{n+1}* G_j` and the disc relation for
/// `G_{n+1}`, as interior residuals.
pub fn check_suspension_identities(
    suspended: &Representation,
    margin: usize,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let n1 = suspended.n();
    let q = suspended.q;
    let s = q.sqrt();
    let flags = suspended.space.interior_flags(margin);
    let top = suspended.matrix(n1);
    for j in 1..n1 {
        let g = suspended.matrix(j);
        let r1 = g
            .matmul(top)
            .sub(&top.matmul(g).scale(Complex64::new(s, 0.0)))
            .compress(&flags)
            .op_norm();
        report.push(CheckEntry::new(format!("suspension-comm-{}", j), r1 <= 1e-12).with_value(r1));
        let r2 = g
            .matmul(&top.adjoint())
            .sub(&top.adjoint().matmul(g).scale(Complex64::new(1.0 / s, 0.0)))
            .compress(&flags)
            .op_norm();
        report
            .push(CheckEntry::new(format!("suspension-starcomm-{}", j), r2 <= 1e-12).with_value(r2));
    }
    let disc = top
        .adjoint()
        .matmul(top)
        .sub(&top.matmul(&top.adjoint()).scale(Complex64::new(q, 0.0)))
        .sub(&OperatorMatrix::identity(suspended.space.dim()).scale(Complex64::new(1.0 - q, 0.0)))
        .compress(&flags)
        .op_norm();
    report.push(CheckEntry::new("suspension-disc", disc <= 1e-12).with_value(disc));
    Ok(report)
}

/// Entrywise comparison of a suspension of `sigma` at level `n` against the
/// catalog `sigma` at level `n+1`, under the canonical basis bijection
/// (which is the identity on flat indices).
pub fn suspension_coherence(n: u32, q: QValue, cutoff: usize) -> Result<f64> {
    let base = irrep_ball_even(&RepSpec {
        family: Family::BallEven(n),
        kind: RepKind::Shift,
        q,
        cutoff,
    })?;
    let suspended = suspend_rep(&base, cutoff)?;
    let target = irrep_ball_even(&RepSpec {
        family: Family::BallEven(n + 1),
        kind: RepKind::Shift,
        q,
        cutoff,
    })?;
    let mut worst = 0.0f64;
    for i in 1..=n + 1 {
        let d = suspended
            .matrix(i)
            .sub(target.matrix(i))
            .max_abs_entry();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Truncated-series checks from the polar-decomposition lemma: partial sums
/// with `K` terms reproduce the suspended generators within the geometric
/// tail bound.
pub fn check_sum_identities(
    n: u32,
    q: QValue,
    base_cutoff: usize,
    factor_cutoff: usize,
    ks: &[usize],
    margin: usize,
    tol: f64,
) -> Result<VerificationReport> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let base = irrep_ball_even(&RepSpec {
        family: Family::BallEven(n),
        kind: RepKind::Shift,
        q,
        cutoff: base_cutoff,
    })?;
    let suspended = suspend_rep(&base, factor_cutoff)?;
    let qv = q.get();
    let dim = suspended.space.dim();
    let top = suspended.matrix(n + 1);
    let t = polar_isometry(top, 0.0)?;
    let defect = OperatorMatrix::identity(dim).sub(&t.matmul(&t.adjoint()));
    let flags = suspended.space.interior_flags(margin);

    let mut report = VerificationReport::new();
    for k_terms in ks {
        let k_terms = *k_terms;
        // sum_{k<K} q^{k/2} T^k Z_i (1-TT*) T*^k and the shift analogue.
        let mut tk = OperatorMatrix::identity(dim);
        let mut partial: Vec<OperatorMatrix> =
            (1..=n).map(|_| OperatorMatrix::zeros(dim)).collect();
        let mut partial_top = t.clone();
        for k in 0..k_terms {
            let tk_adj = tk.adjoint();
            for i in 1..=n {
                let term = tk
                    .matmul(suspended.matrix(i))
                    .matmul(&defect)
                    .matmul(&tk_adj)
                    .scale(Complex64::new(qv.powf(k as f64 / 2.0), 0.0));
                partial[(i - 1) as usize] = partial[(i - 1) as usize].add(&term);
            }
            let coeff = (1.0 - qv.powi(k as i32 + 1)).sqrt() - 1.0;
            let term = t
                .matmul(&tk)
                .matmul(&defect)
                .matmul(&tk_adj)
                .scale(Complex64::new(coeff, 0.0));
            partial_top = partial_top.add(&term);
            tk = t.matmul(&tk);
        }
        for i in 1..=n {
            let z = suspended.matrix(i);
            let err = z
                .sub(&partial[(i - 1) as usize])
                .compress(&flags)
                .op_norm();
            let bound = qv.powf(k_terms as f64 / 2.0) * z.op_norm() + tol;
            report.push(
                CheckEntry::new(format!("series-Z{}-K{}", i, k_terms), err <= bound)
                    .with_value(err)
                    .with_detail(format!("bound {:.3e}", bound)),
            );
        }
        let err_top = top.sub(&partial_top).compress(&flags).op_norm();
        let bound_top = qv.powi(k_terms as i32 + 1) / (1.0 - qv) + tol;
        report.push(
            CheckEntry::new(format!("series-Z{}-K{}", n + 1, k_terms), err_top <= bound_top)
                .with_value(err_top)
                .with_detail(format!("bound {:.3e}", bound_top)),
        );
    }
    Ok(report)
}

/// TCCR correspondence: with `a_i = z_i*/sqrt(1-q)` in `sigma`, the twisted
/// canonical commutation relations hold with `mu = sqrt(q)`.
pub fn check_tccr(n: u32, q: QValue, cutoff: usize, margin: usize) -> Result<VerificationReport> {
    let rep = irrep_ball_even(&RepSpec {
        family: Family::BallEven(n),
        kind: RepKind::Shift,
        q,
        cutoff,
    })?;
    let qv = q.get();
    let mu = qv.sqrt();
    let scale = 1.0 / (1.0 - qv).sqrt();
    let a: Vec<OperatorMatrix> = (1..=n)
        .map(|i| rep.matrix(i).adjoint().scale(Complex64::new(scale, 0.0)))
        .collect();
    let flags = rep.space.interior_flags(margin);
    let dim = rep.space.dim();
    let mut report = VerificationReport::new();
    let c = |x: f64| Complex64::new(x, 0.0);
    for i in 0..n as usize {
        for j in (i + 1)..n as usize {
            // a_j a_i = mu a_i a_j
            let r = a[j]
                .matmul(&a[i])
                .sub(&a[i].matmul(&a[j]).scale(c(mu)))
                .compress(&flags)
                .op_norm();
            report.push(
                CheckEntry::new(format!("tccr1-a{}-a{}", j + 1, i + 1), r <= 1e-10).with_value(r),
            );
        }
    }
    for i in 0..n as usize {
        for j in 0..n as usize {
            if i == j {
                continue;
            }
            // a_j a_i* = mu a_i* a_j
            let r = a[j]
                .matmul(&a[i].adjoint())
                .sub(&a[i].adjoint().matmul(&a[j]).scale(c(mu)))
                .compress(&flags)
                .op_norm();
            report.push(
                CheckEntry::new(format!("tccr2-a{}-a{}", j + 1, i + 1), r <= 1e-10).with_value(r),
            );
        }
    }
    for i in 0..n as usize {
        // a_i a_i* = 1 + mu^2 a_i* a_i - (1-mu^2) sum_{j>i} a_j* a_j
        let mut rhs = OperatorMatrix::identity(dim)
            .add(&a[i].adjoint().matmul(&a[i]).scale(c(mu * mu)));
        for j in (i + 1)..n as usize {
            rhs = rhs.sub(&a[j].adjoint().matmul(&a[j]).scale(c(1.0 - mu * mu)));
        }
        let r = a[i]
            .matmul(&a[i].adjoint())
            .sub(&rhs)
            .compress(&flags)
            .op_norm();
        report.push(CheckEntry::new(format!("tccr3-a{}", i + 1), r <= 1e-10).with_value(r));
    }
    Ok(report)
}

/// Injectivity criteria in the shape of the uniqueness theorems.
#[derive(Debug, Clone, Copy)]
pub enum InjectivityCriterion {
    /// Even ball: injective iff the image of `z_1` is not normal.
    NormalityDefect,
    /// Odd boundary: injective iff the spectrum of `t_1` contains values of
    /// both signs.
    SignSpectrum,
    /// Even boundary: finite-truncation surrogate — eigenvalue phases of the
    /// (normal) `w_1` image must delta-cover the circle.
    CircleCover { delta: f64 },
}

#[derive(Debug, Clone)]
pub struct InjectivityOutcome {
    pub injective: bool,
    pub witness: f64,
    pub detail: String,
}

/// Apply a uniqueness criterion to a representation presented as a direct
/// sum of components.
pub fn injectivity_check(
    components: &[&Representation],
    criterion: InjectivityCriterion,
    margin: usize,
    tol: f64,
) -> Result<InjectivityOutcome> {
    if components.is_empty() {
        return Err(Error::InvalidParameter("no components given".into()));
    }
    match criterion {
        InjectivityCriterion::NormalityDefect => {
            let mut defect = 0.0f64;
            for rep in components {
                let g = rep.matrix(1);
                let comm = g.adjoint().matmul(g).sub(&g.matmul(&g.adjoint()));
                let flags = rep.space.interior_flags(margin);
                defect = defect.max(comm.compress(&flags).op_norm());
            }
            Ok(InjectivityOutcome {
                injective: defect > tol,
                witness: defect,
                detail: format!("normality defect of the first generator: {:.6e}", defect),
            })
        }
        InjectivityCriterion::SignSpectrum => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for rep in components {
                let flags = rep.space.interior_flags(margin);
                let sub = rep.matrix(1).restrict(&flags);
                if sub.dim() == 0 {
                    continue;
                }
                let (a, b) = hermitian_extremes(&sub);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            let witness = (-lo).min(hi);
            Ok(InjectivityOutcome {
                injective: lo < -tol && hi > tol,
                witness,
                detail: format!("spectrum extremes of t1: [{:.4}, {:.4}]", lo, hi),
            })
        }
        InjectivityCriterion::CircleCover { delta } => {
            let mut phases: Vec<f64> = Vec::new();
            for rep in components {
                let flags = rep.space.interior_flags(margin);
                let sub = rep.matrix(1).restrict(&flags);
                if sub.dim() == 0 {
                    continue;
                }
                for lambda in eigenvalues_normal(&sub)? {
                    if lambda.norm() > 1e-8 {
                        phases.push(lambda.arg());
                    }
                }
            }
            if phases.is_empty() {
                return Ok(InjectivityOutcome {
                    injective: false,
                    witness: std::f64::consts::TAU,
                    detail: "no nonzero eigenvalues".into(),
                });
            }
            phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut gap = 0.0f64;
            for w in phases.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            gap = gap.max(phases[0] + std::f64::consts::TAU - phases[phases.len() - 1]);
            Ok(InjectivityOutcome {
                injective: gap <= delta,
                witness: gap,
                detail: format!(
                    "largest phase gap {:.4} against delta {:.4} ({} eigenvalues)",
                    gap,
                    delta,
                    phases.len()
                ),
            })
        }
    }
}

/// Eigenvalues of a (numerically) normal matrix: simultaneous
/// diagonalization of its Hermitian and anti-Hermitian parts.
pub fn eigenvalues_normal(m: &OperatorMatrix) -> Result<Vec<Complex64>> {
    if m.is_diagonal() {
        return Ok((0..m.dim()).map(|i| m.entry(i, i)).collect());
    }
    let dim = m.dim();
    let comm = m.matmul(&m.adjoint()).sub(&m.adjoint().matmul(m));
    if comm.max_abs_entry() > 1e-8 * m.max_abs_entry().max(1.0) {
        return Err(Error::InvalidParameter(
            "matrix is not normal; eigenvalue phases are not defined".into(),
        ));
    }
    let h1 = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    let h2 = m.sub(&m.adjoint()).scale(Complex64::new(0.0, -0.5));
    let eig = jacobi_hermitian_eig(&h1);
    // Transform the imaginary part into the eigenbasis of the real part;
    // it is block-diagonal over clusters of equal eigenvalues.
    let h2d = h2.to_dense();
    let mut b = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                for l in 0..dim {
                    acc += eig.vector_entry(k, i).conj() * h2d[k * dim + l] * eig.vector_entry(l, j);
                }
            }
            b[i * dim + j] = acc;
        }
    }
    // Cluster by the real eigenvalue and diagonalize each block.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].partial_cmp(&eig.eigenvalues[*b]).unwrap());
    let scale = eig
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .fold(1.0f64, f64::max);
    let ctol = 1e-8 * scale;
    let mut out = Vec::with_capacity(dim);
    let mut start = 0usize;
    while start < dim {
        let mut end = start + 1;
        while end < dim
            && (eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]]).abs() <= ctol
        {
            end += 1;
        }
        let idx: Vec<usize> = order[start..end].to_vec();
        let k = idx.len();
        let mut block = OperatorMatrix::zeros(k);
        for (bi, gi) in idx.iter().enumerate() {
            for (bj, gj) in idx.iter().enumerate() {
                let v = b[gi * dim + gj];
                if v.norm() > 0.0 {
                    block.set(bi, bj, v);
                }
            }
        }
        let sub = jacobi_hermitian_eig(&block);
        for (bi, gi) in idx.iter().enumerate() {
            out.push(Complex64::new(eig.eigenvalues[*gi], sub.eigenvalues[bi]));
        }
        start = end;
    }
    Ok(out)
}

/// Expected family counts of the catalog: circle families and point/interval
/// families, mirroring the primitive-ideal-space shape.
pub fn catalog_shape(family: Family) -> (u32, u32) {
    match family {
        Family::BallEven(n) => (n, 1),
        Family::BallOdd(m) => (m - 1, 1),
        Family::BoundaryEven(n) => (n, 0),
        Family::BoundaryOdd(m) => (m - 1, 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::build_presentation;

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    #[test]
    fn rho1_is_scalar() {
        let rep = irrep_ball_even(&RepSpec {
            family: Family::BallEven(3),
            kind: RepKind::Circle { j: 1, theta: Complex64::new(0.0, 1.0) },
            q: q(0.5),
            cutoff: 8,
        })
        .unwrap();
        assert_eq!(rep.space.dim(), 1);
        assert_eq!(rep.matrix(3).entry(0, 0), Complex64::new(0.0, 1.0));
        assert_eq!(rep.matrix(1).nnz(), 0);
        assert_eq!(rep.matrix(2).nnz(), 0);
    }

    #[test]
    fn sigma_of_disc_is_the_weighted_shift() {
        let rep = irrep_ball_even(&RepSpec {
            family: Family::BallEven(1),
            kind: RepKind::Shift,
            q: q(0.5),
            cutoff: 6,
        })
        .unwrap();
        let sp = TruncatedSpace::cube(1, 6);
        let w = weighted_shift(1, &sp, q(0.5)).unwrap();
        assert_eq!(rep.matrix(1), &w);
    }

    #[test]
    fn rho_n_theta_structure() {
        // n = 2, j = 2: z_1 diagonal theta q^{k/2}, z_2 = S_1 on H_1.
        let theta = Complex64::from_polar(1.0, 0.3);
        let rep = irrep_ball_even(&RepSpec {
            family: Family::BallEven(2),
            kind: RepKind::Circle { j: 2, theta },
            q: q(0.25),
            cutoff: 5,
        })
        .unwrap();
        assert_eq!(rep.space.dim(), 5);
        for k in 0..5usize {
            let expect = theta * 0.25f64.powf(k as f64 / 2.0);
            assert!((rep.matrix(1).entry(k, k) - expect).norm() < 1e-14);
        }
        let s1 = weighted_shift(1, &TruncatedSpace::cube(1, 5), q(0.25)).unwrap();
        assert_eq!(rep.matrix(2), &s1);
    }

    #[test]
    fn sigma_s_structure() {
        // sigma_0: x_1 = 0; sigma_1 on the 2-generator odd ball: diagonal.
        let rep = irrep_ball_odd(&RepSpec {
            family: Family::BallOdd(2),
            kind: RepKind::Interval { s: 0.0 },
            q: q(0.25),
            cutoff: 4,
        })
        .unwrap();
        assert_eq!(rep.matrix(1).nnz(), 0);
        let s1 = weighted_shift(1, &TruncatedSpace::cube(1, 4), q(0.25)).unwrap();
        assert_eq!(rep.matrix(2), &s1);

        let rep = irrep_ball_odd(&RepSpec {
            family: Family::BallOdd(2),
            kind: RepKind::Interval { s: 1.0 },
            q: q(0.25),
            cutoff: 4,
        })
        .unwrap();
        for k in 0..4usize {
            assert!((rep.matrix(1).entry(k, k).re - 0.25f64.powf(k as f64 / 2.0)).abs() < 1e-14);
        }
        assert!(irrep_ball_odd(&RepSpec {
            family: Family::BallOdd(2),
            kind: RepKind::Interval { s: 1.5 },
            q: q(0.25),
            cutoff: 4,
        })
        .is_err());
    }

    #[test]
    fn eta1_is_scalar_on_top_generator() {
        let theta = Complex64::new(-1.0, 0.0);
        let rep = irrep_ball_odd(&RepSpec {
            family: Family::BallOdd(3),
            kind: RepKind::Circle { j: 1, theta },
            q: q(0.5),
            cutoff: 8,
        })
        .unwrap();
        assert_eq!(rep.space.dim(), 1);
        assert_eq!(rep.matrix(3).entry(0, 0), theta);
        assert_eq!(rep.matrix(1).nnz(), 0);
        assert_eq!(rep.matrix(2).nnz(), 0);
    }

    #[test]
    fn catalog_counts_match_shape() {
        let thetas = default_theta_grid();
        let s_grid = default_s_grid();
        for n in 1..=3u32 {
            let c = catalog(Family::BallEven(n), q(0.5), 4, &thetas, &s_grid).unwrap();
            assert_eq!(c.len(), n as usize * thetas.len() + 1);
            let c = catalog(Family::BallOdd(n), q(0.5), 4, &thetas, &s_grid).unwrap();
            assert_eq!(c.len(), (n - 1) as usize * thetas.len() + s_grid.len());
        }
    }

    #[test]
    fn boundary_descent_membership() {
        let thetas = default_theta_grid();
        let reps = boundary_descents(Family::BoundaryOdd(2), q(0.5), 6, &thetas).unwrap();
        // eta_1 over the grid plus sigma_{+1}, sigma_{-1}
        assert_eq!(reps.len(), thetas.len() + 2);
        assert!(reps.iter().any(|r| matches!(r.kind, RepKind::Interval { s } if s == 1.0)));
        assert!(reps.iter().any(|r| matches!(r.kind, RepKind::Interval { s } if s == -1.0)));
        for rep in &reps {
            assert_eq!(rep.label, GenLabel::T);
        }
        // Even boundary: only the circle families descend, sigma does not.
        let reps = boundary_descents(Family::BoundaryEven(1), q(0.5), 6, &thetas).unwrap();
        assert_eq!(reps.len(), thetas.len());
        for rep in &reps {
            assert_eq!(rep.space.dim(), 1, "the n=1 boundary is the circle");
            assert!((rep.matrix(1).entry(0, 0).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn catalog_representations_satisfy_relations() {
        let tol = 1e-10;
        for n in 1..=2u32 {
            for qv in [0.3, 0.7] {
                let pres = build_presentation(Family::BallEven(n), n).unwrap();
                for rep in catalog(Family::BallEven(n), q(qv), 6, &default_theta_grid(), &[]).unwrap() {
                    let rpt = verify_rep(&rep, &pres, 2, tol).unwrap();
                    assert!(rpt.all_passed(), "{} q={}:\n{}", rep.name(), qv, rpt);
                }
                let pres = build_presentation(Family::BallOdd(n), n).unwrap();
                for rep in
                    catalog(Family::BallOdd(n), q(qv), 6, &default_theta_grid(), &default_s_grid())
                        .unwrap()
                {
                    let rpt = verify_rep(&rep, &pres, 2, tol).unwrap();
                    assert!(rpt.all_passed(), "{} q={}:\n{}", rep.name(), qv, rpt);
                }
            }
        }
    }

    #[test]
    fn boundary_descents_satisfy_boundary_relations() {
        let tol = 1e-10;
        for n in 1..=2u32 {
            for family in [Family::BoundaryEven(n), Family::BoundaryOdd(n)] {
                let pres = build_presentation(family, n).unwrap();
                for rep in boundary_descents(family, q(0.5), 6, &default_theta_grid()).unwrap() {
                    let rpt = verify_rep(&rep, &pres, 2, tol).unwrap();
                    assert!(rpt.all_passed(), "{} {}:\n{}", family, rep.name(), rpt);
                }
            }
        }
    }

    #[test]
    fn suspension_matches_catalog_sigma() {
        for n in [1u32, 2] {
            let worst = suspension_coherence(n, q(0.5), 6).unwrap();
            assert!(worst <= 1e-12, "n = {}: {}", n, worst);
        }
    }

    #[test]
    fn suspension_of_point_is_the_shift() {
        let point = Representation::point(q(0.5));
        let sus = suspend_rep(&point, 7).unwrap();
        assert_eq!(sus.family, Family::BallEven(1));
        let w = weighted_shift(1, &TruncatedSpace::cube(1, 7), q(0.5)).unwrap();
        assert_eq!(sus.matrix(1), &w);
    }

    #[test]
    fn suspension_identities_hold() {
        let base = irrep_ball_even(&RepSpec {
            family: Family::BallEven(2),
            kind: RepKind::Shift,
            q: q(0.5),
            cutoff: 6,
        })
        .unwrap();
        let sus = suspend_rep(&base, 6).unwrap();
        let rpt = check_suspension_identities(&sus, 1).unwrap();
        assert!(rpt.all_passed(), "{}", rpt);
        assert!(rpt.max_value().unwrap() <= 1e-13);
        let d = check_oddradius(&base, &sus, 1).unwrap();
        assert!(d <= 1e-12, "oddradius deviation {}", d);
    }

    #[test]
    fn sum_identities_bounds() {
        // K = 10 at q = 0.5 satisfies the q^{K/2} tail bound.
        let rpt = check_sum_identities(1, q(0.5), 6, 16, &[10], 1, 1e-10).unwrap();
        assert!(rpt.all_passed(), "{}", rpt);
        // Residual decreases monotonically in K.
        let ks: Vec<usize> = (0..=12).collect();
        let rpt = check_sum_identities(1, q(0.5), 6, 16, &ks, 1, 1e-10).unwrap();
        let z1_errs: Vec<f64> = rpt
            .entries
            .iter()
            .filter(|e| e.name.starts_with("series-Z1-"))
            .map(|e| e.value.unwrap())
            .collect();
        for w in z1_errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "not monotone: {:?}", z1_errs);
        }
        // K = 0: the empty partial sum leaves Z_i itself.
        let rep = irrep_ball_even(&RepSpec {
            family: Family::BallEven(1),
            kind: RepKind::Shift,
            q: q(0.5),
            cutoff: 6,
        })
        .unwrap();
        let sus = suspend_rep(&rep, 16).unwrap();
        let flags = sus.space.interior_flags(1);
        let expected = sus.matrix(1).compress(&flags).op_norm();
        assert!((z1_errs[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn tccr_holds_in_sigma() {
        for n in 1..=2u32 {
            for qv in [0.3, 0.6] {
                let rpt = check_tccr(n, q(qv), 8, 2).unwrap();
                assert!(rpt.all_passed(), "n={} q={}:\n{}", n, qv, rpt);
            }
        }
    }

    #[test]
    fn injectivity_examples() {
        // sigma: normality defect = 1 - q at the vacuum.
        for qv in [0.3, 0.5] {
            for n in 1..=2u32 {
                let rep = irrep_ball_even(&RepSpec {
                    family: Family::BallEven(n),
                    kind: RepKind::Shift,
                    q: q(qv),
                    cutoff: 8,
                })
                .unwrap();
                let out =
                    injectivity_check(&[&rep], InjectivityCriterion::NormalityDefect, 1, 1e-8)
                        .unwrap();
                assert!(out.injective);
                assert!((out.witness - (1.0 - qv)).abs() <= 1e-10, "defect {}", out.witness);
            }
        }
        // rho_1^theta is scalar, hence not injective.
        let rep = irrep_ball_even(&RepSpec {
            family: Family::BallEven(2),
            kind: RepKind::Circle { j: 1, theta: Complex64::new(1.0, 0.0) },
            q: q(0.5),
            cutoff: 8,
        })
        .unwrap();
        let out = injectivity_check(&[&rep], InjectivityCriterion::NormalityDefect, 1, 1e-8)
            .unwrap();
        assert!(!out.injective);

        // sigma_{+1} (+) sigma_{-1} on the odd boundary: both signs present.
        let plus = irrep_ball_odd(&RepSpec {
            family: Family::BallOdd(2),
            kind: RepKind::Interval { s: 1.0 },
            q: q(0.5),
            cutoff: 8,
        })
        .unwrap()
        .relabel(Family::BoundaryOdd(2));
        let minus = irrep_ball_odd(&RepSpec {
            family: Family::BallOdd(2),
            kind: RepKind::Interval { s: -1.0 },
            q: q(0.5),
            cutoff: 8,
        })
        .unwrap()
        .relabel(Family::BoundaryOdd(2));
        let out =
            injectivity_check(&[&plus, &minus], InjectivityCriterion::SignSpectrum, 1, 1e-8)
                .unwrap();
        assert!(out.injective);
        // sigma_{+1} alone sees only nonnegative spectrum.
        let out = injectivity_check(&[&plus], InjectivityCriterion::SignSpectrum, 1, 1e-8).unwrap();
        assert!(!out.injective);
    }

    #[test]
    fn circle_cover_surrogate() {
        // A dense theta grid delta-covers; the default 8-point grid does not
        // cover at delta = 0.2.
        let dense: Vec<Complex64> = (0..64)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 64.0))
            .collect();
        let reps = boundary_descents(Family::BoundaryEven(1), q(0.5), 6, &dense).unwrap();
        let refs: Vec<&Representation> = reps.iter().collect();
        let out =
            injectivity_check(&refs, InjectivityCriterion::CircleCover { delta: 0.2 }, 1, 1e-8)
                .unwrap();
        assert!(out.injective, "{}", out.detail);

        let sparse = default_theta_grid();
        let reps = boundary_descents(Family::BoundaryEven(1), q(0.5), 6, &sparse).unwrap();
        let refs: Vec<&Representation> = reps.iter().collect();
        let out =
            injectivity_check(&refs, InjectivityCriterion::CircleCover { delta: 0.2 }, 1, 1e-8)
                .unwrap();
        assert!(!out.injective);
    }

    #[test]
    fn normal_eigenvalues_of_cyclic_shift() {
        // The 4-cycle permutation is normal with eigenvalues the 4th roots
        // of unity.
        let mut m = OperatorMatrix::zeros(4);
        for i in 0..4usize {
            m.set((i + 1) % 4, i, Complex64::new(1.0, 0.0));
        }
        let mut eigs = eigenvalues_normal(&m).unwrap();
        eigs.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        let mut expected: Vec<Complex64> = (0..4)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * k as f64))
            .map(|z| Complex64::new(z.re, z.im))
            .collect();
        expected.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        for (a, b) in eigs.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10, "{} vs {}", a, b);
        }
    }
}
