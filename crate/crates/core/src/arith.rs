//! Number-field and local-field layer: base fields Q, Q(√d) and Q_p,
//! exact square-class decisions in completions of degree at most 2, the
//! decomposition analysis of the towers K ⊆ E ⊆ M, and the place sets S
//! (noncyclic decomposition) and S_f (full local degree).
//!
//! Everything is exact: odd residue characteristic reduces to Legendre-type
//! residue tests, and 2-adic unit square classes are decided by exhaustive
//! search modulo a power of the uniformizer beyond the Hensel bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    InvalidBase(String),
    UnsupportedS(u32),
    DegenerateTower,
    UnsupportedCompletion(String),
    AuxiliarySearchExhausted { bound: u64 },
    NotApplicableToLocalBase,
    UnknownPlace(String),
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::InvalidBase(why) => write!(f, "invalid base field: {}", why),
            ArithError::UnsupportedS(s) => write!(
                f,
                "decomposition analysis supports s in {{3, 4}}; s = {} would need square tests \
                 in 2-adic fields of degree 4",
                s
            ),
            ArithError::DegenerateTower => write!(f, "tower is degenerate (M/K is not a field)"),
            ArithError::UnsupportedCompletion(why) => {
                write!(
                    f,
                    "completion outside the supported degree-2 range: {}",
                    why
                )
            }
            ArithError::AuxiliarySearchExhausted { bound } => {
                write!(f, "no auxiliary prime below {}", bound)
            }
            ArithError::NotApplicableToLocalBase => {
                write!(f, "operation requires a number-field base")
            }
            ArithError::UnknownPlace(label) => write!(f, "unknown place {}", label),
        }
    }
}

impl std::error::Error for ArithError {}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn is_squarefree(n: i64) -> bool {
    let mut m = n.unsigned_abs();
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return false;
            }
        }
        d += 1;
    }
    true
}

fn odd_prime_factors(n: i64) -> Vec<u64> {
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            if d != 2 {
                out.push(d);
            }
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 2 {
        out.push(m);
    }
    out
}

fn is_integer_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn is_rational_square(q: &BigRational) -> bool {
    !q.is_negative() && is_integer_square(q.numer()) && is_integer_square(q.denom())
}

/// Base field of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseField {
    Rational,
    /// Q(√d), d squarefree, d ∉ {0, 1}
    Quadratic(i64),
    /// Q_p
    PAdic(u64),
}

impl BaseField {
    pub fn validate(&self) -> Result<(), ArithError> {
        match self {
            BaseField::Rational => Ok(()),
            BaseField::Quadratic(d) => {
                if *d == 0 || *d == 1 {
                    return Err(ArithError::InvalidBase(format!("d = {} is excluded", d)));
                }
                if !is_squarefree(*d) {
                    return Err(ArithError::InvalidBase(format!(
                        "d = {} is not squarefree",
                        d
                    )));
                }
                Ok(())
            }
            BaseField::PAdic(p) => {
                if !is_prime_u64(*p) {
                    return Err(ArithError::InvalidBase(format!("p = {} is not prime", p)));
                }
                Ok(())
            }
        }
    }
}

/// Constant tower (epsilon = +1, M = E[√-1]) or twisted tower
/// (epsilon = -1, M = E[√-a]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerVariant {
    Constant,
    Twisted { a: i64 },
}

/// Description of K ⊆ E ⊆ M with E the real-cyclotomic layer of level 2^s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTowerSpec {
    pub base: BaseField,
    pub s: u32,
    pub variant: TowerVariant,
}

impl FieldTowerSpec {
    pub fn new(base: BaseField, s: u32, variant: TowerVariant) -> Result<Self, ArithError> {
        base.validate()?;
        if s < 3 {
            return Err(ArithError::UnsupportedS(s));
        }
        if let TowerVariant::Twisted { a } = &variant {
            if *a == 0 {
                return Err(ArithError::InvalidBase("twist a must be nonzero".into()));
            }
        }
        Ok(FieldTowerSpec { base, s, variant })
    }

    /// The element w with M = E[√w]: -1 for the constant tower, -a for the
    /// twisted one.
    pub fn w(&self) -> i64 {
        match &self.variant {
            TowerVariant::Constant => -1,
            TowerVariant::Twisted { a } => -a,
        }
    }

    /// [E : K] for the supported analyses (s in {3, 4}).
    pub fn s0(&self) -> Result<u32, ArithError> {
        if !(3..=4).contains(&self.s) {
            return Err(ArithError::UnsupportedS(self.s));
        }
        match &self.base {
            BaseField::Rational => Ok(1 << (self.s - 2)),
            BaseField::Quadratic(d) => {
                // the only quadratic subfield of Q(eta_s) is Q(√2)
                if *d == 2 {
                    Ok(1 << (self.s - 3))
                } else {
                    Ok(1 << (self.s - 2))
                }
            }
            BaseField::PAdic(p) => {
                let kp = KCompletion::Qp(*p);
                let two_sq = kp.rational_is_square(&BigRational::from(BigInt::from(2)))?;
                if self.s == 3 {
                    Ok(if two_sq { 1 } else { 2 })
                } else {
                    // climb the cyclic ladder K ⊆ K(√2) ⊆ K(√(2+√2))
                    let f = FOverK::build(&kp)?;
                    let step2 = if f.is_square_w_times(&BigRational::one())? {
                        1
                    } else {
                        2
                    };
                    Ok(f.degree() * step2)
                }
            }
        }
    }

    /// [M : K] = 2·s0 for a non-degenerate tower.
    pub fn global_degree(&self) -> Result<u32, ArithError> {
        Ok(2 * self.s0()?)
    }

    /// True when M = E[√w] fails to be a field of degree 2·s0: w is a square
    /// in K, or √w already lies in E. For number-field bases this reduces to
    /// rational square tests against the quadratic subfields Q(√d), Q(√2),
    /// Q(√2d) of E; for a p-adic base only the K-level test is needed here
    /// (an E-level square forces a cyclic decomposition group and an empty S
    /// through the same square tests the analysis runs).
    pub fn is_degenerate(&self) -> Result<bool, ArithError> {
        let w = BigInt::from(self.w());
        match &self.base {
            BaseField::Rational => {
                let candidates = [w.clone(), &w * 2];
                Ok(candidates.iter().any(is_integer_square))
            }
            BaseField::Quadratic(d) => {
                let candidates = [w.clone(), &w * 2, &w * *d, &w * 2 * *d];
                Ok(candidates.iter().any(is_integer_square))
            }
            BaseField::PAdic(p) => {
                let kp = KCompletion::Qp(*p);
                kp.rational_is_square(&BigRational::from(w))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// local fields
// ---------------------------------------------------------------------------

/// Element a + b√u of a quadratic extension (b = 0 embeds the rationals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElt {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadElt {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadElt { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadElt {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn from_i64(a: i64, b: i64) -> Self {
        QuadElt {
            a: BigRational::from(BigInt::from(a)),
            b: BigRational::from(BigInt::from(b)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn mul(&self, other: &QuadElt, u: &BigInt) -> QuadElt {
        let ub = BigRational::from(u.clone());
        QuadElt {
            a: &self.a * &other.a + &ub * &self.b * &other.b,
            b: &self.a * &other.b + &self.b * &other.a,
        }
    }

    fn sub(&self, other: &QuadElt) -> QuadElt {
        QuadElt {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
        }
    }

    fn norm(&self, u: &BigInt) -> BigRational {
        &self.a * &self.a - BigRational::from(u.clone()) * &self.b * &self.b
    }

    fn conj(&self) -> QuadElt {
        QuadElt {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    fn inv(&self, u: &BigInt) -> QuadElt {
        let n = self.norm(u);
        assert!(!n.is_zero(), "division by zero in a quadratic field");
        let c = self.conj();
        QuadElt {
            a: c.a / n.clone(),
            b: c.b / n,
        }
    }
}

fn vp_int(p: u64, n: &BigInt) -> u64 {
    assert!(!n.is_zero());
    let pp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pp);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn vp_rat(p: u64, q: &BigRational) -> i64 {
    vp_int(p, q.numer()) as i64 - vp_int(p, q.denom()) as i64
}

/// Residue of a p-integral rational modulo p^k.
fn residue_mod(q: &BigRational, modulus: &BigInt) -> BigInt {
    let num = q.numer().mod_floor(modulus);
    let den = q.denom().mod_floor(modulus);
    let inv = mod_inverse(&den, modulus).expect("denominator is a unit");
    (num * inv).mod_floor(modulus)
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(modulus);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(modulus))
    } else {
        None
    }
}

fn mod_pow_big(base: &BigInt, mut exp: u64, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::one();
    let mut b = base.mod_floor(modulus);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc * &b).mod_floor(modulus);
        }
        b = (&b * &b).mod_floor(modulus);
        exp >>= 1;
    }
    acc
}

/// Legendre-style unit test: residue a (a unit mod the odd prime p) is a
/// square mod p.
fn is_qr_mod_p(p: u64, a: &BigInt) -> bool {
    let pp = BigInt::from(p);
    let r = a.mod_floor(&pp);
    assert!(!r.is_zero(), "unit expected");
    mod_pow_big(&r, (p - 1) / 2, &pp).is_one()
}

/// Canonical square root of n mod the odd prime p, the smaller of the two
/// residues; None when n is not a residue.
fn sqrt_mod_p_canonical(p: u64, n: i64) -> Option<u64> {
    let pp = BigInt::from(p);
    let target = BigInt::from(n).mod_floor(&pp);
    if target.is_zero() {
        return Some(0);
    }
    for t in 1..p {
        if (BigInt::from(t) * BigInt::from(t)).mod_floor(&pp) == target {
            return Some(t.min(p - t));
        }
    }
    None
}

/// Completion of the base field at a finite place: the p-adics themselves or
/// a genuine quadratic extension of them.
#[derive(Clone, Debug)]
pub enum KCompletion {
    Qp(u64),
    Quad(LocalField),
}

impl KCompletion {
    pub fn p(&self) -> u64 {
        match self {
            KCompletion::Qp(p) => *p,
            KCompletion::Quad(l) => l.p,
        }
    }

    /// Square test for a rational number in this completion.
    pub fn rational_is_square(&self, q: &BigRational) -> Result<bool, ArithError> {
        match self {
            KCompletion::Qp(p) => Ok(qp_is_square(*p, q)),
            KCompletion::Quad(l) => l.is_square(&QuadElt::rational(q.clone())),
        }
    }
}

/// Exact square test in Q_p.
pub fn qp_is_square(p: u64, q: &BigRational) -> bool {
    assert!(!q.is_zero());
    let v = vp_rat(p, q);
    if v % 2 != 0 {
        return false;
    }
    let unit =
        q / BigRational::from(BigInt::from(p).pow(v.unsigned_abs() as u32)).pow(v.signum() as i32);
    if p == 2 {
        residue_mod(&unit, &BigInt::from(8)) == BigInt::one()
    } else {
        is_qr_mod_p(p, &residue_mod(&unit, &BigInt::from(p)))
    }
}

/// A quadratic extension Q_p(√u), with v_p(u) in {0, 1} and u not a square
/// in Q_p. Ramification data e·f = 2.
#[derive(Clone, Debug)]
pub struct LocalField {
    pub p: u64,
    pub u: BigInt,
    pub e: u32,
    pub f: u32,
}

impl LocalField {
    /// Classifies Q_p(√u); fails if u is a local square (no field).
    pub fn quadratic(p: u64, u: BigInt) -> Result<Self, ArithError> {
        assert!(!u.is_zero());
        let v = vp_int(p, &u);
        if v > 1 {
            return Err(ArithError::UnsupportedCompletion(format!(
                "v_{}(u) = {} must be 0 or 1",
                p, v
            )));
        }
        if qp_is_square(p, &BigRational::from(u.clone())) {
            return Err(ArithError::UnsupportedCompletion(
                "u is a square in Q_p; the completion splits".into(),
            ));
        }
        let (e, f) = if v == 1 {
            (2, 1)
        } else if p == 2 {
            // odd u, nonsquare in Q_2: 5 mod 8 unramified, 3 or 7 ramified
            let r = u.mod_floor(&BigInt::from(8));
            if r == BigInt::from(5) {
                (1, 2)
            } else {
                (2, 1)
            }
        } else if is_qr_mod_p(p, &u.mod_floor(&BigInt::from(p))) {
            unreachable!("unit residue square was filtered by the Q_p test")
        } else {
            (1, 2)
        };
        Ok(LocalField { p, u, e, f })
    }

    fn uniformizer(&self) -> QuadElt {
        if self.e == 1 {
            QuadElt::rational(BigRational::from(BigInt::from(self.p)))
        } else if vp_int(self.p, &self.u) == 1 {
            QuadElt::new(BigRational::zero(), BigRational::one())
        } else {
            // p = 2, u = 3 or 7 mod 8: N(1 + √u) = 1 - u has valuation 1
            QuadElt::new(BigRational::one(), BigRational::one())
        }
    }

    /// pi-adic valuation through the norm: v_pi(x) = v_p(N(x)) / f.
    pub fn valuation(&self, x: &QuadElt) -> i64 {
        let n = x.norm(&self.u);
        let vn = vp_rat(self.p, &n);
        if self.f == 2 {
            debug_assert!(vn % 2 == 0);
            vn / 2
        } else {
            vn
        }
    }

    fn power_of_uniformizer(&self, k: i64) -> QuadElt {
        let pi = self.uniformizer();
        let base = if k >= 0 { pi } else { pi.inv(&self.u) };
        let mut acc = QuadElt::rational(BigRational::one());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base, &self.u);
        }
        acc
    }

    /// Exact square-class decision for a nonzero element a + b√u.
    pub fn is_square(&self, x: &QuadElt) -> Result<bool, ArithError> {
        assert!(!x.is_zero());
        let v = self.valuation(x);
        if v % 2 != 0 {
            return Ok(false);
        }
        let unit = x.mul(&self.power_of_uniformizer(-v), &self.u);
        debug_assert_eq!(self.valuation(&unit), 0);
        if self.p == 2 {
            Ok(self.two_adic_unit_is_square(&unit))
        } else if self.e == 2 {
            // odd ramified: the residue of the unit is its rational part
            Ok(is_qr_mod_p(
                self.p,
                &residue_mod(&unit.a, &BigInt::from(self.p)),
            ))
        } else {
            // odd unramified: test in the residue field F_{p^2}
            Ok(self.unit_square_in_fp2(
                &residue_mod(&unit.a, &BigInt::from(self.p)),
                &residue_mod(&unit.b, &BigInt::from(self.p)),
            ))
        }
    }

    /// Unit square test in F_{p^2} = F_p[√u]: z is a square iff
    /// z^((p^2-1)/2) = 1.
    pub fn unit_square_in_fp2(&self, a: &BigInt, b: &BigInt) -> bool {
        let p = BigInt::from(self.p);
        let ubar = self.u.mod_floor(&p);
        let mul = |x: &(BigInt, BigInt), y: &(BigInt, BigInt)| {
            (
                (&x.0 * &y.0 + &ubar * &x.1 * &y.1).mod_floor(&p),
                (&x.0 * &y.1 + &x.1 * &y.0).mod_floor(&p),
            )
        };
        let mut exp = (self.p * self.p - 1) / 2;
        let mut acc = (BigInt::one(), BigInt::zero());
        let mut base = (a.mod_floor(&p), b.mod_floor(&p));
        assert!(!(acc.0.is_zero() && acc.1.is_zero()));
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(&acc, &base);
            }
            base = mul(&base, &base);
            exp >>= 1;
        }
        acc == (BigInt::one(), BigInt::zero())
    }

    /// 2-adic unit square class by exhaustive search: w is a square iff
    /// some y = (alpha + beta√u)/2 satisfies v_pi(y^2 - w) >= 2·v_pi(2) + 1
    /// (the Hensel bound; the search window is wide enough to realize any
    /// true square root truncated to the window).
    fn two_adic_unit_is_square(&self, w: &QuadElt) -> bool {
        let e2 = self.valuation(&QuadElt::rational(BigRational::from(BigInt::from(2))));
        let threshold = 2 * e2 + 1;
        let window = 1i64 << 6;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for alpha in 0..window {
            for beta in 0..window {
                let y = QuadElt::new(
                    BigRational::from(BigInt::from(alpha)) * &half,
                    BigRational::from(BigInt::from(beta)) * &half,
                );
                let diff = y.mul(&y, &self.u).sub(w);
                if diff.is_zero() || self.valuation(&diff) >= threshold {
                    return true;
                }
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// places and decomposition analysis
// ---------------------------------------------------------------------------

/// A place of the base field. Finite places are labeled "p:idx" where idx
/// distinguishes split factors; archimedean places are "inf:idx".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite { p: u64, idx: u8 },
    Arch { idx: u8 },
}

impl Place {
    pub fn label(&self) -> String {
        match self {
            Place::Finite { p, idx } => format!("{}:{}", p, idx),
            Place::Arch { idx } => format!("inf:{}", idx),
        }
    }

    pub fn parse(label: &str) -> Result<Place, ArithError> {
        let mut it = label.split(':');
        let head = it
            .next()
            .ok_or_else(|| ArithError::UnknownPlace(label.into()))?;
        let idx: u8 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ArithError::UnknownPlace(label.into()))?;
        if head == "inf" {
            Ok(Place::Arch { idx })
        } else {
            let p: u64 = head
                .parse()
                .map_err(|_| ArithError::UnknownPlace(label.into()))?;
            Ok(Place::Finite { p, idx })
        }
    }
}

/// Per-place decomposition data for the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceAnalysis {
    pub place: Place,
    pub e_degree: u32,
    pub n_degree: u32,
    pub m_degree: u32,
    pub noncyclic: bool,
    pub full_degree: bool,
}

/// Number of places of the base over the rational prime p, with their
/// completions.
fn completions_at(base: &BaseField, p: u64) -> Result<Vec<KCompletion>, ArithError> {
    match base {
        BaseField::Rational => Ok(vec![KCompletion::Qp(p)]),
        BaseField::PAdic(p0) => {
            if *p0 == p {
                Ok(vec![KCompletion::Qp(p)])
            } else {
                Ok(vec![])
            }
        }
        BaseField::Quadratic(d) => {
            let dq = BigRational::from(BigInt::from(*d));
            if qp_is_square(p, &dq) {
                Ok(vec![KCompletion::Qp(p), KCompletion::Qp(p)])
            } else {
                Ok(vec![KCompletion::Quad(LocalField::quadratic(
                    p,
                    BigInt::from(*d),
                )?)])
            }
        }
    }
}

fn arch_places(base: &BaseField) -> Vec<Place> {
    match base {
        BaseField::Rational => vec![Place::Arch { idx: 0 }],
        BaseField::Quadratic(d) => {
            if *d > 0 {
                vec![Place::Arch { idx: 0 }, Place::Arch { idx: 1 }]
            } else {
                vec![Place::Arch { idx: 0 }]
            }
        }
        BaseField::PAdic(_) => vec![],
    }
}

/// The candidate places where the decomposition can be noncyclic: everything
/// over 2, over the primes dividing the twist and the base discriminant,
/// plus the archimedean places. (Unramified places have cyclic decomposition
/// groups, so nothing outside this list can enter S.)
pub fn relevant_places(tower: &FieldTowerSpec) -> Result<Vec<Place>, ArithError> {
    if tower.is_degenerate()? {
        return Err(ArithError::DegenerateTower);
    }
    match &tower.base {
        BaseField::PAdic(p) => Ok(vec![Place::Finite { p: *p, idx: 0 }]),
        base => {
            let mut primes = vec![2u64];
            if let TowerVariant::Twisted { a } = &tower.variant {
                primes.extend(odd_prime_factors(*a));
            }
            if let BaseField::Quadratic(d) = base {
                primes.extend(odd_prime_factors(*d));
            }
            primes.sort_unstable();
            primes.dedup();
            let mut out = Vec::new();
            for p in primes {
                for (idx, _) in completions_at(base, p)?.iter().enumerate() {
                    out.push(Place::Finite { p, idx: idx as u8 });
                }
            }
            out.extend(arch_places(base));
            Ok(out)
        }
    }
}

/// Square-class oracle for F = K(√2) inside the completion F_P over a given
/// completion K_p. The only elements ever tested are w·(2 + √2) for a
/// nonzero rational w (and plain rationals, which K_p handles directly):
/// their conjugates share the same valuation because N(2 + √2) = 2 is a
/// p-unit for odd p, so residue information about √2 is all that is needed
/// whenever √2 lies inside K_p.
enum FOverK {
    /// 2 is a square in K_p = Q_p (odd p); F_P = Q_p, √2 has canonical
    /// residue t mod p.
    SplitOverQp { p: u64, sqrt2: u64 },
    /// K_p = Q_p and 2 is not a square: F_P = Q_p(√2), exact coordinates.
    QuadOverQp(LocalField),
    /// K_p = Q_p(√d) unramified over odd p with 2 a nonresidue: then 2d is
    /// a residue and √2 = y·√d for a residue y = √(2d)/d mod p.
    InsideQuadUnramified { field: LocalField, y: u64 },
    /// K_p = Q_p(√d) ramified over odd p | d, with 2 a residue mod p:
    /// √2 ∈ Q_p ⊆ K_p with canonical residue t, and d = p·d0.
    InsideQuadRamified {
        field: LocalField,
        sqrt2: u64,
        d0: i64,
    },
}

impl FOverK {
    fn build(kp: &KCompletion) -> Result<FOverK, ArithError> {
        match kp {
            KCompletion::Qp(p) => {
                if *p != 2 && qp_is_square(*p, &BigRational::from(BigInt::from(2))) {
                    Ok(FOverK::SplitOverQp {
                        p: *p,
                        sqrt2: sqrt_mod_p_canonical(*p, 2).expect("2 is a residue"),
                    })
                } else {
                    Ok(FOverK::QuadOverQp(LocalField::quadratic(
                        *p,
                        BigInt::from(2),
                    )?))
                }
            }
            KCompletion::Quad(l) => {
                if l.p == 2 {
                    return Err(ArithError::UnsupportedCompletion(
                        "K_p(√2) over a quadratic 2-adic field has degree 4".into(),
                    ));
                }
                let two_is_residue = is_qr_mod_p(l.p, &BigInt::from(2));
                if l.e == 1 {
                    if two_is_residue {
                        // √2 ∈ Q_p ⊆ K_p; rational-residue units are always
                        // squares in the unramified quadratic extension
                        Ok(FOverK::InsideQuadUnramified {
                            field: l.clone(),
                            y: 0, // unused: see is_square_w_times
                        })
                    } else {
                        // 2 and d both nonresidues force 2d to be a residue
                        let t2d = sqrt_mod_p_canonical(
                            l.p,
                            (BigInt::from(2) * &l.u)
                                .mod_floor(&BigInt::from(l.p))
                                .try_into()
                                .expect("residue fits"),
                        )
                        .expect("2d is a residue");
                        let dinv =
                            mod_inverse(&l.u.mod_floor(&BigInt::from(l.p)), &BigInt::from(l.p))
                                .expect("d is a unit");
                        let y = (BigInt::from(t2d) * dinv).mod_floor(&BigInt::from(l.p));
                        Ok(FOverK::InsideQuadUnramified {
                            field: l.clone(),
                            y: u64::try_from(&y).expect("residue fits"),
                        })
                    }
                } else if two_is_residue {
                    // ramified p | d: residue-square units are squares, so
                    // √2 ∈ Q_p ⊆ K_p
                    let d0 = i64::try_from(&(&l.u / BigInt::from(l.p))).map_err(|_| {
                        ArithError::UnsupportedCompletion("discriminant too large".into())
                    })?;
                    Ok(FOverK::InsideQuadRamified {
                        field: l.clone(),
                        sqrt2: sqrt_mod_p_canonical(l.p, 2).expect("2 is a residue"),
                        d0,
                    })
                } else {
                    // 2 is a unit nonsquare in the ramified field: √2 would
                    // generate a quartic 2-adic-free but unsupported layer
                    Err(ArithError::UnsupportedCompletion(
                        "K_p(√2) over a ramified quadratic field has degree 4".into(),
                    ))
                }
            }
        }
    }

    /// Degree of F_P over K_p (1 or 2).
    fn degree(&self) -> u32 {
        match self {
            FOverK::SplitOverQp { .. } | FOverK::InsideQuadRamified { .. } => 1,
            FOverK::QuadOverQp(_) => 2,
            FOverK::InsideQuadUnramified { field, .. } => {
                if is_qr_mod_p(field.p, &BigInt::from(2)) {
                    1
                } else {
                    2
                }
            }
        }
    }

    /// Square test for w·(2 + √2) in F_P, w a nonzero rational.
    fn is_square_w_times(&self, w: &BigRational) -> Result<bool, ArithError> {
        let two = BigRational::from(BigInt::from(2));
        match self {
            FOverK::QuadOverQp(l) => l.is_square(&QuadElt::new(w * &two, w.clone())),
            FOverK::SplitOverQp { p, sqrt2 } => {
                // v_p(w·(2+√2)) = v_p(w) since 2+√2 is a unit (norm 2)
                let v = vp_rat(*p, w);
                if v % 2 != 0 {
                    return Ok(false);
                }
                let pp = BigInt::from(*p);
                let w_unit = strip_p_power(*p, w, v);
                let mut rho = (residue_mod(&w_unit, &pp)
                    * (BigInt::from(2) + BigInt::from(*sqrt2)))
                .mod_floor(&pp);
                if rho.is_zero() {
                    // the canonical residue picked the conjugate root; same
                    // square class since 2 is a square here
                    rho = (residue_mod(&w_unit, &pp) * (BigInt::from(2) - BigInt::from(*sqrt2)))
                        .mod_floor(&pp);
                }
                Ok(is_qr_mod_p(*p, &rho))
            }
            FOverK::InsideQuadUnramified { field, y } => {
                // v_pi = v_p(w); the unit residue lies in F_{p^2}
                let v = vp_rat(field.p, w);
                if v % 2 != 0 {
                    return Ok(false);
                }
                let pp = BigInt::from(field.p);
                let w_res = residue_mod(&strip_p_power(field.p, w, v), &pp);
                if is_qr_mod_p(field.p, &BigInt::from(2)) {
                    // element has a rational residue; every unit of F_p is a
                    // square in F_{p^2}
                    let _ = w_res;
                    Ok(true)
                } else {
                    // w(2 + √2) = 2w + (w·y)√d at the residue level
                    let a = (BigInt::from(2) * &w_res).mod_floor(&pp);
                    let b = (&w_res * BigInt::from(*y)).mod_floor(&pp);
                    Ok(field.unit_square_in_fp2(&a, &b))
                }
            }
            FOverK::InsideQuadRamified { field, sqrt2, d0 } => {
                // v_pi = 2·v_p(w) is even; the unit part is
                // w/p^v·(2+√2)·d0^{-v} and squares are residue squares
                let p = field.p;
                let pp = BigInt::from(p);
                let v = vp_rat(p, w);
                let w_res = residue_mod(&strip_p_power(p, w, v), &pp);
                let d0_inv = mod_inverse(&BigInt::from(*d0).mod_floor(&pp), &pp)
                    .expect("d0 is a unit mod p");
                let adjust = mod_pow_signed(&d0_inv, v, &pp);
                let rho =
                    (w_res * (BigInt::from(2) + BigInt::from(*sqrt2)) * adjust).mod_floor(&pp);
                Ok(is_qr_mod_p(p, &rho))
            }
        }
    }
}

fn strip_p_power(p: u64, q: &BigRational, v: i64) -> BigRational {
    let scale = BigRational::from(BigInt::from(p).pow(v.unsigned_abs() as u32));
    if v >= 0 {
        q / scale
    } else {
        q * scale
    }
}

fn mod_pow_signed(base: &BigInt, exp: i64, modulus: &BigInt) -> BigInt {
    if exp >= 0 {
        mod_pow_big(base, exp as u64, modulus)
    } else {
        let inv = mod_inverse(&base.mod_floor(modulus), modulus).expect("unit");
        mod_pow_big(&inv, exp.unsigned_abs(), modulus)
    }
}

/// Exact decomposition analysis at one place. Supported for s in {3, 4}.
pub fn decomposition_type(
    tower: &FieldTowerSpec,
    place: &Place,
) -> Result<PlaceAnalysis, ArithError> {
    if !(3..=4).contains(&tower.s) {
        return Err(ArithError::UnsupportedS(tower.s));
    }
    let s0 = tower.s0()?;
    let w = tower.w();
    match place {
        Place::Arch { idx } => {
            // real or complex completions are always cyclic of degree <= 2;
            // E is totally real, and √w is real exactly when w > 0
            let complex = matches!(tower.base, BaseField::Quadratic(d) if d < 0);
            let (n_degree, m_degree) = if complex || w > 0 { (1, 1) } else { (2, 2) };
            let _ = idx;
            Ok(PlaceAnalysis {
                place: place.clone(),
                e_degree: 1,
                n_degree,
                m_degree,
                noncyclic: false,
                full_degree: false,
            })
        }
        Place::Finite { p, idx } => {
            let comps = completions_at(&tower.base, *p)?;
            let kp = comps
                .get(*idx as usize)
                .ok_or_else(|| ArithError::UnknownPlace(place.label()))?;
            let wq = BigRational::from(BigInt::from(w));
            let n_degree: u32 = if kp.rational_is_square(&wq)? { 1 } else { 2 };

            let (e_degree, noncyclic) = match s0 {
                1 => (1, false),
                2 => {
                    // M/K is biquadratic K(√u, √w) with u = 2 (s = 3) or
                    // u = 2 + √2 as an element of K ⊇ Q(√2) (s = 4, d = 2)
                    let (u_sq, uw_sq) = if tower.s == 3 {
                        let two = BigRational::from(BigInt::from(2));
                        (
                            kp.rational_is_square(&two)?,
                            kp.rational_is_square(&(two.clone() * &wq))?,
                        )
                    } else {
                        // base contains √2 (d = 2): 2 + √2 is an exact
                        // element of K, usable at every completion shape
                        match kp {
                            KCompletion::Quad(l) => {
                                let u_elt = QuadElt::from_i64(2, 1);
                                let uw = u_elt.mul(&QuadElt::rational(wq.clone()), &l.u);
                                (l.is_square(&u_elt)?, l.is_square(&uw)?)
                            }
                            KCompletion::Qp(_) => {
                                let f = FOverK::build(kp)?;
                                (
                                    f.is_square_w_times(&BigRational::one())?,
                                    f.is_square_w_times(&wq)?,
                                )
                            }
                        }
                    };
                    let w_sq = n_degree == 1;
                    let noncyclic = !u_sq && !w_sq && !uw_sq;
                    (if u_sq { 1 } else { 2 }, noncyclic)
                }
                4 => {
                    // F = K(√2): test the V-generators 2+√2, w, (2+√2)w in F_P
                    let f = FOverK::build(kp)?;
                    let u_sq = f.is_square_w_times(&BigRational::one())?;
                    let w_sq = n_degree == 1;
                    let uw_sq = f.is_square_w_times(&wq)?;
                    let noncyclic = !u_sq && !w_sq && !uw_sq;
                    let e_degree = f.degree() * if u_sq { 1 } else { 2 };
                    (e_degree, noncyclic)
                }
                _ => return Err(ArithError::UnsupportedS(tower.s)),
            };

            let m_degree = if noncyclic {
                2 * e_degree
            } else {
                num_integer::lcm(e_degree, n_degree)
            };
            let full_degree = noncyclic && e_degree == s0;
            Ok(PlaceAnalysis {
                place: place.clone(),
                e_degree,
                n_degree,
                m_degree,
                noncyclic,
                full_degree,
            })
        }
    }
}

/// S (noncyclic places) and S_f (full local degree), in place order.
/// Degenerate towers short-circuit to empty sets.
pub fn compute_s_sf(tower: &FieldTowerSpec) -> Result<(Vec<Place>, Vec<Place>), ArithError> {
    if tower.is_degenerate()? {
        return Ok((vec![], vec![]));
    }
    let mut s = Vec::new();
    let mut sf = Vec::new();
    for place in relevant_places(tower)? {
        let analysis = decomposition_type(tower, &place)?;
        if analysis.noncyclic {
            s.push(place.clone());
            if analysis.full_degree {
                sf.push(place);
            }
        }
    }
    Ok((s, sf))
}

pub const AUXILIARY_SEARCH_BOUND: u64 = 1_000_000;

/// Smallest-rational-prime place q of K, unramified in M/K, where E has
/// full cyclic degree s0 and N splits, so that M is locally cyclic of
/// degree exactly s0. Verified by square tests; exists by density.
pub fn find_auxiliary_prime(tower: &FieldTowerSpec) -> Result<Place, ArithError> {
    if matches!(tower.base, BaseField::PAdic(_)) {
        return Err(ArithError::NotApplicableToLocalBase);
    }
    if tower.is_degenerate()? {
        return Err(ArithError::DegenerateTower);
    }
    let s0 = tower.s0()?;
    let mut bad_primes = vec![2u64];
    if let TowerVariant::Twisted { a } = &tower.variant {
        bad_primes.extend(odd_prime_factors(*a));
    }
    if let BaseField::Quadratic(d) = &tower.base {
        bad_primes.extend(odd_prime_factors(*d));
    }
    let mut q = 3u64;
    while q < AUXILIARY_SEARCH_BOUND {
        if is_prime_u64(q) && !bad_primes.contains(&q) {
            let comps = completions_at(&tower.base, q)?;
            for idx in 0..comps.len() {
                let place = Place::Finite {
                    p: q,
                    idx: idx as u8,
                };
                let analysis = decomposition_type(tower, &place)?;
                if analysis.e_degree == s0 && analysis.n_degree == 1 && !analysis.noncyclic {
                    debug_assert_eq!(analysis.m_degree, s0);
                    return Ok(place);
                }
            }
        }
        q += 2;
    }
    Err(ArithError::AuxiliarySearchExhausted {
        bound: AUXILIARY_SEARCH_BOUND,
    })
}

/// Local degree of M at an arbitrary place of K (used by the Brauer layer
/// to validate invariant vectors supported outside the relevant set).
pub fn local_m_degree(tower: &FieldTowerSpec, place: &Place) -> Result<u32, ArithError> {
    Ok(decomposition_type(tower, place)?.m_degree)
}
