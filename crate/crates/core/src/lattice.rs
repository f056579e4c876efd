//! Exact arithmetic in the algebraic Mukai lattice of a K3 surface `S` with
//! `NS(S) = Z·h`, `h² = 2g − 2`.
//!
//! A class `(r, c·h, s)` is stored as the integer triple `(r, c, s)`. The
//! pairing is
//!
//! ```text
//! ((r1, c1·h, s1), (r2, c2·h, s2)) = c1·c2·(2g − 2) − r1·s2 − r2·s1
//! ```
//!
//! Only this rank-3 part is modelled. The transcendental lattice is
//! orthogonal to `h`, so it pairs to zero with every class handled here, and
//! divisibilities computed in the rank-3 part agree with the full lattice.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Divisibility of the polarization class `λ` in `H²(M, Z)`, which also
/// selects the Mukai vector: `(0, h, 0)` for `Div1`, `(0, h, 1 − g)` for
/// `Div2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Divisibility {
    Div1,
    Div2,
}

impl Divisibility {
    pub fn value(self) -> u32 {
        match self {
            Divisibility::Div1 => 1,
            Divisibility::Div2 => 2,
        }
    }

    pub fn from_value(value: u32) -> Option<Self> {
        match value {
            1 => Some(Divisibility::Div1),
            2 => Some(Divisibility::Div2),
            _ => None,
        }
    }
}

impl fmt::Display for Divisibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "divisibility {}", self.value())
    }
}

/// Largest supported genus; keeps every dimension count inside `i64`.
pub const MAX_GENUS: u64 = 1 << 61;

/// A validated genus together with the divisibility case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenusContext {
    genus: u64,
    case: Divisibility,
    h_square: BigInt,
}

impl GenusContext {
    pub fn new(genus: u64, case: Divisibility) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InadmissibleGenus {
                genus,
                constraint: "genus must be at least 2",
            });
        }
        if genus > MAX_GENUS {
            return Err(Error::InadmissibleGenus {
                genus,
                constraint: "genus must be at most 2^61",
            });
        }
        if case == Divisibility::Div2 && !genus.is_multiple_of(4) {
            return Err(Error::InadmissibleGenus {
                genus,
                constraint: "divisibility 2 requires 4 | g",
            });
        }
        Ok(Self {
            genus,
            case,
            h_square: h_square(genus),
        })
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn case(&self) -> Divisibility {
        self.case
    }

    /// `h² = 2g − 2`.
    pub fn h_square(&self) -> &BigInt {
        &self.h_square
    }

    /// The genus as a signed integer, for dimension arithmetic.
    pub fn g(&self) -> i64 {
        self.genus as i64
    }

    pub fn genus_big(&self) -> BigInt {
        BigInt::from(self.genus)
    }

    /// The Mukai vector `v` of the moduli space.
    pub fn mukai_vector(&self) -> MukaiVector {
        match self.case {
            Divisibility::Div1 => MukaiVector::new(0, 1, 0),
            Divisibility::Div2 => MukaiVector::new(0, 1, 1i32 - self.genus_big()),
        }
    }

    pub(crate) fn require(&self, op: &'static str, expected: Divisibility) -> Result<()> {
        if self.case == expected {
            Ok(())
        } else {
            Err(Error::WrongCase { op, expected })
        }
    }

    /// Every admissible context with genus in `2..=max_genus`, `Div1` before
    /// `Div2` at each genus.
    pub fn admissible_up_to(max_genus: u64) -> Vec<GenusContext> {
        let mut out = Vec::new();
        for g in 2..=max_genus {
            for case in [Divisibility::Div1, Divisibility::Div2] {
                if let Ok(ctx) = GenusContext::new(g, case) {
                    out.push(ctx);
                }
            }
        }
        out
    }
}

pub fn h_square(genus: u64) -> BigInt {
    BigInt::from(2u8) * BigInt::from(genus) - 2u32
}

/// A class `(r, c·h, s)` in the algebraic Mukai lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c: BigInt,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: impl Into<BigInt>, c: impl Into<BigInt>, s: impl Into<BigInt>) -> Self {
        Self {
            r: r.into(),
            c: c.into(),
            s: s.into(),
        }
    }

    /// Builds a class from rational coordinates, rejecting anything that is
    /// not integral.
    pub fn from_rationals(r: &BigRational, c: &BigRational, s: &BigRational) -> Result<Self> {
        for (name, x) in [("r", r), ("c", c), ("s", s)] {
            if !x.is_integer() {
                return Err(Error::Domain(format!(
                    "coordinate {name} = {x} is not an integer"
                )));
            }
        }
        Ok(Self::new(r.to_integer(), c.to_integer(), s.to_integer()))
    }

    pub fn zero() -> Self {
        Self::new(0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.c.is_zero() && self.s.is_zero()
    }

    pub fn components(&self) -> [&BigInt; 3] {
        [&self.r, &self.c, &self.s]
    }

    /// Pairing against `other` for a given value of `h²`.
    pub fn pair(&self, other: &MukaiVector, h_square: &BigInt) -> BigInt {
        &self.c * &other.c * h_square - &self.r * &other.s - &other.r * &self.s
    }

    /// Divides by the gcd of the coordinates, keeping the direction.
    pub fn primitive(&self) -> MukaiVector {
        let g = self.r.gcd(&self.c).gcd(&self.s);
        if g.is_zero() {
            return self.clone();
        }
        MukaiVector::new(&self.r / &g, &self.c / &g, &self.s / &g)
    }

    pub fn scale(&self, k: &BigInt) -> MukaiVector {
        MukaiVector::new(&self.r * k, &self.c * k, &self.s * k)
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.r, self.c, self.s)
    }
}

impl Add for &MukaiVector {
    type Output = MukaiVector;
    fn add(self, rhs: &MukaiVector) -> MukaiVector {
        MukaiVector::new(&self.r + &rhs.r, &self.c + &rhs.c, &self.s + &rhs.s)
    }
}

impl Sub for &MukaiVector {
    type Output = MukaiVector;
    fn sub(self, rhs: &MukaiVector) -> MukaiVector {
        MukaiVector::new(&self.r - &rhs.r, &self.c - &rhs.c, &self.s - &rhs.s)
    }
}

impl Neg for &MukaiVector {
    type Output = MukaiVector;
    fn neg(self) -> MukaiVector {
        MukaiVector::new(-&self.r, -&self.c, -&self.s)
    }
}

impl Mul<&MukaiVector> for &BigInt {
    type Output = MukaiVector;
    fn mul(self, rhs: &MukaiVector) -> MukaiVector {
        rhs.scale(self)
    }
}

pub fn pairing(w1: &MukaiVector, w2: &MukaiVector, ctx: &GenusContext) -> BigInt {
    w1.pair(w2, ctx.h_square())
}

pub fn square(w: &MukaiVector, ctx: &GenusContext) -> BigInt {
    pairing(w, w, ctx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Spherical,
    Isotropic,
    Positive,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kind: ClassKind,
    /// `w² + 2`, the dimension of the moduli space of stable objects with
    /// Mukai vector `w`, whenever `w² ≥ −2`.
    pub moduli_dim: Option<BigInt>,
}

pub fn classify(w: &MukaiVector, ctx: &GenusContext) -> Classification {
    let sq = square(w, ctx);
    let kind = if sq == BigInt::from(-2) {
        ClassKind::Spherical
    } else if sq.is_zero() {
        ClassKind::Isotropic
    } else if sq.is_positive() {
        ClassKind::Positive
    } else {
        ClassKind::Other
    };
    let moduli_dim = (sq >= BigInt::from(-2)).then(|| sq + 2u32);
    Classification { kind, moduli_dim }
}

/// The distinguished classes of the moduli space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalClasses {
    pub v: MukaiVector,
    /// Fibration class, `(0, 0, −1)`.
    pub f: MukaiVector,
    /// Class of the exceptional divisor `Δ`.
    pub delta: MukaiVector,
    /// Polarization class, the boundary of the movable cone opposite `f`.
    pub lambda: MukaiVector,
    /// `v(A)` of the rigid rank-2 bundle `A` (`Div2` only).
    pub a: Option<MukaiVector>,
}

impl CanonicalClasses {
    /// Coefficient `k` in `λ = k·f + δ`.
    pub fn f_coefficient(&self) -> i64 {
        if self.a.is_some() {
            1
        } else {
            2
        }
    }
}

pub fn canonical_classes(ctx: &GenusContext) -> CanonicalClasses {
    let f = MukaiVector::new(0, 0, -1);
    match ctx.case() {
        Divisibility::Div1 => CanonicalClasses {
            v: ctx.mukai_vector(),
            f,
            delta: MukaiVector::new(1, 0, 1),
            lambda: MukaiVector::new(1, 0, -1),
            a: None,
        },
        Divisibility::Div2 => {
            // 4 | g is guaranteed by the context.
            let half = ctx.genus_big() / 2u32;
            let delta = MukaiVector::new(2, -1, half.clone());
            CanonicalClasses {
                v: ctx.mukai_vector(),
                f,
                lambda: MukaiVector::new(2, -1, half - 1u32),
                a: Some(delta.clone()),
                delta,
            }
        }
    }
}

/// A basis of `v⊥` inside the algebraic lattice.
///
/// For `v = (0, h, s₀)` the orthogonality condition is the linear form
/// `c·(2g − 2) − r·s₀ = 0`, whose kernel is spanned by `(0, 0, 1)` and
/// `((2g − 2)/e, s₀/e, 0)` with `e = gcd(s₀, 2g − 2)`.
pub fn orthogonal_basis(ctx: &GenusContext) -> [MukaiVector; 2] {
    let v = ctx.mukai_vector();
    debug_assert!(v.r.is_zero() && v.c.is_one());
    let e = v.s.gcd(ctx.h_square());
    [
        MukaiVector::new(ctx.h_square() / &e, &v.s / &e, 0),
        MukaiVector::new(0, 0, 1),
    ]
}

/// Divisibility of `w ∈ v⊥`: the positive generator of the ideal of
/// pairings of `w` against `v⊥`.
pub fn divisibility(w: &MukaiVector, ctx: &GenusContext) -> Result<BigInt> {
    let v = ctx.mukai_vector();
    if !pairing(w, &v, ctx).is_zero() {
        return Err(Error::Domain(format!("{w} is not orthogonal to v = {v}")));
    }
    let g = orthogonal_basis(ctx)
        .iter()
        .fold(BigInt::zero(), |acc, u| acc.gcd(&pairing(w, u, ctx)));
    if g.is_zero() {
        return Err(Error::Domain(format!(
            "{w} pairs trivially with v⊥ and has no divisibility"
        )));
    }
    Ok(g)
}

/// A rank-2 sublattice with its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenLattice {
    pub basis: [MukaiVector; 2],
    pub gram: [[BigInt; 2]; 2],
}

impl EigenLattice {
    pub fn from_basis(basis: [MukaiVector; 2], ctx: &GenusContext) -> Self {
        let gram = [
            [
                pairing(&basis[0], &basis[0], ctx),
                pairing(&basis[0], &basis[1], ctx),
            ],
            [
                pairing(&basis[1], &basis[0], ctx),
                pairing(&basis[1], &basis[1], ctx),
            ],
        ];
        Self { basis, gram }
    }

    /// Integer coordinates `(x, y)` with `w = x·b₀ + y·b₁`, if they exist.
    pub fn coordinates(&self, w: &MukaiVector) -> Option<(BigInt, BigInt)> {
        let [b0, b1] = &self.basis;
        let a = b0.components();
        let b = b1.components();
        let t = w.components();
        // Any non-vanishing 2x2 minor determines the candidate solution.
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let det = a[i] * b[j] - a[j] * b[i];
            if det.is_zero() {
                continue;
            }
            let x_num = t[i] * b[j] - t[j] * b[i];
            let y_num = a[i] * t[j] - a[j] * t[i];
            if !(&x_num % &det).is_zero() || !(&y_num % &det).is_zero() {
                return None;
            }
            let x = x_num / &det;
            let y = y_num / &det;
            let candidate = &b0.scale(&x) + &b1.scale(&y);
            return (&candidate == w).then_some((x, y));
        }
        None
    }
}

/// The τ-invariant part of `v⊥`.
pub fn invariant_lattice(ctx: &GenusContext) -> EigenLattice {
    let basis = match ctx.case() {
        Divisibility::Div1 => [MukaiVector::new(1, 0, 0), MukaiVector::new(0, 0, 1)],
        Divisibility::Div2 => [MukaiVector::new(2, -1, 0), MukaiVector::new(0, 0, 1)],
    };
    EigenLattice::from_basis(basis, ctx)
}

pub fn gram_matrix(vectors: &[MukaiVector], ctx: &GenusContext) -> Vec<Vec<BigInt>> {
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| pairing(a, b, ctx)).collect())
        .collect()
}

/// Gram matrix of the standard basis `(1,0,0), (0,1,0), (0,0,1)`.
pub fn standard_gram(ctx: &GenusContext) -> Vec<Vec<BigInt>> {
    gram_matrix(
        &[
            MukaiVector::new(1, 0, 0),
            MukaiVector::new(0, 1, 0),
            MukaiVector::new(0, 0, 1),
        ],
        ctx,
    )
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Inertia of a real symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Characteristic polynomial `det(t·I − A)`, coefficients from the constant
/// term upwards (Faddeev–LeVerrier; every division is exact).
pub fn characteristic_polynomial(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for l in 0..n {
                    acc += &a[i][l] * &m[l][j];
                }
                if i == j {
                    acc += &coeffs[n - k + 1];
                }
                next[i][j] = acc;
            }
        }
        m = next;
        let mut trace = BigInt::zero();
        for i in 0..n {
            for l in 0..n {
                trace += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    coeffs
}

fn sign_changes<'a>(coeffs: impl Iterator<Item = BigInt> + 'a) -> usize {
    let mut changes = 0;
    let mut last: Option<bool> = None;
    for c in coeffs.filter(|c| !c.is_zero()) {
        let pos = c.is_positive();
        if let Some(prev) = last {
            if prev != pos {
                changes += 1;
            }
        }
        last = Some(pos);
    }
    changes
}

/// Signature of a symmetric integer matrix. The characteristic polynomial
/// of a symmetric matrix is real-rooted, so Descartes' rule counts its
/// positive and negative roots exactly.
pub fn signature(a: &[Vec<BigInt>]) -> Signature {
    let p = characteristic_polynomial(a);
    let zero = p.iter().take_while(|c| c.is_zero()).count();
    let positive = sign_changes(p.iter().cloned());
    let negative = sign_changes(
        p.iter()
            .enumerate()
            .map(|(i, c)| if i.is_odd() { -c } else { c.clone() }),
    );
    Signature {
        positive,
        negative,
        zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(g: u64, case: Divisibility) -> GenusContext {
        GenusContext::new(g, case).unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn pairing_examples() {
        let c4 = ctx(4, Divisibility::Div2);
        assert_eq!(
            pairing(&MukaiVector::new(2, -1, 2), &MukaiVector::new(1, 0, 1), &c4),
            big(-4)
        );
        let f = MukaiVector::new(0, 0, -1);
        for g in [2, 3, 17] {
            assert_eq!(square(&f, &ctx(g, Divisibility::Div1)), big(0));
        }
        let c8 = ctx(8, Divisibility::Div2);
        assert_eq!(square(&c8.mukai_vector(), &c8), big(14));
    }

    #[test]
    fn classify_examples() {
        let c8 = ctx(8, Divisibility::Div2);
        let a = classify(&MukaiVector::new(2, -1, 4), &c8);
        assert_eq!(a.kind, ClassKind::Spherical);
        assert_eq!(a.moduli_dim, Some(big(0)));

        let f = classify(&MukaiVector::new(0, 0, -1), &c8);
        assert_eq!(f.kind, ClassKind::Isotropic);
        assert_eq!(f.moduli_dim, Some(big(2)));

        let c4 = ctx(4, Divisibility::Div1);
        let v = classify(&MukaiVector::new(0, 1, -3), &c4);
        assert_eq!(v.kind, ClassKind::Positive);
        assert_eq!(v.moduli_dim, Some(big(8)));

        let other = classify(&MukaiVector::new(2, 0, 2), &c4);
        assert_eq!(other.kind, ClassKind::Other);
        assert_eq!(other.moduli_dim, None);
    }

    #[test]
    fn canonical_classes_examples() {
        let c5 = ctx(5, Divisibility::Div1);
        let cl = canonical_classes(&c5);
        assert_eq!(cl.lambda, MukaiVector::new(1, 0, -1));
        assert_eq!(square(&cl.lambda, &c5), big(2));
        assert!(cl.a.is_none());

        let c4 = ctx(4, Divisibility::Div2);
        let cl = canonical_classes(&c4);
        assert_eq!(cl.delta, MukaiVector::new(2, -1, 2));
        assert_eq!(cl.lambda, MukaiVector::new(2, -1, 1));
        assert_eq!(cl.lambda, &cl.f + &cl.delta);

        assert_eq!(
            GenusContext::new(6, Divisibility::Div2),
            Err(Error::InadmissibleGenus {
                genus: 6,
                constraint: "divisibility 2 requires 4 | g"
            })
        );
        assert!(GenusContext::new(1, Divisibility::Div1).is_err());
    }

    #[test]
    fn divisibility_examples() {
        let c5 = ctx(5, Divisibility::Div1);
        assert_eq!(divisibility(&MukaiVector::new(1, 0, -1), &c5), Ok(big(1)));

        let c8 = ctx(8, Divisibility::Div2);
        assert_eq!(divisibility(&MukaiVector::new(2, -1, 3), &c8), Ok(big(2)));

        let c3 = ctx(3, Divisibility::Div1);
        assert_eq!(divisibility(&MukaiVector::new(0, 0, -1), &c3), Ok(big(1)));

        assert!(matches!(
            divisibility(&MukaiVector::new(0, 1, 0), &c3),
            Err(Error::Domain(_))
        ));
        assert!(divisibility(&MukaiVector::zero(), &c3).is_err());
    }

    #[test]
    fn orthogonal_basis_is_orthogonal() {
        for c in GenusContext::admissible_up_to(40) {
            let v = c.mukai_vector();
            for u in orthogonal_basis(&c) {
                assert!(pairing(&u, &v, &c).is_zero());
            }
        }
        let c8 = ctx(8, Divisibility::Div2);
        assert_eq!(orthogonal_basis(&c8)[0], MukaiVector::new(2, -1, 0));
    }

    #[test]
    fn invariant_lattice_examples() {
        let l = invariant_lattice(&ctx(4, Divisibility::Div1));
        assert_eq!(l.gram, [[big(0), big(-1)], [big(-1), big(0)]]);

        let l = invariant_lattice(&ctx(4, Divisibility::Div2));
        assert_eq!(l.gram, [[big(6), big(-2)], [big(-2), big(0)]]);

        let c8 = ctx(8, Divisibility::Div2);
        let l = invariant_lattice(&c8);
        assert_eq!(
            l.coordinates(&canonical_classes(&c8).lambda),
            Some((big(1), big(3)))
        );
        assert_eq!(l.coordinates(&MukaiVector::new(1, 0, 0)), None);
    }

    #[test]
    fn rational_constructor_rejects_fractions() {
        let half = BigRational::new(big(1), big(2));
        let one = BigRational::from_integer(big(1));
        assert!(MukaiVector::from_rationals(&one, &one, &half).is_err());
        assert_eq!(
            MukaiVector::from_rationals(&one, &one, &one),
            Ok(MukaiVector::new(1, 1, 1))
        );
    }

    #[test]
    fn determinant_and_signature() {
        let m = vec![
            vec![big(2), big(1), big(0)],
            vec![big(1), big(2), big(1)],
            vec![big(0), big(1), big(2)],
        ];
        assert_eq!(determinant(&m), big(4));
        assert_eq!(
            signature(&m),
            Signature {
                positive: 3,
                negative: 0,
                zero: 0
            }
        );
        let h = vec![vec![big(0), big(1)], vec![big(1), big(0)]];
        assert_eq!(determinant(&h), big(-1));
        assert_eq!(
            signature(&h),
            Signature {
                positive: 1,
                negative: 1,
                zero: 0
            }
        );
        let degenerate = vec![vec![big(1), big(1)], vec![big(1), big(1)]];
        assert_eq!(signature(&degenerate).zero, 1);
        assert_eq!(signature(&degenerate).positive, 1);
    }

    #[test]
    fn standard_gram_has_signature_two_one() {
        for g in 2..60 {
            let c = ctx(g, Divisibility::Div1);
            let gram = standard_gram(&c);
            assert_eq!(determinant(&gram).abs(), c.h_square().clone());
            assert_eq!(
                signature(&gram),
                Signature {
                    positive: 2,
                    negative: 1,
                    zero: 0
                }
            );
        }
    }
}
