//! The rational function field F_q(t): polynomials and fractions in t,
//! valuations at finite places and at infinity, square tests, and the
//! constructions of quadratic maps whose n-th iterate is irreducible over
//! F_q(t) but reducible at every finite place.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FiniteField, FqField};
use crate::modpoly::{iterate_quadratic, DEFAULT_SEED};
use crate::poly::Poly;
use crate::quadmap::Criterion;

pub type FqPoly = Poly<FqField>;
type Elem = Vec<u64>;

/// Coefficients ascending in t, each as its coordinate vector over F_p.
pub fn poly_coords(a: &FqPoly) -> Vec<Vec<u64>> {
    a.coeffs().to_vec()
}

/// Polynomial in t from F_p integers (ascending).
pub fn fqpoly(field: &FqField, coeffs: &[i64]) -> FqPoly {
    Poly::from_coeffs(field.clone(), coeffs.iter().map(|&c| field.from_i64(c)).collect())
}

pub fn t(field: &FqField) -> FqPoly {
    Poly::x(field.clone())
}

/// A fraction num/den in lowest terms with den monic.
#[derive(Clone, PartialEq, Eq)]
pub struct FqRat {
    num: FqPoly,
    den: FqPoly,
}

impl fmt::Debug for FqRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl Serialize for FqRat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FqRat", 2)?;
        st.serialize_field("num", &poly_coords(&self.num))?;
        st.serialize_field("den", &poly_coords(&self.den))?;
        st.end()
    }
}

impl FqRat {
    pub fn new(num: FqPoly, den: FqPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let field = num.field().clone();
        if num.is_zero() {
            return Ok(Self::zero(&field));
        }
        let g = num.gcd(&den);
        let (num, den) = (num.div_exact(&g), den.div_exact(&g));
        let inv = field.inv(den.leading().unwrap()).unwrap();
        Ok(FqRat {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(num: FqPoly) -> Self {
        let den = Poly::one(num.field().clone());
        FqRat { num, den }
    }

    pub fn constant(field: &FqField, c: Elem) -> Self {
        Self::from_poly(Poly::constant(field.clone(), c))
    }

    pub fn zero(field: &FqField) -> Self {
        Self::from_poly(Poly::zero(field.clone()))
    }

    pub fn field(&self) -> &FqField {
        self.num.field()
    }

    pub fn num(&self) -> &FqPoly {
        &self.num
    }

    pub fn den(&self) -> &FqPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    fn make(num: FqPoly, den: FqPoly) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::make(self.num.add(&o.num), self.den.clone());
        }
        Self::make(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        FqRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::make(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn square(&self) -> Self {
        // Squaring keeps lowest terms and a monic denominator.
        FqRat {
            num: self.num.square(),
            den: self.den.square(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self::make(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &Elem) -> Self {
        Self::make(self.num.scale(c), self.den.clone())
    }

    /// x^(2^k) by repeated squaring.
    pub fn pow2k(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.square())
    }
}

/// A place of F_q(t): a monic irreducible polynomial, or infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Finite(FqPoly),
    Infinity,
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Place::Finite(p) => {
                let mut st = s.serialize_struct("Place", 1)?;
                st.serialize_field("finite", &poly_coords(p))?;
                st.end()
            }
            Place::Infinity => s.serialize_str("INFINITY"),
        }
    }
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.degree().unwrap_or(0),
            Place::Infinity => 1,
        }
    }
}

fn poly_valuation(a: &FqPoly, p: &FqPoly) -> i64 {
    let mut v = 0;
    let mut a = a.clone();
    loop {
        let (q, r) = a.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        a = q;
        v += 1;
    }
}

pub fn valuation(x: &FqRat, place: &Place) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(match place {
        Place::Finite(p) => poly_valuation(&x.num, p) - poly_valuation(&x.den, p),
        Place::Infinity => x.den.degree().unwrap() as i64 - x.num.degree().unwrap() as i64,
    })
}

/// Whether a nonzero polynomial is a square in F_q[t]: even multiplicities
/// throughout its squarefree decomposition and a square leading coefficient.
pub fn is_square_fqpoly(a: &FqPoly) -> bool {
    let Some(lc) = a.leading() else { return true };
    a.field().is_square(lc)
        && a
            .squarefree_decomposition()
            .iter()
            .all(|(_, e)| e % 2 == 0)
}

/// 0 counts as a square.
pub fn is_square_fqrat(x: &FqRat) -> bool {
    is_square_fqpoly(&x.num) && is_square_fqpoly(&x.den)
}

pub fn sqrt_fqpoly(a: &FqPoly) -> Option<FqPoly> {
    let field = a.field();
    let Some(lc) = a.leading() else {
        return Some(a.clone());
    };
    let mut root = Poly::constant(field.clone(), field.sqrt(lc)?);
    for (g, e) in a.squarefree_decomposition() {
        if e % 2 == 1 {
            return None;
        }
        for _ in 0..e / 2 {
            root = root.mul(&g);
        }
    }
    Some(root)
}

pub fn sqrt_fqrat(x: &FqRat) -> Option<FqRat> {
    Some(FqRat::make(sqrt_fqpoly(&x.num)?, sqrt_fqpoly(&x.den)?))
}

/// f(x) = (x − γ)² + γ + m over F_q(t).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadMapFq {
    pub gamma: FqRat,
    pub m: FqRat,
}

impl QuadMapFq {
    /// `[f₀(0), …, f₀ⁿ(0)]` for f₀ = x² + m.
    pub fn base_orbit(&self, n: u32) -> Vec<FqRat> {
        base_orbit_fq(&self.m, n)
    }

    /// fⁱ(γ) for i = 1..=n.
    pub fn values(&self, n: u32) -> Vec<FqRat> {
        self.base_orbit(n).iter().map(|b| b.add(&self.gamma)).collect()
    }

    /// Ascending coefficients `[γ² + γ + m, −2γ, 1]` in x.
    pub fn coefficients(&self) -> [FqRat; 3] {
        let f = self.gamma.field();
        let two = f.from_i64(2);
        [
            self.gamma.square().add(&self.gamma).add(&self.m),
            self.gamma.scale(&two).neg(),
            FqRat::constant(f, f.one()),
        ]
    }
}

fn base_orbit_fq(m: &FqRat, n: u32) -> Vec<FqRat> {
    let mut out = Vec::with_capacity(n as usize);
    let mut a = FqRat::zero(m.field());
    for _ in 0..n {
        a = a.square().add(m);
        out.push(a.clone());
    }
    out
}

fn half(x: &FqRat) -> FqRat {
    let f = x.field();
    x.scale(&f.inv(&f.from_i64(2)).expect("odd characteristic"))
}

/// The two elements that stand in for a square fⁱ(γ) in the refined
/// criterion, or `None` when fⁱ(γ) is not a square.
pub fn altfund_elements_fq(f: &QuadMapFq, values: &[FqRat], i: u32) -> Option<[FqRat; 2]> {
    let root = sqrt_fqrat(&values[i as usize - 1])?;
    let t = if i == 2 {
        f.gamma.sub(&values[0])
    } else {
        values[i as usize - 2].sub(&f.gamma)
    };
    Some([half(&t.add(&root)), half(&t.sub(&root))])
}

pub fn check_altfund_fq(f: &QuadMapFq, n: u32) -> Criterion {
    let values = f.values(n.max(1));
    if is_square_fqrat(&values[0].neg()) {
        return Criterion::Inconclusive { index: 1 };
    }
    for i in 2..=n {
        let Some(pair) = altfund_elements_fq(f, &values, i) else {
            continue;
        };
        if pair.iter().any(is_square_fqrat) {
            return Criterion::Inconclusive { index: i };
        }
    }
    Criterion::IrreducibleCertified
}

/// (p, k, modulus) identifying a constant field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldId {
    pub p: u64,
    pub k: u32,
    pub modulus: Vec<u64>,
}

impl From<&FqField> for FieldId {
    fn from(f: &FqField) -> Self {
        FieldId {
            p: f.p(),
            k: f.k(),
            modulus: f.modulus().to_vec(),
        }
    }
}

/// Valuations recorded at one place to support the irreducibility claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationCertificate {
    pub place: Place,
    pub v_m: i64,
    pub v_gamma: i64,
    /// v(f₀ⁱ(0)) for i = 1..=n.
    pub base: Vec<i64>,
    /// v(fⁱ(γ)) for i = 1..n.
    pub values: Vec<i64>,
    /// v of the two level-n elements of the refined criterion, if f^n(γ)
    /// is a square.
    pub elements: Vec<i64>,
    pub holds: bool,
}

fn valuation_certificate(f: &QuadMapFq, n: u32, place: Place) -> Result<ValuationCertificate> {
    let v = |x: &FqRat| valuation(x, &place);
    let v_m = v(&f.m)?;
    let v_gamma = v(&f.gamma)?;
    let base = f.base_orbit(n).iter().map(v).collect::<Result<Vec<_>>>()?;
    let all_values = f.values(n);
    let values = all_values[..n as usize - 1]
        .iter()
        .map(v)
        .collect::<Result<Vec<_>>>()?;
    let elements = match altfund_elements_fq(f, &all_values, n) {
        Some(pair) => pair.iter().map(v).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let holds = match place {
        // Rigid valuations along the base orbit force both level-n
        // elements to have the odd valuation of m.
        Place::Finite(_) => {
            v_m > 0
                && v_m % 2 != 0
                && base.iter().all(|&b| b == v_m)
                && elements.iter().all(|&e| e == v_m)
        }
        // The pole of γ dominates every earlier fⁱ(γ).
        Place::Infinity => {
            v_m < 0
                && v_m % 2 != 0
                && v_gamma == ((1i64 << (n - 1)) - 1) * v_m
                && values.iter().all(|&x| x == v_gamma)
        }
    };
    Ok(ValuationCertificate {
        place,
        v_m,
        v_gamma,
        base,
        values,
        elements,
        holds,
    })
}

/// Σ_P v_P(m)·deg P over finite places, and v_∞(m); they sum to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProductFormula {
    pub finite: i64,
    pub infinite: i64,
    /// Σ deg P over finite places where v_P(m) is odd.
    pub odd_degree_sum: i64,
}

impl ProductFormula {
    pub fn holds(&self) -> bool {
        self.finite + self.infinite == 0 && (self.odd_degree_sum - self.finite) % 2 == 0
    }
}

pub fn product_formula(m: &FqRat) -> Result<ProductFormula> {
    if m.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut finite = 0;
    let mut odd_degree_sum = 0;
    for (sign, part) in [(1i64, &m.num), (-1, &m.den)] {
        for (p, e) in part.factor(&mut rng) {
            let d = p.degree().unwrap() as i64;
            finite += sign * e as i64 * d;
            if e % 2 == 1 {
                odd_degree_sum += d;
            }
        }
    }
    Ok(ProductFormula {
        finite,
        infinite: valuation(m, &Place::Infinity)?,
        odd_degree_sum,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatffConstruction {
    pub field: FieldId,
    pub n: u32,
    pub map: QuadMapFq,
    /// Expanded coefficients of f in x, ascending.
    pub coefficients: [FqRat; 3],
    pub finite_certificate: ValuationCertificate,
    pub infinite_certificate: ValuationCertificate,
    pub altfund: Criterion,
    pub product_formula: ProductFormula,
}

fn check_m_hypotheses(m: &FqRat) -> Result<()> {
    let dn = m.num.degree().unwrap_or(0);
    let dd = m.den.degree().unwrap();
    if m.is_zero() || dn % 2 == 0 {
        return Err(Error::hypothesis("deg(num m) must be odd"));
    }
    if dd % 2 == 1 {
        return Err(Error::hypothesis("deg(den m) must be even"));
    }
    if dn <= dd {
        return Err(Error::hypothesis("deg(num m) must exceed deg(den m)"));
    }
    Ok(())
}

/// A finite place where m has positive odd valuation.
fn odd_zero_place(m: &FqRat) -> Place {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (p, _) = m
        .num
        .factor(&mut rng)
        .into_iter()
        .find(|(_, e)| e % 2 == 1)
        .expect("odd-degree numerator has an odd-multiplicity factor");
    Place::Finite(p)
}

/// γ = m^(2^(n−1)) − f₀ⁿ(0) for m = num/den with deg(num) odd, deg(den)
/// even and deg(num) > deg(den).
pub fn construct_ratffcor(n: u32, m: &FqRat) -> Result<RatffConstruction> {
    if n < 3 {
        return Err(Error::hypothesis(format!("n ≥ 3 (got n = {n})")));
    }
    check_m_hypotheses(m)?;
    let base = base_orbit_fq(m, n);
    let gamma = m.pow2k(n - 1).sub(&base[n as usize - 1]);
    let map = QuadMapFq {
        gamma,
        m: m.clone(),
    };
    let top = map.values(n).pop().unwrap();
    if top != m.pow2k(n - 1) || !is_square_fqrat(&top) {
        return Err(Error::InternalVerification("f^n(γ) is not m^(2^(n-1))".into()));
    }
    let finite_certificate = valuation_certificate(&map, n, odd_zero_place(m))?;
    let infinite_certificate = valuation_certificate(&map, n, Place::Infinity)?;
    let altfund = check_altfund_fq(&map, n);
    if !finite_certificate.holds || !infinite_certificate.holds || !altfund.is_certified() {
        return Err(Error::InternalVerification(
            "valuation certificates do not recompute".into(),
        ));
    }
    let product_formula = product_formula(m)?;
    Ok(RatffConstruction {
        field: m.field().into(),
        n,
        coefficients: map.coefficients(),
        map,
        finite_certificate,
        infinite_certificate,
        altfund,
        product_formula,
    })
}

/// γ = (m + r)² − m² − m, which makes f² irreducible when r/2 is a
/// non-residue in F_q.
pub fn construct_n2_remedy(m: &FqRat, r: &Elem) -> Result<QuadMapFq> {
    check_m_hypotheses(m)?;
    let field = m.field();
    let two_inv = field.inv(&field.from_i64(2)).unwrap();
    if field.is_square(&field.mul(r, &two_inv)) {
        return Err(Error::hypothesis("r/2 must be a non-residue in the constant field"));
    }
    let mr = m.add(&FqRat::constant(field, r.clone()));
    let gamma = mr.square().sub(&m.square()).sub(m);
    let map = QuadMapFq {
        gamma,
        m: m.clone(),
    };
    let values = map.values(2);
    if values[1] != mr.square() || is_square_fqrat(&values[0].neg()) {
        return Err(Error::InternalVerification("n = 2 remedy identities fail".into()));
    }
    if !check_altfund_fq(&map, 2).is_certified() {
        return Err(Error::InternalVerification("f² not certified".into()));
    }
    Ok(map)
}

/// An embedding F_{p^k} → F_{p^j} (k | j), sending the generator to a root
/// of the source modulus.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: FqField,
    target: FqField,
    theta: Elem,
}

impl Embedding {
    pub fn new(source: &FqField, target: &FqField) -> Result<Self> {
        if source.p() != target.p() || target.k() % source.k() != 0 {
            return Err(Error::InvalidInput(format!(
                "F_{}^{} does not embed in F_{}^{}",
                source.p(),
                source.k(),
                target.p(),
                target.k()
            )));
        }
        let modulus = Poly::from_coeffs(
            target.clone(),
            source.modulus().iter().map(|&c| target.from_u64(c)).collect(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        let theta = modulus
            .roots(&mut rng)
            .into_iter()
            .next()
            .expect("irreducible modulus splits in the extension");
        Ok(Embedding {
            source: source.clone(),
            target: target.clone(),
            theta,
        })
    }

    pub fn map(&self, a: &Elem) -> Elem {
        let t = &self.target;
        a.iter().rev().fold(t.zero(), |acc, &c| {
            t.add(&t.mul(&acc, &self.theta), &t.from_u64(c))
        })
    }

    fn eval_poly(&self, a: &FqPoly, c: &Elem) -> Elem {
        let t = &self.target;
        a.coeffs()
            .iter()
            .rev()
            .fold(t.zero(), |acc, k| t.add(&t.mul(&acc, c), &self.map(k)))
    }

    /// x ∈ F_{p^k}(t) evaluated at t = c ∈ F_{p^j}.
    pub fn eval(&self, x: &FqRat, c: &Elem) -> Result<Elem> {
        let d = self.eval_poly(&x.den, c);
        let inv = self.target.inv(&d).ok_or(Error::Pole)?;
        Ok(self.target.mul(&self.eval_poly(&x.num, c), &inv))
    }

    pub fn source(&self) -> &FqField {
        &self.source
    }
}

/// Factor degrees of fⁿ specialized at t = c, over the field containing c.
pub fn specialize_and_factor(
    f: &QuadMapFq,
    n: u32,
    emb: &Embedding,
    c: &Elem,
    cap: usize,
) -> Result<Vec<usize>> {
    let tf = &emb.target;
    let g = emb.eval(&f.gamma, c)?;
    let m = emb.eval(&f.m, c)?;
    // (x − g)² + g + m
    let c0 = tf.add(&tf.add(&tf.mul(&g, &g), &g), &m);
    let c1 = tf.neg(&tf.add(&g, &g));
    let quad = Poly::from_coeffs(tf.clone(), vec![c0, c1, tf.one()]);
    Ok(iterate_quadratic(&quad, n, cap)?.factor_degrees())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializationSweep {
    pub p: u64,
    pub j: u32,
    pub n: u32,
    pub points: u64,
    pub poles: u64,
    /// Points where fⁿ stays irreducible; the construction predicts none.
    pub irreducible_points: u64,
    pub degree_sums_ok: bool,
}

/// Specialize at every c ∈ F_{p^j}.
pub fn specialization_sweep(f: &QuadMapFq, n: u32, j: u32, cap: usize) -> Result<SpecializationSweep> {
    let source = f.m.field();
    let target = FqField::new(source.p(), j)?;
    let emb = Embedding::new(source, &target)?;
    let order = target.order() as u64;
    let results = (0..order)
        .into_par_iter()
        .map(|i| match specialize_and_factor(f, n, &emb, &target.element(i as u128), cap) {
            Err(Error::Pole) => Ok(None),
            other => other.map(Some),
        })
        .collect::<Result<Vec<_>>>()?;
    let full = 1usize << n;
    Ok(SpecializationSweep {
        p: source.p(),
        j,
        n,
        points: order,
        poles: results.iter().filter(|r| r.is_none()).count() as u64,
        irreducible_points: results
            .iter()
            .flatten()
            .filter(|d| d.as_slice() == [full])
            .count() as u64,
        degree_sums_ok: results
            .iter()
            .flatten()
            .all(|d| d.iter().sum::<usize>() == full),
    })
}
