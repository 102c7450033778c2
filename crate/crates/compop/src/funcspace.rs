//! Finitely supported bounded functions with exact arithmetic, and the
//! action of composition operators on them.
//!
//! Every witness function the engine ever needs (characteristic functions
//! and their differences) is finitely supported, so functions are stored as
//! sparse tables of complex values with exact rational parts. Moduli are
//! always compared through their exact squares; decimal output is rendering
//! only.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::selfmap::SelfMap;
use crate::space::Point;

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexRational {
    re: BigRational,
    im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> ComplexRational {
        ComplexRational { re, im }
    }

    pub fn from_integer(n: i64) -> ComplexRational {
        ComplexRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `a + b i` for integer `a`, `b`.
    pub fn from_parts(re: i64, im: i64) -> ComplexRational {
        ComplexRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn zero() -> ComplexRational {
        ComplexRational::from_integer(0)
    }

    pub fn one() -> ComplexRational {
        ComplexRational::from_integer(1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// The exact squared modulus `re^2 + im^2`.
    pub fn modulus_squared(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Add for ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: ComplexRational) -> ComplexRational {
        ComplexRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: ComplexRational) -> ComplexRational {
        ComplexRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: ComplexRational) -> ComplexRational {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        ComplexRational { re, im }
    }
}

fn rational_str(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", rational_str(&self.re));
        }
        let im_mag = rational_str(&self.im.abs());
        let im_part = if im_mag == "1" {
            "i".to_string()
        } else {
            format!("{im_mag}i")
        };
        if self.re.is_zero() {
            return if self.im.is_negative() {
                write!(f, "-{im_part}")
            } else {
                write!(f, "{im_part}")
            };
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}", rational_str(&self.re), sign, im_part)
    }
}

/// A supremum norm value, stored as its exact square.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SupNorm {
    squared: BigRational,
}

impl SupNorm {
    pub fn from_squared(squared: BigRational) -> SupNorm {
        SupNorm { squared }
    }

    pub fn squared(&self) -> &BigRational {
        &self.squared
    }

    /// The exact norm when its square has a rational square root.
    pub fn exact(&self) -> Option<BigRational> {
        rational_sqrt(&self.squared)
    }

    pub fn approx(&self) -> f64 {
        self.squared.to_f64().map_or(f64::NAN, f64::sqrt)
    }
}

impl fmt::Display for SupNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(v) => write!(f, "{}", rational_str(&v)),
            None => write!(f, "{:.12}", self.approx()),
        }
    }
}

/// Exact square root of a nonnegative rational, when one exists.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    (&sn * &sn == *num && &sd * &sd == *den).then(|| BigRational::new(sn, sd))
}

/// A finitely supported complex-valued function. Zero everywhere outside the
/// stored support; the table never stores a zero value.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BoundedFunction {
    values: BTreeMap<Point, ComplexRational>,
}

impl BoundedFunction {
    pub fn zero() -> BoundedFunction {
        BoundedFunction::default()
    }

    /// The characteristic function of the single point `w`.
    pub fn chi(w: Point) -> BoundedFunction {
        let mut values = BTreeMap::new();
        values.insert(w, ComplexRational::one());
        BoundedFunction { values }
    }

    pub fn value_at(&self, v: Point) -> ComplexRational {
        self.values.get(&v).cloned().unwrap_or_else(ComplexRational::zero)
    }

    pub fn set(&mut self, v: Point, value: ComplexRational) {
        if value.is_zero() {
            self.values.remove(&v);
        } else {
            self.values.insert(v, value);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (&Point, &ComplexRational)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// The exact squared supremum norm: the maximum squared modulus over the
    /// support, zero for the zero function.
    pub fn sup_norm_squared(&self) -> BigRational {
        self.values
            .values()
            .map(ComplexRational::modulus_squared)
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn sup_norm(&self) -> SupNorm {
        SupNorm::from_squared(self.sup_norm_squared())
    }

    pub fn scale(&self, c: &ComplexRational) -> BoundedFunction {
        let mut out = BoundedFunction::zero();
        for (p, v) in &self.values {
            out.set(*p, c.clone() * v.clone());
        }
        out
    }
}

impl Add for BoundedFunction {
    type Output = BoundedFunction;
    fn add(self, rhs: BoundedFunction) -> BoundedFunction {
        let mut out = self;
        for (p, v) in rhs.values {
            let sum = out.value_at(p) + v;
            out.set(p, sum);
        }
        out
    }
}

impl Sub for BoundedFunction {
    type Output = BoundedFunction;
    fn sub(self, rhs: BoundedFunction) -> BoundedFunction {
        let mut out = self;
        for (p, v) in rhs.values {
            let diff = out.value_at(p) - v;
            out.set(p, diff);
        }
        out
    }
}

/// The witness function for a pair of maps at a base point where they
/// differ: the characteristic function of the first image minus the
/// characteristic function of the second. Its value is 1 at the first image
/// and -1 at the second, and its supremum norm is 1.
pub fn difference_witness(phi: &SelfMap, psi: &SelfMap, base: Point) -> Result<BoundedFunction> {
    phi.same_space(psi)?;
    let a = phi.apply(base)?;
    let b = psi.apply(base)?;
    if a == b {
        return Err(Error::NoDifferenceAt { point: base });
    }
    Ok(BoundedFunction::chi(a) - BoundedFunction::chi(b))
}

/// Values of an operator image on a finite set of points, with the maximum
/// squared modulus over that set.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub entries: Vec<(Point, ComplexRational)>,
    pub max_modulus_squared: BigRational,
}

impl Restriction {
    fn from_entries(entries: Vec<(Point, ComplexRational)>) -> Restriction {
        let max_modulus_squared = entries
            .iter()
            .map(|(_, v)| v.modulus_squared())
            .max()
            .unwrap_or_else(BigRational::zero);
        Restriction {
            entries,
            max_modulus_squared,
        }
    }
}

/// The composition of `f` with `phi`, tabulated on all points of length at
/// most `max_length`.
pub fn operator_apply_restricted(
    phi: &SelfMap,
    f: &BoundedFunction,
    max_length: u64,
) -> Result<Restriction> {
    let mut entries = Vec::new();
    for v in phi.space().points_up_to(max_length)? {
        entries.push((v, f.value_at(phi.apply_raw(v)?)));
    }
    Ok(Restriction::from_entries(entries))
}

/// Pointwise value of the difference of two composition operators on `f`.
pub fn difference_value(
    phi: &SelfMap,
    psi: &SelfMap,
    f: &BoundedFunction,
    v: Point,
) -> Result<ComplexRational> {
    Ok(f.value_at(phi.apply_raw(v)?) - f.value_at(psi.apply_raw(v)?))
}

/// The difference of the two composition operators applied to `f`, tabulated
/// on all points of length at most `max_length`.
pub fn difference_apply_restricted(
    phi: &SelfMap,
    psi: &SelfMap,
    f: &BoundedFunction,
    max_length: u64,
) -> Result<Restriction> {
    phi.same_space(psi)?;
    let mut entries = Vec::new();
    for v in phi.space().points_up_to(max_length)? {
        entries.push((v, difference_value(phi, psi, f, v)?));
    }
    Ok(Restriction::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use num_traits::One;

    fn pt(length: u64, index: u64) -> Point {
        Point::new(length, index)
    }

    fn one() -> BigRational {
        BigRational::one()
    }

    #[test]
    fn chi_has_norm_one() {
        let f = BoundedFunction::chi(pt(3, 0));
        assert_eq!(f.sup_norm_squared(), one());
        assert_eq!(f.sup_norm().exact(), Some(one()));
        assert_eq!(f.value_at(pt(3, 0)), ComplexRational::one());
        assert_eq!(f.value_at(pt(0, 0)), ComplexRational::zero());
    }

    #[test]
    fn zero_function_has_norm_zero() {
        assert!(BoundedFunction::zero().sup_norm_squared().is_zero());
    }

    #[test]
    fn sup_norm_takes_max_modulus() {
        // 3*chi_a - 4i*chi_b has norm 4
        let f = BoundedFunction::chi(pt(1, 0)).scale(&ComplexRational::from_integer(3))
            + BoundedFunction::chi(pt(2, 0)).scale(&ComplexRational::from_parts(0, -4));
        assert_eq!(
            f.sup_norm().exact(),
            Some(BigRational::from_integer(4.into()))
        );
    }

    #[test]
    fn difference_witness_values() {
        let s = Space::path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let f = difference_witness(&id, &shift, pt(0, 0)).unwrap();
        assert_eq!(f.value_at(pt(0, 0)), ComplexRational::one());
        assert_eq!(f.value_at(pt(1, 0)), ComplexRational::from_integer(-1));
        assert_eq!(f.sup_norm_squared(), one());
    }

    #[test]
    fn difference_witness_needs_disagreement() {
        let s = Space::path();
        let id = SelfMap::identity(&s);
        assert_eq!(
            difference_witness(&id, &id, pt(0, 0)),
            Err(Error::NoDifferenceAt { point: pt(0, 0) })
        );
    }

    #[test]
    fn operator_apply_shift_of_chi() {
        // composing chi_3 with the shift puts the 1 at the preimage 2
        let s = Space::path();
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let f = BoundedFunction::chi(pt(3, 0));
        let table = operator_apply_restricted(&shift, &f, 5).unwrap();
        for (v, value) in &table.entries {
            if *v == pt(2, 0) {
                assert_eq!(*value, ComplexRational::one());
            } else {
                assert!(value.is_zero());
            }
        }
    }

    #[test]
    fn identity_operator_restricts_function() {
        let s = Space::path();
        let id = SelfMap::identity(&s);
        let mut f = BoundedFunction::chi(pt(1, 0));
        f.set(pt(4, 0), ComplexRational::from_parts(2, 1));
        let table = operator_apply_restricted(&id, &f, 4).unwrap();
        for (v, value) in &table.entries {
            assert_eq!(*value, f.value_at(*v));
        }
    }

    #[test]
    fn constant_symbol_gives_constant_image() {
        let s = Space::path();
        let c = SelfMap::constant(&s, pt(2, 0)).unwrap();
        let f = BoundedFunction::chi(pt(2, 0));
        let table = operator_apply_restricted(&c, &f, 4).unwrap();
        assert_eq!(table.entries.len(), 5);
        assert!(table.entries.iter().all(|(_, v)| *v == ComplexRational::one()));
    }

    #[test]
    fn difference_witness_attains_modulus_two_at_base() {
        let s = Space::path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let f = difference_witness(&id, &shift, pt(0, 0)).unwrap();
        let table = difference_apply_restricted(&id, &shift, &f, 3).unwrap();
        assert_eq!(
            table.max_modulus_squared,
            BigRational::from_integer(4.into())
        );
        let at_base = difference_value(&id, &shift, &f, pt(0, 0)).unwrap();
        assert_eq!(
            at_base.modulus_squared(),
            BigRational::from_integer(4.into())
        );
    }

    #[test]
    fn equal_symbols_give_zero_difference() {
        let s = Space::path();
        let id = SelfMap::identity(&s);
        let f = BoundedFunction::chi(pt(1, 0));
        let table = difference_apply_restricted(&id, &id, &f, 4).unwrap();
        assert!(table.max_modulus_squared.is_zero());
        let zero = difference_apply_restricted(
            &id,
            &SelfMap::ray_advance(&s, 1).unwrap(),
            &BoundedFunction::zero(),
            4,
        )
        .unwrap();
        assert!(zero.max_modulus_squared.is_zero());
    }

    #[test]
    fn complex_display_forms() {
        assert_eq!(ComplexRational::zero().to_string(), "0");
        assert_eq!(ComplexRational::from_integer(-3).to_string(), "-3");
        assert_eq!(ComplexRational::from_parts(0, 1).to_string(), "i");
        assert_eq!(ComplexRational::from_parts(0, -4).to_string(), "-4i");
        assert_eq!(ComplexRational::from_parts(3, -4).to_string(), "3-4i");
        assert_eq!(
            ComplexRational::new(
                BigRational::new(1.into(), 2.into()),
                BigRational::new(3.into(), 2.into())
            )
            .to_string(),
            "1/2+3/2i"
        );
    }

    #[test]
    fn sup_norm_display_and_sqrt() {
        let mut f = BoundedFunction::zero();
        f.set(pt(0, 0), ComplexRational::from_parts(1, 1));
        // squared modulus 2 has no rational square root
        assert_eq!(f.sup_norm().exact(), None);
        assert!((f.sup_norm().approx() - 2f64.sqrt()).abs() < 1e-12);
        let g = BoundedFunction::chi(pt(0, 0)).scale(&ComplexRational::from_parts(3, 4));
        assert_eq!(
            g.sup_norm().exact(),
            Some(BigRational::from_integer(5.into()))
        );
        assert_eq!(g.sup_norm().to_string(), "5");
    }
}
