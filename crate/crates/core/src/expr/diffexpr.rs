use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{gcd, write_poly, Poly};

/// A reduced quotient of polynomials with a monic denominator.
///
/// Variables are bare indices; their meaning (coordinate, function symbol or
/// formal partial) lives in a [`ChartContext`](super::ChartContext). Equality
/// is structural and exact because the representation is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffExpr {
    num: Poly,
    den: Poly,
}

impl Default for DiffExpr {
    fn default() -> Self {
        DiffExpr::zero()
    }
}

impl DiffExpr {
    pub fn zero() -> Self {
        DiffExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        DiffExpr::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        DiffExpr {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        DiffExpr::from_poly(Poly::constant(q))
    }

    pub fn from_int(n: i64) -> Self {
        DiffExpr::from_poly(Poly::integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        DiffExpr::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn var(v: u32) -> Self {
        DiffExpr::from_poly(Poly::var(v))
    }

    /// Builds `num / den` in canonical form. Returns `None` when `den` is zero.
    pub fn fraction(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(normalize(num, den))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn contains_var(&self, v: u32) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(normalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &DiffExpr) -> Option<Self> {
        Some(self * &rhs.recip()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        DiffExpr {
            num: self.num.scale(q),
            den: if q.is_zero() {
                Poly::one()
            } else {
                self.den.clone()
            },
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        DiffExpr {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Partial derivative with respect to one raw variable, treating all
    /// other variables as independent.
    pub fn derivative_raw(&self, v: u32) -> Self {
        let dn = self.num.derivative(v);
        if self.den.is_constant() {
            return DiffExpr {
                num: dn,
                den: self.den.clone(),
            };
        }
        let dd = self.den.derivative(v);
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        normalize(top, &self.den * &self.den)
    }

    /// Evaluates at a rational assignment. `None` if the denominator vanishes.
    pub fn eval(&self, value: &impl Fn(u32) -> BigRational) -> Option<BigRational> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(value) / d)
    }

    /// Substitutes expressions for variables; unmapped variables are kept.
    pub fn substitute(&self, value: &impl Fn(u32) -> Option<DiffExpr>) -> Option<Self> {
        let num = subst_poly(&self.num, value);
        let den = subst_poly(&self.den, value);
        num.checked_div(&den)
    }

    /// Writes the canonical form with the given variable names.
    pub fn write_with(
        &self,
        out: &mut impl fmt::Write,
        name: &dyn Fn(u32) -> String,
    ) -> fmt::Result {
        if self.den.is_one() {
            return write_poly(out, &self.num, name);
        }
        if self.num.num_terms() > 1 {
            out.write_str("(")?;
            write_poly(out, &self.num, name)?;
            out.write_str(")")?;
        } else {
            write_poly(out, &self.num, name)?;
        }
        out.write_str("/")?;
        // The denominator is monic, so a single term is a bare monomial.
        let wrap_den = self.den.num_terms() > 1
            || self.den.leading().is_some_and(|(m, _)| m.pairs().len() > 1);
        if wrap_den {
            out.write_str("(")?;
            write_poly(out, &self.den, name)?;
            out.write_str(")")
        } else {
            write_poly(out, &self.den, name)
        }
    }
}

fn subst_poly(p: &Poly, value: &impl Fn(u32) -> Option<DiffExpr>) -> DiffExpr {
    let mut acc = DiffExpr::zero();
    for (m, c) in p.terms() {
        let mut t = DiffExpr::from_rational(c.clone());
        for &(v, e) in m.pairs() {
            let base = value(v).unwrap_or_else(|| DiffExpr::var(v));
            t = &t * &base.pow(e);
        }
        acc += &t;
    }
    acc
}

fn normalize(num: Poly, den: Poly) -> DiffExpr {
    if num.is_zero() {
        return DiffExpr::zero();
    }
    let (num, den) = if den.is_constant() {
        (num, den)
    } else {
        let g = gcd(&num, &den);
        if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        }
    };
    let lc = den.leading().expect("nonzero denominator").1.clone();
    if lc.is_one() {
        DiffExpr { num, den }
    } else {
        let inv = lc.recip();
        DiffExpr {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }
}

impl fmt::Display for DiffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|v| format!("v{v}"))
    }
}

impl Add for &DiffExpr {
    type Output = DiffExpr;
    fn add(self, rhs: &DiffExpr) -> DiffExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return DiffExpr::from_poly(&self.num + &rhs.num);
            }
            return normalize(&self.num + &rhs.num, self.den.clone());
        }
        // a/1 + c/d stays reduced: gcd(a d + c, d) = gcd(c, d) = 1.
        if self.den.is_one() {
            return DiffExpr {
                num: &(&self.num * &rhs.den) + &rhs.num,
                den: rhs.den.clone(),
            };
        }
        if rhs.den.is_one() {
            return DiffExpr {
                num: &self.num + &(&rhs.num * &self.den),
                den: self.den.clone(),
            };
        }
        let g = gcd(&self.den, &rhs.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        normalize(num, &self.den * &b)
    }
}

impl Neg for &DiffExpr {
    type Output = DiffExpr;
    fn neg(self) -> DiffExpr {
        DiffExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &DiffExpr {
    type Output = DiffExpr;
    fn sub(self, rhs: &DiffExpr) -> DiffExpr {
        self + &(-rhs)
    }
}

impl Mul for &DiffExpr {
    type Output = DiffExpr;
    fn mul(self, rhs: &DiffExpr) -> DiffExpr {
        if self.is_zero() || rhs.is_zero() {
            return DiffExpr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return DiffExpr::from_poly(&self.num * &rhs.num);
        }
        // Cross-cancel so the product is reduced without a full gcd.
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading().expect("nonzero").1.clone();
        if lc.is_one() {
            DiffExpr { num, den }
        } else {
            let inv = lc.recip();
            DiffExpr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

impl Div for &DiffExpr {
    type Output = DiffExpr;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &DiffExpr) -> DiffExpr {
        self.checked_div(rhs).expect("division by zero DiffExpr")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DiffExpr {
            type Output = DiffExpr;
            fn $m(self, rhs: DiffExpr) -> DiffExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&DiffExpr> for DiffExpr {
            type Output = DiffExpr;
            fn $m(self, rhs: &DiffExpr) -> DiffExpr {
                (&self).$m(rhs)
            }
        }
        impl $tr<DiffExpr> for &DiffExpr {
            type Output = DiffExpr;
            fn $m(self, rhs: DiffExpr) -> DiffExpr {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for DiffExpr {
    type Output = DiffExpr;
    fn neg(self) -> DiffExpr {
        -&self
    }
}

impl AddAssign<&DiffExpr> for DiffExpr {
    fn add_assign(&mut self, rhs: &DiffExpr) {
        *self = &*self + rhs;
    }
}

impl AddAssign for DiffExpr {
    fn add_assign(&mut self, rhs: DiffExpr) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&DiffExpr> for DiffExpr {
    fn sub_assign(&mut self, rhs: &DiffExpr) {
        *self = &*self - rhs;
    }
}

impl SubAssign for DiffExpr {
    fn sub_assign(&mut self, rhs: DiffExpr) {
        *self = &*self - &rhs;
    }
}

impl std::iter::Sum for DiffExpr {
    fn sum<I: Iterator<Item = DiffExpr>>(iter: I) -> Self {
        let mut acc = DiffExpr::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_fractions() {
        let x = DiffExpr::var(0);
        let y = DiffExpr::var(1);
        let q = &(&(&x * &x) - &(&y * &y)) / &(&x - &y);
        assert_eq!(q, &x + &y);
        assert!(q.is_polynomial());
    }

    #[test]
    fn denominator_is_monic() {
        let y = DiffExpr::var(1);
        let e = &DiffExpr::one() / &(&DiffExpr::from_int(2) * &y);
        assert!(e.denom().leading().unwrap().1.is_one());
        assert_eq!(&e * &(&DiffExpr::from_int(2) * &y), DiffExpr::one());
    }

    #[test]
    fn zero_is_unique() {
        let x = DiffExpr::var(0);
        let a = &x / &(&x + &DiffExpr::one());
        assert_eq!(&a - &a, DiffExpr::zero());
        assert_eq!((&a - &a).denom(), &Poly::one());
    }
}
