//! Real scalar abstraction shared by the lattice-sum kernel and the bracket
//! engine.
//!
//! Two backends exist: plain `f64` and [`MpFloat`], a binary floating-point
//! number with a configurable mantissa length. Every numeric routine in this
//! crate is written once against [`Real`] so both precisions run the same
//! algorithm.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex;
use num_traits::{Num, One, Zero};

/// Bits of mantissa that an `f64` carries.
pub const DOUBLE_BITS: usize = 53;

/// Smallest working precision accepted for [`MpFloat`].
pub const MIN_MP_BITS: usize = 64;

/// Scalar field used by the numeric kernels.
///
/// Precision-carrying backends propagate precision from their operands, so
/// constants produced by [`Real::pi_like`] and transcendental results inherit
/// the precision of the value they are derived from.
pub trait Real: Num + Clone + Send + Sync + fmt::Debug + Neg<Output = Self> + 'static {
    /// Exact conversion of an `f64`, stored with at least `bits` of mantissa.
    fn from_f64_prec(x: f64, bits: usize) -> Self;
    /// Nearest `f64`.
    fn to_f64(&self) -> f64;
    /// π at the precision of `self`.
    fn pi_like(&self) -> Self;
    fn exp(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn sqrt(&self) -> Self;
    /// Mantissa bits carried by this value.
    fn bits(&self) -> usize;

    /// Small integer-valued constants (lattice coordinates, signs) are exact
    /// at any precision.
    fn from_i64(n: i64) -> Self {
        Self::from_f64_prec(n as f64, DOUBLE_BITS)
    }
}

impl Real for f64 {
    fn from_f64_prec(x: f64, _bits: usize) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pi_like(&self) -> Self {
        std::f64::consts::PI
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn bits(&self) -> usize {
        DOUBLE_BITS
    }
}

/// `exp(z)` for a complex number over any [`Real`].
pub fn cexp<R: Real>(z: &Complex<R>) -> Complex<R> {
    let modulus = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(modulus.clone() * c, modulus * s)
}

/// Absolute value of a complex number, reported in double precision.
pub fn cabs<R: Real>(z: &Complex<R>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

/// Lift a double-precision complex number into `R` with `bits` of mantissa.
pub fn lift<R: Real>(z: Complex<f64>, bits: usize) -> Complex<R> {
    Complex::new(R::from_f64_prec(z.re, bits), R::from_f64_prec(z.im, bits))
}

/// Round a complex number to double precision.
pub fn to_c64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache allocation"));
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Binary floating-point number with a configurable mantissa length.
///
/// Arithmetic between two values is carried out at the larger of the two
/// precisions.
#[derive(Clone)]
pub struct MpFloat {
    value: BigFloat,
    bits: usize,
}

impl MpFloat {
    pub fn new(x: f64, bits: usize) -> Self {
        let bits = bits.max(MIN_MP_BITS);
        MpFloat { value: BigFloat::from_f64(x, bits), bits }
    }

    fn wrap(value: BigFloat, bits: usize) -> Self {
        MpFloat { value, bits }
    }

    fn join(&self, other: &Self) -> usize {
        self.bits.max(other.bits)
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpFloat({}, {} bits)", self.value, self.bits)
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for MpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! mp_binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl $trait for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                let p = self.join(&rhs);
                MpFloat::wrap(self.value.$op(&rhs.value, p, RM), p)
            }
        }
        impl<'a> $trait<&'a MpFloat> for &'a MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                let p = self.join(rhs);
                MpFloat::wrap(self.value.$op(&rhs.value, p, RM), p)
            }
        }
    };
}

mp_binop!(Add, add, add);
mp_binop!(Sub, sub, sub);
mp_binop!(Mul, mul, mul);
mp_binop!(Div, div, div);

impl Rem for MpFloat {
    type Output = MpFloat;
    fn rem(self, rhs: MpFloat) -> MpFloat {
        let p = self.join(&rhs);
        MpFloat::wrap(self.value.rem(&rhs.value), p)
    }
}

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat::wrap(self.value.neg(), self.bits)
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat::new(0.0, MIN_MP_BITS)
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat::new(1.0, MIN_MP_BITS)
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = &'static str;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err("only radix 10 is supported");
        }
        let x: f64 = s.parse().map_err(|_| "not a decimal number")?;
        Ok(MpFloat::new(x, MIN_MP_BITS))
    }
}

impl Real for MpFloat {
    fn from_f64_prec(x: f64, bits: usize) -> Self {
        MpFloat::new(x, bits)
    }

    fn to_f64(&self) -> f64 {
        if self.value.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, exponent, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        // Mantissa words are little-endian with the leading bit set in the
        // top word; the value is 0.m × 2^exponent.
        let top = *words.last().expect("normalized mantissa has a word");
        let next = if words.len() > 1 { words[words.len() - 2] } else { 0 };
        let mantissa = (top as f64 + next as f64 / 2f64.powi(64)) / 2f64.powi(64);
        // Scale in two steps so subnormal results do not underflow early.
        let half = exponent / 2;
        let magnitude = mantissa * 2f64.powi(half) * 2f64.powi(exponent - half);
        match sign {
            Sign::Neg => -magnitude,
            Sign::Pos => magnitude,
        }
    }

    fn pi_like(&self) -> Self {
        CONSTS.with(|cc| MpFloat::wrap(cc.borrow_mut().pi(self.bits, RM), self.bits))
    }

    fn exp(&self) -> Self {
        CONSTS.with(|cc| MpFloat::wrap(self.value.exp(self.bits, RM, &mut cc.borrow_mut()), self.bits))
    }

    fn sin_cos(&self) -> (Self, Self) {
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            let s = self.value.sin(self.bits, RM, &mut cc);
            let c = self.value.cos(self.bits, RM, &mut cc);
            (MpFloat::wrap(s, self.bits), MpFloat::wrap(c, self.bits))
        })
    }

    fn sqrt(&self) -> Self {
        MpFloat::wrap(self.value.sqrt(self.bits, RM), self.bits)
    }

    fn bits(&self) -> usize {
        self.bits
    }
}
