use std::cmp::Ordering;
use std::ops::{Div, Mul};

use serde::Serialize;

/// A real number stored as `sign * exp(log_mag)`.
///
/// Zero is represented by `sign == 0`; its `log_mag` is `-inf` and carries no
/// information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLogValue {
    sign: i8,
    log_mag: f64,
}

impl SignedLogValue {
    pub const ZERO: Self = Self {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: Self = Self {
        sign: 1,
        log_mag: 0.0,
    };

    pub fn new(sign: i8, log_mag: f64) -> Self {
        match sign.cmp(&0) {
            Ordering::Equal => Self::ZERO,
            Ordering::Greater => Self { sign: 1, log_mag },
            Ordering::Less => Self { sign: -1, log_mag },
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_mag.exp()
        }
    }
}

impl Mul for SignedLogValue {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.sign * rhs.sign, self.log_mag + rhs.log_mag)
    }
}

impl Div for SignedLogValue {
    type Output = Self;

    /// Division by zero yields a value with infinite magnitude.
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        if rhs.is_zero() {
            return Self::new(self.sign, f64::INFINITY);
        }
        Self::new(self.sign * rhs.sign, self.log_mag - rhs.log_mag)
    }
}

/// Generalized binomial coefficient `prod_{l=1..k} (t - l + 1) / k!` in
/// signed-log form. Total for every real `t`.
pub fn signed_log_gen_binom(t: f64, k: u64) -> SignedLogValue {
    let mut sign: i8 = 1;
    let mut log_mag = 0.0;
    for l in 1..=k {
        let factor = (t - l as f64 + 1.0) / l as f64;
        if factor == 0.0 {
            return SignedLogValue::ZERO;
        }
        if factor < 0.0 {
            sign = -sign;
        }
        log_mag += factor.abs().ln();
    }
    SignedLogValue::new(sign, log_mag)
}
