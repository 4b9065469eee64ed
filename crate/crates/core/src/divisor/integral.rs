use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Integral divisor class as a coordinate vector in a surface's prime basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZDivisor(Vec<i64>);

impl ZDivisor {
    pub fn new(coords: Vec<i64>) -> Self {
        ZDivisor(coords)
    }

    pub fn zero(rank: usize) -> Self {
        ZDivisor(vec![0; rank])
    }

    /// The `k`-th basis vector.
    pub fn unit(rank: usize, k: usize) -> Self {
        let mut v = vec![0; rank];
        v[k] = 1;
        ZDivisor(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        ZDivisor(self.0.iter().map(|c| c * k).collect())
    }

    /// Value of the linear form `normal` on the coordinates.
    pub fn dot(&self, normal: &[i64]) -> i64 {
        self.0.iter().zip(normal).map(|(a, b)| a * b).sum()
    }

    /// Renders as `2*C0 - f` against the given labels; `0` for the zero class.
    pub fn format_with(&self, labels: &[String]) -> String {
        let mut out = String::new();
        for (c, label) in self.0.iter().zip(labels) {
            if *c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if out.is_empty() {
                if *c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if *c < 0 { " - " } else { " + " });
            }
            if mag != 1 {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(label);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for ZDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Add for &ZDivisor {
    type Output = ZDivisor;
    fn add(self, rhs: &ZDivisor) -> ZDivisor {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        ZDivisor(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ZDivisor {
    type Output = ZDivisor;
    fn sub(self, rhs: &ZDivisor) -> ZDivisor {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        ZDivisor(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for ZDivisor {
    type Output = ZDivisor;
    fn add(self, rhs: ZDivisor) -> ZDivisor {
        &self + &rhs
    }
}

impl Sub for ZDivisor {
    type Output = ZDivisor;
    fn sub(self, rhs: ZDivisor) -> ZDivisor {
        &self - &rhs
    }
}

impl Neg for ZDivisor {
    type Output = ZDivisor;
    fn neg(self) -> ZDivisor {
        self.scale(-1)
    }
}

impl Neg for &ZDivisor {
    type Output = ZDivisor;
    fn neg(self) -> ZDivisor {
        self.scale(-1)
    }
}
