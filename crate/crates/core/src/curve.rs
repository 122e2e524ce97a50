//! Tail-bound curves on the discrete burst axis and the CDF lower bounds
//! derived from them.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{BoundError, Result};
use crate::rational::{self, Rational};

/// Numeric type a probability curve can be carried in: `f64` for the
/// closed-form bounds, [`Rational`] when every input is exact.
pub trait Prob:
    Clone + PartialOrd + Debug + Send + Sync + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn to_f64(&self) -> f64;

    fn clamp01(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else if self > Self::one() {
            Self::one()
        } else {
            self
        }
    }
}

impl Prob for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Prob for Rational {
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
}

/// Upper bounds `eps[k] >= P(B > grid[k] * quantum)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBoundCurve<P = f64> {
    pub grid: Vec<u64>,
    pub eps: Vec<P>,
}

impl<P: Prob> TailBoundCurve<P> {
    pub fn new(grid: Vec<u64>, eps: Vec<P>) -> Result<Self> {
        if grid.len() != eps.len() {
            return Err(BoundError::InvalidArg(format!("grid has {} points but eps has {}", grid.len(), eps.len())));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BoundError::InvalidArg("grid must be strictly ascending".into()));
        }
        Ok(Self { grid, eps })
    }

    /// Curve on the contiguous grid `0..eps.len()`.
    pub fn contiguous(eps: Vec<P>) -> Self {
        Self { grid: (0..eps.len() as u64).collect(), eps }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn is_contiguous(&self) -> bool {
        self.grid.iter().enumerate().all(|(i, &g)| g == i as u64)
    }

    /// Value at grid index `k`, carrying the last value past the end.
    pub fn value_at(&self, k: u64) -> P {
        match self.grid.binary_search(&k) {
            Ok(i) => self.eps[i].clone(),
            Err(0) => P::one(),
            Err(i) => self.eps[i - 1].clone(),
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.eps.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn to_f64(&self) -> TailBoundCurve<f64> {
        TailBoundCurve { grid: self.grid.clone(), eps: self.eps.iter().map(Prob::to_f64).collect() }
    }
}

/// Clamps to `[0, 1]` and takes the running minimum from left to right.
pub fn monotone_envelope<P: Prob>(curve: &TailBoundCurve<P>) -> TailBoundCurve<P> {
    let mut eps = Vec::with_capacity(curve.eps.len());
    let mut running = P::one();
    for e in &curve.eps {
        let e = e.clone().clamp01();
        if e < running {
            running = e;
        }
        eps.push(running.clone());
    }
    TailBoundCurve { grid: curve.grid.clone(), eps }
}

/// Lower bound on the CDF of an integer burst: `psi_cum[b] = 1 - eps(b)` and
/// its increments `psi_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfLowerBound<P = f64> {
    pub psi_mass: Vec<P>,
    pub psi_cum: Vec<P>,
}

impl<P: Prob> CdfLowerBound<P> {
    /// Builds the CDF bound of a monotone curve on the contiguous grid `0..=b_max`.
    pub fn from_tail(curve: &TailBoundCurve<P>) -> Result<Self> {
        if !curve.is_contiguous() {
            return Err(BoundError::InvalidArg("CDF bound needs a contiguous grid starting at 0".into()));
        }
        if !curve.is_monotone() {
            return Err(BoundError::InvalidArg("CDF bound needs a wide-sense decreasing curve".into()));
        }
        let psi_cum: Vec<P> = curve.eps.iter().map(|e| P::one() - e.clone()).collect();
        let mut psi_mass = Vec::with_capacity(psi_cum.len());
        for (b, e) in curve.eps.iter().enumerate() {
            if b == 0 {
                psi_mass.push(psi_cum[0].clone());
            } else {
                psi_mass.push(curve.eps[b - 1].clone() - e.clone());
            }
        }
        Ok(Self { psi_mass, psi_cum })
    }

    pub fn len(&self) -> usize {
        self.psi_cum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi_cum.is_empty()
    }

    pub fn tail(&self) -> TailBoundCurve<P> {
        TailBoundCurve::contiguous(self.psi_cum.iter().map(|c| (P::one() - c.clone()).clamp01()).collect())
    }
}

/// Probability rounded to 12 significant digits, in shortest exponent form
/// (`5e-1`, `1.36872473247e-1`, `0e0`).
pub fn format_prob(p: f64) -> String {
    let rounded: f64 = format!("{p:.11e}").parse().expect("formatted float parses");
    format!("{rounded:e}")
}
