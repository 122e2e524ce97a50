//! Exact evaluation of the order-statistic no-crossing probability
//!
//! ```text
//! p = (n-1)! * int_{u_{n-1}}^{1} int_{u_{n-2}}^{y_{n-1}} ... int_{u_1}^{y_2} 1 dy_1 ... dy_{n-1}
//! ```
//!
//! by integrating from the innermost variable outwards. Stage `m` holds the
//! polynomial `P_m(y) = m * int_{u_m}^{y} P_{m-1}(x) dx` with `P_0 = 1`, so the
//! factorial is absorbed one factor per stage and the leading coefficient stays
//! exactly one. All arithmetic is exact.
//!
//! [`PolynomialCoeffs::integrate_from`] runs the recurrence directly on
//! rational coefficients. Its denominators grow like `D^m` for thresholds with
//! common denominator `D`, so [`no_crossing_probability`] runs the same
//! recurrence in the rescaled variable `t = D y`, where the stage polynomial
//! `R_m(t) = D^m P_m(t / D)` has integer coefficients:
//! `r_i = m r'_{i-1} / i` (an exact division) and `r_0 = -sum_i r_i a_m^i`
//! with `a_m = D u_m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use num_traits::{One, Zero};

use super::thresholds::OrderStatThresholds;
use crate::rational::Rational;

/// Coefficients `q[j]` of `y^j` in the stage-`m` polynomial (`q.len() == m + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialCoeffs {
    pub q: Vec<Rational>,
}

impl PolynomialCoeffs {
    /// `y^m`: the stage polynomial while all thresholds so far are zero.
    pub fn monomial(m: usize) -> Self {
        let mut q = vec![Rational::zero(); m + 1];
        q[m] = Rational::one();
        Self { q }
    }

    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }

    pub fn leading(&self) -> &Rational {
        self.q.last().expect("non-empty")
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        self.q.iter().rev().fold(Rational::zero(), |acc, c| acc * y + c)
    }

    /// Value at `y = 1`.
    pub fn sum(&self) -> Rational {
        self.q.iter().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// Next stage: `m * int_{u}^{y} self(x) dx` where `m = degree + 1`.
    pub fn integrate_from(&self, lower: &Rational) -> Self {
        let m = self.q.len();
        let m_r = Rational::from_integer(m.into());
        let mut q = Vec::with_capacity(m + 1);
        q.push(Rational::zero());
        for (j, c) in self.q.iter().enumerate() {
            q.push(&m_r * c / Rational::from_integer((j + 1).into()));
        }
        // Constant term makes the polynomial vanish at the lower limit.
        let at_lower = q.iter().skip(1).rev().fold(Rational::zero(), |acc, c| acc * lower + c) * lower;
        q[0] = -at_lower;
        Self { q }
    }
}

/// Runs every stage on rational coefficients, handing each intermediate
/// polynomial to `observe`.
pub fn integrate_stages(
    thresholds: &OrderStatThresholds,
    mut observe: impl FnMut(usize, &PolynomialCoeffs),
) -> PolynomialCoeffs {
    let last = thresholds.flows() - 1;
    let start = thresholds.zero_prefix();
    let mut poly = PolynomialCoeffs::monomial(start);
    observe(start, &poly);
    for m in start + 1..=last {
        poly = poly.integrate_from(thresholds.get(m));
        observe(m, &poly);
    }
    poly
}

/// Stage polynomial in the rescaled variable `t = D y`, integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledStage {
    pub scale: BigInt,
    pub r: Vec<BigInt>,
}

impl ScaledStage {
    /// Rational coefficients in the original variable: `q_j = r_j / D^(m-j)`.
    pub fn to_coeffs(&self) -> PolynomialCoeffs {
        let m = self.r.len() - 1;
        let q = self
            .r
            .iter()
            .enumerate()
            .map(|(j, c)| Rational::new(c.clone(), num_traits::pow(self.scale.clone(), m - j)))
            .collect();
        PolynomialCoeffs { q }
    }
}

/// Integer form of [`integrate_stages`]; `observe` sees each rescaled stage.
pub fn integrate_scaled(thresholds: &OrderStatThresholds, mut observe: impl FnMut(usize, &ScaledStage)) -> ScaledStage {
    let scale = thresholds.values().iter().fold(BigInt::one(), |acc, u| acc.lcm(u.denom()));
    let last = thresholds.flows() - 1;
    let start = thresholds.zero_prefix();
    let mut r = vec![BigInt::zero(); start + 1];
    r[start] = BigInt::one();
    let mut stage = ScaledStage { scale, r };
    observe(start, &stage);
    for m in start + 1..=last {
        let u = thresholds.get(m);
        let lower = u.numer() * (&stage.scale / u.denom());
        // In place, highest degree first: r_{j+1} <- m r_j / (j + 1).
        stage.r.push(BigInt::zero());
        for j in (0..m).rev() {
            let mut c = std::mem::take(&mut stage.r[j]);
            c *= m as u64;
            debug_assert!((&c % (j as u64 + 1)).is_zero());
            c /= j as u64 + 1;
            stage.r[j + 1] = c;
        }
        let mut at_lower = BigInt::zero();
        match lower.to_u64() {
            Some(t) => {
                for c in stage.r[1..].iter().rev() {
                    at_lower *= t;
                    at_lower += c;
                }
                at_lower *= t;
            }
            None => {
                for c in stage.r[1..].iter().rev() {
                    at_lower *= &lower;
                    at_lower += c;
                }
                at_lower *= &lower;
            }
        }
        stage.r[0] = -at_lower;
        observe(m, &stage);
    }
    stage
}

/// `P(U_(k) >= u_k for every k)` for the order statistics of `n - 1` iid
/// uniforms on `[0, 1]`, exactly.
pub fn no_crossing_probability(thresholds: &OrderStatThresholds) -> Rational {
    let stage = integrate_scaled(thresholds, |_, _| {});
    let m = stage.r.len() - 1;
    let value = stage.r.iter().rev().fold(BigInt::zero(), |acc, c| acc * &stage.scale + c);
    Rational::new(value, num_traits::pow(stage.scale, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn two_flows() {
        // p = 1 - u_1
        let t = OrderStatThresholds::new(vec![ratio(1, 4)]).unwrap();
        assert_eq!(no_crossing_probability(&t), ratio(3, 4));
    }

    #[test]
    fn three_flows_hand_integration() {
        // p = (1 - u_2^2) - 2 u_1 (1 - u_2)
        let (u1, u2) = (ratio(1, 5), ratio(1, 3));
        let t = OrderStatThresholds::new(vec![u1.clone(), u2.clone()]).unwrap();
        let expected = (int(1) - &u2 * &u2) - int(2) * &u1 * (int(1) - &u2);
        assert_eq!(no_crossing_probability(&t), expected);
    }

    #[test]
    fn zero_thresholds_give_certainty() {
        let t = OrderStatThresholds::new(vec![int(0); 7]).unwrap();
        assert_eq!(no_crossing_probability(&t), int(1));
    }

    #[test]
    fn leading_coefficient_is_one_at_every_stage() {
        let u: Vec<Rational> = (1..12).map(|k| ratio(k, 13)).collect();
        let t = OrderStatThresholds::new(u).unwrap();
        let mut stages = 0;
        integrate_stages(&t, |m, poly| {
            assert_eq!(poly.degree(), m);
            assert_eq!(poly.leading(), &int(1));
            stages += 1;
        });
        assert_eq!(stages, 12);
    }

    #[test]
    fn scaled_engine_matches_rational_recurrence() {
        let cases: Vec<Vec<Rational>> = vec![
            vec![ratio(1, 4)],
            vec![int(0), int(0), ratio(1, 9), ratio(4, 9), ratio(7, 9)],
            vec![ratio(1, 12), ratio(1, 6), ratio(1, 6), ratio(2, 5), ratio(3, 4)],
            (1..15).map(|k| ratio(k, 17)).collect(),
        ];
        for u in cases {
            let t = OrderStatThresholds::new(u).unwrap();
            let mut rational_stages = Vec::new();
            let direct = integrate_stages(&t, |_, p| rational_stages.push(p.clone()));
            let mut k = 0;
            integrate_scaled(&t, |m, s| {
                assert_eq!(s.r[m], BigInt::one());
                assert_eq!(s.to_coeffs(), rational_stages[k]);
                k += 1;
            });
            assert_eq!(no_crossing_probability(&t), direct.sum());
        }
    }

    #[test]
    fn each_stage_vanishes_at_its_lower_limit() {
        let u: Vec<Rational> = vec![ratio(1, 10), ratio(1, 7), ratio(2, 7), ratio(1, 2)];
        let t = OrderStatThresholds::new(u.clone()).unwrap();
        integrate_stages(&t, |m, poly| {
            if m > 0 {
                assert!(poly.eval(&u[m - 1]).is_zero());
            }
        });
    }
}
