//! Flow groups, scenarios and their validation.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{BoundError, Result};
use crate::rational::{self, Rational};

/// A homogeneous group: `count` flows sharing one period and packet size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowGroupSpec {
    pub count: u64,
    /// Seconds.
    #[serde(with = "rational")]
    pub period: Rational,
    /// Bits.
    #[serde(with = "rational")]
    pub packet_size: Rational,
}

impl FlowGroupSpec {
    pub fn new(count: u64, period: Rational, packet_size: Rational) -> Self {
        Self { count, period, packet_size }
    }

    pub fn rate(&self) -> Rational {
        Rational::from(num_bigint::BigInt::from(self.count)) * &self.packet_size / &self.period
    }

    /// Deterministic burst of the group, `count * packet_size`.
    pub fn burst(&self) -> Rational {
        Rational::from(num_bigint::BigInt::from(self.count)) * &self.packet_size
    }

    fn check(&self, idx: usize) -> Result<()> {
        if self.count == 0 {
            return Err(BoundError::InvalidSpec(format!("group {idx}: count must be >= 1")));
        }
        if !self.period.is_positive() {
            return Err(BoundError::InvalidSpec(format!("group {idx}: period must be > 0")));
        }
        if !self.packet_size.is_positive() {
            return Err(BoundError::InvalidSpec(format!("group {idx}: packet_size must be > 0")));
        }
        Ok(())
    }
}

/// How packet sizes that are not multiples of the quantum are handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantization {
    /// Every packet size must be an integer number of quanta.
    #[default]
    Strict,
    /// Any quantum is accepted; group bursts are rounded up to the grid.
    Ceil,
}

/// Raw scenario as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub groups: Vec<FlowGroupSpec>,
    /// Bits per grid step; defaults to the gcd of the packet sizes.
    #[serde(default, with = "opt_rational", skip_serializing_if = "Option::is_none")]
    pub quantum: Option<Rational>,
    #[serde(default)]
    pub quantization: Quantization,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => rational::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "rational")] Rational);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl ScenarioSpec {
    pub fn new(groups: Vec<FlowGroupSpec>, quantum: Option<Rational>) -> Self {
        Self { groups, quantum, quantization: Quantization::Strict }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| BoundError::InvalidSpec(e.to_string()))
    }
}

/// A validated scenario with its aggregate token-bucket parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub groups: Vec<FlowGroupSpec>,
    pub quantum: Rational,
    pub quantization: Quantization,
    /// Aggregate rate, bits per second.
    pub total_rate: Rational,
    /// Deterministic aggregate burst, bits.
    pub total_burst: Rational,
}

/// Checks a raw scenario and attaches `total_rate` and `total_burst`.
pub fn validate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    if spec.groups.is_empty() {
        return Err(BoundError::InvalidSpec("scenario has no flow groups".into()));
    }
    for (idx, g) in spec.groups.iter().enumerate() {
        g.check(idx)?;
    }
    let quantum = match &spec.quantum {
        Some(q) if !q.is_positive() => {
            return Err(BoundError::InvalidSpec("quantum must be > 0".into()));
        }
        Some(q) => q.clone(),
        None => {
            let sizes: Vec<Rational> = spec.groups.iter().map(|g| g.packet_size.clone()).collect();
            rational::gcd(&sizes).expect("groups checked non-empty")
        }
    };
    if spec.quantization == Quantization::Strict {
        for (idx, g) in spec.groups.iter().enumerate() {
            if !(&g.packet_size / &quantum).is_integer() {
                return Err(BoundError::InvalidSpec(format!(
                    "group {idx}: packet size {} is not a multiple of quantum {} (use ceil quantization)",
                    rational::format_rational(&g.packet_size),
                    rational::format_rational(&quantum)
                )));
            }
        }
    }
    let total_rate = spec.groups.iter().map(FlowGroupSpec::rate).fold(Rational::zero(), |a, r| a + r);
    let total_burst = spec.groups.iter().map(FlowGroupSpec::burst).fold(Rational::zero(), |a, b| a + b);
    Ok(Scenario { groups: spec.groups.clone(), quantum, quantization: spec.quantization, total_rate, total_burst })
}

impl Scenario {
    pub fn total_flows(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    pub fn max_packet_size(&self) -> Rational {
        self.groups.iter().map(|g| g.packet_size.clone()).max().expect("non-empty")
    }

    /// Least common multiple of the group periods.
    pub fn hyperperiod(&self) -> Rational {
        let periods: Vec<Rational> = self.groups.iter().map(|g| g.period.clone()).collect();
        rational::lcm(&periods).expect("non-empty")
    }

    /// Number of quanta covering the deterministic burst, `ceil(total_burst / quantum)`.
    pub fn grid_len(&self) -> u64 {
        use num_traits::ToPrimitive;
        rational::ceil_int(&(&self.total_burst / &self.quantum)).to_u64().expect("grid fits in u64")
    }

    /// Packet sizes of every flow in decreasing order, for scenarios whose
    /// groups all share one period.
    pub fn same_period_sizes(&self) -> Result<Vec<Rational>> {
        let period = &self.groups[0].period;
        if self.groups.iter().any(|g| &g.period != period) {
            return Err(BoundError::InvalidArg("all groups must share one period".into()));
        }
        let mut sizes: Vec<Rational> =
            self.groups.iter().flat_map(|g| std::iter::repeat_n(g.packet_size.clone(), g.count as usize)).collect();
        sizes.sort_by(|a, b| b.cmp(a));
        Ok(sizes)
    }

    /// Burst in bits at grid index `k`.
    pub fn burst_at(&self, k: u64) -> Rational {
        Rational::from(num_bigint::BigInt::from(k)) * &self.quantum
    }
}
