//! Uplink and downlink load factors.
//!
//! A user of class `j` adds
//!
//! ```text
//! downlink:  R_j v_j γ_j / W · ((1 - α) + i)
//! uplink:    (1 + i) / (1 + W / (γ_j R_j v_j))
//! ```
//!
//! to the cell load, with `γ_j` the linear Eb/N0 target. Cell load is the
//! left-to-right sum of per-user contributions in admission order.

use alloc::string::String;
use core::iter::Sum;
use core::ops::{Add, AddAssign};

use crate::coding::EbN0Target;
use crate::{Error, Result};

fn check(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}

/// Cell-wide physical constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    chip_rate_w: f64,
    interference_i: f64,
    orthogonality_alpha: f64,
    uplink_interference: Option<f64>,
}

impl RadioParams {
    pub fn new(chip_rate_w: f64, interference_i: f64, orthogonality_alpha: f64) -> Result<Self> {
        check("chip rate", chip_rate_w, chip_rate_w > 0.0, "> 0")?;
        check(
            "interference ratio",
            interference_i,
            interference_i >= 0.0,
            ">= 0",
        )?;
        check(
            "orthogonality factor",
            orthogonality_alpha,
            (0.0..=1.0).contains(&orthogonality_alpha),
            "a value in [0, 1]",
        )?;
        Ok(Self {
            chip_rate_w,
            interference_i,
            orthogonality_alpha,
            uplink_interference: None,
        })
    }

    /// Uses a separate interference ratio for the uplink formula.
    pub fn with_uplink_interference(mut self, i_ul: f64) -> Result<Self> {
        check("uplink interference ratio", i_ul, i_ul >= 0.0, ">= 0")?;
        self.uplink_interference = Some(i_ul);
        Ok(self)
    }

    pub fn chip_rate_w(&self) -> f64 {
        self.chip_rate_w
    }

    pub fn interference_i(&self) -> f64 {
        self.interference_i
    }

    pub fn orthogonality_alpha(&self) -> f64 {
        self.orthogonality_alpha
    }

    /// Interference ratio used by the uplink formula.
    pub fn uplink_interference(&self) -> f64 {
        self.uplink_interference.unwrap_or(self.interference_i)
    }
}

/// One traffic type.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceClass {
    name: String,
    bit_rate_r: f64,
    activity_v: f64,
    ber_target: f64,
    ebn0: EbN0Target,
}

impl ServiceClass {
    pub fn new(
        name: impl Into<String>,
        bit_rate_r: f64,
        activity_v: f64,
        ber_target: f64,
        ebn0: EbN0Target,
    ) -> Result<Self> {
        check("bit rate", bit_rate_r, bit_rate_r > 0.0, "> 0")?;
        check(
            "activity factor",
            activity_v,
            activity_v > 0.0 && activity_v <= 1.0,
            "a value in (0, 1]",
        )?;
        check(
            "BER target",
            ber_target,
            ber_target > 0.0 && ber_target < 0.5,
            "a value in (0, 0.5)",
        )?;
        Ok(Self {
            name: name.into(),
            bit_rate_r,
            activity_v,
            ber_target,
            ebn0,
        })
    }

    pub fn with_ebn0(mut self, ebn0: EbN0Target) -> Self {
        self.ebn0 = ebn0;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bit_rate_r(&self) -> f64 {
        self.bit_rate_r
    }

    pub fn activity_v(&self) -> f64 {
        self.activity_v
    }

    pub fn ber_target(&self) -> f64 {
        self.ber_target
    }

    pub fn ebn0(&self) -> EbN0Target {
        self.ebn0
    }
}

/// Fraction of the cell's air-interface capacity in use. Never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct LoadFactor(f64);

impl LoadFactor {
    pub const ZERO: LoadFactor = LoadFactor(0.0);

    pub fn new(value: f64) -> Result<Self> {
        check("load factor", value, value >= 0.0, ">= 0")?;
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `self - other`, floored at zero.
    pub fn saturating_sub(self, other: LoadFactor) -> LoadFactor {
        LoadFactor((self.0 - other.0).max(0.0))
    }
}

impl Add for LoadFactor {
    type Output = LoadFactor;

    fn add(self, rhs: LoadFactor) -> LoadFactor {
        LoadFactor(self.0 + rhs.0)
    }
}

impl AddAssign for LoadFactor {
    fn add_assign(&mut self, rhs: LoadFactor) {
        self.0 += rhs.0;
    }
}

impl Sum for LoadFactor {
    fn sum<I: Iterator<Item = LoadFactor>>(iter: I) -> Self {
        iter.fold(LoadFactor::ZERO, |acc, l| acc + l)
    }
}

impl<'a> Sum<&'a LoadFactor> for LoadFactor {
    fn sum<I: Iterator<Item = &'a LoadFactor>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

/// Load added by one downlink user.
pub fn dl_user_load(svc: &ServiceClass, radio: &RadioParams) -> LoadFactor {
    let gamma = svc.ebn0.linear();
    let leak = (1.0 - radio.orthogonality_alpha) + radio.interference_i;
    LoadFactor(svc.bit_rate_r * svc.activity_v * gamma / radio.chip_rate_w * leak)
}

/// Load added by one uplink user.
pub fn ul_user_load(svc: &ServiceClass, radio: &RadioParams) -> LoadFactor {
    let gamma = svc.ebn0.linear();
    let i = radio.uplink_interference();
    LoadFactor((1.0 + i) / (1.0 + radio.chip_rate_w / (gamma * svc.bit_rate_r * svc.activity_v)))
}

/// Sequential left-to-right sum; an empty list is zero load.
pub fn aggregate_load(per_user_loads: &[LoadFactor]) -> LoadFactor {
    per_user_loads.iter().sum()
}

/// Link direction whose load formula drives admission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Downlink,
    Uplink,
}

impl Direction {
    pub fn user_load(self, svc: &ServiceClass, radio: &RadioParams) -> LoadFactor {
        match self {
            Direction::Downlink => dl_user_load(svc, radio),
            Direction::Uplink => ul_user_load(svc, radio),
        }
    }
}

/// How the threshold is compared when a user arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryRule {
    /// Admit iff `old + ΔL <= threshold`.
    #[default]
    StrictNewLoad,
    /// Admit iff `old < threshold`; the last admitted user may overshoot.
    AdmitIfOldBelow,
}

impl BoundaryRule {
    /// Whether a user adding `delta` to `load` passes against `limit`.
    pub fn admits(self, load: LoadFactor, delta: LoadFactor, limit: LoadFactor) -> bool {
        match self {
            BoundaryRule::StrictNewLoad => load.0 + delta.0 <= limit.0,
            BoundaryRule::AdmitIfOldBelow => load.0 < limit.0,
        }
    }
}

/// Number of identical downlink users a cell holds at `threshold`.
///
/// `StrictNewLoad` gives the largest `N` with `N·ΔL <= threshold`;
/// `AdmitIfOldBelow` the largest `N` with `(N - 1)·ΔL < threshold`. A class
/// that loads nothing is unbounded and reports `u64::MAX`.
pub fn max_users_at_threshold(
    svc: &ServiceClass,
    radio: &RadioParams,
    threshold: LoadFactor,
    rule: BoundaryRule,
) -> u64 {
    capacity_for_delta(dl_user_load(svc, radio), threshold, rule)
}

pub(crate) fn capacity_for_delta(
    delta: LoadFactor,
    threshold: LoadFactor,
    rule: BoundaryRule,
) -> u64 {
    let (d, t) = (delta.0, threshold.0);
    if d <= 0.0 {
        return u64::MAX;
    }
    // largest n with n·d <= t, exact on the f64 products
    let mut n = libm::floor(t / d) as u64;
    while (n + 1) as f64 * d <= t {
        n += 1;
    }
    while n > 0 && n as f64 * d > t {
        n -= 1;
    }
    match rule {
        BoundaryRule::StrictNewLoad => n,
        BoundaryRule::AdmitIfOldBelow => {
            // largest m with (m - 1)·d < t
            if n as f64 * d < t {
                n + 1
            } else {
                n
            }
        }
    }
}
