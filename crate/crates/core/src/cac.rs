//! Admission decisions and cell-state bookkeeping.
//!
//! Three policies are supported:
//!
//! - [`PolicyKind::SingleThreshold`]: one budget for the whole cell.
//! - [`PolicyKind::Partitioned`]: each class owns a slice of the budget and is
//!   refused once its slice is full, even if other slices are idle. The total
//!   budget is enforced as well.
//! - [`PolicyKind::UtilityShared`]: like `Partitioned`, but a class refused by
//!   its own slice may still take idle capacity as long as the cell total stays
//!   within budget. Overflow users are booked against their own class.
//!
//! Checks run partition first, then total. The order only shows up in
//! [`Reason`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::load::{BoundaryRule, Direction, LoadFactor, RadioParams, ServiceClass};
use crate::{Error, Result};

/// Slack allowed when checking that partitions fit in the total budget, so
/// that e.g. `0.56 + 0.14` is accepted against `0.7`.
const PARTITION_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    SingleThreshold,
    Partitioned,
    UtilityShared,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::SingleThreshold => "single-threshold",
            PolicyKind::Partitioned => "partitioned",
            PolicyKind::UtilityShared => "utility-shared",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionPolicy {
    kind: PolicyKind,
    total_threshold: LoadFactor,
    partitions: BTreeMap<String, LoadFactor>,
    direction: Direction,
}

impl AdmissionPolicy {
    pub fn single_threshold(total_threshold: f64) -> Result<Self> {
        Self::new(PolicyKind::SingleThreshold, total_threshold, [])
    }

    pub fn partitioned<'a>(
        total_threshold: f64,
        partitions: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        Self::new(PolicyKind::Partitioned, total_threshold, partitions)
    }

    pub fn utility_shared<'a>(
        total_threshold: f64,
        partitions: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        Self::new(PolicyKind::UtilityShared, total_threshold, partitions)
    }

    /// Partitions are ignored for `SingleThreshold`.
    pub fn new<'a>(
        kind: PolicyKind,
        total_threshold: f64,
        partitions: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        if !(total_threshold > 0.0 && total_threshold <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "total threshold",
                value: total_threshold,
                expected: "a value in (0, 1]",
            });
        }
        let mut map = BTreeMap::new();
        if kind != PolicyKind::SingleThreshold {
            let mut sum = 0.0;
            for (name, share) in partitions {
                if !(share > 0.0 && share.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "partition threshold",
                        value: share,
                        expected: "a finite value > 0",
                    });
                }
                if map
                    .insert(name.to_string(), LoadFactor::new(share)?)
                    .is_some()
                {
                    return Err(Error::DuplicateClass(name.to_string()));
                }
                sum += share;
            }
            if sum > total_threshold + PARTITION_SUM_TOL {
                return Err(Error::InvalidPartitions {
                    sum,
                    total: total_threshold,
                });
            }
        }
        Ok(Self {
            kind,
            total_threshold: LoadFactor::new(total_threshold)?,
            partitions: map,
            direction: Direction::Downlink,
        })
    }

    /// Runs the policy on uplink loads instead of downlink loads.
    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// Same thresholds under a different policy kind.
    pub fn with_kind(mut self, kind: PolicyKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn total_threshold(&self) -> LoadFactor {
        self.total_threshold
    }

    pub fn partitions(&self) -> &BTreeMap<String, LoadFactor> {
        &self.partitions
    }

    pub fn partition(&self, class: &str) -> Option<LoadFactor> {
        self.partitions.get(class).copied()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
}

/// Per-class bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassTally {
    pub load: LoadFactor,
    pub admitted: u64,
    pub blocked: u64,
}

/// Running loads and admission tallies of one cell.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellState {
    classes: BTreeMap<String, ClassTally>,
    total_load: LoadFactor,
}

impl CellState {
    pub fn new() -> Self {
        Self::default()
    }

    /// A state with zeroed entries for the given classes.
    pub fn with_classes<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            classes: names
                .into_iter()
                .map(|n| (n.to_string(), ClassTally::default()))
                .collect(),
            total_load: LoadFactor::ZERO,
        }
    }

    pub fn total_load(&self) -> LoadFactor {
        self.total_load
    }

    pub fn class_load(&self, class: &str) -> LoadFactor {
        self.classes.get(class).map(|t| t.load).unwrap_or_default()
    }

    pub fn admitted(&self, class: &str) -> u64 {
        self.classes.get(class).map(|t| t.admitted).unwrap_or(0)
    }

    pub fn blocked(&self, class: &str) -> u64 {
        self.classes.get(class).map(|t| t.blocked).unwrap_or(0)
    }

    pub fn total_admitted(&self) -> u64 {
        self.classes.values().map(|t| t.admitted).sum()
    }

    pub fn total_blocked(&self) -> u64 {
        self.classes.values().map(|t| t.blocked).sum()
    }

    pub fn classes(&self) -> impl Iterator<Item = (&str, &ClassTally)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Records `decision` for a user of `svc`, in place.
    pub fn apply_mut(&mut self, svc: &ServiceClass, decision: &AdmissionDecision) {
        let tally = self.classes.entry(svc.name().to_string()).or_default();
        if decision.admitted {
            tally.load += decision.load_delta;
            tally.admitted += 1;
            self.total_load += decision.load_delta;
        } else {
            tally.blocked += 1;
        }
    }

    /// Records `decision` and returns the updated state.
    pub fn apply(&self, svc: &ServiceClass, decision: &AdmissionDecision) -> CellState {
        let mut next = self.clone();
        next.apply_mut(svc, decision);
        next
    }

    /// Removes one admitted downlink user of `svc`.
    pub fn release(&self, svc: &ServiceClass, radio: &RadioParams) -> Result<CellState> {
        self.release_in(svc, radio, Direction::Downlink)
    }

    /// Removes one admitted user of `svc`, with its load taken from `direction`.
    pub fn release_in(
        &self,
        svc: &ServiceClass,
        radio: &RadioParams,
        direction: Direction,
    ) -> Result<CellState> {
        let mut next = self.clone();
        let tally = match next.classes.get_mut(svc.name()) {
            Some(t) if t.admitted > 0 => t,
            _ => return Err(Error::NothingToRelease(svc.name().to_string())),
        };
        tally.admitted -= 1;
        tally.load = if tally.admitted == 0 {
            LoadFactor::ZERO
        } else {
            tally.load.saturating_sub(direction.user_load(svc, radio))
        };
        next.total_load = next.classes.values().map(|t| t.load).sum();
        Ok(next)
    }
}

/// Why a decision came out the way it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    /// Fits within the class partition (or the single threshold).
    OkPartition,
    /// Refused by the class partition but admitted on idle shared capacity.
    OkOverflow,
    /// Refused by the class partition.
    RejectPartition,
    /// Refused by the cell total.
    RejectTotal,
}

impl Reason {
    pub fn is_admit(self) -> bool {
        matches!(self, Reason::OkPartition | Reason::OkOverflow)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissionDecision {
    pub admitted: bool,
    pub reason: Reason,
    pub load_delta: LoadFactor,
}

impl AdmissionDecision {
    fn new(reason: Reason, load_delta: LoadFactor) -> Self {
        Self {
            admitted: reason.is_admit(),
            reason,
            load_delta,
        }
    }
}

/// Decides whether a new user of `svc` may enter a cell in `state`.
pub fn decide(
    state: &CellState,
    svc: &ServiceClass,
    radio: &RadioParams,
    policy: &AdmissionPolicy,
    rule: BoundaryRule,
) -> Result<AdmissionDecision> {
    let delta = policy.direction.user_load(svc, radio);
    let total_ok = rule.admits(state.total_load, delta, policy.total_threshold);
    let reason = match policy.kind {
        PolicyKind::SingleThreshold => {
            if total_ok {
                Reason::OkPartition
            } else {
                Reason::RejectTotal
            }
        }
        PolicyKind::Partitioned | PolicyKind::UtilityShared => {
            let share = policy
                .partition(svc.name())
                .ok_or_else(|| Error::UnknownClass(svc.name().to_string()))?;
            let class_ok = rule.admits(state.class_load(svc.name()), delta, share);
            match (class_ok, total_ok, policy.kind) {
                (true, true, _) => Reason::OkPartition,
                (false, true, PolicyKind::UtilityShared) => Reason::OkOverflow,
                (false, _, PolicyKind::Partitioned) => Reason::RejectPartition,
                _ => Reason::RejectTotal,
            }
        }
    };
    Ok(AdmissionDecision::new(reason, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::EbN0Target;
    use crate::load::dl_user_load as load_delta;

    fn radio() -> RadioParams {
        RadioParams::new(3.84e6, 0.55, 0.9).unwrap()
    }

    fn voice() -> ServiceClass {
        ServiceClass::new("voice", 12_200.0, 0.67, 1e-3, EbN0Target::new(6.7).unwrap()).unwrap()
    }

    fn video() -> ServiceClass {
        ServiceClass::new("video", 64_000.0, 1.0, 1e-5, EbN0Target::new(9.6).unwrap()).unwrap()
    }

    fn parts() -> [(&'static str, f64); 2] {
        [("voice", 0.56), ("video", 0.14)]
    }

    fn admit(state: &mut CellState, svc: &ServiceClass) {
        let d = AdmissionDecision::new(Reason::OkPartition, load_delta(svc, &radio()));
        state.apply_mut(svc, &d);
    }

    #[test]
    fn empty_cell_admits() {
        let p = AdmissionPolicy::partitioned(0.7, parts()).unwrap();
        let d = decide(
            &CellState::new(),
            &voice(),
            &radio(),
            &p,
            BoundaryRule::StrictNewLoad,
        )
        .unwrap();
        assert!(d.admitted);
        assert_eq!(d.reason, Reason::OkPartition);
        assert!((d.load_delta.value() - 0.0064718).abs() < 1e-6);
    }

    fn full_video_state() -> CellState {
        let mut s = CellState::new();
        let d = AdmissionDecision::new(Reason::OkPartition, LoadFactor::new(0.14).unwrap());
        s.apply_mut(&video(), &d);
        s
    }

    #[test]
    fn full_partition_rejects_or_overflows() {
        let s = full_video_state();
        let fixed = AdmissionPolicy::partitioned(0.7, parts()).unwrap();
        let d = decide(&s, &video(), &radio(), &fixed, BoundaryRule::StrictNewLoad).unwrap();
        assert!(!d.admitted);
        assert_eq!(d.reason, Reason::RejectPartition);

        let shared = AdmissionPolicy::utility_shared(0.7, parts()).unwrap();
        let d = decide(&s, &video(), &radio(), &shared, BoundaryRule::StrictNewLoad).unwrap();
        assert!(d.admitted);
        assert_eq!(d.reason, Reason::OkOverflow);
    }

    #[test]
    fn total_rejections() {
        let mut s = CellState::new();
        for _ in 0..7 {
            admit(&mut s, &video());
        }
        let single = AdmissionPolicy::single_threshold(0.7).unwrap();
        let d = decide(&s, &video(), &radio(), &single, BoundaryRule::StrictNewLoad).unwrap();
        assert_eq!(d.reason, Reason::RejectTotal);
        let d = decide(
            &s,
            &video(),
            &radio(),
            &single,
            BoundaryRule::AdmitIfOldBelow,
        )
        .unwrap();
        assert_eq!(d.reason, Reason::OkPartition);
        let shared = AdmissionPolicy::utility_shared(0.7, parts()).unwrap();
        let d = decide(&s, &video(), &radio(), &shared, BoundaryRule::StrictNewLoad).unwrap();
        assert_eq!(d.reason, Reason::RejectTotal);
    }

    #[test]
    fn unknown_class() {
        let other =
            ServiceClass::new("data", 1e5, 1.0, 1e-5, EbN0Target::new(3.0).unwrap()).unwrap();
        let p = AdmissionPolicy::partitioned(0.7, parts()).unwrap();
        let e = decide(
            &CellState::new(),
            &other,
            &radio(),
            &p,
            BoundaryRule::StrictNewLoad,
        );
        assert_eq!(e, Err(Error::UnknownClass("data".into())));
        let single = AdmissionPolicy::single_threshold(0.7).unwrap();
        assert!(decide(
            &CellState::new(),
            &other,
            &radio(),
            &single,
            BoundaryRule::StrictNewLoad
        )
        .is_ok());
    }

    #[test]
    fn decide_is_pure() {
        let s = full_video_state();
        let before = s.clone();
        let p = AdmissionPolicy::utility_shared(0.7, parts()).unwrap();
        let a = decide(&s, &video(), &radio(), &p, BoundaryRule::StrictNewLoad).unwrap();
        let b = decide(&s, &video(), &radio(), &p, BoundaryRule::StrictNewLoad).unwrap();
        assert_eq!(a, b);
        assert_eq!(s, before);
    }

    #[test]
    fn apply_examples() {
        let s = CellState::new();
        let d = AdmissionDecision::new(Reason::OkPartition, load_delta(&voice(), &radio()));
        let next = s.apply(&voice(), &d);
        assert_eq!(next.total_load(), d.load_delta);
        assert_eq!(next.admitted("voice"), 1);
        assert_eq!(s, CellState::new());

        let rej = AdmissionDecision::new(Reason::RejectTotal, d.load_delta);
        let after = next.apply(&voice(), &rej);
        assert_eq!(after.total_load(), next.total_load());
        assert_eq!(after.blocked("voice"), 1);

        let block_voice = voice().with_ebn0(EbN0Target::new(5.7).unwrap());
        let d = AdmissionDecision::new(Reason::OkPartition, load_delta(&block_voice, &radio()));
        let mut s = CellState::new();
        for _ in 0..150 {
            s = s.apply(&block_voice, &d);
        }
        assert!((s.total_load().value() - 0.7711).abs() < 5e-4);
    }

    #[test]
    fn release_examples() {
        let base = full_video_state();
        let d = AdmissionDecision::new(Reason::OkPartition, load_delta(&voice(), &radio()));
        let round = base
            .apply(&voice(), &d)
            .release(&voice(), &radio())
            .unwrap();
        assert!((round.total_load().value() - base.total_load().value()).abs() < 1e-12);
        assert!((round.class_load("video").value() - 0.14).abs() < 1e-12);
        assert_eq!(round.class_load("voice"), LoadFactor::ZERO);

        assert_eq!(
            CellState::new().release(&voice(), &radio()),
            Err(Error::NothingToRelease("voice".into()))
        );

        let mut s = CellState::new();
        for _ in 0..3 {
            s = s.apply(&voice(), &d);
        }
        let s = s.release(&voice(), &radio()).unwrap();
        assert_eq!(s.admitted("voice"), 2);
        assert!((s.total_load().value() - 2.0 * d.load_delta.value()).abs() < 1e-12);
    }

    #[test]
    fn policy_validation() {
        assert!(AdmissionPolicy::single_threshold(0.0).is_err());
        assert!(AdmissionPolicy::single_threshold(1.2).is_err());
        assert!(AdmissionPolicy::partitioned(0.7, [("voice", 0.6), ("video", 0.2)]).is_err());
        assert!(AdmissionPolicy::partitioned(0.7, [("voice", 0.0)]).is_err());
        assert!(AdmissionPolicy::partitioned(0.7, [("voice", 0.3), ("voice", 0.3)]).is_err());
        assert!(AdmissionPolicy::utility_shared(0.7, parts()).is_ok());
    }

    /// Overflow admissions can consume budget a partition would have kept
    /// for another class, so the shared policy does not block less than the
    /// fixed one on every sequence.
    #[test]
    fn overflow_can_crowd_out_later_in_partition_users() {
        let fixed = AdmissionPolicy::partitioned(0.7, parts()).unwrap();
        let shared = AdmissionPolicy::utility_shared(0.7, parts()).unwrap();
        let run = |p: &AdmissionPolicy| {
            let mut s = CellState::new();
            let arrivals =
                core::iter::repeat_n(video(), 7).chain(core::iter::repeat_n(voice(), 20));
            for svc in arrivals {
                let d = decide(&s, &svc, &radio(), p, BoundaryRule::StrictNewLoad).unwrap();
                s.apply_mut(&svc, &d);
            }
            s
        };
        let (f, u) = (run(&fixed), run(&shared));
        assert_eq!((f.blocked("video"), f.blocked("voice")), (6, 0));
        assert_eq!(u.blocked("video"), 0);
        assert!(u.blocked("voice") > 0);
        assert!(u.total_blocked() > f.total_blocked());
    }
}
