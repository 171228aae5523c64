//! Scenario execution.
//!
//! Users only arrive; nobody leaves. A run feeds an arrival sequence through
//! [`decide`] and [`CellState::apply_mut`] and records the cell after every
//! arrival. The resulting load trajectory is therefore non-decreasing.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cac::{decide, AdmissionDecision, AdmissionPolicy, CellState};
use crate::coding::SchemeKind;
use crate::load::{
    capacity_for_delta, dl_user_load, BoundaryRule, LoadFactor, RadioParams, ServiceClass,
};
use crate::{Error, Result};

const MIX_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrivalOrder {
    /// Classes spread evenly through the sequence.
    #[default]
    Interleaved,
    /// The interleaved sequence under a seeded permutation.
    Shuffled(u64),
}

/// Everything a run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub radio: RadioParams,
    pub classes: Vec<ServiceClass>,
    pub policy: AdmissionPolicy,
    pub boundary_rule: BoundaryRule,
    /// Class name and share of arrivals, in declaration order.
    pub mix: Vec<(String, f64)>,
    pub offered_users: usize,
    pub arrival_order: ArrivalOrder,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.classes.iter().enumerate() {
            if self.classes[..i].iter().any(|o| o.name() == c.name()) {
                return Err(Error::DuplicateClass(c.name().to_string()));
            }
        }
        check_mix(&self.mix)?;
        for (name, _) in &self.mix {
            if self.class(name).is_none() {
                return Err(Error::UnknownClass(name.clone()));
            }
        }
        Ok(())
    }

    pub fn class(&self, name: &str) -> Option<&ServiceClass> {
        self.classes.iter().find(|c| c.name() == name)
    }

    pub fn with_policy(&self, policy: AdmissionPolicy) -> Scenario {
        Scenario {
            policy,
            ..self.clone()
        }
    }
}

/// One processed arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRecord {
    pub class: String,
    pub decision: AdmissionDecision,
    /// Cell load after this arrival was handled.
    pub total_load: LoadFactor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub log: Vec<ArrivalRecord>,
    pub final_state: CellState,
    /// `100 · blocked / offered` over each prefix of the arrival sequence.
    pub blocked_percentage: Vec<f64>,
}

impl SimulationResult {
    pub fn admitted(&self) -> u64 {
        self.final_state.total_admitted()
    }

    pub fn blocked(&self) -> u64 {
        self.final_state.total_blocked()
    }
}

fn check_mix<S: AsRef<str>>(mix: &[(S, f64)]) -> Result<()> {
    let mut sum = 0.0;
    for (_, f) in mix {
        if !(0.0..=1.0).contains(f) {
            return Err(Error::InvalidParameter {
                name: "mix fraction",
                value: *f,
                expected: "a value in [0, 1]",
            });
        }
        sum += f;
    }
    if (sum - 1.0).abs() > MIX_SUM_TOL {
        return Err(Error::MixMismatch { sum });
    }
    Ok(())
}

/// Per-class arrival counts by largest remainder; ties go to the class
/// declared first.
fn class_counts(fractions: &[f64], offered: usize) -> Vec<usize> {
    let quotas: Vec<f64> = fractions.iter().map(|f| f * offered as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| libm::floor(*q) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - counts[a] as f64, quotas[b] - counts[b] as f64);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(offered.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Spreads `counts` over a sequence. At step `k` a class may be picked only
/// while it is strictly behind its pro-rata share `k·count/n`; among those
/// the one whose next item is due earliest (`(emitted + 1) / count`) wins,
/// ties to the class declared first.
fn interleave(counts: &[usize]) -> Vec<usize> {
    let n: usize = counts.iter().sum();
    let mut emitted = alloc::vec![0usize; counts.len()];
    let mut seq = Vec::with_capacity(n);
    for k in 1..=n {
        let mut best: Option<usize> = None;
        for (c, &count) in counts.iter().enumerate() {
            // emitted < k·count/n, in integers
            if count == 0 || emitted[c] * n >= k * count {
                continue;
            }
            best = match best {
                // (e_c + 1)/count_c < (e_b + 1)/count_b
                Some(b) if (emitted[c] + 1) * counts[b] >= (emitted[b] + 1) * count => Some(b),
                _ => Some(c),
            };
        }
        let c = best.expect("some class is always behind its share");
        emitted[c] += 1;
        seq.push(c);
    }
    seq
}

fn arrival_indices(fractions: &[f64], offered: usize, order: ArrivalOrder) -> Vec<usize> {
    let mut seq = interleave(&class_counts(fractions, offered));
    if let ArrivalOrder::Shuffled(seed) = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        seq.shuffle(&mut rng);
    }
    seq
}

/// Builds the arrival sequence for a traffic mix.
pub fn generate_arrivals<S: AsRef<str>>(
    mix: &[(S, f64)],
    offered_users: usize,
    arrival_order: ArrivalOrder,
) -> Result<Vec<String>> {
    check_mix(mix)?;
    let fractions: Vec<f64> = mix.iter().map(|(_, f)| *f).collect();
    Ok(arrival_indices(&fractions, offered_users, arrival_order)
        .into_iter()
        .map(|i| mix[i].0.as_ref().to_string())
        .collect())
}

fn run_sequence(scenario: &Scenario, arrivals: &[&ServiceClass]) -> Result<SimulationResult> {
    let mut state = CellState::with_classes(scenario.mix.iter().map(|(n, _)| n.as_str()));
    let mut log = Vec::with_capacity(arrivals.len());
    let mut blocked_percentage = Vec::with_capacity(arrivals.len());
    let mut blocked = 0u64;
    for (i, svc) in arrivals.iter().enumerate() {
        let decision = decide(
            &state,
            svc,
            &scenario.radio,
            &scenario.policy,
            scenario.boundary_rule,
        )?;
        state.apply_mut(svc, &decision);
        if !decision.admitted {
            blocked += 1;
        }
        blocked_percentage.push(100.0 * blocked as f64 / (i + 1) as f64);
        log.push(ArrivalRecord {
            class: svc.name().to_string(),
            decision,
            total_load: state.total_load(),
        });
    }
    Ok(SimulationResult {
        log,
        final_state: state,
        blocked_percentage,
    })
}

fn scenario_arrivals(scenario: &Scenario) -> Result<Vec<&ServiceClass>> {
    scenario.validate()?;
    let classes: Vec<&ServiceClass> = scenario
        .mix
        .iter()
        .map(|(n, _)| scenario.class(n).expect("validated"))
        .collect();
    let fractions: Vec<f64> = scenario.mix.iter().map(|(_, f)| *f).collect();
    Ok(
        arrival_indices(&fractions, scenario.offered_users, scenario.arrival_order)
            .into_iter()
            .map(|i| classes[i])
            .collect(),
    )
}

/// Runs one scenario. Deterministic for a fixed scenario.
pub fn run(scenario: &Scenario) -> Result<SimulationResult> {
    let arrivals = scenario_arrivals(scenario)?;
    run_sequence(scenario, &arrivals)
}

/// Runs the template's arrival sequence once per policy, in order.
pub fn policy_comparison(
    template: &Scenario,
    policies: &[AdmissionPolicy],
) -> Result<Vec<SimulationResult>> {
    let arrivals = scenario_arrivals(template)?;
    policies
        .iter()
        .map(|p| run_sequence(&template.with_policy(p.clone()), &arrivals))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityRow {
    pub scheme: SchemeKind,
    pub n_users: u64,
    pub total_load: LoadFactor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySweep {
    /// Grouped by scheme in input order, `n_users` running from 1.
    pub rows: Vec<CapacityRow>,
    /// Users admitted at the threshold, per scheme in input order.
    pub capacities: Vec<(SchemeKind, u64)>,
}

impl CapacitySweep {
    pub fn capacity(&self, scheme: SchemeKind) -> Option<u64> {
        self.capacities
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, n)| *n)
    }

    pub fn load_at(&self, scheme: SchemeKind, n_users: u64) -> Option<LoadFactor> {
        if n_users == 0 {
            return Some(LoadFactor::ZERO);
        }
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.n_users == n_users)
            .map(|r| r.total_load)
    }
}

/// Downlink load of `1..=max_users` identical users for each variant of a
/// service, plus each variant's capacity at `threshold`.
pub fn capacity_sweep(
    variants: &[(SchemeKind, ServiceClass)],
    radio: &RadioParams,
    threshold: LoadFactor,
    rule: BoundaryRule,
    max_users: u64,
) -> CapacitySweep {
    let mut rows = Vec::new();
    let mut capacities = Vec::with_capacity(variants.len());
    for (scheme, svc) in variants {
        let delta = dl_user_load(svc, radio);
        let mut total = LoadFactor::ZERO;
        for n in 1..=max_users {
            total += delta;
            rows.push(CapacityRow {
                scheme: *scheme,
                n_users: n,
                total_load: total,
            });
        }
        capacities.push((*scheme, capacity_for_delta(delta, threshold, rule)));
    }
    CapacitySweep { rows, capacities }
}
