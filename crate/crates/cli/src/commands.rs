//! The three subcommands as pure functions from a resolved config to CSV.
//!
//! Each command renders its whole table into memory and only returns once
//! every row is computed, so a failure never leaves partial output behind.

use wcdma_cac::coding::{ber, SchemeKind};
use wcdma_cac::load::BoundaryRule;
use wcdma_cac::sim::{capacity_sweep, policy_comparison, ArrivalOrder};

use crate::config::Resolved;
use crate::csv_out::{fmt_f64, CsvTable};
use crate::Error;

/// Eb/N0 grid values are snapped to this many decimals so that e.g. 9.6
/// prints as `9.6` rather than `9.600000000000001`.
const GRID_SNAP: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurveArgs {
    pub schemes: Vec<SchemeKind>,
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
}

impl Default for BerCurveArgs {
    fn default() -> Self {
        Self {
            schemes: Vec::new(),
            from_db: 0.0,
            to_db: 12.0,
            step_db: 0.1,
        }
    }
}

/// Inclusive grid `from, from + step, ...` up to `to`.
fn ebn0_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Usage(format!("step must be > 0, got {step}")));
    }
    if !(from.is_finite() && to.is_finite() && from <= to) {
        return Err(Error::Usage(format!("empty Eb/N0 range [{from}, {to}]")));
    }
    let n = ((to - from) / step + 1e-9).floor() as u64;
    Ok((0..=n)
        .map(|i| ((from + i as f64 * step) * GRID_SNAP).round() / GRID_SNAP)
        .collect())
}

fn pick_schemes(cfg: &Resolved, wanted: &[SchemeKind]) -> Result<Vec<SchemeKind>, Error> {
    if wanted.is_empty() {
        return Ok(cfg.schemes.iter().map(|s| s.kind()).collect());
    }
    for &k in wanted {
        cfg.scheme(k)?;
    }
    Ok(wanted.to_vec())
}

/// `ebn0_db,scheme,ber` for every grid point and scheme.
pub fn ber_curve(cfg: &Resolved, args: &BerCurveArgs) -> Result<String, Error> {
    let grid = ebn0_grid(args.from_db, args.to_db, args.step_db)?;
    let kinds = pick_schemes(cfg, &args.schemes)?;
    let schemes = kinds
        .iter()
        .map(|&k| cfg.scheme(k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = CsvTable::new(&["ebn0_db", "scheme", "ber"]);
    for &x in &grid {
        for s in &schemes {
            out.row(&[&fmt_f64(x), s.kind().as_str(), &fmt_f64(ber(s, x))])?;
        }
    }
    out.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityArgs {
    pub service: String,
    pub schemes: Vec<SchemeKind>,
    pub max_users: u64,
    pub rule: Option<BoundaryRule>,
}

/// `scheme,n_users,total_load,admitted_at_threshold`, with `n_users`
/// starting at 1.
pub fn capacity(cfg: &Resolved, args: &CapacityArgs) -> Result<String, Error> {
    if args.max_users == 0 {
        return Err(Error::Usage("max-users must be at least 1".into()));
    }
    let class = cfg.class(&args.service)?;
    let variants = pick_schemes(cfg, &args.schemes)?
        .into_iter()
        .map(|k| Ok((k, class.service(cfg.scheme(k)?)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let rule = args.rule.unwrap_or(cfg.rule);
    let sweep = capacity_sweep(&variants, &cfg.radio, cfg.threshold, rule, args.max_users);
    let mut out = CsvTable::new(&["scheme", "n_users", "total_load", "admitted_at_threshold"]);
    for row in &sweep.rows {
        let cap = sweep
            .capacity(row.scheme)
            .expect("every swept scheme has a capacity");
        out.row(&[
            row.scheme.as_str(),
            &row.n_users.to_string(),
            &fmt_f64(row.total_load.value()),
            &cap.to_string(),
        ])?;
    }
    out.finish()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdmitSimArgs {
    pub seed: Option<u64>,
    pub scheme: Option<SchemeKind>,
    pub rule: Option<BoundaryRule>,
}

/// `policy,n_offered,blocked_percent,total_load`: every configured policy
/// over the same arrival sequence, one row per prefix.
pub fn admit_sim(cfg: &Resolved, args: &AdmitSimArgs) -> Result<String, Error> {
    if cfg.policies.is_empty() {
        return Err(Error::Usage("the config defines no policies".into()));
    }
    let mut template = cfg.scenario(args.scheme)?;
    if let Some(seed) = args.seed {
        template.arrival_order = ArrivalOrder::Shuffled(seed);
    }
    if let Some(rule) = args.rule {
        template.boundary_rule = rule;
    }
    let policies: Vec<_> = cfg.policies.iter().map(|(_, p)| p.clone()).collect();
    let results = policy_comparison(&template, &policies)?;
    let mut out = CsvTable::new(&["policy", "n_offered", "blocked_percent", "total_load"]);
    for ((name, _), res) in cfg.policies.iter().zip(&results) {
        for (k, (rec, pct)) in res.log.iter().zip(&res.blocked_percentage).enumerate() {
            out.row(&[
                name,
                &(k + 1).to_string(),
                &fmt_f64(*pct),
                &fmt_f64(rec.total_load.value()),
            ])?;
        }
    }
    out.finish()
}
