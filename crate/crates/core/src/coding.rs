//! BER models per coding scheme and their inversion to an Eb/N0 target.
//!
//! Uncoded BPSK is evaluated analytically as `Q(sqrt(2 Eb/N0))`. Coded schemes
//! are described by calibrated curve tables: ordered `(Eb/N0 dB, BER)` knots,
//! interpolated linearly in dB against `log10(BER)`. Outside the table the
//! forward curve is clamped to its endpoints, while the inversion refuses to
//! extrapolate.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Lower edge of the Eb/N0 range accepted anywhere in the model, in dB.
pub const EBN0_MIN_DB: f64 = -10.0;
/// Upper edge of the Eb/N0 range accepted anywhere in the model, in dB.
pub const EBN0_MAX_DB: f64 = 30.0;

/// Bisection stops once the bracket is narrower than this (dB).
const BISECTION_TOL_DB: f64 = 1e-9;

/// `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> f64 {
    libm::pow(10.0, x_db / 10.0)
}

/// `10 log10(x)`; rejects non-positive input.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "linear ratio",
            value: x,
            expected: "a finite value > 0",
        });
    }
    Ok(10.0 * libm::log10(x))
}

/// Gaussian tail probability `P(Z > x)` for a standard normal `Z`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Which family of channel coding a scheme represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeKind {
    Uncoded,
    Block,
    Convolutional,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [
        SchemeKind::Uncoded,
        SchemeKind::Block,
        SchemeKind::Convolutional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Uncoded => "uncoded",
            SchemeKind::Block => "block",
            SchemeKind::Convolutional => "convolutional",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A required operating point, in dB.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EbN0Target(f64);

impl EbN0Target {
    pub fn new(value_db: f64) -> Result<Self> {
        if !value_db.is_finite() || !(EBN0_MIN_DB..=EBN0_MAX_DB).contains(&value_db) {
            return Err(Error::InvalidParameter {
                name: "Eb/N0 (dB)",
                value: value_db,
                expected: "a finite value in [-10, 30]",
            });
        }
        Ok(Self(value_db))
    }

    pub fn value_db(self) -> f64 {
        self.0
    }

    /// The target as a linear power ratio.
    pub fn linear(self) -> f64 {
        db_to_linear(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub ebn0_db: f64,
    pub ber: f64,
}

/// A calibrated BER curve: at least two knots, Eb/N0 strictly increasing,
/// BER strictly decreasing and within `(0, 0.5]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    points: Vec<CurvePoint>,
}

impl CurveTable {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCurve("needs at least two points"));
        }
        for p in &points {
            if !p.ebn0_db.is_finite() {
                return Err(Error::InvalidCurve("Eb/N0 values must be finite"));
            }
            if !(p.ber > 0.0 && p.ber <= 0.5) {
                return Err(Error::InvalidCurve("BER values must lie in (0, 0.5]"));
            }
        }
        for w in points.windows(2) {
            if w[1].ebn0_db <= w[0].ebn0_db {
                return Err(Error::InvalidCurve("Eb/N0 must be strictly increasing"));
            }
            if w[1].ber >= w[0].ber {
                return Err(Error::InvalidCurve("BER must be strictly decreasing"));
            }
        }
        Ok(Self { points })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(ebn0_db, ber)| CurvePoint { ebn0_db, ber })
                .collect(),
        )
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// Lowest BER the table reaches (its right endpoint).
    pub fn floor(&self) -> f64 {
        self.points[self.points.len() - 1].ber
    }

    /// Highest BER the table covers (its left endpoint).
    pub fn ceiling(&self) -> f64 {
        self.points[0].ber
    }

    fn eval(&self, ebn0_db: f64) -> f64 {
        let pts = &self.points;
        let last = pts.len() - 1;
        if ebn0_db <= pts[0].ebn0_db {
            return pts[0].ber;
        }
        if ebn0_db >= pts[last].ebn0_db {
            return pts[last].ber;
        }
        // first knot strictly above x; x lies in [pts[k], pts[k + 1])
        let k = pts.partition_point(|p| p.ebn0_db <= ebn0_db) - 1;
        let (a, b) = (pts[k], pts[k + 1]);
        let frac = (ebn0_db - a.ebn0_db) / (b.ebn0_db - a.ebn0_db);
        if frac == 0.0 {
            return a.ber;
        }
        let (la, lb) = (libm::log10(a.ber), libm::log10(b.ber));
        libm::pow(10.0, la + frac * (lb - la))
    }

    fn invert(&self, target: f64) -> Result<f64> {
        let pts = &self.points;
        if target < self.floor() {
            return Err(Error::Unreachable {
                target,
                floor: self.floor(),
            });
        }
        if target > self.ceiling() {
            return Err(Error::OutsideCalibration {
                target,
                ceiling: self.ceiling(),
            });
        }
        if let Some(p) = pts.iter().find(|p| p.ber == target) {
            return Ok(p.ebn0_db);
        }
        // first knot with BER below the target; the segment ends there
        let k = pts.partition_point(|p| p.ber > target) - 1;
        let (a, b) = (pts[k], pts[k + 1]);
        let (la, lb) = (libm::log10(a.ber), libm::log10(b.ber));
        let frac = (libm::log10(target) - la) / (lb - la);
        let mut x = a.ebn0_db + frac * (b.ebn0_db - a.ebn0_db);
        // rounding can land a hair short of the target; step up to the first
        // representable point that meets it
        while self.eval(x) > target && x < b.ebn0_db {
            x = x.next_up();
        }
        Ok(x.min(b.ebn0_db))
    }
}

/// How a scheme maps Eb/N0 to BER.
#[derive(Debug, Clone, PartialEq)]
pub enum BerModel {
    AnalyticBpsk,
    CurveTable(CurveTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodingScheme {
    kind: SchemeKind,
    model: BerModel,
}

impl CodingScheme {
    /// Analytic models are only meaningful for uncoded transmission.
    pub fn new(kind: SchemeKind, model: BerModel) -> Result<Self> {
        if matches!(model, BerModel::AnalyticBpsk) && kind != SchemeKind::Uncoded {
            return Err(Error::InvalidCurve(
                "the analytic BPSK model only describes uncoded transmission",
            ));
        }
        Ok(Self { kind, model })
    }

    pub fn uncoded_bpsk() -> Self {
        Self {
            kind: SchemeKind::Uncoded,
            model: BerModel::AnalyticBpsk,
        }
    }

    /// Block code calibrated at 5.7 dB for 1e-3 and 8.4 dB for 1e-5.
    pub fn calibrated_block() -> Self {
        let table = CurveTable::from_pairs(&[(5.7, 1e-3), (8.4, 1e-5)]).expect("valid table");
        Self {
            kind: SchemeKind::Block,
            model: BerModel::CurveTable(table),
        }
    }

    /// Convolutional code calibrated at 5.0 dB for 1e-3 and 6.5 dB for 1e-5.
    pub fn calibrated_convolutional() -> Self {
        let table = CurveTable::from_pairs(&[(5.0, 1e-3), (6.5, 1e-5)]).expect("valid table");
        Self {
            kind: SchemeKind::Convolutional,
            model: BerModel::CurveTable(table),
        }
    }

    /// The three built-in schemes in declaration order.
    pub fn defaults() -> [CodingScheme; 3] {
        [
            Self::uncoded_bpsk(),
            Self::calibrated_block(),
            Self::calibrated_convolutional(),
        ]
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn model(&self) -> &BerModel {
        &self.model
    }
}

/// Bit error rate of `scheme` at `ebn0_db`. Always in `(0, 0.5]`.
pub fn ber(scheme: &CodingScheme, ebn0_db: f64) -> f64 {
    match &scheme.model {
        BerModel::AnalyticBpsk => {
            let gamma = db_to_linear(ebn0_db);
            q_function(libm::sqrt(2.0 * gamma)).max(f64::MIN_POSITIVE)
        }
        BerModel::CurveTable(table) => table.eval(ebn0_db),
    }
}

/// Smallest Eb/N0 at which `scheme` meets `ber_target`.
///
/// The analytic curve is inverted by bisection over the accepted Eb/N0 range;
/// targets easier than the curve at -10 dB resolve to -10 dB. Curve tables are
/// inverted exactly and refuse targets outside their calibrated BER span.
pub fn required_ebn0(scheme: &CodingScheme, ber_target: f64) -> Result<EbN0Target> {
    if !(ber_target > 0.0 && ber_target < 0.5) {
        return Err(Error::InvalidParameter {
            name: "BER target",
            value: ber_target,
            expected: "a value in (0, 0.5)",
        });
    }
    let db = match &scheme.model {
        BerModel::AnalyticBpsk => {
            let (mut lo, mut hi) = (EBN0_MIN_DB, EBN0_MAX_DB);
            let floor = ber(scheme, hi);
            if floor > ber_target {
                return Err(Error::Unreachable {
                    target: ber_target,
                    floor,
                });
            }
            if ber(scheme, lo) <= ber_target {
                return EbN0Target::new(lo);
            }
            // invariant: ber(lo) > target >= ber(hi)
            while hi - lo > BISECTION_TOL_DB {
                let mid = 0.5 * (lo + hi);
                if ber(scheme, mid) <= ber_target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
        BerModel::CurveTable(table) => table.invert(ber_target)?,
    };
    EbN0Target::new(db)
}
