//! Closed-form capacity, repair and comparison formulas in exact rational
//! arithmetic.
//!
//! Floating point appears only when writing CSV.

use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("repair degree D = {d} outside [K, N-1] = [{k}, {max}]")]
    RepairDegree { d: u64, k: u64, max: u64 },
    #[error("download must be positive")]
    ZeroDownload,
    #[error("unknown figure {0}, expected 1..=8")]
    UnknownFigure(u8),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn check_nk(n: u64, k: u64) -> Result<(), AnalysisError> {
    if k == 0 || k >= n {
        return Err(AnalysisError::InvalidParams(format!(
            "need 1 <= K < N, got N = {n}, K = {k}"
        )));
    }
    Ok(())
}

fn check_m(m: u32) -> Result<(), AnalysisError> {
    if m == 0 {
        return Err(AnalysisError::InvalidParams("need M >= 1".into()));
    }
    Ok(())
}

/// `(1 + x + ... + x^(M-1))^-1`
fn inverse_geometric(x: &BigRational, m: u32) -> BigRational {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for _ in 0..m {
        sum += &term;
        term *= x;
    }
    sum.recip()
}

/// PIR capacity with `N` replicated servers and `M` files.
pub fn capacity_replicated(n: u64, m: u32) -> Result<BigRational, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::InvalidParams("need N >= 1".into()));
    }
    check_m(m)?;
    Ok(inverse_geometric(&rat(1, n), m))
}

/// PIR capacity from `(N, K)` MDS-coded servers with `M` files.
pub fn capacity_mds(n: u64, k: u64, m: u32) -> Result<BigRational, AnalysisError> {
    check_nk(n, k)?;
    check_m(m)?;
    Ok(inverse_geometric(&rat(k, n), m))
}

/// Mean total download `alpha * S * N * (1 - (K/N)^M)` of the retrieval
/// protocol, in symbols.
pub fn expected_download(n: u64, k: u64, m: u32, alpha: u64) -> Result<BigRational, AnalysisError> {
    check_nk(n, k)?;
    check_m(m)?;
    let s = k / n.gcd(&k);
    let tail = Pow::pow(rat(k, n), m);
    Ok(int(alpha * s * n) * (BigRational::one() - tail))
}

/// `L / D`: retrieved symbols per downloaded symbol.
pub fn empirical_rate(file_len: u64, mean_download: &BigRational) -> Result<BigRational, AnalysisError> {
    if !mean_download.is_positive() {
        return Err(AnalysisError::ZeroDownload);
    }
    Ok(int(file_len) / mean_download)
}

/// Inputs to the regenerating-code and comparison formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryInputs {
    pub n: u64,
    pub k: u64,
    pub m: u32,
    /// Repair degree: helpers contacted to rebuild one node.
    pub d: u64,
    /// Grouping factor of the epsilon-MSR construction.
    pub s: u64,
    /// Total stored size in symbols.
    pub total_size: BigRational,
}

impl TheoryInputs {
    pub fn new(n: u64, k: u64, m: u32, d: u64, s: u64, total_size: BigRational) -> Result<Self, AnalysisError> {
        check_nk(n, k)?;
        check_m(m)?;
        if d < k || d > n - 1 {
            return Err(AnalysisError::RepairDegree { d, k, max: n - 1 });
        }
        if !total_size.is_positive() {
            return Err(AnalysisError::InvalidParams("total size must be positive".into()));
        }
        Ok(Self { n, k, m, d, s, total_size })
    }
}

/// Node capacity and repair bandwidth at the two extreme points of the
/// storage/bandwidth tradeoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegeneratingPoints {
    pub alpha_msr: BigRational,
    pub gamma_msr: BigRational,
    pub alpha_mbr: BigRational,
    pub gamma_mbr: BigRational,
}

pub fn msr_mbr_params(inputs: &TheoryInputs) -> RegeneratingPoints {
    let (b, k, d) = (&inputs.total_size, inputs.k as i64, inputs.d as i64);
    let gamma_mbr = b * int(2 * d) / int(2 * k * d - k * k + k);
    RegeneratingPoints {
        alpha_msr: b / int(k),
        gamma_msr: b * int(d) / int(k * (d - k + 1)),
        alpha_mbr: gamma_mbr.clone(),
        gamma_mbr,
    }
}

/// Minimum repair bandwidth for one node storing `alpha` symbols per stripe
/// of an `(N, K)` code when `d` helpers are contacted.
pub fn gamma_msr_per_stripe(k: u64, alpha: u64, d: u64) -> BigRational {
    rat(k * alpha * d, k * (d - k + 1))
}

/// Lower bound on the field size a protocol needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldBound {
    Exactly(u64),
    Above(u64),
}

impl FieldBound {
    /// Smallest field order the bound admits.
    pub fn min_order(self) -> u64 {
        match self {
            FieldBound::Exactly(q) => q,
            FieldBound::Above(q) => q + 1,
        }
    }
}

impl fmt::Display for FieldBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldBound::Exactly(q) => write!(f, "={q}"),
            FieldBound::Above(q) => write!(f, ">{q}"),
        }
    }
}

/// One protocol's key parameters at a given `(N, K, M, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolRow {
    /// 1-based row number; rows 1-4 use this crate's construction with
    /// different array codes, rows 5-8 are prior protocols.
    pub index: u8,
    pub name: &'static str,
    /// `None` when the formula has no integral value at these parameters.
    pub sub_packetization: Option<BigInt>,
    pub field_bound: FieldBound,
    /// Repair bandwidth over the MSR optimum.
    pub bandwidth_ratio: BigRational,
    pub rate: BigRational,
    pub constraint: &'static str,
    pub applicable: bool,
}

pub const PROTOCOL_NAMES: [&str; 8] = [
    "pm-msr",
    "binary-mds",
    "eps-msr",
    "optimal-node-capacity",
    "pm-msr-ca",
    "pm-msr-cb",
    "small-subpacketization-mds",
    "baseline-mds",
];

/// The eight-protocol comparison. Rows whose constraint fails are returned
/// with `applicable == false` rather than dropped.
pub fn comparison_table(n: u64, k: u64, m: u32, s: u64) -> Result<Vec<ProtocolRow>, AnalysisError> {
    check_nk(n, k)?;
    check_m(m)?;
    let r = n - k;
    let base = BigInt::from(k * r / n.gcd(&k));
    let capacity = capacity_mds(n, k, m)?;
    let pow = |b: u64, e: u64| Pow::pow(BigInt::from(b), e);
    let pm = BigInt::from(k - 1) * &base;
    let pm_ok = n + 1 >= 2 * k;
    let eps_ok = s >= 2 && n.is_multiple_of(s) && n / s > r;
    let l3 = (s >= 1 && n.is_multiple_of(s)).then(|| pow(r, n / s - 1) * &base);
    let l4 = pow(r, n.div_ceil(r)) * &base;
    let one = BigRational::one();
    let trivial = rat(k * r, n - 1);

    let row = |index: u8, l: Option<BigInt>, q, g: &BigRational, rate: &BigRational, constraint, applicable| ProtocolRow {
        index,
        name: PROTOCOL_NAMES[index as usize - 1],
        sub_packetization: l,
        field_bound: q,
        bandwidth_ratio: g.clone(),
        rate: rate.clone(),
        constraint,
        applicable,
    };
    Ok(vec![
        row(1, Some(pm.clone()), FieldBound::Above(n), &one, &capacity, "N >= 2K-1", pm_ok),
        row(
            2,
            Some(pow(2, k + 1) * &base),
            FieldBound::Exactly(2),
            &one,
            &capacity,
            "N-K = 2",
            r == 2,
        ),
        row(
            3,
            l3,
            FieldBound::Above(s * r),
            &(one.clone() + rat(s.saturating_sub(1) * (r - 1), n - 1)),
            &capacity,
            "N/s > N-K, s >= 2, s | N",
            eps_ok,
        ),
        row(4, Some(l4), FieldBound::Above(n), &one, &capacity, "", true),
        row(5, Some(pm.clone()), FieldBound::Above(n), &one, &(one.clone() - rat(2 * k as i64 - 2, n)), "N >= 2K-1", pm_ok),
        row(
            6,
            Some(pm),
            FieldBound::Above(n),
            &one,
            &(one.clone() - rat(4 * k as i64 - 2, 3 * n as i64 - 2 * k as i64 + 4)),
            "N >= 2K-1",
            pm_ok,
        ),
        row(7, Some(base), FieldBound::Above(n), &trivial, &capacity, "", true),
        row(8, Some(BigInt::from(k) * pow(n, m as u64)), FieldBound::Above(n), &trivial, &capacity, "", true),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl Relation {
    fn eval<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Eq => a == b,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
        })
    }
}

/// One link of a claimed ordering, evaluated at concrete parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingLink {
    pub chain: &'static str,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub holds: bool,
    /// False at degenerate or boundary points where the link is only
    /// reported: `K <= 2`, `N-K = 1`, `M < N` for links against `L8`, a
    /// non-integral `N/(N-K)` for links on `L4`, or `s` equal to a
    /// tie-break bound.
    pub asserted: bool,
}

impl fmt::Display for OrderingLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} {} {}: {}{}",
            self.chain,
            self.lhs,
            self.relation,
            self.rhs,
            if self.holds { "holds" } else { "FAILS" },
            if self.asserted { "" } else { " (reported)" }
        )
    }
}

struct Links(Vec<OrderingLink>);

impl Links {
    fn push<T: Ord>(&mut self, chain: &'static str, (ln, l): (&str, &T), rel: Relation, (rn, r): (&str, &T), asserted: bool) {
        self.0.push(OrderingLink {
            chain,
            lhs: ln.to_string(),
            relation: rel,
            rhs: rn.to_string(),
            holds: rel.eval(l, r),
            asserted,
        });
    }
}

/// Evaluates every ordering claim among the comparison rows whose case
/// conditions hold at `(N, K, M, s)`.
pub fn ordering_checks(n: u64, k: u64, m: u32, s: u64) -> Result<Vec<OrderingLink>, AnalysisError> {
    use Relation::*;
    let rows = comparison_table(n, k, m, s)?;
    let r = n - k;
    let row = |i: usize| &rows[i - 1];
    let g: Vec<_> = rows.iter().map(|x| x.bandwidth_ratio.clone()).collect();
    let rate: Vec<_> = rows.iter().map(|x| x.rate.clone()).collect();
    let q: Vec<_> = rows.iter().map(|x| x.field_bound.min_order()).collect();
    let l: Vec<_> = rows.iter().map(|x| x.sub_packetization.clone()).collect();
    let capacity = capacity_mds(n, k, m)?;
    let eps = row(3).applicable;
    let pm = row(1).applicable;
    let mut out = Links(Vec::new());

    const G: [&str; 8] = ["g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8"];
    for (a, b) in [(0, 1), (1, 3), (3, 4), (4, 5), (6, 7)] {
        out.push("repair", (G[a], &g[a]), Eq, (G[b], &g[b]), true);
    }
    let repair_edge = r != 1 && k != 1;
    if eps {
        out.push("repair", ("g6", &g[5]), Lt, ("g3", &g[2]), r != 1);
        out.push("repair", ("g3", &g[2]), Lt, ("g7", &g[6]), repair_edge);
    } else {
        out.push("repair", ("g6", &g[5]), Lt, ("g7", &g[6]), repair_edge);
    }

    const R: [&str; 8] = ["R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8"];
    out.push("rate", ("C", &capacity), Eq, ("R1", &rate[0]), true);
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 6), (6, 7)] {
        out.push("rate", (R[a], &rate[a]), Eq, (R[b], &rate[b]), true);
    }
    if pm {
        out.push("rate", ("R6", &rate[5]), Lt, ("R8", &rate[7]), k > 1);
        out.push("rate", ("R5", &rate[4]), Lt, ("R6", &rate[5]), k > 2);
    }

    const Q: [&str; 8] = ["q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8"];
    out.push("field", ("q2", &q[1]), Lt, ("q1", &q[0]), true);
    for (a, b) in [(0, 4), (4, 5), (5, 6), (6, 7), (7, 3)] {
        out.push("field", (Q[a], &q[a]), Eq, (Q[b], &q[b]), true);
    }
    if eps && s * r < n {
        out.push("field", ("q2", &q[1]), Lt, ("q3", &q[2]), true);
        out.push("field", ("q3", &q[2]), Le, ("q1", &q[0]), true);
    }

    let l_of = |i: usize| l[i - 1].clone().expect("integral");
    let (l1, l2, l4, l5, l6, l7, l8) = (l_of(1), l_of(2), l_of(4), l_of(5), l_of(6), l_of(7), l_of(8));
    let l3 = if eps { l[2].clone() } else { None };
    let l4_ok = n.is_multiple_of(r);
    let l8_ok = m as u64 >= n;
    let chain = "subpacketization";
    if r == 2 && s >= 2 && 2 * s < n {
        match &l3 {
            Some(l3) => {
                out.push(chain, ("L7", &l7), Lt, ("L3", l3), true);
                out.push(chain, ("L3", l3), Le, ("L4", &l4), l4_ok);
            }
            None => out.push(chain, ("L7", &l7), Lt, ("L4", &l4), l4_ok),
        }
        out.push(chain, ("L4", &l4), Lt, ("L2", &l2), l4_ok);
        out.push(chain, ("L2", &l2), Lt, ("L8", &l8), l8_ok);
    }
    if 2 < r && r + 1 < k {
        if let Some(l3) = &l3 {
            out.push(chain, ("L7", &l7), Lt, ("L3", l3), true);
            out.push(chain, ("L3", l3), Lt, ("L8", &l8), l8_ok);
        }
        out.push(chain, ("L7", &l7), Lt, ("L4", &l4), l4_ok);
        out.push(chain, ("L4", &l4), Lt, ("L8", &l8), l8_ok && l4_ok);
    }
    if r + 1 >= k {
        out.push(chain, ("L7", &l7), Lt, ("L1", &l1), k > 2);
        out.push(chain, ("L1", &l1), Eq, ("L5", &l5), true);
        out.push(chain, ("L5", &l5), Eq, ("L6", &l6), true);
        out.push(chain, ("L6", &l6), Lt, ("L4", &l4), l4_ok && k > 1 && r > 1);
        out.push(chain, ("L4", &l4), Lt, ("L8", &l8), l8_ok && l4_ok);
    }

    if let Some(l3) = &l3 {
        let s_r = int(s);
        let lo = rat(n * r, 2 * n - k);
        let hi_a = rat(k, r);
        let upper_a = if lo < hi_a { lo.clone() } else { hi_a };
        if s >= 2 && s_r <= upper_a {
            out.push("l3-vs-l4", ("L4", &l4), Le, ("L3", l3), l4_ok && s_r != upper_a);
        }
        let hi_b = rat(n, r);
        let sqrt_cond = r >= 2 && (r - 1) * (r - 1) < k + 1;
        if sqrt_cond && lo < s_r && s_r < hi_b {
            out.push("l3-vs-l4", ("L3", l3), Lt, ("L4", &l4), l4_ok);
        }
    }
    Ok(out.0)
}

/// Quantity plotted by a figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    SubPacketization,
    BandwidthRatio,
}

/// One of the eight comparison sweeps: figures 1-4 plot sub-packetization
/// and 5-8 the repair-bandwidth ratio over the same four families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Figure {
    pub id: u8,
    pub metric: Metric,
    family: Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    /// `N - K = gap`, `s = N / s_div`.
    Gap { gap: u64, s_div: u64 },
    /// `K / N = num / den`, `s = 2`.
    Rate { num: u64, den: u64 },
}

/// Number of files for every figure.
pub const FIGURE_FILES: u32 = 30;

/// One parameter point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPoint {
    pub n: u64,
    pub k: u64,
    pub m: u32,
    pub s: u64,
}

impl Figure {
    pub fn new(id: u8) -> Result<Self, AnalysisError> {
        let family = match id {
            1 | 5 => Family::Gap { gap: 2, s_div: 4 },
            2 | 6 => Family::Gap { gap: 3, s_div: 6 },
            3 | 7 => Family::Rate { num: 1, den: 2 },
            4 | 8 => Family::Rate { num: 2, den: 3 },
            _ => return Err(AnalysisError::UnknownFigure(id)),
        };
        let metric = if id <= 4 {
            Metric::SubPacketization
        } else {
            Metric::BandwidthRatio
        };
        Ok(Self { id, metric, family })
    }

    pub fn all() -> impl Iterator<Item = Figure> {
        (1..=8).map(|id| Figure::new(id).expect("valid id"))
    }

    /// Default `N` range: every point from the smallest non-degenerate
    /// instance of the family up to 60.
    pub fn default_range(&self) -> RangeInclusive<u64> {
        match self.family {
            Family::Gap { s_div, .. } => 2 * s_div..=60,
            Family::Rate { den: 2, .. } => 6..=60,
            Family::Rate { .. } => 9..=60,
        }
    }

    /// Points with integral `K` and `s` for every `N` in `range`.
    pub fn points(&self, range: RangeInclusive<u64>) -> Vec<SweepPoint> {
        range
            .filter_map(|n| {
                let (k, s) = match self.family {
                    Family::Gap { gap, s_div } => {
                        (n % s_div == 0 && n > gap).then(|| (n - gap, n / s_div))?
                    }
                    Family::Rate { num, den } => (n % den == 0).then(|| (n * num / den, 2))?,
                };
                (k >= 1 && k < n).then_some(SweepPoint { n, k, m: FIGURE_FILES, s })
            })
            .collect()
    }
}

fn decimal(x: &BigRational) -> String {
    format!("{:.6}", x.to_f64().unwrap_or(f64::NAN))
}

/// Writes one figure's data as CSV: `figure,N,K,s,M` then one column per
/// protocol; inapplicable entries are left empty.
pub fn write_figure_csv<W: Write>(
    figure: Figure,
    range: RangeInclusive<u64>,
    out: W,
) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    let prefix = match figure.metric {
        Metric::SubPacketization => "L",
        Metric::BandwidthRatio => "gamma_bar",
    };
    let mut header: Vec<String> = ["figure", "N", "K", "s", "M"].map(String::from).into();
    header.extend((1..=8).map(|i| format!("{prefix}{i}")));
    w.write_record(&header)?;
    for p in figure.points(range) {
        let rows = comparison_table(p.n, p.k, p.m, p.s)?;
        let mut record = vec![
            figure.id.to_string(),
            p.n.to_string(),
            p.k.to_string(),
            p.s.to_string(),
            p.m.to_string(),
        ];
        record.extend(rows.iter().map(|r| match (r.applicable, figure.metric) {
            (false, _) => String::new(),
            (true, Metric::SubPacketization) => {
                r.sub_packetization.as_ref().map(BigInt::to_string).unwrap_or_default()
            }
            (true, Metric::BandwidthRatio) => decimal(&r.bandwidth_ratio),
        }));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes comparison rows as CSV with exact and decimal columns.
pub fn write_table_csv<W: Write>(rows: &[ProtocolRow], out: W) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "row",
        "protocol",
        "L",
        "q",
        "gamma_bar",
        "gamma_bar_decimal",
        "rate",
        "rate_decimal",
        "applicable",
        "constraint",
    ])?;
    for r in rows {
        w.write_record([
            r.index.to_string(),
            r.name.to_string(),
            r.sub_packetization.as_ref().map(BigInt::to_string).unwrap_or_default(),
            r.field_bound.to_string(),
            r.bandwidth_ratio.to_string(),
            decimal(&r.bandwidth_ratio),
            r.rate.to_string(),
            decimal(&r.rate),
            r.applicable.to_string(),
            r.constraint.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacities() {
        assert_eq!(capacity_replicated(7, 1).unwrap(), int(1));
        assert_eq!(capacity_replicated(2, 2).unwrap(), rat(2, 3));
        assert_eq!(capacity_mds(5, 3, 2).unwrap(), rat(5, 8));
        assert_eq!(capacity_mds(9, 4, 1).unwrap(), int(1));
        for n in 2..9 {
            for m in 1..6 {
                assert_eq!(capacity_mds(n, 1, m).unwrap(), capacity_replicated(n, m).unwrap());
            }
        }
        assert!(capacity_mds(3, 3, 2).is_err());
        assert!(capacity_replicated(3, 0).is_err());
    }

    #[test]
    fn capacity_closed_form_oracle() {
        for n in 2..10u64 {
            for k in 1..n {
                for m in 1..7u32 {
                    let x = rat(k, n);
                    let closed = (int(1) - &x) / (int(1) - Pow::pow(x, m));
                    assert_eq!(capacity_mds(n, k, m).unwrap(), closed);
                }
            }
        }
    }

    #[test]
    fn capacity_monotone() {
        let grid = [(4, 1), (4, 2), (4, 3), (6, 2), (6, 4), (9, 7)];
        for &(n, k) in &grid {
            for m in 1..8 {
                assert!(capacity_mds(n, k, m + 1).unwrap() < capacity_mds(n, k, m).unwrap());
            }
        }
        // strictly decreasing in K/N at fixed M >= 2
        let mut pts: Vec<(BigRational, BigRational)> = (2..12u64)
            .flat_map(|n| (1..n).map(move |k| (n, k)))
            .map(|(n, k)| (rat(k, n), capacity_mds(n, k, 3).unwrap()))
            .collect();
        pts.sort();
        pts.dedup();
        for w in pts.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn download_times_capacity_is_file_length() {
        for n in 2..10u64 {
            for k in 1..n {
                for m in 1..5 {
                    for alpha in [1, 3, 32] {
                        let g = n.gcd(&k);
                        let l = alpha * (n - k) / g * k;
                        let d = expected_download(n, k, m, alpha).unwrap();
                        assert_eq!(capacity_mds(n, k, m).unwrap() * d, int(l));
                    }
                }
            }
        }
        assert_eq!(expected_download(5, 3, 2, 32).unwrap(), rat(1536, 5));
        assert_eq!(empirical_rate(192, &rat(1536, 5)).unwrap(), rat(5, 8));
        assert_eq!(empirical_rate(7, &int(7)).unwrap(), int(1));
        assert!(empirical_rate(7, &int(0)).is_err());
    }

    #[test]
    fn regenerating_points() {
        let t = TheoryInputs::new(5, 3, 2, 4, 1, int(192)).unwrap();
        let p = msr_mbr_params(&t);
        assert_eq!(p.gamma_msr, int(128));
        assert_eq!(p.alpha_msr, int(64));
        assert_eq!(p.alpha_mbr, p.gamma_mbr);
        // 2*192*4 / (24 - 9 + 3)
        assert_eq!(p.gamma_mbr, rat(1536, 18));
        let full = msr_mbr_params(&TheoryInputs::new(5, 3, 1, 3, 1, int(90)).unwrap());
        assert_eq!(full.gamma_msr, int(3) * &full.alpha_msr);
        assert!(TheoryInputs::new(5, 3, 1, 2, 1, int(1)).is_err());
        assert!(TheoryInputs::new(5, 3, 1, 5, 1, int(1)).is_err());
        assert_eq!(gamma_msr_per_stripe(3, 32, 4), int(64));
    }

    #[test]
    fn table_rows_at_5_3() {
        let rows = comparison_table(5, 3, 2, 1).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[6].sub_packetization, Some(BigInt::from(6)));
        assert_eq!(rows[6].bandwidth_ratio, rat(3, 2));
        assert_eq!(rows[7].bandwidth_ratio, rat(3, 2));
        assert_eq!(rows[7].sub_packetization, Some(BigInt::from(75)));
        assert_eq!(rows[0].sub_packetization, Some(BigInt::from(12)));
        assert_eq!(rows[1].sub_packetization, Some(BigInt::from(96)));
        assert!(rows[0].applicable && rows[1].applicable && !rows[2].applicable);
        assert_eq!(rows[4].rate, rat(1, 5));
        assert_eq!(rows[5].rate, rat(3, 13));
        assert_eq!(rows[0].rate, rat(5, 8));
        assert_eq!(rows[1].field_bound, FieldBound::Exactly(2));
        assert_eq!(rows[3].field_bound.min_order(), 6);
    }

    #[test]
    fn case_one_chain() {
        let links = ordering_checks(8, 6, 30, 2).unwrap();
        let sub: Vec<_> = links.iter().filter(|l| l.chain == "subpacketization").collect();
        let names: Vec<_> = sub.iter().map(|l| format!("{}{}{}", l.lhs, l.relation, l.rhs)).collect();
        assert_eq!(names, ["L7<L3", "L3<=L4", "L4<L2", "L2<L8"]);
        assert!(links.iter().all(|l| l.holds && l.asserted), "{links:#?}");
    }

    #[test]
    fn boundary_links_reported() {
        // K = 2: L1 = L7 and R5 = R6
        let links = ordering_checks(4, 2, 4, 2).unwrap();
        let failing: Vec<_> = links.iter().filter(|l| !l.holds).collect();
        assert!(!failing.is_empty());
        assert!(failing.iter().all(|l| !l.asserted));
    }

    #[test]
    fn figure_grids() {
        let f1 = Figure::new(1).unwrap();
        let pts = f1.points(f1.default_range());
        assert_eq!(pts.first().unwrap().n, 8);
        assert_eq!(pts.last().unwrap().n, 60);
        assert_eq!(pts.len(), 14);
        assert!(pts.iter().all(|p| p.n - p.k == 2 && p.s * 4 == p.n && p.m == 30));
        let f4 = Figure::new(4).unwrap();
        assert!(f4.points(f4.default_range()).iter().all(|p| 3 * p.k == 2 * p.n));
        assert!(Figure::new(9).is_err());
    }

    #[test]
    fn figure_csv_shape() {
        let mut buf = Vec::new();
        write_figure_csv(Figure::new(5).unwrap(), 8..=12, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "figure,N,K,s,M,gamma_bar1,gamma_bar2,gamma_bar3,gamma_bar4,gamma_bar5,gamma_bar6,gamma_bar7,gamma_bar8");
        assert_eq!(lines.len(), 3);
        // N = 8, K = 6: g3 = 1 + 1/7, g7 = 12/7; rows 1, 5, 6 need N >= 2K-1
        assert_eq!(lines[1], "5,8,6,2,30,,1.000000,1.142857,1.000000,,,1.714286,1.714286");
    }
}
