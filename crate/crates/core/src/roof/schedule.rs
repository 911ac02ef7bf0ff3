use serde::Serialize;

use crate::flat::leaf::{mag_cell, product_term, recip_cell};
use crate::flat::{classify_cesag, leaf_schedule, Goodness, LeafApprox, ProductTerm, Separation};
use crate::numeric::{ContinuedFraction, LogMagnitude};
use crate::{Error, Result};

/// How the bending angle β follows the closing measure α.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "d")]
pub enum BetaMode {
    #[default]
    Equal,
    /// β = min(Dα, π/2).
    Capped(f64),
    /// β = Dα.
    Custom(f64),
}

impl BetaMode {
    pub fn factor(&self) -> f64 {
        match *self {
            BetaMode::Equal => 1.0,
            BetaMode::Capped(d) | BetaMode::Custom(d) => d,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: None, msg: format!("unknown beta mode {s:?}") };
        if s == "equal" {
            return Ok(BetaMode::Equal);
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let d: f64 = arg.parse().map_err(|_| bad())?;
        if !(d > 0.0) {
            return Err(bad());
        }
        match name {
            "capped" => Ok(BetaMode::Capped(d)),
            "custom" => Ok(BetaMode::Custom(d)),
            _ => Err(bad()),
        }
    }
}

pub fn beta_from_alpha(alpha: f64, mode: BetaMode) -> f64 {
    match mode {
        BetaMode::Equal => alpha,
        BetaMode::Capped(d) => (d * alpha).min(std::f64::consts::FRAC_PI_2),
        BetaMode::Custom(d) => d * alpha,
    }
}

/// One leaf of the schedule. Small quantities are stored through their
/// reciprocals so that tower-sized schedules stay representable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleEntry {
    pub n: usize,
    pub d: LogMagnitude,
    /// `None` when α = 0.
    pub inv_alpha: Option<LogMagnitude>,
    pub inv_epsilon: LogMagnitude,
    /// Lower bound on ln(1/(α ε e^d)) when it is certainly positive.
    pub margin: Option<LogMagnitude>,
    /// Upper bound on max(0, ln(ε e^d)).
    pub excess: LogMagnitude,
}

fn level0(m: &LogMagnitude) -> Option<(f64, f64)> {
    m.is_finite_f64().then(|| (m.lower(), m.upper()))
}

fn zero() -> LogMagnitude {
    LogMagnitude::from_bounds(0.0, 0.0)
}

/// Clamps a level-0 interval at zero from below.
fn positive_part(m: LogMagnitude) -> LogMagnitude {
    match level0(&m) {
        Some((_, hi)) if hi <= 0.0 => zero(),
        Some((lo, hi)) if lo < 0.0 => LogMagnitude::from_bounds(0.0, hi),
        _ => m,
    }
}

fn certainly_positive(m: LogMagnitude) -> Option<LogMagnitude> {
    match level0(&m) {
        Some((lo, _)) if lo <= 0.0 => None,
        _ => Some(m),
    }
}

impl ScheduleEntry {
    /// Builds an entry and derives `margin` and `excess` by interval
    /// arithmetic, falling back to dominance when the pieces are towers.
    pub fn new(n: usize, d: LogMagnitude, inv_alpha: Option<LogMagnitude>, inv_epsilon: LogMagnitude) -> Self {
        let ln_inv_eps = inv_epsilon.ln();
        let excess = match (level0(&d), level0(&ln_inv_eps)) {
            (Some((_, d_hi)), Some((e_lo, _))) => {
                LogMagnitude::from_bounds(0.0, (d_hi - e_lo).max(0.0) * (1.0 + 1e-15))
            }
            _ => {
                if ln_inv_eps.certainly_ge(&d) == Some(true) {
                    zero()
                } else {
                    d
                }
            }
        };
        let margin = inv_alpha.as_ref().and_then(|ia| {
            let la = ia.ln();
            match (level0(&la), level0(&excess)) {
                (Some((a_lo, _)), Some((_, x_hi))) => certainly_positive(LogMagnitude::from_bounds(
                    (a_lo - x_hi) * (1.0 - 1e-15) - 1e-300,
                    (a_lo - x_hi) * (1.0 - 1e-15),
                )),
                _ => (la.certainly_ge(&excess.scale(2.0)) == Some(true)).then(|| la.scale(0.5)),
            }
        });
        ScheduleEntry { n, d, inv_alpha, inv_epsilon, margin, excess }
    }

    /// A plain floating-point entry.
    pub fn from_f64(n: usize, d: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        if !(d.is_finite() && d >= 0.0 && alpha >= 0.0 && alpha.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Precondition(format!("entry {n}: need d ≥ 0, α ≥ 0, ε > 0")));
        }
        let inv_alpha = (alpha > 0.0).then(|| LogMagnitude::from_f64(1.0 / alpha));
        Ok(Self::new(n, LogMagnitude::from_f64(d), inv_alpha, LogMagnitude::from_f64(1.0 / epsilon)))
    }

    /// Conservative doubles: the largest d, α and ε allowed by the bounds.
    pub fn f64_values(&self) -> Option<(f64, f64, f64)> {
        let (_, d) = level0(&self.d)?;
        let alpha = match &self.inv_alpha {
            None => 0.0,
            Some(ia) => 1.0 / level0(ia)?.0,
        };
        let eps = 1.0 / level0(&self.inv_epsilon)?.0;
        (d.is_finite() && alpha.is_finite() && eps.is_finite()).then_some((d, alpha, eps))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BendingSchedule {
    pub entries: Vec<ScheduleEntry>,
    pub mode: BetaMode,
}

impl BendingSchedule {
    pub fn new(entries: Vec<ScheduleEntry>, mode: BetaMode) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Precondition("empty schedule".into()));
        }
        Ok(BendingSchedule { entries, mode })
    }

    /// Models the closing separation as ε = C e^{−d} f(d) with f(d) = e^{cd},
    /// taking `C` from a fitted separation sandwich.
    pub fn from_leaves(leaves: &[LeafApprox], c: f64, big_c: f64, mode: BetaMode) -> Result<Self> {
        if !(c > 0.0 && c < 1.0 && big_c > 0.0) {
            return Err(Error::Precondition("need 0 < c < 1 and C > 0".into()));
        }
        let ln_c = big_c.ln();
        let mut entries = Vec::with_capacity(leaves.len());
        for la in leaves {
            let ln_inv_eps = la.d.scale(1.0 - c).add_small(-ln_c, -ln_c);
            if let Some((lo, _)) = level0(&ln_inv_eps) {
                if lo <= 0.0 {
                    return Err(Error::Precondition(format!("index {}: separation ε ≥ 1", la.k)));
                }
            }
            let mut e = ScheduleEntry::new(la.k, la.d, Some(la.inv_alpha), ln_inv_eps.exp());
            e.excess = positive_part(la.d.scale(c).add_small(ln_c, ln_c));
            let symbolic = match product_term(la, Separation::Exp(c), Goodness::AlphaBound) {
                ProductTerm::Below(m) => certainly_positive(m.add_small(-ln_c.max(0.0), -ln_c.max(0.0))),
                _ => None,
            };
            e.margin = symbolic.or(e.margin);
            entries.push(e);
        }
        Self::new(entries, mode)
    }

    /// `n` entries with the same α, leaf lengths `d = 1 + i/100` and
    /// separations `ε = e^{−d/2}`.
    pub fn constant(n: usize, alpha: f64, mode: BetaMode) -> Result<Self> {
        let entries = (1..=n)
            .map(|i| {
                let d = 1.0 + i as f64 * 0.01;
                ScheduleEntry::from_f64(i, d, alpha, (-0.5 * d).exp())
            })
            .collect::<Result<_>>()?;
        Self::new(entries, mode)
    }

    /// Leaves of `cf` at `ks` (κ = 1) with `C` fitted from the leaves
    /// themselves. Returns the fitted `C` alongside.
    pub fn from_rule(cf: &ContinuedFraction, ks: &[usize], c: f64, mode: BetaMode) -> Result<(Self, f64)> {
        let leaves = leaf_schedule(cf, ks, 1.0)?;
        let report = classify_cesag(&leaves, None, Separation::Exp(c), Goodness::AlphaBound);
        let (_, big_c) = report
            .fitted
            .ok_or_else(|| Error::TooCoarse("no representable sample to fit the separation constant".into()))?;
        Ok((Self::from_leaves(&leaves, c, big_c, mode)?, big_c))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,d,alpha,epsilon\n");
        for e in &self.entries {
            let alpha = e.inv_alpha.as_ref().map(recip_cell).unwrap_or_else(|| "0".into());
            s.push_str(&format!("{},{},{},{}\n", e.n, mag_cell(&e.d), alpha, recip_cell(&e.inv_epsilon)));
        }
        s
    }

    pub fn from_csv(text: &str, mode: BetaMode) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: Some(1), msg: "empty schedule".into() })?;
        let cols: Vec<String> = split_cells(header).iter().map(|c| c.trim().to_ascii_lowercase()).collect();
        if cols != ["n", "d", "alpha", "epsilon"] {
            return Err(Error::Parse {
                line: Some(1),
                msg: format!("expected header n,d,alpha,epsilon, got {header:?}"),
            });
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            let ln = i + 1;
            let err = |msg: String| Error::Parse { line: Some(ln), msg };
            let cells = split_cells(line);
            if cells.len() != 4 {
                return Err(err(format!("expected 4 cells, got {}", cells.len())));
            }
            let n: usize = cells[0].trim().parse().map_err(|_| err(format!("bad index {:?}", cells[0])))?;
            let d = parse_mag(cells[1].trim()).map_err(err)?;
            let inv_alpha = parse_small(cells[2].trim()).map_err(err)?;
            let inv_eps = parse_small(cells[3].trim()).map_err(err)?.ok_or_else(|| err("ε must be positive".into()))?;
            if let Some((lo, _)) = level0(&d) {
                if lo < 0.0 {
                    return Err(err("d must be non-negative".into()));
                }
            }
            if let Some(prev) = entries.last() {
                let prev: &ScheduleEntry = prev;
                if prev.d.certainly_ge(&d) == Some(true) && prev.d != d {
                    return Err(err("d must be increasing".into()));
                }
            }
            entries.push(ScheduleEntry::new(n, d, inv_alpha, inv_eps));
        }
        Self::new(entries, mode).map_err(|_| Error::Parse { line: None, msg: "schedule has no rows".into() })
    }
}

/// Splits at commas outside brackets, so `exp[a, b]` stays one cell.
fn split_cells(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in line.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&line[start..]);
    out
}

/// A number or an interval written as `[a, b]`, `exp[a, b]` or `exp^h[a, b]`.
fn parse_mag(s: &str) -> std::result::Result<LogMagnitude, String> {
    if let Ok(v) = s.parse::<f64>() {
        if !v.is_finite() {
            return Err(format!("non-finite value {s:?}"));
        }
        return Ok(LogMagnitude::from_f64(v));
    }
    let open = s.find('[').ok_or_else(|| format!("bad number {s:?}"))?;
    let prefix = &s[..open];
    let level = match prefix {
        "" => 0,
        "exp" => 1,
        p => p
            .strip_prefix("exp^")
            .and_then(|h| h.parse::<u32>().ok())
            .ok_or_else(|| format!("bad magnitude prefix {p:?}"))?,
    };
    let body = s[open + 1..].strip_suffix(']').ok_or_else(|| format!("unclosed interval {s:?}"))?;
    let (a, b) = body.split_once(',').ok_or_else(|| format!("interval needs two bounds: {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad bound {b:?}"))?;
    if !(a <= b) {
        return Err(format!("empty interval {s:?}"));
    }
    Ok(LogMagnitude::from_level(level, a, b))
}

/// A small positive quantity, returned as bounds on its reciprocal.
fn parse_small(s: &str) -> std::result::Result<Option<LogMagnitude>, String> {
    if let Some(rest) = s.strip_prefix("1/") {
        return parse_mag(rest).map(Some);
    }
    let v: f64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(format!("value must be non-negative, got {s:?}"));
    }
    Ok((v > 0.0).then(|| LogMagnitude::from_f64(1.0 / v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::leaf_schedule;
    use crate::numeric::{ContinuedFraction, DigitRule};
    use num_bigint::BigUint;

    #[test]
    fn beta_modes() {
        assert_eq!(beta_from_alpha(0.0, BetaMode::Equal), 0.0);
        assert!((beta_from_alpha(0.1, BetaMode::Capped(2.0)) - 0.2).abs() < 1e-15);
        assert_eq!(beta_from_alpha(1.5, BetaMode::Capped(2.0)), std::f64::consts::FRAC_PI_2);
        for a in [1e-9, 0.01, 0.3] {
            assert_eq!(beta_from_alpha(a, BetaMode::Equal) / a, 1.0);
        }
        assert_eq!(BetaMode::parse("capped:2").unwrap(), BetaMode::Capped(2.0));
        assert!(BetaMode::parse("capped:x").is_err());
    }

    #[test]
    fn f64_margin() {
        let e = ScheduleEntry::from_f64(1, 10.0, 1e-8, (-6.0f64).exp()).unwrap();
        let (lo, _) = (e.margin.unwrap().lower(), 0);
        assert!((lo - (8.0 * 10f64.ln() - 4.0)).abs() < 1e-9);
        assert!((e.excess.upper() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn desk_rule_fits_a_constant() {
        let cf = crate::numeric::well_approximated_cf(DigitRule::Desk);
        let ks: Vec<usize> = (2..=40).step_by(2).collect();
        let (s, big_c) = BendingSchedule::from_rule(&cf, &ks, 0.5, BetaMode::Equal).unwrap();
        assert_eq!(s.entries.len(), ks.len());
        assert!(big_c > 0.0 && big_c < 1.0, "{big_c}");
    }

    #[test]
    fn csv_round_trip_with_towers() {
        let cf = ContinuedFraction::with_rule(vec![BigUint::from(1u32), BigUint::from(1u32)], DigitRule::Desk).unwrap();
        let leaves = leaf_schedule(&cf, &[2, 4, 6], 1.0).unwrap();
        let s = BendingSchedule::from_leaves(&leaves, 0.5, 1.0, BetaMode::Equal).unwrap();
        let csv = s.to_csv();
        let back = BendingSchedule::from_csv(&csv, BetaMode::Equal).unwrap();
        assert_eq!(back.entries.len(), 3);
        assert_eq!(back.to_csv(), csv);
        assert!(s.entries[1].margin.is_some());
    }

    #[test]
    fn csv_errors_carry_lines() {
        let bad = "n,d,alpha,epsilon\n1,1.0,0.1,0.2\n2,2.0,zz,0.1\n";
        match BendingSchedule::from_csv(bad, BetaMode::Equal) {
            Err(Error::Parse { line: Some(3), .. }) => {}
            other => panic!("{other:?}"),
        }
        let header = "n,d,alpha\n";
        assert!(matches!(BendingSchedule::from_csv(header, BetaMode::Equal), Err(Error::Parse { line: Some(1), .. })));
        let zero_eps = "n,d,alpha,epsilon\n1,1.0,0.1,0\n";
        assert!(matches!(
            BendingSchedule::from_csv(zero_eps, BetaMode::Equal),
            Err(Error::Parse { line: Some(2), .. })
        ));
    }
}
