use std::f64::consts::{FRAC_PI_2, LN_2};

use serde::Serialize;

use super::schedule::{beta_from_alpha, BendingSchedule, BetaMode, ScheduleEntry};
use crate::flat::leaf::recip_cell;
use crate::hyperbolic::{bent_plane_radius, inclination_sin, radius_after_reverse_crossing, BentRadius};
use crate::numeric::LogMagnitude;
use crate::{Error, Result};

/// Past this distance the step switches to log-domain bounds.
const MODERATE_MAX: f64 = 600.0;
/// Smallest radius handled by direct composition.
const TINY: f64 = 1e-280;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoofState {
    pub k: usize,
    pub r: f64,
    /// Certified lower bound on `r`.
    pub cert: f64,
    /// Radius of the geodesic carrying the next leaf. NaN in the log domain.
    pub r_g: f64,
    /// Signed distance from that geodesic's peak to the start point, positive
    /// when the start is already past the peak. NaN in the log domain.
    pub offset: f64,
    /// Upper bound on ln(r / r_G).
    pub ratio_ln: LogMagnitude,
    /// Upper bound on max(0, offset).
    pub offset_up: LogMagnitude,
    pub log_domain: bool,
    /// Sum of the per-step contraction defects certified so far.
    pub defect_sum: f64,
}

fn clamp0(x: f64) -> LogMagnitude {
    let x = x.max(0.0);
    LogMagnitude::from_bounds(x, x * (1.0 + 1e-15) + 1e-300)
}

fn level0(m: &LogMagnitude) -> Option<(f64, f64)> {
    m.is_finite_f64().then(|| (m.lower(), m.upper()))
}

impl RoofState {
    /// Sphere of radius `r` with the first leaf on a geodesic of radius
    /// `r_g`, starting at its peak.
    pub fn new(r: f64, r_g: f64) -> Result<Self> {
        inclination_sin(r_g, r)?;
        Ok(RoofState {
            k: 0,
            r,
            cert: r,
            r_g,
            offset: 0.0,
            ratio_ln: clamp0((r / r_g).ln()),
            offset_up: clamp0(0.0),
            log_domain: false,
            defect_sum: 0.0,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepInput {
    pub d: f64,
    pub epsilon: f64,
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    /// Radius of the ridge geodesic, when computed directly.
    pub ridge: Option<f64>,
    /// r_G / (1 + ε e^{D}), the bound fed into the certificate.
    pub reverse_bound: Option<f64>,
    /// r_G / (1 + ε e^{−D}), the bound had the crossing faced away from the vertex.
    pub forward_bound: Option<f64>,
    /// Certified lower bound on r_{k+1} / r_k.
    pub factor: f64,
    pub vertical: bool,
}

/// One leaf, one crossing, one bend, computed directly in double precision.
/// The crossing is made toward the shared vertex at distance d + offset
/// from the peak; the plane is then bent by `beta` about the ridge.
pub fn roof_step(state: &RoofState, input: &StepInput) -> Result<(RoofState, StepRecord)> {
    if state.log_domain {
        return Err(Error::LogDomain("state has left double range".into()));
    }
    let StepInput { d, epsilon, beta } = *input;
    if !(d.is_finite() && epsilon > 0.0 && epsilon.is_finite() && (0.0..std::f64::consts::PI).contains(&beta)) {
        return Err(Error::Precondition(format!("bad step input d = {d}, ε = {epsilon}, β = {beta}")));
    }
    let (r, r_g) = (state.r, state.r_g);
    let big_d = d + state.offset;
    let x = epsilon * big_d.exp();
    if !(x.is_finite() && big_d < MODERATE_MAX) {
        return Err(Error::LogDomain(format!("crossing at distance {big_d}")));
    }
    let rev = radius_after_reverse_crossing(r_g, r, big_d, epsilon)?;
    if rev.bound < TINY {
        return Err(Error::LogDomain("ridge radius below double range".into()));
    }
    let forward = r_g / (1.0 + epsilon * (-big_d).exp());
    let s = inclination_sin(r_g, r)?;
    let ln_peak = if x > 1e150 {
        x.ln() + 0.5 * (2.0 * s / x + 1.0 / (x * x)).ln_1p()
    } else {
        0.5 * (2.0 * x * s + x * x).ln_1p()
    };
    let offset = big_d - ln_peak;
    let (r_new, factor, vertical) = if beta == 0.0 {
        (r, 1.0, false)
    } else {
        match bent_plane_radius(r, rev.value, beta)? {
            BentRadius::Vertical => (f64::INFINITY, 0.0, true),
            BentRadius::Finite(r_new) => {
                let low = match bent_plane_radius(r, rev.bound, beta)? {
                    BentRadius::Finite(b) => b.min(r_new),
                    BentRadius::Vertical => r_new,
                };
                (r_new, low / r, false)
            }
        }
    };
    let record = StepRecord {
        ridge: Some(rev.value),
        reverse_bound: Some(rev.bound),
        forward_bound: Some(forward),
        factor,
        vertical,
    };
    let cert = (state.cert * factor).min(r_new);
    let next = RoofState {
        k: state.k + 1,
        r: r_new,
        cert,
        r_g: rev.value,
        offset,
        ratio_ln: clamp0((r_new / rev.value).ln()),
        offset_up: clamp0(offset),
        log_domain: false,
        defect_sum: state.defect_sum + (1.0 - factor).max(0.0),
    };
    Ok((next, record))
}

/// Bound-only step. With x = ε e^{d + offset} and y = β (r/r_G)(1 + x),
/// the new radius is at least r/(1 + y); ln y is bounded through the
/// entry's margin so that tower-sized schedules stay decidable.
fn log_step(state: &RoofState, entry: &ScheduleEntry, mode: BetaMode) -> Option<(RoofState, StepRecord, bool)> {
    let k = state.k + 1;
    let target_ln = (k as f64 + 2.0) * LN_2;
    let s = state.ratio_ln.add_small(0.0, target_ln + LN_2);
    let ln_k_up = state.offset_up.add(&entry.excess);
    let (y, certified, ln_sec) = match &entry.inv_alpha {
        None => (0.0, true, 0.0),
        Some(ia) => {
            let ln_d = mode.factor().ln();
            let l = ia.ln().add_small(-ln_d, -ln_d);
            let m = entry.margin.map(|m| m.add_small(-ln_d, -ln_d));
            let t = s.add(&state.offset_up);
            let by_margin = m.is_some_and(|m| m.certainly_ge(&t) == Some(true));
            let by_excess = l.certainly_ge(&s.add(&ln_k_up)) == Some(true);
            let certified = l.certainly_ge(&s) == Some(true) && (by_margin || by_excess);
            // direct value when everything is an ordinary double
            let direct = (|| {
                let (_, a) = level0(&state.ratio_ln)?;
                let (_, off) = level0(&state.offset_up)?;
                let (l_lo, _) = level0(&l)?;
                let (_, kx) = level0(&ln_k_up)?;
                let mut worst = kx.max(0.0) - l_lo;
                if let Some((m_lo, _)) = m.as_ref().and_then(level0) {
                    worst = worst.min(off - m_lo);
                }
                let worst = worst.max(-l_lo);
                let v = a + LN_2 + worst;
                Some((v + v.abs() * 1e-15 + 1e-15).exp())
            })();
            let y = match direct {
                Some(y) => y,
                None if certified => {
                    let far = s.add_small(0.0, 745.0);
                    let deep = l.certainly_ge(&far) == Some(true)
                        && (m.is_some_and(|m| m.certainly_ge(&far.add(&state.offset_up)) == Some(true))
                            || l.certainly_ge(&far.add(&ln_k_up)) == Some(true));
                    if deep {
                        0.0
                    } else {
                        (-target_ln).exp()
                    }
                }
                None => return None,
            };
            let beta_hi = match level0(&l) {
                Some((l_lo, _)) => (-l_lo).exp() * (1.0 + 1e-15),
                None => 0.0,
            };
            let beta_hi = match mode {
                BetaMode::Capped(_) => beta_hi.min(FRAC_PI_2),
                _ => beta_hi,
            };
            if beta_hi >= FRAC_PI_2 {
                return None;
            }
            let ln_sec = if beta_hi < 1e-8 { beta_hi * beta_hi } else { -(beta_hi.cos().ln()) * (1.0 + 1e-12) };
            (y, certified || y <= (-target_ln).exp(), ln_sec)
        }
    };
    let factor = if y == 0.0 { 1.0 } else { (1.0 - y / (1.0 + y)) * (1.0 - 1e-15) };
    let ln_k_pos = match level0(&ln_k_up) {
        Some((_, hi)) => clamp0(hi),
        None => ln_k_up,
    };
    let ratio_ln = state.ratio_ln.add(&ln_k_pos).add_small(0.0, LN_2 + ln_sec);
    let offset_up = match level0(&entry.inv_epsilon.ln()) {
        Some((_, hi)) => clamp0(hi),
        None => entry.inv_epsilon.ln(),
    };
    let cert = state.cert * factor;
    let next = RoofState {
        k,
        r: cert,
        cert,
        r_g: f64::NAN,
        offset: f64::NAN,
        ratio_ln,
        offset_up,
        log_domain: true,
        defect_sum: state.defect_sum + (1.0 - factor),
    };
    let record = StepRecord { ridge: None, reverse_bound: None, forward_bound: None, factor, vertical: false };
    Some((next, record, certified))
}

struct Candidate {
    state: RoofState,
    record: StepRecord,
    beta: f64,
    target_met: bool,
}

fn evaluate(state: &RoofState, entry: &ScheduleEntry, mode: BetaMode) -> Option<Candidate> {
    let target = 1.0 - (-((state.k as f64 + 3.0) * LN_2)).exp();
    if !state.log_domain {
        if let Some((d, alpha, eps)) = entry.f64_values() {
            let beta = beta_from_alpha(alpha, mode);
            let input = StepInput { d, epsilon: eps, beta };
            match roof_step(state, &input) {
                Ok((next, record)) => {
                    let target_met = record.factor >= target;
                    return Some(Candidate { state: next, record, beta, target_met });
                }
                Err(Error::LogDomain(_)) => {}
                Err(_) => return None,
            }
        }
    }
    let (next, record, certified) = log_step(state, entry, mode)?;
    let beta = entry.inv_alpha.map_or(0.0, |ia| beta_from_alpha(1.0 / ia.approx(), mode));
    Some(Candidate { state: next, record, beta, target_met: certified })
}

/// How the next schedule index is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// Always the next entry.
    Sequential,
    /// Probes offsets 1, 2, 4, … past the last used entry, at most `budget`
    /// of them, and takes the first whose certified factor reaches
    /// 1 − 2^{−(k+2)}; failing that, the best factor seen.
    Doubling { budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoofVerdict {
    BoundedBelow,
    Decayed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub k: usize,
    /// Label of the schedule entry used.
    pub n: usize,
    /// Position of that entry in the schedule.
    pub position: usize,
    pub r: f64,
    pub bound: f64,
    pub beta: f64,
    /// β as written to CSV, a reciprocal interval when it underflows.
    pub beta_cell: String,
    #[serde(flatten)]
    pub record: StepRecord,
    pub log_domain: bool,
    pub target_met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionTrace {
    pub verdict: RoofVerdict,
    pub r1: f64,
    pub floor: f64,
    pub min_bound: f64,
    pub reason: Option<String>,
    pub steps: Vec<TraceStep>,
}

impl RecursionTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,n,r,bound,beta\n");
        for st in &self.steps {
            s.push_str(&format!("{},{},{},{},{}\n", st.k, st.n, st.r, st.bound, st.beta_cell));
        }
        s
    }

    /// Radii of the recorded spheres, starting with r₁.
    pub fn radii(&self) -> Vec<f64> {
        std::iter::once(self.r1).chain(self.steps.iter().map(|s| s.r)).collect()
    }
}

fn beta_cell(entry: &ScheduleEntry, beta: f64, mode: BetaMode) -> String {
    match &entry.inv_alpha {
        None => "0".into(),
        Some(ia) if !ia.is_finite_f64() || beta == 0.0 => match mode {
            BetaMode::Equal => recip_cell(ia),
            _ => format!("{}*{}", mode.factor(), recip_cell(ia)),
        },
        Some(_) => format!("{beta}"),
    }
}

pub fn run_roof(schedule: &BendingSchedule, selector: Selector, max_steps: usize, init: RoofState) -> RecursionTrace {
    let r1 = init.r;
    let floor = r1 / 100.0;
    let mut trace = RecursionTrace {
        verdict: RoofVerdict::Inconclusive,
        r1,
        floor,
        min_bound: init.cert,
        reason: None,
        steps: Vec::new(),
    };
    let entries = &schedule.entries;
    let mode = schedule.mode;
    let mut state = init;
    let mut last: Option<usize> = None;
    let next_pos = |last: Option<usize>, off: usize| last.map_or(off - 1, |l| l + off);
    for k in 1..=max_steps {
        let chosen = match selector {
            Selector::Sequential => {
                let pos = next_pos(last, 1);
                if pos >= entries.len() {
                    trace.reason = Some(format!("schedule exhausted at position {pos} after {} steps", k - 1));
                    return trace;
                }
                evaluate(&state, &entries[pos], mode).map(|c| (pos, c))
            }
            Selector::Doubling { budget } => {
                if budget == 0 {
                    trace.reason = Some("empty selector budget".into());
                    return trace;
                }
                let mut best: Option<(usize, Candidate)> = None;
                let mut off = 1;
                for _ in 0..budget {
                    let pos = next_pos(last, off);
                    if pos >= entries.len() {
                        break;
                    }
                    if let Some(c) = evaluate(&state, &entries[pos], mode) {
                        if c.target_met {
                            best = Some((pos, c));
                            break;
                        }
                        if best.as_ref().is_none_or(|(_, b)| c.record.factor > b.record.factor) {
                            best = Some((pos, c));
                        }
                    }
                    off *= 2;
                }
                best
            }
        };
        let Some((pos, c)) = chosen else {
            let pos = next_pos(last, 1);
            trace.reason = Some(format!("no usable entry from position {pos} at step {k}"));
            return trace;
        };
        let entry = &entries[pos];
        last = Some(pos);
        state = c.state;
        trace.min_bound = trace.min_bound.min(state.cert);
        trace.steps.push(TraceStep {
            k,
            n: entry.n,
            position: pos,
            r: state.r,
            bound: state.cert,
            beta: c.beta,
            beta_cell: beta_cell(entry, c.beta, mode),
            record: c.record,
            log_domain: state.log_domain,
            target_met: c.target_met,
        });
        if c.record.vertical {
            trace.verdict = RoofVerdict::Decayed;
            trace.reason = Some(format!("vertical plane at step {k}"));
            return trace;
        }
        if state.r < floor {
            if state.log_domain {
                trace.reason = Some(format!("certificate fell below r₁/100 at step {k}"));
            } else {
                trace.verdict = RoofVerdict::Decayed;
                trace.reason = Some(format!("radius below r₁/100 at step {k}"));
            }
            return trace;
        }
    }
    if trace.min_bound > r1 / 2.0 {
        trace.verdict = RoofVerdict::BoundedBelow;
    } else {
        trace.reason = Some(format!("certified radius dipped to {} without decaying", trace.min_bound));
    }
    trace
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{bending_oracle, crossing_radius_oracle};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constant(n: usize, alpha: f64) -> BendingSchedule {
        BendingSchedule::constant(n, alpha, BetaMode::Equal).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn certificate_never_exceeds_radius(alpha in 0.0..0.2f64, n in 1usize..60, budget in 0usize..6) {
            let sel = if budget == 0 { Selector::Sequential } else { Selector::Doubling { budget } };
            let t = run_roof(&constant(n, alpha), sel, n, RoofState::new(1.0, 1.0).unwrap());
            for s in &t.steps {
                prop_assert!(s.r > 0.0);
                prop_assert!(s.bound <= s.r, "step {}: {} > {}", s.k, s.bound, s.r);
            }
            prop_assert!(t.min_bound <= 1.0);
        }
    }

    #[test]
    fn no_bending_no_change() {
        let s = RoofState::new(1.0, 1.0).unwrap();
        let (n, rec) = roof_step(&s, &StepInput { d: 3.0, epsilon: 1e-12, beta: 0.0 }).unwrap();
        assert_eq!(n.r, 1.0);
        assert_eq!(n.cert, 1.0);
        assert_eq!(rec.factor, 1.0);
    }

    #[test]
    fn step_matches_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let r = rng.gen_range(0.5..2.0);
            let r_g = r * rng.gen_range(0.1..1.0);
            let s = RoofState::new(r, r_g).unwrap();
            let input = StepInput {
                d: rng.gen_range(0.0..5.0),
                epsilon: rng.gen_range(1e-4..0.5),
                beta: rng.gen_range(0.0..0.3),
            };
            let (n, rec) = roof_step(&s, &input).unwrap();
            let ridge = crossing_radius_oracle(r_g, r, input.d, input.epsilon, true).unwrap();
            assert!((rec.ridge.unwrap() - ridge).abs() < 1e-10 * ridge);
            let o = bending_oracle(r, ridge, input.beta).unwrap().radius().unwrap();
            assert!((n.r - o).abs() < 1e-9 * o);
            assert!(n.cert <= n.r);
            assert!(rec.reverse_bound.unwrap() <= rec.ridge.unwrap());
        }
    }

    #[test]
    fn single_step_is_monotone_for_small_bends() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..300 {
            let s = RoofState::new(1.0, rng.gen_range(0.2..1.0)).unwrap();
            let d = rng.gen_range(0.0..4.0);
            let eps = rng.gen_range(1e-3..0.3);
            let beta = rng.gen_range(0.0..0.5);
            let (n, rec) = roof_step(&s, &StepInput { d, epsilon: eps, beta }).unwrap();
            let more_eps = roof_step(&s, &StepInput { d, epsilon: eps * 1.1, beta }).unwrap().0.r;
            assert!(more_eps <= n.r);
            // bending further only shrinks the sphere until the normal passes the vertical
            if beta * 1.1 <= (rec.ridge.unwrap() / s.r).acos() {
                let more_beta = roof_step(&s, &StepInput { d, epsilon: eps, beta: beta * 1.1 }).unwrap().0.r;
                assert!(more_beta <= n.r);
            }
        }
    }

    #[test]
    fn large_constant_bend_decays() {
        let mut s = RoofState::new(1.0, 1.0).unwrap();
        let mut steps = 0;
        while s.r >= 0.01 {
            s = roof_step(&s, &StepInput { d: 1.0, epsilon: 0.1, beta: 0.5 }).unwrap().0;
            steps += 1;
            assert!(steps < 50);
        }
    }

    #[test]
    fn zero_schedule_is_a_fixed_point() {
        let t = run_roof(&constant(500, 0.0), Selector::Sequential, 500, RoofState::new(1.0, 0.8).unwrap());
        assert_eq!(t.verdict, RoofVerdict::BoundedBelow);
        assert!(t.steps.iter().all(|s| s.r == 1.0 && s.bound == 1.0));
    }

    #[test]
    fn constant_alpha_decays() {
        for sel in [Selector::Sequential, Selector::Doubling { budget: 8 }] {
            let t = run_roof(&constant(400, 0.05), sel, 400, RoofState::new(1.0, 1.0).unwrap());
            assert_eq!(t.verdict, RoofVerdict::Decayed, "{:?}", t.reason);
        }
    }

    #[test]
    fn empty_budget_is_inconclusive() {
        let t = run_roof(&constant(5, 0.01), Selector::Doubling { budget: 0 }, 5, RoofState::new(1.0, 1.0).unwrap());
        assert_eq!(t.verdict, RoofVerdict::Inconclusive);
        let t = run_roof(&constant(5, 0.0), Selector::Sequential, 10, RoofState::new(1.0, 1.0).unwrap());
        assert_eq!(t.verdict, RoofVerdict::Inconclusive);
        assert!(t.reason.unwrap().contains("position 5"));
    }
}
