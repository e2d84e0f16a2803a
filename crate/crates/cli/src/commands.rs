//! Subcommand bodies. Each returns a report and, for the verification
//! subcommands, the first failing row if any.

use serde_json::json;

use nilwalk::estimators::{
    collision_l2, lemma5ii_cases, verify_lemma4, verify_lemma5i, verify_lemma5ii, verify_prop3, Verdict,
    EXHAUSTIVE_ORDER,
};
use nilwalk::exact::{
    build_kernel, l2_to_uniform, mixing_time, pushforward_abelian, tv_to_uniform, Evolver, Metric,
    DEFAULT_TOL,
};
use nilwalk::group::{Enumerable, FiniteGroup, UnitriangularGroup, DEFAULT_ENUMERATION_LIMIT};
use nilwalk::spectral::{
    cutoff_time, theorem1_bounds_spectral, theorem1_bounds_unitriangular_exact, BoundReport, CutoffWalk,
    ProductChain, DEFAULT_TYPE_LIMIT,
};
use nilwalk::structure::{lower_central_series, AbelianProjection};
use nilwalk::walk::{
    build_nestoridi_walk, build_nestoridi_walk_with_magnitude, build_superclass_walk, project_walk,
    JumpDistribution, NestoridiParams,
};
use nilwalk::Error;

use crate::config::{ExperimentConfig, WalkSelector};
use crate::report::{Cell, RunReport};
use crate::CliError;

pub struct Outcome {
    pub report: RunReport,
    /// Description of the first failing verification row.
    pub failure: Option<String>,
}

impl From<RunReport> for Outcome {
    fn from(report: RunReport) -> Self {
        Outcome { report, failure: None }
    }
}

const DEFAULT_TIME_TOL: f64 = 1e-4;
const DEFAULT_PAIRS: usize = 100_000;
const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_TRIALS: usize = 10_000;
const DEFAULT_C: [f64; 5] = [0.5, 0.75, 1.0, 1.25, 1.5];

struct Walk {
    jd: JumpDistribution<UnitriangularGroup>,
    selector: WalkSelector,
    params: Option<NestoridiParams>,
}

impl Walk {
    fn build(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let (n, p) = (cfg.require_n()?, cfg.require_p()?);
        let selector = cfg.walk()?;
        if cfg.magnitude.is_some() && selector != WalkSelector::B {
            return Err(CliError::Usage("--magnitude only applies to walk b".into()));
        }
        let (jd, params) = match &selector {
            WalkSelector::A => (build_superclass_walk(n, p)?, None),
            WalkSelector::B => {
                let (jd, params) = match cfg.magnitude {
                    Some(m) => build_nestoridi_walk_with_magnitude(n, p, m)?,
                    None => build_nestoridi_walk(n, p)?,
                };
                (jd, Some(params))
            }
            WalkSelector::Custom(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                let group = UnitriangularGroup::new(n, p)?;
                (JumpDistribution::from_law_file(group, &text, limit(cfg))?, None)
            }
        };
        Ok(Walk { jd, selector, params })
    }

    /// Label of the formula defining this walk.
    fn source(&self) -> &'static str {
        match self.selector {
            WalkSelector::A => "eq1",
            WalkSelector::B => "eq2",
            WalkSelector::Custom(_) => "",
        }
    }

    fn cutoff(&self) -> Option<(CutoffWalk, &'static str)> {
        match (&self.selector, self.params) {
            (WalkSelector::A, _) => Some((CutoffWalk::A, "cor2a")),
            (WalkSelector::B, Some(q)) if q.magnitude == q.b => Some((CutoffWalk::B, "cor2b")),
            (WalkSelector::B, Some(q)) => Some((CutoffWalk::BMagnitude(q.magnitude), "cor2b")),
            _ => None,
        }
    }

    fn flag_params(&self, report: &mut RunReport) {
        let p = self.jd.group().p();
        if p < 6 {
            report.flag("p_below_6");
        }
        if self.params.is_some_and(|q| q.degenerate) {
            report.flag("degenerate_b");
        }
    }
}

fn limit(cfg: &ExperimentConfig) -> usize {
    cfg.limit.unwrap_or(DEFAULT_ENUMERATION_LIMIT)
}

fn time_tol(cfg: &ExperimentConfig) -> f64 {
    cfg.time_tol.unwrap_or(DEFAULT_TIME_TOL)
}

fn require_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    cfg.grid()?
        .ok_or_else(|| CliError::Usage("missing --t-grid".into()))
}

/// Heat-kernel distance profile on the full group and its abelianization.
pub fn exact(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let walk = Walk::build(cfg)?;
    let grid = require_grid(cfg)?;
    let kernel = build_kernel(&walk.jd, limit(cfg))?;
    let proj = AbelianProjection::superdiagonal(walk.jd.group(), limit(cfg))?;
    let mut report = RunReport::new("exact", cfg, vec!["t", "d_tv", "d_l2", "d_tv_ab", "d_l2_ab", "dropped_mass"]);
    walk.flag_params(&mut report);
    let mut ev = Evolver::new(&kernel, DEFAULT_TOL);
    for &t in &grid {
        ev.advance_to(t)?;
        let d = ev.distribution();
        let ab = pushforward_abelian(d, &proj)?;
        report.push(vec![
            t.into(),
            tv_to_uniform(d).into(),
            l2_to_uniform(d).into(),
            tv_to_uniform(&ab).into(),
            l2_to_uniform(&ab).into(),
            ev.dropped_mass().into(),
        ]);
    }
    if let Some(eps) = &cfg.eps {
        let eps = cfg.epsilons(eps)?;
        let mut times = Vec::new();
        for e in eps {
            times.push(json!({
                "epsilon": e,
                "tv": mixing_time(&kernel, e, Metric::Tv, Some(time_tol(cfg)))?,
                "l2": mixing_time(&kernel, e, Metric::L2, Some(time_tol(cfg)))?,
            }));
        }
        report.summary = Some(json!({ "mixing_times": times }));
    }
    Ok(report.into())
}

fn bound_rows(report: &mut RunReport, r: &BoundReport, cutoff_source: &str) {
    let eps = Cell::from(r.epsilon);
    let mut row = |q: &str, s: &str, v: Cell| report.push(vec![q.into(), s.into(), eps.clone(), Cell::Empty, v]);
    row("lower_time", "eq6", r.lower_time.into());
    row("upper_time", "eq6", r.upper_time.into());
    row("l2_time", "eq6", r.l2_time.into());
    row("plumbing_time", "eq6", r.plumbing_time.into());
    row(
        "active_branch",
        "eq6",
        format!("{:?}", r.active_branch).to_lowercase().into(),
    );
    row("tv_lower_bound", "eq19", r.eq19_time.into());
    if let Some(t) = r.cutoff_time {
        row("cutoff_time", cutoff_source, t.into());
    }
}

/// Closed-form product-chain profile plus cutoff and bound formulas.
pub fn spectral(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let walk = Walk::build(cfg)?;
    let eps = cfg.epsilons(&[0.25])?;
    let chain = ProductChain::new(project_walk(&walk.jd)?);
    let mut report = RunReport::new("spectral", cfg, vec!["quantity", "source", "epsilon", "t", "value"]);
    walk.flag_params(&mut report);
    let ws = walk.source();
    report.push(vec!["k".into(), ws.into(), Cell::Empty, Cell::Empty, walk.jd.k().into()]);
    report.push(vec!["mu_star".into(), ws.into(), Cell::Empty, Cell::Empty, walk.jd.mu_star().into()]);
    report.push(vec!["spectral_gap".into(), "eq19".into(), Cell::Empty, Cell::Empty, chain.spectrum.gap.into()]);
    let (cw, cs) = walk.cutoff().unzip();
    if let Some(w) = cw {
        let n = walk.jd.group().dim();
        if n >= 3 {
            let t = cutoff_time(w, n, chain.p() as u64)?;
            report.push(vec!["cutoff_time".into(), cs.unwrap().into(), Cell::Empty, Cell::Empty, t.time.into()]);
        }
    }
    let type_limit = cfg.limit.map_or(DEFAULT_TYPE_LIMIT, |l| l as u64);
    for e in eps {
        let r = theorem1_bounds_spectral(&walk.jd, e, time_tol(cfg), type_limit)?;
        if r.flags.vacuous_lower {
            report.flag("vacuous_lower");
        }
        if r.lower_time.is_none() {
            report.flag("tv_types_over_limit");
        }
        // cutoff time already reported once above
        let r = BoundReport { cutoff_time: None, ..r };
        bound_rows(&mut report, &r, "");
    }
    if let Some(grid) = cfg.grid()? {
        let exact_tv = chain.type_count() <= type_limit as f64;
        for t in grid {
            report.push(vec!["l2_ab".into(), "eq20".into(), Cell::Empty, t.into(), chain.l2(t).into()]);
            if exact_tv {
                report.push(vec!["tv_ab".into(), "".into(), Cell::Empty, t.into(), chain.tv_exact(t, type_limit)?.into()]);
            }
        }
    }
    Ok(report.into())
}

/// Monte Carlo: collision estimates of `d_ℓ²(t)²` on G and importance
/// sampling TV estimates for the abelianized chain.
pub fn mc(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = cfg.require_seed()?;
    let walk = Walk::build(cfg)?;
    let grid = require_grid(cfg)?;
    let pairs = cfg.pairs.unwrap_or(DEFAULT_PAIRS);
    let mut report = RunReport::new("mc", cfg, vec!["quantity", "source", "t", "value", "std_error", "samples"]);
    walk.flag_params(&mut report);
    for (i, &t) in grid.iter().enumerate() {
        let c = collision_l2(&walk.jd, t, pairs, seed.wrapping_add(i as u64))?;
        report.push(vec![
            "l2_squared_collision".into(),
            "".into(),
            t.into(),
            c.estimate.into(),
            c.std_error.into(),
            pairs.into(),
        ]);
    }
    if let Some(samples) = cfg.samples {
        let chain = ProductChain::new(project_walk(&walk.jd)?);
        for (i, &t) in grid.iter().enumerate() {
            let (v, se) = match chain.tv_estimate(t, samples, seed.wrapping_add(1 << 32).wrapping_add(i as u64)) {
                Ok(e) => (e.estimate, e.std_error),
                Err(Error::DegenerateDensity { exact }) => {
                    report.flag("tv_ab_exact_at_t0");
                    (exact, 0.0)
                }
                Err(e) => return Err(e.into()),
            };
            report.push(vec!["tv_ab_estimate".into(), "".into(), t.into(), v.into(), se.into(), samples.into()]);
        }
    }
    Ok(report.into())
}

/// The comparison sandwich against exact mixing times on G.
pub fn verify_theorem1(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let walk = Walk::build(cfg)?;
    let eps = cfg.epsilons(&[0.05, 0.1, 0.25])?;
    let tol = time_tol(cfg);
    let kernel = build_kernel(&walk.jd, limit(cfg))?;
    let mut report = RunReport::new("verify theorem1", cfg, vec!["quantity", "source", "epsilon", "value", "pass"]);
    walk.flag_params(&mut report);
    let cutoff_source = walk.cutoff().map_or("", |c| c.1);
    let mut failure = None;
    for e in eps {
        let r = theorem1_bounds_unitriangular_exact(&walk.jd, e, tol, limit(cfg))?;
        if r.flags.vacuous_lower {
            report.flag("vacuous_lower");
        }
        let exact = mixing_time(&kernel, e, Metric::Tv, Some(tol))?.estimate;
        let lower = r.lower_time.expect("exact path evaluates the lower side");
        let pass = lower <= exact + tol && exact <= r.upper_time + tol;
        let mut row = |q: &str, s: &str, v: Cell, ok: Cell| report.push(vec![q.into(), s.into(), e.into(), v, ok]);
        row("lower_time", "eq6", lower.into(), Cell::Empty);
        row("exact_time", "", exact.into(), Cell::Empty);
        row("upper_time", "eq6", r.upper_time.into(), Cell::Empty);
        row("l2_time", "eq6", r.l2_time.into(), Cell::Empty);
        row("plumbing_time", "eq6", r.plumbing_time.into(), Cell::Empty);
        row("tv_lower_bound", "eq19", r.eq19_time.into(), Cell::Empty);
        if let Some(t) = r.cutoff_time {
            row("cutoff_time", cutoff_source, t.into(), Cell::Empty);
        }
        row("sandwich", "eq6", Cell::Empty, pass.into());
        if !pass && failure.is_none() {
            failure = Some(format!(
                "sandwich fails at ε = {e}: lower {lower}, exact {exact}, upper {}",
                r.upper_time
            ));
        }
    }
    Ok(Outcome { report, failure })
}

fn verdict_row(report: &mut RunReport, v: &Verdict, failure: &mut Option<String>) {
    let params = serde_json::to_string(&v.params).expect("params serialize");
    let summary = serde_json::to_string(&v.counts_summary).expect("summary serializes");
    let lemma = serde_json::to_value(v.lemma).expect("lemma serializes");
    let lemma = lemma.as_str().unwrap_or_default().to_string();
    if !v.pass && failure.is_none() {
        *failure = Some(format!("{lemma} fails on {} with {params}: {summary}", v.group));
    }
    report.push(vec![lemma.into(), v.group.clone().into(), params.into(), v.pass.into(), summary.into()]);
}

/// Exact lemma checks on U_n(p), plus subgroup sums on Z_p^m.
pub fn verify_lemmas(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (n, p) = (cfg.require_n()?, cfg.require_p()?);
    let group = UnitriangularGroup::new(n, p)?;
    let series = lower_central_series(&group, limit(cfg))?;
    let size = series.group_size();
    let mut report = RunReport::new("verify lemmas", cfg, vec!["lemma", "group", "params", "pass", "counts_summary"]);
    let mut failure = None;
    verdict_row(&mut report, &verify_lemma4(&group, &series)?, &mut failure);
    // every element of G as s, folded into one row per level
    for level in 2..=series.class() {
        let mut failed = Vec::new();
        for idx in 0..size {
            let v = verify_lemma5i(&group, &series, &group.element(idx), level)?;
            if !v.pass {
                failed.push(v);
            }
        }
        match failed.first() {
            Some(v) => verdict_row(&mut report, v, &mut failure),
            None => report.push(vec![
                "lemma5i".into(),
                group.label().into(),
                json!({ "level": level, "s": "all elements" }).to_string().into(),
                true.into(),
                json!({ "checked": size }).to_string().into(),
            ]),
        }
    }
    let m = (n - 1).min(3);
    if p <= 7 {
        let cases = lemma5ii_cases(p as u32, m)?;
        let mut bad = None;
        for case in &cases {
            let v = verify_lemma5ii(p as u32, m, case)?;
            if !v.pass {
                bad = Some(v);
                break;
            }
        }
        match bad {
            Some(v) => verdict_row(&mut report, &v, &mut failure),
            None => report.push(vec![
                "lemma5ii".into(),
                format!("Z_{p}^{m}").into(),
                json!({ "cases": cases.len() }).to_string().into(),
                true.into(),
                json!({ "checked": cases.len() }).to_string().into(),
            ]),
        }
    } else {
        report.flag("lemma5ii_skipped_p_above_7");
    }
    let (trials, seed) = if size <= EXHAUSTIVE_ORDER {
        (0, cfg.seed.unwrap_or(0))
    } else {
        (cfg.trials.unwrap_or(DEFAULT_TRIALS), cfg.require_seed()?)
    };
    verdict_row(&mut report, &verify_prop3(&group, &series, trials, seed)?, &mut failure);
    Ok(Outcome { report, failure })
}

/// TV of the abelianized chain at multiples of the cutoff time.
pub fn profile_cutoff(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = cfg.require_seed()?;
    let walk = Walk::build(cfg)?;
    let (w, source) = walk
        .cutoff()
        .ok_or_else(|| CliError::Usage("profile cutoff needs walk a or b".into()))?;
    let n = walk.jd.group().dim();
    let p = walk.jd.group().p() as u64;
    let tn = cutoff_time(w, n, p)?;
    let cs = cfg.c.clone().unwrap_or_else(|| DEFAULT_C.to_vec());
    if cs.is_empty() || cs.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
        return Err(CliError::Usage("--c must be a nonempty list of nonnegative numbers".into()));
    }
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let chain = ProductChain::new(project_walk(&walk.jd)?);
    let type_limit = cfg.limit.map_or(DEFAULT_TYPE_LIMIT, |l| l as u64);
    let exact_tv = chain.type_count() <= type_limit as f64;
    let mut report = RunReport::new(
        "profile cutoff",
        cfg,
        vec!["c", "t", "source", "tv", "std_error", "samples", "tv_exact"],
    );
    walk.flag_params(&mut report);
    report.summary = Some(json!({ "cutoff_time": tn.time, "source": source }));
    for (i, &c) in cs.iter().enumerate() {
        let t = c * tn.time;
        let (v, se) = match chain.tv_estimate(t, samples, seed.wrapping_add(i as u64)) {
            Ok(e) => (e.estimate, e.std_error),
            Err(Error::DegenerateDensity { exact }) => (exact, 0.0),
            Err(e) => return Err(e.into()),
        };
        let exact = if exact_tv { Some(chain.tv_exact(t, type_limit)?) } else { None };
        report.push(vec![c.into(), t.into(), source.into(), v.into(), se.into(), samples.into(), exact.into()]);
    }
    Ok(report.into())
}
