//! Run configuration, orchestration of the verification campaign, and the
//! machine-readable report.
//!
//! Every random draw comes from a [`SampleStream`] keyed by `(seed, check name,
//! sample index)`, so the report body depends only on the configuration.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::center::{represent, rule_soundness, RANK_CUTOFF};
use crate::algebra::coeffs::{ScaledBrackets, SyntheticProbe};
use crate::algebra::rewrite::{is_normal, rule_for, RuleInstance};
use crate::algebra::{
    center_rank, check_center_commutes, check_y_relations, extract_coefficients, normal_form, AlgElem, CenterForm,
    Env, Eq24Reading, Generator, LatticeFn, LatticePoint, ProbeBrackets, UnitBrackets,
};
use crate::algebra::elem::max_coefficient_diff;
use crate::check::{worst, Verdict};
use crate::error::{Error, Result};
use crate::face::{build_r, check_degeneration, ice_rule_violations, FaceWeights};
use crate::fusion::{
    check_column_antisymmetry, column_antisymmetry_residual, dressed_ratios, fused_column_with, qdet_matrix,
    specialized_points, theta_det_ratio,
};
use crate::lattice::a_components;
use crate::ops::{antisymmetrizer, cherednik, cherednik_residual, permutation_operator, CherednikVariant, Permutation};
use crate::qdet::{calibrate, check_centrality, check_dybr, Calibration, Convention, Representation};
use crate::sampling::{random_complex, random_weight, SampleStream};
use crate::theta::{theta_eval, theta_slot, ModularParams, ThetaChar, C64};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

/// Negative controls must exceed this to count as detected.
pub const CONTROL_FLOOR: f64 = 1e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantSelection {
    Plain,
    Shifted,
    #[default]
    Both,
}

impl VariantSelection {
    fn variants(self) -> Vec<CherednikVariant> {
        match self {
            VariantSelection::Plain => vec![CherednikVariant::Plain],
            VariantSelection::Shifted => vec![CherednikVariant::Shifted],
            VariantSelection::Both => CherednikVariant::ALL.to_vec(),
        }
    }
}

/// Complex numbers are written `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub tau: [f64; 2],
    pub w: [f64; 2],
    /// Defaults to a fixed generic vector of length `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_vec: Option<Vec<[f64; 2]>>,
    /// Defaults to `w/n - z0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta0: Option<[f64; 2]>,
    pub z0: [f64; 2],
    pub seed: u64,
    pub samples: usize,
    pub tol_series: f64,
    pub tol_residual: f64,
    pub checks: Vec<String>,
    pub eq24_reading: Eq24Reading,
    pub cherednik_variant: VariantSelection,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn cplx(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ModularParams::defaults(2).expect("default parameters are valid");
        Self {
            n: 2,
            tau: pair(p.tau),
            w: pair(p.w),
            w_vec: None,
            delta0: None,
            z0: pair(p.z0),
            seed: 1,
            samples: 20,
            tol_series: p.tol_series,
            tol_residual: p.tol_residual,
            checks: vec!["all".into()],
            eq24_reading: Eq24Reading::GenericPair,
            cherednik_variant: VariantSelection::Both,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `.json` files are read as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.n) {
            return Err(Error::Config(format!("n must be 2, 3 or 4, got {}", self.n)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        self.selected()?;
        self.params().map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        })?;
        Ok(())
    }

    pub fn params(&self) -> Result<ModularParams> {
        let defaults = ModularParams::defaults(self.n)?;
        let w_vec = match &self.w_vec {
            Some(v) => v.iter().copied().map(cplx).collect(),
            None => defaults.w_vec,
        };
        let mut p = ModularParams::new(
            self.n,
            cplx(self.tau),
            cplx(self.w),
            w_vec,
            cplx(self.z0),
            self.delta0.map(cplx),
        )?;
        p.tol_series = self.tol_series;
        p.tol_residual = self.tol_residual;
        p.validate()?;
        Ok(p)
    }

    /// Selected checks in execution order.
    fn selected(&self) -> Result<Vec<&'static CheckDef>> {
        let mut names = BTreeSet::new();
        for c in &self.checks {
            if c == "all" {
                names.extend(CHECKS.iter().map(|s| s.name));
            } else if let Some(s) = CHECKS.iter().find(|s| s.name == c) {
                names.insert(s.name);
            } else {
                return Err(Error::Config(format!(
                    "unknown check {c:?}; known: all, {}",
                    CHECKS.iter().map(|s| s.name).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        if names.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        Ok(CHECKS.iter().filter(|s| names.contains(s.name)).collect())
    }
}

/// One line of the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity under test.
    pub anchor: String,
    /// SHA-256 of the parameters, seed, check name and sample count.
    pub params_digest: String,
    pub samples: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub convention: Convention,
    pub description: String,
    pub candidates: Vec<(String, f64)>,
    pub index_convention: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub status: i32,
    /// Readings the run relies on.
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub calibration: Option<CalibrationSummary>,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn exit_status(&self) -> i32 {
        self.summary.status
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serialisable") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.calibration {
            let _ = writeln!(s, "calibration: {}", c.description);
        }
        for r in &self.checks {
            let _ = writeln!(
                s,
                "{:<12} {:<28} residual {:>10.3e}  threshold {:.1e}  samples {:>4}  [{}]",
                r.verdict.name().to_uppercase(),
                r.name,
                r.max_residual,
                r.threshold,
                r.samples,
                r.anchor
            );
            for n in &r.notes {
                let _ = writeln!(s, "{:<12} {:<28} - {n}", "", "");
            }
        }
        let _ = writeln!(
            s,
            "summary: {} passed, {} failed, {} inconclusive, exit status {}",
            self.summary.passed, self.summary.failed, self.summary.inconclusive, self.summary.status
        );
        for a in &self.summary.assumptions {
            let _ = writeln!(s, "assumption: {a}");
        }
        s
    }
}

/// A check result before the orchestrator attaches anchor and digest.
#[derive(Clone, Debug)]
struct Outcome {
    name: String,
    samples: usize,
    max_residual: f64,
    threshold: f64,
    verdict: Verdict,
    notes: Vec<String>,
}

impl Outcome {
    fn judged(name: &str, samples: usize, max_residual: f64, threshold: f64, notes: Vec<String>) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            threshold,
            verdict: Verdict::from_pass(max_residual < threshold),
            notes,
        }
    }

    /// Downgrade to a failure when a negative control went undetected.
    fn require_control(mut self, what: &str, control: f64) -> Self {
        self.notes.push(format!("negative control ({what}): residual {control:.3e}"));
        if !(control >= CONTROL_FLOOR) {
            self.verdict = Verdict::Fail;
            self.notes.push(format!("negative control below {CONTROL_FLOOR:e}; the check cannot discriminate"));
        }
        self
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    params: ModularParams,
    rep: Option<&'a Representation>,
    calibration: Option<&'a Calibration>,
    calibration_error: Option<&'a str>,
}

impl Ctx<'_> {
    fn stream(&self, name: &str) -> SampleStream {
        SampleStream::new(self.cfg.seed, name)
    }

    fn samples(&self) -> usize {
        self.cfg.samples
    }

    fn rep(&self) -> Result<&Representation> {
        self.rep.ok_or_else(|| {
            Error::Calibration(format!(
                "no calibrated representation: {}",
                self.calibration_error.unwrap_or("calibration did not run")
            ))
        })
    }
}

type CheckFn = fn(&Ctx) -> Result<Vec<Outcome>>;

struct CheckDef {
    name: &'static str,
    anchor: &'static str,
    needs_rep: bool,
    run: CheckFn,
}

const CHECKS: &[CheckDef] = &[
    CheckDef { name: "theta-oddness", anchor: "odd theta function: sigma(-z) = -sigma(z)", needs_rep: false, run: theta_oddness },
    CheckDef {
        name: "theta-quasi-periodicity",
        anchor: "theta with characteristics under z -> z + 1 and z -> z + tau",
        needs_rep: false,
        run: theta_quasi_periodicity,
    },
    CheckDef { name: "theta-truncation", anchor: "theta series truncation", needs_rep: false, run: theta_truncation },
    CheckDef { name: "weight-shift", anchor: "height components a_i under a unit step", needs_rep: false, run: weight_shift },
    CheckDef { name: "face-initial", anchor: "face weights at z = 0 give the permutation", needs_rep: false, run: face_initial },
    CheckDef { name: "face-degeneration", anchor: "face weights at z = -w: R P = -R", needs_rep: false, run: face_degeneration },
    CheckDef { name: "ice-rule", anchor: "zero pattern of the face weights", needs_rep: false, run: ice_rule },
    CheckDef { name: "projector", anchor: "antisymmetrizer: idempotent, trace one, signed under permutations", needs_rep: false, run: projector },
    CheckDef { name: "cherednik", anchor: "Cherednik operator factors through the antisymmetrizer", needs_rep: false, run: cherednik_check },
    CheckDef { name: "calibration", anchor: "L-operator index and product convention", needs_rep: true, run: calibration_check },
    CheckDef { name: "dybr", anchor: "dynamical Yang-Baxter relation for L", needs_rep: true, run: dybr },
    CheckDef { name: "fusion-antisymmetry", anchor: "fused column: P_- X = P_- X P_-", needs_rep: false, run: fusion_antisymmetry },
    CheckDef { name: "qdet-scalar", anchor: "projected quantum determinant is a dressed scalar", needs_rep: false, run: qdet_scalar },
    CheckDef { name: "theta-determinant", anchor: "theta determinant over sigma products is constant", needs_rep: false, run: theta_determinant },
    CheckDef { name: "centrality", anchor: "dressed quantum determinant commutes with L", needs_rep: true, run: centrality },
    CheckDef { name: "coefficient-extraction", anchor: "factorised coefficient form of L", needs_rep: true, run: coefficient_extraction },
    CheckDef { name: "y-relations", anchor: "quadratic relations of the coefficient brackets", needs_rep: true, run: y_relations },
    CheckDef { name: "rewrite-soundness", anchor: "exchange relations of the shift generators", needs_rep: true, run: rewrite_soundness },
    CheckDef { name: "normal-form", anchor: "normal ordering is idempotent", needs_rep: false, run: normal_form_check },
    CheckDef { name: "center-commutes", anchor: "determinant element is central in the coefficient algebra", needs_rep: true, run: center_commutes },
    CheckDef { name: "center-rank", anchor: "n linearly independent central elements", needs_rep: false, run: center_rank_check },
];

/// Names accepted by `checks` besides `all`.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

#[derive(Serialize)]
struct DigestInput<'a> {
    params: &'a ModularParams,
    seed: u64,
    reading: Eq24Reading,
    check: &'a str,
    samples: usize,
}

fn digest(cfg: &RunConfig, params: &ModularParams, check: &str, samples: usize) -> String {
    let input = DigestInput { params, seed: cfg.seed, reading: cfg.eq24_reading, check, samples };
    let bytes = serde_json::to_vec(&input).expect("digest input is serialisable");
    hex::encode(Sha256::digest(&bytes))
}

fn assumptions(cfg: &RunConfig) -> Vec<String> {
    vec![
        "tensor indices: lower = incoming, upper = outgoing".into(),
        "the shift inside the tri-spin argument is w_mu".into(),
        "specialized points carry (n-1) w".into(),
        "the algebra shift delta equals delta0".into(),
        "F(z) = 1".into(),
        format!("two-term exchange reading: {}", cfg.eq24_reading.name()),
        "determinant element divided by the bracket normalisation".into(),
    ]
}

/// Execute the selected checks and assemble the report.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let params = cfg.params()?;
    let selected = cfg.selected()?;
    let calibrated = if selected.iter().any(|s| s.needs_rep) {
        Some(calibrate(&params).map_err(|e| e.to_string()))
    } else {
        None
    };
    let (rep, calibration, calibration_error) = match &calibrated {
        Some(Ok((r, c))) => (Some(r), Some(c), None),
        Some(Err(e)) => (None, None, Some(e.as_str())),
        None => (None, None, None),
    };
    let ctx = Ctx { cfg, params: params.clone(), rep, calibration, calibration_error };

    let per_check: Vec<Vec<CheckRecord>> = selected
        .par_iter()
        .map(|spec| {
            let outcomes = (spec.run)(&ctx).unwrap_or_else(|e| {
                vec![Outcome {
                    name: spec.name.into(),
                    samples: 0,
                    max_residual: f64::NAN,
                    threshold: params.tol_residual,
                    verdict: Verdict::Fail,
                    notes: vec![format!("error: {e}")],
                }]
            });
            outcomes
                .into_iter()
                .map(|o| CheckRecord {
                    params_digest: digest(cfg, &params, &o.name, o.samples),
                    anchor: spec.anchor.into(),
                    name: o.name,
                    samples: o.samples,
                    max_residual: o.max_residual,
                    threshold: o.threshold,
                    verdict: o.verdict,
                    notes: o.notes,
                })
                .collect()
        })
        .collect();
    let checks: Vec<CheckRecord> = per_check.into_iter().flatten().collect();

    let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
    let (passed, failed, inconclusive) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Inconclusive));
    let status = if failed > 0 {
        EXIT_FAIL
    } else if inconclusive > 0 {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    };
    Ok(VerificationReport {
        config: cfg.clone(),
        calibration: calibration.map(|c| CalibrationSummary {
            convention: c.convention,
            description: c.convention.to_string(),
            candidates: c.candidates.iter().map(|(k, r)| (k.to_string(), *r)).collect(),
            index_convention: "lower = incoming, upper = outgoing; b = a + e_h read from the quantum state".into(),
        }),
        checks,
        summary: Summary { passed, failed, inconclusive, status, assumptions: assumptions(cfg) },
    })
}

fn rel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Run `f` on every sample index in parallel and keep the worst value.
fn sampled<F>(stream: &SampleStream, samples: usize, f: F) -> Result<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    let v = (0..samples as u64)
        .into_par_iter()
        .map(|s| stream.try_generic(s, &f))
        .collect::<Result<Vec<_>>>()?;
    Ok(worst(v))
}

fn test_moduli(p: &ModularParams) -> [C64; 4] {
    [p.tau, C64::new(0.0, 0.5), C64::new(0.0, 0.8), C64::new(0.3, 0.9)]
}

fn theta_oddness(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let taus = test_moduli(p);
    let r = sampled(&ctx.stream("theta-oddness"), ctx.samples(), |rng| {
        let z = random_complex(rng, 1.0, 0.6);
        let mut m = 0.0f64;
        for tau in taus {
            let a = theta_eval(&ThetaChar::odd(), z, tau, p.tol_series)?;
            let b = theta_eval(&ThetaChar::odd(), -z, tau, p.tol_series)?;
            m = worst([m, rel(a, -b)]);
        }
        Ok(m)
    })?;
    Ok(vec![Outcome::judged("theta-oddness", ctx.samples(), r, 1e-11, vec![format!("{} moduli per point", taus.len())])])
}

fn theta_quasi_periodicity(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let taus = test_moduli(p);
    let mut chars = vec![
        ThetaChar::odd(),
        ThetaChar::new(0.into(), 0.into()),
        ThetaChar::new(0.into(), num_rational::Rational64::new(1, 2)),
    ];
    for j in 0..p.n {
        chars.push(theta_slot(j, p)?);
    }
    let i_pi = C64::new(0.0, std::f64::consts::PI);
    let r = sampled(&ctx.stream("theta-quasi-periodicity"), ctx.samples(), |rng| {
        let z = random_complex(rng, 1.0, 0.4);
        let mut m = 0.0f64;
        for tau in taus {
            for ch in &chars {
                let a = *ch.a_char.numer() as f64 / *ch.a_char.denom() as f64;
                let b = *ch.b_char.numer() as f64 / *ch.b_char.denom() as f64;
                let t = theta_eval(ch, z, tau, p.tol_series)?;
                let t1 = theta_eval(ch, z + 1.0, tau, p.tol_series)?;
                let tt = theta_eval(ch, z + tau, tau, p.tol_series)?;
                m = worst([
                    m,
                    rel(t1, (2.0 * i_pi * a).exp() * t),
                    rel(tt, (-i_pi * tau - 2.0 * i_pi * (z + b)).exp() * t),
                ]);
            }
        }
        Ok(m)
    })?;
    Ok(vec![Outcome::judged(
        "theta-quasi-periodicity",
        ctx.samples(),
        r,
        1e-10,
        vec![format!("{} characteristics x {} moduli per point", chars.len(), taus.len())],
    )])
}

fn theta_truncation(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    // a relative change below a few ulps is rounding, not truncation
    let thr = p.tol_series.max(1e-14);
    let r = sampled(&ctx.stream("theta-truncation"), ctx.samples(), |rng| {
        let z = random_complex(rng, 2.0, 1.0);
        let a = theta_eval(&ThetaChar::odd(), z, p.tau, p.tol_series)?;
        let b = theta_eval(&ThetaChar::odd(), z, p.tau, p.tol_series / 2.0)?;
        Ok(rel(a, b))
    })?;
    Ok(vec![Outcome::judged("theta-truncation", ctx.samples(), r, thr, vec![format!("tolerance {:e} halved", p.tol_series)])])
}

fn weight_shift(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let n = p.n;
    let r = sampled(&ctx.stream("weight-shift"), ctx.samples(), |rng| {
        let wt = random_weight(rng, n);
        let i = rng.random_range(0..n);
        let a0 = a_components(&wt, p);
        let a1 = a_components(&wt.shifted(i), p);
        let m = (0..n).map(|l| {
            let want = p.w * ((l == i) as u8 as f64 - 1.0 / n as f64);
            (a1[l] - a0[l] - want).norm() / p.w.norm()
        });
        Ok(worst(m))
    })?;
    Ok(vec![Outcome::judged("weight-shift", ctx.samples(), r, 1e-12, vec![])])
}

fn face_initial(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let perm = permutation_operator(&Permutation::transposition(2, 0, 1), p.n);
    let r = sampled(&ctx.stream("face-initial"), ctx.samples(), |rng| {
        Ok(build_r(&random_weight(rng, p.n), C64::new(0.0, 0.0), p)?.max_diff(&perm))
    })?;
    Ok(vec![Outcome::judged("face-initial", ctx.samples(), r, 1e-10, vec![])])
}

fn face_degeneration(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let r = sampled(&ctx.stream("face-degeneration"), ctx.samples(), |rng| {
        Ok(check_degeneration(&random_weight(rng, p.n), p)?.max_residual)
    })?;
    Ok(vec![Outcome::judged("face-degeneration", ctx.samples(), r, 1e-10, vec![])])
}

fn ice_rule(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let r = sampled(&ctx.stream("ice-rule"), ctx.samples(), |rng| {
        let wt = random_weight(rng, p.n);
        Ok(ice_rule_violations(&build_r(&wt, random_complex(rng, 0.5, 0.3), p)?) as f64)
    })?;
    Ok(vec![Outcome::judged("ice-rule", ctx.samples(), r, 0.5, vec!["residual counts entries outside the allowed pattern".into()])])
}

fn projector(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let n = ctx.params.n;
    let proj = antisymmetrizer(n, n);
    let idem = (&proj.then(&proj) - &proj).max_abs();
    let trace = (proj.trace() - 1.0).norm();
    let signed = worst(Permutation::all(n).iter().map(|mu| {
        let lhs = permutation_operator(mu, n).then(&proj);
        lhs.max_diff(&proj.scale(C64::new(mu.sign(), 0.0)))
    }));
    let notes = vec![format!("idempotence {idem:.3e}, trace {trace:.3e}, signed absorption {signed:.3e}")];
    Ok(vec![Outcome::judged("projector", 1, worst([idem, trace, signed]), 1e-12, notes)])
}

fn cherednik_check(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    ctx.cfg
        .cherednik_variant
        .variants()
        .into_iter()
        .map(|v| {
            let name = format!("cherednik-{}", v.name());
            let r = sampled(&ctx.stream(&name), ctx.samples(), |rng| {
                Ok(cherednik_residual(&cherednik(&random_weight(rng, p.n), p, v)?))
            })?;
            let note = match v {
                CherednikVariant::Plain => "every factor at the same weight",
                CherednikVariant::Shifted => "each factor's weight shifted by the current indices of the slots outside its span",
            };
            Ok(Outcome::judged(&name, ctx.samples(), r, p.tol_residual, vec![note.into()]))
        })
        .collect()
}

fn calibration_check(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let Some(cal) = ctx.calibration else {
        return Err(Error::Calibration(ctx.calibration_error.unwrap_or("not run").into()));
    };
    let best = cal.candidates.iter().find(|c| c.0 == cal.convention).map_or(f64::NAN, |c| c.1);
    let runner_up = cal
        .candidates
        .iter()
        .filter(|c| c.0 != cal.convention)
        .map(|c| c.1)
        .fold(f64::INFINITY, f64::min);
    let notes = vec![format!("selected {}", cal.convention), format!("best rejected candidate residual {runner_up:.3e}")];
    Ok(vec![Outcome::judged("calibration", cal.samples, best, ctx.params.tol_residual, notes)])
}

fn dybr(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let r = check_dybr(ctx.rep()?, ctx.samples(), &ctx.stream("dybr"))?;
    let notes = r.families.iter().map(|(f, res)| format!("{}: {:.3e}", f.name(), res.max_residual)).collect();
    Ok(vec![Outcome::judged("dybr", r.samples, r.overall.max_residual, r.overall.threshold, notes)])
}

fn fusion_antisymmetry(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let model = FaceWeights::new(p)?;
    let stream = ctx.stream("fusion-antisymmetry");
    let pairs = (0..ctx.samples() as u64)
        .into_par_iter()
        .map(|s| {
            stream.try_generic(s, |rng| {
                let wt = random_weight(rng, p.n);
                let z = random_complex(rng, 0.5, 0.3);
                let good = check_column_antisymmetry(&wt, z, p)?.max_residual;
                let bad = column_antisymmetry_residual(&fused_column_with(&model, &wt, z, Some(1))?);
                Ok((good, bad))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let control = pairs.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(vec![Outcome::judged("fusion-antisymmetry", ctx.samples(), worst(pairs.iter().map(|x| x.0)), p.tol_residual, vec![])
        .require_control("second factor without its weight shift, smallest over samples", control)])
}

fn qdet_scalar(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let stream = ctx.stream("qdet-scalar");
    let pairs = (0..ctx.samples() as u64)
        .into_par_iter()
        .map(|s| {
            stream.try_generic(s, |rng| {
                let z = random_complex(rng, 0.5, 0.3);
                let w1 = random_weight(rng, p.n);
                let w2 = random_weight(rng, p.n);
                let q = qdet_matrix(&w1, z, p)?;
                let diag = (0..p.n).map(|j| q[j][j].norm()).fold(0.0, f64::max);
                let off = worst((0..p.n).flat_map(|j| (0..p.n).filter(move |&k| k != j).map(move |k| (j, k))).map(|(j, k)| q[j][k].norm() / diag));
                let r1 = dressed_ratios(&w1, z, p)?;
                let r2 = dressed_ratios(&w2, z, p)?;
                Ok((off, worst(r1.iter().chain(&r2).map(|r| rel(*r, r1[0])))))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        Outcome::judged("qdet-diagonal", ctx.samples(), worst(pairs.iter().map(|x| x.0)), 1e-10, vec![
            "off-diagonal components relative to the diagonal".into(),
        ]),
        Outcome::judged("qdet-dressed-ratio", ctx.samples(), worst(pairs.iter().map(|x| x.1)), 1e-8, vec![
            "dressed ratio compared across components and two weights at a common z".into(),
        ]),
    ])
}

fn theta_determinant(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let stream = ctx.stream("theta-determinant");
    let reference = stream.try_generic(u64::MAX, |rng| {
        let zs: Vec<C64> = (0..p.n).map(|_| random_complex(rng, 0.5, 0.3)).collect();
        theta_det_ratio(&zs, p)
    })?;
    let r = sampled(&stream, ctx.samples(), |rng| {
        let zs: Vec<C64> = (0..p.n).map(|_| random_complex(rng, 0.5, 0.3)).collect();
        let generic = theta_det_ratio(&zs, p)?;
        let spec = specialized_points(&random_weight(rng, p.n), random_complex(rng, 0.5, 0.3), p);
        let special = theta_det_ratio(&spec, p)?;
        Ok(worst([rel(generic, reference), rel(special, reference)]))
    })?;
    Ok(vec![Outcome::judged("theta-determinant", ctx.samples(), r, 1e-8, vec![
        "generic tuples and specialized points per sample".into(),
    ])])
}

fn centrality(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let r = check_centrality(ctx.rep()?, ctx.samples(), &ctx.stream("centrality"), 1e-8)?;
    Ok(vec![Outcome::judged("centrality", r.samples, r.dressed.max_residual, r.dressed.threshold, vec![])
        .require_control("without the Delta-ratio dressing", r.undressed_max)])
}

fn coefficient_extraction(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let stream = ctx.stream("coefficient-extraction");
    let (_, fundamental) = extract_coefficients(ctx.rep()?, ctx.samples(), &stream, p.tol_residual)?;
    let synth = SyntheticProbe::new(p, p.delta0, ctx.cfg.seed);
    let (_, same) = extract_coefficients(&synth, ctx.samples().min(5), &stream, p.tol_residual)?;
    let shifted = SyntheticProbe::new(p, p.delta0 + 0.3, ctx.cfg.seed);
    let (_, off) = extract_coefficients(&shifted, ctx.samples().min(5), &stream, p.tol_residual)?;
    let mut out = Outcome::judged("coefficient-extraction", ctx.samples(), fundamental.spread, p.tol_residual, vec![
        format!("fundamental L conforms: {} ({} entries)", fundamental.conforming, fundamental.entries_checked),
        format!("synthetic round trip spread {:.3e}", same.spread),
    ]);
    if !same.conforming {
        out.verdict = Verdict::Fail;
    }
    Ok(vec![out.require_control("synthetic L with delta0 + 0.3", off.spread)])
}

fn y_relations(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let rep = ctx.rep()?;
    let stream = ctx.stream("y-relations");
    let br = ProbeBrackets { probe: rep, z_ref: crate::algebra::coeffs::PROBE_POINTS[0] };
    let y = check_y_relations(&br, p, ctx.samples(), &stream, ctx.cfg.eq24_reading)?;
    let unit = check_y_relations(&UnitBrackets { n: p.n }, p, ctx.samples(), &stream, ctx.cfg.eq24_reading)?;
    let scaled = ScaledBrackets { inner: &br, upper: 0, lower: 1, factor: C64::new(2.0, 0.0) };
    let bad = check_y_relations(&scaled, p, ctx.samples(), &stream, ctx.cfg.eq24_reading)?;
    let r = worst([y.same_lower.max_residual, y.same_upper.max_residual, y.three_term.max_residual]);
    let notes = vec![
        format!(
            "same lower {:.3e}, same upper {:.3e}, three-term {:.3e}",
            y.same_lower.max_residual, y.same_upper.max_residual, y.three_term.max_residual
        ),
        format!("reading: {}", y.reading.name()),
        format!(
            "unit brackets: three-term residual {:.3e} (the bare sigma combination is not an identity)",
            unit.three_term.max_residual
        ),
    ];
    Ok(vec![Outcome::judged("y-relations", ctx.samples(), r, p.tol_residual, notes)
        .require_control("one bracket doubled", bad.three_term.max_residual)])
}

fn all_rules(n: usize, reading: Eq24Reading) -> BTreeSet<RuleInstance> {
    let gens: Vec<Generator> = (0..n).flat_map(|u| (0..n).map(move |l| Generator::new(u, l))).collect();
    let mut out = BTreeSet::new();
    for &left in &gens {
        for &right in &gens {
            if let Some(kind) = rule_for(left, right, reading) {
                out.insert(RuleInstance { kind, left, right });
            }
        }
    }
    out
}

fn rewrite_soundness(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let br = ProbeBrackets { probe: ctx.rep()?, z_ref: crate::algebra::coeffs::PROBE_POINTS[0] };
    let env = Env::new(p, C64::new(0.0, 0.0));
    let rules = all_rules(p.n, ctx.cfg.eq24_reading);
    let samples = ctx.samples().min(10);
    let s = rule_soundness(&rules, &br, &env, samples, &ctx.stream("rewrite-soundness"))?;
    let notes = vec![
        format!("{} rule instances", s.instances),
        format!("in the representation {:.3e}, swap involution {:.3e}", s.representation_residual, s.involution_residual),
    ];
    Ok(vec![Outcome::judged(
        "rewrite-soundness",
        samples,
        worst([s.representation_residual, s.involution_residual]),
        p.tol_residual,
        notes,
    )])
}

fn normal_form_check(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let n = p.n;
    let reading = ctx.cfg.eq24_reading;
    let env = Env::new(p, C64::new(0.0, 0.0));
    let r = sampled(&ctx.stream("normal-form"), ctx.samples(), |rng| {
        let len = rng.random_range(2..=4);
        let word: Vec<Generator> =
            (0..len).map(|_| Generator::new(rng.random_range(0..n), rng.random_range(0..n))).collect();
        let x = AlgElem::monomial(n, LatticeFn::one(), word);
        let once = normal_form(&x, reading);
        let twice = normal_form(&once.elem, reading);
        let pt = LatticePoint::new(random_weight(rng, n), random_weight(rng, n));
        let scale = once.elem.max_coefficient(&env, &pt)?.max(1.0);
        let ordered = once.inconclusive() || once.elem.terms().all(|(w, _)| is_normal(w));
        let diff = max_coefficient_diff(&once.elem, &twice.elem, &env, &pt)? / scale;
        Ok(if ordered { diff } else { f64::INFINITY })
    })?;
    Ok(vec![Outcome::judged("normal-form", ctx.samples(), r, p.tol_residual, vec![format!("reading: {}", reading.name())])])
}

fn center_commutes(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let br = ProbeBrackets { probe: ctx.rep()?, z_ref: crate::algebra::coeffs::PROBE_POINTS[0] };
    let stream = ctx.stream("center-commutes");
    let z = random_complex(&mut stream.rng(u64::MAX, 0), 0.5, 0.3);
    let env = Env::new(p, z);
    let reading = ctx.cfg.eq24_reading;
    let run = |form| check_center_commutes(p.n, form, reading, &env, ctx.samples(), &stream, p.tol_residual, Some(&br));
    let c = run(CenterForm::Normalized)?;
    let literal = run(CenterForm::Literal)?;
    let undressed = run(CenterForm::Undressed)?;

    // the element must act as a scalar in the representation it was modelled on
    let a = random_weight(&mut stream.rng(u64::MAX - 1, 0), p.n);
    let op = represent(&crate::algebra::center_element(p.n, CenterForm::Normalized), &a, &br, &env)?;

    let mut notes = vec![
        format!("z = {z:.6}"),
        format!("reading: {}", reading.name()),
        format!("{} distinct rule instances applied", c.rules_applied.len()),
        format!("off-diagonal part in the representation {:.3e}", op.max_off_diagonal() / op.max_abs()),
    ];
    if let Some(w) = c.witness_residual {
        notes.push(format!("representation witness {w:.3e}"));
    }
    if let Some(cert) = &c.certificate {
        notes.push(format!("certificate: {cert}"));
    }
    notes.push(format!("without bracket normalisation: {} ({:.3e})", literal.verdict.name(), literal.max_residual));
    notes.push(format!("without Delta-ratio dressing: {} ({:.3e})", undressed.verdict.name(), undressed.max_residual));
    let mut out = Outcome {
        name: "center-commutes".into(),
        samples: ctx.samples(),
        max_residual: c.max_residual,
        threshold: c.threshold,
        verdict: c.verdict,
        notes,
    };
    if c.verdict == Verdict::Pass && undressed.verdict == Verdict::Pass {
        out.verdict = Verdict::Fail;
        out.notes.push("negative control passed; the check cannot discriminate".into());
    }
    Ok(vec![out])
}

fn center_rank_check(ctx: &Ctx) -> Result<Vec<Outcome>> {
    let p = &ctx.params;
    let n = p.n;
    let stream = ctx.stream("center-rank");
    let (rank, rank_wide, sv) = stream.try_generic(0, |rng| {
        let pt = LatticePoint::new(random_weight(rng, n), random_weight(rng, n));
        let zs: Vec<C64> = (0..5 * n).map(|_| random_complex(rng, 0.5, 0.3)).collect();
        let r = center_rank(&zs[..3 * n], p, &pt)?;
        let wide = center_rank(&zs, p, &pt)?;
        Ok((r.rank, wide.rank, r.singular_values))
    })?;
    let residual = sv.get(n).map_or(0.0, |s| s / sv[0]);
    let mut out = Outcome::judged("center-rank", 3 * n, residual, RANK_CUTOFF, vec![
        format!("rank {rank} from {} spectral samples, {rank_wide} from {}", 3 * n, 5 * n),
        format!("singular values {:?}", sv.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>()),
    ]);
    out.verdict = Verdict::from_pass(rank == n && rank_wide == n);
    Ok(vec![out])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_through_toml_and_json() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap(), cfg);
        assert_eq!(RunConfig::from_json_str(&serde_json::to_string(&cfg).unwrap()).unwrap(), cfg);
    }

    #[test]
    fn low_modulus_is_rejected_at_parse() {
        let err = RunConfig::from_toml_str("tau = [0.0, 0.1]\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err:?}");
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(RunConfig::from_toml_str("checks = [\"nope\"]\n").is_err());
        assert!(RunConfig::from_toml_str("bogus = 1\n").is_err());
        assert!(RunConfig::from_toml_str("n = 5\n").is_err());
    }

    #[test]
    fn selection_follows_dependency_order() {
        let cfg = RunConfig { checks: vec!["center-rank".into(), "theta-oddness".into()], ..RunConfig::default() };
        let names: Vec<_> = cfg.selected().unwrap().iter().map(|s| s.name).collect();
        assert_eq!(names, ["theta-oddness", "center-rank"]);
    }

    #[test]
    fn small_run_is_deterministic_and_passes() {
        let cfg = RunConfig {
            samples: 3,
            checks: vec!["theta-oddness".into(), "dybr".into(), "center-rank".into()],
            ..RunConfig::default()
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.exit_status(), EXIT_PASS, "{}", a.to_text());
        assert!(a.calibration.is_some());
    }
}
