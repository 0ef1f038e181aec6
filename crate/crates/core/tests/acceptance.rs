//! Acceptance suite: every criterion at its stated tolerance and time budget.
//! Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use elliptic_center::algebra::center::{rule_soundness, CenterForm};
use elliptic_center::algebra::coeffs::PROBE_POINTS;
use elliptic_center::algebra::elem::max_coefficient_diff;
use elliptic_center::algebra::rewrite::{rule_for, RuleInstance};
use elliptic_center::algebra::{
    center_rank, check_center_commutes, normal_form, AlgElem, Env, Eq24Reading, Generator, LatticeFn, LatticePoint,
    ProbeBrackets,
};
use elliptic_center::check::{worst, Verdict};
use elliptic_center::face::{build_r, check_degeneration, FaceWeights};
use elliptic_center::fusion::{
    check_column_antisymmetry, column_antisymmetry_residual, dressed_ratios, fused_column_with, qdet_matrix,
    specialized_points, theta_det_ratio,
};
use elliptic_center::ops::{antisymmetrizer, permutation_operator, Permutation};
use elliptic_center::qdet::{calibrate, check_centrality, check_dybr, Convention};
use elliptic_center::sampling::{random_complex, random_weight, SampleStream};
use elliptic_center::theta::{theta_eval, theta_slot};
use elliptic_center::verify::{run, RunConfig};
use elliptic_center::{ModularParams, Result, ThetaChar, C64};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn theta_core() -> Result<Outcome> {
    let stream = SampleStream::new(101, "acceptance-theta");
    let taus = [C64::new(0.0, 0.5), C64::new(0.0, 0.8), C64::new(0.3, 0.9)];
    let p = ModularParams::defaults(3)?;
    let mut chars = vec![ThetaChar::odd()];
    for j in 0..3 {
        chars.push(theta_slot(j, &p)?);
    }
    let i_pi = C64::new(0.0, std::f64::consts::PI);
    let (mut odd, mut per1, mut pertau) = (0.0f64, 0.0f64, 0.0f64);
    for s in 0..200 {
        let z = random_complex(&mut stream.rng(s, 0), 1.0, 0.5);
        for &tau in &taus {
            let sp = theta_eval(&ThetaChar::odd(), z, tau, 1e-17)?;
            let sm = theta_eval(&ThetaChar::odd(), -z, tau, 1e-17)?;
            odd = worst([odd, rel(sp, -sm)]);
            for ch in &chars {
                let a = *ch.a_char.numer() as f64 / *ch.a_char.denom() as f64;
                let b = *ch.b_char.numer() as f64 / *ch.b_char.denom() as f64;
                let t = theta_eval(ch, z, tau, 1e-17)?;
                per1 = worst([per1, rel(theta_eval(ch, z + 1.0, tau, 1e-17)?, (2.0 * i_pi * a).exp() * t)]);
                let phase = (-i_pi * tau - 2.0 * i_pi * (z + b)).exp();
                pertau = worst([pertau, rel(theta_eval(ch, z + tau, tau, 1e-17)?, phase * t)]);
            }
        }
    }
    outcome(
        odd <= 1e-10 && per1 <= 1e-10 && pertau <= 1e-10,
        format!("oddness {odd:.1e}, z+1 {per1:.1e}, z+tau {pertau:.1e} (200 points x 3 moduli)"),
    )
}

fn face_weights() -> Result<Outcome> {
    let mut worst_p = 0.0f64;
    let mut worst_d = 0.0f64;
    for n in 2..=4 {
        let p = ModularParams::defaults(n)?;
        let perm = permutation_operator(&Permutation::transposition(2, 0, 1), n);
        let stream = SampleStream::new(102, format!("acceptance-face-{n}"));
        for s in 0..50 {
            let wt = random_weight(&mut stream.rng(s, 0), n);
            worst_p = worst([worst_p, build_r(&wt, C64::new(0.0, 0.0), &p)?.max_diff(&perm)]);
            worst_d = worst([worst_d, check_degeneration(&wt, &p)?.max_residual]);
        }
    }
    outcome(worst_p <= 1e-10 && worst_d <= 1e-10, format!("R(a|0) = P {worst_p:.1e}, R P = -R at z = -w {worst_d:.1e}"))
}

fn projector() -> Result<Outcome> {
    let mut idem = 0.0f64;
    let mut trace = 0.0f64;
    for n in 2..=4 {
        let p = antisymmetrizer(n, n);
        idem = worst([idem, (&p.then(&p) - &p).max_abs()]);
        trace = worst([trace, (p.trace() - 1.0).norm()]);
    }
    outcome(idem <= 1e-12 && trace <= 1e-12, format!("idempotence {idem:.1e}, trace - 1 {trace:.1e}"))
}

fn calibration() -> Result<Outcome> {
    let stream = SampleStream::new(104, "acceptance-calibration");
    let mut winners: Vec<Convention> = Vec::new();
    let mut unique = true;
    for s in 0..10 {
        let p = ModularParams::random(2, &mut stream.rng(s, 0))?;
        let (_, cal) = calibrate(&p)?;
        unique &= cal.candidates.iter().filter(|c| c.1 < 1e-9).count() == 1;
        winners.push(cal.convention);
    }
    let same = winners.iter().all(|w| *w == winners[0]);
    outcome(unique && same, format!("unique in every draw: {unique}; same winner across 10 draws: {same} ({})", winners[0]))
}

fn dybr() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, samples) in [(2, 100), (3, 50)] {
        let (rep, _) = calibrate(&ModularParams::defaults(n)?)?;
        let r = check_dybr(&rep, samples, &SampleStream::new(105, "acceptance-dybr"))?;
        let fam_ok = r.families.iter().all(|(_, f)| f.max_residual <= 1e-9);
        ok &= r.overall.max_residual <= 1e-9 && fam_ok && r.families.len() == 4;
        parts.push(format!("n={n}: {:.1e} over {samples}", r.overall.max_residual));
    }
    outcome(ok, parts.join(", ") + ", all four families")
}

fn fusion() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, samples) in [(2, 50), (3, 20)] {
        let p = ModularParams::defaults(n)?;
        let model = FaceWeights::new(&p)?;
        let stream = SampleStream::new(106, "acceptance-fusion");
        let (mut good, mut control) = (0.0f64, f64::INFINITY);
        for s in 0..samples {
            let (g, c) = stream.try_generic(s, |rng| {
                let wt = random_weight(rng, n);
                let z = random_complex(rng, 0.5, 0.3);
                Ok((
                    check_column_antisymmetry(&wt, z, &p)?.max_residual,
                    column_antisymmetry_residual(&fused_column_with(&model, &wt, z, Some(1))?),
                ))
            })?;
            good = worst([good, g]);
            control = control.min(c);
        }
        ok &= good <= 1e-9 && control >= 1e-4;
        parts.push(format!("n={n}: {good:.1e}, control {control:.1e}"));
    }
    outcome(ok, parts.join(", "))
}

fn qdet() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let z = C64::new(0.17, -0.06);
        let stream = SampleStream::new(107, "acceptance-qdet");
        let mut reference = None;
        let (mut off, mut spread) = (0.0f64, 0.0f64);
        for s in 0..20 {
            let (o, rho) = stream.try_generic(s, |rng| {
                let wt = random_weight(rng, n);
                let q = qdet_matrix(&wt, z, &p)?;
                let o = (0..n).flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)));
                Ok((worst(o.map(|(j, k)| q[j][k].norm())), dressed_ratios(&wt, z, &p)?))
            })?;
            off = worst([off, o]);
            let r0 = *reference.get_or_insert(rho[0]);
            spread = worst([spread, worst(rho.iter().map(|r| rel(*r, r0)))]);
        }
        ok &= off <= 1e-10 && spread <= 1e-8;
        parts.push(format!("n={n}: off-diagonal {off:.1e}, ratio spread {spread:.1e}"));
    }
    outcome(ok, parts.join(", "))
}

fn theta_determinant() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let stream = SampleStream::new(108, "acceptance-theta-det");
        let mut reference = None;
        let mut spread = 0.0f64;
        for s in 0..20 {
            let (g, sp) = stream.try_generic(s, |rng| {
                let zs: Vec<C64> = (0..n).map(|_| random_complex(rng, 0.5, 0.3)).collect();
                let pts = specialized_points(&random_weight(rng, n), random_complex(rng, 0.5, 0.3), &p);
                Ok((theta_det_ratio(&zs, &p)?, theta_det_ratio(&pts, &p)?))
            })?;
            let r0 = *reference.get_or_insert(g);
            spread = worst([spread, rel(g, r0), rel(sp, r0)]);
        }
        ok &= spread <= 1e-8;
        parts.push(format!("n={n}: {spread:.1e}"));
    }
    outcome(ok, parts.join(", ") + " over 20 generic and 20 specialized tuples")
}

fn centrality() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, samples) in [(2, 50), (3, 20)] {
        let (rep, _) = calibrate(&ModularParams::defaults(n)?)?;
        let r = check_centrality(&rep, samples, &SampleStream::new(109, "acceptance-centrality"), 1e-8)?;
        ok &= r.dressed.max_residual <= 1e-8 && r.undressed_max >= 1e-4;
        parts.push(format!("n={n}: {:.1e}, undressed {:.1e}", r.dressed.max_residual, r.undressed_max));
    }
    outcome(ok, parts.join(", "))
}

fn algebra_engine() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let (rep, _) = calibrate(&p)?;
        let br = ProbeBrackets { probe: &rep, z_ref: PROBE_POINTS[0] };
        let stream = SampleStream::new(110, "acceptance-algebra");
        let env = Env::new(&p, C64::new(0.19, 0.03));

        let gens: Vec<Generator> = (0..n).flat_map(|u| (0..n).map(move |l| Generator::new(u, l))).collect();
        let mut rules = std::collections::BTreeSet::new();
        for &l in &gens {
            for &r in &gens {
                if let Some(kind) = rule_for(l, r, Eq24Reading::GenericPair) {
                    rules.insert(RuleInstance { kind, left: l, right: r });
                }
            }
        }
        let sound = rule_soundness(&rules, &br, &env, 10, &stream)?;
        ok &= sound.representation_residual <= 1e-9 && sound.involution_residual <= 1e-9;

        let mut idem = 0.0f64;
        for s in 0..30 {
            idem = worst([idem, stream.try_generic(s, |rng| {
                let word: Vec<Generator> =
                    (0..4).map(|_| Generator::new(rng.random_range(0..n), rng.random_range(0..n))).collect();
                let once = normal_form(&AlgElem::monomial(n, LatticeFn::one(), word), Eq24Reading::GenericPair).elem;
                let twice = normal_form(&once, Eq24Reading::GenericPair).elem;
                let pt = LatticePoint::new(random_weight(rng, n), random_weight(rng, n));
                max_coefficient_diff(&once, &twice, &env, &pt)
            })?]);
        }
        ok &= idem <= 1e-9;

        let c = check_center_commutes(n, CenterForm::Normalized, Eq24Reading::GenericPair, &env, 50, &stream, 1e-8, Some(&br))?;
        if n == 2 {
            ok &= c.verdict == Verdict::Pass;
        } else {
            ok &= c.verdict == Verdict::Pass || (c.verdict == Verdict::Inconclusive && c.certificate.is_some());
        }
        parts.push(format!(
            "n={n}: {} rules sound ({:.1e}), idempotence {idem:.1e}, center {} ({:.1e})",
            sound.instances,
            worst([sound.representation_residual, sound.involution_residual]),
            c.verdict.name(),
            c.max_residual
        ));
    }
    outcome(ok, parts.join("; "))
}

fn center_dimension() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let stream = SampleStream::new(111, "acceptance-rank");
        let rank = stream.try_generic(0, |rng| {
            let pt = LatticePoint::new(random_weight(rng, n), random_weight(rng, n));
            let zs: Vec<C64> = (0..3 * n).map(|_| random_complex(rng, 0.5, 0.3)).collect();
            Ok(center_rank(&zs, &p, &pt)?.rank)
        })?;
        ok &= rank == n;
        parts.push(format!("n={n}: rank {rank}"));
    }
    outcome(ok, parts.join(", "))
}

fn determinism() -> Result<Outcome> {
    let cfg = RunConfig { seed: 12, samples: 5, ..RunConfig::default() };
    let a = run(&cfg)?.to_json();
    let b = run(&cfg)?.to_json();
    outcome(a == b, format!("two runs, {} byte report bodies, identical: {}", a.len(), a == b))
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        (1, "theta core", secs(1), theta_core),
        (2, "face weights", secs(5), face_weights),
        (3, "projector", secs(5), projector),
        (4, "calibration", secs(30), calibration),
        (5, "dynamical Yang-Baxter relation", secs(60), dybr),
        (6, "fusion antisymmetry", secs(60), fusion),
        (7, "quantum determinant scalar", secs(60), qdet),
        (8, "theta determinant", secs(30), theta_determinant),
        (9, "centrality", secs(120), centrality),
        (10, "algebra engine", secs(120), algebra_engine),
        (11, "center dimension", secs(10), center_dimension),
        (12, "determinism", secs(60), determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s of {}s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
