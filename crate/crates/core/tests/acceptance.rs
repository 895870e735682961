//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits non-zero if any check fails.

use std::time::{Duration, Instant};

use fraclearn::agent::q_update;
use fraclearn::experiment::{compare, render_curve_svg, simulate_counterfactual, Campaign, ConditionReport};
use fraclearn::logs::{
    learning_curve, opportunities, parse_transactions, simulate_student, synth_student, write_transactions, Outcome,
    StepRecord, StudentLog,
};
use fraclearn::rngs;
use fraclearn::sequences::{Schema, PER_TYPE};
use fraclearn::tuning::{
    objective, objective_window, tpe, tune_with, Point, SearchSpace, TpeSettings, TuneOptions,
};
use fraclearn::{AgentConfig, CognitiveParams, SkillGroupId};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let took = start.elapsed();
    v.detail = format!("{} [{:.2}s]", v.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            v.pass = false;
            v.detail = format!("{} exceeded {:.0}s budget", v.detail, limit.as_secs_f64());
        }
    }
    v
}

fn cold_start() -> Verdict {
    let mut first = 0;
    let mut hints = 0;
    for schema in Schema::ALL {
        for seed in 0..5 {
            let log = synth_student(&AgentConfig::default(), &schema.generate(seed), seed, "s");
            for (r, k) in log.first_attempts.iter().zip(opportunities(&log.first_attempts, StepRecord::kc)) {
                if k == 0 {
                    first += 1;
                    hints += (r.outcome == Outcome::Hint) as usize;
                }
            }
        }
    }
    verdict(first > 0 && hints == first, format!("{hints}/{first} opportunity-0 steps were hints"))
}

fn expert() -> Verdict {
    let mut steps = 0;
    let mut errors = 0;
    for schema in Schema::ALL {
        for seed in 0..3 {
            let log = synth_student(&AgentConfig::expert(), &schema.generate(seed), seed, "e");
            assert_eq!(log.sequence.len(), 48);
            steps += log.first_attempts.len();
            errors += log.first_attempts.iter().filter(|r| r.outcome != Outcome::Correct).count();
        }
    }
    verdict(errors == 0, format!("{errors} errors or hints over {steps} first attempts"))
}

/// Ten synthetic students with uniformly drawn ground-truth configurations,
/// each practising one of the study's own orderings.
fn synthetic_students() -> Vec<(AgentConfig, StudentLog)> {
    let space = SearchSpace::default();
    let mut rng = rngs::rng(2024, 0);
    let schemas = [Schema::BlockedA, Schema::BlockedB, Schema::Interleaved];
    (0..10u64)
        .map(|i| {
            let truth = space.sample(&mut rng);
            let seq = schemas[i as usize % 3].generate(1000 + i);
            let log = synth_student(&truth, &seq, 5000 + i, &format!("student-{i}"));
            (truth, log)
        })
        .collect()
}

/// Tuning never sees the student's own random stream.
const TUNE_SEED: u64 = 77;

fn tuner_efficacy(students: &[(AgentConfig, StudentLog)]) -> Verdict {
    let mut wins = 0;
    let mut rows = Vec::new();
    for (i, (_, log)) in students.iter().enumerate() {
        let opts = TuneOptions::new(20, 10, TUNE_SEED + i as u64);
        let result = tune_with(log, &SearchSpace::default(), &opts).unwrap();
        let baseline = objective(&AgentConfig::default(), log, 10, opts.replications, opts.seed).unwrap();
        wins += (result.best_loss < baseline) as usize;
        rows.push(format!("{:.3}<{:.3}", result.best_loss, baseline));
    }
    verdict(wins >= 8, format!("tuned beat baseline for {wins}/10 students ({})", rows.join(" ")))
}

fn holdout(students: &[(AgentConfig, StudentLog)]) -> Verdict {
    let mut wins = 0;
    let mut rows = Vec::new();
    for (i, (_, log)) in students.iter().enumerate() {
        let opts = TuneOptions::new(20, 5, TUNE_SEED + i as u64);
        let result = tune_with(log, &SearchSpace::default(), &opts).unwrap();
        let tuned = objective_window(&result.best, log, 5, 20, opts.replications, opts.seed).unwrap();
        let baseline = objective_window(&AgentConfig::default(), log, 5, 20, opts.replications, opts.seed).unwrap();
        wins += (tuned <= baseline) as usize;
        rows.push(format!("{tuned:.3}/{baseline:.3}"));
    }
    verdict(wins >= 7, format!("tuned <= baseline on problems 6-20 for {wins}/10 students ({})", rows.join(" ")))
}

fn partial_prior() -> AgentConfig {
    AgentConfig::with_groups(&[SkillGroupId::FracAddSame])
}

fn campaign(config: AgentConfig, schemas: Vec<Schema>, seed: u64) -> Vec<ConditionReport> {
    simulate_counterfactual(&Campaign::new(config, schemas, seed))
}

fn blocked_beats_interleaved() -> Verdict {
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in 0..10 {
        let r = campaign(partial_prior(), vec![Schema::BlockedA, Schema::Interleaved], seed);
        let (b, i) = (r[0].mean_error(), r[1].mean_error());
        wins += (b < i) as usize;
        rows.push(format!("{b:.3}/{i:.3}"));
    }
    verdict(wins >= 8, format!("blocked below interleaved in {wins}/10 campaigns ({})", rows.join(" ")))
}

fn faded_advantage() -> Verdict {
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in 0..10 {
        let r = campaign(AgentConfig::default(), vec![Schema::Faded, Schema::BlockedA, Schema::Interleaved], seed);
        let table = compare(&r);
        let cross: Vec<usize> = table
            .conditions
            .iter()
            .map(|c| c.crossing.iter().find(|(t, _)| *t == 0.2).and_then(|x| x.1).unwrap_or(usize::MAX))
            .collect();
        wins += (cross[0] <= cross[1] && cross[1] <= cross[2]) as usize;
        rows.push(format!("{:?}", cross));
    }
    verdict(wins > 5, format!("faded <= blocked <= interleaved at 0.2 in {wins}/10 campaigns {}", rows.join(" ")))
}

fn boundary_spike() -> Verdict {
    let r = &campaign(partial_prior(), vec![Schema::BlockedA], 0)[0];
    let (mut first, mut n_first, mut last, mut n_last) = (0.0, 0, 0.0, 0);
    for records in &r.records {
        for (rec, k) in records.iter().zip(opportunities(records, StepRecord::kc)) {
            if rec.problem_index == PER_TYPE - 1 {
                last += rec.error();
                n_last += 1;
            }
            if (PER_TYPE..2 * PER_TYPE).contains(&rec.problem_index) && k == 0 {
                first += rec.error();
                n_first += 1;
            }
        }
    }
    let (first, last) = (first / n_first as f64, last / n_last as f64);
    verdict(first > last, format!("second-block first exposure {first:.3} vs last pre-boundary {last:.3}"))
}

fn optimizer_benchmark() -> Verdict {
    let space = SearchSpace::default();
    let domain = space.domain();
    let f = |p: &Point| (p.reals[0] - 0.3).powi(2);
    let mut wins = 0;
    for seed in 0..100 {
        let t = tpe::minimize(f, &domain, 30, &TpeSettings::default(), &mut rngs::rng(seed, 1));
        let r = tpe::random_search(f, &domain, 30, &mut rngs::rng(seed, 2));
        wins += (tpe::best_loss(&t) < tpe::best_loss(&r)) as usize;
    }
    verdict(wins >= 70, format!("TPE beat random search in {wins}/100 paired seeds"))
}

fn q_updates() -> Verdict {
    let p = CognitiveParams::default();
    let up = q_update(0.0, 1.0, 0.0, &p);
    let down = q_update(0.0, -1.0, 0.0, &p);
    let exact = (up - 0.1).abs() < 1e-12 && (down + 0.1).abs() < 1e-12;
    // closed form of repeated terminal +1 updates: q_n = 1 - (1 - alpha)^n
    let mut q = 0.0;
    let mut converged_at = None;
    let mut matches_closed_form = true;
    let mut monotone = true;
    for n in 1..=200 {
        let next = q_update(q, 1.0, 0.0, &p);
        monotone &= next > q;
        q = next;
        matches_closed_form &= (q - (1.0 - (1.0 - p.learning_rate).powi(n))).abs() < 1e-12;
        if converged_at.is_none() && (q - 1.0).abs() < 0.01 {
            converged_at = Some(n);
        }
    }
    verdict(
        exact && monotone && matches_closed_form && converged_at.is_some(),
        format!("single steps {up:.12}/{down:.12}, |Q-1|<0.01 after {converged_at:?} updates"),
    )
}

fn determinism() -> Verdict {
    let mut ok = true;
    let mut checked = 0;
    for (i, schema) in Schema::ALL.into_iter().enumerate() {
        let config = [AgentConfig::default(), partial_prior(), AgentConfig::with_groups(&[SkillGroupId::FracMul])][i % 3].clone();
        let seq = schema.generate(i as u64);
        let (log_a, tx_a) = simulate_student(&config, &seq, 9, "d");
        let (log_b, tx_b) = simulate_student(&config, &seq, 9, "d");
        let csv_a = write_transactions(&tx_a).unwrap();
        ok &= csv_a == write_transactions(&tx_b).unwrap() && log_a == log_b;
        let parsed = parse_transactions(&csv_a).unwrap();
        ok &= parsed.len() == 1 && parsed[0].first_attempts == log_a.first_attempts;
        let curve_a = learning_curve(&log_a.first_attempts);
        ok &= curve_a.to_csv() == learning_curve(&parsed[0].first_attempts).to_csv();
        checked += log_a.first_attempts.len();
    }
    let c = Campaign { replications: 4, ..Campaign::new(partial_prior(), Schema::ALL.to_vec(), 3) };
    let render = |r: &[ConditionReport]| {
        let curves: Vec<_> = r.iter().map(|x| x.curve.clone()).collect();
        let labels: Vec<&str> = r.iter().map(|x| x.schema.name()).collect();
        (curves.iter().map(|c| c.to_csv()).collect::<String>(), render_curve_svg(&curves, &labels))
    };
    ok &= render(&simulate_counterfactual(&c)) == render(&simulate_counterfactual(&c));
    verdict(ok, format!("logs, curves and SVG identical across reruns; {checked} records round-tripped"))
}

fn main() {
    let students = synthetic_students();
    let checks: Vec<(&str, Verdict)> = vec![
        ("1 cold start", timed(Some(Duration::from_secs(1)), cold_start)),
        ("2 expert", timed(Some(Duration::from_secs(5)), expert)),
        ("3 tuner efficacy", timed(Some(Duration::from_secs(300)), || tuner_efficacy(&students))),
        ("4 holdout", timed(Some(Duration::from_secs(300)), || holdout(&students))),
        ("5 blocked vs interleaved", timed(Some(Duration::from_secs(120)), blocked_beats_interleaved)),
        ("6 faded crossing", timed(None, faded_advantage)),
        ("7 block boundary", timed(None, boundary_spike)),
        ("8 optimizer benchmark", timed(Some(Duration::from_secs(30)), optimizer_benchmark)),
        ("9 q updates", timed(None, q_updates)),
        ("10 determinism", timed(None, determinism)),
    ];
    let mut failed = 0;
    for (name, v) in &checks {
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += !v.pass as usize;
    }
    println!("{}/{} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
