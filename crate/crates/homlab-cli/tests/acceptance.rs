//! Acceptance suite: one test per shipped criterion, library- and
//! CLI-driven. Each prints a `PASS criterion N` line (visible with
//! `--nocapture`); the harness line per test doubles as the pass/fail
//! record.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use homlab::corpus::{random_program, CorpusConfig};
use homlab::evaluator::{classify, evaluate_candidate, evaluate_foms, FomResults, VerdictKind};
use homlab::formula::FormulaStore;
use homlab::mutgen::{generate_mutants, instantiate, weave, MetaProgram, MutantCatalog};
use homlab::rational::Rational;
use homlab::search::{
    brute_force, genetic_search, penalty, prioritized_search, BatchBudget, Bounds, Budget,
    GeneticParams, PriorityWeights, Timeline, TimelineFile,
};
use homlab::sshomsat::{
    enumerate_sshoms, EnumerationStrategy, SshomRecord, SshomRecordRow, SshomSetFile,
};
use homlab::toylang::{parse, run};
use homlab::varex::{
    oracle_failure_condition, vrun, vrun_suite, KillReportFile, KillReportRow,
    VarexConfig,
};
use homlab::MutantId;

const CORPUS_STEP_BOUND: u64 = 10_000;
const CORPUS_SIZE: u64 = 110;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../homlab/fixtures")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homlab"))
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let output = bin().args(args).output().expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).to_string(),
        String::from_utf8_lossy(&output.stderr).to_string(),
    )
}

fn load_fixture_meta(name: &str) -> MetaProgram {
    let source = std::fs::read_to_string(fixture(name)).unwrap();
    let program = parse(&source).unwrap();
    let catalog = generate_mutants(&program);
    weave(&program, &catalog).unwrap()
}

fn corpus_meta(seed: u64) -> MetaProgram {
    let config = CorpusConfig {
        step_bound: CORPUS_STEP_BOUND,
        ..CorpusConfig::default()
    };
    let source = random_program(seed, &config);
    let program = parse(&source).unwrap();
    let catalog = generate_mutants(&program);
    weave(&program, &catalog).unwrap()
}

/// Independent brute-force classification of every conflict-free subset of
/// size two and up, concrete runs only.
fn classify_all_subsets(
    meta: &MetaProgram,
    fom_results: &FomResults,
    step_bound: u64,
) -> (BTreeSet<BTreeSet<MutantId>>, BTreeSet<BTreeSet<MutantId>>) {
    let n = meta.catalog.len();
    assert!(n <= 14, "subset oracle only runs at oracle scale");
    let mut all = BTreeSet::new();
    let mut strict = BTreeSet::new();
    for mask in 0u64..(1u64 << n) {
        if (mask.count_ones() as usize) < 2 {
            continue;
        }
        let candidate: BTreeSet<MutantId> = (0..n as u32)
            .filter(|i| mask >> i & 1 == 1)
            .map(MutantId)
            .collect();
        if meta.catalog.selection_conflict(&candidate).is_some() {
            continue;
        }
        let (kills, _) = evaluate_candidate(meta, &candidate, fom_results, step_bound).unwrap();
        let constituent_kills: Vec<&BTreeSet<u16>> = candidate
            .iter()
            .map(|m| &fom_results.kill_sets[m.index()])
            .collect();
        match classify(&kills, &constituent_kills).kind {
            VerdictKind::StrictSshom => {
                strict.insert(candidate.clone());
                all.insert(candidate);
            }
            VerdictKind::Sshom => {
                all.insert(candidate);
            }
            _ => {}
        }
    }
    (all, strict)
}

/// Fully independent re-verification of one timeline record: instantiate
/// the candidate and each constituent and run the whole suite concretely.
fn reverify_record(meta: &MetaProgram, record: &SshomRecord) -> bool {
    let program = &meta.base;
    let kill_names = |selection: &BTreeSet<MutantId>| -> BTreeSet<String> {
        let concrete = instantiate(meta, selection).unwrap();
        program
            .tests
            .iter()
            .zip(&concrete.tests)
            .filter(|(_, test)| {
                run(&concrete, test, homlab::toylang::DEFAULT_STEP_BOUND)
                    .status
                    .is_kill()
            })
            .map(|(original, _)| original.id.clone())
            .collect()
    };
    let t_h = kill_names(&record.mutants);
    if t_h != record.kill_set || t_h.is_empty() {
        return false;
    }
    let mut intersection: Option<BTreeSet<String>> = None;
    for &m in &record.mutants {
        let alone = kill_names(&BTreeSet::from([m]));
        intersection = Some(match intersection {
            None => alone,
            Some(acc) => acc.intersection(&alone).cloned().collect(),
        });
    }
    let intersection = intersection.unwrap();
    t_h.is_subset(&intersection) && record.strict == (t_h != intersection)
}

fn triangle_ground_truth() -> (MetaProgram, Vec<SshomRecord>) {
    let meta = load_fixture_meta("triangle.mut");
    let mut report = vrun_suite(&meta, &VarexConfig::default()).unwrap();
    let records = enumerate_sshoms(
        &mut report,
        &meta.catalog,
        false,
        EnumerationStrategy::AllSat,
    );
    (meta, records)
}

// -------------------------------------------------------------------
// Criteria
// -------------------------------------------------------------------

#[test]
fn criterion_01_demo_replication() {
    let started = Instant::now();
    let out = tempdir("c1");
    let program = fixture("demo.mut");
    let program = program.to_str().unwrap();
    let out_str = out.to_str().unwrap();

    let (code, _, stderr) = run_cli(&[
        "generate", "--program", program, "--mutants", "0,9", "--out", out_str,
    ]);
    assert_eq!(code, 0, "{stderr}");
    let catalog_path = out.join("catalog.json");
    let (code, _, stderr) = run_cli(&[
        "varex",
        "--program",
        program,
        "--catalog",
        catalog_path.to_str().unwrap(),
        "--out",
        out_str,
    ]);
    assert_eq!(code, 0, "{stderr}");

    // The emitted failure conditions must be canonically equal to
    // m0 | m1, m0 & !m1, !m0 & m1.
    let report: KillReportFile =
        serde_json::from_str(&std::fs::read_to_string(out.join("killreport.json")).unwrap())
            .unwrap();
    let mut store = FormulaStore::new(2);
    let m0 = store.var(MutantId(0)).unwrap();
    let m1 = store.var(MutantId(1)).unwrap();
    let expected = [
        ("T1", store.or(m0, m1)),
        ("T2", store.and_not(m0, m1)),
        ("T3", store.and_not(m1, m0)),
    ];
    assert_eq!(report.tests.len(), 3);
    for ((test_id, expected_formula), row) in expected.iter().zip(&report.tests) {
        assert_eq!(&row.id, test_id);
        let parsed = store.parse_infix(&row.failure_condition).unwrap();
        assert_eq!(
            parsed, *expected_formula,
            "condition mismatch for {test_id}: {}",
            row.failure_condition
        );
    }

    let (code, _, _) = run_cli(&[
        "enumerate",
        "--catalog",
        catalog_path.to_str().unwrap(),
        "--kill-report",
        out.join("killreport.json").to_str().unwrap(),
        "--out",
        out_str,
    ]);
    assert_eq!(code, 0);
    let sshoms: SshomSetFile =
        serde_json::from_str(&std::fs::read_to_string(out.join("sshoms.json")).unwrap()).unwrap();
    assert_eq!(sshoms.records.len(), 1);
    assert_eq!(sshoms.records[0].mutants, vec![0, 1]);
    assert_eq!(sshoms.records[0].kill_set, vec!["T1".to_string()]);
    assert!(!sshoms.records[0].strict);

    // Strict enumeration is empty.
    let strict_out = tempdir("c1s");
    let (code, stdout, _) = run_cli(&[
        "enumerate",
        "--catalog",
        catalog_path.to_str().unwrap(),
        "--kill-report",
        out.join("killreport.json").to_str().unwrap(),
        "--strict",
        "--out",
        strict_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("0 records"));
    let strict: SshomSetFile =
        serde_json::from_str(&std::fs::read_to_string(strict_out.join("sshoms.json")).unwrap())
            .unwrap();
    assert!(strict.records.is_empty());

    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "criterion 1 took {elapsed:?}, limit 1s"
    );
    println!("PASS criterion 1: worked-example replication ({elapsed:?})");
}

#[test]
fn criterion_02_variational_oracle_equivalence() {
    let started = Instant::now();
    let config = VarexConfig {
        step_bound: CORPUS_STEP_BOUND,
        ..VarexConfig::default()
    };
    let mut programs = 0u64;
    for seed in 0..CORPUS_SIZE {
        let meta = corpus_meta(seed);
        assert!(meta.catalog.len() <= 12);
        let mut store = FormulaStore::new(meta.catalog.len() as u32);
        for test in &meta.base.tests {
            let variational = vrun(&meta, test, &mut store, &config).unwrap();
            let oracle =
                oracle_failure_condition(&meta, test, &mut store, CORPUS_STEP_BOUND, 14).unwrap();
            assert_eq!(
                variational, oracle,
                "seed {seed} test {}: mismatch",
                test.id
            );
        }
        programs += 1;
    }
    assert!(programs >= 100);
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "criterion 2 took {elapsed:?}, limit 5min"
    );
    println!("PASS criterion 2: variational-oracle equivalence on {programs} programs ({elapsed:?})");
}

#[test]
fn criterion_03_complete_enumeration_equivalence() {
    let started = Instant::now();
    let config = VarexConfig {
        step_bound: CORPUS_STEP_BOUND,
        ..VarexConfig::default()
    };
    let mut programs = 0u64;
    for seed in 0..CORPUS_SIZE {
        let meta = corpus_meta(seed);
        let mut report = vrun_suite(&meta, &config).unwrap();
        let enumerated_all: BTreeSet<BTreeSet<MutantId>> = enumerate_sshoms(
            &mut report,
            &meta.catalog,
            false,
            EnumerationStrategy::AllSat,
        )
        .into_iter()
        .map(|r| r.mutants)
        .collect();
        let enumerated_strict: BTreeSet<BTreeSet<MutantId>> = enumerate_sshoms(
            &mut report,
            &meta.catalog,
            true,
            EnumerationStrategy::AllSat,
        )
        .into_iter()
        .map(|r| r.mutants)
        .collect();
        let fom_results = evaluate_foms(&meta, CORPUS_STEP_BOUND, 1);
        let (brute_all, brute_strict) =
            classify_all_subsets(&meta, &fom_results, CORPUS_STEP_BOUND);
        assert_eq!(enumerated_all, brute_all, "seed {seed}: non-strict sets");
        assert_eq!(enumerated_strict, brute_strict, "seed {seed}: strict sets");
        programs += 1;
    }
    assert!(programs >= 100);
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(600),
        "criterion 3 took {elapsed:?}, limit 10min"
    );
    println!("PASS criterion 3: complete-enumeration equivalence on {programs} programs ({elapsed:?})");
}

#[test]
fn criterion_04_strictness_containment() {
    let config = VarexConfig {
        step_bound: CORPUS_STEP_BOUND,
        ..VarexConfig::default()
    };
    let mut fixtures: Vec<MetaProgram> = (0..30).map(corpus_meta).collect();
    fixtures.push(load_fixture_meta("demo.mut"));
    fixtures.push(load_fixture_meta("triangle.mut"));
    for (index, meta) in fixtures.iter().enumerate() {
        let varex_config = if index < 30 {
            config.clone()
        } else {
            VarexConfig::default()
        };
        let mut report = vrun_suite(meta, &varex_config).unwrap();
        let all = enumerate_sshoms(
            &mut report,
            &meta.catalog,
            false,
            EnumerationStrategy::AllSat,
        );
        let strict = enumerate_sshoms(
            &mut report,
            &meta.catalog,
            true,
            EnumerationStrategy::AllSat,
        );
        let all_sets: BTreeSet<_> = all.iter().map(|r| &r.mutants).collect();
        let strict_sets: BTreeSet<_> = strict.iter().map(|r| &r.mutants).collect();
        assert!(strict_sets.is_subset(&all_sets), "fixture {index}");
        // Every strict record re-checked from raw kill data.
        let kills = report.fom_kills();
        for record in &strict {
            let mut constituents = record.mutants.iter();
            let mut intersection = kills[constituents.next().unwrap()].clone();
            for m in constituents {
                intersection = intersection.intersection(&kills[m]).cloned().collect();
            }
            assert!(!record.kill_set.is_empty());
            assert!(
                record.kill_set.is_subset(&intersection)
                    && record.kill_set != intersection,
                "fixture {index}: strict record without proper containment"
            );
        }
    }
    println!("PASS criterion 4: strictness containment on 32 fixtures");
}

#[test]
fn criterion_05_search_soundness() {
    let meta = load_fixture_meta("triangle.mut");
    let step_bound = homlab::toylang::DEFAULT_STEP_BOUND;
    let budget = Budget::evaluations(2_000);
    let timelines: Vec<(&str, Timeline)> = vec![
        ("bf", brute_force(&meta, step_bound, budget, 6, 1)),
        (
            "gen",
            genetic_search(&meta, step_bound, budget, &GeneticParams::default(), 11, 1),
        ),
        (
            "pri",
            prioritized_search(
                &meta,
                step_bound,
                &PriorityWeights::default(),
                &Bounds::default(),
                BatchBudget::default(),
                budget,
                1,
            ),
        ),
    ];
    let mut verified = 0usize;
    for (strategy, timeline) in &timelines {
        assert!(
            !timeline.entries.is_empty(),
            "{strategy} found nothing to verify"
        );
        let mut last = 0;
        for entry in &timeline.entries {
            assert!(entry.evaluations_so_far > last, "{strategy}: not increasing");
            last = entry.evaluations_so_far;
            assert!(
                reverify_record(&meta, &entry.record),
                "{strategy}: entry {:?} fails independent re-verification",
                entry.record.mutants
            );
            verified += 1;
        }
    }
    println!("PASS criterion 5: 100% precision across {verified} reported records");
}

#[test]
fn criterion_06_ground_truth_recovery() {
    let started = Instant::now();
    let (meta, truth) = triangle_ground_truth();
    assert!(meta.catalog.len() >= 100, "triangle catalog too small");
    let bounds = Bounds {
        max_order: 6,
        max_functions: 4,
        max_units: 3,
    };
    // Ground truth filtered to the search bounds.
    let in_bounds: BTreeSet<BTreeSet<MutantId>> = truth
        .iter()
        .filter(|r| {
            let mut units = BTreeSet::new();
            let mut functions = BTreeSet::new();
            for &m in &r.mutants {
                let loc = &meta.catalog.mutants[m.index()].location;
                units.insert(&loc.unit);
                functions.insert((&loc.unit, &loc.function));
            }
            r.mutants.len() <= bounds.max_order
                && functions.len() <= bounds.max_functions
                && units.len() <= bounds.max_units
        })
        .map(|r| r.mutants.clone())
        .collect();
    assert!(!in_bounds.is_empty());

    let timeline = prioritized_search(
        &meta,
        homlab::toylang::DEFAULT_STEP_BOUND,
        &PriorityWeights::default(),
        &bounds,
        BatchBudget::default(),
        Budget::unbounded(),
        1,
    );
    assert!(!timeline.budget_exhausted);
    assert_eq!(
        timeline.found_sets(),
        in_bounds,
        "prioritized search must recover exactly the in-bounds ground truth"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(600),
        "criterion 6 took {elapsed:?}, limit 10min"
    );
    println!(
        "PASS criterion 6: recovered {} ground-truth records in {} evaluations ({elapsed:?})",
        in_bounds.len(),
        timeline.total_evaluations
    );
}

#[test]
fn criterion_07_prioritization_effectiveness() {
    let (meta, truth) = triangle_ground_truth();
    let truth_sets: BTreeSet<BTreeSet<MutantId>> =
        truth.iter().map(|r| r.mutants.clone()).collect();
    let step_bound = homlab::toylang::DEFAULT_STEP_BOUND;
    let budget = Budget::evaluations(2_000);

    let pri = prioritized_search(
        &meta,
        step_bound,
        &PriorityWeights::default(),
        &Bounds::default(),
        BatchBudget::default(),
        budget,
        1,
    );
    let bf = brute_force(&meta, step_bound, budget, 6, 1);
    assert!(
        pri.strict_count() >= bf.strict_count(),
        "prioritized found {} strict, brute force {}",
        pri.strict_count(),
        bf.strict_count()
    );

    for seed in [1, 2, 3] {
        let gen = genetic_search(&meta, step_bound, budget, &GeneticParams::default(), seed, 1);
        assert!(
            gen.found_sets().is_subset(&truth_sets),
            "genetic seed {seed} reported a non-ground-truth record"
        );
    }
    println!(
        "PASS criterion 7: prioritized strict {} >= brute-force strict {}; genetic contained for 3 seeds",
        pri.strict_count(),
        bf.strict_count()
    );
}

#[test]
fn criterion_08_determinism() {
    let meta = load_fixture_meta("triangle.mut");
    let step_bound = homlab::toylang::DEFAULT_STEP_BOUND;
    let budget = Budget::evaluations(500);
    let digest = meta.catalog.digest();

    let serialize = |timeline: &Timeline, strategy: &str, seed: Option<u64>| -> (String, String) {
        let file = TimelineFile::new(timeline, digest.clone(), strategy, seed);
        (
            timeline.to_csv(),
            serde_json::to_string_pretty(&file).unwrap(),
        )
    };

    let bf_a = brute_force(&meta, step_bound, budget, 6, 1);
    let bf_b = brute_force(&meta, step_bound, budget, 6, 1);
    assert_eq!(serialize(&bf_a, "bf", None), serialize(&bf_b, "bf", None));

    let pri = |_: ()| {
        prioritized_search(
            &meta,
            step_bound,
            &PriorityWeights::default(),
            &Bounds::default(),
            BatchBudget::default(),
            budget,
            1,
        )
    };
    let pri_a = pri(());
    let pri_b = pri(());
    assert_eq!(
        serialize(&pri_a, "pri", None),
        serialize(&pri_b, "pri", None)
    );

    for seed in [3, 17] {
        let gen_a = genetic_search(&meta, step_bound, budget, &GeneticParams::default(), seed, 1);
        let gen_b = genetic_search(&meta, step_bound, budget, &GeneticParams::default(), seed, 1);
        assert_eq!(
            serialize(&gen_a, "gen", Some(seed)),
            serialize(&gen_b, "gen", Some(seed))
        );
    }
    println!("PASS criterion 8: byte-identical timelines across repeated runs");
}

#[test]
fn criterion_09_penalty_worked_examples() {
    let weights = PriorityWeights::default();
    assert_eq!(weights.order, Rational::from_int(5));
    assert_eq!(weights.test_diff, Rational::from_int(1));
    assert_eq!(weights.n_plus_one, Rational::from_int(15));

    // Kill data of the worked example: m0 -> {T1,T2}, m1 -> {T1,T3},
    // and an m2 killed by {T1} for the triple case.
    let fom_results = FomResults {
        kill_sets: vec![
            BTreeSet::from([0, 1]),
            BTreeSet::from([0, 2]),
            BTreeSet::from([0]),
        ],
        reach_map: vec![
            BTreeSet::from([0, 1, 2]),
            BTreeSet::from([0, 1, 2]),
            BTreeSet::from([0, 1, 2]),
        ],
        evaluations: 0,
    };
    let pair = BTreeSet::from([MutantId(0), MutantId(1)]);
    let no_known = BTreeSet::new();
    assert_eq!(
        penalty(&pair, &fom_results, &no_known, &weights, 3),
        Rational::from_int(12)
    );

    let triple = BTreeSet::from([MutantId(0), MutantId(1), MutantId(2)]);
    let known = BTreeSet::from([pair.clone()]);
    assert_eq!(
        penalty(&triple, &fom_results, &known, &weights, 3),
        Rational::from_int(2)
    );

    let twins = FomResults {
        kill_sets: vec![BTreeSet::from([0, 1]), BTreeSet::from([0, 1])],
        reach_map: vec![BTreeSet::from([0, 1]), BTreeSet::from([0, 1])],
        evaluations: 0,
    };
    assert_eq!(
        penalty(&pair, &twins, &no_known, &weights, 2),
        Rational::from_int(10)
    );
    println!("PASS criterion 9: penalty worked examples 12, 2, 10");
}

#[test]
fn criterion_10_characteristics_suite() {
    // Part A: the worked-example pipeline end to end through the CLI.
    let out = tempdir("c10");
    let out_str = out.to_str().unwrap();
    let program = fixture("demo.mut");
    let program = program.to_str().unwrap();
    for args in [
        vec!["generate", "--program", program, "--mutants", "0,9", "--out", out_str],
        vec![
            "varex",
            "--program",
            program,
            "--catalog",
            &format!("{out_str}/catalog.json"),
            "--out",
            out_str,
        ],
        vec![
            "enumerate",
            "--catalog",
            &format!("{out_str}/catalog.json"),
            "--kill-report",
            &format!("{out_str}/killreport.json"),
            "--out",
            out_str,
        ],
        vec![
            "analyze",
            "--sshoms",
            &format!("{out_str}/sshoms.json"),
            "--catalog",
            &format!("{out_str}/catalog.json"),
            "--kill-report",
            &format!("{out_str}/killreport.json"),
            "--out",
            out_str,
        ],
    ] {
        let (code, _, stderr) = run_cli(&args.iter().map(|s| &**s).collect::<Vec<_>>());
        assert_eq!(code, 0, "{args:?}: {stderr}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("characteristics.json")).unwrap())
            .unwrap();
    assert_eq!(report["order_histogram"]["2"], 1);
    assert_eq!(report["equal_fail_rate_percent"], 0.0);
    assert_eq!(report["n_plus_one_rate_percent"], serde_json::Value::Null);
    assert_eq!(report["proximity"]["same_function"], 1);

    // Part B: constructed artifacts exercising every class and rate case.
    // The five kept mutants sit at: m0, m1 in ua::fa (different
    // expressions), m2 in ua::fb, m3 in ub::fc, m4 in uc::fd.
    let out = tempdir("c10b");
    let catalog = synthetic_catalog();
    let catalog_file = catalog.to_file();
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(
        out.join("catalog.json"),
        serde_json::to_string_pretty(&catalog_file).unwrap(),
    )
    .unwrap();
    // Kill sets: m0 {TA}, m1 {TA}, m2 {TA,TB}, m3 {TA,TC}, m4 {TA}.
    let kill_rows = vec![
        ("TA", "m0 | m1 | m2 | m3 | m4"),
        ("TB", "m2"),
        ("TC", "m3"),
    ];
    let report_file = KillReportFile {
        universe_digest: catalog.digest(),
        mutant_count: catalog.len() as u32,
        tests: kill_rows
            .into_iter()
            .map(|(id, f)| KillReportRow {
                id: id.to_string(),
                failure_condition: f.to_string(),
            })
            .collect(),
    };
    std::fs::write(
        out.join("killreport.json"),
        serde_json::to_string_pretty(&report_file).unwrap(),
    )
    .unwrap();
    // Orders {2: 3, 3: 2}; only {m0,m1} is equal-fail (1/5 = 20%); of
    // the two triples exactly one extends a recorded pair (50%);
    // proximity spans M, C, 2C (twice), and *.
    let records = vec![
        synthetic_record(&[0, 1], &["TA"]),    // same function -> M
        synthetic_record(&[0, 2], &["TA"]),    // same unit, two functions -> C
        synthetic_record(&[0, 3], &["TA"]),    // two units -> 2C
        synthetic_record(&[0, 3, 4], &["TA"]), // three units -> *, N+1 of {0,3}
        synthetic_record(&[1, 2, 4], &["TA"]), // two units -> 2C, no contained pair
    ];
    let sshom_file = SshomSetFile {
        catalog_digest: catalog.digest(),
        strict_mode: false,
        records,
    };
    std::fs::write(
        out.join("sshoms.json"),
        serde_json::to_string_pretty(&sshom_file).unwrap(),
    )
    .unwrap();
    let out_str = out.to_str().unwrap();
    let (code, _, stderr) = run_cli(&[
        "analyze",
        "--sshoms",
        &format!("{out_str}/sshoms.json"),
        "--catalog",
        &format!("{out_str}/catalog.json"),
        "--kill-report",
        &format!("{out_str}/killreport.json"),
        "--out",
        out_str,
    ]);
    assert_eq!(code, 0, "{stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("characteristics.json")).unwrap())
            .unwrap();
    assert_eq!(report["order_histogram"]["2"], 3);
    assert_eq!(report["order_histogram"]["3"], 2);
    assert_eq!(report["equal_fail_rate_percent"], 20.0);
    assert_eq!(report["n_plus_one_rate_percent"], 50.0);
    assert_eq!(report["proximity"]["same_function"], 1);
    assert_eq!(report["proximity"]["same_unit"], 1);
    assert_eq!(report["proximity"]["two_units"], 2);
    assert_eq!(report["proximity"]["spread"], 1);

    // A record referencing a mutant outside the catalog is a consistency
    // error (exit 4).
    let bad = SshomSetFile {
        catalog_digest: catalog.digest(),
        strict_mode: false,
        records: vec![synthetic_record(&[0, 99], &["TA"])],
    };
    std::fs::write(
        out.join("bad.json"),
        serde_json::to_string_pretty(&bad).unwrap(),
    )
    .unwrap();
    let (code, _, _) = run_cli(&[
        "analyze",
        "--sshoms",
        &format!("{out_str}/bad.json"),
        "--catalog",
        &format!("{out_str}/catalog.json"),
        "--kill-report",
        &format!("{out_str}/killreport.json"),
        "--out",
        out_str,
    ]);
    assert_eq!(code, 4);

    // Part C: boundary rate cases — all-equal (100%), direct N+1 (100%),
    // lone triple (0%), empty set (all not-applicable).
    let equal_records = vec![synthetic_record(&[0, 1], &["TB"]).to_record()];
    let mut kills: BTreeMap<MutantId, BTreeSet<String>> = BTreeMap::new();
    kills.insert(MutantId(0), BTreeSet::from(["TA".into(), "TB".into()]));
    kills.insert(MutantId(1), BTreeSet::from(["TA".into(), "TB".into()]));
    assert_eq!(
        homlab::analysis::equal_fail_rate(&equal_records, &kills),
        Some(100.0)
    );
    assert_eq!(
        homlab::analysis::n_plus_one_rate(&[
            synthetic_record(&[0, 1], &["TA"]).to_record(),
            synthetic_record(&[0, 1, 2], &["TA"]).to_record(),
        ]),
        Some(100.0)
    );
    assert_eq!(
        homlab::analysis::n_plus_one_rate(&[synthetic_record(&[0, 1, 2], &["TA"]).to_record()]),
        Some(0.0)
    );
    assert_eq!(homlab::analysis::n_plus_one_rate(&[]), None);
    assert_eq!(homlab::analysis::equal_fail_rate(&[], &kills), None);
    println!("PASS criterion 10: characteristics suite");
}

/// Five mutants across three functions and three units, one per location:
/// two in ua::fa, one each in ua::fb, ub::fc, uc::fd.
fn synthetic_catalog() -> MutantCatalog {
    let source = "\
unit ua {
  fn fa(x: int, y: int) -> bool { return x < y || y < 0; }
  fn fb(x: int) -> int { return x + 1; }
}
unit ub {
  fn fc(x: int) -> bool { return x <= 3; }
}
unit uc {
  fn fd(x: int) -> bool { return x >= 4; }
}
test t { assert fa(1, 2); assert fb(1) == 2; assert fc(2); assert fd(9); }
";
    let program = parse(source).unwrap();
    let catalog = generate_mutants(&program);
    // Full catalog layout: fa#0 ids 0..5, fa#1 (||) id 5, fa#2 ids 6..11,
    // fb#0 ids 11..15, fc#0 ids 15..20, fd#0 ids 20..25.
    let keep: BTreeSet<MutantId> = [0u32, 6, 11, 15, 20].iter().map(|&i| MutantId(i)).collect();
    let filtered = catalog.filter(&keep).unwrap();
    assert_eq!(filtered.len(), 5);
    assert_eq!(filtered.mutants[1].location.function, "fa");
    assert_eq!(filtered.mutants[2].location.function, "fb");
    assert_eq!(filtered.mutants[3].location.unit, "ub");
    assert_eq!(filtered.mutants[4].location.unit, "uc");
    filtered
}

fn synthetic_record(mutants: &[u32], kills: &[&str]) -> SshomRecordRow {
    SshomRecordRow {
        mutants: mutants.to_vec(),
        strict: false,
        kill_set: kills.iter().map(|s| s.to_string()).collect(),
        discovery_index: 0,
    }
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homlab-acceptance-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
