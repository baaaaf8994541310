//! Seeded generation of small random subject programs with passing test
//! suites, used to cross-check the variational path against brute force at
//! oracle scale.
//!
//! Programs are built from a handful of body shapes with known mutant
//! counts, so the catalog size stays inside a configured window (small
//! enough that all selections can be enumerated concretely). Tests call the
//! generated functions with random arguments and assert the value the
//! unmutated program actually computes, so the original suite always passes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mutgen::generate_mutants;
use crate::toylang::{call_function, parse, run, Program, TestStatus, Value};

#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub min_mutants: usize,
    pub max_mutants: usize,
    /// Tests per program (at least one is always emitted).
    pub max_tests: usize,
    /// Bound used when validating that the original suite passes; callers
    /// should analyze the program with the same or a larger bound.
    pub step_bound: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            min_mutants: 2,
            max_mutants: 12,
            max_tests: 4,
            step_bound: 10_000,
        }
    }
}

/// Deterministically generate one program; same seed, same source.
pub fn random_program(seed: u64, config: &CorpusConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..100 {
        let source = build_program(&mut rng, config);
        let program = match parse(&source) {
            Ok(p) => p,
            Err(e) => panic!("generator produced invalid source: {e}\n{source}"),
        };
        let catalog = generate_mutants(&program);
        if catalog.len() < config.min_mutants || catalog.len() > config.max_mutants {
            continue;
        }
        for test in &program.tests {
            let outcome = run(&program, test, config.step_bound);
            assert_eq!(
                outcome.status,
                TestStatus::Pass,
                "generated suite must pass on the original:\n{source}"
            );
        }
        return source;
    }
    panic!("no admissible program within the attempt budget for seed {seed}");
}

const ARITH: [&str; 5] = ["+", "-", "*", "/", "%"];
const REL: [&str; 6] = ["==", "!=", "<", ">", "<=", ">="];

struct FnPlan {
    name: String,
    params: usize,
    returns_bool: bool,
    body: String,
}

fn build_program(rng: &mut ChaCha8Rng, config: &CorpusConfig) -> String {
    let unit_count = if rng.gen_bool(0.3) { 2 } else { 1 };
    let function_count = rng.gen_range(1..=3usize);
    let mut budget = config.max_mutants;
    let mut plans: Vec<FnPlan> = Vec::new();

    for index in 0..function_count {
        let params = rng.gen_range(1..=3usize);
        let returns_bool = rng.gen_bool(0.35);
        let force_cost = index == 0;
        let body = gen_body(rng, params, returns_bool, &mut budget, &plans, force_cost);
        plans.push(FnPlan {
            name: format!("fn{index}"),
            params,
            returns_bool,
            body,
        });
    }

    let mut source = String::new();
    let per_unit = plans.len().div_ceil(unit_count);
    for (u, chunk) in plans.chunks(per_unit.max(1)).enumerate() {
        source.push_str(&format!("unit u{u} {{\n"));
        for plan in chunk {
            let params: Vec<String> = (0..plan.params)
                .map(|p| format!("{}: int", param_name(p)))
                .collect();
            let ret = if plan.returns_bool { "bool" } else { "int" };
            source.push_str(&format!(
                "  fn {}({}) -> {} {{\n{}  }}\n",
                plan.name,
                params.join(", "),
                ret,
                plan.body
            ));
        }
        source.push_str("}\n");
    }

    // Tests assert whatever the pristine program computes.
    let probe = format!("{source}test t0 {{ assert true; }}");
    let program: Program = parse(&probe).expect("generated units must parse");
    let test_count = rng.gen_range(1..=config.max_tests.max(1));
    for t in 0..test_count {
        let mut asserts = Vec::new();
        let assert_count = rng.gen_range(1..=2usize);
        for _ in 0..assert_count {
            if let Some(line) = gen_assert(rng, &program, &plans, config.step_bound) {
                asserts.push(line);
            }
        }
        if asserts.is_empty() {
            asserts.push("assert true;".to_string());
        }
        source.push_str(&format!("test t{t} {{ {} }}\n", asserts.join(" ")));
    }
    source
}

fn param_name(index: usize) -> &'static str {
    ["a", "b", "c"][index]
}

/// One random assert line against a function of the pristine program, or
/// None when every argument draw hits a runtime error.
fn gen_assert(
    rng: &mut ChaCha8Rng,
    program: &Program,
    plans: &[FnPlan],
    step_bound: u64,
) -> Option<String> {
    let plan = &plans[rng.gen_range(0..plans.len())];
    for _ in 0..8 {
        let args: Vec<i64> = (0..plan.params).map(|_| rng.gen_range(-4..=8)).collect();
        let values: Vec<Value> = args.iter().map(|&v| Value::Int(v)).collect();
        match call_function(program, &plan.name, &values, step_bound) {
            Ok(Value::Int(result)) => {
                let rendered_args = args
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                return Some(format!("assert {}({rendered_args}) == {result};", plan.name));
            }
            Ok(Value::Bool(result)) => {
                let rendered_args = args
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                let bang = if result { "" } else { "!" };
                return Some(format!("assert {bang}{}({rendered_args});", plan.name));
            }
            Err(_) => continue,
        }
    }
    None
}

/// Generate a function body from shapes with known mutant counts, spending
/// from the shared budget. Costs: arithmetic op 4, relational op 5,
/// logical connector 1.
fn gen_body(
    rng: &mut ChaCha8Rng,
    params: usize,
    returns_bool: bool,
    budget: &mut usize,
    earlier: &[FnPlan],
    force_cost: bool,
) -> String {
    let p = |i: usize| param_name(i % params).to_string();
    let arith = |rng: &mut ChaCha8Rng| ARITH[rng.gen_range(0..ARITH.len())];
    let rel = |rng: &mut ChaCha8Rng| REL[rng.gen_range(0..REL.len())];

    // Candidate shapes as (cost, builder); pick among affordable ones.
    let mut choices: Vec<(usize, u8)> = Vec::new();
    if returns_bool {
        if *budget >= 5 {
            choices.push((5, 0)); // relational return
        }
        if *budget >= 11 {
            choices.push((11, 1)); // conjunction/disjunction of relations
        }
        if *budget >= 5 {
            choices.push((5, 2)); // branch on a relation, constant returns
        }
        if !force_cost {
            choices.push((0, 3)); // constant return
        }
    } else {
        if *budget >= 4 {
            choices.push((4, 4)); // arithmetic return
        }
        if *budget >= 9 {
            choices.push((9, 5)); // branch with arithmetic arm
        }
        if *budget >= 9 {
            choices.push((9, 6)); // bounded counting loop
        }
        if *budget >= 8 {
            choices.push((8, 7)); // let with arithmetic, arithmetic return
        }
        if !force_cost {
            choices.push((0, 8)); // passthrough return
        }
        let callable = earlier.iter().any(|f| !f.returns_bool);
        if callable && !force_cost {
            choices.push((0, 9)); // delegate to an earlier function
        }
    }
    if choices.is_empty() {
        choices.push((0, if returns_bool { 3 } else { 8 }));
    }
    let (cost, shape) = choices[rng.gen_range(0..choices.len())];
    *budget -= cost;

    match shape {
        0 => format!("    return {} {} {};\n", p(0), rel(rng), p(1)),
        1 => {
            let connector = if rng.gen_bool(0.5) { "&&" } else { "||" };
            format!(
                "    return {} {} {} {connector} {} {} {};\n",
                p(0),
                rel(rng),
                rng.gen_range(-2..=4),
                p(1),
                rel(rng),
                rng.gen_range(-2..=4)
            )
        }
        2 => format!(
            "    if ({} {} {}) {{\n      return {};\n    }}\n    return {};\n",
            p(0),
            rel(rng),
            p(1),
            rng.gen_bool(0.5),
            rng.gen_bool(0.5)
        ),
        3 => format!("    return {};\n", rng.gen_bool(0.5)),
        4 => format!("    return {} {} {};\n", p(0), arith(rng), p(1)),
        5 => format!(
            "    if ({} {} {}) {{\n      return {} {} {};\n    }}\n    return {};\n",
            p(0),
            rel(rng),
            p(1),
            p(0),
            arith(rng),
            p(1),
            p(0)
        ),
        6 => {
            let limit = rng.gen_range(2..=5);
            let loop_rel = ["<", "!=", "<="][rng.gen_range(0..3)];
            format!(
                "    let acc = 0;\n    let i = 0;\n    while (i {loop_rel} {limit}) {{\n      acc = i;\n      i = i + 1;\n    }}\n    return acc;\n"
            )
        }
        7 => format!(
            "    let t = {} {} {};\n    return t {} {};\n",
            p(0),
            arith(rng),
            p(1),
            arith(rng),
            rng.gen_range(1..=3)
        ),
        8 => format!("    return {};\n", p(0)),
        _ => {
            let callees: Vec<&FnPlan> = earlier.iter().filter(|f| !f.returns_bool).collect();
            let callee = callees[rng.gen_range(0..callees.len())];
            let args = (0..callee.params)
                .map(p)
                .collect::<Vec<_>>()
                .join(", ");
            format!("    return {}({args});\n", callee.name)
        }
    }
}
