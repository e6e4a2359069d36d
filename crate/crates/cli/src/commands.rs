use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde_json::{json, Value};
use treegrowth::automaton::parse_automaton;
use treegrowth::corpus::{random_corpus, RandomParams};
use treegrowth::growth::{analyze_with, AnalyzeOptions, Witness};
use treegrowth::mtt::{self, parse_mtt, LemmaCaps, Mtt};
use treegrowth::{oracle, query, report};
use treegrowth::{parse_tree, print_context, print_tree, Automaton, GrowthReport, RankedAlphabet, Tree, Verdict};

use crate::fail::{self, parse_error, read, Failure, DATA, SOFTWARE, USAGE};
use crate::TreeArg;

fn load_automaton(path: &Path) -> Result<Automaton, Failure> {
    parse_automaton(&read(path)?).map_err(|e| parse_error(path, e))
}

fn load_mtt(path: &Path) -> Result<Mtt, Failure> {
    parse_mtt(&read(path)?).map_err(|e| {
        let f = Failure::from(e);
        Failure::at(path, f.code, f.message)
    })
}

fn load_tree(arg: &TreeArg, al: &RankedAlphabet) -> Result<Tree, Failure> {
    match (&arg.term, &arg.tree) {
        (Some(text), _) => parse_tree(text, al).map_err(|e| Failure::new(USAGE, format!("--term: {e}"))),
        (None, Some(path)) => parse_tree(read(path)?.trim(), al).map_err(|e| parse_error(path, e)),
        (None, None) => Err(Failure::new(USAGE, "no tree given")),
    }
}

fn exit_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Polynomial(_) => 0,
        Verdict::Exponential => 2,
        Verdict::Empty => 3,
    }
}

/// Evaluates the witness before it is printed.
fn check_witness(a: &Automaton, r: &GrowthReport) -> Result<(), Failure> {
    if let Some(e) = &r.witness_error {
        return Err(Failure::new(SOFTWARE, format!("witness: {e}")));
    }
    match (&r.verdict, &r.witness) {
        (Verdict::Empty, _) => Ok(()),
        (Verdict::Exponential, Some(Witness::Exponential(w))) => {
            for n in 1..=4usize {
                let v = a.value(&w.instance(n))?.accepting;
                if v < BigUint::from(1u32) << n {
                    return Err(Failure::new(
                        SOFTWARE,
                        format!("exponential witness has value {v} < 2^{n} at n = {n}"),
                    ));
                }
            }
            Ok(())
        }
        (Verdict::Polynomial(k), Some(Witness::Polynomial(w))) => {
            let k = u32::try_from(*k).map_err(|_| Failure::new(SOFTWARE, "degree too large to check"))?;
            for n in [2u32, 3, 5] {
                let v = a.value(&w.instance(n as usize))?.accepting;
                if v < BigUint::from(n).pow(k) {
                    return Err(Failure::new(
                        SOFTWARE,
                        format!("polynomial witness has value {v} < {n}^{k}"),
                    ));
                }
            }
            Ok(())
        }
        _ => Err(Failure::new(SOFTWARE, "witness missing")),
    }
}

fn analyze_one(path: &Path, witness: bool, timing: bool, as_json: bool, many: bool) -> Result<(String, u8), Failure> {
    let a = load_automaton(path)?;
    let r = analyze_with(&a, AnalyzeOptions { witness });
    if witness {
        check_witness(&a, &r).map_err(|f| Failure::at(path, f.code, f.message))?;
    }
    let mut text = if as_json {
        let mut v = report::to_json(&r, timing);
        if !witness {
            v.as_object_mut().expect("object").remove("witness");
        }
        if many {
            v["file"] = json!(path.display().to_string());
            v.to_string()
        } else {
            serde_json::to_string_pretty(&v).expect("serializable")
        }
    } else {
        let body = report::to_text(&r, timing);
        if many {
            format!("== {} ==\n{}", path.display(), body.trim_end())
        } else {
            body.trim_end().to_string()
        }
    };
    text.push('\n');
    Ok((text, exit_code(&r.verdict)))
}

pub fn analyze(files: &[PathBuf], witness: bool, timing: bool, as_json: bool, jobs: usize) -> Result<u8, Failure> {
    let many = files.len() > 1;
    let mut results: Vec<Option<Result<(String, u8), Failure>>> = (0..files.len()).map(|_| None).collect();
    let jobs = jobs.min(files.len()).max(1);
    if jobs == 1 {
        for (slot, f) in results.iter_mut().zip(files) {
            *slot = Some(analyze_one(f, witness, timing, as_json, many));
        }
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    s.spawn(move || {
                        (j..files.len())
                            .step_by(jobs)
                            .map(|i| (i, analyze_one(&files[i], witness, timing, as_json, many)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("worker finished") {
                    results[i] = Some(r);
                }
            }
        });
    }
    let mut first_failure = None;
    let mut codes = Vec::new();
    for r in results.into_iter().map(|r| r.expect("every file handled")) {
        match r {
            Ok((text, code)) => {
                print!("{text}");
                codes.push(code);
            }
            Err(f) => {
                eprintln!("treegrowth: {}", f.message);
                first_failure.get_or_insert(f.code);
            }
        }
    }
    if let Some(code) = first_failure {
        return Ok(code);
    }
    // exponential wins; empty only when every file is empty
    Ok(if codes.contains(&2) {
        2
    } else if codes.iter().all(|&c| c == 3) {
        3
    } else {
        0
    })
}

pub fn value(aut: &Path, tree: &TreeArg, runs: bool) -> Result<u8, Failure> {
    let a = load_automaton(aut)?;
    let t = load_tree(tree, a.alphabet())?;
    let v = if runs {
        a.count_accepting_runs(&t)?
    } else {
        a.value(&t)?.accepting
    };
    println!("{v}");
    Ok(0)
}

pub fn trim(aut: &Path) -> Result<u8, Failure> {
    print!("{}", load_automaton(aut)?.trim());
    Ok(0)
}

pub fn oracle_growth(aut: &Path, max_size: usize) -> Result<u8, Failure> {
    let a = load_automaton(aut)?;
    print!("{}", oracle::brute_growth(&a, max_size)?.to_csv());
    Ok(0)
}

pub fn oracle_heavy(aut: &Path, max_context: usize) -> Result<u8, Failure> {
    let a = load_automaton(aut)?.trim();
    match oracle::brute_heavy(&a, max_context)? {
        Some((q, c)) => println!("{} {}", a.state_name(q), print_context(&c, a.alphabet())),
        None => println!("none"),
    }
    Ok(0)
}

pub fn oracle_barbells(aut: &Path, max_context: usize) -> Result<u8, Failure> {
    let a = load_automaton(aut)?.trim();
    for (p, q) in oracle::brute_barbells(&a, max_context)?.pairs {
        println!("{} {}", a.state_name(p), a.state_name(q));
    }
    Ok(0)
}

fn load_query(aut: &Path, max_arity: usize) -> Result<(query::MarkedAlphabet, Automaton), Failure> {
    let a = load_automaton(aut)?;
    let (m, a_f) = query::reinterpret(&a).map_err(|e| Failure::at(aut, DATA, e))?;
    if m.arity() > max_arity {
        return Err(Failure::at(
            aut,
            DATA,
            format!("{} mark bits exceed --max-arity {max_arity}", m.arity()),
        ));
    }
    Ok((m, a_f))
}

pub fn query_bf(aut: &Path, max_arity: usize) -> Result<u8, Failure> {
    let (m, a_f) = load_query(aut, max_arity)?;
    print!("{}", query::build_bf(&m, &a_f)?);
    Ok(0)
}

pub fn query_growth(aut: &Path, max_arity: usize, as_json: bool) -> Result<u8, Failure> {
    let (m, a_f) = load_query(aut, max_arity)?;
    let r = query::query_growth(&m, &a_f)?;
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report::to_json(&r, false)).expect("serializable")
        );
    } else {
        print!("{}", report::to_text(&r, false));
    }
    Ok(exit_code(&r.verdict))
}

pub fn mtt_eval(path: &Path, tree: &TreeArg, cap: usize) -> Result<u8, Failure> {
    let m = load_mtt(path)?;
    let t = load_tree(tree, m.input())?;
    let out = mtt::mtt_eval_with(&m, &t, cap)?;
    println!("{}", print_tree(&out, m.output()));
    Ok(0)
}

pub fn mtt_branches(path: &Path, tree: &TreeArg, cap: usize) -> Result<u8, Failure> {
    let m = load_mtt(path)?;
    let t = load_tree(tree, m.input())?;
    let out = mtt::mtt_eval_with(&m, &t, cap)?;
    let ba = mtt::BranchAlphabet::new(m.output());
    let mut lines: Vec<(usize, String)> = mtt::branches(&out, &ba)
        .iter()
        .map(|b| (b.size(), print_tree(b, ba.alphabet())))
        .collect();
    lines.sort();
    for (_, l) in lines {
        println!("{l}");
    }
    Ok(0)
}

pub fn mtt_hat(path: &Path, materialize: u64) -> Result<u8, Failure> {
    let m = load_mtt(path)?;
    let h = mtt::hat(&m);
    let states: Vec<String> = (0..h.states().len())
        .map(|s| {
            let rank = usize::from(matches!(h.states()[s].1, mtt::Alpha::Y(_)));
            format!("{}:{rank}", h.state_name(s))
        })
        .collect();
    println!("states: {}", states.join(" "));
    println!("output {}", h.branch_alphabet().alphabet());
    for a in m.input().ids() {
        println!("letter {}: {} annotations", m.input().name(a), h.annotation_count(a));
    }
    if materialize > 0 {
        let (tm, _) = h.materialize(materialize)?;
        print!("{tm}");
    }
    Ok(0)
}

pub fn mtt_verify(path: &Path, tree: &TreeArg, cap: usize, work: u64) -> Result<u8, Failure> {
    let m = load_mtt(path)?;
    let t = load_tree(tree, m.input())?;
    let r = mtt::verify_height_lemma(&m, &t, LemmaCaps { output: cap, work })?;
    let v: Value = json!({
        "format": report::FORMAT,
        "output_height": r.output_height,
        "output_size": r.output_size,
        "max_branch_size": r.max_branch_size,
        "distinct_outputs": r.distinct_outputs,
        "annotated_trees": r.annotated_trees.to_string(),
        "all_branches": r.all_branches,
        "holds": r.holds(),
    });
    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    Ok(if r.holds() { 0 } else { fail::SOFTWARE })
}

pub fn gen(states: usize, seed: u64, count: usize) -> Result<u8, Failure> {
    let p = RandomParams {
        max_states: states,
        ..RandomParams::default()
    };
    for (i, a) in random_corpus(seed, count, &p).iter().enumerate() {
        if i > 0 {
            println!();
        }
        println!("# seed {seed} automaton {i}");
        print!("{a}");
    }
    Ok(0)
}
