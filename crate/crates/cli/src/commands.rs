use std::fs;

use hmp_core::classical::presets::{
    constant_protocol, edge_parity_protocol, guess_protocol, random_protocol, verbatim_protocol,
};
use hmp_core::classical::{
    bruteforce_min_cost, derandomize_senders, OneWayProtocol, SearchLimits, SearchMode,
};
use hmp_core::families::{
    cyclic_family, projective_plane_family, random_girth_family, GirthSearch,
};
use hmp_core::info::{extract_ab, information_accounting, AccountingMode};
use hmp_core::model::{relation_holds, required_index_bits, HmpInstance};
use hmp_core::quantum::{run_quantum_smp, CostReport};
use hmp_core::{seed, Bits, MatchingFamily};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{object, Document};
use crate::{
    BruteArgs, ExtractArgs, FamilyArgs, FamilyKind, Mode, ProtocolKind, QuantumArgs, SweepArgs,
};

/// Labels for the streams derived from the root seed.
mod label {
    pub const FAMILY: u64 = 1;
    pub const QUANTUM: u64 = 2;
    pub const SAMPLING: u64 = 3;
    pub const PROTOCOL: u64 = 4;
    pub const EXTRACT: u64 = 5;
}

fn config_of<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn need(value: Option<usize>, flag: &str, kind: &str) -> Result<usize, CliError> {
    value.ok_or_else(|| CliError::Invalid(format!("--kind {kind} needs --{flag}")))
}

fn read(path: &std::path::Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Build or load the family described by `args`.
pub fn resolve_family(args: &FamilyArgs, root_seed: u64) -> Result<MatchingFamily, CliError> {
    if let Some(path) = &args.family {
        let text = read(path)?;
        // Either a bare family file or the document written by gen-family.
        if let Ok(doc) = Document::from_json(&text) {
            let summary = serde_json::to_string(&doc.summary).expect("value serializes");
            return Ok(MatchingFamily::from_json(&summary)?);
        }
        return Ok(MatchingFamily::from_json(&text)?);
    }
    let kind = args
        .kind
        .ok_or_else(|| CliError::Invalid("give --family or --kind".into()))?;
    match kind {
        FamilyKind::Cyclic => Ok(cyclic_family(need(args.n, "n", "cyclic")?)?),
        FamilyKind::Pg => Ok(projective_plane_family(need(args.q, "q", "pg")?)?),
        FamilyKind::Girth => {
            let n = need(args.n, "n", "girth")?;
            let t = need(args.t, "t", "girth")?;
            let d = need(args.d, "d", "girth")?;
            let s = seed::derive(root_seed, label::FAMILY);
            match random_girth_family(n, t, d, s, args.max_attempts)? {
                GirthSearch::Found(f) => Ok(f),
                GirthSearch::NotFound { attempts } => Err(CliError::Refused(format!(
                    "no {t}-regular bipartite graph on {n} vertices with girth > {} found in {attempts} attempts",
                    2 * d
                ))),
            }
        }
    }
}

fn family_summary(f: &MatchingFamily) -> Value {
    json!({ "n": f.n(), "t": f.t(), "d": f.girth_parameter(), "construction": f.construction() })
}

pub fn gen_family(args: &FamilyArgs, root_seed: u64) -> Result<Document, CliError> {
    let f = resolve_family(args, root_seed)?;
    let records = f
        .matchings()
        .iter()
        .enumerate()
        .flat_map(|(j, m)| {
            m.iter().map(move |&(u, v)| {
                object(vec![
                    ("matching", json!(j + 1)),
                    ("u", json!(u)),
                    ("v", json!(v)),
                ])
            })
        })
        .collect();
    Ok(Document {
        command: "gen-family".into(),
        config: config_of(args),
        summary: serde_json::to_value(f.to_file()).expect("family serializes"),
        records,
    })
}

fn parse_bits(text: &str, n: usize) -> Result<Bits, CliError> {
    let c: Bits = text
        .parse()
        .map_err(|_| CliError::Invalid(format!("--c {text:?} is not a bit string")))?;
    if c.len() != n {
        return Err(CliError::Invalid(format!(
            "--c has {} bits but the family has n = {n}",
            c.len()
        )));
    }
    Ok(c)
}

pub fn run_quantum(args: &QuantumArgs, root_seed: u64) -> Result<Document, CliError> {
    let family = resolve_family(&args.family, root_seed)?;
    let (n, t, k) = (family.n(), family.t(), args.k);
    if k < 2 {
        return Err(CliError::Invalid(format!("need k >= 2, got {k}")));
    }
    let r = required_index_bits(k, t);
    let fixed_c = args.c.as_deref().map(|s| parse_bits(s, n)).transpose()?;
    let base = seed::derive(root_seed, label::QUANTUM);
    let mut records = Vec::with_capacity(args.runs);
    let mut failures = 0;
    for run in 0..args.runs {
        let mut rng = seed::stream(base, run as u64);
        let c = match &fixed_c {
            Some(c) => c.clone(),
            None => Bits::new((0..n).map(|_| rng.gen()).collect()),
        };
        let index = args.index.unwrap_or_else(|| rng.gen_range(1..=t));
        let inst = HmpInstance::for_matching(k, r, index, c.clone())?;
        let out = run_quantum_smp(&inst, &family, &mut rng)?;
        let correct = relation_holds(&inst, &family, &out.answer);
        failures += usize::from(!correct);
        records.push(object(vec![
            ("run", json!(run)),
            ("c", json!(c.to_string())),
            ("index", json!(index)),
            ("i1", json!(out.answer.i1)),
            ("i2", json!(out.answer.i2)),
            ("e", json!(u8::from(out.answer.e))),
            ("correct", json!(correct)),
            ("qubits", json!(out.cost.qubits)),
            ("classical_bits", json!(out.cost.classical_bits)),
            ("total_cost", json!(out.cost.total)),
        ]));
    }
    Ok(Document {
        command: "run-quantum".into(),
        config: config_of(args),
        summary: json!({
            "family": family_summary(&family),
            "k": k,
            "r": r,
            "runs": args.runs,
            "failures": failures,
            "cost": CostReport::for_family(n, t),
        }),
        records,
    })
}

fn search_mode(shared: Option<usize>) -> SearchMode {
    shared.map_or(SearchMode::Deterministic, SearchMode::SharedSeeds)
}

pub fn bruteforce(args: &BruteArgs, root_seed: u64) -> Result<Document, CliError> {
    let family = resolve_family(&args.family, root_seed)?;
    let limits = SearchLimits {
        max_bits: args.max_bits,
        max_nodes: args.max_nodes,
    };
    let result = bruteforce_min_cost(
        &family,
        args.k,
        args.epsilon,
        search_mode(args.shared_seeds),
        limits,
    )?;
    if let Some(path) = &args.protocol_out {
        let mut text = serde_json::to_string_pretty(&result.protocol).expect("protocol serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let records = result
        .per_length
        .iter()
        .map(|o| {
            object(vec![
                ("bits", json!(o.bits)),
                ("feasible", json!(o.feasible)),
                ("nodes", json!(o.nodes)),
            ])
        })
        .collect();
    Ok(Document {
        command: "bruteforce-classical".into(),
        config: config_of(args),
        summary: json!({
            "family": family_summary(&family),
            "cost": result.cost,
            "epsilon": result.epsilon,
            "mode": result.mode,
            "worst_case_error": result.worst_case_error.to_string(),
        }),
        records,
    })
}

fn build_protocol(
    args: &ExtractArgs,
    family: &MatchingFamily,
    root_seed: u64,
) -> Result<OneWayProtocol, CliError> {
    let k = args.k;
    Ok(match args.protocol {
        ProtocolKind::Constant => constant_protocol(family, k, args.bits)?,
        ProtocolKind::Verbatim => verbatim_protocol(family, k)?,
        ProtocolKind::Parity => edge_parity_protocol(family, k)?,
        ProtocolKind::Guess => guess_protocol(family, k)?,
        ProtocolKind::Random => random_protocol(
            family,
            k,
            args.bits,
            seed::derive(root_seed, label::PROTOCOL),
        )?,
        ProtocolKind::Bruteforce => {
            bruteforce_min_cost(
                family,
                k,
                args.epsilon,
                SearchMode::Deterministic,
                SearchLimits::default(),
            )?
            .protocol
        }
        ProtocolKind::File => {
            let path = args
                .protocol_file
                .as_ref()
                .ok_or_else(|| CliError::Invalid("--protocol file needs --protocol-file".into()))?;
            serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Invalid(format!("protocol file: {e}")))?
        }
    })
}

pub fn extract(args: &ExtractArgs, root_seed: u64) -> Result<Document, CliError> {
    let family = resolve_family(&args.family, root_seed)?;
    let loaded = build_protocol(args, &family, root_seed)?;
    let derandomized = !loaded.has_deterministic_senders();
    let protocol = derandomize_senders(&loaded)?;
    let mode = match args.mode {
        Mode::Exact => AccountingMode::Exact,
        Mode::Sampled => AccountingMode::Sampled {
            samples: args.samples,
            seed: seed::derive(root_seed, label::SAMPLING),
        },
    };
    let report = information_accounting(&protocol, &family, mode)?;
    let c = match &args.c {
        Some(text) => parse_bits(text, family.n())?,
        None => Bits::zeros(family.n()),
    };
    let mut rng = seed::stream(root_seed, label::EXTRACT);
    let example = extract_ab(&protocol, &family, &c, &mut rng)?;
    let records = report
        .success_rates
        .iter()
        .enumerate()
        .map(|(j, &rate)| object(vec![("step", json!(j + 1)), ("success_rate", json!(rate))]))
        .collect();
    Ok(Document {
        command: "extract".into(),
        config: config_of(args),
        summary: json!({
            "family": family_summary(&family),
            "protocol_cost": protocol.cost(),
            "derandomized": derandomized,
            "accounting": report,
            "example": { "c": c.to_string(), "record": example },
        }),
        records,
    })
}

pub fn sweep(args: &SweepArgs, _root_seed: u64) -> Result<Document, CliError> {
    let limits = SearchLimits {
        max_bits: args.max_bits,
        max_nodes: args.max_nodes,
    };
    let mut ns = args.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    for &n in &ns {
        let family = cyclic_family(n)?;
        let quantum = CostReport::for_family(n, family.t());
        let classical =
            bruteforce_min_cost(&family, 2, args.epsilon, SearchMode::Deterministic, limits)?;
        rows.push((n, family.t(), quantum, classical.cost));
    }
    let increasing = rows.windows(2).all(|w| w[1].3 > w[0].3);
    let dominates = rows.iter().filter(|r| r.0 >= 4).all(|r| r.3 >= r.2.total);
    let records = rows
        .iter()
        .map(|(n, t, q, cl)| {
            object(vec![
                ("n", json!(n)),
                ("t", json!(t)),
                ("quantum_qubits", json!(q.qubits)),
                ("quantum_classical_bits", json!(q.classical_bits)),
                ("quantum_total_cost", json!(q.total)),
                ("classical_min_cost", json!(cl)),
                ("epsilon", json!(args.epsilon)),
            ])
        })
        .collect();
    Ok(Document {
        command: "sweep".into(),
        config: config_of(args),
        summary: json!({
            "family": "cyclic",
            "classical_strictly_increasing": increasing,
            "classical_at_least_quantum_total_from_n4": dominates,
        }),
        records,
    })
}
