use std::fs;
use std::io::{self, Read};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use stabloc::bell::{self, BellError, BellInequality, CorrelationVector, GptState, LpVerdict};
use stabloc::codes::{CodeError, CodeSpec};
use stabloc::comm::{self, Assignment, CommError, Counterexample, GraphFamily, ModelRun, NnVariant};
use stabloc::gf2::BitVec;
use stabloc::graph::{GraphError, LocalGate, StabGraph};
use stabloc::lhv::{self, LhvError, LhvTableSpec};
use stabloc::lp;
use stabloc::oracle::{self, OracleError, StateVector, STATE_TOL};
use stabloc::pauli::{Letter, PauliError, PauliOperator};
use stabloc::rng::{rng, Outcome};
use stabloc::tableau::{StabilizerTableau, TableauError};

use crate::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Lhv(#[from] LhvError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Comm(#[from] CommError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_path(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn read_input(opts: &GlobalOpts) -> Result<String> {
    match opts.input.as_deref() {
        Some(p) if p != Path::new("-") => read_path(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
            Ok(s)
        }
    }
}

fn write_output(opts: &GlobalOpts, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &opts.out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn outcome_source(opts: &GlobalOpts) -> Outcome {
    match opts.forced {
        Some(m) => Outcome::Forced(m),
        None => Outcome::Seeded(opts.seed),
    }
}

fn parse_tableau(text: &str) -> Result<StabilizerTableau> {
    Ok(if text.trim_start().starts_with('{') {
        StabilizerTableau::from_json(text)?
    } else {
        StabilizerTableau::parse_text(text)?
    })
}

fn is_graph_json(text: &str) -> bool {
    text.trim_start().starts_with('{') && text.contains("\"nodes\"")
}

/// Graph JSON or a tableau in either format.
fn parse_state(text: &str) -> Result<StabilizerTableau> {
    if is_graph_json(text) {
        Ok(StabGraph::from_json(text)?.to_tableau())
    } else {
        parse_tableau(text)
    }
}

fn tableau_text(opts: &GlobalOpts, t: &StabilizerTableau) -> String {
    match opts.format {
        Some(Format::Json) => t.to_json(),
        _ => t.to_text(),
    }
}

fn graph_text(opts: &GlobalOpts, g: &StabGraph) -> Result<String> {
    match opts.format {
        None | Some(Format::Json) => Ok(g.to_json()),
        Some(Format::Dot) => Ok(g.to_dot()),
        Some(Format::Csv) => Err(CliError::Usage("graphs are written as json or dot".into())),
    }
}

fn sign_text(s: i8) -> &'static str {
    if s > 0 {
        "+1"
    } else {
        "-1"
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Pauli(c) => pauli(opts, c),
        Command::Tableau(c) => tableau(opts, c),
        Command::Graph(c) => graph(opts, c),
        Command::Code(c) => code(opts, c),
        Command::Lhv(c) => lhv_cmd(opts, c),
        Command::Bell(c) => bell_cmd(opts, c),
        Command::Comm(c) => comm_cmd(opts, c),
        Command::Oracle(OracleCmd::Check) => oracle_check(opts),
    }
}

fn pauli(opts: &GlobalOpts, cmd: &PauliCmd) -> Result<()> {
    match cmd {
        PauliCmd::Parse { text } => {
            let p = PauliOperator::parse(text)?;
            let info = json!({
                "pauli": p.to_string(),
                "n": p.n(),
                "weight": p.weight(),
                "hermitian": p.is_hermitian(),
                "support": p.support(),
            });
            write_output(opts, &pretty(&info))
        }
        PauliCmd::Mul { a, b } => {
            let p = PauliOperator::parse(a)?.multiply(&PauliOperator::parse(b)?)?;
            write_output(opts, &p.to_string())
        }
    }
}

fn tableau(opts: &GlobalOpts, cmd: &TableauCmd) -> Result<()> {
    let t = parse_tableau(&read_input(opts)?)?;
    match cmd {
        TableauCmd::Validate => match t.validate() {
            Ok(()) => write_output(opts, &format!("VALID: {} qubits", t.n())),
            Err(v) => Err(CliError::Domain(format!("INVALID: {v}"))),
        },
        TableauCmd::Canon => {
            if let Err(v) = t.validate() {
                return Err(CliError::Domain(format!("INVALID: {v}")));
            }
            let gf = t.to_graph_form()?;
            let ops: Vec<String> = gf.local_ops.iter().map(|g| format!("{g:?}")).collect();
            let mut text = format!("# local ops: {}\n", if ops.is_empty() { "none".into() } else { ops.join(" ") });
            text.push_str(&tableau_text(opts, &gf.tableau));
            write_output(opts, &text)
        }
        TableauCmd::Measure { pauli } => {
            let m = PauliOperator::parse(pauli)?;
            let res = t.measure(&m, outcome_source(opts))?;
            eprintln!("outcome {} with probability {}", sign_text(res.eigenvalue()), res.probability.value());
            write_output(opts, &tableau_text(opts, &res.state))
        }
    }
}

fn graph(opts: &GlobalOpts, cmd: &GraphCmd) -> Result<()> {
    let input = read_input(opts)?;
    if let GraphCmd::FromTableau = cmd {
        let g = StabGraph::from_tableau(&parse_tableau(&input)?)?;
        return write_output(opts, &graph_text(opts, &g)?);
    }
    let mut g = StabGraph::from_json(&input)?;
    match cmd {
        GraphCmd::Reduce => {
            g.reduce();
        }
        GraphCmd::Equiv { other } => {
            let h = StabGraph::from_json(&read_path(other)?)?;
            let verdict = if g.equivalent(&h)? { "EQUIVALENT" } else { "NOT EQUIVALENT" };
            return write_output(opts, verdict);
        }
        GraphCmd::Gate { gate, node } => {
            let gate = match gate {
                LocalGateArg::H => LocalGate::H,
                LocalGateArg::S => LocalGate::S,
                LocalGateArg::Z => LocalGate::Z,
            };
            g.apply_local_gate(gate, *node)?;
        }
        GraphCmd::Cz { a, b } => g.apply_cz(*a, *b)?,
        GraphCmd::Measure { pauli, node, basis } => {
            let res = match (pauli, node) {
                (Some(p), None) => g.measure_product(&PauliOperator::parse(p)?, outcome_source(opts))?,
                (None, Some(j)) => {
                    let letter = Letter::from_char(basis.to_ascii_uppercase())
                        .filter(|l| *l != Letter::I)
                        .ok_or_else(|| CliError::Usage(format!("basis must be X, Y or Z, got {basis}")))?;
                    g.measure_single(*j, letter, outcome_source(opts))?
                }
                _ => return Err(CliError::Usage("give exactly one of --pauli or --node".into())),
            };
            eprintln!("outcome {} with probability {}", sign_text(res.eigenvalue()), res.probability.value());
            g = res.state;
        }
        GraphCmd::ToDot => return write_output(opts, &g.to_dot()),
        GraphCmd::ToTableau => return write_output(opts, &tableau_text(opts, &g.to_tableau())),
        GraphCmd::FromTableau => unreachable!("handled above"),
    }
    write_output(opts, &graph_text(opts, &g)?)
}

fn parse_bits(s: &str) -> Result<BitVec> {
    let bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("expected a bit string, got {s:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::from_bools(&bits))
}

fn parse_amplitudes(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .map(|item| {
            let mut parts = item.trim().splitn(2, ':');
            let num = |x: Option<&str>| -> Result<f64> {
                x.unwrap_or("0").trim().parse().map_err(|_| CliError::Usage(format!("bad amplitude {item:?}")))
            };
            Ok(Complex64::new(num(parts.next())?, num(parts.next())?))
        })
        .collect()
}

fn code(opts: &GlobalOpts, cmd: &CodeCmd) -> Result<()> {
    let cg = CodeSpec::from_json(&read_input(opts)?)?.build()?;
    match cmd {
        CodeCmd::Build => {
            let graph: Value = serde_json::from_str(&cg.base.to_json()).expect("graph JSON");
            let inputs: Vec<Vec<usize>> = (0..cg.k).map(|l| cg.input_neighbors(l)).collect();
            write_output(opts, &pretty(&json!({ "n": cg.n(), "k": cg.k, "graph": graph, "inputs": inputs })))
        }
        CodeCmd::Basis { logical } => {
            let c = parse_bits(logical)?;
            if c.len() != cg.k {
                return Err(CliError::Usage(format!("expected {} logical bits", cg.k)));
            }
            write_output(opts, &graph_text(opts, &cg.basis_graph(&c)?)?)
        }
        CodeCmd::Encode { amplitudes } => {
            let amps = parse_amplitudes(amplitudes)?;
            if amps.len() != 1 << cg.k {
                return Err(CliError::Usage(format!("expected {} amplitudes", 1usize << cg.k)));
            }
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(CliError::Domain("amplitudes are all zero".into()));
            }
            let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
            let (state, record) = cg.encode_state(&amps, outcome_source(opts))?;
            let overlap = state.inner(&cg.logical_state(&amps)?)?.norm();
            let report = json!({ "record": record.to_string(), "overlap": overlap, "ok": overlap >= 1.0 - STATE_TOL });
            write_output(opts, &pretty(&report))
        }
    }
}

fn lhv_cmd(opts: &GlobalOpts, cmd: &LhvCmd) -> Result<()> {
    match cmd {
        LhvCmd::Value { pauli, spec } => {
            let t = parse_state(&read_input(opts)?)?;
            let spec = match spec {
                Some(p) => LhvTableSpec::from_json(&read_path(p)?)?,
                None => LhvTableSpec::zero(t.n()),
            };
            let v = spec.definite_value(&t, &PauliOperator::parse(pauli)?)?;
            write_output(opts, sign_text(v))
        }
        LhvCmd::Count => {
            let t = parse_state(&read_input(opts)?)?;
            write_output(opts, &lhv::count_distinct_tables(&t)?.to_string())
        }
        LhvCmd::Range { values } => {
            let r = lhv::correlation_range(values)?;
            write_output(opts, &pretty(&json!({ "lo": r.lo, "hi": r.hi, "empty": r.is_empty() })))
        }
    }
}

fn parse_term(s: &str, parties: usize) -> Result<Vec<usize>> {
    let t: Vec<usize> = s.chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
    if t.len() != parties {
        return Err(CliError::Usage(format!("term {s:?} needs {parties} setting digits")));
    }
    Ok(t)
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse().map_err(|_| CliError::Usage(format!("bad matrix entry {v:?}"))))
                .collect()
        })
        .collect()
}

fn bell_cmd(opts: &GlobalOpts, cmd: &BellCmd) -> Result<()> {
    match cmd {
        BellCmd::LpTest => {
            let c = CorrelationVector::from_csv(&read_input(opts)?)?;
            match bell::lp_feasible(&c)? {
                LpVerdict::Feasible { weights } => {
                    let w: Vec<String> = weights.iter().map(|q| q.to_string()).collect();
                    write_output(opts, &format!("FEASIBLE\n{}", pretty(&json!({ "weights": w }))))
                }
                LpVerdict::Infeasible { inequality, value } => {
                    eprintln!("violation value {} = {:.12}", value, lp::to_f64(&value));
                    write_output(opts, &format!("INFEASIBLE\n{}", inequality.to_json()?))
                }
            }
        }
        BellCmd::Rv { parties, terms } => {
            let terms = terms.iter().map(|t| parse_term(t, parties.len())).collect::<Result<Vec<_>>>()?;
            let ineqs = bell::rv_inequalities(parties, &terms)?;
            let corr = match &opts.input {
                Some(_) => Some(CorrelationVector::from_csv(&read_input(opts)?)?),
                None => None,
            };
            let mut out = Vec::new();
            for q in &ineqs {
                let mut entry = json!({ "terms": q.terms, "distinguished": q.distinguished, "bound": q.bound() });
                if let Some(c) = &corr {
                    let ev = q.evaluate(c)?;
                    entry["lhs"] = json!(ev.lhs_f64());
                    entry["satisfied"] = json!(ev.satisfied);
                }
                out.push(entry);
            }
            write_output(opts, &pretty(&Value::Array(out)))
        }
        BellCmd::Eval { ineq } => {
            let c = CorrelationVector::from_csv(&read_input(opts)?)?;
            let ev = BellInequality::from_json(&read_path(ineq)?)?.evaluate(&c)?;
            let report = json!({
                "lhs": ev.lhs.to_string(),
                "lhs_value": ev.lhs_f64(),
                "bound": ev.bound.to_string(),
                "satisfied": ev.satisfied,
            });
            write_output(opts, &pretty(&report))
        }
        BellCmd::Gpt { preset, a, b, c } => {
            let state = match preset {
                GptPreset::Pr => GptState::pr_box(),
                GptPreset::Bell => GptState::bell(),
                GptPreset::Product => GptState::product(a.clone(), b.clone())?,
                GptPreset::Custom => {
                    let c = c.as_deref().ok_or_else(|| CliError::Usage("custom states need --c".into()))?;
                    bell::gpt_make_bipartite(a.clone(), b.clone(), parse_matrix(c)?)?
                }
            };
            let GptState::Bipartite { a, b, c } = &state else { unreachable!("bipartite presets") };
            let mut report = json!({ "a": a, "b": b, "c": c });
            if state.fiducial_count() == 2 {
                report["chsh"] = json!(state.chsh_value()?);
            }
            write_output(opts, &pretty(&report))
        }
    }
}

fn run_report(g: &StabGraph, a: &Assignment, r: &BitVec, run: &ModelRun) -> Result<Value> {
    let quantum = match comm::classify_submeasurement(g.adjacency(), a)? {
        comm::Definiteness::Definite => json!(comm::qm_sub_sign(g.adjacency(), a)?),
        comm::Definiteness::Random => json!("random"),
    };
    Ok(json!({
        "measurement": a.to_string(),
        "r": r.to_string(),
        "run": serde_json::to_value(run).expect("serializable"),
        "product": run.product(&a.mask),
        "quantum": quantum,
    }))
}

fn parse_family(s: &str) -> Result<GraphFamily> {
    let bad = || CliError::Usage(format!("unknown family {s:?}; use kpq:P,Q, sd:N,B or cluster2x3"));
    if s == "cluster2x3" {
        return Ok(GraphFamily::Cluster2x3);
    }
    let (kind, args) = s.split_once(':').ok_or_else(bad)?;
    let nums: Vec<usize> = args.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    match (kind, nums.as_slice()) {
        ("kpq", [p, q]) if *p >= 1 && *q >= 1 => Ok(GraphFamily::CompleteBipartite { p: *p, q: *q }),
        ("sd", [n, b]) if b <= n => Ok(GraphFamily::SymmetricDifference { n: *n, b: *b }),
        _ => Err(bad()),
    }
}

fn sweep_families(families: &[GraphFamily], jobs: usize) -> Result<Vec<comm::ClassReport>> {
    let jobs = jobs.max(1);
    let chunk = families.len().div_ceil(jobs).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = families
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(comm::verify_class).collect::<std::result::Result<Vec<_>, _>>()))
            .collect();
        let mut out = Vec::new();
        for h in handles {
            out.extend(h.join().expect("worker panicked")?);
        }
        Ok(out)
    })
}

fn comm_cmd(opts: &GlobalOpts, cmd: &CommCmd) -> Result<()> {
    match cmd {
        CommCmd::Nn { .. } | CommCmd::Chain | CommCmd::Universal => {
            let (g, a) = Assignment::from_json(&read_input(opts)?)?;
            let mut rg = rng(opts.seed);
            let r = BitVec::from_bools(&(0..g.n()).map(|_| rg.gen()).collect::<Vec<_>>());
            let run = match cmd {
                CommCmd::Nn { variant } => {
                    let v = match variant {
                        VariantArg::Standard => NnVariant::Standard,
                        VariantArg::Alternative => NnVariant::Alternative,
                    };
                    comm::nn_run(g.adjacency(), &a.letters, &r, v)?
                }
                CommCmd::Chain => comm::chain_run(g.adjacency(), &a.letters, &r)?,
                _ => comm::universal_run(g.adjacency(), &a.letters, &r)?,
            };
            write_output(opts, &pretty(&run_report(&g, &a, &r, &run)?))
        }
        CommCmd::Verify { case } => {
            let case: Counterexample = case.parse().map_err(|e: CommError| CliError::Usage(e.to_string()))?;
            let report = comm::verify_counterexample(case)?;
            match opts.format {
                Some(Format::Json) => write_output(opts, &pretty(&serde_json::to_value(&report).expect("serializable"))),
                _ => write_output(opts, &report.summary()),
            }
        }
        CommCmd::Class { family, up_to } => {
            let families = match (family, up_to) {
                (Some(f), None) => vec![parse_family(f)?],
                (None, Some(n)) => GraphFamily::all_up_to(*n),
                _ => return Err(CliError::Usage("give exactly one of --family or --up-to".into())),
            };
            let reports = sweep_families(&families, opts.jobs)?;
            let total: usize = reports.iter().map(|r| r.violation_count).sum();
            eprintln!("{} graphs, {total} violations", reports.len());
            let value = serde_json::to_value(&reports).expect("serializable");
            write_output(opts, &pretty(&value))
        }
    }
}

fn oracle_check(opts: &GlobalOpts) -> Result<()> {
    let input = read_input(opts)?;
    let (graph, tableau) = if is_graph_json(&input) {
        let g = StabGraph::from_json(&input)?;
        let t = g.to_tableau();
        (g, t)
    } else {
        let t = parse_tableau(&input)?;
        (StabGraph::from_tableau(&t)?, t)
    };
    let from_graph = oracle::run_circuit(&graph.to_circuit(), &[])?;
    let from_tableau = StateVector::from_stabilizers(tableau.rows())?;
    let overlap = from_graph.inner(&from_tableau)?.norm();
    if overlap >= 1.0 - STATE_TOL {
        write_output(opts, &format!("OK: {} qubits, overlap {overlap:.12}", graph.n()))
    } else {
        Err(CliError::Domain(format!("MISMATCH: overlap {overlap:.12}")))
    }
}
