use std::io::Read;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};

use littlewood::constructor::{
    build_beta_palindromic, build_beta_thm1, build_beta_thm2, build_beta_thm3, parse_rational, ConstructionDoc, ConstructionRecord,
    GrowthSpec, MarkerRule, PhiFunction, TheoremTag,
};
use littlewood::homography::{
    apply_mobius, find_palindromic_prefixes, measured_exponent, nested_repetition_alpha, nested_repetition_words, thm4_witness,
    thm5_witness, thm6_scan,
};
use littlewood::verifier::{
    aggregate, append_to_store, baseline_check, certify_construction, independence_scan, lemma_oracles, lower_bound_scan,
    thm4_certificates, thm5_certificates, thm6_certificates, Certificate, OracleSizes, RelationOutcome, Verdict, WidthPolicy,
};
use littlewood::{BigMobius, CfStream, CfWord, Error, Result, SCHEMA_VERSION};

use crate::args::{CertifyArgs, Cli, Command, ConstructArgs, Format, GosperArgs, PairArgs, ScanCommand, StoreArgs};
use crate::render::{big, certificate_table, sci, table};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_INDETERMINATE: u8 = 3;

pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn pass(stdout: String) -> Self {
        Self { stdout, code: EXIT_PASS }
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Indeterminate => EXIT_INDETERMINATE,
    }
}

fn io_err(what: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("{}: {e}", what.display()))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn stream(text: &str) -> Result<CfStream> {
    text.parse()
}

fn word(text: &str) -> Result<CfWord> {
    let v = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad partial quotient {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    CfWord::new(v)
}

fn mobius(text: &str) -> Result<BigMobius> {
    text.parse()
}

fn marker_rule(text: &str, seed: u64) -> Result<MarkerRule> {
    if text == "seeded" {
        return Ok(MarkerRule::Seeded(seed));
    }
    text.parse()
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Construct(a) => construct(a, cli.seed, cli.format.unwrap_or(Format::Json)),
        Command::Certify(a) => certify(a, cli.format.unwrap_or(Format::Json)),
        Command::Gosper(a) => gosper(a, cli.format.unwrap_or(Format::Table)),
        Command::Scan(s) => scan(s, cli.seed, cli.format.unwrap_or(Format::Json)),
    }
}

fn with_bound(text: &str, m: Option<u64>) -> String {
    match m {
        Some(m) if !text.contains("M=") => format!("{text} M={m}"),
        _ => text.to_string(),
    }
}

fn growth(a: &ConstructArgs) -> Result<GrowthSpec> {
    match (&a.n_list, &a.ratio) {
        (Some(list), None) => Ok(GrowthSpec::Explicit(list.clone())),
        (None, Some(r)) => Ok(GrowthSpec::Ratio(parse_rational(r)?)),
        (Some(_), Some(_)) => Err(Error::InvalidArgument("give either --ratio or --n-list, not both".into())),
        (None, None) => Err(Error::InvalidArgument("this construction needs --ratio or --n-list".into())),
    }
}

fn required<'a>(v: &'a Option<String>, flag: &str, thm: TheoremTag) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::InvalidArgument(format!("{thm} needs {flag}")))
}

pub fn build_record(a: &ConstructArgs, seed: u64) -> Result<ConstructionRecord> {
    let tag: TheoremTag = a.thm.parse()?;
    let t_rule = marker_rule(&a.t, seed)?;
    if tag != TheoremTag::T3 && a.alpha.len() != 1 {
        return Err(Error::InvalidArgument(format!("{tag} takes exactly one --alpha")));
    }
    let first = || stream(&with_bound(&a.alpha[0], a.m));
    match tag {
        TheoremTag::T1 => {
            let phi: PhiFunction = required(&a.phi, "--phi", tag)?.parse()?;
            build_beta_thm1(first()?, phi, t_rule)
        }
        TheoremTag::T3 => {
            let phi: PhiFunction = required(&a.phi, "--phi", tag)?.parse()?;
            let alphas = a.alpha.iter().map(|s| stream(s)).collect::<Result<Vec<_>>>()?;
            build_beta_thm3(alphas, phi, t_rule, a.m)
        }
        TheoremTag::T2 | TheoremTag::Palindromic => {
            let alpha = first()?;
            let m = match a.m {
                Some(m) => m,
                None => alpha.require_bound()?,
            };
            let eps = parse_rational(required(&a.eps, "--eps", tag)?)?;
            if tag == TheoremTag::T2 {
                build_beta_thm2(alpha, m, eps, t_rule, growth(a)?)
            } else {
                build_beta_palindromic(alpha, m, eps, t_rule, growth(a)?)
            }
        }
    }
}

/// Serializes with up to `terms` schedule terms, fewer when the schedule
/// is shorter or outgrows machine integers.
fn to_doc(rec: &ConstructionRecord, terms: usize, prefix_len: usize) -> Result<ConstructionDoc> {
    let mut k = terms.max(1);
    loop {
        match rec.to_doc(k, prefix_len) {
            Err(Error::ScheduleOverflow(_) | Error::ScheduleIndex { .. }) if k > 1 => k -= 1,
            other => return other,
        }
    }
}

fn construct(a: &ConstructArgs, seed: u64, format: Format) -> Result<Output> {
    let rec = build_record(a, seed)?;
    let doc = to_doc(&rec, a.terms, a.prefix_len)?;
    let text = pretty(&doc);
    if let Some(path) = &a.out {
        std::fs::write(path, &text).map_err(|e| io_err(path, e))?;
    }
    let stdout = match format {
        Format::Json if a.out.is_none() => text,
        Format::Json => String::new(),
        Format::Table => {
            let s = &doc.schedule;
            let rows: Vec<Vec<String>> =
                (0..s.n.len()).map(|i| vec![(i + 1).to_string(), s.n[i].to_string(), s.m[i].to_string(), s.t[i].to_string()]).collect();
            let mut out = format!("theorem {}  M = {}  t = {}\n", doc.theorem, doc.bound, doc.t_rule);
            if let Some(b) = doc.burn_in {
                out += &format!("growth condition holds from j = {b}\n");
            }
            out += &table(&["j", "n_j", "m_j", "t_j"], &rows);
            let shown: Vec<String> = doc.beta_prefix.iter().take(40).map(u64::to_string).collect();
            out += &format!("beta = [0; {}{}]\n", shown.join(", "), if doc.beta_prefix.len() > 40 { ", ..." } else { "" });
            out
        }
    };
    Ok(Output::pass(stdout))
}

fn read_record(path: &Path) -> Result<ConstructionRecord> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| io_err(path, e))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| io_err(path, e))?
    };
    let doc: ConstructionDoc = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("construction record: {e}")))?;
    ConstructionRecord::from_doc(&doc)
}

pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::Parse(format!("expected an index or a range a..b, got {text:?}"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim_start_matches('=').trim()),
        None => (text.trim(), text.trim()),
    };
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn store(args: &StoreArgs, certs: &[Certificate]) -> Result<()> {
    match &args.store {
        Some(path) => append_to_store(path, certs),
        None => Ok(()),
    }
}

fn certificate_lines(certs: &[Certificate]) -> String {
    certs.iter().map(|c| c.to_json_line() + "\n").collect()
}

fn certify(a: &CertifyArgs, format: Format) -> Result<Output> {
    let rec = read_record(&a.record)?;
    let js = parse_range(&a.j)?;
    let policy = WidthPolicy { divisor: a.divisor.max(1), max_halvings: a.max_halvings };
    let certs = certify_construction(&rec, js, &policy)?;
    store(&a.store, &certs)?;
    let verdict = aggregate(&certs);
    let stdout = match format {
        Format::Json => certificate_lines(&certs),
        Format::Table => certificate_table(&certs) + &format!("aggregate: {verdict}\n"),
    };
    Ok(Output { stdout, code: verdict_code(verdict) })
}

fn gosper(a: &GosperArgs, format: Format) -> Result<Output> {
    let alpha = stream(&a.alpha)?;
    let m = mobius(&a.map)?;
    let (int, frac) = apply_mobius(&alpha, &m)?;
    let mut quotients = Vec::with_capacity(a.n);
    for i in 1..=a.n {
        match frac.quotient(i) {
            Ok(q) => quotients.push(q),
            Err(Error::StreamExhausted { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let terminated = quotients.len() < a.n;
    let stdout = match format {
        Format::Json => json!({ "integer_part": int.to_string(), "quotients": quotients, "terminated": terminated }).to_string() + "\n",
        Format::Table => {
            let tail: Vec<String> = quotients.iter().map(u64::to_string).collect();
            if tail.is_empty() {
                format!("{int}\n")
            } else {
                format!("{int}; {}\n", tail.join(" "))
            }
        }
    };
    Ok(Output::pass(stdout))
}

fn pair(p: &PairArgs) -> Result<(CfStream, CfStream)> {
    if let Some(path) = &p.record {
        if p.alpha.is_some() {
            return Err(Error::InvalidArgument("--record supplies alpha; drop --alpha".into()));
        }
        let rec = read_record(path)?;
        return Ok((rec.alpha().clone(), rec.beta().clone()));
    }
    let alpha = stream(p.alpha.as_deref().ok_or_else(|| Error::InvalidArgument("give --alpha or --record".into()))?)?;
    let beta = match &p.beta {
        Some(b) => stream(b)?,
        None => alpha.clone(),
    };
    Ok((alpha, beta))
}

fn report(kind: &str, body: Value) -> String {
    let mut v = json!({ "spec_version": SCHEMA_VERSION, "kind": kind });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    pretty(&v)
}

fn scan(s: &ScanCommand, seed: u64, format: Format) -> Result<Output> {
    match s {
        ScanCommand::Lemmas => {
            let rep = lemma_oracles(seed, &OracleSizes::default())?;
            let code = if rep.all_pass() { EXIT_PASS } else { EXIT_FAIL };
            let stdout = match format {
                Format::Json => report("lemmas", serde_json::to_value(&rep).expect("serializable")),
                Format::Table => {
                    let rows: Vec<Vec<String>> = rep
                        .results
                        .iter()
                        .map(|r| vec![r.name.clone(), r.checked.to_string(), r.counterexamples.len().to_string()])
                        .collect();
                    table(&["suite", "checked", "counterexamples"], &rows)
                }
            };
            Ok(Output { stdout, code })
        }
        ScanCommand::Independence { pair: p, h, width, max_depth } => {
            let (alpha, beta) = pair(p)?;
            let w = independence_scan(&alpha, &beta, *h, &parse_rational(width)?, *max_depth)?;
            let code = match &w.outcome {
                RelationOutcome::NoRelation { .. } => EXIT_PASS,
                RelationOutcome::Candidate { exact: true, .. } => EXIT_FAIL,
                RelationOutcome::Candidate { exact: false, .. } => EXIT_INDETERMINATE,
            };
            let stdout = match format {
                Format::Json => report("independence", serde_json::to_value(&w).expect("serializable")),
                Format::Table => match &w.outcome {
                    RelationOutcome::NoRelation { min_lower, argmin, .. } => format!(
                        "no relation with |A|,|B|,|C| <= {}: {} triples, min |A alpha + B beta + C| >= {} at {:?}\n",
                        w.h,
                        w.checked,
                        sci(min_lower),
                        argmin
                    ),
                    RelationOutcome::Candidate { triples, exact } => {
                        format!("candidate relations ({}): {:?}\n", if *exact { "exact" } else { "unresolved at cap" }, triples)
                    }
                },
            };
            Ok(Output { stdout, code })
        }
        ScanCommand::LowerBound { pair: p, q } => {
            let (alpha, beta) = pair(p)?;
            let rep = lower_bound_scan(&alpha, &beta, *q)?;
            let stdout = match format {
                Format::Json => report("lower_bound", serde_json::to_value(&rep).expect("serializable")),
                Format::Table => format!(
                    "min over q <= {} of q^2 ||q alpha|| ||q beta|| in [{}, {}], smallest upper endpoint at q = {}\n",
                    rep.big_q,
                    sci(rep.minimum.lo()),
                    sci(rep.minimum.hi()),
                    rep.argmin
                ),
            };
            Ok(Output::pass(stdout))
        }
        ScanCommand::Baseline { alpha, count } => {
            let rows = baseline_check(&stream(alpha)?, *count)?;
            let one = littlewood::Rational::from_integer(BigInt::from(1));
            let ok = rows.iter().all(|(_, iv)| iv.hi() < &one);
            let stdout = match format {
                Format::Json => {
                    let items: Vec<Value> = rows
                        .iter()
                        .map(|(q, iv)| json!({ "q": q.to_string(), "lo": iv.lo().to_string(), "hi": iv.hi().to_string() }))
                        .collect();
                    report("baseline", json!({ "rows": items, "all_below_one": ok }))
                }
                Format::Table => {
                    let t: Vec<Vec<String>> = rows
                        .iter()
                        .enumerate()
                        .map(|(i, (q, iv))| vec![(i + 1).to_string(), big(&q.to_string()), sci(iv.lo()), sci(iv.hi())])
                        .collect();
                    table(&["n", "q_n", "lo", "hi"], &t)
                }
            };
            Ok(Output { stdout, code: if ok { EXIT_PASS } else { EXIT_FAIL } })
        }
        ScanCommand::Thm4 { alpha, u, seed_word, count, x, map, store: st } => {
            let m = mobius(map)?;
            let x = parse_rational(x)?;
            let (alpha, words) = match alpha {
                Some(a) => {
                    if u.is_empty() {
                        return Err(Error::InvalidArgument("--alpha needs at least one --u".into()));
                    }
                    (stream(a)?, u.iter().map(|w| word(w)).collect::<Result<Vec<_>>>()?)
                }
                None => {
                    let seed = word(seed_word)?;
                    (nested_repetition_alpha(&seed)?, nested_repetition_words(&seed, *count))
                }
            };
            let ws = words.iter().map(|w| thm4_witness(&alpha, w, &x, &m)).collect::<Result<Vec<_>>>()?;
            let certs = thm4_certificates(&ws);
            store(st, &certs)?;
            let exponents: Vec<Option<f64>> = ws.iter().map(|w| w.exponent).collect();
            witness_output("thm4", json!({ "exponents": exponents }), &certs, format)
        }
        ScanCommand::Thm5 { alpha, pairs, x, map, store: st } => {
            let m = mobius(map)?;
            let alpha = stream(alpha)?;
            let x = x.as_deref().map(parse_rational).transpose()?;
            let ws = pairs
                .iter()
                .map(|p| {
                    let (v, u) = p.split_once(':').ok_or_else(|| Error::Parse(format!("expected V:U, got {p:?}")))?;
                    thm5_witness(&alpha, &word(v)?, &word(u)?, &m, x.as_ref())
                })
                .collect::<Result<Vec<_>>>()?;
            let (c, certs) = thm5_certificates(&ws);
            store(st, &certs)?;
            witness_output("thm5", json!({ "constant": c.to_string() }), &certs, format)
        }
        ScanCommand::Thm6 { alpha, base, eps, ratio, count, max_len, map, store: st } => {
            let m = mobius(map)?;
            let (alpha, lengths) = match alpha {
                Some(a) => {
                    let a = stream(a)?;
                    let lengths: Vec<usize> = find_palindromic_prefixes(&a, *max_len)?.into_iter().take(*count).collect();
                    (a, lengths)
                }
                None => {
                    let base = stream(base)?;
                    let bound = base.require_bound()?;
                    let rec = build_beta_palindromic(base, bound, parse_rational(eps)?, MarkerRule::Default, GrowthSpec::Ratio(parse_rational(ratio)?))?;
                    let lengths = rec.palindrome_lengths(*count)?.into_iter().map(|l| l as usize).collect();
                    (rec.beta().clone(), lengths)
                }
            };
            if lengths.is_empty() {
                return Err(Error::InvalidArgument("no palindromic prefixes found".into()));
            }
            let rows = thm6_scan(&alpha, &lengths, &m)?;
            let (c, certs) = thm6_certificates(&rows);
            store(st, &certs)?;
            let q2: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "length": r.length,
                        "q": r.q.to_string(),
                        "q2_product_lo": r.value.lo().to_string(),
                        "q2_product_hi": r.value.hi().to_string(),
                        "exponent": measured_exponent(r.value.hi(), &r.q),
                    })
                })
                .collect();
            witness_output("thm6", json!({ "constant": c.to_string(), "lengths": lengths, "q2_products": q2 }), &certs, format)
        }
    }
}

fn witness_output(kind: &str, extra: Value, certs: &[Certificate], format: Format) -> Result<Output> {
    let verdict = aggregate(certs);
    let stdout = match format {
        Format::Json => {
            let mut body = extra;
            body["certificates"] = serde_json::to_value(certs).expect("serializable");
            body["aggregate"] = json!(verdict);
            report(kind, body)
        }
        Format::Table => {
            let mut out = String::new();
            if let Some(c) = extra.get("constant").and_then(Value::as_str) {
                out += &format!("reported constant: {c}\n");
            }
            out + &certificate_table(certs) + &format!("aggregate: {verdict}\n")
        }
    };
    Ok(Output { stdout, code: verdict_code(verdict) })
}
