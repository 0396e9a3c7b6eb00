//! Law checks over an oracle corpus, shared by the CLI `selftest` command
//! and the test suites.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::codec::{decode, encode, encode_rank, encode_ranked, encode_simple, CodecConfig, RankedCode};
use crate::enumerate::{count_upto_rank, enumerate_upto_rank, scan_decode, EnumBudget};
use crate::term::{check_wf, fold, identity_para, parse_term, pattern_match, rank, rank_para, render_term, Term};
use crate::Nat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    Oracle,
    Count,
    Roundtrip,
    Injective,
    InjectiveSimple,
    RankPrefix,
    PatternMatchInjective,
    FoldEquation,
    Diagram,
    TermText,
    Scan,
}

impl Law {
    pub const ALL: [Law; 11] = [
        Law::Oracle,
        Law::Count,
        Law::Roundtrip,
        Law::Injective,
        Law::InjectiveSimple,
        Law::RankPrefix,
        Law::PatternMatchInjective,
        Law::FoldEquation,
        Law::Diagram,
        Law::TermText,
        Law::Scan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Oracle => "oracle-sound",
            Law::Count => "count",
            Law::Roundtrip => "roundtrip",
            Law::Injective => "injective",
            Law::InjectiveSimple => "injective-simple",
            Law::RankPrefix => "rank-prefix",
            Law::PatternMatchInjective => "pm-inj",
            Law::FoldEquation => "fold-equation",
            Law::Diagram => "encode-rank=encode-simple",
            Law::TermText => "term-text",
            Law::Scan => "scan-decode",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate corruption for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Drops the lowest bit of every top-level code.
    TruncateCode,
}

#[derive(Clone, Debug)]
pub struct SelfTestOptions {
    pub budget: EnumBudget,
    /// Codes `0..scan_limit` are decoded and re-encoded.
    pub scan_limit: u64,
    pub fault: Option<Fault>,
}

impl Default for SelfTestOptions {
    fn default() -> Self {
        SelfTestOptions { budget: EnumBudget::new(6, 3), scan_limit: 512, fault: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawOutcome {
    pub law: Law,
    pub checked: usize,
    pub failure: Option<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct TypeReport {
    pub type_name: String,
    pub scheme: String,
    pub inhabitants: usize,
    pub budget: EnumBudget,
    pub outcomes: Vec<LawOutcome>,
    pub elapsed: Duration,
}

impl TypeReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(LawOutcome::passed)
    }

    pub fn first_failure(&self) -> Option<&LawOutcome> {
        self.outcomes.iter().find(|o| !o.passed())
    }
}

impl fmt::Display for TypeReport {
    /// Deterministic: timings are not part of the rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "type {} [{}]: {} inhabitants (max-rank {}, base-budget {})",
            self.type_name, self.scheme, self.inhabitants, self.budget.max_rank, self.budget.base_budget
        )?;
        for o in &self.outcomes {
            match &o.failure {
                None => writeln!(f, "  {:<26} ok ({} checks)", o.law.name(), o.checked)?,
                Some(why) => writeln!(f, "  {:<26} FAIL: {why}", o.law.name())?,
            }
        }
        Ok(())
    }
}

struct Checker<'a> {
    cfg: &'a CodecConfig,
    fault: Option<Fault>,
}

impl Checker<'_> {
    fn encode(&self, t: &Term) -> Result<Nat, String> {
        let code = encode(t, self.cfg).map_err(|e| e.to_string())?;
        Ok(match self.fault {
            Some(Fault::TruncateCode) => code >> 1u32,
            None => code,
        })
    }

    fn render(&self, t: &Term) -> String {
        render_term(t, self.cfg.constrs(), self.cfg.registry()).unwrap_or_else(|e| format!("<{e}>"))
    }
}

fn run_law(law: Law, mut body: impl FnMut() -> Result<usize, String>) -> LawOutcome {
    match body() {
        Ok(checked) => LawOutcome { law, checked, failure: None },
        Err(why) => LawOutcome { law, checked: 0, failure: Some(why) },
    }
}

fn distinct<'c, K: std::hash::Hash + Eq>(
    corpus: &'c [Term],
    what: &str,
    mut key: impl FnMut(&'c Term) -> Result<K, String>,
    show: impl Fn(&Term) -> String,
) -> Result<usize, String> {
    let mut seen: HashMap<K, usize> = HashMap::with_capacity(corpus.len());
    for (i, t) in corpus.iter().enumerate() {
        if let Some(j) = seen.insert(key(t)?, i) {
            return Err(format!("{what} collide: {} and {}", show(&corpus[j]), show(t)));
        }
    }
    Ok(corpus.len())
}

/// Runs every [`Law`] over the oracle corpus of `cfg`'s type.
pub fn run_selftest(cfg: &CodecConfig, opts: &SelfTestOptions) -> TypeReport {
    let start = Instant::now();
    let constrs = cfg.constrs();
    let registry = cfg.registry();
    let corpus = enumerate_upto_rank(constrs, registry, opts.budget);
    let ck = Checker { cfg, fault: opts.fault };
    let show = |t: &Term| ck.render(t);
    let mut outcomes = Vec::new();

    outcomes.push(run_law(Law::Oracle, || {
        for t in &corpus {
            check_wf(t, constrs, registry).map_err(|e| format!("{}: {e}", show(t)))?;
            let r = rank(constrs, t).map_err(|e| e.to_string())?;
            if r >= opts.budget.max_rank {
                return Err(format!("{} has rank {r}", show(t)));
            }
        }
        let unique: HashSet<&Term> = corpus.iter().collect();
        if unique.len() != corpus.len() {
            return Err("enumeration produced duplicates".into());
        }
        Ok(corpus.len())
    }));

    outcomes.push(run_law(Law::Count, || {
        let counted = count_upto_rank(constrs, registry, opts.budget);
        if counted != Nat::from(corpus.len()) {
            return Err(format!("count_upto_rank = {counted}, enumeration length = {}", corpus.len()));
        }
        Ok(1)
    }));

    outcomes.push(run_law(Law::Roundtrip, || {
        for t in &corpus {
            let code = ck.encode(t)?;
            match decode(&code, cfg) {
                Some(back) if back == *t => {}
                Some(back) => return Err(format!("{} decodes to {}", show(t), show(&back))),
                None => return Err(format!("code {code} of {} does not decode", show(t))),
            }
        }
        Ok(corpus.len())
    }));

    outcomes.push(run_law(Law::Injective, || distinct(&corpus, "codes", |t| ck.encode(t), show)));

    outcomes.push(run_law(Law::InjectiveSimple, || {
        distinct(&corpus, "simple codes", |t| encode_simple(t, cfg).map_err(|e| e.to_string()), show)
    }));

    outcomes.push(run_law(Law::RankPrefix, || {
        for t in &corpus {
            let code = ck.encode(t)?;
            let r = rank(constrs, t).map_err(|e| e.to_string())?;
            match RankedCode::split(&code, cfg) {
                Some(rc) if rc.rank == Nat::from(r) => {}
                _ => return Err(format!("code of {} does not carry rank {r}", show(t))),
            }
            let ranked = encode_ranked(t, cfg).map_err(|e| e.to_string())?;
            if ranked.rank != Nat::from(r) {
                return Err(format!("encode_ranked rank mismatch on {}", show(t)));
            }
        }
        Ok(corpus.len())
    }));

    outcomes.push(run_law(Law::PatternMatchInjective, || {
        distinct(&corpus, "pattern_match values", |t| pattern_match(constrs, t).map_err(|e| e.to_string()), show)?;
        for t in &corpus {
            let depth = pattern_match(constrs, t).map_err(|e| e.to_string())?.branch_depth();
            if depth != t.ctor {
                return Err(format!("{} unfolds to branch {depth}", show(t)));
            }
        }
        Ok(corpus.len())
    }));

    outcomes.push(run_law(Law::FoldEquation, || {
        let ranks = rank_para(constrs);
        let id = identity_para(constrs);
        for t in &corpus {
            let lhs = fold(constrs, &ranks, t).map_err(|e| e.to_string())?;
            let kids: Result<Vec<usize>, _> = t.rec_children().map(|s| fold(constrs, &ranks, s)).collect();
            let rhs = ranks.apply(t.ctor, &t.base_codes(), kids.map_err(|e| e.to_string())?);
            if lhs != rhs {
                return Err(format!("rank fold equation fails on {}: {lhs} vs {rhs}", show(t)));
            }
            if (lhs == 1) != (constrs.constructors[t.ctor].rec_arity() == 0) {
                return Err(format!("rank of {} is {lhs}", show(t)));
            }
            let rebuilt = fold(constrs, &id, t).map_err(|e| e.to_string())?;
            if rebuilt != *t {
                return Err(format!("identity fold changes {}", show(t)));
            }
        }
        Ok(corpus.len())
    }));

    outcomes.push(run_law(Law::Diagram, || {
        let mut checks = 0;
        for t in &corpus {
            let simple = encode_simple(t, cfg).map_err(|e| e.to_string())?;
            let r = rank(constrs, t).map_err(|e| e.to_string())?;
            for bound in [r + 1, r + 2, r + 5] {
                let stratified = encode_rank(t, bound, cfg).map_err(|e| e.to_string())?;
                if stratified != simple {
                    return Err(format!(
                        "encode_rank({}, {bound}) = {stratified} but encode_simple = {simple}",
                        show(t)
                    ));
                }
                checks += 1;
            }
        }
        Ok(checks)
    }));

    outcomes.push(run_law(Law::TermText, || {
        for t in &corpus {
            let text = render_term(t, constrs, registry).map_err(|e| e.to_string())?;
            let back = parse_term(&text, constrs, registry).map_err(|e| format!("`{text}`: {e}"))?;
            if back != *t {
                return Err(format!("`{text}` reparses differently"));
            }
        }
        Ok(corpus.len())
    }));

    outcomes.push(run_law(Law::Scan, || {
        let hits = scan_decode(cfg, &Nat::from(opts.scan_limit));
        for (k, t) in &hits {
            let again = ck.encode(t)?;
            if &again != k {
                return Err(format!("{k} decodes to {} which encodes to {again}", show(t)));
            }
        }
        Ok(hits.len())
    }));

    TypeReport {
        type_name: constrs.type_name.clone(),
        scheme: cfg.scheme().to_string(),
        inhabitants: corpus.len(),
        budget: opts.budget,
        outcomes,
        elapsed: start.elapsed(),
    }
}
