//! Countable base types: the types a definition may mention besides itself.
//!
//! A [`BaseCodec`] encodes literal strings (its interchange form) into
//! [`Nat`] codes. Compiled definitions can be registered as bases for later
//! definitions via [`register_compiled`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::codec::{self, CodecConfig};
use crate::countability::Encoder;
use crate::enumerate::{enumerate_upto_rank, EnumBudget};
use crate::syntax::{ArgSpec, ConstrsType};
use crate::term::{check_wf, parse_term, render_term};
use crate::Nat;

/// Rank cap when sampling inhabitants of an infinite compiled type.
const SAMPLE_RANK_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cardinality {
    Finite(Nat),
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "finite({n})"),
            Cardinality::Infinite => f.write_str("infinite"),
        }
    }
}

type Sampler = dyn Fn(usize) -> Vec<Nat> + Send + Sync;

/// A registered countable type. For `Finite(n)` the image of the encoder is
/// exactly `0..n`.
#[derive(Clone)]
pub struct BaseCodec {
    name: String,
    cardinality: Cardinality,
    encoder: Encoder<String>,
    sampler: Option<Arc<Sampler>>,
}

impl fmt::Debug for BaseCodec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseCodec").field("name", &self.name).field("cardinality", &self.cardinality).finish()
    }
}

impl BaseCodec {
    /// A finite type whose literals are listed in code order.
    pub fn finite(name: impl Into<String>, literals: &[&str]) -> Self {
        let table: Vec<String> = literals.iter().map(|s| s.to_string()).collect();
        let index: BTreeMap<String, usize> = table.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let name = name.into();
        BaseCodec {
            cardinality: Cardinality::Finite(Nat::from(table.len())),
            encoder: Encoder::new(
                name.clone(),
                move |lit: &String| index.get(lit).map(|&i| Nat::from(i)),
                move |code: &Nat| code.to_usize().and_then(|i| table.get(i).cloned()),
            ),
            name,
            sampler: None,
        }
    }

    /// General constructor. `sampler(b)` should return the first `b`
    /// inhabitants' codes in a fixed order; without one, infinite bases
    /// sample the codes `0..b`.
    pub fn with_encoder(
        name: impl Into<String>,
        cardinality: Cardinality,
        encoder: Encoder<String>,
        sampler: Option<Arc<Sampler>>,
    ) -> Self {
        BaseCodec { name: name.into(), cardinality, encoder, sampler }
    }

    /// Decimal literals, identity code.
    pub fn nat() -> Self {
        let encoder = Encoder::new(
            "nat",
            |lit: &String| {
                let canonical =
                    !lit.is_empty() && lit.bytes().all(|b| b.is_ascii_digit()) && (lit == "0" || !lit.starts_with('0'));
                if canonical {
                    lit.parse::<Nat>().ok()
                } else {
                    None
                }
            },
            |code: &Nat| Some(code.to_string()),
        );
        BaseCodec::with_encoder("nat", Cardinality::Infinite, encoder, None)
    }

    pub fn bool() -> Self {
        BaseCodec::finite("bool", &["false", "true"])
    }

    pub fn unit() -> Self {
        BaseCodec::finite("unit", &["tt"])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> &Cardinality {
        &self.cardinality
    }

    pub fn encoder(&self) -> &Encoder<String> {
        &self.encoder
    }

    pub fn encode_literal(&self, literal: &str) -> Option<Nat> {
        self.encoder.encode(&literal.to_string())
    }

    pub fn decode_code(&self, code: &Nat) -> Option<String> {
        self.encoder.decode(code)
    }

    /// Whether `code` is in the image of the encoder.
    pub fn accepts(&self, code: &Nat) -> bool {
        match &self.cardinality {
            Cardinality::Finite(n) => code < n,
            Cardinality::Infinite => self.decode_code(code).is_some(),
        }
    }

    /// Codes used when enumerating terms over this base: every code of a
    /// finite base, the first `budget` inhabitants of an infinite one.
    pub fn enumeration_values(&self, budget: usize) -> Vec<Nat> {
        match &self.cardinality {
            Cardinality::Finite(n) => {
                let n = n.to_usize().unwrap_or(budget);
                (0..n).map(Nat::from).collect()
            }
            Cardinality::Infinite => match &self.sampler {
                Some(sample) => sample(budget),
                None => (0..budget).map(Nat::from).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("base type `{0}` is already registered")]
    Duplicate(String),
}

/// Name-indexed set of base codecs. Cheap to clone; registration returns a
/// new registry and leaves the original untouched.
#[derive(Clone, Default)]
pub struct Registry {
    codecs: BTreeMap<String, Arc<BaseCodec>>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.codecs.keys()).finish()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// `nat`, `bool` and `unit`.
    pub fn builtin() -> Self {
        [BaseCodec::nat(), BaseCodec::bool(), BaseCodec::unit()]
            .into_iter()
            .try_fold(Registry::empty(), |reg, codec| reg.register(codec))
            .expect("builtin names are distinct")
    }

    pub fn register(&self, codec: BaseCodec) -> Result<Registry, RegistryError> {
        if self.codecs.contains_key(codec.name()) {
            return Err(RegistryError::Duplicate(codec.name().to_string()));
        }
        let mut next = self.clone();
        next.codecs.insert(codec.name().to_string(), Arc::new(codec));
        Ok(next)
    }

    pub fn get(&self, name: &str) -> Option<&BaseCodec> {
        self.codecs.get(name).map(Arc::as_ref)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.codecs.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.codecs.keys().map(String::as_str)
    }
}

/// Exact cardinality of the type described by `constrs`.
///
/// The type is inhabited iff some constructor without recursive arguments
/// has only inhabited bases. An inhabited type is infinite iff some
/// constructor whose bases are all inhabited has a recursive argument or an
/// infinite base.
pub fn cardinality_of(constrs: &ConstrsType, registry: &Registry) -> Cardinality {
    let base_card = |b: &str| registry.get(b).map_or(Cardinality::Finite(Nat::zero()), |c| c.cardinality().clone());
    let usable: Vec<_> = constrs
        .constructors
        .iter()
        .filter(|c| {
            c.args.iter().all(|a| match a {
                ArgSpec::Base(b) => base_card(b) != Cardinality::Finite(Nat::zero()),
                ArgSpec::Rec => true,
            })
        })
        .collect();
    let inhabited = usable.iter().any(|c| c.rec_arity() == 0);
    if !inhabited {
        return Cardinality::Finite(Nat::zero());
    }
    let infinite = usable.iter().any(|c| {
        c.args.iter().any(|a| match a {
            ArgSpec::Rec => true,
            ArgSpec::Base(b) => base_card(b) == Cardinality::Infinite,
        })
    });
    if infinite {
        return Cardinality::Infinite;
    }
    let total = usable
        .iter()
        .map(|c| {
            c.args
                .iter()
                .map(|a| match a {
                    ArgSpec::Base(b) => match base_card(b) {
                        Cardinality::Finite(n) => n,
                        Cardinality::Infinite => unreachable!("infinite bases handled above"),
                    },
                    ArgSpec::Rec => unreachable!("recursive constructors handled above"),
                })
                .product::<Nat>()
        })
        .sum();
    Cardinality::Finite(total)
}

/// Wraps a compiled definition as a base codec named `def_name` and
/// registers it.
///
/// Literals are terms in S-expression syntax. Infinite types use their
/// stratified code; finite types use the position of the term in
/// enumeration order, so their image is exactly `0..n`.
pub fn register_compiled(reg: &Registry, def_name: &str, cfg: &CodecConfig) -> Result<Registry, RegistryError> {
    if reg.contains(def_name) {
        return Err(RegistryError::Duplicate(def_name.to_string()));
    }
    let cardinality = cardinality_of(cfg.constrs(), cfg.registry());
    let codec = match &cardinality {
        Cardinality::Finite(_) => finite_compiled(def_name, cfg, cardinality.clone()),
        Cardinality::Infinite => infinite_compiled(def_name, cfg),
    };
    reg.register(codec)
}

fn finite_compiled(def_name: &str, cfg: &CodecConfig, cardinality: Cardinality) -> BaseCodec {
    // Every inhabitant of a finite type is built from a non-recursive
    // constructor over finite bases, so rank 1 covers it.
    let terms = enumerate_upto_rank(cfg.constrs(), cfg.registry(), EnumBudget::new(2, 1));
    let table: Vec<String> =
        terms.iter().map(|t| render_term(t, cfg.constrs(), cfg.registry()).expect("enumerated terms render")).collect();
    debug_assert_eq!(Cardinality::Finite(Nat::from(table.len())), cardinality);
    let index: BTreeMap<String, usize> = table.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let parse_cfg = cfg.clone();
    let encoder = Encoder::new(
        def_name,
        move |lit: &String| {
            let t = parse_term(lit, parse_cfg.constrs(), parse_cfg.registry()).ok()?;
            let canonical = render_term(&t, parse_cfg.constrs(), parse_cfg.registry()).ok()?;
            index.get(&canonical).map(|&i| Nat::from(i))
        },
        move |code: &Nat| code.to_usize().and_then(|i| table.get(i).cloned()),
    );
    BaseCodec::with_encoder(def_name, cardinality, encoder, None)
}

fn infinite_compiled(def_name: &str, cfg: &CodecConfig) -> BaseCodec {
    let (enc_cfg, dec_cfg, sample_cfg) = (cfg.clone(), cfg.clone(), cfg.clone());
    let encoder = Encoder::new(
        def_name,
        move |lit: &String| {
            let t = parse_term(lit, enc_cfg.constrs(), enc_cfg.registry()).ok()?;
            check_wf(&t, enc_cfg.constrs(), enc_cfg.registry()).ok()?;
            codec::encode(&t, &enc_cfg).ok()
        },
        move |code: &Nat| {
            let t = codec::decode(code, &dec_cfg)?;
            render_term(&t, dec_cfg.constrs(), dec_cfg.registry()).ok()
        },
    );
    let sampler = move |budget: usize| {
        let mut terms = Vec::new();
        for max_rank in 2..=SAMPLE_RANK_CAP {
            terms = enumerate_upto_rank(sample_cfg.constrs(), sample_cfg.registry(), EnumBudget::new(max_rank, budget));
            if terms.len() >= budget {
                break;
            }
        }
        terms.iter().take(budget).map(|t| codec::encode(t, &sample_cfg).expect("enumerated terms encode")).collect()
    };
    BaseCodec::with_encoder(def_name, Cardinality::Infinite, encoder, Some(Arc::new(sampler)))
}
