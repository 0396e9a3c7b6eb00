//! Rank-stratified injective encoding of terms into [`Nat`].
//!
//! A term `t` of rank `r` is encoded as `pair(r, body)`, where `body` is the
//! code of `pattern_match(t)` with every recursive sub-term encoded at a rank
//! budget one lower. The product and sum structure of the one-level unfolding
//! maps onto numbers as follows:
//!
//! * `UnitV` is `0`;
//! * `Tuple(h, tail)` is `pair(h, tail)` under the product scheme;
//! * a base leaf is its base code, a recursive leaf the sub-term's code;
//! * `InR^i (InL p)` is [`sum_code`]`(i, p, constructor count)`.
//!
//! [`encode_simple`] is the same structural map without rank bookkeeping.

use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::countability::{sum_code, sum_decode, PairingScheme};
use crate::registry::Registry;
use crate::syntax::{ArgSpec, ConstrsType};
use crate::term::{check_wf, pattern_match, rank, Arg, NormLeaf, NormValue, Term, TermError};
use crate::Nat;

const MIN_STACK_RED_ZONE: usize = 32 * 1024;
const STACK_GROWTH_SIZE: usize = 1024 * 1024;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("base type `{0}` has no registered encoder")]
    UnknownBase(String),
    #[error("rank {rank} is not below the bound {bound}")]
    RankBoundViolated { rank: usize, bound: usize },
    #[error("code too large to represent under the {0} pairing")]
    CodeTooLarge(PairingScheme),
    #[error("value does not conform to the normtype: {0}")]
    Shape(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Everything needed to encode terms of one type. Immutable once built.
#[derive(Clone, Debug)]
pub struct CodecConfig {
    scheme: PairingScheme,
    product_scheme: PairingScheme,
    constrs: Arc<ConstrsType>,
    registry: Registry,
}

impl CodecConfig {
    /// `scheme` pairs the rank with the body. Products use the compact
    /// pairing unless changed with [`CodecConfig::with_product_scheme`].
    ///
    /// Fails if some base of `constrs` is not registered.
    pub fn new(scheme: PairingScheme, constrs: ConstrsType, registry: Registry) -> Result<Self, CodecError> {
        if let Some(missing) = constrs.bases().into_iter().find(|b| !registry.contains(b)) {
            return Err(CodecError::UnknownBase(missing.to_string()));
        }
        Ok(CodecConfig { scheme, product_scheme: PairingScheme::Compact, constrs: Arc::new(constrs), registry })
    }

    /// Pairing used inside product tuples. The paper scheme nests through
    /// an exponent here, so codes grow as towers of powers of two with
    /// term depth; it is only usable for very small terms.
    pub fn with_product_scheme(mut self, scheme: PairingScheme) -> Self {
        self.product_scheme = scheme;
        self
    }

    pub fn scheme(&self) -> PairingScheme {
        self.scheme
    }

    pub fn product_scheme(&self) -> PairingScheme {
        self.product_scheme
    }

    pub fn constrs(&self) -> &ConstrsType {
        &self.constrs
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    fn pair(&self, scheme: PairingScheme, x: &Nat, y: &Nat) -> Result<Nat, CodecError> {
        scheme.pair(x, y).ok_or(CodecError::CodeTooLarge(scheme))
    }
}

/// A top-level code split into its rank prefix and body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedCode {
    pub rank: Nat,
    pub body: Nat,
}

impl RankedCode {
    pub fn split(code: &Nat, cfg: &CodecConfig) -> Option<RankedCode> {
        let (rank, body) = cfg.scheme.unpair(code)?;
        Some(RankedCode { rank, body })
    }

    pub fn join(&self, cfg: &CodecConfig) -> Result<Nat, CodecError> {
        cfg.pair(cfg.scheme, &self.rank, &self.body)
    }
}

/// Numeric image of a one-level unfolding; recursive leaves are handed to
/// `rec_encode`.
pub fn encode_norm(
    nv: &NormValue<'_>,
    cfg: &CodecConfig,
    rec_encode: &mut dyn FnMut(&Term) -> Result<Nat, CodecError>,
) -> Result<Nat, CodecError> {
    let branch_count = cfg.constrs.len();
    let branch = nv.branch_depth();
    let mut cur = nv;
    for _ in 0..branch {
        match cur {
            NormValue::InR(inner) => cur = inner,
            _ => unreachable!("branch_depth counted InR wrappers"),
        }
    }
    let NormValue::InL(product) = cur else {
        return Err(CodecError::Shape("sum spine must end in InL".into()));
    };

    let mut leaves = Vec::new();
    let mut spine = product.as_ref();
    loop {
        match spine {
            NormValue::UnitV => break,
            NormValue::Tuple(leaf, tail) => {
                leaves.push(match leaf {
                    NormLeaf::Base { base, code } => {
                        if !cfg.registry.contains(base) {
                            return Err(CodecError::UnknownBase(base.to_string()));
                        }
                        (*code).clone()
                    }
                    NormLeaf::Rec(t) => rec_encode(t)?,
                });
                spine = tail;
            }
            _ => return Err(CodecError::Shape("product spine must be Tuple ... UnitV".into())),
        }
    }
    let expected = cfg.constrs.constructors.get(branch).map(|c| c.args.len());
    if expected != Some(leaves.len()) {
        return Err(CodecError::Shape(format!("branch {branch} has {} factors", leaves.len())));
    }
    let mut code = Nat::zero();
    for leaf in leaves.iter().rev() {
        code = cfg.pair(cfg.product_scheme, leaf, &code)?;
    }
    sum_code(branch, &code, branch_count).map_err(|e| CodecError::Shape(e.to_string()))
}

fn encode_rank_unchecked(t: &Term, bound: usize, cfg: &CodecConfig) -> Result<Nat, CodecError> {
    let r = rank(&cfg.constrs, t)?;
    if r >= bound {
        return Err(CodecError::RankBoundViolated { rank: r, bound });
    }
    let nv = pattern_match(&cfg.constrs, t)?;
    stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || {
        encode_norm(&nv, cfg, &mut |sub| encode_rank_unchecked(sub, bound - 1, cfg))
    })
}

/// Encodes `t` as an element of the stratum of terms with rank below
/// `bound`; sub-terms are encoded at `bound - 1`.
pub fn encode_rank(t: &Term, bound: usize, cfg: &CodecConfig) -> Result<Nat, CodecError> {
    check_wf(t, &cfg.constrs, &cfg.registry)?;
    encode_rank_unchecked(t, bound, cfg)
}

/// `pair(rank(t), encode_rank(t, rank(t) + 1))`.
pub fn encode(t: &Term, cfg: &CodecConfig) -> Result<Nat, CodecError> {
    encode_ranked(t, cfg)?.join(cfg)
}

pub fn encode_ranked(t: &Term, cfg: &CodecConfig) -> Result<RankedCode, CodecError> {
    check_wf(t, &cfg.constrs, &cfg.registry)?;
    let r = rank(&cfg.constrs, t)?;
    let body = encode_rank_unchecked(t, r + 1, cfg)?;
    Ok(RankedCode { rank: Nat::from(r), body })
}

fn encode_simple_unchecked(t: &Term, cfg: &CodecConfig) -> Result<Nat, CodecError> {
    let nv = pattern_match(&cfg.constrs, t)?;
    stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || {
        encode_norm(&nv, cfg, &mut |sub| encode_simple_unchecked(sub, cfg))
    })
}

/// The structural encoding with no rank prefix and no rank bookkeeping.
pub fn encode_simple(t: &Term, cfg: &CodecConfig) -> Result<Nat, CodecError> {
    check_wf(t, &cfg.constrs, &cfg.registry)?;
    encode_simple_unchecked(t, cfg)
}

/// Decodes a body produced by `encode_rank`. `budget` is the number of
/// recursive layers still allowed below this node.
fn decode_body(code: &Nat, budget: usize, cfg: &CodecConfig) -> Option<Term> {
    let (ctor, mut rest) = sum_decode(code, cfg.constrs.len())?;
    let sig = &cfg.constrs.constructors[ctor];
    let mut args = Vec::with_capacity(sig.args.len());
    for spec in &sig.args {
        let (head, tail) = cfg.product_scheme.unpair(&rest)?;
        rest = tail;
        match spec {
            ArgSpec::Base(b) => {
                if !cfg.registry.get(b)?.accepts(&head) {
                    return None;
                }
                args.push(Arg::base(b, head));
            }
            ArgSpec::Rec => {
                let below = budget.checked_sub(1)?;
                let sub =
                    stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || decode_body(&head, below, cfg))?;
                args.push(Arg::Rec(sub));
            }
        }
    }
    if !rest.is_zero() {
        return None;
    }
    Some(Term::new(ctor, args))
}

/// Partial inverse of [`encode`]: `None` for anything that is not the code
/// of a well-formed term.
pub fn decode(code: &Nat, cfg: &CodecConfig) -> Option<Term> {
    let RankedCode { rank: r, body } = RankedCode::split(code, cfg)?;
    let r = r.to_usize().filter(|&r| r >= 1)?;
    let t = decode_body(&body, r - 1, cfg)?;
    (rank(&cfg.constrs, &t).ok()? == r).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::countability::{pair_compact, pair_paper};
    use crate::syntax::ConstructorSig;

    fn natlist_cfg(scheme: PairingScheme) -> CodecConfig {
        let c = ConstrsType::new(
            "natlist",
            vec![
                ConstructorSig::new("Cons", vec![ArgSpec::Base("nat".into()), ArgSpec::Rec]),
                ConstructorSig::new("Nil", vec![]),
            ],
        );
        CodecConfig::new(scheme, c, Registry::builtin()).unwrap()
    }

    fn nil() -> Term {
        Term::leaf(1)
    }

    fn cons(n: u64, t: Term) -> Term {
        Term::new(0, vec![Arg::base("nat", n), Arg::Rec(t)])
    }

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn unknown_base_rejected() {
        let c = ConstrsType::new("p", vec![ConstructorSig::new("mk", vec![ArgSpec::Base("real".into())])]);
        assert_eq!(
            CodecConfig::new(PairingScheme::Compact, c, Registry::builtin()).unwrap_err(),
            CodecError::UnknownBase("real".into())
        );
    }

    #[test]
    fn encode_norm_examples() {
        let cfg = natlist_cfg(PairingScheme::Compact);
        let nil = nil();
        let mut no_rec = |_: &Term| -> Result<Nat, CodecError> { unreachable!() };
        assert_eq!(encode_norm(&pattern_match(cfg.constrs(), &nil).unwrap(), &cfg, &mut no_rec), Ok(n(1)));

        let t = cons(3, Term::leaf(1));
        let mut rec = |_: &Term| Ok(n(1));
        let expected = pair_compact(&n(3), &pair_compact(&n(1), &n(0))) * 2u32;
        assert_eq!(encode_norm(&pattern_match(cfg.constrs(), &t).unwrap(), &cfg, &mut rec), Ok(expected));
    }

    #[test]
    fn encode_rank_examples() {
        let cfg = natlist_cfg(PairingScheme::Compact);
        assert_eq!(encode_rank(&nil(), 2, &cfg), Ok(n(1)));
        assert_eq!(encode_rank(&nil(), 1, &cfg), Err(CodecError::RankBoundViolated { rank: 1, bound: 1 }));
        let t = cons(3, nil());
        let by_hand = {
            let nv = pattern_match(cfg.constrs(), &t).unwrap();
            encode_norm(&nv, &cfg, &mut |s| encode_rank(s, 2, &cfg)).unwrap()
        };
        assert_eq!(encode_rank(&t, 3, &cfg), Ok(by_hand));
        assert_eq!(encode_rank(&t, 2, &cfg), Err(CodecError::RankBoundViolated { rank: 2, bound: 2 }));
    }

    #[test]
    fn encode_decode_examples() {
        let paper = natlist_cfg(PairingScheme::Paper);
        assert_eq!(encode(&nil(), &paper), Ok(n(5)));
        assert_eq!(n(5), pair_paper(&n(1), &n(1)));
        assert_eq!(decode(&n(5), &paper), Some(nil()));
        assert_eq!(decode(&n(0), &paper), None);

        let compact = natlist_cfg(PairingScheme::Compact);
        assert_eq!(encode(&nil(), &compact), Ok(pair_compact(&n(1), &n(1))));
        let t = cons(3, cons(5, nil()));
        for cfg in [&paper, &compact] {
            assert_eq!(decode(&encode(&t, cfg).unwrap(), cfg), Some(t.clone()));
        }
        assert_eq!(encode_simple(&nil(), &compact), Ok(n(1)));
    }

    #[test]
    fn decode_rejects_rank_mismatch() {
        let cfg = natlist_cfg(PairingScheme::Compact);
        let t = cons(3, nil());
        let RankedCode { body, .. } = encode_ranked(&t, &cfg).unwrap();
        for wrong in [1u64, 3, 7] {
            let code = RankedCode { rank: n(wrong), body: body.clone() }.join(&cfg).unwrap();
            assert_eq!(decode(&code, &cfg), None, "rank {wrong}");
        }
    }

    #[test]
    fn paper_products_on_small_terms() {
        let cfg = natlist_cfg(PairingScheme::Paper).with_product_scheme(PairingScheme::Paper);
        for t in [nil(), cons(0, nil()), cons(2, nil()), cons(1, cons(0, nil()))] {
            let code = encode(&t, &cfg).unwrap();
            assert_eq!(decode(&code, &cfg), Some(t.clone()));
            assert_eq!(encode_simple(&t, &cfg), encode_rank(&t, 9, &cfg));
        }
        let deep = (0..4).fold(nil(), |t, _| cons(1, t));
        assert_eq!(encode(&deep, &cfg), Err(CodecError::CodeTooLarge(PairingScheme::Paper)));
    }

    #[test]
    fn deep_list_roundtrip() {
        let cfg = natlist_cfg(PairingScheme::Compact);
        let t = (0..3000u64).fold(nil(), |t, i| cons(i % 5, t));
        let code = encode(&t, &cfg).unwrap();
        assert!(decode(&code, &cfg).unwrap() == t);
    }
}
