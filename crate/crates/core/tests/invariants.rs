use num_traits::ToPrimitive;
use proptest::prelude::*;

use indcount::codec::{encode_rank, encode_simple, RankedCode};
use indcount::compile::compile_source;
use indcount::term::Arg;
use indcount::{
    decode, encode, enumerate_upto_rank, rank, CodecConfig, EnumBudget, Nat, PairingScheme, Registry, Term,
};

const TYPES: &str = "
Inductive natlist := Cons : nat -> natlist -> natlist | Nil : natlist.
Inductive bintree := Node : nat -> bintree -> bintree -> bintree | Leaf : bintree.
Inductive expr := andp : expr -> expr -> expr | orp : expr -> expr -> expr
                | impp : expr -> expr -> expr | falsep : expr | varp : nat -> expr.
Inductive boollist := BCons : bool -> boollist -> boollist | BNil : boollist.
";

fn config(scheme: PairingScheme, name: &str) -> CodecConfig {
    let comp = compile_source(TYPES, Registry::builtin(), scheme).unwrap();
    comp.get(name).unwrap().as_ref().unwrap().config.clone()
}

fn size_ratio(t: &Term, cfg: &CodecConfig) -> f64 {
    let bits = encode(t, cfg).unwrap().bits() as f64;
    bits / (t.node_count() as u64 + t.base_bits()) as f64
}

// `(varp 0)`: body = sum_code(4, pair(0, 0) = 0b11, 5) = 2^5 * 3 + 2^4 - 1 = 111
// (7 bits); pair_compact(1, 111) = 1 · 0001000 · 1101111 · 1, 16 bits for one node.
#[test]
#[allow(clippy::unusual_byte_groupings)]
fn single_node_overhead_is_sixteen_bits() {
    let cfg = config(PairingScheme::Compact, "expr");
    let varp0 = Term::new(4, vec![Arg::base("nat", 0u32)]);
    let code = encode(&varp0, &cfg).unwrap();
    assert_eq!(code, Nat::from(0b1_0001000_1101111_1u32));
    assert_eq!(size_ratio(&varp0, &cfg), 16.0);
}

#[test]
fn size_ratio_on_corpora() {
    for (name, max_rank, budget) in [("natlist", 6, 3), ("boollist", 10, 1), ("bintree", 7, 3), ("expr", 5, 2)] {
        let cfg = config(PairingScheme::Compact, name);
        for t in enumerate_upto_rank(cfg.constrs(), cfg.registry(), EnumBudget::new(max_rank, budget)) {
            assert!(size_ratio(&t, &cfg) <= 16.0, "{name}: {t:?}");
        }
    }
}

#[test]
fn deep_lists_grow_logarithmically() {
    // Each level length-prefixes the whole tail, so the per-node cost is
    // about 2·log2(code bits) plus a constant.
    let cfg = config(PairingScheme::Compact, "boollist");
    let mut t = Term::leaf(1);
    let mut last = 0f64;
    for len in 1..=2000usize {
        t = Term::new(0, vec![Arg::base("bool", 1u32), Arg::Rec(t)]);
        if len % 500 == 0 {
            let bits = encode(&t, &cfg).unwrap().bits() as f64;
            let per_node = bits / (len + 1) as f64;
            assert!(per_node <= 8.0 + 2.0 * bits.log2(), "len {len}: {per_node}");
            assert!(per_node > last);
            last = per_node;
        }
    }
}

fn natlist_term() -> impl Strategy<Value = Term> {
    prop::collection::vec(any::<u64>(), 0..40).prop_map(|xs| {
        xs.into_iter().fold(Term::leaf(1), |tail, x| Term::new(0, vec![Arg::base("nat", x), Arg::Rec(tail)]))
    })
}

fn bintree_term() -> impl Strategy<Value = Term> {
    Just(Term::leaf(1)).prop_recursive(6, 64, 2, |inner| {
        (any::<u32>(), inner.clone(), inner)
            .prop_map(|(n, l, r)| Term::new(0, vec![Arg::base("nat", n), Arg::Rec(l), Arg::Rec(r)]))
    })
}

fn laws(t: &Term, cfg: &CodecConfig) -> Result<(), TestCaseError> {
    let code = encode(t, cfg).unwrap();
    let back = decode(&code, cfg);
    prop_assert_eq!(back.as_ref(), Some(t));
    let r = rank(cfg.constrs(), t).unwrap();
    let prefix = RankedCode::split(&code, cfg).and_then(|rc| rc.rank.to_usize());
    prop_assert_eq!(prefix, Some(r));
    let simple = encode_simple(t, cfg).unwrap();
    prop_assert_eq!(encode_rank(t, r + 3, cfg).unwrap(), simple);
    Ok(())
}

proptest! {
    #[test]
    fn random_natlists_roundtrip(t in natlist_term()) {
        for scheme in PairingScheme::ALL {
            laws(&t, &config(scheme, "natlist"))?;
        }
    }

    #[test]
    fn random_bintrees_roundtrip(t in bintree_term()) {
        for scheme in PairingScheme::ALL {
            laws(&t, &config(scheme, "bintree"))?;
        }
    }

    #[test]
    fn decoded_codes_reencode(words in prop::collection::vec(any::<u32>(), 0..6)) {
        let code = Nat::from_slice(&words);
        for scheme in PairingScheme::ALL {
            for name in ["natlist", "bintree", "expr"] {
                let cfg = config(scheme, name);
                if let Some(t) = decode(&code, &cfg) {
                    prop_assert_eq!(encode(&t, &cfg).unwrap(), code.clone());
                }
            }
        }
    }

    #[test]
    fn distinct_natlists_get_distinct_codes(a in natlist_term(), b in natlist_term()) {
        let cfg = config(PairingScheme::Compact, "natlist");
        prop_assert_eq!(a == b, encode(&a, &cfg).unwrap() == encode(&b, &cfg).unwrap());
    }
}
