//! Pairing functions, sum codes and composable encoders.
//!
//! Everything here is a pure function over [`Nat`]. Two pairing schemes are
//! provided:
//!
//! * [`PairingScheme::Paper`]: `2^x (2y + 1) - 1`, a bijection `N x N -> N`.
//!   The first argument sits in an exponent, so codes grow very quickly when
//!   pairs are nested through the first slot.
//! * [`PairingScheme::Compact`]: a self-delimiting concatenation whose bit
//!   length is linear in the bit lengths of its arguments. Injective, not
//!   surjective.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::Nat;

/// Largest exponent `x` accepted by [`PairingScheme::Paper`] before the
/// result is considered unrepresentable (2^24 bits is a 2 MiB integer).
pub const MAX_PAPER_EXPONENT: u64 = 1 << 24;

/// Number of significant bits of `n`; zero for zero.
pub fn bit_length(n: &Nat) -> u64 {
    n.bits()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairingScheme {
    Paper,
    Compact,
}

impl PairingScheme {
    pub const ALL: [PairingScheme; 2] = [PairingScheme::Paper, PairingScheme::Compact];

    pub fn name(self) -> &'static str {
        match self {
            PairingScheme::Paper => "paper",
            PairingScheme::Compact => "compact",
        }
    }

    /// Pairs `x` and `y`. Only fails for the paper scheme, when `2^x` would
    /// exceed [`MAX_PAPER_EXPONENT`] bits.
    pub fn pair(self, x: &Nat, y: &Nat) -> Option<Nat> {
        match self {
            PairingScheme::Paper => try_pair_paper(x, y),
            PairingScheme::Compact => Some(pair_compact(x, y)),
        }
    }

    pub fn unpair(self, n: &Nat) -> Option<(Nat, Nat)> {
        match self {
            PairingScheme::Paper => Some(unpair_paper(n)),
            PairingScheme::Compact => unpair_compact(n),
        }
    }
}

impl fmt::Display for PairingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PairingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(PairingScheme::Paper),
            "compact" => Ok(PairingScheme::Compact),
            other => Err(format!("unknown pairing scheme `{other}` (expected paper|compact)")),
        }
    }
}

/// `2^x (2y + 1) - 1`.
///
/// Panics if `x` exceeds [`MAX_PAPER_EXPONENT`]; use [`try_pair_paper`] when
/// the exponent is not known to be small.
pub fn pair_paper(x: &Nat, y: &Nat) -> Nat {
    try_pair_paper(x, y).expect("pair_paper: exponent too large to materialize")
}

pub fn try_pair_paper(x: &Nat, y: &Nat) -> Option<Nat> {
    let shift = x.to_u64().filter(|&s| s <= MAX_PAPER_EXPONENT)?;
    let odd: Nat = (y << 1u32) + 1u32;
    Some((odd << shift) - 1u32)
}

/// Inverse of [`pair_paper`]: `x` is the number of trailing zero bits of
/// `n + 1`, and the remaining odd factor is `2y + 1`.
pub fn unpair_paper(n: &Nat) -> (Nat, Nat) {
    let succ: Nat = n + 1u32;
    let x = succ.trailing_zeros().expect("n + 1 is never zero");
    let odd = succ >> x;
    (Nat::from(x), odd >> 1u32)
}

/// Elias-gamma bits of `k >= 1`, as `(value, width)`: `bit_length(k) - 1`
/// zero bits followed by `k` itself.
fn gamma(k: &Nat) -> (Nat, u64) {
    debug_assert!(!k.is_zero());
    (k.clone(), 2 * bit_length(k) - 1)
}

/// Layout, most significant bit first:
/// `1 . gamma(u + 1) . y (exactly u bits) . x (no leading zeros)` where
/// `u = bit_length(y)`.
pub fn pair_compact(x: &Nat, y: &Nat) -> Nat {
    let u = bit_length(y);
    let (header, header_width) = gamma(&Nat::from(u + 1));
    let mut out = Nat::one() << header_width;
    out |= header;
    out = (out << u) | y;
    let x_width = bit_length(x);
    if x_width > 0 {
        out = (out << x_width) | x;
    }
    out
}

/// Bits `[lo, lo + width)` of `n`.
fn bit_field(n: &Nat, lo: u64, width: u64) -> Nat {
    if width == 0 {
        return Nat::zero();
    }
    let mask = (Nat::one() << width) - 1u32;
    (n >> lo) & mask
}

/// Exact partial inverse of [`pair_compact`]. Returns `None` for anything
/// that is not a canonical compact code.
pub fn unpair_compact(n: &Nat) -> Option<(Nat, Nat)> {
    let len = bit_length(n);
    // `cursor` counts the bits still unread below the current position.
    let mut cursor = len.checked_sub(1)?; // sentinel
    let mut zeros = 0u64;
    loop {
        let pos = cursor.checked_sub(1)?;
        if n.bit(pos) {
            break;
        }
        zeros += 1;
        cursor = pos;
    }
    let k_width = zeros + 1;
    if k_width > cursor {
        return None;
    }
    let k = bit_field(n, cursor - k_width, k_width);
    cursor -= k_width;
    let u = k.to_u64()? - 1;
    if u > cursor {
        return None;
    }
    let y = bit_field(n, cursor - u, u);
    if u > 0 && !y.bit(u - 1) {
        return None;
    }
    cursor -= u;
    let x = bit_field(n, 0, cursor);
    if cursor > 0 && !x.bit(cursor - 1) {
        return None;
    }
    Some((x, y))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("branch index {index} out of range for {count} branches")]
pub struct BranchOutOfRange {
    pub index: usize,
    pub count: usize,
}

/// `2^(i+1) * inner + 2^i - 1`: `i` right-injections followed by one left,
/// where left doubles and right doubles then adds one.
pub fn sum_code(branch_index: usize, inner: &Nat, branch_count: usize) -> Result<Nat, BranchOutOfRange> {
    if branch_index >= branch_count {
        return Err(BranchOutOfRange { index: branch_index, count: branch_count });
    }
    let i = branch_index as u64;
    Ok((inner << (i + 1)) + (Nat::one() << i) - 1u32)
}

/// Peels parity bits: odd is a right-step, even is the final left-step.
/// Running out of branches before a left-step lands in `void`.
pub fn sum_decode(code: &Nat, branch_count: usize) -> Option<(usize, Nat)> {
    let mut rest = code.clone();
    for index in 0..branch_count {
        if rest.bit(0) {
            rest >>= 1u32;
        } else {
            return Some((index, rest >> 1u32));
        }
    }
    None
}

type EncodeFn<A, B> = dyn Fn(&A) -> Option<B> + Send + Sync;
type DecodeFn<A, B> = dyn Fn(&B) -> Option<A> + Send + Sync;

/// A named encode/decode pair obeying `decode(encode(v)) == Some(v)` for
/// every `v` in the domain.
///
/// `encode` returns `None` only for inputs outside the encoder's domain
/// (for example a malformed literal); `decode` returns `None` for anything
/// outside the image.
pub struct Encoder<A, B = Nat> {
    name: String,
    encode: Arc<EncodeFn<A, B>>,
    decode: Arc<DecodeFn<A, B>>,
}

impl<A, B> Clone for Encoder<A, B> {
    fn clone(&self) -> Self {
        Encoder { name: self.name.clone(), encode: Arc::clone(&self.encode), decode: Arc::clone(&self.decode) }
    }
}

impl<A, B> fmt::Debug for Encoder<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Encoder").field("name", &self.name).finish_non_exhaustive()
    }
}

impl<A: 'static, B: 'static> Encoder<A, B> {
    pub fn new(
        name: impl Into<String>,
        encode: impl Fn(&A) -> Option<B> + Send + Sync + 'static,
        decode: impl Fn(&B) -> Option<A> + Send + Sync + 'static,
    ) -> Self {
        Encoder { name: name.into(), encode: Arc::new(encode), decode: Arc::new(decode) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn encode(&self, value: &A) -> Option<B> {
        (self.encode)(value)
    }

    pub fn decode(&self, code: &B) -> Option<A> {
        (self.decode)(code)
    }

    /// `encode = next.encode . self.encode`, `decode = self.decode . next.decode`.
    pub fn compose<C: 'static>(&self, next: &Encoder<B, C>) -> Encoder<A, C> {
        let (e1, e2) = (Arc::clone(&self.encode), Arc::clone(&next.encode));
        let (d1, d2) = (Arc::clone(&self.decode), Arc::clone(&next.decode));
        Encoder {
            name: format!("{} ; {}", self.name, next.name),
            encode: Arc::new(move |a| e1(a).and_then(|b| e2(&b))),
            decode: Arc::new(move |c| d2(c).and_then(|b| d1(&b))),
        }
    }
}

impl<A: Clone + 'static> Encoder<A, A> {
    pub fn identity() -> Self {
        Encoder::new("id", |a: &A| Some(a.clone()), |a: &A| Some(a.clone()))
    }
}

/// Free-standing form of [`Encoder::compose`].
pub fn compose_encoders<A: 'static, B: 'static, C: 'static>(
    first: &Encoder<A, B>,
    second: &Encoder<B, C>,
) -> Encoder<A, C> {
    first.compose(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    /// Independent string-level construction of the compact layout.
    fn compact_oracle(x: u64, y: u64) -> u64 {
        let bin = |v: u64| if v == 0 { String::new() } else { format!("{v:b}") };
        let u = bin(y).len() as u64;
        let k = format!("{:b}", u + 1);
        let gamma = format!("{}{}", "0".repeat(k.len() - 1), k);
        let s = format!("1{gamma}{}{}", bin(y), bin(x));
        u64::from_str_radix(&s, 2).unwrap()
    }

    #[test]
    fn paper_spot_values() {
        assert_eq!(pair_paper(&n(0), &n(0)), n(0));
        assert_eq!(pair_paper(&n(1), &n(2)), n(9));
        assert_eq!(pair_paper(&n(3), &n(0)), n(7));
        assert_eq!(unpair_paper(&n(0)), (n(0), n(0)));
        assert_eq!(unpair_paper(&n(9)), (n(1), n(2)));
        assert_eq!(unpair_paper(&n(10)), (n(0), n(5)));
    }

    #[test]
    fn paper_exponent_limit() {
        assert!(try_pair_paper(&n(MAX_PAPER_EXPONENT + 1), &n(0)).is_none());
        let huge = Nat::one() << 80u32;
        assert!(PairingScheme::Paper.pair(&huge, &n(1)).is_none());
    }

    #[test]
    fn compact_spot_values() {
        assert_eq!(pair_compact(&n(0), &n(0)), n(3));
        assert_eq!(pair_compact(&n(1), &n(0)), n(7));
        assert_eq!(pair_compact(&n(0), &n(1)), n(21));
        assert_eq!(unpair_compact(&n(3)), Some((n(0), n(0))));
        assert_eq!(unpair_compact(&n(21)), Some((n(0), n(1))));
        assert_eq!(unpair_compact(&n(2)), None);
    }

    #[test]
    fn compact_matches_string_oracle() {
        for x in 0..64 {
            for y in 0..64 {
                assert_eq!(pair_compact(&n(x), &n(y)), n(compact_oracle(x, y)), "({x}, {y})");
            }
        }
    }

    #[test]
    fn compact_rejects_non_canonical() {
        assert_eq!(unpair_compact(&n(0)), None);
        assert_eq!(unpair_compact(&n(1)), None);
        // "11" . "0": residual x field starts with a zero bit.
        assert_eq!(unpair_compact(&n(0b110)), None);
        // "1" . "010" . "0": y field of width 1 has a leading zero.
        assert_eq!(unpair_compact(&n(0b10100)), None);
        // header claims more y bits than remain.
        assert_eq!(unpair_compact(&n(0b1011)), None);
    }

    #[test]
    fn compact_decode_is_exact_on_small_range() {
        for code in 0u64..4096 {
            if let Some((x, y)) = unpair_compact(&n(code)) {
                assert_eq!(pair_compact(&x, &y), n(code));
            }
        }
    }

    #[test]
    fn sum_code_examples() {
        assert_eq!(sum_code(0, &n(5), 2).unwrap(), n(10));
        assert_eq!(sum_code(1, &n(0), 2).unwrap(), n(1));
        assert_eq!(sum_code(2, &n(0), 4).unwrap(), n(3));
        assert_eq!(sum_code(2, &n(0), 2), Err(BranchOutOfRange { index: 2, count: 2 }));
        assert_eq!(sum_decode(&n(10), 2), Some((0, n(5))));
        assert_eq!(sum_decode(&n(1), 2), Some((1, n(0))));
        assert_eq!(sum_decode(&n(3), 2), None);
        assert_eq!(sum_decode(&n(0), 0), None);
    }

    #[test]
    fn sum_code_injective_exhaustive() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..4 {
            for c in 0..256u64 {
                let code = sum_code(i, &n(c), 4).unwrap();
                assert!(seen.insert(code.clone()), "collision at ({i}, {c})");
                assert_eq!(sum_decode(&code, 4), Some((i, n(c))));
            }
        }
    }

    #[test]
    fn compose_identity_and_bool() {
        let id: Encoder<Nat> = Encoder::identity();
        let idid = id.compose(&Encoder::identity());
        assert_eq!(idid.encode(&n(17)), Some(n(17)));
        assert_eq!(idid.decode(&n(17)), Some(n(17)));

        let bools: Encoder<bool, Nat> = Encoder::new(
            "bool",
            |b: &bool| Some(Nat::from(*b as u8)),
            |c: &Nat| match c.to_u8() {
                Some(0) => Some(false),
                Some(1) => Some(true),
                _ => None,
            },
        );
        let with_zero: Encoder<Nat, Nat> = Encoder::new(
            "pair-with-zero",
            |x: &Nat| Some(pair_compact(x, &Nat::zero())),
            |c: &Nat| unpair_compact(c).filter(|(_, y)| y.is_zero()).map(|(x, _)| x),
        );
        let both = compose_encoders(&bools, &with_zero);
        for b in [false, true] {
            let code = both.encode(&b).unwrap();
            assert_eq!(both.decode(&code), Some(b));
        }
        assert_eq!(both.decode(&n(21)), None);
        assert_eq!(both.decode(&n(2)), None);
    }

    proptest! {
        #[test]
        fn paper_roundtrip(x in 0u64..1024, y in 0u64..1024) {
            let code = pair_paper(&n(x), &n(y));
            prop_assert_eq!(unpair_paper(&code), (n(x), n(y)));
        }

        #[test]
        fn compact_roundtrip_and_bound(x in any::<u128>(), y in any::<u128>()) {
            let (x, y) = (Nat::from(x), Nat::from(y));
            let code = pair_compact(&x, &y);
            prop_assert_eq!(unpair_compact(&code), Some((x.clone(), y.clone())));
            let bound = bit_length(&x) + bit_length(&y)
                + 2 * bit_length(&Nat::from(bit_length(&y) + 1)) + 1;
            prop_assert!(bit_length(&code) <= bound);
        }

        #[test]
        fn sum_roundtrip(k in 1usize..12, i_seed in any::<usize>(), c in any::<u64>()) {
            let i = i_seed % k;
            let code = sum_code(i, &n(c), k).unwrap();
            prop_assert_eq!(sum_decode(&code, k), Some((i, n(c))));
        }
    }
}
