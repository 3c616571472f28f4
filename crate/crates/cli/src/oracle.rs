//! Reference models the examples and self-checks compare against. None of
//! them use the three-state arithmetic of `hgl::logic`.

use hgl::ir::SignalId;
use hgl::logic::{Bit, Logic};
use hgl::verify::pattern::Pattern;
use num_bigint::BigUint;

/// Binary value as an unsigned integer. Panics on X bits.
pub fn to_big(l: &Logic) -> BigUint {
    assert!(!l.has_x(), "X in {l}");
    let bytes: Vec<u8> = l.value_plane().iter().flat_map(|w| w.to_le_bytes()).collect();
    BigUint::from_bytes_le(&bytes)
}

/// Low `width` bits of `n`.
pub fn from_big(width: usize, n: &BigUint) -> Logic {
    let mut words: Vec<u64> = n.to_u64_digits();
    words.resize(width.div_ceil(64), 0);
    if !width.is_multiple_of(64) {
        let last = words.len() - 1;
        words[last] &= (1u64 << (width % 64)) - 1;
    }
    let zeros = vec![0; words.len()];
    Logic::from_planes(width, &words, &zeros)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coin {
    None,
    Nickel,
    Dime,
}

impl Coin {
    pub const ALL: [Coin; 3] = [Coin::None, Coin::Nickel, Coin::Dime];

    pub fn cents(self) -> u32 {
        match self {
            Coin::None => 0,
            Coin::Nickel => 5,
            Coin::Dime => 10,
        }
    }
}

/// Vending machine behavior stated in terms of money: once the inserted
/// total reaches 20, `valid` is high for the following cycle and the
/// machine starts over.
#[derive(Debug, Clone, Default)]
pub struct VendingModel {
    pub total: u32,
    pub valid: bool,
}

impl VendingModel {
    /// One clock edge with `coin` presented.
    pub fn step(&mut self, coin: Coin) {
        if self.valid {
            self.valid = false;
            self.total = 0;
            return;
        }
        self.total += coin.cents();
        if self.total >= 20 {
            self.valid = true;
        }
    }
}

pub fn kleene_and(a: Bit, b: Bit) -> Bit {
    match (a, b) {
        (Bit::Zero, _) | (_, Bit::Zero) => Bit::Zero,
        (Bit::One, Bit::One) => Bit::One,
        _ => Bit::X,
    }
}

pub fn kleene_or(a: Bit, b: Bit) -> Bit {
    match (a, b) {
        (Bit::One, _) | (_, Bit::One) => Bit::One,
        (Bit::Zero, Bit::Zero) => Bit::Zero,
        _ => Bit::X,
    }
}

pub fn kleene_xor(a: Bit, b: Bit) -> Bit {
    match (a, b) {
        (Bit::X, _) | (_, Bit::X) => Bit::X,
        _ if a == b => Bit::Zero,
        _ => Bit::One,
    }
}

pub fn kleene_not(a: Bit) -> Bit {
    match a {
        Bit::Zero => Bit::One,
        Bit::One => Bit::Zero,
        Bit::X => Bit::X,
    }
}

/// Every three-state vector of width `w`, in a fixed order.
pub fn all_values(w: usize) -> Vec<Logic> {
    (0..3usize.pow(w as u32))
        .map(|mut n| {
            let bits: Vec<Bit> = (0..w)
                .map(|_| {
                    let b = Bit::ALL[n % 3];
                    n /= 3;
                    b
                })
                .collect();
            Logic::from_bits_msb(&bits)
        })
        .collect()
}

/// Binary vectors obtained by replacing each X bit with 0 or 1.
pub fn refinements(a: &Logic) -> Vec<Logic> {
    let xs: Vec<usize> = (0..a.width()).filter(|i| a.bit(*i) == Bit::X).collect();
    (0..1u32 << xs.len())
        .map(|m| {
            let mut r = a.clone();
            for (k, i) in xs.iter().enumerate() {
                r.set_bit(*i, if m >> k & 1 == 1 { Bit::One } else { Bit::Zero });
            }
            r
        })
        .collect()
}

/// `fine` agrees with `coarse` wherever `coarse` is known.
pub fn refines(fine: &Logic, coarse: &Logic) -> bool {
    fine.width() == coarse.width()
        && (0..coarse.width()).all(|i| coarse.bit(i) == Bit::X || coarse.bit(i) == fine.bit(i))
}

/// Steps past its start that a bounded pattern over one signal may read.
pub fn horizon(p: &Pattern) -> usize {
    use Pattern::*;
    let rep = |q: &Pattern, n: usize| if n == 0 { 0 } else { n * (horizon(q) + 1) - 1 };
    match p {
        Wait(n) | WaitRange(_, n) => *n,
        True(_) | Rose(_) | Fell(_) | Cmp(..) | Capture(..) => 0,
        Repeat(q, n) | RepeatRange(q, _, n) => rep(q, *n),
        Not(q) => horizon(q),
        And(a, b) | Or(a, b) => horizon(a).max(horizon(b)),
        Seq(a, b) | Implies(a, b) => horizon(a) + horizon(b),
        EdgeOf(_) | Until(..) => usize::MAX,
    }
}

/// End steps of `p` started at `i` on a fully known trace of the 1-bit
/// signal `s`. The trace must cover the pattern's horizon.
pub fn ends(p: &Pattern, s: SignalId, t: &[bool], i: usize) -> Vec<usize> {
    use Pattern::*;
    let at = |sig: &SignalId, k: usize| {
        assert_eq!(*sig, s, "pattern reads another signal");
        t[k]
    };
    let mut out: Vec<usize> = match p {
        Wait(n) => vec![i + n],
        WaitRange(m, n) => (i + m..=i + n).collect(),
        True(x) => if at(x, i) { vec![i] } else { vec![] },
        Rose(x) => if i > 0 && !at(x, i - 1) && at(x, i) { vec![i] } else { vec![] },
        Fell(x) => if i > 0 && at(x, i - 1) && !at(x, i) { vec![i] } else { vec![] },
        Repeat(q, n) => reps(q, s, *n, t, i),
        RepeatRange(q, m, n) => (*m..=*n).flat_map(|k| reps(q, s, k, t, i)).collect(),
        Not(q) => if ends(q, s, t, i).is_empty() { vec![i] } else { vec![] },
        And(a, b) => {
            let (ea, eb) = (ends(a, s, t, i), ends(b, s, t, i));
            ea.iter().flat_map(|x| eb.iter().map(move |y| *x.max(y))).collect()
        }
        Or(a, b) => [ends(a, s, t, i), ends(b, s, t, i)].concat(),
        Seq(a, b) => ends(a, s, t, i).into_iter().flat_map(|e| ends(b, s, t, e)).collect(),
        Implies(a, b) => {
            let ea = ends(a, s, t, i);
            if ea.is_empty() {
                vec![i]
            } else {
                ea.into_iter().flat_map(|e| ends(b, s, t, e)).collect()
            }
        }
        Cmp(..) | Capture(..) | EdgeOf(_) | Until(..) => panic!("not a 1-bit bounded pattern: {p:?}"),
    };
    out.sort_unstable();
    out.dedup();
    out
}

fn reps(q: &Pattern, s: SignalId, n: usize, t: &[bool], i: usize) -> Vec<usize> {
    if n == 0 {
        return vec![i];
    }
    let mut cur = ends(q, s, t, i);
    for _ in 1..n {
        cur = cur.into_iter().flat_map(|e| ends(q, s, t, e + 1)).collect();
    }
    cur
}

/// All 1-bit traces of length `len`.
pub fn traces(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << len).map(move |m| (0..len).map(|k| m >> k & 1 == 1).collect())
}
