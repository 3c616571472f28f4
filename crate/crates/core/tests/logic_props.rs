use hgl::logic::{Bit, CmpOp, Logic, ReduceKind};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

/// Every three-state vector of width `w`.
fn all_values(w: usize) -> Vec<Logic> {
    let mut out = Vec::new();
    let mut digits = vec![0usize; w];
    loop {
        let bits: Vec<Bit> = digits.iter().map(|d| Bit::ALL[*d]).collect();
        out.push(Logic::from_bits_msb(&bits));
        let mut i = 0;
        while i < w {
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == w {
            return out;
        }
    }
}

/// All binary vectors obtained by replacing each X bit with 0 or 1.
fn refinements(a: &Logic) -> Vec<Logic> {
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

/// `fine` agrees with `coarse` on every bit `coarse` knows.
fn refines(fine: &Logic, coarse: &Logic) -> bool {
    fine.width() == coarse.width()
        && (0..coarse.width()).all(|i| coarse.bit(i) == Bit::X || coarse.bit(i) == fine.bit(i))
}

fn kleene_and(a: Bit, b: Bit) -> Bit {
    match (a, b) {
        (Bit::Zero, _) | (_, Bit::Zero) => Bit::Zero,
        (Bit::One, Bit::One) => Bit::One,
        _ => Bit::X,
    }
}

fn kleene_or(a: Bit, b: Bit) -> Bit {
    match (a, b) {
        (Bit::One, _) | (_, Bit::One) => Bit::One,
        (Bit::Zero, Bit::Zero) => Bit::Zero,
        _ => Bit::X,
    }
}

fn kleene_xor(a: Bit, b: Bit) -> Bit {
    match (a, b) {
        (Bit::X, _) | (_, Bit::X) => Bit::X,
        _ if a == b => Bit::Zero,
        _ => Bit::One,
    }
}

fn kleene_not(a: Bit) -> Bit {
    match a {
        Bit::Zero => Bit::One,
        Bit::One => Bit::Zero,
        Bit::X => Bit::X,
    }
}

#[test]
fn bitwise_ops_match_truth_tables() {
    for w in 1..=4 {
        let vals = all_values(w);
        for a in &vals {
            let n = a.not();
            for i in 0..w {
                assert_eq!(n.bit(i), kleene_not(a.bit(i)), "~{a}");
            }
            for b in &vals {
                let (and, or, xor) = (a.and(b).unwrap(), a.or(b).unwrap(), a.xor(b).unwrap());
                for i in 0..w {
                    let (x, y) = (a.bit(i), b.bit(i));
                    assert_eq!(and.bit(i), kleene_and(x, y), "{a} & {b}");
                    assert_eq!(or.bit(i), kleene_or(x, y), "{a} | {b}");
                    assert_eq!(xor.bit(i), kleene_xor(x, y), "{a} ^ {b}");
                }
            }
        }
    }
}

#[test]
fn kleene_tables_are_exact() {
    // each table entry is the join over all refinements of its inputs
    let join = |f: &dyn Fn(Bit, Bit) -> Bit, a: Bit, b: Bit| {
        let rs = |x: Bit| if x == Bit::X { vec![Bit::Zero, Bit::One] } else { vec![x] };
        let outs: Vec<Bit> = rs(a).into_iter().flat_map(|p| rs(b).into_iter().map(move |q| (p, q))).map(|(p, q)| f(p, q)).collect();
        if outs.iter().all(|o| *o == outs[0]) { outs[0] } else { Bit::X }
    };
    for a in Bit::ALL {
        for b in Bit::ALL {
            assert_eq!(kleene_and(a, b), join(&kleene_and, a, b));
            assert_eq!(kleene_or(a, b), join(&kleene_or, a, b));
            assert_eq!(kleene_xor(a, b), join(&kleene_xor, a, b));
        }
    }
}

type Binary = fn(&Logic, &Logic) -> Logic;

fn binary_ops() -> Vec<(&'static str, Binary)> {
    let mut v: Vec<(&'static str, Binary)> = vec![
        ("and", |a, b| a.and(b).unwrap()),
        ("or", |a, b| a.or(b).unwrap()),
        ("xor", |a, b| a.xor(b).unwrap()),
        ("merge", |a, b| a.merge(b).unwrap()),
        ("add", |a, b| a.add(b, false).unwrap()),
        ("adds", |a, b| a.add(b, true).unwrap()),
        ("sub", |a, b| a.sub(b, false).unwrap()),
        ("subs", |a, b| a.sub(b, true).unwrap()),
        ("mul", |a, b| a.mul(b, false).unwrap()),
        ("muls", |a, b| a.mul(b, true).unwrap()),
        ("div", |a, b| a.divmod(b).unwrap().0),
        ("rem", |a, b| a.divmod(b).unwrap().1),
        ("cat", |a, b| Logic::cat(&[a.clone(), b.clone()]).unwrap()),
        ("dyn_select", |a, b| a.dyn_select(b, 2)),
        ("insert", |a, b| a.insert(b, &a.select(0, 1))),
    ];
    v.extend([
        ("lt", (|a, b| a.cmp(CmpOp::Lt, b, false).unwrap()) as Binary),
        ("le", |a, b| a.cmp(CmpOp::Le, b, false).unwrap()),
        ("gts", |a, b| a.cmp(CmpOp::Gt, b, true).unwrap()),
        ("ges", |a, b| a.cmp(CmpOp::Ge, b, true).unwrap()),
        ("eq", |a, b| a.cmp(CmpOp::Eq, b, false).unwrap()),
        ("ne", |a, b| a.cmp(CmpOp::Ne, b, false).unwrap()),
    ]);
    v
}

type Unary = fn(&Logic) -> Logic;

fn unary_ops() -> Vec<(&'static str, Unary)> {
    vec![
        ("not", |a| a.not()),
        ("rand", |a| a.reduce(ReduceKind::And)),
        ("ror", |a| a.reduce(ReduceKind::Or)),
        ("rxor", |a| a.reduce(ReduceKind::Xor)),
        ("zext", |a| a.resize(a.width() + 2, false)),
        ("sext", |a| a.resize(a.width() + 2, true)),
        ("trunc", |a| a.resize(1, true)),
        ("select", |a| a.select(1, 3)),
        ("truth", |a| Logic::from_bit(a.truth())),
    ]
}

#[test]
fn refining_inputs_refines_outputs() {
    for w in 1..=3 {
        let vals = all_values(w);
        for (name, f) in unary_ops() {
            for a in &vals {
                let coarse = f(a);
                for ra in refinements(a) {
                    assert!(refines(&f(&ra), &coarse), "{name}({a}) = {coarse}, refined {ra}");
                }
            }
        }
        for (name, f) in binary_ops() {
            for a in &vals {
                for b in &vals {
                    let coarse = f(a, b);
                    for ra in refinements(a) {
                        for rb in refinements(b) {
                            let fine = f(&ra, &rb);
                            assert!(refines(&fine, &coarse), "{name}({a}, {b}) = {coarse}, refined {fine}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn binary_inputs_give_binary_outputs() {
    for w in 1..=4 {
        let vals: Vec<Logic> = all_values(w).into_iter().filter(|v| !v.has_x()).collect();
        for a in &vals {
            for (name, f) in unary_ops() {
                if name != "select" {
                    assert!(!f(a).has_x(), "{name}({a})");
                }
            }
            for b in &vals {
                for (name, f) in binary_ops() {
                    let differ = name == "merge" && a != b;
                    let zero_div = matches!(name, "div" | "rem") && b.to_u64() == Some(0);
                    let out_of_range = matches!(name, "dyn_select") && b.to_u64().unwrap() as usize + 2 > w;
                    assert_eq!(f(a, b).has_x(), differ || zero_div || out_of_range, "{name}({a}, {b})");
                }
            }
        }
    }
}

#[test]
fn undefined_operations_are_all_x() {
    for w in [1, 4, 64, 65, 130] {
        let a = Logic::ones(w);
        let (q, r) = a.divmod(&Logic::zeros(w)).unwrap();
        assert!(q.is_all_x() && r.is_all_x(), "w={w}");
        assert!(a.select(w, 3).is_all_x());
        assert!(a.dyn_select(&Logic::from_u64(16, w as u64 + 5), 2).is_all_x());
    }
    // partly out of range: only the missing bits are X
    let s = Logic::ones(4).select(2, 4);
    assert_eq!(s.to_string(), "4'bxx11");
}

fn big(l: &Logic) -> BigUint {
    let mut n = BigUint::default();
    for i in (0..l.width()).rev() {
        n = (n << 1u32) + u32::from(l.bit(i) == Bit::One);
    }
    n
}

fn sbig(l: &Logic) -> BigInt {
    let w = l.width();
    let u = BigInt::from(big(l));
    if l.bit(w - 1) == Bit::One { u - (BigInt::from(1) << w) } else { u }
}

fn from_big(w: usize, n: &BigInt) -> Logic {
    let m = (BigInt::from(1) << w) - 1;
    let u: BigUint = (n & &m).to_biguint().unwrap();
    let bits: Vec<Bit> = (0..w).rev().map(|i| if u.bit(i as u64) { Bit::One } else { Bit::Zero }).collect();
    Logic::from_bits_msb(&bits)
}

fn binary(w: usize) -> impl Strategy<Value = Logic> {
    proptest::collection::vec(any::<bool>(), w).prop_map(|bits| {
        let b: Vec<Bit> = bits.iter().map(|x| if *x { Bit::One } else { Bit::Zero }).collect();
        Logic::from_bits_msb(&b)
    })
}

fn pair() -> impl Strategy<Value = (Logic, Logic)> {
    (1usize..200).prop_flat_map(|w| (binary(w), binary(w)))
}

proptest! {
    #[test]
    fn arithmetic_matches_big_integers((a, b) in pair()) {
        let w = a.width();
        let (ua, ub) = (BigInt::from(big(&a)), BigInt::from(big(&b)));
        let (sa, sb) = (sbig(&a), sbig(&b));
        prop_assert_eq!(a.add(&b, false).unwrap(), from_big(w + 1, &(&ua + &ub)));
        prop_assert_eq!(a.add(&b, true).unwrap(), from_big(w + 1, &(&sa + &sb)));
        prop_assert_eq!(a.sub(&b, false).unwrap(), from_big(w + 1, &(&ua - &ub)));
        prop_assert_eq!(a.sub(&b, true).unwrap(), from_big(w + 1, &(&sa - &sb)));
        prop_assert_eq!(a.mul(&b, false).unwrap(), from_big(2 * w, &(&ua * &ub)));
        prop_assert_eq!(a.mul(&b, true).unwrap(), from_big(2 * w, &(&sa * &sb)));
        if ub != BigInt::from(0) {
            let (q, r) = a.divmod(&b).unwrap();
            prop_assert_eq!(q, from_big(w, &(&ua / &ub)));
            prop_assert_eq!(r, from_big(w, &(&ua % &ub)));
        }
        let one = |c: bool| Logic::from_bool(c);
        prop_assert_eq!(a.cmp(CmpOp::Lt, &b, false).unwrap(), one(ua < ub));
        prop_assert_eq!(a.cmp(CmpOp::Ge, &b, true).unwrap(), one(sa >= sb));
        prop_assert_eq!(a.cmp(CmpOp::Eq, &b, false).unwrap(), one(ua == ub));
    }

    #[test]
    fn text_round_trips(bits in proptest::collection::vec(0usize..3, 1..150)) {
        let b: Vec<Bit> = bits.iter().map(|d| Bit::ALL[*d]).collect();
        let l = Logic::from_bits_msb(&b);
        prop_assert!(l.is_canonical());
        let back: Logic = l.to_string().parse().unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn select_of_cat_recovers_parts((a, b) in pair()) {
        let c = Logic::cat(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(c.select(0, a.width()), a.clone());
        prop_assert_eq!(c.select(a.width(), b.width()), b);
        prop_assert_eq!(c.insert(&Logic::from_u64(16, 0), &a), c.clone());
    }
}
