//! Arbitrary-precision Maclaurin evaluation of the Airy functions.
//!
//! The series are summed in fixed point with 250 decimal digits, enough to
//! absorb the cancellation at x = −50 where single terms reach 1e102.

use num_bigint::BigInt;

const DIGITS: usize = 250;

const AI0: &str = "0.355028053887817239260063186004183176397979174199177240583326510300810042450126712957174246054040271688420448730349495839758292670446161937105040240022585386384009902601035712819051568203290249169644766182327968";
const MINUS_AIP0: &str = "0.258819403792806798405183560189203963479091138354934582210001813856102772676790280654196405827275384313371193211789133381275035952167626014785050989848419446632029644888805601878383305126950525128293342497999884";

fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS as u32)
}

fn fixed(decimal: &str) -> BigInt {
    let frac = decimal.strip_prefix("0.").unwrap();
    let mut digits: String = frac.chars().take(DIGITS).collect();
    while digits.len() < DIGITS {
        digits.push('0');
    }
    digits.parse().unwrap()
}

fn to_f64(v: &BigInt) -> f64 {
    let keep = BigInt::from(10u32).pow((DIGITS - 30) as u32);
    let q: BigInt = v / keep;
    q.to_string().parse::<f64>().unwrap() / 1e30
}

/// Sum of `first · Π x³/((3j+a)(3j+b))` in fixed point.
fn series(x3: &BigInt, first: BigInt, denom: impl Fn(i64) -> i64) -> BigInt {
    let mut term = first;
    let mut sum = BigInt::from(0);
    let mut k = 0i64;
    loop {
        sum += &term;
        term = term * x3 / BigInt::from(denom(k));
        k += 1;
        if term == BigInt::from(0) && k > 4 {
            return sum;
        }
    }
}

/// (Ai, Ai', Bi, Bi') at an integer point.
pub fn airy_reference(x: i64) -> [f64; 4] {
    let one = scale();
    let xb = BigInt::from(x);
    let x3 = &xb * &xb * &xb;
    let f = series(&x3, one.clone(), |k| (3 * k + 2) * (3 * k + 3));
    let g = series(&x3, &one * &xb, |k| (3 * k + 3) * (3 * k + 4));
    // f' starts at x²/2; its k-th ratio is x³/((3k+3)(3k+5)) after reindexing
    let fp = if x == 0 {
        BigInt::from(0)
    } else {
        series(&x3, &one * &xb * &xb / 2, |k| (3 * k + 3) * (3 * k + 5))
    };
    let gp = series(&x3, one.clone(), |k| (3 * k + 1) * (3 * k + 3));
    let (c1, c2) = (fixed(AI0), fixed(MINUS_AIP0));
    let sqrt3 = (BigInt::from(3) * &one * &one).sqrt();
    let comb = |a: &BigInt, b: &BigInt, sign: i32| {
        let s = &c1 * a + BigInt::from(sign) * (&c2 * b);
        s / &one
    };
    let ai = comb(&f, &g, -1);
    let aip = comb(&fp, &gp, -1);
    let bi = comb(&f, &g, 1) * &sqrt3 / &one;
    let bip = comb(&fp, &gp, 1) * &sqrt3 / &one;
    [ai, aip, bi, bip].map(|v| to_f64(&v))
}
