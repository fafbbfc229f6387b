use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `(−1)^((a²−1)/8)` indexed by `a mod 8`.
const TWO_TABLE: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

fn mod8(a: &BigInt) -> usize {
    usize::try_from(a.mod_floor(&BigInt::from(8))).expect("residue fits")
}

fn strip_twos(x: &mut BigInt) -> u64 {
    let v = x.trailing_zeros().unwrap_or(0);
    *x >>= v;
    v
}

/// Kronecker symbol `(a|n)`.
///
/// Restricts to the Legendre symbol for odd primes `n` and to the Jacobi
/// symbol for odd positive `n`; `(a|2)` is `0` for even `a`, `+1` for
/// `a ≡ ±1 (mod 8)`, `−1` for `a ≡ ±3 (mod 8)`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i8 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    if a.is_even() && n.is_even() {
        return 0;
    }
    let mut a = a.clone();
    let mut b = n.clone();
    let v = strip_twos(&mut b);
    let mut k: i8 = if v % 2 == 0 { 1 } else { TWO_TABLE[mod8(&a)] };
    if b.is_negative() {
        b = -b;
        if a.is_negative() {
            k = -k;
        }
    }
    // b odd and positive from here on
    loop {
        if a.is_zero() {
            return if b.is_one() { k } else { 0 };
        }
        let v = strip_twos(&mut a);
        if v % 2 == 1 {
            k *= TWO_TABLE[mod8(&b)];
        }
        if mod8(&a) % 4 == 3 && mod8(&b) % 4 == 3 {
            k = -k;
        }
        let r = a.abs();
        a = b.mod_floor(&r);
        b = r;
    }
}
