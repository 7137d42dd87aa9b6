use crate::error::{Error, Result};
use crate::int::Int;
use crate::recurrence::{evolve, State};

/// `(n, a) -> (n/2, a - n/2)`, which maps ratio `r` to `2r - 1`, so an
/// evolution at ratio 2 is reproduced by one at ratio 3 running twice as
/// fast.
pub fn emulate<T: Int>(s: &State<T>) -> Result<State<T>> {
    let (half, rem) = s.n.div_rem(&T::small(2));
    if !rem.is_zero() {
        return Err(Error::Precondition(format!("emulation needs an even index, got {s}")));
    }
    let a = s.a.try_sub(&half)?;
    State::new(half, a)
}

/// First `(transformed, expected)` pair where the evolution from `(4, 8)`
/// at even `n = 2n' >= 6` disagrees with the evolution from `(1, 7)` at
/// `n'`, checking `n' <= n_prime_max`.
pub fn emulation_mismatch(n_prime_max: u64) -> Result<Option<(State, State)>> {
    let fast: Vec<State> = evolve(&State::new(1i128, 7)?, n_prime_max as i128)?
        .map(|r| r.map(|r| r.state()))
        .collect::<Result<_>>()?;
    let slow = evolve(&State::new(4i128, 8)?, 2 * n_prime_max as i128)?;
    for record in slow {
        let s = record?.state();
        if s.n < 6 || s.n % 2 != 0 {
            continue;
        }
        let image = emulate(&s)?;
        // fast[k] holds index k + 2
        let expected = &fast[(image.n - 2) as usize];
        if &image != expected {
            return Ok(Some((image, expected.clone())));
        }
    }
    Ok(None)
}
