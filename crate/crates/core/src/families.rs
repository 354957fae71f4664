//! Standard relations used by tests, the CLI and the demo page.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::relation::{Relation, Shape};

/// Two-party function `f(x, y) ∈ 0..outputs`.
pub fn cc_function(x_size: usize, y_size: usize, outputs: usize, f: impl Fn(usize, usize) -> usize) -> Result<Relation> {
    Relation::from_fn(Shape::Cc { x_size, y_size }, outputs, |i, z| f(i / y_size, i % y_size) == z)
}

/// Query function over `n` bits; bit `i` of the input is variable `i`.
pub fn query_function(n: usize, outputs: usize, f: impl Fn(u32) -> usize) -> Result<Relation> {
    Relation::from_fn(Shape::Query { n }, outputs, |i, z| f(i as u32) == z)
}

pub fn equality(size: usize) -> Result<Relation> {
    cc_function(size, size, 2, |x, y| usize::from(x == y))
}

pub fn greater_than(size: usize) -> Result<Relation> {
    cc_function(size, size, 2, |x, y| usize::from(x > y))
}

pub fn sum_mod(size: usize, m: usize) -> Result<Relation> {
    cc_function(size, size, m, |x, y| (x + y) % m)
}

/// XOR of one bit each.
pub fn xor1() -> Result<Relation> {
    cc_function(2, 2, 2, |x, y| x ^ y)
}

/// AND of one bit each.
pub fn and1() -> Result<Relation> {
    cc_function(2, 2, 2, |x, y| x & y)
}

/// Inner product mod 2 of `bits`-bit strings.
pub fn inner_product(bits: usize) -> Result<Relation> {
    let size = 1 << bits;
    cc_function(size, size, 2, |x, y| ((x & y).count_ones() & 1) as usize)
}

/// Off the diagonal either answer is fine; on it only 1 is.
pub fn slack_diagonal(size: usize) -> Result<Relation> {
    Relation::from_fn(Shape::Cc { x_size: size, y_size: size }, 2, |i, z| {
        i / size != i % size || z == 1
    })
}

pub fn constant_cc(x_size: usize, y_size: usize) -> Result<Relation> {
    cc_function(x_size, y_size, 1, |_, _| 0)
}

pub fn parity(n: usize) -> Result<Relation> {
    query_function(n, 2, |x| (x.count_ones() & 1) as usize)
}

pub fn or(n: usize) -> Result<Relation> {
    query_function(n, 2, |x| usize::from(x != 0))
}

pub fn and(n: usize) -> Result<Relation> {
    query_function(n, 2, |x| usize::from(x.count_ones() as usize == n))
}

pub fn majority(n: usize) -> Result<Relation> {
    query_function(n, 2, |x| usize::from(2 * x.count_ones() as usize > n))
}

/// Output is the value of the first variable.
pub fn dictator(n: usize) -> Result<Relation> {
    query_function(n, 2, |x| (x & 1) as usize)
}

pub fn constant_query(n: usize) -> Result<Relation> {
    query_function(n, 1, |_| 0)
}

/// Seeded random relation: every input accepts a nonempty random subset of
/// the outputs, each output independently with probability `1/extra_odds`
/// on top of one forced choice.
pub fn random_relation(shape: Shape, outputs: usize, extra_odds: u32, seed: u64) -> Result<Relation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accept = (0..shape.input_count())
        .map(|_| {
            let forced = rng.random_range(0..outputs);
            (0..outputs)
                .filter(|&z| z == forced || (extra_odds > 0 && rng.random_range(0..extra_odds) == 0))
                .collect()
        })
        .collect();
    Relation::new(shape, (0..outputs).map(|z| z.to_string()).collect(), accept)
}

/// Looks up a named family, e.g. `eq:3`, `gt:3`, `mod:3:3`, `xor1`, `and1`,
/// `ip:2`, `slack:3`, `parity:3`, `or:2`, `and:3`, `maj:3`, `dict:2`,
/// `const-cc:2x2`, `const-query:2`,
/// `random-cc:3x3:2:seed` or `random-query:3:2:seed`.
pub fn by_name(spec: &str) -> Result<Relation> {
    use crate::error::Error;
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::malformed(format!("bad number `{s}` in `{spec}`"))) };
    let dims = |s: &str| -> Result<(usize, usize)> {
        let (a, b) = s.split_once('x').ok_or_else(|| Error::malformed(format!("expected AxB in `{spec}`")))?;
        Ok((num(a)?, num(b)?))
    };
    let small = |k: usize, limit: usize| -> Result<usize> {
        if k == 0 || k > limit {
            Err(Error::malformed(format!("size {k} out of range in `{spec}`")))
        } else {
            Ok(k)
        }
    };
    match parts.as_slice() {
        ["eq", k] => equality(num(k)?),
        ["gt", k] => greater_than(num(k)?),
        ["mod", k, m] => sum_mod(num(k)?, small(num(m)?, 64)?),
        ["xor1"] => xor1(),
        ["and1"] => and1(),
        ["ip", b] => inner_product(small(num(b)?, 3)?),
        ["slack", k] => slack_diagonal(num(k)?),
        ["const-cc", d] => {
            let (x, y) = dims(d)?;
            constant_cc(x, y)
        }
        ["parity", n] => parity(num(n)?),
        ["or", n] => or(num(n)?),
        ["and", n] => and(num(n)?),
        ["maj", n] => majority(num(n)?),
        ["dict", n] => dictator(num(n)?),
        ["const-query", n] => constant_query(num(n)?),
        ["random-cc", d, z, seed] => {
            let (x_size, y_size) = dims(d)?;
            random_relation(Shape::Cc { x_size, y_size }, small(num(z)?, 64)?, 3, num(seed)? as u64)
        }
        ["random-query", n, z, seed] => random_relation(Shape::Query { n: num(n)? }, small(num(z)?, 64)?, 3, num(seed)? as u64),
        _ => Err(Error::malformed(format!("unknown relation family `{spec}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functions_accept_exactly_one_output() {
        for r in [equality(3).unwrap(), greater_than(3).unwrap(), parity(3).unwrap(), majority(3).unwrap()] {
            for i in 0..r.input_count() {
                assert_eq!(r.accept_set(i).len(), 1);
            }
        }
    }

    #[test]
    fn indexing_matches_conventions() {
        let gt = greater_than(3).unwrap();
        // (2, 1): input 2 * 3 + 1.
        assert!(gt.accepts(7, 1));
        assert!(gt.accepts(5, 0));
        let d = dictator(3).unwrap();
        assert!(d.accepts(0b001, 1));
        assert!(d.accepts(0b110, 0));
    }

    #[test]
    fn random_relations_are_seeded_and_total() {
        let shape = Shape::Cc { x_size: 3, y_size: 3 };
        let a = random_relation(shape, 3, 3, 11).unwrap();
        let b = random_relation(shape, 3, 3, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.empty_inputs().is_empty());
    }

    #[test]
    fn names_resolve() {
        assert_eq!(by_name("eq:3").unwrap(), equality(3).unwrap());
        assert_eq!(by_name("const-cc:2x3").unwrap().input_count(), 6);
        assert_eq!(by_name("random-query:3:2:5").unwrap().input_count(), 8);
        assert!(by_name("eq").is_err());
        assert!(by_name("mod:3:0").is_err());
    }
}
