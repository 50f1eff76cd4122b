//! Byte- and token-level corruption of valid documents.

#![allow(dead_code)]

use rand::Rng;

const NUMBERS: [&str; 12] = [
    "0",
    "-1",
    "1e400",
    "18446744073709551616",
    "18446744073709551615",
    "4294967296",
    "4294967295",
    "0.5",
    "\"7.25\"",
    "null",
    "\"start\"",
    "[]",
];

/// One random corruption of `doc`; sometimes several stacked.
pub fn mutate(doc: &[u8], rng: &mut impl Rng) -> Vec<u8> {
    let mut out = doc.to_vec();
    for _ in 0..rng.gen_range(1..=3) {
        out = once(&out, rng);
    }
    out
}

fn once(doc: &[u8], rng: &mut impl Rng) -> Vec<u8> {
    let mut out = doc.to_vec();
    if out.is_empty() {
        return vec![rng.gen()];
    }
    let at = rng.gen_range(0..out.len());
    match rng.gen_range(0..8) {
        0 => out[at] = rng.gen(),
        1 => {
            out.remove(at);
        }
        2 => out.insert(at, b"{}[],:\"0-e.\\"[rng.gen_range(0..12)]),
        3 => out.truncate(at),
        4 => {
            // duplicate a slice somewhere else
            let end = (at + rng.gen_range(1..64)).min(out.len());
            let piece = out[at..end].to_vec();
            let to = rng.gen_range(0..out.len());
            out.splice(to..to, piece);
        }
        _ => {
            // replace a number token with an interesting value
            let digits: Vec<usize> = (0..out.len())
                .filter(|&i| out[i].is_ascii_digit() && (i == 0 || !out[i - 1].is_ascii_digit()))
                .collect();
            if digits.is_empty() {
                return out;
            }
            let start = digits[rng.gen_range(0..digits.len())];
            let end = (start..out.len()).find(|&i| !out[i].is_ascii_digit()).unwrap_or(out.len());
            let value = NUMBERS[rng.gen_range(0..NUMBERS.len())].as_bytes();
            out.splice(start..end, value.iter().copied());
        }
    }
    out
}
