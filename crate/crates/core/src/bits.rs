//! Word-packed bit vectors.
//!
//! Bit `j` lives in word `j / 64` at position `j % 64`. Bits past the logical
//! length are always zero so word-wise popcounts and comparisons are exact.

/// Number of 64-bit words needed to hold `bits` bits.
#[inline]
pub const fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub(crate) const fn locate(bit: usize) -> (usize, u64) {
    (bit / 64, 1u64 << (bit % 64))
}

#[inline]
pub(crate) fn get(words: &[u64], bit: usize) -> bool {
    let (w, m) = locate(bit);
    words[w] & m != 0
}

#[inline]
pub(crate) fn set(words: &mut [u64], bit: usize, value: bool) {
    let (w, m) = locate(bit);
    if value {
        words[w] |= m;
    } else {
        words[w] &= !m;
    }
}

#[inline]
pub(crate) fn flip(words: &mut [u64], bit: usize) {
    let (w, m) = locate(bit);
    words[w] ^= m;
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn is_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// Parity of the popcount of `a & b`.
#[inline]
pub(crate) fn and_parity(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

/// Symplectic product of two (x, z) rows: `x1·z2 ⊕ x2·z1`.
#[inline]
pub(crate) fn symplectic(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u64;
    for i in 0..x1.len() {
        acc ^= (x1[i] & z2[i]) ^ (x2[i] & z1[i]);
    }
    acc.count_ones() & 1 == 1
}

/// Sum of the single-qubit `i`-exponents picked up when the Pauli row
/// `(x1, z1)` multiplies `(x2, z2)` from the left, i.e. `Σ_j g(x1_j, z1_j, x2_j, z2_j)`.
///
/// Computed word-wise: positions contributing `+1` are `Y·Z`, `X·Y`, `Z·X`;
/// positions contributing `-1` are `Y·X`, `X·Z`, `Z·Y`.
#[inline]
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> i64 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for i in 0..x1.len() {
        let (a, b, c, d) = (x1[i], z1[i], x2[i], z2[i]);
        let y1 = a & b;
        let xo1 = a & !b;
        let zo1 = !a & b;
        let y2 = c & d;
        let xo2 = c & !d;
        let zo2 = !c & d;
        plus += ((y1 & zo2) | (xo1 & y2) | (zo1 & xo2)).count_ones();
        minus += ((y1 & xo2) | (xo1 & zo2) | (zo1 & y2)).count_ones();
    }
    plus as i64 - minus as i64
}

/// Mask with the low `bits % 64` bits of the last word set (all ones when aligned).
#[inline]
pub(crate) fn tail_mask(bits: usize) -> u64 {
    match bits % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}
