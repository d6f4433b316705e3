//! Syndrome error correction over short binary linear codes, and Toeplitz
//! hashing.
//!
//! Codes are at most 16 bits long, so a block fits in a `u32` and the full
//! coset-leader table (one minimum-weight error pattern per syndrome) is
//! built exhaustively at construction.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};

pub const MAX_BLOCK_LEN: usize = 16;

/// A binary linear code described by its parity-check matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeRepr", into = "CodeRepr")]
pub struct LinearCode {
    block_len: usize,
    dimension: usize,
    /// Row `r` has bit `j` set when `H[r][j] = 1`.
    parity_check: Vec<u32>,
    correction_radius: usize,
    /// Minimum-weight error pattern for every syndrome value.
    leaders: Vec<u32>,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LinearCode[{}, {}] t={}",
            self.block_len, self.dimension, self.correction_radius
        )
    }
}

fn parity(x: u32) -> u32 {
    x.count_ones() & 1
}

fn gf2_rank(rows: &[u32]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..32 {
        let mask = 1u32 << bit;
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] & mask != 0) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row & mask != 0 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

impl LinearCode {
    /// Builds a code from parity-check rows (bit `j` of a row is column `j`).
    ///
    /// Fails unless the rows are independent over GF(2) and every error of
    /// weight at most `correction_radius` has its own syndrome.
    pub fn new(block_len: usize, parity_check: Vec<u32>, correction_radius: usize) -> Result<Self> {
        if block_len == 0 || block_len > MAX_BLOCK_LEN {
            return Err(Error::Code(format!(
                "block length {block_len} not in 1..=16"
            )));
        }
        let redundancy = parity_check.len();
        if redundancy == 0 || redundancy > block_len {
            return Err(Error::Code(format!(
                "{redundancy} parity checks for block length {block_len}"
            )));
        }
        if parity_check.iter().any(|&row| row >> block_len != 0) {
            return Err(Error::Code("parity-check row wider than the block".into()));
        }
        if gf2_rank(&parity_check) != redundancy {
            return Err(Error::Code(
                "parity-check matrix is not full row rank".into(),
            ));
        }

        let syndrome_of = |e: u32| -> usize {
            parity_check
                .iter()
                .enumerate()
                .fold(0usize, |s, (r, &row)| s | (parity(row & e) as usize) << r)
        };
        let mut patterns: Vec<u32> = (0..1u32 << block_len).collect();
        patterns.sort_by_key(|&e| (e.count_ones(), e));
        let mut leaders = vec![u32::MAX; 1 << redundancy];
        for e in patterns {
            let s = syndrome_of(e);
            if leaders[s] == u32::MAX {
                leaders[s] = e;
            } else if (e.count_ones() as usize) <= correction_radius {
                return Err(Error::Code(format!(
                    "weight-{} errors {:#x} and {:#x} share a syndrome; radius {correction_radius} is not correctable",
                    e.count_ones(),
                    leaders[s],
                    e
                )));
            }
        }
        debug_assert!(leaders.iter().all(|&e| e != u32::MAX));

        Ok(Self {
            block_len,
            dimension: block_len - redundancy,
            parity_check,
            correction_radius,
            leaders,
        })
    }

    /// Cyclic code generated by `generator` (bit `i` = coefficient of `x^i`);
    /// column `i` of H is `x^i mod g(x)`.
    pub fn cyclic(block_len: usize, generator: u32, correction_radius: usize) -> Result<Self> {
        if generator == 0 {
            return Err(Error::Code("zero generator polynomial".into()));
        }
        let degree = 31 - generator.leading_zeros() as usize;
        let mut rows = vec![0u32; degree];
        let mut rem = 1u32;
        for col in 0..block_len {
            for (r, row) in rows.iter_mut().enumerate() {
                *row |= (rem >> r & 1) << col;
            }
            rem <<= 1;
            if rem >> degree & 1 == 1 {
                rem ^= generator;
            }
        }
        Self::new(block_len, rows, correction_radius)
    }

    /// Hamming [7,4], corrects one error.
    pub fn hamming_7_4() -> Self {
        // columns are the binary expansions of 1..=7
        let rows = (0..3)
            .map(|r| (0..7).fold(0u32, |row, j| row | (((j + 1) >> r) & 1) << j))
            .collect();
        Self::new(7, rows, 1).expect("Hamming [7,4] is valid")
    }

    /// Repetition [3,1], corrects one error.
    pub fn repetition_3() -> Self {
        Self::new(3, vec![0b011, 0b110], 1).expect("repetition code is valid")
    }

    /// Extended Hamming [8,4]; corrects one error and flags double errors.
    pub fn extended_hamming_8_4() -> Self {
        let mut rows: Vec<u32> = Self::hamming_7_4().parity_check;
        rows.push(0xff);
        Self::new(8, rows, 1).expect("extended Hamming [8,4] is valid")
    }

    /// Binary BCH [15,7], corrects two errors. `g(x) = x^8 + x^7 + x^6 + x^4 + 1`.
    pub fn bch_15_7() -> Self {
        Self::cyclic(15, 0b1_1101_0001, 2).expect("BCH [15,7] is valid")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "hamming74" => Ok(Self::hamming_7_4()),
            "repetition3" => Ok(Self::repetition_3()),
            "hamming84" => Ok(Self::extended_hamming_8_4()),
            "bch157" => Ok(Self::bch_15_7()),
            other => Err(Error::Code(format!(
                "unknown code `{other}` (expected hamming74, repetition3, hamming84 or bch157)"
            ))),
        }
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn redundancy(&self) -> usize {
        self.block_len - self.dimension
    }

    pub fn correction_radius(&self) -> usize {
        self.correction_radius
    }

    pub fn parity_check_rows(&self) -> &[u32] {
        &self.parity_check
    }

    /// Column `j` of H as a syndrome value.
    pub fn column(&self, j: usize) -> u32 {
        self.block_syndrome(1 << j)
    }

    /// Parity-check matrix as a row-major bit string.
    pub fn parity_check_bits(&self) -> Bits {
        self.parity_check
            .iter()
            .flat_map(|&row| (0..self.block_len).map(move |j| row >> j & 1 == 1))
            .collect()
    }

    /// Leaked bits per data bit, `(n_b - k) / n_b`.
    pub fn syndrome_overhead(&self) -> f64 {
        self.redundancy() as f64 / self.block_len as f64
    }

    pub fn blocks_for(&self, len: usize) -> usize {
        len.div_ceil(self.block_len)
    }

    pub fn syndrome_len_for(&self, len: usize) -> usize {
        self.blocks_for(len) * self.redundancy()
    }

    fn block_syndrome(&self, block: u32) -> u32 {
        self.parity_check
            .iter()
            .enumerate()
            .fold(0u32, |s, (r, &row)| s | parity(row & block) << r)
    }

    fn leader(&self, syndrome: u32) -> u32 {
        self.leaders[syndrome as usize]
    }

    /// Block `b` of `x`, zero-padded past the end.
    fn block(&self, x: &Bits, b: usize) -> u32 {
        let start = b * self.block_len;
        (0..self.block_len)
            .filter(|&j| start + j < x.len() && x[start + j])
            .fold(0u32, |acc, j| acc | 1 << j)
    }
}

/// Concatenated per-block syndromes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Syndrome {
    pub bits: Bits,
}

impl Syndrome {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn block(&self, b: usize, redundancy: usize) -> u32 {
        (0..redundancy).fold(0u32, |acc, r| {
            acc | (self.bits[b * redundancy + r] as u32) << r
        })
    }
}

/// Per-block syndromes of `x`, zero-padding the last block.
pub fn syndrome(code: &LinearCode, x: &Bits) -> Syndrome {
    let red = code.redundancy();
    let mut bits = Bits::with_capacity(code.syndrome_len_for(x.len()));
    for b in 0..code.blocks_for(x.len()) {
        let s = code.block_syndrome(code.block(x, b));
        for r in 0..red {
            bits.push(s >> r & 1 == 1);
        }
    }
    Syndrome { bits }
}

/// Same as [`syndrome`] but refuses inputs that are not a whole number of blocks.
pub fn syndrome_unpadded(code: &LinearCode, x: &Bits) -> Result<Syndrome> {
    if !x.len().is_multiple_of(code.block_len()) {
        return Err(Error::Length(format!(
            "input of {} bits is not a multiple of the block length {}",
            x.len(),
            code.block_len()
        )));
    }
    Ok(syndrome(code, x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub corrected: Bits,
    /// Blocks whose coset leader is heavier than the correction radius.
    pub failed_blocks: Vec<usize>,
}

impl Decoded {
    pub fn failed(&self) -> bool {
        !self.failed_blocks.is_empty()
    }
}

/// Corrects `y` towards the string whose syndrome is `s` using the
/// minimum-weight coset leader of each block.
pub fn decode(code: &LinearCode, y: &Bits, s: &Syndrome) -> Result<Decoded> {
    let blocks = code.blocks_for(y.len());
    if s.len() != blocks * code.redundancy() {
        return Err(Error::Length(format!(
            "syndrome of {} bits for {} blocks of redundancy {}",
            s.len(),
            blocks,
            code.redundancy()
        )));
    }
    let mut corrected = y.clone();
    let mut failed_blocks = Vec::new();
    for b in 0..blocks {
        let diff = s.block(b, code.redundancy()) ^ code.block_syndrome(code.block(y, b));
        let e = code.leader(diff);
        if e.count_ones() as usize > code.correction_radius() {
            failed_blocks.push(b);
        }
        let start = b * code.block_len();
        for j in 0..code.block_len() {
            if e >> j & 1 == 1 && start + j < y.len() {
                corrected.set(start + j, !corrected[start + j]);
            }
        }
    }
    Ok(Decoded {
        corrected,
        failed_blocks,
    })
}

/// Seed of a binary Toeplitz matrix with `output_len` rows and `input_len`
/// columns. Entry `(i, j)` is `bits[output_len - 1 - i + j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzSeed {
    pub bits: Bits,
    pub input_len: usize,
    pub output_len: usize,
}

fn seed_len(input_len: usize, output_len: usize) -> usize {
    (input_len + output_len).saturating_sub(1)
}

impl ToeplitzSeed {
    pub fn new(bits: Bits, input_len: usize, output_len: usize) -> Result<Self> {
        let want = seed_len(input_len, output_len);
        if bits.len() != want {
            return Err(Error::Length(format!(
                "Toeplitz seed has {} bits, needs {want} for {input_len} -> {output_len}",
                bits.len()
            )));
        }
        Ok(Self {
            bits,
            input_len,
            output_len,
        })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, input_len: usize, output_len: usize) -> Self {
        let bits = (0..seed_len(input_len, output_len))
            .map(|_| rng.random())
            .collect();
        Self {
            bits,
            input_len,
            output_len,
        }
    }

    /// From the matrix's first column (length `output_len`) and first row
    /// (length `input_len`), which must agree on the corner.
    pub fn from_column_row(column: &Bits, row: &Bits) -> Result<Self> {
        let (out, inp) = (column.len(), row.len());
        if out == 0 || inp == 0 {
            return Err(Error::Length(
                "Toeplitz matrix needs a row and a column".into(),
            ));
        }
        if column[0] != row[0] {
            return Err(Error::Length(
                "first row and column disagree on the corner".into(),
            ));
        }
        let bits = (0..out)
            .rev()
            .map(|i| column[i])
            .chain(row.iter().skip(1))
            .collect();
        Self::new(bits, inp, out)
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.bits[self.output_len - 1 - i + j]
    }
}

/// Multiplies `x` by the Toeplitz matrix of `seed` over GF(2).
pub fn toeplitz_hash(seed: &ToeplitzSeed, x: &Bits) -> Result<Bits> {
    if x.len() != seed.input_len {
        return Err(Error::Length(format!(
            "hash input has {} bits, seed expects {}",
            x.len(),
            seed.input_len
        )));
    }
    if seed.output_len == 0 {
        return Ok(Bits::new());
    }
    let xw = x.to_words();
    let mut sw = seed.bits.to_words();
    sw.push(0);
    let window = |offset: usize, w: usize| -> u64 {
        let p = offset + 64 * w;
        let (q, r) = (p / 64, p % 64);
        let lo = sw.get(q).copied().unwrap_or(0);
        if r == 0 {
            lo
        } else {
            let hi = sw.get(q + 1).copied().unwrap_or(0);
            lo >> r | hi << (64 - r)
        }
    };
    Ok((0..seed.output_len)
        .map(|i| {
            let offset = seed.output_len - 1 - i;
            let ones: u32 = xw
                .iter()
                .enumerate()
                .map(|(w, &xword)| (xword & window(offset, w)).count_ones())
                .sum();
            ones & 1 == 1
        })
        .collect())
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    block_len: usize,
    dimension: usize,
    correction_radius: usize,
    parity_check: Bits,
}

impl From<LinearCode> for CodeRepr {
    fn from(code: LinearCode) -> Self {
        CodeRepr {
            block_len: code.block_len,
            dimension: code.dimension,
            correction_radius: code.correction_radius,
            parity_check: code.parity_check_bits(),
        }
    }
}

impl TryFrom<CodeRepr> for LinearCode {
    type Error = Error;

    fn try_from(repr: CodeRepr) -> Result<Self> {
        let n = repr.block_len;
        let rows = repr.block_len.saturating_sub(repr.dimension);
        if n == 0 || repr.parity_check.len() != rows * n {
            return Err(Error::Code(
                "parity-check bits do not match the code shape".into(),
            ));
        }
        let parity_check = (0..rows)
            .map(|r| {
                (0..n).fold(0u32, |row, j| {
                    row | (repr.parity_check[r * n + j] as u32) << j
                })
            })
            .collect();
        LinearCode::new(n, parity_check, repr.correction_radius)
    }
}
